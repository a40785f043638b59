#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "simrt/error.hpp"
#include "simrt/platform_profile.hpp"
#include "simrt/scenarios.hpp"
#include "simrt/sim_engine.hpp"

namespace py = pybind11;
using namespace simrt;

namespace {

UnitKind unit_arg(const std::string& name) {
  auto u = parse_unit_kind(name);
  if (!u) throw Error(ErrorCode::ParseError, "unknown unit '" + name + "'");
  return *u;
}

SetupMode mode_arg(const std::string& name) {
  auto m = parse_setup_mode(name);
  if (!m) throw Error(ErrorCode::ParseError, "setup_mode must be 'amortized' or 'per-offload'");
  return *m;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["completed"] = m.completed;
  d["drops"] = m.drops;
  d["skipped"] = m.skipped;
  d["makespan_us"] = m.makespan_us;
  d["throughput_tasks_per_ms"] = m.throughput_tasks_per_ms;
  py::dict lat, per_unit;
  for (const auto& [u, v] : m.avg_latency_ms) lat[py::str(std::string(to_string(u)))] = v;
  for (const auto& [u, v] : m.tasks_per_unit) per_unit[py::str(std::string(to_string(u)))] = v;
  d["avg_latency_ms"] = lat;
  d["tasks_per_unit"] = per_unit;
  d["total_energy_uj"] = m.total_energy_uj;
  d["total_energy_j"] = m.total_energy_j();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Heterogeneous task-scheduling simulator";

  static py::exception<Error> simrt_error(m, "SimrtError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(simrt_error, e.what());
    }
  });

  py::class_<PlatformProfile>(m, "Profile")
      .def_property_readonly("name", &PlatformProfile::name)
      .def_property_readonly("units",
                             [](const PlatformProfile& p) {
                               std::vector<std::string> out;
                               for (const auto& u : p.units()) out.emplace_back(to_string(u.kind));
                               return out;
                             })
      .def_property_readonly("workloads",
                             [](const PlatformProfile& p) {
                               std::vector<std::string> out;
                               for (const auto& w : p.workloads()) out.push_back(w.name);
                               return out;
                             })
      .def("kernel_time", [](const PlatformProfile& p, const std::string& wl,
                             const std::string& unit) { return p.kernel_time(wl, unit_arg(unit)); })
      .def("energy_of", [](const PlatformProfile& p, const std::string& wl,
                           const std::string& unit) { return p.energy_of(wl, unit_arg(unit)); })
      .def(
          "offload_time",
          [](const PlatformProfile& p, const std::string& wl, const std::string& unit, const std::string& mode,
             bool initialized) {
            const auto b = p.offload_time(wl, unit_arg(unit), mode_arg(mode), initialized);
            py::dict d;
            d["setup_us"] = b.setup_us;
            d["xfer_in_us"] = b.xfer_in_us;
            d["kernel_us"] = b.kernel_us;
            d["xfer_out_us"] = b.xfer_out_us;
            d["total_us"] = b.total_us();
            return d;
          },
          py::arg("workload"), py::arg("unit"), py::arg("setup_mode") = "amortized", py::arg("initialized") = true)
      .def("restricted_to",
           [](const PlatformProfile& p, const std::vector<std::string>& names) {
             std::vector<UnitKind> keep;
             for (const auto& n : names) keep.push_back(unit_arg(n));
             return p.restricted_to(keep);
           })
      .def("preference_matrix", [](const PlatformProfile& p) {
        std::vector<std::tuple<std::string, std::string, std::string>> rows;
        for (const auto& r : preference_matrix(p)) {
          rows.emplace_back(r.workload, std::string(to_string(*r.perf)), std::string(to_string(*r.energy)));
        }
        return rows;
      });

  py::class_<TaskGraph>(m, "Scenario")
      .def("__len__", &TaskGraph::size)
      .def("to_json", [](const TaskGraph& g) { return scenario_to_json(g); })
      .def("workloads",
           [](const TaskGraph& g) {
             std::vector<std::string> out;
             for (const auto& t : g.tasks()) out.push_back(t.workload);
             return out;
           })
      .def("__eq__", [](const TaskGraph& a, const TaskGraph& b) { return a == b; });

  m.def("load_profile", &load_profile, py::arg("text"));
  m.def("load_profile_file", &load_profile_file, py::arg("path"));
  m.def("builtin_profile", [](const std::string& name) { return builtin_profile(name); }, py::arg("name"));
  m.def("builtin_profile_names", &builtin_profile_names);
  m.def("derive_kernel_us", &derive_kernel_us, py::arg("ops"), py::arg("gops"));

  m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); }, py::arg("text"));
  m.def("load_scenario_file", &load_scenario_file, py::arg("path"));
  m.def("validate_graph", [](const TaskGraph& g) -> std::optional<std::string> {
    if (auto err = validate_graph(g)) return err->describe();
    return std::nullopt;
  });
  m.def("convolution_batch", &convolution_batch, py::arg("n"));
  m.def(
      "robot_pipeline",
      [](double duration_s, double camera_fps, double imu_hz, double dl_fps, double plan_hz) {
        return robot_pipeline(RobotParams{duration_s, camera_fps, imu_hz, dl_fps, plan_hz});
      },
      py::arg("duration_s") = 10.0, py::arg("camera_fps") = 25.0, py::arg("imu_hz") = 200.0,
      py::arg("dl_fps") = 3.0, py::arg("plan_hz") = 10.0);
  m.def(
      "buffer_pressure",
      [](double duration_s, double camera_fps, std::size_t flood) {
        BufferPressureParams p;
        p.duration_s = duration_s;
        p.camera_fps = camera_fps;
        p.flood = flood;
        return buffer_pressure(p);
      },
      py::arg("duration_s") = 1.0, py::arg("camera_fps") = 25.0, py::arg("flood") = 40);
  m.def("inference_comparison", [] {
    std::vector<std::tuple<std::string, TaskGraph, std::optional<std::string>>> out;
    for (auto& v : inference_comparison()) {
      std::optional<std::string> pin;
      if (v.pin) pin = std::string(to_string(*v.pin));
      out.emplace_back(v.name, std::move(v.graph), pin);
    }
    return out;
  });

  m.def(
      "simulate",
      [](const TaskGraph& graph, const PlatformProfile& profile, const std::string& policy,
         const std::string& setup_mode, std::uint64_t seed, std::size_t buffer_capacity,
         std::optional<std::size_t> cloud_slots, std::optional<std::string> weights, bool cloud_in_makespan) {
        auto p = parse_policy(policy);
        if (!p) throw Error(ErrorCode::ParseError, "unknown policy '" + policy + "'");
        SimConfig cfg;
        cfg.setup_mode = mode_arg(setup_mode);
        cfg.seed = seed;
        cfg.buffer_capacity = buffer_capacity;
        cfg.cloud_slots = cloud_slots;
        cfg.cloud_in_makespan = cloud_in_makespan;
        if (weights) {
          auto w = parse_weights(*weights);
          if (!w) throw Error(ErrorCode::ParseError, "weights must look like g=4,d=2,c=2");
          cfg.scheduler.weights = *w;
        }
        SimResult r;
        {
          py::gil_scoped_release release;
          r = simulate(graph, profile, *p, cfg);
        }
        py::dict out;
        out["metrics"] = metrics_dict(r.metrics);
        out["trace_csv"] = trace_to_csv(r.trace);
        return out;
      },
      py::arg("scenario"), py::arg("profile"), py::arg("policy") = "throughput", py::arg("setup_mode") = "amortized",
      py::arg("seed") = 0, py::arg("buffer_capacity") = 4, py::arg("cloud_slots") = std::nullopt,
      py::arg("weights") = std::nullopt, py::arg("cloud_in_makespan") = true);
}
