#include "simrt/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "json_util.hpp"
#include "simrt/error.hpp"
#include "simrt/scenarios.hpp"

namespace simrt::cli {

namespace {

std::string fixed(double v, int places) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(places) << v;
  return os.str();
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::UnresolvableCost:
    case ErrorCode::UnderflowRelease: return kSimulationError;
    default: return kInputError;
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::NotFound, "cannot write '" + path + "'");
  f << content;
}

}  // namespace

std::string render_table(const RunReport& r) {
  std::vector<std::string> header{"policy", "throughput(tasks/ms)"};
  for (auto u : r.units) header.push_back("lat " + std::string(to_string(u)) + "(ms)");
  header.insert(header.end(), {"energy(J)", "drops", "makespan(us)"});

  std::vector<std::vector<std::string>> rows;
  for (const auto& run : r.runs) {
    const auto& m = run.metrics;
    std::vector<std::string> row{to_string(run.policy), fixed(m.throughput_tasks_per_ms, 3)};
    for (auto u : r.units) {
      auto it = m.avg_latency_ms.find(u);
      row.push_back(it == m.avg_latency_ms.end() ? "-" : fixed(it->second, 2));
    }
    row.push_back(fixed(m.total_energy_j(), 2));
    row.push_back(std::to_string(m.drops));
    row.push_back(std::to_string(m.makespan_us));
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size() + 2;
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size() + 2);
  }
  std::ostringstream os;
  os << "# profile=" << r.profile << " scenario=" << r.scenario << " seed=" << r.seed
     << " setup=" << to_string(r.setup_mode) << "\n";
  auto emit = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t c = 0; c < cells.size(); ++c) line += pad(cells[c], width[c]);
    line.erase(line.find_last_not_of(' ') + 1);
    os << line << "\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return os.str();
}

std::string report_to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["profile"] = r.profile;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["setup_mode"] = std::string(to_string(r.setup_mode));
  j["units"] = nlohmann::ordered_json::array();
  for (auto u : r.units) j["units"].push_back(std::string(to_string(u)));
  j["runs"] = nlohmann::ordered_json::array();
  for (const auto& run : r.runs) {
    j["runs"].push_back({{"policy", to_string(run.policy)},
                         {"metrics", nlohmann::ordered_json::parse(metrics_to_json(run.metrics))}});
  }
  return j.dump(2) + "\n";
}

RunReport report_from_json(std::string_view text) {
  using detail::json;
  const json j = detail::parse_json(text);
  RunReport r;
  try {
    r.profile = j.at("profile").get<std::string>();
    r.scenario = j.at("scenario").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    auto mode = parse_setup_mode(j.at("setup_mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::ParseError, "report.setup_mode");
    r.setup_mode = *mode;
    for (const auto& u : j.at("units")) {
      auto kind = parse_unit_kind(u.get<std::string>());
      if (!kind) throw Error(ErrorCode::ParseError, "report.units");
      r.units.push_back(*kind);
    }
    for (const auto& run : j.at("runs")) {
      auto policy = parse_policy(run.at("policy").get<std::string>());
      if (!policy) throw Error(ErrorCode::ParseError, "report.runs.policy");
      r.runs.push_back({*policy, metrics_from_json(run.at("metrics").dump())});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("report: ") + e.what());
  }
  return r;
}

std::string report_to_csv(const RunReport& r) {
  std::ostringstream os;
  os << "policy,throughput_tasks_per_ms";
  for (auto u : r.units) os << ",latency_ms_" << to_string(u);
  os << ",energy_j,drops,makespan_us,seed\n";
  for (const auto& run : r.runs) {
    const auto& m = run.metrics;
    os << to_string(run.policy) << "," << fixed(m.throughput_tasks_per_ms, 6);
    for (auto u : r.units) {
      auto it = m.avg_latency_ms.find(u);
      os << "," << (it == m.avg_latency_ms.end() ? "" : fixed(it->second, 6));
    }
    os << "," << fixed(m.total_energy_j(), 6) << "," << m.drops << "," << m.makespan_us << "," << r.seed << "\n";
  }
  return os.str();
}

std::string render_preferences(const PlatformProfile& profile) {
  std::ostringstream os;
  os << "profile " << profile.name() << "\n";
  os << "units:";
  for (const auto& u : profile.units()) {
    os << " " << to_string(u.kind);
    if (u.kind != UnitKind::CLOUD) os << "(w=" << u.weight;
    if (u.gops) os << ", " << *u.gops << " GOPS/s";
    if (u.kind != UnitKind::CLOUD) os << ")";
  }
  if (const auto& c = profile.cloud()) {
    os << "\ncloud: latency [" << c->latency_lo_us << ", " << c->latency_hi_us << "] us, " << c->energy_uj
       << " uJ/offload";
  }
  os << "\n\n" << pad("workload", 22) << pad("perf", 8) << "energy\n";
  for (const auto& p : preference_matrix(profile)) {
    os << pad(p.workload, 22) << pad(std::string(to_string(*p.perf)), 8) << to_string(*p.energy) << "\n";
  }
  return os.str();
}

std::string render_breakdown(const std::map<UnitKind, PhaseTotals>& totals) {
  std::ostringstream os;
  os << pad("unit", 7) << pad("tasks", 8) << pad("setup_us", 12) << pad("xfer_in_us", 12) << pad("kernel_us", 12)
     << pad("xfer_out_us", 13) << pad("setup%", 8) << pad("kernel%", 9) << "copy_back%\n";
  for (const auto& [unit, t] : totals) {
    const double total = static_cast<double>(t.total_us());
    auto share = [&](Micros v) { return total > 0 ? fixed(100.0 * static_cast<double>(v) / total, 1) : "0.0"; };
    os << pad(std::string(to_string(unit)), 7) << pad(std::to_string(t.tasks), 8)
       << pad(std::to_string(t.setup_us), 12) << pad(std::to_string(t.xfer_in_us), 12)
       << pad(std::to_string(t.kernel_us), 12) << pad(std::to_string(t.xfer_out_us), 13) << pad(share(t.setup_us), 8)
       << pad(share(t.kernel_us), 9) << share(t.xfer_out_us) << "\n";
  }
  return os.str();
}

PlatformProfile resolve_profile(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(name_or_path, ec)) return load_profile_file(name_or_path);
  if (const char* dir = std::getenv("SIMRT_PROFILE_DIR"); dir && *dir) {
    for (const auto& candidate : {fs::path(dir) / name_or_path, fs::path(dir) / (name_or_path + ".json")}) {
      if (fs::is_regular_file(candidate, ec)) return load_profile_file(candidate.string());
    }
  }
  if (builtin_profile_text(name_or_path)) return builtin_profile(name_or_path);
  throw Error(ErrorCode::NotFound, "profile '" + name_or_path + "' (not a file, not in SIMRT_PROFILE_DIR, not builtin)");
}

namespace {

struct SimFlags {
  std::string profile;
  std::string scenario;
  std::string policies = "throughput";
  std::string weights;
  std::uint64_t seed = 0;
  std::string setup_mode = "amortized";
  std::size_t buffers = 4;
  std::size_t cloud_slots = 0;
  std::string restrict_units;
  bool exclude_cloud = false;
  bool fpga_as_gpu = false;
};

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("-p,--profile", f.profile, "Builtin profile name or profile JSON path")->required();
  cmd->add_option("-s,--scenario", f.scenario, "Scenario JSON path")->required();
  cmd->add_option("--weights", f.weights, "Queue weights, e.g. g=4,d=2,c=2");
  cmd->add_option("--seed", f.seed, "RNG seed for cloud latency");
  cmd->add_option("--setup-mode", f.setup_mode, "amortized | per-offload");
  cmd->add_option("--buffers", f.buffers, "Image buffer pool capacity");
  cmd->add_option("--cloud-slots", f.cloud_slots, "Concurrent cloud requests (0 = unlimited)");
  cmd->add_option("--restrict-units", f.restrict_units, "Keep only these local units, e.g. CPU or CPU,GPU");
  cmd->add_flag("--exclude-cloud-makespan", f.exclude_cloud, "Leave cloud completions out of makespan");
  cmd->add_flag("--fpga-as-gpu", f.fpga_as_gpu, "Let an FPGA fill the GPU slot of the basic policies");
}

struct Prepared {
  PlatformProfile profile;
  TaskGraph graph;
  SimConfig config;
  std::vector<Policy> policies;
};

Prepared prepare(const SimFlags& f) {
  PlatformProfile profile = resolve_profile(f.profile);
  if (!f.restrict_units.empty()) {
    std::vector<UnitKind> keep;
    for (const auto& name : split(f.restrict_units, ',')) {
      auto u = parse_unit_kind(name);
      if (!u) throw Error(ErrorCode::ParseError, "--restrict-units: unknown unit '" + name + "'");
      keep.push_back(*u);
    }
    profile = profile.restricted_to(keep);
  }
  TaskGraph graph = load_scenario_file(f.scenario);
  if (auto err = validate_graph(graph)) throw Error(ErrorCode::InvalidScenario, err->describe());
  for (const auto& t : graph.tasks()) {
    if (!profile.workload(t.workload)) {
      throw Error(ErrorCode::MissingCost, "workload '" + t.workload + "' (task " + std::to_string(t.id.value) +
                                              ") is not in profile " + profile.name());
    }
  }

  SimConfig config;
  auto mode = parse_setup_mode(f.setup_mode);
  if (!mode) throw Error(ErrorCode::ParseError, "--setup-mode: expected amortized or per-offload");
  config.setup_mode = *mode;
  config.seed = f.seed;
  config.buffer_capacity = f.buffers;
  if (f.cloud_slots > 0) config.cloud_slots = f.cloud_slots;
  config.cloud_in_makespan = !f.exclude_cloud;
  config.scheduler.fpga_as_gpu = f.fpga_as_gpu;
  if (!f.weights.empty()) {
    auto w = parse_weights(f.weights);
    if (!w) throw Error(ErrorCode::ParseError, "--weights: expected g=<n>,d=<n>,c=<n>");
    config.scheduler.weights = *w;
  }

  std::vector<Policy> policies;
  for (const auto& name : split(f.policies, ',')) {
    auto p = parse_policy(name);
    if (!p) throw Error(ErrorCode::ParseError, "--policy: unknown policy '" + name + "'");
    policies.push_back(*p);
  }
  if (policies.empty()) throw Error(ErrorCode::ParseError, "--policy: no policy given");
  return {std::move(profile), std::move(graph), config, std::move(policies)};
}

int cmd_run(const SimFlags& f, const std::string& format, std::ostream& out) {
  const Prepared prep = prepare(f);
  std::vector<std::future<Metrics>> jobs;
  for (auto p : prep.policies) {
    jobs.push_back(std::async(std::launch::async, [&prep, p] {
      return simulate(prep.graph, prep.profile, p, prep.config).metrics;
    }));
  }
  RunReport report;
  report.profile = prep.profile.name();
  report.scenario = f.scenario;
  report.seed = f.seed;
  report.setup_mode = prep.config.setup_mode;
  report.units = prep.profile.local_units();
  for (std::size_t i = 0; i < jobs.size(); ++i) report.runs.push_back({prep.policies[i], jobs[i].get()});
  const bool used_cloud = std::any_of(report.runs.begin(), report.runs.end(), [](const PolicyRun& r) {
    return r.metrics.avg_latency_ms.contains(UnitKind::CLOUD);
  });
  if (used_cloud) report.units.push_back(UnitKind::CLOUD);

  if (format == "json") {
    out << report_to_json(report);
  } else if (format == "csv") {
    out << report_to_csv(report);
  } else {
    out << render_table(report);
  }
  return kOk;
}

int cmd_trace(const SimFlags& f, const std::string& out_path, bool breakdown, std::ostream& out,
              std::ostream& err) {
  const Prepared prep = prepare(f);
  if (prep.policies.size() != 1) throw Error(ErrorCode::ParseError, "trace takes exactly one --policy");
  const SimResult result = simulate(prep.graph, prep.profile, prep.policies.front(), prep.config);
  const std::string csv = trace_to_csv(result.trace);
  std::ostream* report_stream = &out;
  if (out_path.empty() || out_path == "-") {
    out << csv;
    report_stream = &err;
  } else {
    write_file(out_path, csv);
  }
  if (breakdown) {
    *report_stream << "# seed=" << f.seed << " setup=" << to_string(prep.config.setup_mode) << "\n"
                   << render_breakdown(phase_breakdown(result.trace));
  }
  return kOk;
}

struct GenFlags {
  std::string scenario;
  std::string out;
  std::size_t count = 1000;
  RobotParams robot;
  std::string variant = "gpu";
  std::size_t flood = 40;
};

int cmd_gen(GenFlags g, bool duration_given, std::ostream& out) {
  TaskGraph graph;
  if (g.scenario == "conv" || g.scenario == "convolution") {
    graph = convolution_batch(g.count);
  } else if (g.scenario == "robot") {
    graph = robot_pipeline(g.robot);
  } else if (g.scenario == "inference") {
    bool found = false;
    for (auto& v : inference_comparison()) {
      if (v.name == g.variant) {
        graph = std::move(v.graph);
        found = true;
      }
    }
    if (!found) throw Error(ErrorCode::ParseError, "--variant: expected cpu, gpu or cloud");
  } else if (g.scenario == "buffer") {
    BufferPressureParams p;
    if (duration_given) p.duration_s = g.robot.duration_s;
    p.camera_fps = g.robot.camera_fps;
    p.flood = g.flood;
    graph = buffer_pressure(p);
  } else {
    throw Error(ErrorCode::ParseError, "--scenario: expected conv, robot, inference or buffer");
  }
  const std::string json = scenario_to_json(graph);
  if (g.out.empty() || g.out == "-") {
    out << json;
  } else {
    write_file(g.out, json);
  }
  return kOk;
}

int cmd_validate(const std::string& profile, std::ostream& out) {
  const PlatformProfile p = resolve_profile(profile);
  out << render_preferences(p) << "ok\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"simrt: heterogeneous task-scheduling runtime simulator"};
  app.require_subcommand(1);

  SimFlags run_flags;
  std::string format = "table";
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario under one or more policies");
  add_sim_flags(run_cmd, run_flags);
  run_cmd->add_option("--policy", run_flags.policies,
                      "Comma-separated: latency, throughput, energy, advanced:<basic>");
  run_cmd->add_option("--format", format, "table | json | csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));

  SimFlags trace_flags;
  std::string trace_out;
  bool breakdown = false;
  auto* trace_cmd = app.add_subcommand("trace", "Write the execution trace of one policy as CSV");
  add_sim_flags(trace_cmd, trace_flags);
  trace_cmd->add_option("--policy", trace_flags.policies, "latency, throughput, energy, advanced:<basic>");
  trace_cmd->add_option("-o,--out", trace_out, "Output CSV path (default stdout)");
  trace_cmd->add_flag("--breakdown", breakdown, "Print per-unit setup/transfer/kernel totals");

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a scenario file");
  gen_cmd->add_option("--scenario", gen.scenario, "conv | robot | inference | buffer")->required();
  gen_cmd->add_option("--count", gen.count, "Task count for conv");
  auto* duration_opt = gen_cmd->add_option("--duration", gen.robot.duration_s,
                                           "Seconds of workload (robot default 10, buffer default 1)");
  gen_cmd->add_option("--camera-fps", gen.robot.camera_fps, "Camera frame rate");
  gen_cmd->add_option("--imu-hz", gen.robot.imu_hz, "IMU sample rate");
  gen_cmd->add_option("--dl-fps", gen.robot.dl_fps, "Object recognition rate");
  gen_cmd->add_option("--plan-hz", gen.robot.plan_hz, "Planning rate");
  gen_cmd->add_option("--variant", gen.variant, "Inference variant: cpu | gpu | cloud");
  gen_cmd->add_option("--flood", gen.flood, "Backlog size for the buffer scenario");
  gen_cmd->add_option("-o,--out", gen.out, "Output path (default stdout)");

  std::string validate_profile;
  auto* validate_cmd = app.add_subcommand("validate", "Check a profile and print its preference matrix");
  validate_cmd->add_option("profile", validate_profile, "Builtin name or profile JSON path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*run_cmd) return cmd_run(run_flags, format, out);
    if (*trace_cmd) return cmd_trace(trace_flags, trace_out, breakdown, out, err);
    if (*gen_cmd) return cmd_gen(gen, duration_opt->count() > 0, out);
    if (*validate_cmd) return cmd_validate(validate_profile, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSimulationError;
  }
  return kInputError;
}

}  // namespace simrt::cli
