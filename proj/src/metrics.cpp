#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "json_util.hpp"
#include "simrt/error.hpp"
#include "simrt/sim_engine.hpp"

namespace simrt {

namespace {

constexpr std::pair<Phase, std::string_view> kPhaseNames[] = {
    {Phase::Setup, "setup"},
    {Phase::XferIn, "xfer_in"},
    {Phase::Kernel, "kernel"},
    {Phase::XferOut, "xfer_out"},
    {Phase::Complete, "complete"},
    {Phase::Drop, "drop"},
    {Phase::CloudSubmit, "cloud_submit"},
    {Phase::CloudComplete, "cloud_complete"},
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::string_view to_string(Phase phase) {
  for (const auto& [p, name] : kPhaseNames) {
    if (p == phase) return name;
  }
  return "?";
}

std::optional<Phase> parse_phase(std::string_view text) {
  for (const auto& [p, name] : kPhaseNames) {
    if (name == text) return p;
  }
  return std::nullopt;
}

std::string trace_to_csv(const Trace& trace) {
  std::string out = "time_us,task_id,workload,unit,phase\n";
  for (const auto& r : trace) {
    out += std::to_string(r.time_us);
    out += ',';
    out += std::to_string(r.task.value);
    out += ',';
    out += csv_field(r.workload);
    out += ',';
    out += to_string(r.unit);
    out += ',';
    out += to_string(r.phase);
    out += '\n';
  }
  return out;
}

Trace trace_from_csv(std::string_view csv) {
  Trace trace;
  std::size_t line_no = 0;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    auto line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 || line.empty()) continue;
    const auto cols = split_csv_line(line);
    const std::string where = "trace line " + std::to_string(line_no);
    if (cols.size() != 5) throw Error(ErrorCode::ParseError, where + ": expected 5 columns");
    TraceRecord r;
    try {
      r.time_us = std::stoull(cols[0]);
      r.task = TaskId{std::stoull(cols[1])};
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, where + ": bad number");
    }
    r.workload = cols[2];
    auto unit = parse_unit_kind(cols[3]);
    auto phase = parse_phase(cols[4]);
    if (!unit || !phase) throw Error(ErrorCode::ParseError, where + ": bad unit or phase");
    r.unit = *unit;
    r.phase = *phase;
    trace.push_back(std::move(r));
  }
  return trace;
}

Metrics compute_metrics(const Trace& trace, const TaskGraph& graph, const PlatformProfile& profile,
                        const MetricsOptions& options) {
  Metrics m;
  struct Done {
    Micros time;
    UnitKind unit;
  };
  std::unordered_map<std::uint64_t, Done> done;
  std::uint64_t energy = 0;
  for (const auto& r : trace) {
    if (r.phase == Phase::Drop) ++m.drops;
    if (r.phase != Phase::Complete && r.phase != Phase::CloudComplete) continue;
    done[r.task.value] = {r.time_us, r.unit};
    energy += profile.energy_of(r.workload, r.unit);
  }
  m.skipped = graph.size() - std::min<std::size_t>(graph.size(), done.size());

  Micros first_release = 0;
  if (!graph.empty()) {
    first_release = std::min_element(graph.tasks().begin(), graph.tasks().end(), [](const Task& a, const Task& b) {
                      return a.release_us < b.release_us;
                    })->release_us;
  }

  Micros last = 0;
  std::map<UnitKind, std::pair<Micros, std::uint64_t>> latency;  // sum, count
  for (const auto& t : graph.tasks()) {
    auto it = done.find(t.id.value);
    if (it == done.end()) continue;
    const auto [finish, unit] = it->second;
    if (unit == UnitKind::CLOUD && !options.cloud_in_makespan) continue;
    Micros dispatched = t.release_us;
    for (auto d : t.deps) {
      auto dep = done.find(d.value);
      if (dep != done.end()) dispatched = std::max(dispatched, dep->second.time);
    }
    auto& [sum, count] = latency[unit];
    sum += finish - dispatched;
    ++count;
    ++m.completed;
    last = std::max(last, finish);
  }
  m.makespan_us = (m.completed > 0 && last > first_release) ? last - first_release : 0;
  if (m.makespan_us > 0) {
    m.throughput_tasks_per_ms = static_cast<double>(m.completed) / (static_cast<double>(m.makespan_us) / 1000.0);
  }
  for (const auto& [unit, sc] : latency) {
    m.avg_latency_ms[unit] = static_cast<double>(sc.first) / static_cast<double>(sc.second) / 1000.0;
    m.tasks_per_unit[unit] = sc.second;
  }

  double idle_w = 0.0;
  for (const auto& u : profile.units()) idle_w += u.idle_power_w;
  // watts x microseconds = microjoules
  energy += static_cast<std::uint64_t>(std::llround(idle_w * static_cast<double>(m.makespan_us)));
  m.total_energy_uj = energy;
  return m;
}

std::map<UnitKind, PhaseTotals> phase_breakdown(const Trace& trace) {
  // Records of one task are contiguous in time; a phase lasts until the
  // task's next record.
  std::unordered_map<std::uint64_t, const TraceRecord*> open;
  std::map<UnitKind, PhaseTotals> totals;
  for (const auto& r : trace) {
    auto it = open.find(r.task.value);
    if (it != open.end()) {
      const auto& prev = *it->second;
      const Micros len = r.time_us - prev.time_us;
      auto& t = totals[prev.unit];
      switch (prev.phase) {
        case Phase::Setup: t.setup_us += len; break;
        case Phase::XferIn: t.xfer_in_us += len; break;
        case Phase::Kernel: t.kernel_us += len; break;
        case Phase::XferOut: t.xfer_out_us += len; break;
        default: break;
      }
    }
    switch (r.phase) {
      case Phase::Setup:
      case Phase::XferIn:
      case Phase::Kernel:
      case Phase::XferOut: open[r.task.value] = &r; break;
      case Phase::Complete:
        ++totals[r.unit].tasks;
        open.erase(r.task.value);
        break;
      default: open.erase(r.task.value); break;
    }
  }
  return totals;
}

std::string metrics_to_json(const Metrics& m, int indent) {
  nlohmann::ordered_json j;
  j["completed"] = m.completed;
  j["drops"] = m.drops;
  j["skipped"] = m.skipped;
  j["makespan_us"] = m.makespan_us;
  j["throughput_tasks_per_ms"] = m.throughput_tasks_per_ms;
  j["avg_latency_ms"] = nlohmann::ordered_json::object();
  for (const auto& [u, v] : m.avg_latency_ms) j["avg_latency_ms"][std::string(to_string(u))] = v;
  j["tasks_per_unit"] = nlohmann::ordered_json::object();
  for (const auto& [u, v] : m.tasks_per_unit) j["tasks_per_unit"][std::string(to_string(u))] = v;
  j["total_energy_uj"] = m.total_energy_uj;
  j["total_energy_j"] = m.total_energy_j();
  return j.dump(indent);
}

Metrics metrics_from_json(std::string_view text) {
  using detail::json;
  const json j = detail::parse_json(text);
  detail::expect(j.is_object(), "metrics", "an object");
  Metrics m;
  try {
    m.completed = j.at("completed").get<std::uint64_t>();
    m.drops = j.at("drops").get<std::uint64_t>();
    m.skipped = j.at("skipped").get<std::uint64_t>();
    m.makespan_us = j.at("makespan_us").get<Micros>();
    m.throughput_tasks_per_ms = j.at("throughput_tasks_per_ms").get<double>();
    m.total_energy_uj = j.at("total_energy_uj").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("avg_latency_ms").items()) {
      auto u = parse_unit_kind(k);
      if (!u) throw Error(ErrorCode::ParseError, "metrics.avg_latency_ms: unknown unit '" + k + "'");
      m.avg_latency_ms[*u] = v.get<double>();
    }
    for (const auto& [k, v] : j.at("tasks_per_unit").items()) {
      auto u = parse_unit_kind(k);
      if (!u) throw Error(ErrorCode::ParseError, "metrics.tasks_per_unit: unknown unit '" + k + "'");
      m.tasks_per_unit[*u] = v.get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("metrics: ") + e.what());
  }
  return m;
}

}  // namespace simrt
