#pragma once

// Trace audits shared by the unit tests and the acceptance suite. Each
// returns a list of human-readable violations; empty means the audit passed.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "simrt/sim_engine.hpp"

namespace simrt::testing {

using Violations = std::vector<std::string>;

struct TaskSpan {
  std::optional<Micros> start;
  std::optional<Micros> end;
  UnitKind unit = UnitKind::CPU;
};

inline bool is_start_phase(Phase p) {
  return p == Phase::Setup || p == Phase::XferIn || p == Phase::Kernel || p == Phase::CloudSubmit;
}

inline std::unordered_map<std::uint64_t, TaskSpan> task_spans(const Trace& trace) {
  std::unordered_map<std::uint64_t, TaskSpan> spans;
  for (const auto& r : trace) {
    auto& s = spans[r.task.value];
    if (is_start_phase(r.phase) && !s.start) {
      s.start = r.time_us;
      s.unit = r.unit;
    }
    if (r.phase == Phase::Complete || r.phase == Phase::CloudComplete) s.end = r.time_us;
  }
  return spans;
}

/// Timestamps never decrease and each task's records follow the phase order.
inline Violations audit_ordering(const Trace& trace) {
  Violations v;
  std::unordered_map<std::uint64_t, int> last_rank;
  auto rank = [](Phase p) {
    switch (p) {
      case Phase::Setup: return 0;
      case Phase::XferIn: return 1;
      case Phase::Kernel: return 2;
      case Phase::XferOut: return 3;
      case Phase::Complete: return 4;
      case Phase::CloudSubmit: return 0;
      case Phase::CloudComplete: return 4;
      case Phase::Drop: return 5;
    }
    return 9;
  };
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    if (i > 0 && r.time_us < trace[i - 1].time_us) v.push_back("time goes backwards at record " + std::to_string(i));
    auto [it, fresh] = last_rank.try_emplace(r.task.value, -1);
    if (rank(r.phase) <= it->second) {
      v.push_back("task " + std::to_string(r.task.value) + ": phase " + std::string(to_string(r.phase)) +
                  " out of order");
    }
    it->second = rank(r.phase);
  }
  return v;
}

/// No task starts before its release or before every dependency completed.
inline Violations audit_causality(const Trace& trace, const TaskGraph& graph) {
  Violations v;
  const auto spans = task_spans(trace);
  for (const auto& t : graph.tasks()) {
    auto it = spans.find(t.id.value);
    if (it == spans.end() || !it->second.start) continue;
    const Micros start = *it->second.start;
    if (start < t.release_us) v.push_back("task " + std::to_string(t.id.value) + " starts before release");
    for (auto d : t.deps) {
      auto dep = spans.find(d.value);
      if (dep == spans.end() || !dep->second.end || *dep->second.end > start) {
        v.push_back("task " + std::to_string(t.id.value) + " starts before dependency " + std::to_string(d.value));
      }
    }
  }
  return v;
}

/// Busy intervals [start, end) per local unit, sorted by start.
inline std::map<UnitKind, std::vector<std::pair<Micros, Micros>>> busy_intervals(const Trace& trace) {
  std::map<UnitKind, std::vector<std::pair<Micros, Micros>>> busy;
  for (const auto& [id, s] : task_spans(trace)) {
    if (s.unit == UnitKind::CLOUD || !s.start || !s.end) continue;
    busy[s.unit].emplace_back(*s.start, *s.end);
  }
  for (auto& [u, iv] : busy) std::sort(iv.begin(), iv.end());
  return busy;
}

/// A local unit never runs two tasks at once.
inline Violations audit_exclusivity(const Trace& trace) {
  Violations v;
  for (const auto& [unit, iv] : busy_intervals(trace)) {
    for (std::size_t i = 1; i < iv.size(); ++i) {
      if (iv[i].first < iv[i - 1].second) {
        v.push_back(std::string(to_string(unit)) + " overlaps at " + std::to_string(iv[i].first));
      }
    }
  }
  return v;
}

/// Each local task occupies its unit for exactly its offload total.
inline Violations audit_occupancy(const Trace& trace, const PlatformProfile& profile, SetupMode mode) {
  Violations v;
  std::unordered_map<std::uint64_t, std::string> workload;
  for (const auto& r : trace) workload[r.task.value] = r.workload;
  for (const auto& [id, s] : task_spans(trace)) {
    if (s.unit == UnitKind::CLOUD || !s.start || !s.end) continue;
    const Micros expected =
        profile.offload_time(workload[id], s.unit, mode, mode == SetupMode::Amortized).total_us();
    if (*s.end - *s.start != expected) {
      v.push_back("task " + std::to_string(id) + " occupies " + std::to_string(*s.end - *s.start) + " us, expected " +
                  std::to_string(expected));
    }
  }
  return v;
}

/// Total energy is the integer sum of per-completion energies plus idle power.
inline Violations audit_energy(const SimResult& r, const PlatformProfile& profile) {
  std::uint64_t sum = 0;
  for (const auto& rec : r.trace) {
    if (rec.phase == Phase::Complete || rec.phase == Phase::CloudComplete) sum += profile.energy_of(rec.workload, rec.unit);
  }
  double idle = 0;
  for (const auto& u : profile.units()) idle += u.idle_power_w;
  sum += static_cast<std::uint64_t>(std::llround(idle * static_cast<double>(r.metrics.makespan_us)));
  if (sum != r.metrics.total_energy_uj) {
    return {"energy " + std::to_string(r.metrics.total_energy_uj) + " != sum " + std::to_string(sum)};
  }
  return {};
}

/// Buffer bookkeeping balances and nothing is held at quiescence.
inline Violations audit_buffers(const SimResult& r) {
  Violations v;
  const auto& b = r.buffers;
  if (b.acquired != b.released + b.final_in_use) v.push_back("acquired != released + in_use");
  if (b.final_in_use != 0) v.push_back("buffers still held at quiescence");
  if (b.peak_in_use > b.capacity) v.push_back("peak above capacity");
  if (b.dropped != r.metrics.drops) v.push_back("pool drops disagree with metrics");
  return v;
}

/// Every task either completed exactly once or was skipped behind a drop.
inline Violations audit_accounting(const SimResult& r, const TaskGraph& graph) {
  Violations v;
  std::unordered_map<std::uint64_t, int> completions;
  for (const auto& rec : r.trace) {
    if (rec.phase == Phase::Complete || rec.phase == Phase::CloudComplete) ++completions[rec.task.value];
  }
  std::uint64_t done = 0;
  for (const auto& t : graph.tasks()) {
    const int c = completions[t.id.value];
    if (c > 1) v.push_back("task " + std::to_string(t.id.value) + " completed twice");
    done += c == 1;
  }
  if (done + r.metrics.skipped != graph.size()) v.push_back("completed + skipped != task count");
  if (r.metrics.drops == 0 && r.metrics.skipped != 0) v.push_back("skipped tasks without a drop");
  return v;
}

/// A unit is never idle while a task waits in its own FIFO, or while the
/// high-priority head could run on it. Waiting intervals are rebuilt from the
/// dispatch log.
inline Violations audit_work_conservation(const SimResult& r, const PlatformProfile& profile) {
  Violations v;
  // Merge back-to-back busy intervals so a wait must sit inside one block.
  std::map<UnitKind, std::vector<std::pair<Micros, Micros>>> blocks;
  for (const auto& [unit, iv] : busy_intervals(r.trace)) {
    auto& out = blocks[unit];
    for (const auto& seg : iv) {
      if (!out.empty() && seg.first <= out.back().second) {
        out.back().second = std::max(out.back().second, seg.second);
      } else {
        out.push_back(seg);
      }
    }
  }
  auto busy_throughout = [&](UnitKind u, Micros a, Micros b) {
    for (const auto& [s, e] : blocks[u]) {
      if (s <= a && b <= e) return true;
    }
    return false;
  };

  std::unordered_map<std::uint64_t, std::string> workload;
  for (const auto& rec : r.trace) workload[rec.task.value] = rec.workload;

  struct Wait {
    Micros enqueued = 0;
    std::optional<Micros> popped;
    Route route;
  };
  std::unordered_map<std::uint64_t, Wait> waits;
  std::vector<std::uint64_t> hp_order;
  for (const auto& d : r.dispatch_log) {
    if (d.kind == DispatchRecord::Kind::Routed) {
      waits[d.task.value] = {d.time_us, std::nullopt, d.route};
      if (d.route.kind == Route::Kind::HighPriority) hp_order.push_back(d.task.value);
    } else if (d.kind == DispatchRecord::Kind::Popped) {
      waits[d.task.value].popped = d.time_us;
    }
  }
  for (const auto& [id, w] : waits) {
    if (w.route.kind != Route::Kind::Unit || !w.popped) continue;
    if (*w.popped > w.enqueued && !busy_throughout(w.route.unit, w.enqueued, *w.popped)) {
      v.push_back("unit " + std::string(to_string(w.route.unit)) + " idle while task " + std::to_string(id) +
                  " waited");
    }
  }
  Micros head_since = 0;
  for (auto id : hp_order) {
    const auto& w = waits[id];
    if (!w.popped) continue;
    const Micros from = std::max(head_since, w.enqueued);
    for (auto u : profile.local_units()) {
      if (!profile.resolvable(workload[id], u)) continue;
      if (*w.popped > from && !busy_throughout(u, from, *w.popped)) {
        v.push_back("unit " + std::string(to_string(u)) + " idle while high-priority head " + std::to_string(id) +
                    " waited");
      }
    }
    head_since = *w.popped;
  }
  return v;
}

/// Everything the engine promises about a finished run.
inline Violations audit_all(const SimResult& r, const TaskGraph& graph, const PlatformProfile& profile,
                            SetupMode mode) {
  Violations all;
  for (auto part : {audit_ordering(r.trace), audit_causality(r.trace, graph), audit_exclusivity(r.trace),
                    audit_occupancy(r.trace, profile, mode), audit_energy(r, profile), audit_buffers(r),
                    audit_accounting(r, graph), audit_work_conservation(r, profile)}) {
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

}  // namespace simrt::testing
