#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simrt/platform_profile.hpp"
#include "simrt/scheduler.hpp"
#include "simrt/task_model.hpp"

namespace simrt {

/// Fixed pool of image buffers. A producer's output occupies one buffer from
/// the producer's completion until its image-consuming dependents start their
/// kernels; when the pool is full the image is dropped.
class BufferPool {
 public:
  enum class Acquire { Ok, Drop };

  explicit BufferPool(std::size_t capacity) : capacity_(capacity) {}

  Acquire acquire();
  /// Throws UnderflowRelease when nothing is held.
  void release();

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t in_use() const noexcept { return in_use_; }
  std::size_t peak_in_use() const noexcept { return peak_; }
  std::uint64_t dropped() const noexcept { return dropped_; }
  std::uint64_t acquired() const noexcept { return acquired_; }
  std::uint64_t released() const noexcept { return released_; }

 private:
  std::size_t capacity_;
  std::size_t in_use_ = 0;
  std::size_t peak_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t acquired_ = 0;
  std::uint64_t released_ = 0;
};

enum class Phase : std::uint8_t {
  Setup,
  XferIn,
  Kernel,
  XferOut,
  Complete,
  Drop,
  CloudSubmit,
  CloudComplete,
};
std::string_view to_string(Phase phase);
std::optional<Phase> parse_phase(std::string_view text);

struct TraceRecord {
  Micros time_us = 0;
  TaskId task;
  std::string workload;
  UnitKind unit = UnitKind::CPU;
  Phase phase = Phase::Complete;
  bool operator==(const TraceRecord&) const = default;
};

using Trace = std::vector<TraceRecord>;

/// CSV with header `time_us,task_id,workload,unit,phase`.
std::string trace_to_csv(const Trace& trace);
Trace trace_from_csv(std::string_view csv);

struct Metrics {
  std::uint64_t completed = 0;
  std::uint64_t drops = 0;
  /// Tasks that never ran because an upstream image was dropped.
  std::uint64_t skipped = 0;
  Micros makespan_us = 0;
  double throughput_tasks_per_ms = 0.0;
  /// Mean dispatch-to-completion time per executing unit, in ms.
  std::map<UnitKind, double> avg_latency_ms;
  std::map<UnitKind, std::uint64_t> tasks_per_unit;
  std::uint64_t total_energy_uj = 0;

  double total_energy_j() const noexcept { return static_cast<double>(total_energy_uj) / 1e6; }
  bool operator==(const Metrics&) const = default;
};

struct MetricsOptions {
  /// When false, cloud completions are left out of makespan, completion
  /// count, throughput and latency (energy still includes them).
  bool cloud_in_makespan = true;
};

/// Derives metrics from a trace. A task's dispatch time is the instant it
/// became ready: max(release, latest dependency completion).
Metrics compute_metrics(const Trace& trace, const TaskGraph& graph, const PlatformProfile& profile,
                        const MetricsOptions& options = {});

struct PhaseTotals {
  std::uint64_t tasks = 0;
  Micros setup_us = 0;
  Micros xfer_in_us = 0;
  Micros kernel_us = 0;
  Micros xfer_out_us = 0;
  Micros total_us() const noexcept { return setup_us + xfer_in_us + kernel_us + xfer_out_us; }
};

/// Per-unit sums of offload phase durations recovered from a trace.
std::map<UnitKind, PhaseTotals> phase_breakdown(const Trace& trace);

struct SimConfig {
  SetupMode setup_mode = SetupMode::Amortized;
  std::uint64_t seed = 0;
  std::size_t buffer_capacity = 4;
  /// Concurrent cloud requests; nullopt means unlimited.
  std::optional<std::size_t> cloud_slots;
  bool cloud_in_makespan = true;
  SchedulerOptions scheduler;
};

/// Scheduler decisions in the order the engine made them.
struct DispatchRecord {
  enum class Kind : std::uint8_t { Routed, Popped, CloudPopped };
  Kind kind = Kind::Routed;
  Micros time_us = 0;
  TaskId task;
  Route route;                     ///< Routed only
  UnitKind unit = UnitKind::CPU;   ///< Popped only
};

struct BufferStats {
  std::size_t capacity = 0;
  std::size_t peak_in_use = 0;
  std::size_t final_in_use = 0;
  std::uint64_t acquired = 0;
  std::uint64_t released = 0;
  std::uint64_t dropped = 0;
};

struct SimResult {
  Metrics metrics;
  Trace trace;
  std::vector<DispatchRecord> dispatch_log;
  BufferStats buffers;
};

/// Runs the scenario to quiescence. Throws InvalidScenario when the graph
/// fails validation and UnresolvableCost when a task has nowhere to run under
/// `policy`.
SimResult simulate(const TaskGraph& scenario, const PlatformProfile& profile, Policy policy,
                   const SimConfig& config = {});

std::string metrics_to_json(const Metrics& metrics, int indent = -1);
Metrics metrics_from_json(std::string_view text);

}  // namespace simrt
