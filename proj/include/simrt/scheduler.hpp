#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "simrt/platform_profile.hpp"
#include "simrt/task_model.hpp"

namespace simrt {

enum class BasicPolicy : std::uint8_t { Latency, Throughput, Energy };

/// A basic policy, optionally wrapped by the cloud/resource-aware advanced
/// scheduler which falls back to it for real-time, non-image tasks.
struct Policy {
  BasicPolicy basic = BasicPolicy::Throughput;
  bool advanced = false;

  static constexpr Policy latency() { return {BasicPolicy::Latency, false}; }
  static constexpr Policy throughput() { return {BasicPolicy::Throughput, false}; }
  static constexpr Policy energy() { return {BasicPolicy::Energy, false}; }
  static constexpr Policy advanced_over(BasicPolicy b) { return {b, true}; }

  bool operator==(const Policy&) const = default;
};

std::string to_string(Policy policy);
std::string_view to_string(BasicPolicy policy);
/// "latency" | "throughput" | "energy" | "advanced:<basic>"
std::optional<Policy> parse_policy(std::string_view text);

enum class RouteClass : std::uint8_t { Cloud, HighPriority, Basic };
std::string_view to_string(RouteClass rc);

/// Non-real-time goes to the cloud whatever its image tag; real-time image
/// consumers go to the high-priority queue; everything else to the basic policy.
RouteClass classify(const TaskTags& tags);
inline RouteClass classify(const Task& task) { return classify(task.tags); }

struct Route {
  enum class Kind : std::uint8_t { Cloud, HighPriority, Unit };
  Kind kind = Kind::Unit;
  UnitKind unit = UnitKind::CPU;

  static Route cloud() { return {Kind::Cloud, UnitKind::CLOUD}; }
  static Route high_priority() { return {Kind::HighPriority, UnitKind::CPU}; }
  static Route to_unit(UnitKind u) { return {Kind::Unit, u}; }

  bool operator==(const Route& o) const {
    return kind == o.kind && (kind != Kind::Unit || unit == o.unit);
  }
};
std::string to_string(const Route& route);

/// Queue weights of the three rotation slots (GPU, DSP, CPU).
struct Weights {
  std::uint32_t gpu = 4;
  std::uint32_t dsp = 2;
  std::uint32_t cpu = 2;
  bool operator==(const Weights&) const = default;
};
/// Parses "g=4,d=2,c=2"; any subset of keys, unspecified keys keep defaults.
std::optional<Weights> parse_weights(std::string_view text);

/// Which rotation slots may take the task being dispatched.
struct SlotMask {
  bool gpu = true;
  bool dsp = true;
  bool cpu = true;
};

struct SchedulerOptions {
  /// Overrides the weights declared on the profile's units.
  std::optional<Weights> weights;
  /// Lets an FPGA occupy the GPU slot when the profile has no GPU/MGPU.
  bool fpga_as_gpu = false;
};

/// Dispatch core. Holds one FIFO per local unit, the global high-priority
/// queue and the cloud queue. Single owner; not thread-safe.
class Scheduler {
 public:
  Scheduler(const PlatformProfile& profile, Policy policy, SchedulerOptions options = {});

  Policy policy() const noexcept { return policy_; }
  const Weights& weights() const noexcept { return weights_; }

  /// Amortized marks every unit initialized up front; PerOffload marks none.
  void init_runtime(SetupMode mode);
  bool initialized(UnitKind unit) const { return initialized_.contains(unit); }
  void mark_initialized(UnitKind unit) { initialized_.insert(unit); }
  const std::set<UnitKind>& initialized_units() const noexcept { return initialized_; }

  /// The concrete unit behind each rotation slot, if the profile has one.
  std::optional<UnitKind> gpu_unit() const noexcept { return gpu_unit_; }
  std::optional<UnitKind> dsp_unit() const noexcept { return dsp_unit_; }
  std::optional<UnitKind> cpu_unit() const noexcept { return cpu_unit_; }

  /// Slots whose unit exists and can run `workload` (weights not applied).
  SlotMask slots_for(std::string_view workload) const;

  // Basic policy choices. Each considers only slots that are in `eligible`,
  // exist, and have weight >= 1; they throw UnresolvableCost when none does.
  // dispatch_latency advances the round-robin counter; the other two only read
  // queue loads.
  UnitKind dispatch_latency(SlotMask eligible = {});
  UnitKind dispatch_throughput(SlotMask eligible = {}) const;
  UnitKind dispatch_energy(SlotMask eligible = {}) const;

  /// Routes a ready task and appends it to the chosen queue.
  Route dispatch(const Task& task);

  /// True when dispatch() can place the task somewhere that will run it.
  bool routable(const Task& task) const;

  /// Completion callback for a local unit: the high-priority head if this
  /// unit can run it, else the head of the unit's own FIFO.
  std::optional<TaskId> on_unit_free(UnitKind unit);
  std::optional<TaskId> pop_cloud();

  std::uint64_t counter() const noexcept { return counter_; }
  std::size_t load(UnitKind unit) const;
  std::size_t hp_load() const noexcept { return hp_queue_.size(); }
  std::size_t cloud_load() const noexcept { return cloud_queue_.size(); }

 private:
  struct Entry {
    TaskId id;
    std::string workload;
  };

  std::uint32_t slot_weight(std::optional<UnitKind> unit, std::uint32_t w) const { return unit ? w : 0; }
  bool usable(std::optional<UnitKind> unit, std::uint32_t w, bool in_mask) const {
    return unit && w >= 1 && in_mask;
  }
  UnitKind basic_choice(const Task& task);

  const PlatformProfile* profile_;
  Policy policy_;
  Weights weights_;
  std::optional<UnitKind> gpu_unit_;
  std::optional<UnitKind> dsp_unit_;
  std::optional<UnitKind> cpu_unit_;

  std::uint64_t counter_ = 0;
  std::map<UnitKind, std::deque<Entry>> queues_;
  std::deque<Entry> hp_queue_;
  std::deque<Entry> cloud_queue_;
  std::set<UnitKind> initialized_;
};

}  // namespace simrt
