#include "simrt/scheduler.hpp"

#include <charconv>

#include "simrt/error.hpp"

namespace simrt {

std::string_view to_string(BasicPolicy policy) {
  switch (policy) {
    case BasicPolicy::Latency: return "latency";
    case BasicPolicy::Throughput: return "throughput";
    case BasicPolicy::Energy: return "energy";
  }
  return "?";
}

std::string to_string(Policy policy) {
  std::string basic(to_string(policy.basic));
  return policy.advanced ? "advanced:" + basic : basic;
}

std::optional<Policy> parse_policy(std::string_view text) {
  auto basic = [](std::string_view s) -> std::optional<BasicPolicy> {
    if (s == "latency") return BasicPolicy::Latency;
    if (s == "throughput") return BasicPolicy::Throughput;
    if (s == "energy") return BasicPolicy::Energy;
    return std::nullopt;
  };
  constexpr std::string_view kAdvanced = "advanced:";
  if (text.starts_with(kAdvanced)) {
    auto b = basic(text.substr(kAdvanced.size()));
    if (!b) return std::nullopt;
    return Policy::advanced_over(*b);
  }
  auto b = basic(text);
  if (!b) return std::nullopt;
  return Policy{*b, false};
}

std::string_view to_string(RouteClass rc) {
  switch (rc) {
    case RouteClass::Cloud: return "cloud";
    case RouteClass::HighPriority: return "high-priority";
    case RouteClass::Basic: return "basic";
  }
  return "?";
}

RouteClass classify(const TaskTags& tags) {
  if (!tags.real_time) return RouteClass::Cloud;
  if (tags.image_input) return RouteClass::HighPriority;
  return RouteClass::Basic;
}

std::string to_string(const Route& route) {
  switch (route.kind) {
    case Route::Kind::Cloud: return "cloud";
    case Route::Kind::HighPriority: return "hp";
    case Route::Kind::Unit: return std::string(to_string(route.unit));
  }
  return "?";
}

std::optional<Weights> parse_weights(std::string_view text) {
  Weights w;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) return std::nullopt;
    const auto key = item.substr(0, eq);
    const auto val = item.substr(eq + 1);
    std::uint32_t n = 0;
    auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), n);
    if (ec != std::errc{} || ptr != val.data() + val.size()) return std::nullopt;
    if (key == "g") {
      w.gpu = n;
    } else if (key == "d") {
      w.dsp = n;
    } else if (key == "c") {
      w.cpu = n;
    } else {
      return std::nullopt;
    }
  }
  return w;
}

Scheduler::Scheduler(const PlatformProfile& profile, Policy policy, SchedulerOptions options)
    : profile_(&profile), policy_(policy) {
  for (auto u : profile.local_units()) {
    queues_[u];
    switch (u) {
      case UnitKind::GPU:
      case UnitKind::MGPU: gpu_unit_ = u; break;
      case UnitKind::DSP: dsp_unit_ = u; break;
      case UnitKind::CPU: cpu_unit_ = u; break;
      default: break;
    }
  }
  if (!gpu_unit_ && options.fpga_as_gpu && profile.unit(UnitKind::FPGA)) gpu_unit_ = UnitKind::FPGA;

  if (options.weights) {
    weights_ = *options.weights;
  } else {
    weights_.gpu = gpu_unit_ ? profile.unit(*gpu_unit_)->weight : 0;
    weights_.dsp = dsp_unit_ ? profile.unit(*dsp_unit_)->weight : 0;
    weights_.cpu = cpu_unit_ ? profile.unit(*cpu_unit_)->weight : 0;
  }
}

void Scheduler::init_runtime(SetupMode mode) {
  initialized_.clear();
  if (mode == SetupMode::Amortized) {
    for (auto u : profile_->local_units()) initialized_.insert(u);
  }
}

SlotMask Scheduler::slots_for(std::string_view workload) const {
  auto can = [&](std::optional<UnitKind> u) { return u && profile_->resolvable(workload, *u); };
  return SlotMask{can(gpu_unit_), can(dsp_unit_), can(cpu_unit_)};
}

UnitKind Scheduler::dispatch_latency(SlotMask eligible) {
  // Weighted round robin: within a cycle of Wg+Wd+Wc positions the first Wg
  // go to the GPU slot, the next Wd to the DSP slot, the rest to the CPU slot.
  // Positions whose slot cannot take the task are skipped.
  const std::uint64_t wg = slot_weight(gpu_unit_, weights_.gpu);
  const std::uint64_t wd = slot_weight(dsp_unit_, weights_.dsp);
  const std::uint64_t wc = slot_weight(cpu_unit_, weights_.cpu);
  const std::uint64_t cycle = wg + wd + wc;
  for (std::uint64_t step = 0; step < cycle; ++step) {
    std::optional<UnitKind> unit;
    bool ok = false;
    if (counter_ < wg) {
      unit = gpu_unit_;
      ok = eligible.gpu;
    } else if (counter_ < wg + wd) {
      unit = dsp_unit_;
      ok = eligible.dsp;
    } else {
      unit = cpu_unit_;
      ok = eligible.cpu;
    }
    counter_ = counter_ + 1 == cycle ? 0 : counter_ + 1;
    if (ok) return *unit;
  }
  throw Error(ErrorCode::UnresolvableCost, "no weighted unit can take the task");
}

UnitKind Scheduler::dispatch_throughput(SlotMask eligible) const {
  const bool g = usable(gpu_unit_, weights_.gpu, eligible.gpu);
  const bool c = usable(cpu_unit_, weights_.cpu, eligible.cpu);
  const bool d = usable(dsp_unit_, weights_.dsp, eligible.dsp);
  if (g && load(*gpu_unit_) < weights_.gpu) return *gpu_unit_;
  if (c && load(*cpu_unit_) < weights_.cpu) return *cpu_unit_;
  if (d && load(*dsp_unit_) < weights_.dsp) return *dsp_unit_;
  // Every queue at its weight: overflow to the CPU, or the first slot in
  // branch order that can take the task.
  if (c) return *cpu_unit_;
  if (g) return *gpu_unit_;
  if (d) return *dsp_unit_;
  throw Error(ErrorCode::UnresolvableCost, "no weighted unit can take the task");
}

UnitKind Scheduler::dispatch_energy(SlotMask eligible) const {
  const bool d = usable(dsp_unit_, weights_.dsp, eligible.dsp);
  const bool g = usable(gpu_unit_, weights_.gpu, eligible.gpu);
  const bool c = usable(cpu_unit_, weights_.cpu, eligible.cpu);
  if (d && load(*dsp_unit_) < weights_.dsp) return *dsp_unit_;
  if (g && load(*gpu_unit_) < weights_.gpu) return *gpu_unit_;
  if (c && load(*cpu_unit_) < weights_.cpu) return *cpu_unit_;
  if (d) return *dsp_unit_;
  if (g) return *gpu_unit_;
  if (c) return *cpu_unit_;
  throw Error(ErrorCode::UnresolvableCost, "no weighted unit can take the task");
}

UnitKind Scheduler::basic_choice(const Task& task) {
  const auto mask = slots_for(task.workload);
  switch (policy_.basic) {
    case BasicPolicy::Latency: return dispatch_latency(mask);
    case BasicPolicy::Throughput: return dispatch_throughput(mask);
    case BasicPolicy::Energy: return dispatch_energy(mask);
  }
  throw Error(ErrorCode::UnresolvableCost, "unknown policy");
}

Route Scheduler::dispatch(const Task& task) {
  if (policy_.advanced) {
    switch (classify(task)) {
      case RouteClass::Cloud:
        cloud_queue_.push_back({task.id, task.workload});
        return Route::cloud();
      case RouteClass::HighPriority:
        hp_queue_.push_back({task.id, task.workload});
        return Route::high_priority();
      case RouteClass::Basic: break;
    }
  }
  const UnitKind unit = basic_choice(task);
  queues_.at(unit).push_back({task.id, task.workload});
  return Route::to_unit(unit);
}

bool Scheduler::routable(const Task& task) const {
  auto any_weighted = [&] {
    const auto m = slots_for(task.workload);
    return usable(gpu_unit_, weights_.gpu, m.gpu) || usable(dsp_unit_, weights_.dsp, m.dsp) ||
           usable(cpu_unit_, weights_.cpu, m.cpu);
  };
  if (!policy_.advanced) return any_weighted();
  switch (classify(task)) {
    case RouteClass::Cloud: return profile_->cloud().has_value();
    case RouteClass::HighPriority:
      for (const auto& [unit, q] : queues_) {
        if (profile_->resolvable(task.workload, unit)) return true;
      }
      return false;
    case RouteClass::Basic: return any_weighted();
  }
  return false;
}

std::optional<TaskId> Scheduler::on_unit_free(UnitKind unit) {
  if (!hp_queue_.empty() && profile_->resolvable(hp_queue_.front().workload, unit)) {
    const TaskId id = hp_queue_.front().id;
    hp_queue_.pop_front();
    return id;
  }
  auto it = queues_.find(unit);
  if (it == queues_.end() || it->second.empty()) return std::nullopt;
  const TaskId id = it->second.front().id;
  it->second.pop_front();
  return id;
}

std::optional<TaskId> Scheduler::pop_cloud() {
  if (cloud_queue_.empty()) return std::nullopt;
  const TaskId id = cloud_queue_.front().id;
  cloud_queue_.pop_front();
  return id;
}

std::size_t Scheduler::load(UnitKind unit) const {
  auto it = queues_.find(unit);
  return it == queues_.end() ? 0 : it->second.size();
}

}  // namespace simrt
