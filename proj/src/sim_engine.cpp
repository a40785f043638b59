#include "simrt/sim_engine.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

#include "simrt/error.hpp"
#include "simrt/rng.hpp"

namespace simrt {

BufferPool::Acquire BufferPool::acquire() {
  if (in_use_ >= capacity_) {
    ++dropped_;
    return Acquire::Drop;
  }
  ++in_use_;
  ++acquired_;
  peak_ = std::max(peak_, in_use_);
  return Acquire::Ok;
}

void BufferPool::release() {
  if (in_use_ == 0) throw Error(ErrorCode::UnderflowRelease, "image buffer released while none is held");
  --in_use_;
  ++released_;
}

namespace {

enum class TaskState : std::uint8_t { Waiting, Ready, Queued, Running, Done, Skipped };

struct Event {
  Micros time;
  int priority;  // completions (0) before releases (1)
  std::uint64_t seq;
  enum class Kind : std::uint8_t { Release, PhaseEnd, CloudDone } kind;
  std::size_t task;
  Phase phase;

  bool operator>(const Event& o) const {
    return std::tie(time, priority, seq) > std::tie(o.time, o.priority, o.seq);
  }
};

constexpr Phase kOffloadPhases[] = {Phase::Setup, Phase::XferIn, Phase::Kernel, Phase::XferOut};

Micros phase_length(const OffloadBreakdown& b, Phase p) {
  switch (p) {
    case Phase::Setup: return b.setup_us;
    case Phase::XferIn: return b.xfer_in_us;
    case Phase::Kernel: return b.kernel_us;
    case Phase::XferOut: return b.xfer_out_us;
    default: return 0;
  }
}

class Engine {
 public:
  Engine(const TaskGraph& graph, const PlatformProfile& profile, Policy policy, const SimConfig& config)
      : graph_(graph),
        profile_(profile),
        config_(config),
        scheduler_(profile, policy, config.scheduler),
        rng_(config.seed),
        pool_(config.buffer_capacity) {
    if (auto err = validate_graph(graph)) throw Error(ErrorCode::InvalidScenario, err->describe());
    const auto& tasks = graph.tasks();
    state_.resize(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const auto& t = tasks[i];
      if (!scheduler_.routable(t)) {
        throw Error(ErrorCode::UnresolvableCost, "task " + std::to_string(t.id.value) + " (" + t.workload +
                                                     ") has no unit under policy " + to_string(policy));
      }
      state_[i].remaining_deps = t.deps.size();
      for (auto d : t.deps) state_[*graph.index_of(d)].dependents.push_back(i);
    }
    for (auto u : profile.local_units()) units_.push_back({u, std::nullopt});
  }

  SimResult run() {
    scheduler_.init_runtime(config_.setup_mode);
    for (std::size_t i = 0; i < graph_.size(); ++i) {
      push({graph_.tasks()[i].release_us, 1, 0, Event::Kind::Release, i, Phase::Complete});
    }
    while (!events_.empty()) {
      const Micros now = events_.top().time;
      while (!events_.empty() && events_.top().time == now) {
        Event ev = events_.top();
        events_.pop();
        handle(ev);
      }
      settle(now);
    }
    for (std::size_t i = 0; i < state_.size(); ++i) {
      if (state_[i].state != TaskState::Done && state_[i].state != TaskState::Skipped) {
        throw Error(ErrorCode::InvalidScenario,
                    "task " + std::to_string(graph_.tasks()[i].id.value) + " never ran (unreachable queue)");
      }
    }

    SimResult result;
    result.metrics = compute_metrics(trace_, graph_, profile_, MetricsOptions{config_.cloud_in_makespan});
    result.trace = std::move(trace_);
    result.dispatch_log = std::move(log_);
    result.buffers = {pool_.capacity(), pool_.peak_in_use(), pool_.in_use(),
                      pool_.acquired(),  pool_.released(),    pool_.dropped()};
    return result;
  }

 private:
  struct PerTask {
    TaskState state = TaskState::Waiting;
    std::size_t remaining_deps = 0;
    bool released = false;
    std::vector<std::size_t> dependents;
    UnitKind unit = UnitKind::CPU;
    OffloadBreakdown plan;
    bool holds_buffer = false;
    std::size_t consumers_pending = 0;
  };

  struct UnitSlot {
    UnitKind kind;
    std::optional<std::size_t> running;
  };

  void push(Event ev) {
    ev.seq = next_seq_++;
    events_.push(ev);
  }

  const Task& task(std::size_t i) const { return graph_.tasks()[i]; }

  void record(Micros t, std::size_t i, UnitKind unit, Phase phase) {
    trace_.push_back({t, task(i).id, task(i).workload, unit, phase});
  }

  void handle(const Event& ev) {
    switch (ev.kind) {
      case Event::Kind::Release:
        state_[ev.task].released = true;
        maybe_ready(ev.task);
        break;
      case Event::Kind::PhaseEnd: {
        const auto* it = std::find(std::begin(kOffloadPhases), std::end(kOffloadPhases), ev.phase);
        run_phases(ev.task, static_cast<std::size_t>(it - std::begin(kOffloadPhases)) + 1, ev.time);
        break;
      }
      case Event::Kind::CloudDone:
        record(ev.time, ev.task, UnitKind::CLOUD, Phase::CloudComplete);
        --cloud_in_flight_;
        finish(ev.task, ev.time, UnitKind::CLOUD);
        break;
    }
  }

  void maybe_ready(std::size_t i) {
    auto& s = state_[i];
    if (s.state == TaskState::Waiting && s.released && s.remaining_deps == 0) {
      s.state = TaskState::Ready;
      ready_.push_back(i);
    }
  }

  // Dispatch everything that became ready at `now`, then let idle units and
  // free cloud slots pull work. Repeats while zero-length work keeps
  // producing new ready tasks at the same instant.
  void settle(Micros now) {
    bool progress = true;
    while (progress) {
      progress = false;
      std::vector<std::size_t> batch;
      batch.swap(ready_);
      for (auto i : batch) {
        const Route route = scheduler_.dispatch(task(i));
        state_[i].state = TaskState::Queued;
        log_.push_back({DispatchRecord::Kind::Routed, now, task(i).id, route, UnitKind::CPU});
      }
      for (auto& u : units_) {
        if (u.running) continue;
        auto id = scheduler_.on_unit_free(u.kind);
        if (!id) continue;
        log_.push_back({DispatchRecord::Kind::Popped, now, *id, Route{}, u.kind});
        start_local(*graph_.index_of(*id), u, now);
        progress = true;
      }
      while (scheduler_.cloud_load() > 0 && (!config_.cloud_slots || cloud_in_flight_ < *config_.cloud_slots)) {
        auto id = scheduler_.pop_cloud();
        log_.push_back({DispatchRecord::Kind::CloudPopped, now, *id, Route::cloud(), UnitKind::CLOUD});
        start_cloud(*graph_.index_of(*id), now);
        progress = true;
      }
      progress = progress || !ready_.empty();
    }
  }

  void start_local(std::size_t i, UnitSlot& unit, Micros now) {
    auto& s = state_[i];
    s.state = TaskState::Running;
    s.unit = unit.kind;
    s.plan = profile_.offload_time(task(i).workload, unit.kind, config_.setup_mode,
                                   scheduler_.initialized(unit.kind));
    scheduler_.mark_initialized(unit.kind);
    unit.running = i;
    run_phases(i, 0, now);
  }

  // Enters offload phase `from` (index into kOffloadPhases) at `now`. Zero
  // length phases other than the kernel leave no trace record.
  void run_phases(std::size_t i, std::size_t from, Micros now) {
    auto& s = state_[i];
    for (std::size_t p = from; p < std::size(kOffloadPhases); ++p) {
      const Phase phase = kOffloadPhases[p];
      const Micros len = phase_length(s.plan, phase);
      if (phase == Phase::Kernel) release_inputs(i);
      if (len == 0 && phase != Phase::Kernel) continue;
      record(now, i, s.unit, phase);
      if (len > 0) {
        push({now + len, 0, 0, Event::Kind::PhaseEnd, i, phase});
        return;
      }
    }
    record(now, i, s.unit, Phase::Complete);
    for (auto& u : units_) {
      if (u.running == i) u.running.reset();
    }
    finish(i, now, s.unit);
  }

  void start_cloud(std::size_t i, Micros now) {
    state_[i].state = TaskState::Running;
    state_[i].unit = UnitKind::CLOUD;
    record(now, i, UnitKind::CLOUD, Phase::CloudSubmit);
    release_inputs(i);
    ++cloud_in_flight_;
    push({now + profile_.cloud_latency(rng_), 0, 0, Event::Kind::CloudDone, i, Phase::CloudComplete});
  }

  void release_inputs(std::size_t i) {
    if (!task(i).tags.image_input) return;
    for (auto d : task(i).deps) release_one(*graph_.index_of(d));
  }

  void release_one(std::size_t producer) {
    auto& p = state_[producer];
    if (!p.holds_buffer) return;
    if (--p.consumers_pending == 0) {
      p.holds_buffer = false;
      pool_.release();
    }
  }

  void finish(std::size_t i, Micros now, UnitKind unit) {
    auto& s = state_[i];
    s.state = TaskState::Done;
    std::size_t consumers = 0;
    for (auto j : s.dependents) {
      if (task(j).tags.image_input && state_[j].state != TaskState::Skipped) ++consumers;
    }
    if (consumers > 0) {
      if (pool_.acquire() == BufferPool::Acquire::Drop) {
        record(now, i, unit, Phase::Drop);
        for (auto j : s.dependents) skip(j);
        return;
      }
      s.holds_buffer = true;
      s.consumers_pending = consumers;
    }
    for (auto j : s.dependents) {
      --state_[j].remaining_deps;
      maybe_ready(j);
    }
  }

  void skip(std::size_t j) {
    auto& s = state_[j];
    if (s.state == TaskState::Skipped) return;
    s.state = TaskState::Skipped;
    if (task(j).tags.image_input) {
      for (auto d : task(j).deps) {
        if (state_[*graph_.index_of(d)].state == TaskState::Done) release_one(*graph_.index_of(d));
      }
    }
    for (auto k : s.dependents) skip(k);
  }

  const TaskGraph& graph_;
  const PlatformProfile& profile_;
  SimConfig config_;
  Scheduler scheduler_;
  Rng rng_;
  BufferPool pool_;

  std::vector<PerTask> state_;
  std::vector<UnitSlot> units_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t next_seq_ = 0;
  std::vector<std::size_t> ready_;
  std::size_t cloud_in_flight_ = 0;
  Trace trace_;
  std::vector<DispatchRecord> log_;
};

}  // namespace

SimResult simulate(const TaskGraph& scenario, const PlatformProfile& profile, Policy policy,
                   const SimConfig& config) {
  return Engine(scenario, profile, policy, config).run();
}

}  // namespace simrt
