#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace simrt {

/// Simulated time, in whole microseconds.
using Micros = std::uint64_t;

struct TaskId {
  std::uint64_t value = 0;
  auto operator<=>(const TaskId&) const = default;
};

struct TaskTags {
  bool real_time = true;
  bool image_input = false;
  bool operator==(const TaskTags&) const = default;
};

struct Task {
  TaskId id;
  std::string workload;
  TaskTags tags;
  std::vector<TaskId> deps;
  Micros release_us = 0;
  bool operator==(const Task&) const = default;
};

/// Tasks in submission order. Construction does not validate; run
/// validate_graph() before simulating.
class TaskGraph {
 public:
  TaskGraph() = default;
  explicit TaskGraph(std::vector<Task> tasks);

  const std::vector<Task>& tasks() const noexcept { return tasks_; }
  std::size_t size() const noexcept { return tasks_.size(); }
  bool empty() const noexcept { return tasks_.empty(); }

  void add(Task task);

  /// Position of the first task carrying `id`, if any.
  std::optional<std::size_t> index_of(TaskId id) const;
  const Task* find(TaskId id) const;

  bool operator==(const TaskGraph& other) const { return tasks_ == other.tasks_; }

 private:
  std::vector<Task> tasks_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

struct GraphError {
  enum class Kind { CycleDetected, UnknownDependency, DuplicateId };
  Kind kind;
  /// Cycle members, each depending on the next (the last on the first), or
  /// the single offending id.
  std::vector<TaskId> ids;

  std::string describe() const;
};

std::optional<GraphError> validate_graph(const TaskGraph& graph);

/// Tasks not in `completed` whose dependencies are all completed and whose
/// release time has been reached.
std::set<TaskId> ready_set(const TaskGraph& graph, const std::set<TaskId>& completed, Micros now);

// Scenario files: {"tasks":[{"id":1,"workload":"...","real_time":true,
// "image_input":false,"deps":[],"release_us":0}, ...]}
TaskGraph parse_scenario(std::string_view json_text);
TaskGraph load_scenario_file(const std::string& path);
std::string scenario_to_json(const TaskGraph& graph);

}  // namespace simrt

template <>
struct std::hash<simrt::TaskId> {
  std::size_t operator()(const simrt::TaskId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
