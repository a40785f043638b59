#include "simrt/task_model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "simrt/error.hpp"

namespace simrt {

TaskGraph::TaskGraph(std::vector<Task> tasks) {
  tasks_.reserve(tasks.size());
  for (auto& t : tasks) add(std::move(t));
}

void TaskGraph::add(Task task) {
  index_.try_emplace(task.id.value, tasks_.size());
  tasks_.push_back(std::move(task));
}

std::optional<std::size_t> TaskGraph::index_of(TaskId id) const {
  auto it = index_.find(id.value);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Task* TaskGraph::find(TaskId id) const {
  auto idx = index_of(id);
  return idx ? &tasks_[*idx] : nullptr;
}

std::string GraphError::describe() const {
  std::string out;
  switch (kind) {
    case Kind::CycleDetected: out = "CycleDetected("; break;
    case Kind::UnknownDependency: out = "UnknownDependency("; break;
    case Kind::DuplicateId: out = "DuplicateId("; break;
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(ids[i].value);
  }
  return out + ")";
}

std::optional<GraphError> validate_graph(const TaskGraph& graph) {
  const auto& tasks = graph.tasks();
  {
    std::set<TaskId> seen;
    for (const auto& t : tasks) {
      if (!seen.insert(t.id).second) return GraphError{GraphError::Kind::DuplicateId, {t.id}};
    }
  }
  for (const auto& t : tasks) {
    for (auto d : t.deps) {
      if (!graph.index_of(d)) return GraphError{GraphError::Kind::UnknownDependency, {d}};
    }
  }

  // Iterative three-colour DFS over dependency edges; the grey stack is the
  // current path, so a back edge yields the cycle directly.
  enum class Colour : std::uint8_t { White, Grey, Black };
  std::vector<Colour> colour(tasks.size(), Colour::White);
  struct Frame {
    std::size_t node;
    std::size_t next_dep;
  };
  for (std::size_t root = 0; root < tasks.size(); ++root) {
    if (colour[root] != Colour::White) continue;
    std::vector<Frame> stack{{root, 0}};
    colour[root] = Colour::Grey;
    while (!stack.empty()) {
      auto& top = stack.back();
      const auto& deps = tasks[top.node].deps;
      if (top.next_dep == deps.size()) {
        colour[top.node] = Colour::Black;
        stack.pop_back();
        continue;
      }
      std::size_t child = *graph.index_of(deps[top.next_dep++]);
      if (colour[child] == Colour::Grey) {
        std::vector<TaskId> cycle;
        auto from = std::find_if(stack.begin(), stack.end(),
                                 [&](const Frame& f) { return f.node == child; });
        for (auto it = from; it != stack.end(); ++it) cycle.push_back(tasks[it->node].id);
        return GraphError{GraphError::Kind::CycleDetected, std::move(cycle)};
      }
      if (colour[child] == Colour::White) {
        colour[child] = Colour::Grey;
        stack.push_back({child, 0});
      }
    }
  }
  return std::nullopt;
}

std::set<TaskId> ready_set(const TaskGraph& graph, const std::set<TaskId>& completed, Micros now) {
  std::set<TaskId> out;
  for (const auto& t : graph.tasks()) {
    if (completed.contains(t.id) || t.release_us > now) continue;
    bool deps_done = std::all_of(t.deps.begin(), t.deps.end(),
                                 [&](TaskId d) { return completed.contains(d); });
    if (deps_done) out.insert(t.id);
  }
  return out;
}

namespace {

using detail::expect;
using detail::json;

Task parse_task(const json& j, std::size_t pos) {
  const std::string where = "tasks[" + std::to_string(pos) + "]";
  expect(j.is_object(), where, "an object");
  detail::reject_unknown_keys(j, {"id", "workload", "real_time", "image_input", "deps", "release_us"},
                              where);
  Task t;
  const auto& id = detail::require(j, "id", where);
  expect(id.is_number_unsigned(), where + ".id", "a non-negative integer");
  t.id = TaskId{id.get<std::uint64_t>()};
  const auto& wl = detail::require(j, "workload", where);
  expect(wl.is_string() && !wl.get<std::string>().empty(), where + ".workload", "a non-empty string");
  t.workload = wl.get<std::string>();
  if (auto it = j.find("real_time"); it != j.end()) {
    expect(it->is_boolean(), where + ".real_time", "a boolean");
    t.tags.real_time = it->get<bool>();
  }
  if (auto it = j.find("image_input"); it != j.end()) {
    expect(it->is_boolean(), where + ".image_input", "a boolean");
    t.tags.image_input = it->get<bool>();
  }
  if (auto it = j.find("deps"); it != j.end()) {
    expect(it->is_array(), where + ".deps", "an array");
    for (const auto& d : *it) {
      expect(d.is_number_unsigned(), where + ".deps", "non-negative integer ids");
      t.deps.push_back(TaskId{d.get<std::uint64_t>()});
    }
  }
  if (auto it = j.find("release_us"); it != j.end()) {
    expect(it->is_number_unsigned(), where + ".release_us", "a non-negative integer");
    t.release_us = it->get<Micros>();
  }
  return t;
}

}  // namespace

TaskGraph parse_scenario(std::string_view json_text) {
  json doc = detail::parse_json(json_text);
  expect(doc.is_object(), "scenario", "an object");
  detail::reject_unknown_keys(doc, {"tasks"}, "scenario");
  const auto& tasks = detail::require(doc, "tasks", "scenario");
  expect(tasks.is_array(), "scenario.tasks", "an array");
  TaskGraph graph;
  for (std::size_t i = 0; i < tasks.size(); ++i) graph.add(parse_task(tasks[i], i));
  return graph;
}

TaskGraph load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const TaskGraph& graph) {
  using ojson = nlohmann::ordered_json;
  ojson tasks = ojson::array();
  for (const auto& t : graph.tasks()) {
    ojson deps = ojson::array();
    for (auto d : t.deps) deps.push_back(d.value);
    tasks.push_back({{"id", t.id.value},
                     {"workload", t.workload},
                     {"real_time", t.tags.real_time},
                     {"image_input", t.tags.image_input},
                     {"deps", std::move(deps)},
                     {"release_us", t.release_us}});
  }
  ojson doc = {{"tasks", std::move(tasks)}};
  return doc.dump(1) + "\n";
}

}  // namespace simrt
