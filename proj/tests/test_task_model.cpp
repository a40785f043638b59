#include <doctest.h>

#include <algorithm>
#include <map>

#include "simrt/error.hpp"
#include "simrt/task_model.hpp"
#include "support/generators.hpp"

using namespace simrt;

namespace {

Task mk(std::uint64_t id, std::vector<std::uint64_t> deps = {}, Micros release = 0) {
  Task t;
  t.id = TaskId{id};
  t.workload = "w";
  for (auto d : deps) t.deps.push_back(TaskId{d});
  t.release_us = release;
  return t;
}

// Kahn's algorithm: a graph is valid iff ids are unique, deps resolve and
// repeatedly removing zero-in-degree nodes empties it.
bool kahn_accepts(const TaskGraph& g) {
  std::map<std::uint64_t, std::size_t> indeg;
  for (const auto& t : g.tasks()) {
    if (indeg.contains(t.id.value)) return false;
    indeg[t.id.value] = 0;
  }
  std::map<std::uint64_t, std::vector<std::uint64_t>> out;
  for (const auto& t : g.tasks()) {
    for (auto d : t.deps) {
      if (!indeg.contains(d.value)) return false;
      ++indeg[t.id.value];
      out[d.value].push_back(t.id.value);
    }
  }
  std::vector<std::uint64_t> frontier;
  for (auto& [id, n] : indeg) {
    if (n == 0) frontier.push_back(id);
  }
  std::size_t removed = 0;
  while (!frontier.empty()) {
    auto id = frontier.back();
    frontier.pop_back();
    ++removed;
    for (auto next : out[id]) {
      if (--indeg[next] == 0) frontier.push_back(next);
    }
  }
  return removed == g.size();
}

}  // namespace

TEST_CASE("validate_graph examples") {
  CHECK_FALSE(validate_graph(TaskGraph{}).has_value());

  auto self = validate_graph(TaskGraph({mk(1, {1})}));
  REQUIRE(self.has_value());
  CHECK(self->kind == GraphError::Kind::CycleDetected);
  CHECK(self->ids == std::vector<TaskId>{TaskId{1}});

  // 1 -> 2 -> 3 -> 1
  auto cyc = validate_graph(TaskGraph({mk(1, {3}), mk(2, {1}), mk(3, {2})}));
  REQUIRE(cyc.has_value());
  CHECK(cyc->kind == GraphError::Kind::CycleDetected);
  auto ids = cyc->ids;
  std::sort(ids.begin(), ids.end());
  CHECK(ids == std::vector<TaskId>{TaskId{1}, TaskId{2}, TaskId{3}});

  auto unknown = validate_graph(TaskGraph({mk(1, {9})}));
  REQUIRE(unknown.has_value());
  CHECK(unknown->kind == GraphError::Kind::UnknownDependency);
  CHECK(unknown->ids.front() == TaskId{9});

  auto dup = validate_graph(TaskGraph({mk(4), mk(4)}));
  REQUIRE(dup.has_value());
  CHECK(dup->kind == GraphError::Kind::DuplicateId);
  CHECK(dup->ids.front() == TaskId{4});
}

TEST_CASE("reported cycle is a real cycle") {
  // 1 -> 2 -> 3 -> 4 -> 2, plus an acyclic tail
  TaskGraph g({mk(1), mk(2, {1, 4}), mk(3, {2}), mk(4, {3}), mk(5, {4})});
  auto err = validate_graph(g);
  REQUIRE(err.has_value());
  REQUIRE(err->kind == GraphError::Kind::CycleDetected);
  const auto& c = err->ids;
  REQUIRE(c.size() == 3);
  // each member depends on the next, wrapping around
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Task* t = g.find(c[i]);
    REQUIRE(t != nullptr);
    CHECK(std::find(t->deps.begin(), t->deps.end(), c[(i + 1) % c.size()]) != t->deps.end());
  }
}

TEST_CASE("validate_graph agrees with a Kahn oracle on random graphs") {
  testing::Gen g(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = g.range(0, 8);
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < n; ++i) {
      Task t = mk(g.range(1, n + (g.chance(0.1) ? 0 : 20)));
      for (std::size_t k = g.range(0, 3); k > 0; --k) t.deps.push_back(TaskId{g.range(1, n + 1)});
      tasks.push_back(t);
    }
    // make ids unique most of the time
    if (g.chance(0.8)) {
      for (std::size_t i = 0; i < n; ++i) tasks[i].id = TaskId{i + 1};
    }
    TaskGraph graph(tasks);
    INFO("trial " << trial);
    CHECK(validate_graph(graph).has_value() == !kahn_accepts(graph));
  }
}

TEST_CASE("ready_set examples") {
  CHECK(ready_set(TaskGraph({mk(1)}), {}, 0) == std::set<TaskId>{TaskId{1}});
  TaskGraph ab({mk(1), mk(2, {1})});
  CHECK(ready_set(ab, {}, 0) == std::set<TaskId>{TaskId{1}});
  CHECK(ready_set(ab, {TaskId{1}}, 0) == std::set<TaskId>{TaskId{2}});
  TaskGraph later({mk(1, {}, 500)});
  CHECK(ready_set(later, {}, 499).empty());
  CHECK(ready_set(later, {}, 500) == std::set<TaskId>{TaskId{1}});
}

TEST_CASE("ready_set matches brute force over every completion subset") {
  testing::Gen g(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = g.range(1, 6);
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < n; ++i) {
      Task t = mk(i + 1, {}, g.range(0, 3) * 10);
      for (std::size_t j = 0; j < i; ++j) {
        if (g.chance(0.4)) t.deps.push_back(TaskId{j + 1});
      }
      tasks.push_back(t);
    }
    TaskGraph graph(tasks);
    const Micros now = g.range(0, 3) * 10;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::set<TaskId> done;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) done.insert(TaskId{i + 1});
      }
      std::set<TaskId> expected;
      for (const auto& t : tasks) {
        if (done.contains(t.id) || t.release_us > now) continue;
        if (std::all_of(t.deps.begin(), t.deps.end(), [&](TaskId d) { return done.contains(d); })) {
          expected.insert(t.id);
        }
      }
      const auto got = ready_set(graph, done, now);
      CHECK(got == expected);

      // adding one completion removes at most that task
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) continue;
        auto more = done;
        more.insert(TaskId{i + 1});
        const auto after = ready_set(graph, more, now);
        for (auto id : got) {
          if (id != TaskId{i + 1}) CHECK(after.contains(id));
        }
      }
    }
  }
}

TEST_CASE("scenario JSON round trip and defaults") {
  const auto g = parse_scenario(R"({"tasks":[
    {"id":1,"workload":"capture","real_time":true,"image_input":false,"deps":[]},
    {"id":2,"workload":"undistort","real_time":true,"image_input":true,"deps":[1],"release_us":40000}]})");
  REQUIRE(g.size() == 2);
  CHECK(g.tasks()[0].release_us == 0);
  CHECK(g.tasks()[1].tags.image_input);
  CHECK(g.tasks()[1].deps == std::vector<TaskId>{TaskId{1}});
  CHECK(parse_scenario(scenario_to_json(g)) == g);
}

TEST_CASE("scenario parse errors") {
  auto code_of = [](std::string_view text) {
    try {
      parse_scenario(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::NotFound;
  };
  CHECK(code_of(R"({"tasks":[{"id":1,"workload":"a","colour":"red"}]})") == ErrorCode::ParseError);
  CHECK(code_of(R"({"tasks":[{"id":1}]})") == ErrorCode::ParseError);
  CHECK(code_of("{\"tasks\": [\n  {\"id\": 1,}\n]}") == ErrorCode::ParseError);
  try {
    parse_scenario("{\"tasks\": [\n  {\"id\": 1,}\n]}");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.json"), Error);
}
