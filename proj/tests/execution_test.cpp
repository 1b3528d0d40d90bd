// Copyright 2026 The mrtp Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"
#include "mrtp/error.hpp"
#include "mrtp/execution.hpp"

using namespace mrtp;
using namespace mrtp::execution;
using nlohmann::json;

namespace {

scenario::Scenario line(int width, const std::string& robots, const std::string& indiv,
                        const std::string& collab, const std::string& specs) {
  return scenario::scenario_from_json(json::parse(
      R"({"grid": {"width": )" + std::to_string(width) + R"(, "height": 1, "blocked": []},
          "robots": )" + robots + R"(, "individual_tasks": )" + indiv +
      R"(, "collaborative_tasks": )" + collab + R"(, "specs": )" + specs + R"(, "options": {}})"));
}

scenario::GeneratorParams toy(std::uint64_t seed) {
  scenario::GeneratorParams p;
  p.seed = seed;
  p.width = 4;
  p.height = 3;
  p.robots = 2;
  p.collaborative = 1 + static_cast<int>(seed % 2);
  p.capabilities = 1 + static_cast<int>(seed % 2);
  p.individual_per_robot = 1 + static_cast<int>(seed % 2);
  return p;
}

}  // namespace

TEST_CASE("single robot completes at prefix sums") {
  auto s = line(5, R"([{"id": 1, "capability": "c1", "start": [0, 0]}])", "{}",
                R"([{"name": "ct1", "cell": [3, 0], "requires": {"c1": 1}}])",
                R"({"individual": {}, "global": "F ct1"})");
  auto sol = pipeline::run_pipeline(s);
  auto plans = exec_plans(sol);
  auto trace = simulate_execution(s, sol.mission.sequence, plans);
  REQUIRE(trace.robots.size() == 1);
  const auto& tl = trace.robots[0];
  for (std::size_t x = 0; x < tl.arrive.size(); ++x) CHECK(tl.arrive[x] == static_cast<Time>(x));
  CHECK(tl.waited == 0);
  CHECK(tl.finish == sol.cost.total);
  REQUIRE(trace.events.size() == 1);
  CHECK(trace.events[0].time == 3);
}

TEST_CASE("rendezvous fires at the time cost task time") {
  auto s = line(9,
                R"([{"id": 1, "capability": "c1", "start": [0, 0]},
                    {"id": 2, "capability": "c2", "start": [8, 0]}])",
                "{}", R"([{"name": "ct1", "cell": [2, 0], "requires": {"c1": 1, "c2": 1}}])",
                R"({"individual": {}, "global": "F ct1"})");
  pipeline::PipelineOptions o;
  o.adjust = false;
  auto sol = pipeline::run_pipeline(s, o);
  auto trace = simulate_execution(s, sol.mission.sequence, exec_plans(sol));
  REQUIRE(trace.events.size() == 1);
  CHECK(trace.events[0].time == sol.cost.task_time[0]);
  CHECK(trace.events[0].time == 6);
  CHECK(trace.events[0].robots == std::vector<int>{1, 2});
  for (const auto& t : trace.robots) CHECK(t.finish == sol.cost.colla.at(t.robot));
  CHECK(trace.robots[0].waited == 4);
}

TEST_CASE("pipeline output verifies on random scenarios") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    CAPTURE(seed);
    scenario::GeneratorParams p;
    p.seed = seed;
    p.width = 6;
    p.height = 6;
    p.robots = 2 + static_cast<int>(seed % 3);
    p.collaborative = 1 + static_cast<int>(seed % 4);
    p.capabilities = 2;
    p.individual_per_robot = 2;
    auto s = scenario::generate_scenario(p);
    pipeline::PipelineOptions o;
    o.seed = seed;
    o.max_assignments = 5;
    auto sol = pipeline::run_pipeline(s, o);
    auto plans = exec_plans(sol);
    auto trace = simulate_execution(s, sol.mission.sequence, plans);
    auto rep = verify_solution(s, sol.mission, plans, trace);
    CHECK(rep.ok());
    CHECK_FALSE(trace.deadlock);
    for (const auto& t : trace.robots) CHECK(t.finish == sol.cost.colla.at(t.robot));

    // The plan document reads back to the same walks.
    auto back = exec_plans_from_json(pipeline::to_json(sol, s), s);
    REQUIRE(back.size() == plans.size());
    for (std::size_t i = 0; i < plans.size(); ++i) {
      CHECK(back[i].cells == plans[i].cells);
      CHECK(back[i].performs == plans[i].performs);
    }
  }
}

TEST_CASE("swapped task visits break the ordering check") {
  auto s = line(5, R"([{"id": 1, "capability": "c1", "start": [0, 0]}])", "{}",
                R"([{"name": "ct1", "cell": [1, 0], "requires": {"c1": 1}},
                    {"name": "ct2", "cell": [3, 0], "requires": {"c1": 1}}])",
                R"j({"individual": {}, "global": "F ct1 & F ct2 & (!ct2 U ct1)"})j");
  auto m = pipeline::build_mission(s);
  std::vector<ExecPlan> good{{1, {0, 1, 2, 3, 4}, {{1, "ct1"}, {3, "ct2"}}}};
  auto ok = verify_solution(s, m, good, simulate_execution(s, m.sequence, good));
  CHECK(ok.ok());

  std::vector<ExecPlan> swapped{{1, {0, 1, 2, 3, 2, 1, 0}, {{3, "ct2"}, {5, "ct1"}}}};
  auto trace = simulate_execution(s, m.sequence, swapped);
  auto bad = verify_solution(s, m, swapped, trace);
  CHECK(bad.plans_valid);
  CHECK_FALSE(bad.order);
  CHECK_FALSE(bad.global);
  CHECK_FALSE(bad.ok());
}

TEST_CASE("broken walks are reported") {
  auto s = line(5, R"([{"id": 1, "capability": "c1", "start": [0, 0]}])", "{}",
                R"([{"name": "ct1", "cell": [3, 0], "requires": {"c1": 1}}])",
                R"({"individual": {}, "global": "F ct1"})");
  auto m = pipeline::build_mission(s);
  SUBCASE("jump") {
    std::vector<ExecPlan> p{{1, {0, 3, 4}, {{1, "ct1"}}}};
    CHECK_FALSE(verify_solution(s, m, p, simulate_execution(s, m.sequence, p)).plans_valid);
  }
  SUBCASE("wrong start") {
    std::vector<ExecPlan> p{{1, {1, 2, 3, 4}, {{2, "ct1"}}}};
    CHECK_FALSE(verify_solution(s, m, p, simulate_execution(s, m.sequence, p)).plans_valid);
  }
  SUBCASE("task never performed") {
    std::vector<ExecPlan> p{{1, {0, 1, 2, 3}, {}}};
    auto rep = verify_solution(s, m, p, simulate_execution(s, m.sequence, p));
    CHECK_FALSE(rep.global);
  }
}

TEST_CASE("true global formula passes vacuously") {
  auto s = line(4, R"([{"id": 1, "capability": "c1", "start": [0, 0]}])",
                R"({"1": [{"name": "a", "cell": [2, 0]}]})", "[]",
                R"({"individual": {"1": "F a"}, "global": "true"})");
  auto sol = pipeline::run_pipeline(s);
  auto plans = exec_plans(sol);
  auto trace = simulate_execution(s, sol.mission.sequence, plans);
  CHECK(trace.events.empty());
  auto rep = verify_solution(s, sol.mission, plans, trace);
  CHECK(rep.global);
  CHECK(rep.ok());
  CHECK(sol.cost.total == 3);
}

TEST_CASE("individual formula violations are caught") {
  auto s = line(4, R"([{"id": 1, "capability": "c1", "start": [0, 0]}])",
                R"({"1": [{"name": "a", "cell": [2, 0]}]})", "[]",
                R"({"individual": {"1": "F a"}, "global": "true"})");
  auto m = pipeline::build_mission(s);
  std::vector<ExecPlan> p{{1, {0, 1}, {}}};
  auto rep = verify_solution(s, m, p, simulate_execution(s, m.sequence, p));
  CHECK_FALSE(rep.individual);
}

TEST_CASE("oracle equals the shortest run for one robot") {
  auto s = line(6, R"([{"id": 1, "capability": "c1", "start": [2, 0]}])",
                R"({"1": [{"name": "a", "cell": [0, 0]}, {"name": "b", "cell": [5, 0]}]})",
                R"([{"name": "ct1", "cell": [4, 0], "requires": {"c1": 1}}])",
                R"({"individual": {"1": "F a & F b"}, "global": "F ct1"})");
  auto sol = pipeline::run_pipeline(s);
  auto r = brute_force_joint_plan(s);
  CHECK(r.T_colla == sol.robots[0].run.cost);
  CHECK(r.T_colla == sol.cost.total);
}

TEST_CASE("oracle never loses to the pipeline on two-robot toys") {
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    auto s = scenario::generate_scenario(toy(seed));
    pipeline::PipelineOptions o;
    o.seed = seed;
    auto sol = pipeline::run_pipeline(s, o);
    OracleResult r;
    try {
      r = brute_force_joint_plan(s);
    } catch (const ResourceError&) {
      continue;
    }
    ++solved;
    CHECK(r.T_colla <= sol.cost.total);
  }
  CHECK(solved >= 10);
}

TEST_CASE("oracle strictly beats the pipeline on a constructed instance") {
  // The essential sequence commits to the two-robot branch of a choice that
  // one robot could settle nearby.
  auto s = line(7,
                R"([{"id": 1, "capability": "c1", "start": [0, 0]},
                    {"id": 2, "capability": "c2", "start": [6, 0]}])",
                "{}",
                R"([{"name": "ct1", "cell": [3, 0], "requires": {"c1": 1, "c2": 1}},
                    {"name": "ct2", "cell": [1, 0], "requires": {"c1": 1}}])",
                R"({"individual": {}, "global": "F ct1 | F ct2"})");
  auto sol = pipeline::run_pipeline(s);
  auto r = brute_force_joint_plan(s);
  CHECK(sol.cost.total == 8);
  CHECK(r.T_colla == 2);
}

TEST_CASE("oracle caps") {
  auto s = scenario::generate_scenario(toy(3));
  OracleOptions o;
  o.max_states = 5;
  CHECK_THROWS_AS(brute_force_joint_plan(s, o), ResourceError);
  scenario::GeneratorParams p = toy(3);
  p.robots = 3;
  p.capabilities = 1;
  CHECK_THROWS_AS(brute_force_joint_plan(scenario::generate_scenario(p)), ResourceError);
}
