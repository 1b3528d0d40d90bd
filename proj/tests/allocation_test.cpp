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

#include <random>

#include "doctest.h"
#include "mrtp/allocation.hpp"
#include "mrtp/error.hpp"
#include "support/allocation_oracle.hpp"

using namespace mrtp;
using namespace mrtp::allocation;
using mission::EssentialSequence;
using mission::TaskCatalog;
using mission::TaskSpec;
using mission::TeamModel;

namespace {

EssentialSequence sequence(std::vector<std::vector<std::string>> elements,
                           std::vector<std::size_t> boundaries = {0}) {
  EssentialSequence s;
  s.elements = std::move(elements);
  s.boundaries = std::move(boundaries);
  return s;
}

std::vector<Assignment> drain(AssignmentStream& s) {
  std::vector<Assignment> out;
  while (auto a = s.next()) out.push_back(*a);
  return out;
}

}  // namespace

TEST_CASE("variables only for capable robots") {
  TaskCatalog cat{{"ct", TaskSpec{"ct", 0, {{"c1", 1}}}}};
  TeamModel team({{1, "c1"}, {2, "c2"}});
  auto model = build_model(sequence({{"ct"}}), team, cat);
  CHECK(model.variables().size() == 1);
  CHECK(model.var(2, {1, 1}) == -1);
  AssignmentStream s(model);
  auto all = drain(s);
  REQUIRE(all.size() == 1);
  CHECK(all[0].tasks.at(1) == std::set<TaskRef>{{1, 1}});
  CHECK(all[0].tasks.at(2).empty());
}

TEST_CASE("synchronized tasks exclude a shared robot") {
  TaskCatalog cat{{"ctA", TaskSpec{"ctA", 0, {{"c1", 1}}}},
                  {"ctB", TaskSpec{"ctB", 1, {{"c1", 1}}}}};
  TeamModel team({{1, "c1"}, {2, "c1"}});
  auto model = build_model(sequence({{"ctA", "ctB"}}), team, cat);
  CHECK(model.at_most_one().size() == 2);
  AssignmentStream s(model);
  for (const auto& a : drain(s))
    for (const auto& [robot, set] : a.tasks) CHECK(set.size() <= 1);
}

TEST_CASE("unconstrained and cardinality counts") {
  // One task needing one robot from a group of one: free variables are
  // absent, so use a 2-of-3 requirement and a 1-of-2 requirement.
  TaskCatalog cat{{"a", TaskSpec{"a", 0, {{"c1", 2}}}}};
  TeamModel team({{1, "c1"}, {2, "c1"}, {3, "c1"}});
  AssignmentStream s(build_model(sequence({{"a"}}), team, cat));
  CHECK(drain(s).size() == 4);

  TaskCatalog cat2{{"a", TaskSpec{"a", 0, {{"c1", 1}}}}, {"b", TaskSpec{"b", 1, {{"c2", 1}}}}};
  TeamModel team2({{1, "c1"}, {2, "c2"}});
  // Two singleton subsequences, one variable each, both forced true.
  AssignmentStream s2(build_model(sequence({{"a"}, {"b"}}, {0, 1}), team2, cat2));
  CHECK(drain(s2).size() == 1);
}

TEST_CASE("overlap constraint on consecutive elements") {
  TaskCatalog cat{{"a", TaskSpec{"a", 0, {{"c1", 1}}}}, {"b", TaskSpec{"b", 1, {{"c1", 1}}}}};
  TeamModel team({{1, "c1"}, {2, "c1"}});
  auto seq = sequence({{"a"}, {"b"}});
  AssignmentStream with(build_model(seq, team, cat));
  AssignmentStream without(build_model(seq, team, cat, std::vector<ElementPair>{}));
  auto w = drain(with);
  auto wo = drain(without);
  CHECK(wo.size() == 9);
  // Models where a and b have disjoint robots are removed: {1}/{2} and {2}/{1}.
  CHECK(w.size() == 7);
  for (const auto& a : w) {
    bool shared = false;
    for (const auto& [r, set] : a.tasks) shared = shared || set.size() == 2;
    CHECK(shared);
  }
  CHECK_THROWS_AS(build_model(seq, team, cat, std::vector<ElementPair>{{1, 2}}), InvariantError);
}

TEST_CASE("dominance filter") {
  Assignment h{{{1, {{1, 1}}}}};
  Assignment bigger{{{1, {{1, 1}, {1, 2}}}}};
  Assignment other{{{1, {{1, 2}}}}};
  CHECK(dominated(bigger, {h}));
  CHECK_FALSE(dominated(other, {h}));
  Assignment h2{{{1, {{1, 1}}}, {2, {{1, 2}}}}};
  Assignment eq{{{1, {{1, 1}}}, {2, {{1, 2}}}, {3, {}}}};
  CHECK(dominated(eq, {h2}));
  CHECK_FALSE(dominated(h, {}));
}

TEST_CASE("decode rejects violating assignments") {
  TaskCatalog cat{{"a", TaskSpec{"a", 0, {{"c1", 1}}}}};
  TeamModel team({{1, "c1"}});
  auto model = build_model(sequence({{"a"}}), team, cat);
  CHECK_THROWS_AS(decode(model, {0}), InvariantError);
  auto a = decode(model, {1});
  CHECK(encode(model, a) == std::vector<char>{1});
  CHECK(to_json(a) == nlohmann::json::parse(R"({"1": [[1, 1]]})"));
}

TEST_CASE("enumeration equals brute force on random instances") {
  std::mt19937_64 rng(5);
  int nonempty = 0;
  for (int round = 0; round < 150; ++round) {
    auto inst = testing::random_allocation_instance(rng);
    auto expected = testing::brute_force_models(inst);
    auto model = build_model(inst.seq, inst.team, inst.catalog, inst.comm_pairs);
    REQUIRE(model.variables().size() <= 20);
    AssignmentStream s(model);
    std::set<std::map<int, std::set<std::string>>> got;
    std::size_t count = 0;
    while (auto a = s.next()) {
      ++count;
      CHECK(testing::raw_constraints_hold(inst, testing::by_name(inst, *a)));
      got.insert(testing::by_name(inst, *a));
    }
    CHECK(count == got.size());
    CHECK(got == expected);
    nonempty += expected.empty() ? 0 : 1;
  }
  CHECK(nonempty > 50);
}

TEST_CASE("superset cuts skip exactly the dominated models") {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 100; ++round) {
    auto inst = testing::random_allocation_instance(rng);
    auto model = build_model(inst.seq, inst.team, inst.catalog, inst.comm_pairs);
    AssignmentStream lazy(model), cut(model);
    std::vector<Assignment> a, b;
    while (auto x = lazy.next_undominated()) a.push_back(*x);
    while (auto x = cut.next()) {
      b.push_back(*x);
      cut.block_supersets(*x);
    }
    CHECK(a == b);
    // No emitted model contains an earlier one.
    for (std::size_t i = 0; i < b.size(); ++i)
      CHECK_FALSE(dominated(b[i], std::vector<Assignment>(b.begin(), b.begin() + i)));
  }
}

TEST_CASE("stream is resumable and terminates") {
  TaskCatalog cat{{"a", TaskSpec{"a", 0, {{"c1", 1}}}}};
  TeamModel team({{1, "c1"}, {2, "c1"}});
  AssignmentStream s(build_model(sequence({{"a"}}), team, cat));
  CHECK(s.next().has_value());
  CHECK(s.stats().emitted == 1);
  CHECK(s.next().has_value());
  CHECK(s.next().has_value());
  CHECK_FALSE(s.next().has_value());
  CHECK_FALSE(s.next().has_value());
  CHECK(s.stats().emitted == 3);
}
