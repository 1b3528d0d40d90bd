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

#include <algorithm>
#include <deque>
#include <queue>
#include <random>

#include "doctest.h"
#include "mrtp/error.hpp"
#include "mrtp/localplan.hpp"
#include "support/formulas.hpp"

using namespace mrtp;
using namespace mrtp::ltlf;
using namespace mrtp::localplan;

namespace {

// Horizontal line of `n` cells with labels.
WeightedTransitionSystem line(int n, std::map<int, std::set<std::string>> labels) {
  Grid g(n, 1);
  return wts_from_grid(g, 0, labels);
}

// Uniform-cost search over (region, nfa state) straight from the inputs.
Time oracle_cost(const WeightedTransitionSystem& w, const Nfa& nfa) {
  std::map<std::pair<int, int>, Time> best;
  using Item = std::tuple<Time, int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (int s : nfa.initial()) pq.push({0, w.initial(), s});
  while (!pq.empty()) {
    auto [d, r, s] = pq.top();
    pq.pop();
    if (best.count({r, s})) continue;
    best[{r, s}] = d;
    if (nfa.is_accepting(s)) return d;
    AtomSet l = nfa.universe().mask(w.label(r));
    for (const auto& e : nfa.out(s))
      if (guard_sat(e.guard, l))
        for (const auto& m : w.out(r)) pq.push({d + m.weight, m.to, e.to});
  }
  return -1;
}

std::set<std::pair<int, int>> oracle_reachable(const WeightedTransitionSystem& w, const Nfa& nfa) {
  std::set<std::pair<int, int>> seen;
  std::deque<std::pair<int, int>> q;
  for (int s : nfa.initial())
    if (seen.insert({w.initial(), s}).second) q.push_back({w.initial(), s});
  while (!q.empty()) {
    auto [r, s] = q.front();
    q.pop_front();
    AtomSet l = nfa.universe().mask(w.label(r));
    for (const auto& e : nfa.out(s))
      if (guard_sat(e.guard, l))
        for (const auto& m : w.out(r))
          if (seen.insert({m.to, e.to}).second) q.push_back({m.to, e.to});
  }
  return seen;
}

std::vector<std::set<std::string>> consumed_trace(const ProductAutomaton& p, const Run& run) {
  std::vector<std::set<std::string>> t;
  for (std::size_t i = 0; i + 1 < run.states.size(); ++i)
    t.push_back(p.wts().label(p.region(run.states[i])));
  return t;
}

}  // namespace

TEST_CASE("grid geometry") {
  Grid g(3, 2, {{1, 0}});
  CHECK(g.size() == 6);
  CHECK(g.id(2, 1) == 5);
  CHECK(g.x(5) == 2);
  CHECK(g.y(5) == 1);
  CHECK(g.blocked(1));
  CHECK(g.neighbors(0) == std::vector<int>{3});
  CHECK(g.connected());
  Grid cut(3, 1, {{1, 0}});
  CHECK_FALSE(cut.connected());
  CHECK_THROWS_AS(Grid(2, 2, {{5, 5}}), InvariantError);
}

TEST_CASE("motion model invariants") {
  auto w = line(3, {{2, {"a"}}});
  CHECK(w.weight(0, 0) == 1);
  CHECK(w.weight(0, 1) == 1);
  CHECK_FALSE(w.weight(0, 2).has_value());
  CHECK(w.label(2) == std::set<std::string>{"a"});
  WeightedTransitionSystem x(2, 0);
  CHECK_THROWS_AS(x.add_transition(0, 0, 2), InvariantError);
  CHECK_THROWS_AS(x.add_transition(0, 1, 0), InvariantError);
  Grid costly(2, 1, {}, {{{1, 0}, 5}});
  CHECK(wts_from_grid(costly, 0, {}).weight(0, 1) == 5);
}

TEST_CASE("local formula construction") {
  auto phi = parse_ltlf("F ts1");
  CHECK(build_local_formula(phi, {}) == phi);
  CHECK(build_local_formula(phi, {{}, {}}) == phi);
  CHECK(build_local_formula(phi, {{"a", "b"}}) == parse_ltlf("F ts1 & F (a & F b)"));
  CHECK(build_local_formula(phi, {{"a"}, {"b"}}) == parse_ltlf("F ts1 & F (a & F (F b))"));
  CHECK(build_local_formula(phi, {{"a", "b"}, {"c"}}) ==
        parse_ltlf("F ts1 & F (a & F (b & F (F c)))"));
}

TEST_CASE("local formula implies the individual formula") {
  std::mt19937_64 rng(3);
  std::vector<std::string> atoms{"a", "b"};
  Universe u({"a", "b", "x", "y"});
  auto traces = testing::all_traces(4, 3);
  for (int round = 0; round < 40; ++round) {
    auto phi = testing::random_formula(rng, 2, atoms);
    auto local = build_local_formula(phi, {{"x"}, {"y"}});
    for (const auto& t : traces)
      if (eval_trace(local, u, t)) REQUIRE(eval_trace(phi, u, t));
  }
}

TEST_CASE("trivial products") {
  ProductAutomaton p(line(1, {}), to_nfa(Formula::True()));
  CHECK(p.num_states() == 1);
  CHECK(p.is_accepting(0));
  CHECK(shortest_accepting_run(p).cost == 0);

  // The goal label is consumed by the step leaving the goal cell.
  ProductAutomaton two(line(2, {{1, {"a"}}}), to_nfa(parse_ltlf("F a")));
  CHECK(shortest_accepting_run(two).cost == 2);

  ProductAutomaton far(line(4, {{3, {"a"}}}), to_nfa(parse_ltlf("F a")));
  CHECK(shortest_accepting_run(far).cost == 4);

  ProductAutomaton two_goals(line(7, {{2, {"a"}}, {5, {"a"}}}), to_nfa(parse_ltlf("F a")));
  auto run = shortest_accepting_run(two_goals);
  CHECK(run.cost == 3);
  CHECK(two_goals.region(run.states[run.states.size() - 2]) == 2);

  ProductAutomaton none(line(2, {}), to_nfa(parse_ltlf("F a")));
  CHECK_THROWS_AS(shortest_accepting_run(none), PlanInfeasible);
}

TEST_CASE("product transitions obey motion and guards") {
  Grid g(3, 3);
  auto w = wts_from_grid(g, 0, {{2, {"ts1"}}, {6, {"ts2"}}, {8, {"ct1"}}, {4, {"ct2"}}});
  auto phi = build_local_formula(parse_ltlf("F ts1 & F ts2 & (!ts1 U ts2)"), {{"ct1"}, {"ct2"}});
  auto nfa = to_nfa(phi);
  ProductAutomaton p(w, nfa);
  CHECK(p.num_states() <= w.num_regions() * nfa.num_states());
  for (std::size_t id = 0; id < p.num_states(); ++id) {
    int s = static_cast<int>(id);
    for (const auto& e : p.out(s)) {
      auto wt = w.weight(p.region(s), p.region(e.to));
      REQUIRE(wt.has_value());
      CHECK(*wt == e.weight);
      const Guard* gd = nfa.guard(p.nfa_state(s), p.nfa_state(e.to));
      REQUIRE(gd != nullptr);
      CHECK(guard_sat(*gd, p.label(s)));
    }
  }
  auto run = shortest_accepting_run(p);
  CHECK(eval_trace(phi, consumed_trace(p, run)));
  auto visits = arrival_times(p, run, {"ct1", "ct2"});
  REQUIRE(visits.size() == 2);
  CHECK(visits[0].time < visits[1].time);
}

TEST_CASE("arrival times are prefix sums") {
  ProductAutomaton p(line(4, {{2, {"ct"}}}), to_nfa(parse_ltlf("F ct")));
  auto run = shortest_accepting_run(p);
  REQUIRE(run.states.size() == 4);
  auto v = arrival_times(p, run, {"ct"});
  CHECK(v[0].index == 2);
  CHECK(v[0].time == 2);

  ProductAutomaton start(line(2, {{0, {"ct"}}}), to_nfa(parse_ltlf("F ct")));
  auto r2 = shortest_accepting_run(start);
  CHECK(arrival_times(start, r2, {"ct"})[0].time == 0);

  // Six steps: ct1 at cell 2, ct2 at cell 5 (second visit order forced).
  ProductAutomaton multi(line(6, {{2, {"ct1"}}, {5, {"ct2"}}}),
                         to_nfa(parse_ltlf("F (ct1 & F ct2)")));
  auto r3 = shortest_accepting_run(multi);
  CHECK(r3.cost == 6);
  auto v3 = arrival_times(multi, r3, {"ct1", "ct2"});
  CHECK(v3[0].time == 2);
  CHECK(v3[1].time == 5);
  CHECK_THROWS_AS(arrival_times(multi, r3, {"ct2", "ct1"}), MissingCollaborativeState);

  auto plan = make_plan(multi, r3, v3);
  CHECK(plan.size() == 7);
  CHECK(plan[2].performs == std::optional<std::string>("ct1"));
  CHECK(plan.back().time == 6);
  auto j = to_json(plan, Grid(6, 1));
  CHECK(j[2]["region"] == nlohmann::json::parse("[2, 0]"));
  CHECK(j[0]["performs"].is_null());
}

TEST_CASE("collaborative states only where the automaton advances on the task") {
  ProductAutomaton p(line(3, {{1, {"ct"}}}), to_nfa(parse_ltlf("F ct")));
  auto c = collaborative_states(p, "ct");
  REQUIRE(c.size() == 1);
  CHECK(p.region(c[0]) == 1);
  // After the task the automaton no longer moves on it.
  for (int id : c) CHECK_FALSE(p.is_accepting(id));
}

TEST_CASE("random grids: product search and collaborative states against oracles") {
  std::mt19937_64 rng(17);
  int plans = 0;
  for (int round = 0; round < 60; ++round) {
    Grid g(5, 5, {{2, 2}, {static_cast<int>(rng() % 5), 4}});
    std::vector<int> free;
    for (int c = 0; c < g.size(); ++c)
      if (!g.blocked(c)) free.push_back(c);
    std::shuffle(free.begin(), free.end(), rng);
    std::map<int, std::set<std::string>> labels{
        {free[1], {"ts1"}}, {free[2], {"ts2"}}, {free[3], {"ct1"}}, {free[4], {"ct2"}}};
    auto w = wts_from_grid(g, free[0], labels);
    std::vector<std::string> atoms{"ts1", "ts2"};
    auto phi = Formula::And(testing::random_formula(rng, 2, atoms),
                            parse_ltlf("F ts1 | F ts2"));
    auto local = build_local_formula(phi, {{"ct1"}, {"ct2"}});
    auto nfa = to_nfa(local);
    ProductAutomaton p(w, nfa);

    auto reach = oracle_reachable(w, nfa);
    CHECK(reach.size() == p.num_states());

    Time expected = oracle_cost(w, nfa);
    if (expected < 0) {
      CHECK_THROWS_AS(shortest_accepting_run(p), PlanInfeasible);
      continue;
    }
    ++plans;
    auto run = shortest_accepting_run(p);
    CHECK(run.cost == expected);
    CHECK(eval_trace(local, consumed_trace(p, run)));
    auto v = arrival_times(p, run, {"ct1", "ct2"});
    CHECK(v[0].index < v[1].index);

    for (const std::string ct : {"ct1", "ct2"}) {
      std::set<std::pair<int, int>> want;
      for (const auto& [r, s] : reach) {
        if (w.label(r).count(ct) == 0) continue;
        AtomSet l = nfa.universe().mask(w.label(r));
        AtomSet bit = nfa.universe().mask({ct});
        for (const auto& e : nfa.out(s))
          if (e.to != s && guard_sat(e.guard, l) && !guard_sat(e.guard, l & ~bit))
            want.insert({r, s});
      }
      std::set<std::pair<int, int>> got;
      for (int id : collaborative_states(p, ct)) got.insert({p.region(id), p.nfa_state(id)});
      CHECK(got == want);
    }

    auto tree = accept_tree(p);
    for (int s : p.initial()) CHECK(tree.dist[s] == expected);
    auto path = tree.path_from(p.initial()[0]);
    if (!path.empty()) CHECK(run_cost(p, path) == tree.dist[p.initial()[0]]);
  }
  CHECK(plans > 30);
}
