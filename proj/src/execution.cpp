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

#include "mrtp/execution.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <tuple>

#include "mrtp/error.hpp"

namespace mrtp::execution {

using nlohmann::json;

std::vector<ExecPlan> exec_plans(const pipeline::Solution& sol) {
  std::vector<ExecPlan> out;
  for (const auto& r : sol.robots) {
    ExecPlan p;
    p.robot = r.robot;
    for (std::size_t x = 0; x < r.plan.size(); ++x) {
      p.cells.push_back(r.plan[x].region);
      if (r.plan[x].performs) p.performs.push_back({x, *r.plan[x].performs});
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ExecPlan> exec_plans_from_json(const json& plan, const scenario::Scenario& s) {
  if (!plan.is_object() || !plan.contains("robots") || !plan["robots"].is_array())
    throw SchemaError("/robots", "expected an array of robot plans");
  std::vector<ExecPlan> out;
  const json& robots = plan["robots"];
  for (std::size_t i = 0; i < robots.size(); ++i) {
    std::string path = "/robots/" + std::to_string(i);
    const json& r = robots[i];
    if (!r.is_object() || !r.contains("id") || !r["id"].is_number_integer())
      throw SchemaError(path + "/id", "expected an integer robot id");
    if (!r.contains("plan") || !r["plan"].is_array()) throw SchemaError(path + "/plan", "expected an array");
    ExecPlan p;
    p.robot = r["id"].get<int>();
    const json& steps = r["plan"];
    for (std::size_t x = 0; x < steps.size(); ++x) {
      std::string sp = path + "/plan/" + std::to_string(x);
      const json& st = steps[x];
      if (!st.is_object() || !st.contains("region") || !st["region"].is_array() ||
          st["region"].size() != 2 || !st["region"][0].is_number_integer() ||
          !st["region"][1].is_number_integer())
        throw SchemaError(sp + "/region", "expected [x, y]");
      int cx = st["region"][0].get<int>(), cy = st["region"][1].get<int>();
      if (cx < 0 || cy < 0 || cx >= s.width || cy >= s.height)
        throw SchemaError(sp + "/region", "cell outside the grid");
      p.cells.push_back(s.cell_id({cx, cy}));
      if (st.contains("performs") && !st["performs"].is_null()) {
        if (!st["performs"].is_string()) throw SchemaError(sp + "/performs", "expected a task name or null");
        p.performs.push_back({x, st["performs"].get<std::string>()});
      }
    }
    if (p.cells.empty()) throw SchemaError(path + "/plan", "plan has no waypoints");
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

Time step_cost(const localplan::Grid& g, int from, int to) {
  return from == to ? 1 : g.cost(to);
}

bool adjacent(const localplan::Grid& g, int from, int to) {
  if (from == to) return true;
  auto n = g.neighbors(from);
  return std::find(n.begin(), n.end(), to) != n.end();
}

}  // namespace

JointTrace simulate_execution(const scenario::Scenario& s, const mission::EssentialSequence& seq,
                              const std::vector<ExecPlan>& plans) {
  auto grid = s.grid();
  JointTrace out;
  std::map<std::string, std::size_t> element_of;
  for (std::size_t e = 0; e < seq.size(); ++e)
    for (const auto& t : seq.elements[e]) element_of[t] = e;

  std::vector<std::set<int>> participants(seq.size());
  for (const auto& p : plans)
    for (const auto& [x, t] : p.performs) {
      auto it = element_of.find(t);
      if (it == element_of.end()) {
        out.problems.push_back("robot " + std::to_string(p.robot) + " performs unknown task " + t);
        continue;
      }
      participants[it->second].insert(p.robot);
    }

  struct State {
    std::size_t x = 0, p = 0;
    Time clock = 0;
    long waiting = -1;
    bool done = false;
    std::map<int, std::set<std::string>> labels;
  };
  std::vector<State> st(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    RobotTimeline t;
    t.robot = plans[i].robot;
    t.arrive.assign(plans[i].cells.size(), 0);
    t.wait.assign(plans[i].cells.size(), 0);
    out.robots.push_back(std::move(t));
    st[i].labels = s.individual_labels(plans[i].robot);
  }
  auto symbol = [&](std::size_t i) {
    auto it = st[i].labels.find(plans[i].cells[st[i].x]);
    return it == st[i].labels.end() ? std::set<std::string>{} : it->second;
  };
  auto step = [&](std::size_t i) {
    auto& r = st[i];
    auto& tl = out.robots[i];
    tl.individual_trace.push_back(symbol(i));
    Time c = step_cost(grid, plans[i].cells[r.x], plans[i].cells[r.x + 1]);
    r.clock += c;
    tl.busy += c;
    ++r.x;
    tl.arrive[r.x] = r.clock;
  };

  std::vector<char> fired(seq.size(), 0);
  while (true) {
    // Move every free robot up to its next performing waypoint.
    for (std::size_t i = 0; i < plans.size(); ++i) {
      auto& r = st[i];
      while (!r.done && r.waiting < 0) {
        if (r.p < plans[i].performs.size() && plans[i].performs[r.p].first == r.x) {
          auto it = element_of.find(plans[i].performs[r.p].second);
          if (it == element_of.end()) {
            ++r.p;
            continue;
          }
          r.waiting = static_cast<long>(it->second);
          break;
        }
        if (r.x + 1 >= plans[i].cells.size()) {
          r.done = true;
          out.robots[i].finish = r.clock;
          if (r.p < plans[i].performs.size())
            out.problems.push_back("robot " + std::to_string(plans[i].robot) +
                                   " has a performing waypoint outside its walk");
          break;
        }
        step(i);
      }
    }
    bool progress = false;
    for (std::size_t e = 0; e < seq.size() && !progress; ++e) {
      if (fired[e] || participants[e].empty()) continue;
      std::vector<std::size_t> who;
      bool ready = true;
      for (std::size_t i = 0; i < plans.size(); ++i) {
        if (!participants[e].count(plans[i].robot)) continue;
        if (st[i].waiting != static_cast<long>(e)) ready = false;
        who.push_back(i);
      }
      if (!ready) continue;
      Time t = 0;
      for (std::size_t i : who) t = std::max(t, st[i].clock);
      TaskEvent ev{e, seq.elements[e], t, {}};
      for (std::size_t i : who) {
        auto& r = st[i];
        auto& tl = out.robots[i];
        Time w = t - r.clock;
        tl.wait[r.x] += w;
        tl.waited += w;
        for (Time u = 0; u < w; ++u) tl.individual_trace.push_back(symbol(i));
        r.clock = t;
        tl.performed[plans[i].performs[r.p].second] = t;
        ev.robots.push_back(plans[i].robot);
        ++r.p;
        r.waiting = -1;
        step(i);
      }
      std::sort(ev.robots.begin(), ev.robots.end());
      out.events.push_back(std::move(ev));
      fired[e] = 1;
      progress = true;
    }
    if (progress) continue;
    bool all_done = std::all_of(st.begin(), st.end(), [](const State& r) { return r.done; });
    if (!all_done) {
      out.deadlock = true;
      out.problems.push_back("deadlock: robots wait for tasks that can never fire");
      for (std::size_t i = 0; i < plans.size(); ++i)
        if (!st[i].done) out.robots[i].finish = st[i].clock;
    }
    break;
  }
  for (auto& t : out.robots) t.finish = t.busy + t.waited;
  return out;
}

json to_json(const VerifyReport& r) {
  return {{"plans_valid", r.plans_valid}, {"individual", r.individual}, {"global", r.global},
          {"sync", r.sync},               {"order", r.order},           {"problems", r.problems},
          {"ok", r.ok()}};
}

VerifyReport verify_solution(const scenario::Scenario& s, const pipeline::MissionModel& m,
                             const std::vector<ExecPlan>& plans, const JointTrace& trace) {
  VerifyReport rep;
  auto grid = s.grid();
  auto catalog = s.catalog();
  auto fail = [&rep](bool& flag, const std::string& why) {
    flag = false;
    rep.problems.push_back(why);
  };

  // Walk validity.
  std::set<int> seen;
  for (const auto& p : plans) {
    std::string who = "robot " + std::to_string(p.robot);
    if (!seen.insert(p.robot).second) fail(rep.plans_valid, who + " has two plans");
    const scenario::RobotSpec* spec = nullptr;
    for (const auto& r : s.robots)
      if (r.id == p.robot) spec = &r;
    if (!spec) {
      fail(rep.plans_valid, who + " is not part of the scenario");
      continue;
    }
    if (p.cells.empty() || p.cells.front() != s.cell_id(spec->start))
      fail(rep.plans_valid, who + " does not start at its start cell");
    for (std::size_t x = 0; x < p.cells.size(); ++x) {
      if (p.cells[x] < 0 || p.cells[x] >= grid.size() || grid.blocked(p.cells[x])) {
        fail(rep.plans_valid, who + " visits a blocked or missing cell");
        break;
      }
      if (x > 0 && !adjacent(grid, p.cells[x - 1], p.cells[x])) {
        fail(rep.plans_valid, who + " jumps between non-adjacent cells");
        break;
      }
    }
    for (std::size_t q = 0; q < p.performs.size(); ++q) {
      const auto& [x, task] = p.performs[q];
      if (q > 0 && x <= p.performs[q - 1].first) fail(rep.plans_valid, who + " performs two tasks at once");
      auto it = catalog.find(task);
      if (it == catalog.end()) {
        fail(rep.plans_valid, who + " performs unknown task " + task);
        continue;
      }
      if (x + 1 >= p.cells.size() || p.cells[x] != it->second.region)
        fail(rep.plans_valid, who + " performs " + task + " away from its cell");
      if (!it->second.requirements.count(spec->capability))
        fail(rep.plans_valid, who + " lacks a capability " + task + " needs");
    }
  }
  for (const auto& r : s.robots)
    if (!seen.count(r.id)) fail(rep.plans_valid, "robot " + std::to_string(r.id) + " has no plan");
  if (trace.deadlock || !trace.problems.empty())
    for (const auto& p : trace.problems) fail(rep.plans_valid, p);

  // (a)
  for (const auto& t : trace.robots) {
    bool known = false;
    for (const auto& r : s.robots) known = known || r.id == t.robot;
    if (!known) continue;
    if (!ltlf::eval_trace(ltlf::parse_ltlf(s.individual_spec(t.robot)), t.individual_trace))
      fail(rep.individual, "robot " + std::to_string(t.robot) + " violates its individual formula");
  }

  // (b): events at the same instant may be read in any order or together.
  std::map<Time, std::vector<std::set<std::string>>> groups;
  for (const auto& e : trace.events)
    groups[e.time].push_back(std::set<std::string>(e.tasks.begin(), e.tasks.end()));
  std::vector<std::vector<std::vector<std::set<std::string>>>> options;
  for (auto& [t, g] : groups) {
    std::vector<std::vector<std::set<std::string>>> opts;
    std::set<std::string> merged;
    for (const auto& x : g) merged.insert(x.begin(), x.end());
    opts.push_back({merged});
    if (g.size() > 1 && g.size() <= 5) {
      std::sort(g.begin(), g.end());
      do opts.push_back(g);
      while (std::next_permutation(g.begin(), g.end()));
    }
    options.push_back(std::move(opts));
  }
  const auto& u = m.pruned.universe();
  std::size_t budget = 100000;
  std::vector<std::set<std::string>> chosen;
  std::function<bool(std::size_t)> search = [&](std::size_t gi) -> bool {
    if (budget == 0) return false;
    if (gi == options.size()) {
      --budget;
      ltlf::Trace t;
      for (const auto& x : chosen) t.push_back(u.mask(x));
      return ltlf::nfa_accepts(m.pruned, t) && ltlf::eval_trace(m.phi, chosen);
    }
    for (const auto& o : options[gi]) {
      chosen.insert(chosen.end(), o.begin(), o.end());
      bool ok = search(gi + 1);
      chosen.resize(chosen.size() - o.size());
      if (ok) return true;
    }
    return false;
  };
  if (!search(0)) fail(rep.global, "the collaborative task sequence violates the global formula");

  // (c)
  std::map<std::string, Time> when;
  for (const auto& e : trace.events) {
    for (const auto& task : e.tasks) {
      when[task] = e.time;
      std::map<std::string, int> staffed;
      for (std::size_t i = 0; i < plans.size(); ++i) {
        bool does = false;
        for (const auto& [x, t] : plans[i].performs) does = does || t == task;
        if (!does) continue;
        auto it = trace.robots[i].performed.find(task);
        if (it == trace.robots[i].performed.end() || it->second != e.time)
          fail(rep.sync, "robot " + std::to_string(plans[i].robot) + " is not present when " + task + " fires");
        for (const auto& r : s.robots)
          if (r.id == plans[i].robot) ++staffed[r.capability];
      }
      for (const auto& [cap, n] : catalog.at(task).requirements)
        if (staffed[cap] < n) fail(rep.sync, task + " fires without enough robots of " + cap);
    }
  }

  // (d)
  for (const auto& c : mission::temporal_constraints(m.sequence)) {
    if (c.kind != mission::ConstraintKind::kOrder) continue;
    auto a = when.find(c.first), b = when.find(c.second);
    if (a == when.end() || b == when.end() || a->second > b->second)
      fail(rep.order, c.first + " must come before " + c.second);
  }
  return rep;
}

OracleResult brute_force_joint_plan(const scenario::Scenario& s, const OracleOptions& o) {
  scenario::validate(s);
  if (s.robots.size() > o.max_robots)
    throw ResourceError("the joint search supports at most " + std::to_string(o.max_robots) + " robots");
  if (!s.costs.empty()) throw InvariantError("the joint search assumes unit cell weights");
  auto grid = s.grid();
  auto mission = pipeline::build_mission(s);
  const auto& G = mission.pruned;
  const auto& gu = G.universe();
  const std::size_t n = s.robots.size();

  struct RobotData {
    ltlf::Nfa nfa;
    std::vector<ltlf::AtomSet> label;  // per cell
    std::string cap;
  };
  std::vector<RobotData> rd;
  for (const auto& r : s.robots) {
    RobotData d{ltlf::to_nfa(ltlf::parse_ltlf(s.individual_spec(r.id))), {}, r.capability};
    d.label.assign(static_cast<std::size_t>(grid.size()), 0);
    for (const auto& [c, names] : s.individual_labels(r.id)) d.label[c] = d.nfa.universe().mask(names);
    rd.push_back(std::move(d));
  }
  // Tasks each robot could help with, per cell.
  std::vector<std::vector<std::vector<int>>> can(n, std::vector<std::vector<int>>(grid.size()));
  const auto& cts = s.collaborative_tasks;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < cts.size(); ++t)
      if (gu.contains(cts[t].name) && cts[t].requirements.count(rd[i].cap))
        can[i][s.cell_id(cts[t].cell)].push_back(static_cast<int>(t));

  // State: per robot (cell, nfa state, finished), then the global state.
  using Key = std::vector<int>;
  std::map<Key, Time> dist;
  using Item = std::pair<Time, Key>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;

  std::vector<Key> starts{{}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Key> next;
    for (const auto& k : starts)
      for (int q : rd[i].nfa.initial()) {
        Key x = k;
        x.insert(x.end(), {s.cell_id(s.robots[i].start), q, 0});
        next.push_back(x);
      }
    starts = std::move(next);
  }
  for (auto k : starts)
    for (int g : G.initial()) {
      Key x = k;
      x.push_back(g);
      if (!dist.count(x)) {
        dist[x] = 0;
        pq.push({0, x});
      }
    }

  std::size_t settled = 0;
  std::set<Key> done;
  auto relax = [&](const Key& k, Time d) {
    auto it = dist.find(k);
    if (it == dist.end() || d < it->second) {
      dist[k] = d;
      pq.push({d, k});
    }
  };
  while (!pq.empty()) {
    auto [d, key] = pq.top();
    pq.pop();
    if (!done.insert(key).second) continue;
    if (++settled > o.max_states) throw ResourceError("joint search exceeded its state cap");
    bool all_finished = true;
    for (std::size_t i = 0; i < n; ++i) all_finished = all_finished && key[3 * i + 2] == 1;
    int g = key[3 * n];
    if (all_finished && G.is_accepting(g)) return {d, settled};

    // A robot may stop once its own formula is satisfied.
    for (std::size_t i = 0; i < n; ++i)
      if (key[3 * i + 2] == 0 && rd[i].nfa.is_accepting(key[3 * i + 1])) {
        Key k = key;
        k[3 * i + 2] = 1;
        relax(k, d);
      }
    if (all_finished) continue;

    // Per-robot options: (next cell, next nfa state, task joined or -1).
    std::vector<std::vector<std::tuple<int, int, int>>> opts(n);
    Time active = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (key[3 * i + 2] == 1) {
        opts[i].push_back({-1, -1, -1});
        continue;
      }
      ++active;
      int c = key[3 * i], q = key[3 * i + 1];
      std::vector<int> cells{c};
      for (int nb : grid.neighbors(c)) cells.push_back(nb);
      std::vector<int> joins{-1};
      for (int t : can[i][c]) joins.push_back(t);
      for (const auto& e : rd[i].nfa.out(q)) {
        if (!ltlf::guard_sat(e.guard, rd[i].label[c])) continue;
        for (int nc : cells)
          for (int t : joins) opts[i].push_back({nc, e.to, t});
      }
    }
    std::vector<std::size_t> pick(n, 0);
    std::function<void(std::size_t)> go = [&](std::size_t i) {
      if (i < n) {
        for (pick[i] = 0; pick[i] < opts[i].size(); ++pick[i]) go(i + 1);
        return;
      }
      std::map<int, std::map<std::string, int>> staff;
      for (std::size_t r = 0; r < n; ++r) {
        int t = std::get<2>(opts[r][pick[r]]);
        if (t >= 0) ++staff[t][rd[r].cap];
      }
      ltlf::AtomSet sym = 0;
      for (const auto& [t, caps] : staff) {
        for (const auto& [cap, need] : cts[t].requirements) {
          auto it = caps.find(cap);
          if (it == caps.end() || it->second < need) return;
        }
        sym |= ltlf::AtomSet{1} << gu.index(cts[t].name);
      }
      std::vector<int> gs;
      if (sym == 0) {
        gs.push_back(g);
      } else {
        for (const auto& e : G.out(g))
          if (ltlf::guard_sat(e.guard, sym)) gs.push_back(e.to);
      }
      Key k = key;
      for (std::size_t r = 0; r < n; ++r) {
        if (key[3 * r + 2] == 1) continue;
        k[3 * r] = std::get<0>(opts[r][pick[r]]);
        k[3 * r + 1] = std::get<1>(opts[r][pick[r]]);
      }
      for (int g2 : gs) {
        k[3 * n] = g2;
        relax(k, d + active);
      }
    };
    go(0);
  }
  throw PlanInfeasible("no joint behaviour satisfies every formula");
}

}  // namespace mrtp::execution
