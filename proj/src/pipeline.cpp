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

#include "mrtp/pipeline.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <optional>

#include "mrtp/error.hpp"
#include "mrtp/execution.hpp"

namespace mrtp::pipeline {

using nlohmann::json;

MissionModel build_mission(const scenario::Scenario& s) {
  MissionModel m;
  m.phi = ltlf::parse_ltlf(s.global_spec);
  auto nfa = ltlf::to_nfa(m.phi);
  m.pruned = mission::prune_nfa(nfa, s.catalog(), s.team());
  m.sequence = mission::select_essential_sequence(m.pruned, mission::find_decomposition_states(m.pruned));
  for (std::size_t e = 0; e < m.sequence.size(); ++e) {
    int k = m.sequence.subsequence_of(e);
    int mi = static_cast<int>(e - m.sequence.subsequence_range(k).first) + 1;
    m.order.push_back({k, mi, m.sequence.elements[e]});
  }
  return m;
}

PipelineOptions options_for(const scenario::Scenario& s, PipelineOptions base) {
  if (s.options.seed) base.seed = *s.options.seed;
  if (s.options.budget_seconds) base.budget_seconds = *s.options.budget_seconds;
  return base;
}

namespace {

using Clock = std::chrono::steady_clock;

// Products keyed by robot and assigned task groups; a null entry records
// an infeasible combination.
class ProductCache {
 public:
  ProductCache(const scenario::Scenario& s) : s_(s), grid_(s.grid()) {
    for (const auto& r : s.robots) phi_.emplace(r.id, ltlf::parse_ltlf(s.individual_spec(r.id)));
    for (const auto& t : s.collaborative_tasks) cells_[t.name] = s.cell_id(t.cell);
  }

  struct Entry {
    std::shared_ptr<const localplan::ProductAutomaton> product;
    std::shared_ptr<const adjust::ProductAids> aids;
    localplan::Run run;
  };

  // Null when the combination has no accepting run.
  std::shared_ptr<const Entry> get(int robot, const std::vector<std::vector<std::string>>& groups) {
    std::string key = std::to_string(robot);
    for (const auto& g : groups) {
      key += "|";
      for (const auto& t : g) key += t + ",";
    }
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > 4000) cache_.clear();
    auto labels = s_.individual_labels(robot);
    for (const auto& g : groups)
      for (const auto& t : g) labels[cells_.at(t)].insert(t);
    const auto& start = s_.robot(robot).start;
    auto wts = localplan::wts_from_grid(grid_, s_.cell_id(start), labels);
    auto f = localplan::build_local_formula(phi_.at(robot), groups);
    auto e = std::make_shared<Entry>();
    e->product = std::make_shared<localplan::ProductAutomaton>(wts, ltlf::to_nfa(f));
    try {
      e->run = localplan::shortest_accepting_run(*e->product);
    } catch (const PlanInfeasible&) {
      cache_[key] = nullptr;
      return nullptr;
    }
    std::vector<std::string> tasks;
    for (const auto& g : groups) tasks.insert(tasks.end(), g.begin(), g.end());
    e->aids = std::make_shared<const adjust::ProductAids>(adjust::make_aids(*e->product, tasks));
    cache_[key] = e;
    return e;
  }

 private:
  const scenario::Scenario& s_;
  localplan::Grid grid_;
  std::map<int, ltlf::Formula> phi_;
  std::map<std::string, int> cells_;
  std::map<std::string, std::shared_ptr<const Entry>> cache_;
};

struct Evaluation {
  std::vector<adjust::RobotPlan> plans;
  adjust::AdjustReport report;
  Time initial = 0;
};

std::optional<Evaluation> evaluate(const scenario::Scenario& s, const MissionModel& m,
                                   const allocation::Assignment& a, ProductCache& cache,
                                   const PipelineOptions& o) {
  Evaluation ev;
  for (const auto& r : s.robots) {
    adjust::RobotPlan plan;
    plan.robot = r.id;
    std::vector<std::vector<std::string>> groups(m.sequence.num_subsequences());
    auto it = a.tasks.find(r.id);
    if (it != a.tasks.end())
      for (const auto& ref : it->second) {
        auto inst = m.sequence.task(ref.k, ref.l);
        if (!inst) throw InvariantError("assignment refers to a missing task");
        plan.tasks.push_back(inst->name);
        plan.task_gt.push_back(static_cast<std::size_t>(inst->element - 1));
        groups[static_cast<std::size_t>(ref.k - 1)].push_back(inst->name);
      }
    auto entry = cache.get(r.id, groups);
    if (!entry) return std::nullopt;
    plan.product = entry->product;
    plan.aids = entry->aids;
    plan.run = entry->run;
    ev.plans.push_back(std::move(plan));
  }
  try {
    ev.initial = adjust::time_cost(adjust::make_schedule(m.order, ev.plans)).total;
    if (o.adjust) {
      ev.report = adjust::adjust_plans(ev.plans, m.order, {o.seed, 100000});
    } else {
      ev.report.initial = adjust::time_cost(adjust::make_schedule(m.order, ev.plans));
      ev.report.final = ev.report.initial;
    }
  } catch (const MissingCollaborativeState&) {
    return std::nullopt;
  }
  return ev;
}

Solution make_solution(const MissionModel& m, const allocation::Assignment& a, Evaluation ev) {
  Solution sol;
  sol.assignment = a;
  sol.mission = m;
  for (const auto& p : ev.plans) {
    RobotSolution r;
    r.robot = p.robot;
    r.tasks = p.tasks;
    r.task_gt = p.task_gt;
    r.run = p.run;
    r.plan = localplan::make_plan(*p.product, p.run, localplan::arrival_times(*p.product, p.run, p.tasks));
    sol.robots.push_back(std::move(r));
  }
  sol.cost = ev.report.final;
  sol.initial = ev.initial;
  sol.adjustment = std::move(ev.report);
  return sol;
}

// Verification gate: simulate, check the four conditions and the per-robot
// time identity.
void gate(const scenario::Scenario& s, const Solution& sol) {
  auto plans = execution::exec_plans(sol);
  auto trace = execution::simulate_execution(s, sol.mission.sequence, plans);
  auto report = execution::verify_solution(s, sol.mission, plans, trace);
  if (!report.ok()) {
    std::string why;
    for (const auto& p : report.problems) why += "; " + p;
    throw InvariantError("planned solution failed verification" + why);
  }
  for (const auto& t : trace.robots)
    if (t.finish != sol.cost.colla.at(t.robot))
      throw InvariantError("simulated finish time differs from the time cost of robot " +
                           std::to_string(t.robot));
}

}  // namespace

Solution run_pipeline(const scenario::Scenario& s, const PipelineOptions& o) {
  auto t0 = Clock::now();
  auto elapsed = [&t0] { return std::chrono::duration<double>(Clock::now() - t0).count(); };
  scenario::validate(s);
  MissionModel m = build_mission(s);
  allocation::AssignmentStream stream(
      allocation::build_model(m.sequence, s.team(), s.catalog(), s.options.comm_pairs));
  ProductCache cache(s);

  std::optional<Solution> best;
  SolverStats stats;
  stats.variables = stream.stats().variables;
  stats.clauses = stream.stats().clauses;
  std::optional<Time> best_initial;
  bool any_model = false;

  while (true) {
    if (o.max_assignments > 0 && stats.evaluated >= o.max_assignments) break;
    if (elapsed() > o.budget_seconds) {
      stats.budget_exhausted = true;
      break;
    }
    std::optional<allocation::Assignment> a;
    if (o.lazy_filter) {
      a = stream.next_undominated();
    } else {
      a = stream.next();
      if (a) stream.block_supersets(*a);
    }
    if (!a) break;
    any_model = true;
    ++stats.evaluated;
    auto ev = evaluate(s, m, *a, cache, o);
    if (!ev) {
      ++stats.skipped;
      continue;
    }
    if (!best_initial || ev->initial < *best_initial) best_initial = ev->initial;
    if (!best || ev->report.final.total < best->cost.total) {
      Solution cand = make_solution(m, *a, std::move(*ev));
      gate(s, cand);
      best = std::move(cand);
    }
    stats.trajectory.push_back({stats.evaluated, best->cost.total});
  }
  stats.filtered = stream.stats().filtered;
  stats.t_cal = elapsed();

  if (!best) {
    if (stats.budget_exhausted) throw BudgetExhausted("time budget exhausted before any solution was found");
    if (!any_model)
      throw AllocationInfeasible("the allocation model has no satisfying assignment");
    throw PlanInfeasible("no assignment admits accepting local plans for every robot (" +
                         std::to_string(stats.skipped) + " skipped)");
  }
  best->best_initial = *best_initial;
  best->stats = std::move(stats);
  return std::move(*best);
}

json to_json(const Solution& sol, const scenario::Scenario& s) {
  auto grid = s.grid();
  json j;
  j["T_colla"] = sol.cost.total;
  j["T_colla_init"] = sol.initial;
  j["T_colla_best_unadjusted"] = sol.best_initial;
  j["assignment"] = allocation::to_json(sol.assignment);
  j["sequence"] = mission::to_json(sol.mission.sequence);
  j["task_times"] = json::array();
  for (std::size_t g = 0; g < sol.mission.order.size(); ++g)
    j["task_times"].push_back({{"element", sol.mission.order[g].label()},
                               {"k", sol.mission.order[g].k},
                               {"m", sol.mission.order[g].m},
                               {"time", sol.cost.task_time.at(g)}});
  j["robots"] = json::array();
  for (const auto& r : sol.robots)
    j["robots"].push_back({{"id", r.robot},
                           {"tasks", r.tasks},
                           {"T_indiv", r.run.cost},
                           {"delay", sol.cost.delay.at(r.robot)},
                           {"T_colla", sol.cost.colla.at(r.robot)},
                           {"plan", localplan::to_json(r.plan, grid)}});
  const auto& st = sol.stats;
  j["stats"] = {{"assignments_evaluated", st.evaluated},
                {"assignments_filtered", st.filtered},
                {"assignments_skipped", st.skipped},
                {"variables", st.variables},
                {"clauses", st.clauses},
                {"t_cal", st.t_cal},
                {"budget_exhausted", st.budget_exhausted},
                {"trajectory", json::array()}};
  for (const auto& [n, t] : st.trajectory) j["stats"]["trajectory"].push_back({n, t});
  json log = json::array();
  for (const auto& e : sol.adjustment.log) log.push_back(adjust::to_json(e));
  json messages = json::array();
  for (const auto& m : sol.adjustment.transcript)
    messages.push_back({{"sender", m.sender}, {"task", m.task}, {"arrival", m.arrival}});
  j["adjust"] = {{"passes", sol.adjustment.passes},
                 {"accepted", sol.adjustment.accepted},
                 {"log", log},
                 {"messages", messages}};
  return j;
}

}  // namespace mrtp::pipeline
