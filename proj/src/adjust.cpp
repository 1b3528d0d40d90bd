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

#include "mrtp/adjust.hpp"

#include <algorithm>
#include <tuple>

#include "mrtp/error.hpp"

namespace mrtp::adjust {

using localplan::Run;

std::string GeneralizedTask::label() const {
  std::string s;
  for (const auto& t : tasks) s += (s.empty() ? "" : "+") + t;
  return s;
}

void Schedule::validate() const {
  if (participants.size() != order.size())
    throw InvariantError("participant list does not match the task order");
  for (std::size_t g = 0; g < order.size(); ++g) {
    if (participants[g].empty())
      throw InvariantError("generalized task " + order[g].label() + " has no participant");
    for (int i : participants[g]) {
      auto it = arrival.find(i);
      if (it == arrival.end() || it->second.count(g) == 0)
        throw InvariantError("robot " + std::to_string(i) + " has no arrival for " +
                             order[g].label());
    }
  }
}

TimeCostReport time_cost(const Schedule& schedule) {
  schedule.validate();
  TimeCostReport r;
  for (const auto& [i, t] : schedule.indiv) r.delay[i] = 0;
  for (const auto& [i, a] : schedule.arrival) r.delay.try_emplace(i, 0);
  for (std::size_t g = 0; g < schedule.order.size(); ++g) {
    std::map<int, Time> before;
    Time t = 0;
    bool first = true;
    for (int i : schedule.participants[g]) {
      before[i] = r.delay[i];
      Time eff = schedule.arrival.at(i).at(g) + r.delay[i];
      if (first || eff > t) t = eff;
      first = false;
    }
    for (int i : schedule.participants[g]) r.delay[i] = t - schedule.arrival.at(i).at(g);
    r.task_time.push_back(t);
    r.delay_before.push_back(std::move(before));
  }
  for (const auto& [i, d] : r.delay) {
    auto it = schedule.indiv.find(i);
    Time c = (it == schedule.indiv.end() ? 0 : it->second) + d;
    r.colla[i] = c;
    r.total += c;
  }
  return r;
}

Schedule MessageBus::board(const std::vector<GeneralizedTask>& order) const {
  Schedule s;
  s.order = order;
  s.participants.resize(order.size());
  for (const auto& m : transcript_) {
    if (m.task >= order.size()) throw InvariantError("message for an unknown task");
    s.arrival[m.sender][m.task] = m.arrival;
  }
  for (const auto& [i, a] : s.arrival)
    for (const auto& [g, t] : a) s.participants[g].push_back(i);
  return s;
}

namespace {

std::vector<localplan::Visit> visits_of(const RobotPlan& p) {
  return localplan::arrival_times(*p.product, p.run, p.tasks);
}

void check_plan(const RobotPlan& p, std::size_t num_tasks) {
  if (!p.product) throw InvariantError("robot plan without a product automaton");
  if (p.tasks.size() != p.task_gt.size())
    throw InvariantError("task and order index lists differ in length");
  for (std::size_t x = 0; x < p.task_gt.size(); ++x) {
    if (p.task_gt[x] >= num_tasks) throw InvariantError("order index out of range");
    if (x > 0 && p.task_gt[x] <= p.task_gt[x - 1])
      throw InvariantError("a robot's tasks must follow the task order");
  }
}

void fill_robot(Schedule& s, const RobotPlan& p, const std::vector<localplan::Visit>& v) {
  auto& a = s.arrival[p.robot];
  a.clear();
  for (std::size_t x = 0; x < v.size(); ++x) a[p.task_gt[x]] = v[x].time;
  s.indiv[p.robot] = p.run.cost;
}

}  // namespace

Schedule make_schedule(const std::vector<GeneralizedTask>& order,
                       const std::vector<RobotPlan>& plans) {
  Schedule s;
  s.order = order;
  s.participants.resize(order.size());
  for (const auto& p : plans) {
    check_plan(p, order.size());
    fill_robot(s, p, visits_of(p));
    for (std::size_t g : p.task_gt) s.participants[g].push_back(p.robot);
  }
  for (auto& ps : s.participants) std::sort(ps.begin(), ps.end());
  s.validate();
  return s;
}

ProductAids make_aids(const localplan::ProductAutomaton& p, const std::vector<std::string>& tasks) {
  ProductAids a;
  a.tree = localplan::accept_tree(p);
  for (const auto& t : tasks) a.collaborative[t] = localplan::collaborative_states(p, t);
  return a;
}

std::optional<Run> opt_time(const RobotPlan& plan, std::size_t gt, bool is_max,
                            const Schedule& board, std::mt19937_64& rng, const ProductAids& aids) {
  const auto& p = *plan.product;
  auto pos = std::find(plan.task_gt.begin(), plan.task_gt.end(), gt);
  if (pos == plan.task_gt.end()) throw InvariantError("robot does not take part in the task");
  const std::size_t idx = static_cast<std::size_t>(pos - plan.task_gt.begin());
  const std::string& ct = plan.tasks[idx];

  auto visits = visits_of(plan);
  TimeCostReport base = time_cost(board);
  const Time t_ct = base.task_time[gt];
  const Time t_i = board.arrival.at(plan.robot).at(gt);
  const Time waited = base.delay_before[gt].at(plan.robot);

  // Keep the run up to and including the step that performs the previous
  // task.
  std::vector<int> prefix;
  if (idx == 0) {
    prefix.push_back(plan.run.states.front());
  } else {
    std::size_t end = visits[idx - 1].index + 1;
    prefix.assign(plan.run.states.begin(), plan.run.states.begin() + end + 1);
  }
  const Time prefix_time = localplan::run_cost(p, prefix);
  // Condition 1 bounds how far q may be from the end of the prefix.
  const Time slack = waited + prefix_time;
  const Time reach = is_max ? t_i - 1 - slack : t_ct - slack;
  if (reach < 0) return std::nullopt;
  auto from = localplan::shortest_tree(p, prefix.back(), reach);

  auto found = aids.collaborative.find(ct);
  std::vector<int> candidates =
      found != aids.collaborative.end() ? found->second : localplan::collaborative_states(p, ct);
  int current = plan.run.states[visits[idx].index];
  candidates.erase(std::remove(candidates.begin(), candidates.end(), current), candidates.end());
  for (std::size_t x = candidates.size(); x > 1; --x)
    std::swap(candidates[x - 1], candidates[rng() % x]);

  for (int q : candidates) {
    if (from.dist[q] < 0) continue;
    Time eff = slack + from.dist[q];
    bool cond1 = is_max ? eff < t_i : (t_i < eff && eff <= t_ct);
    if (!cond1) continue;
    // The step out of q must perform ct.
    int next = -1;
    Time best = 0;
    for (const auto& e : p.out(q)) {
      if (aids.tree.dist[e.to] < 0 || !p.performs(q, e.to, ct)) continue;
      Time c = e.weight + aids.tree.dist[e.to];
      if (next < 0 || std::tie(c, e.to) < std::tie(best, next)) {
        next = e.to;
        best = c;
      }
    }
    if (next < 0) continue;
    Run cand;
    cand.states = prefix;
    auto mid = from.path_to(q);
    cand.states.insert(cand.states.end(), mid.begin() + 1, mid.end());
    const std::size_t at_q = cand.states.size() - 1;
    auto tail = aids.tree.path_from(next);
    cand.states.insert(cand.states.end(), tail.begin(), tail.end());
    cand.cost = localplan::run_cost(p, cand.states);

    RobotPlan alt = plan;
    alt.run = cand;
    std::vector<localplan::Visit> v2;
    try {
      v2 = visits_of(alt);
    } catch (const MissingCollaborativeState&) {
      continue;
    }
    // ct has to be performed at q, not earlier on the way.
    if (v2[idx].index != at_q) continue;
    Schedule s2 = board;
    fill_robot(s2, alt, v2);
    if (time_cost(s2).total < base.total) return cand;
  }
  return std::nullopt;
}

nlohmann::json to_json(const AdjustLogEntry& e) {
  return {{"pass", e.pass},
          {"task", e.task},
          {"robot", e.robot},
          {"mode", e.is_max ? "latest" : "earliest"},
          {"accepted", e.accepted},
          {"T_colla_before", e.before},
          {"T_colla_after", e.after}};
}

namespace {

// One robot's side of the protocol: private plan, public timing messages.
class Agent {
 public:
  explicit Agent(RobotPlan plan) : plan_(std::move(plan)) {
    if (!plan_.aids) plan_.aids = std::make_shared<const ProductAids>(make_aids(*plan_.product, plan_.tasks));
  }

  int id() const { return plan_.robot; }
  const RobotPlan& plan() const { return plan_; }

  void announce(MessageBus& bus) const {
    auto v = visits_of(plan_);
    for (std::size_t x = 0; x < v.size(); ++x) bus.publish({plan_.robot, plan_.task_gt[x], v[x].time});
  }

  bool try_adjust(std::size_t gt, bool is_max, const Schedule& board, std::mt19937_64& rng) {
    Schedule mine = board;
    mine.indiv[plan_.robot] = plan_.run.cost;
    auto run = opt_time(plan_, gt, is_max, mine, rng, *plan_.aids);
    if (!run) return false;
    plan_.run = std::move(*run);
    return true;
  }

 private:
  RobotPlan plan_;
};

}  // namespace

AdjustReport adjust_plans(std::vector<RobotPlan>& plans, const std::vector<GeneralizedTask>& order,
                          const AdjustOptions& options) {
  AdjustReport report;
  report.initial = time_cost(make_schedule(order, plans));
  std::vector<Agent> agents;
  for (const auto& p : plans) agents.emplace_back(p);
  std::map<int, std::size_t> by_id;
  for (std::size_t x = 0; x < agents.size(); ++x) by_id[agents[x].id()] = x;

  auto total_now = [&] {
    std::vector<RobotPlan> cur;
    for (const auto& a : agents) cur.push_back(a.plan());
    return time_cost(make_schedule(order, cur)).total;
  };

  MessageBus bus;
  for (const auto& a : agents) a.announce(bus);
  std::mt19937_64 rng(options.seed);
  Time total = report.initial.total;

  for (std::size_t pass = 1; pass <= options.max_passes; ++pass) {
    report.passes = pass;
    std::size_t count = 0;
    for (std::size_t g = 0; g < order.size(); ++g) {
      Schedule board = bus.board(order);
      TimeCostReport tc = time_cost(board);
      // Effective arrival before any waiting at g; ties go to the lower id.
      int latest = -1, earliest = -1;
      Time hi = 0, lo = 0;
      for (int i : board.participants[g]) {
        Time e = tc.delay_before[g].at(i) + board.arrival.at(i).at(g);
        if (latest < 0 || e > hi) latest = i, hi = e;
        if (earliest < 0 || e < lo) earliest = i, lo = e;
      }
      for (bool is_max : {true, false}) {
        int who = is_max ? latest : earliest;
        Agent& a = agents[by_id.at(who)];
        bool ok = a.try_adjust(g, is_max, board, rng);
        Time after = total;
        if (ok) {
          a.announce(bus);
          after = total_now();
          if (after >= total) throw InvariantError("accepted adjustment did not reduce the cost");
          ++count;
        }
        report.log.push_back({pass, order[g].label(), who, is_max, ok, total, after});
        total = after;
        if (ok) break;
      }
    }
    report.accepted += count;
    if (count == 0) break;
  }

  for (std::size_t x = 0; x < plans.size(); ++x) plans[x] = agents[x].plan();
  report.final = time_cost(make_schedule(order, plans));
  report.transcript = bus.transcript();
  return report;
}

}  // namespace mrtp::adjust
