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

#include "mrtp/localplan.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <tuple>

#include "mrtp/error.hpp"

namespace mrtp::localplan {

using ltlf::AtomSet;

Grid::Grid(int width, int height, const std::vector<std::pair<int, int>>& blocked,
           const std::map<std::pair<int, int>, Time>& costs)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw InvariantError("grid dimensions must be positive");
  blocked_.assign(static_cast<std::size_t>(size()), 0);
  cost_.assign(static_cast<std::size_t>(size()), 1);
  for (const auto& [x, y] : blocked) {
    if (!in_bounds(x, y)) throw InvariantError("blocked cell outside the grid");
    blocked_[id(x, y)] = 1;
  }
  for (const auto& [xy, c] : costs) {
    if (!in_bounds(xy.first, xy.second)) throw InvariantError("cost cell outside the grid");
    if (c <= 0) throw InvariantError("cell costs must be positive");
    cost_[id(xy.first, xy.second)] = c;
  }
}

std::vector<int> Grid::neighbors(int c) const {
  static const int dx[] = {-1, 1, 0, 0};
  static const int dy[] = {0, 0, -1, 1};
  std::vector<int> out;
  for (int d = 0; d < 4; ++d) {
    int nx = x(c) + dx[d], ny = y(c) + dy[d];
    if (in_bounds(nx, ny) && !blocked(id(nx, ny))) out.push_back(id(nx, ny));
  }
  return out;
}

bool Grid::connected() const {
  int start = -1, free = 0;
  for (int c = 0; c < size(); ++c)
    if (!blocked(c)) {
      ++free;
      if (start < 0) start = c;
    }
  if (start < 0) return true;
  std::vector<char> seen(static_cast<std::size_t>(size()), 0);
  std::deque<int> q{start};
  seen[start] = 1;
  int count = 0;
  while (!q.empty()) {
    int c = q.front();
    q.pop_front();
    ++count;
    for (int n : neighbors(c))
      if (!seen[n]) {
        seen[n] = 1;
        q.push_back(n);
      }
  }
  return count == free;
}

WeightedTransitionSystem::WeightedTransitionSystem(std::size_t num_regions, int initial)
    : initial_(initial), out_(num_regions), labels_(num_regions) {
  if (initial < 0 || static_cast<std::size_t>(initial) >= num_regions)
    throw InvariantError("initial region out of range");
}

std::optional<Time> WeightedTransitionSystem::weight(int r, int r2) const {
  for (const auto& e : out_[r])
    if (e.to == r2) return e.weight;
  return std::nullopt;
}

void WeightedTransitionSystem::add_transition(int from, int to, Time weight) {
  if (weight <= 0) throw InvariantError("transition weights must be positive");
  if (from == to && weight != 1) throw InvariantError("self-loops weigh one time unit");
  for (auto& e : out_[from])
    if (e.to == to) {
      e.weight = weight;
      return;
    }
  out_[from].push_back({to, weight});
}

WeightedTransitionSystem wts_from_grid(const Grid& grid, int start,
                                       const std::map<int, std::set<std::string>>& labels) {
  if (start < 0 || start >= grid.size() || grid.blocked(start))
    throw InvariantError("start cell must be a free grid cell");
  WeightedTransitionSystem w(static_cast<std::size_t>(grid.size()), start);
  for (int c = 0; c < grid.size(); ++c) {
    if (grid.blocked(c)) continue;
    w.add_transition(c, c, 1);
    for (int n : grid.neighbors(c)) w.add_transition(c, n, grid.cost(n));
  }
  for (const auto& [c, atoms] : labels) {
    if (c < 0 || c >= grid.size() || grid.blocked(c))
      throw InvariantError("label on a blocked or missing cell");
    for (const auto& a : atoms) w.add_label(c, a);
  }
  return w;
}

ltlf::Formula build_local_formula(const ltlf::Formula& phi,
                                  const std::vector<std::vector<std::string>>& groups) {
  using ltlf::Formula;
  std::optional<Formula> tail;  // phi^{k+1}
  for (auto g = groups.rbegin(); g != groups.rend(); ++g) {
    if (g->empty()) continue;
    // Innermost task first: t_last (& F tail), then wrap the earlier ones.
    Formula inner = Formula::Atom(g->back());
    if (tail) inner = Formula::And(inner, Formula::Eventually(*tail));
    Formula chain = Formula::Eventually(inner);
    for (auto t = g->rbegin() + 1; t != g->rend(); ++t)
      chain = Formula::Eventually(Formula::And(Formula::Atom(*t), chain));
    tail = chain;
  }
  return tail ? Formula::And(phi, *tail) : phi;
}

ProductAutomaton::ProductAutomaton(WeightedTransitionSystem wts, ltlf::Nfa nfa)
    : wts_(std::move(wts)), nfa_(std::move(nfa)) {
  const auto& u = nfa_.universe();
  region_label_.resize(wts_.num_regions());
  for (std::size_t r = 0; r < wts_.num_regions(); ++r)
    region_label_[r] = u.mask(wts_.label(static_cast<int>(r)));

  auto intern = [this](int r, int s) {
    auto [it, fresh] = index_.emplace(std::make_pair(r, s), static_cast<int>(states_.size()));
    if (fresh) {
      states_.push_back({r, s});
      out_.emplace_back();
    }
    return it->second;
  };
  std::deque<int> queue;
  for (int s : nfa_.initial()) {
    std::size_t before = states_.size();
    int id = intern(wts_.initial(), s);
    initial_.push_back(id);
    if (states_.size() > before) queue.push_back(id);
  }
  std::sort(initial_.begin(), initial_.end());
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    auto [r, s] = states_[id];
    AtomSet l = region_label_[r];
    std::vector<ProductEdge> edges;
    for (const auto& e : nfa_.out(s)) {
      if (!ltlf::guard_sat(e.guard, l)) continue;
      for (const auto& m : wts_.out(r)) {
        std::size_t before = states_.size();
        int to = intern(m.to, e.to);
        if (states_.size() > before) queue.push_back(to);
        edges.push_back({to, m.weight});
      }
    }
    out_[id] = std::move(edges);
  }
  in_.assign(states_.size(), {});
  for (std::size_t id = 0; id < states_.size(); ++id)
    for (const auto& e : out_[id]) in_[e.to].push_back({static_cast<int>(id), e.weight});
}

int ProductAutomaton::id_of(int region, int nfa_state) const {
  auto it = index_.find({region, nfa_state});
  return it == index_.end() ? -1 : it->second;
}

bool ProductAutomaton::performs(int from, int to, const std::string& task) const {
  int bit = nfa_.universe().index(task);
  if (bit < 0) return false;
  AtomSet mask = AtomSet{1} << bit;
  AtomSet l = label(from);
  if ((l & mask) == 0) return false;
  int s = nfa_state(from), s2 = nfa_state(to);
  if (s == s2) return false;
  const ltlf::Guard* g = nfa_.guard(s, s2);
  return g != nullptr && ltlf::guard_sat(*g, l) && !ltlf::guard_sat(*g, l & ~mask);
}

Time run_cost(const ProductAutomaton& p, const std::vector<int>& states) {
  Time total = 0;
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    auto w = p.wts().weight(p.region(states[i]), p.region(states[i + 1]));
    if (!w) throw InvariantError("run uses a missing transition");
    total += *w;
  }
  return total;
}

namespace {

// (weight, hops, id) ordered search from several sources; stops at the
// first settled state satisfying `goal`.
template <class Goal>
std::optional<std::vector<int>> dijkstra(const ProductAutomaton& p,
                                         const std::vector<int>& sources, Goal goal) {
  using Key = std::tuple<Time, std::size_t, int>;
  const std::size_t n = p.num_states();
  std::vector<Time> dist(n, -1);
  std::vector<std::size_t> hops(n, 0);
  std::vector<int> pred(n, -1);
  std::vector<char> done(n, 0);
  std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
  for (int s : sources) {
    dist[s] = 0;
    pq.push({0, 0, s});
  }
  while (!pq.empty()) {
    auto [d, h, id] = pq.top();
    pq.pop();
    if (done[id]) continue;
    done[id] = 1;
    if (goal(id)) {
      std::vector<int> path;
      for (int x = id; x >= 0; x = pred[x]) path.push_back(x);
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (const auto& e : p.out(id)) {
      Time nd = d + e.weight;
      std::size_t nh = h + 1;
      if (done[e.to]) continue;
      if (dist[e.to] < 0 || std::tie(nd, nh) < std::tie(dist[e.to], hops[e.to])) {
        dist[e.to] = nd;
        hops[e.to] = nh;
        pred[e.to] = id;
        pq.push({nd, nh, e.to});
      }
    }
  }
  return std::nullopt;
}

}  // namespace

Run shortest_accepting_run(const ProductAutomaton& p) {
  auto path = dijkstra(p, p.initial(), [&p](int id) { return p.is_accepting(id); });
  if (!path) throw PlanInfeasible("no accepting state is reachable in the product automaton");
  Run run;
  run.states = std::move(*path);
  run.cost = run_cost(p, run.states);
  return run;
}

std::optional<std::vector<int>> shortest_path(const ProductAutomaton& p, int from, int to) {
  return dijkstra(p, {from}, [to](int id) { return id == to; });
}

std::vector<int> PathTree::path_to(int id) const {
  std::vector<int> out;
  if (dist[id] < 0) return out;
  for (int x = id; x >= 0; x = pred[x]) out.push_back(x);
  std::reverse(out.begin(), out.end());
  return out;
}

PathTree shortest_tree(const ProductAutomaton& p, int source, Time limit) {
  using Key = std::tuple<Time, std::size_t, int>;
  const std::size_t n = p.num_states();
  PathTree t;
  t.dist.assign(n, -1);
  t.pred.assign(n, -1);
  std::vector<std::size_t> hops(n, 0);
  std::vector<char> done(n, 0);
  std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
  t.dist[source] = 0;
  pq.push({0, 0, source});
  while (!pq.empty()) {
    auto [d, h, id] = pq.top();
    pq.pop();
    if (done[id]) continue;
    done[id] = 1;
    for (const auto& e : p.out(id)) {
      Time nd = d + e.weight;
      std::size_t nh = h + 1;
      if (done[e.to] || (limit >= 0 && nd > limit)) continue;
      if (t.dist[e.to] < 0 || std::tie(nd, nh) < std::tie(t.dist[e.to], hops[e.to])) {
        t.dist[e.to] = nd;
        hops[e.to] = nh;
        t.pred[e.to] = id;
        pq.push({nd, nh, e.to});
      }
    }
  }
  return t;
}

std::vector<int> AcceptTree::path_from(int id) const {
  std::vector<int> out;
  if (dist[id] < 0) return out;
  for (int x = id; x >= 0; x = next[x]) out.push_back(x);
  return out;
}

AcceptTree accept_tree(const ProductAutomaton& p) {
  using Key = std::tuple<Time, std::size_t, int>;
  const std::size_t n = p.num_states();
  AcceptTree t;
  t.dist.assign(n, -1);
  t.next.assign(n, -1);
  std::vector<std::size_t> hops(n, 0);
  std::vector<char> done(n, 0);
  std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
  for (std::size_t id = 0; id < n; ++id)
    if (p.is_accepting(static_cast<int>(id))) {
      t.dist[id] = 0;
      pq.push({0, 0, static_cast<int>(id)});
    }
  while (!pq.empty()) {
    auto [d, h, id] = pq.top();
    pq.pop();
    if (done[id]) continue;
    done[id] = 1;
    for (const auto& e : p.in(id)) {
      Time nd = d + e.weight;
      std::size_t nh = h + 1;
      if (done[e.to]) continue;
      if (t.dist[e.to] < 0 || std::tie(nd, nh) < std::tie(t.dist[e.to], hops[e.to])) {
        t.dist[e.to] = nd;
        hops[e.to] = nh;
        t.next[e.to] = id;
        pq.push({nd, nh, e.to});
      }
    }
  }
  return t;
}

std::vector<int> collaborative_states(const ProductAutomaton& p, const std::string& task) {
  std::vector<int> out;
  for (std::size_t id = 0; id < p.num_states(); ++id) {
    int s = static_cast<int>(id);
    for (const auto& e : p.out(s))
      if (p.performs(s, e.to, task)) {
        out.push_back(s);
        break;
      }
  }
  return out;
}

std::vector<Visit> arrival_times(const ProductAutomaton& p, const Run& run,
                                 const std::vector<std::string>& tasks) {
  std::vector<Visit> out;
  std::size_t j = 0;
  Time t = 0;
  for (const auto& task : tasks) {
    bool found = false;
    for (; j + 1 < run.states.size(); ++j) {
      if (p.performs(run.states[j], run.states[j + 1], task)) {
        out.push_back({task, j, t});
        found = true;
        break;
      }
      t += *p.wts().weight(p.region(run.states[j]), p.region(run.states[j + 1]));
    }
    if (!found)
      throw MissingCollaborativeState("the run never performs collaborative task " + task);
    // The next task must be performed strictly later.
    t += *p.wts().weight(p.region(run.states[j]), p.region(run.states[j + 1]));
    ++j;
  }
  return out;
}

std::vector<PlanStep> make_plan(const ProductAutomaton& p, const Run& run,
                                const std::vector<Visit>& visits) {
  std::vector<PlanStep> plan;
  Time t = 0;
  for (std::size_t i = 0; i < run.states.size(); ++i) {
    if (i > 0) t += *p.wts().weight(p.region(run.states[i - 1]), p.region(run.states[i]));
    PlanStep step{p.region(run.states[i]), t, std::nullopt};
    for (const auto& v : visits)
      if (v.index == i) step.performs = v.task;
    plan.push_back(step);
  }
  return plan;
}

nlohmann::json to_json(const std::vector<PlanStep>& plan, const Grid& grid) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : plan)
    out.push_back({{"region", {grid.x(s.region), grid.y(s.region)}},
                   {"cumulative_time", s.time},
                   {"performs", s.performs ? nlohmann::json(*s.performs) : nlohmann::json()}});
  return out;
}

}  // namespace mrtp::localplan
