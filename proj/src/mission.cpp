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

#include "mrtp/mission.hpp"

#include <algorithm>
#include <bit>
#include <queue>
#include <tuple>

#include "mrtp/error.hpp"

namespace mrtp::mission {

using ltlf::AtomSet;
using ltlf::Guard;
using ltlf::Nfa;

TeamModel::TeamModel(std::vector<RobotInfo> robots) : robots_(std::move(robots)) {
  std::sort(robots_.begin(), robots_.end(),
            [](const RobotInfo& a, const RobotInfo& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    if (i > 0 && robots_[i].id == robots_[i - 1].id)
      throw InvariantError("duplicate robot id " + std::to_string(robots_[i].id));
    if (robots_[i].capability.empty())
      throw InvariantError("robot " + std::to_string(robots_[i].id) +
                           " has no capability");
    groups_[robots_[i].capability].push_back(robots_[i].id);
  }
}

std::vector<int> TeamModel::ids() const {
  std::vector<int> out;
  for (const auto& r : robots_) out.push_back(r.id);
  return out;
}

const Capability& TeamModel::capability_of(int robot) const {
  for (const auto& r : robots_)
    if (r.id == robot) return r.capability;
  throw InvariantError("unknown robot " + std::to_string(robot));
}

const std::vector<int>& TeamModel::group(const Capability& c) const {
  static const std::vector<int> kEmpty;
  auto it = groups_.find(c);
  return it == groups_.end() ? kEmpty : it->second;
}

std::set<Capability> TeamModel::capabilities() const {
  std::set<Capability> out;
  for (const auto& [c, _] : groups_) out.insert(c);
  return out;
}

bool simultaneously_feasible(const std::set<std::string>& tasks,
                             const TaskCatalog& catalog, const TeamModel& team) {
  std::map<Capability, long> demand;
  for (const auto& t : tasks) {
    auto it = catalog.find(t);
    if (it == catalog.end()) throw InvariantError("unknown collaborative task " + t);
    for (const auto& [cap, count] : it->second.requirements) demand[cap] += count;
  }
  for (const auto& [cap, total] : demand)
    if (total > static_cast<long>(team.group_size(cap))) return false;
  return true;
}

Nfa prune_nfa(const Nfa& nfa, const TaskCatalog& catalog, const TeamModel& team) {
  const auto& u = nfa.universe();
  // Feasibility depends only on the positive part of a cube; memoize it.
  std::map<AtomSet, bool> memo;
  auto feasible = [&](AtomSet pos) {
    auto it = memo.find(pos);
    if (it != memo.end()) return it->second;
    bool ok = simultaneously_feasible(u.names_of(pos), catalog, team);
    memo.emplace(pos, ok);
    return ok;
  };

  Nfa out(u, nfa.num_states());
  for (int q : nfa.initial()) out.add_initial(q);
  for (std::size_t q = 0; q < nfa.num_states(); ++q) {
    int s = static_cast<int>(q);
    out.set_accepting(s, nfa.is_accepting(s));
    out.set_label(s, nfa.label(s));
    for (const auto& e : nfa.out(s)) {
      std::vector<ltlf::Cube> kept;
      for (const auto& c : e.guard.cubes())
        if (feasible(c.pos)) kept.push_back(c);
      if (!kept.empty()) out.add_transition(s, e.to, Guard(std::move(kept)));
    }
  }

  auto reach = out.reachable();
  bool any = false;
  for (std::size_t q = 0; q < out.num_states(); ++q)
    any = any || (reach[q] && out.is_accepting(static_cast<int>(q)));
  if (!any)
    throw SpecInfeasible("no accepting state is reachable once transitions the team "
                         "cannot staff are removed");
  return out;
}

DecompositionStates find_decomposition_states(const Nfa& nfa) {
  auto reach = nfa.reachable();
  auto coreach = nfa.coreachable();
  DecompositionStates out;
  for (std::size_t q = 0; q < nfa.num_states(); ++q) {
    int s = static_cast<int>(q);
    if (!reach[q] || !coreach[q]) continue;
    const Guard* self = nfa.guard(s, s);
    if (self != nullptr && ltlf::guard_sat(*self, 0)) out.push_back(s);
  }
  return out;
}

std::pair<std::size_t, std::size_t> EssentialSequence::subsequence_range(int k) const {
  if (k < 1 || k > static_cast<int>(boundaries.size()))
    throw InvariantError("subsequence index out of range");
  std::size_t begin = boundaries[k - 1];
  std::size_t end = k == static_cast<int>(boundaries.size()) ? elements.size()
                                                             : boundaries[k];
  return {begin, end};
}

int EssentialSequence::subsequence_of(std::size_t element) const {
  auto it = std::upper_bound(boundaries.begin(), boundaries.end(), element);
  return static_cast<int>(it - boundaries.begin());
}

std::vector<TaskInstance> EssentialSequence::tasks() const {
  std::vector<TaskInstance> out;
  for (int k = 1; k <= static_cast<int>(num_subsequences()); ++k) {
    auto [begin, end] = subsequence_range(k);
    int l = 0;
    for (std::size_t e = begin; e < end; ++e) {
      int j = 0;
      for (const auto& name : elements[e]) {
        TaskInstance t;
        t.k = k;
        t.l = ++l;
        t.m = static_cast<int>(e - begin) + 1;
        t.j = ++j;
        t.element = static_cast<int>(e) + 1;
        t.name = name;
        out.push_back(std::move(t));
      }
    }
  }
  return out;
}

std::optional<TaskInstance> EssentialSequence::task(int k, int l) const {
  for (auto& t : tasks())
    if (t.k == k && t.l == l) return t;
  return std::nullopt;
}

namespace {

using StateSet = std::vector<char>;

StateSet post(const Nfa& nfa, const StateSet& from, AtomSet symbol) {
  StateSet to(nfa.num_states(), 0);
  for (std::size_t q = 0; q < from.size(); ++q) {
    if (!from[q]) continue;
    for (const auto& e : nfa.out(static_cast<int>(q)))
      if (ltlf::guard_sat(e.guard, symbol)) to[e.to] = 1;
  }
  return to;
}

class InterleavingAudit {
 public:
  InterleavingAudit(const Nfa& nfa, const std::vector<std::vector<AtomSet>>& parts,
                    std::size_t cap)
      : nfa_(nfa), parts_(parts), cap_(cap) {}

  InterleavingResult run() {
    StateSet start(nfa_.num_states(), 0);
    for (int q : nfa_.initial()) start[q] = 1;
    std::vector<std::size_t> pos(parts_.size(), 0);
    try {
      return visit(pos, start) ? InterleavingResult::kAllAccepted
                               : InterleavingResult::kRejected;
    } catch (const TooMany&) {
      return InterleavingResult::kTooMany;
    }
  }

 private:
  struct TooMany {};

  bool visit(std::vector<std::size_t>& pos, const StateSet& states) {
    if (!seen_.emplace(pos, states).second) return true;
    if (seen_.size() > cap_) throw TooMany{};
    bool done = true;
    for (std::size_t p = 0; p < parts_.size(); ++p) {
      if (pos[p] == parts_[p].size()) continue;
      done = false;
      StateSet next = post(nfa_, states, parts_[p][pos[p]]);
      if (std::none_of(next.begin(), next.end(), [](char c) { return c != 0; }))
        return false;
      ++pos[p];
      bool ok = visit(pos, next);
      --pos[p];
      if (!ok) return false;
    }
    if (!done) return true;
    for (std::size_t q = 0; q < states.size(); ++q)
      if (states[q] && nfa_.is_accepting(static_cast<int>(q))) return true;
    return false;
  }

  const Nfa& nfa_;
  const std::vector<std::vector<AtomSet>>& parts_;
  std::size_t cap_;
  std::set<std::pair<std::vector<std::size_t>, StateSet>> seen_;
};

// Lexicographic step cost: idle steps, synchronized steps, steps.
using Cost = std::tuple<int, int, int>;

Cost step_cost(AtomSet symbol) {
  int n = std::popcount(symbol);
  return {n == 0 ? 1 : 0, n > 1 ? 1 : 0, 1};
}

Cost operator+(const Cost& a, const Cost& b) {
  return {std::get<0>(a) + std::get<0>(b), std::get<1>(a) + std::get<1>(b),
          std::get<2>(a) + std::get<2>(b)};
}

}  // namespace

InterleavingResult check_interleavings(const Nfa& nfa,
                                       const std::vector<std::vector<AtomSet>>& parts,
                                       std::size_t cap) {
  return InterleavingAudit(nfa, parts, cap).run();
}

EssentialSequence select_essential_sequence(const Nfa& nfa, const DecompositionStates& d) {
  const std::size_t n = nfa.num_states();
  auto coreach = nfa.coreachable();

  // Chosen symbol per edge: the first minimal symbol (fewest atoms, then
  // lexicographic), which is the empty symbol whenever that is allowed.
  auto symbol_of = [](const Guard& g) { return ltlf::minimal_symbols(g).front(); };

  // Dijkstra over (cost, state path); equal costs resolve to the smaller path.
  using Label = std::pair<Cost, std::vector<int>>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> pq;
  std::vector<char> settled(n, 0);
  for (int q : nfa.initial())
    if (coreach[q]) pq.push({Cost{0, 0, 0}, {q}});
  std::vector<int> run;
  while (!pq.empty()) {
    Label cur = pq.top();
    pq.pop();
    int q = cur.second.back();
    if (settled[q]) continue;
    settled[q] = 1;
    if (nfa.is_accepting(q)) {
      run = std::move(cur.second);
      break;
    }
    for (const auto& e : nfa.out(q)) {
      if (settled[e.to] || !coreach[e.to]) continue;
      auto path = cur.second;
      path.push_back(e.to);
      pq.push({cur.first + step_cost(symbol_of(e.guard)), std::move(path)});
    }
  }
  if (run.empty()) throw SpecInfeasible("the global specification has no accepting run");

  EssentialSequence seq;
  seq.run = run;
  const auto& u = nfa.universe();
  std::vector<AtomSet> symbols;
  // Source state index in `run` of the step that produces each element.
  std::vector<std::size_t> element_step;
  for (std::size_t i = 0; i + 1 < run.size(); ++i) {
    AtomSet s = symbol_of(*nfa.guard(run[i], run[i + 1]));
    if (s == 0) continue;
    symbols.push_back(s);
    element_step.push_back(i);
    auto names = u.names_of(s);
    seq.elements.emplace_back(names.begin(), names.end());
  }
  std::set<std::string> seen;
  for (const auto& el : seq.elements)
    for (const auto& name : el)
      if (!seen.insert(name).second)
        throw InvariantError("collaborative task " + name +
                             " occurs twice along the selected run");
  if (!ltlf::nfa_accepts(nfa, symbols))
    throw SpecInfeasible("the selected run needs idle steps that cannot be dropped");

  seq.boundaries = {0};
  if (symbols.empty()) return seq;
  std::set<int> dset(d.begin(), d.end());
  auto parts_of = [&symbols](const std::vector<std::size_t>& b) {
    std::vector<std::vector<AtomSet>> parts;
    for (std::size_t k = 0; k < b.size(); ++k) {
      std::size_t end = k + 1 < b.size() ? b[k + 1] : symbols.size();
      parts.emplace_back(symbols.begin() + static_cast<long>(b[k]),
                         symbols.begin() + static_cast<long>(end));
    }
    return parts;
  };
  for (std::size_t e = 1; e < symbols.size(); ++e) {
    // Any state between the previous element and this one may serve.
    bool candidate = false;
    for (std::size_t i = element_step[e - 1] + 1; i <= element_step[e]; ++i)
      candidate = candidate || dset.count(run[i]) > 0;
    if (!candidate) continue;
    auto trial = seq.boundaries;
    trial.push_back(e);
    if (check_interleavings(nfa, parts_of(trial)) == InterleavingResult::kAllAccepted)
      seq.boundaries = std::move(trial);
  }
  return seq;
}

std::vector<TemporalConstraint> temporal_constraints(const EssentialSequence& seq) {
  std::vector<TemporalConstraint> out;
  for (int k = 1; k <= static_cast<int>(seq.num_subsequences()); ++k) {
    auto [begin, end] = seq.subsequence_range(k);
    for (std::size_t e = begin; e < end; ++e) {
      const auto& el = seq.elements[e];
      for (std::size_t a = 0; a < el.size(); ++a)
        for (std::size_t b = a + 1; b < el.size(); ++b)
          out.push_back({ConstraintKind::kSync, el[a], el[b], k});
    }
    for (std::size_t e = begin; e < end; ++e)
      for (std::size_t f = e + 1; f < end; ++f)
        for (const auto& a : seq.elements[e])
          for (const auto& b : seq.elements[f])
            out.push_back({ConstraintKind::kOrder, a, b, k});
  }
  return out;
}

nlohmann::json to_json(const EssentialSequence& seq) {
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& c : temporal_constraints(seq))
    cons.push_back({{"kind", c.kind == ConstraintKind::kSync ? "sync" : "order"},
                    {"first", c.first},
                    {"second", c.second},
                    {"subsequence", c.subsequence}});
  return {{"run", seq.run},
          {"elements", seq.elements},
          {"boundaries", seq.boundaries},
          {"constraints", cons}};
}

}  // namespace mrtp::mission
