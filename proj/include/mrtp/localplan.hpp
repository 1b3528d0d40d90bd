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

// Per-robot planning: motion model, local formula, product automaton and
// shortest accepting runs.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mrtp/ltlf.hpp"
#include "mrtp/nfa.hpp"

namespace mrtp::localplan {

using Time = std::int64_t;

// Rectangular 4-connected map. Cell id = y * width + x. Entering a cell
// costs its weight (1 unless overridden).
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, const std::vector<std::pair<int, int>>& blocked = {},
       const std::map<std::pair<int, int>, Time>& costs = {});

  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return width_ * height_; }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  int id(int x, int y) const { return y * width_ + x; }
  int x(int id) const { return id % width_; }
  int y(int id) const { return id / width_; }
  bool blocked(int id) const { return blocked_[id] != 0; }
  Time cost(int id) const { return cost_[id]; }
  // Unblocked 4-neighbours in the order left, right, down, up.
  std::vector<int> neighbors(int id) const;
  // True when all unblocked cells form one component.
  bool connected() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<char> blocked_;
  std::vector<Time> cost_;
};

struct WtsEdge {
  int to;
  Time weight;
};

// Robot motion model: regions, transitions with positive weights
// (self-loops weigh 1) and region labels.
class WeightedTransitionSystem {
 public:
  WeightedTransitionSystem() = default;
  WeightedTransitionSystem(std::size_t num_regions, int initial);

  std::size_t num_regions() const { return out_.size(); }
  int initial() const { return initial_; }
  const std::vector<WtsEdge>& out(int r) const { return out_[r]; }
  const std::set<std::string>& label(int r) const { return labels_[r]; }
  // Weight of r -> r2, nullopt when there is no such transition.
  std::optional<Time> weight(int r, int r2) const;

  void add_transition(int from, int to, Time weight);
  void add_label(int r, const std::string& atom) { labels_[r].insert(atom); }

 private:
  int initial_ = 0;
  std::vector<std::vector<WtsEdge>> out_;
  std::vector<std::set<std::string>> labels_;
};

// All unblocked cells are regions; every region gets a self-loop.
WeightedTransitionSystem wts_from_grid(const Grid& grid, int start,
                                       const std::map<int, std::set<std::string>>& labels);

// phi & F(t1 & F(t2 & ...)), subsequence groups chained through their last
// task. Empty groups are skipped; no tasks returns phi.
ltlf::Formula build_local_formula(const ltlf::Formula& phi,
                                  const std::vector<std::vector<std::string>>& groups);

struct ProductEdge {
  int to;
  Time weight;
};

// Reachable part of the product of a motion model and an automaton. A step
// from (r, s) consumes the label of r.
class ProductAutomaton {
 public:
  ProductAutomaton(WeightedTransitionSystem wts, ltlf::Nfa nfa);

  std::size_t num_states() const { return states_.size(); }
  int region(int id) const { return states_[id].first; }
  int nfa_state(int id) const { return states_[id].second; }
  // -1 when (region, nfa state) is not reachable.
  int id_of(int region, int nfa_state) const;
  const std::vector<int>& initial() const { return initial_; }
  bool is_accepting(int id) const { return nfa_.is_accepting(nfa_state(id)); }
  const std::vector<ProductEdge>& out(int id) const { return out_[id]; }
  // Reverse edges: `to` holds the predecessor.
  const std::vector<ProductEdge>& in(int id) const { return in_[id]; }
  // Region label restricted to the automaton's atoms.
  ltlf::AtomSet label(int id) const { return region_label_[region(id)]; }

  const WeightedTransitionSystem& wts() const { return wts_; }
  const ltlf::Nfa& nfa() const { return nfa_; }

  // The step from -> to performs `task`: the task labels the source region,
  // the automaton state changes, and the step guard needs the task atom.
  bool performs(int from, int to, const std::string& task) const;

 private:
  WeightedTransitionSystem wts_;
  ltlf::Nfa nfa_;
  std::vector<ltlf::AtomSet> region_label_;
  std::vector<std::pair<int, int>> states_;
  std::map<std::pair<int, int>, int> index_;
  std::vector<int> initial_;
  std::vector<std::vector<ProductEdge>> out_;
  std::vector<std::vector<ProductEdge>> in_;
};

struct Run {
  std::vector<int> states;  // product state ids
  Time cost = 0;
};

Time run_cost(const ProductAutomaton& p, const std::vector<int>& states);

// Minimum-weight run from an initial to an accepting state. Ties: fewer
// hops, then smaller state id. Throws PlanInfeasible.
Run shortest_accepting_run(const ProductAutomaton& p);

// Minimum-weight path `from` -> `to` (both included); nullopt if none.
std::optional<std::vector<int>> shortest_path(const ProductAutomaton& p, int from, int to);

// Forward search from one state. States farther than `limit` (when
// non-negative) are left unsettled.
struct PathTree {
  std::vector<Time> dist;  // -1 when unreachable
  std::vector<int> pred;
  // Path from the source to `id`, empty when unreachable.
  std::vector<int> path_to(int id) const;
};
PathTree shortest_tree(const ProductAutomaton& p, int source, Time limit = -1);

// Reverse search: cheapest completion to acceptance from every state.
struct AcceptTree {
  std::vector<Time> dist;  // -1 when acceptance is unreachable
  std::vector<int> next;   // -1 at accepting states and unreachable ones
  std::vector<int> path_from(int id) const;
};
AcceptTree accept_tree(const ProductAutomaton& p);

// Product states where the robot can perform `task`.
std::vector<int> collaborative_states(const ProductAutomaton& p, const std::string& task);

struct Visit {
  std::string task;
  std::size_t index = 0;  // run index of the performing state
  Time time = 0;          // prefix weight up to that state
};

// Scans the run for the first step performing each task, in the given
// order, each strictly after the previous. Throws MissingCollaborativeState.
std::vector<Visit> arrival_times(const ProductAutomaton& p, const Run& run,
                                 const std::vector<std::string>& tasks);

struct PlanStep {
  int region = 0;
  Time time = 0;
  std::optional<std::string> performs;
};

std::vector<PlanStep> make_plan(const ProductAutomaton& p, const Run& run,
                                const std::vector<Visit>& visits);

nlohmann::json to_json(const std::vector<PlanStep>& plan, const Grid& grid);

}  // namespace mrtp::localplan
