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

// Boolean robot-to-task allocation and model enumeration.

#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mrtp/mission.hpp"

namespace mrtp::allocation {

// Collaborative task ct^k_l, both indices 1-based.
struct TaskRef {
  int k = 0;
  int l = 0;
  auto operator<=>(const TaskRef&) const = default;
};

// x_i^(k,l).
struct Variable {
  int robot = 0;
  TaskRef task;
};

// At least `count` of `vars` are true.
struct AtLeast {
  std::vector<int> vars;
  int count = 1;
};

// At most one of `vars` is true.
struct AtMostOne {
  std::vector<int> vars;
};

// Some robot has a true variable on both sides. One entry per robot.
struct Overlap {
  std::vector<std::pair<std::vector<int>, std::vector<int>>> per_robot;
};

// Consecutive element pair (k, m) meaning sigma^k(m) and sigma^k(m+1).
using ElementPair = std::pair<int, int>;

class AllocationModel {
 public:
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<AtLeast>& at_least() const { return at_least_; }
  const std::vector<AtMostOne>& at_most_one() const { return at_most_one_; }
  const std::vector<Overlap>& overlap() const { return overlap_; }
  const std::vector<int>& robots() const { return robots_; }
  const std::vector<TaskRef>& tasks() const { return tasks_; }
  // Index of x_robot^task, -1 when the pair has no variable.
  int var(int robot, TaskRef t) const;
  std::size_t num_clauses() const {
    return at_least_.size() + at_most_one_.size() + overlap_.size();
  }

  // Full-assignment check against the three clause families.
  bool satisfied(const std::vector<char>& values) const;

 private:
  friend AllocationModel build_model(const mission::EssentialSequence&,
                                     const mission::TeamModel&, const mission::TaskCatalog&,
                                     const std::optional<std::vector<ElementPair>>&);
  std::vector<Variable> vars_;
  std::vector<AtLeast> at_least_;
  std::vector<AtMostOne> at_most_one_;
  std::vector<Overlap> overlap_;
  std::vector<int> robots_;
  std::vector<TaskRef> tasks_;
  std::map<std::pair<int, TaskRef>, int> index_;
  // Element (0-based, whole sequence) groups of variables per robot, used
  // by the enumerator's lookahead.
  friend class AssignmentStream;
  struct ElementInfo {
    std::vector<int> tasks;  // indices into at_least_
    std::map<int, std::vector<int>> robot_vars;
  };
  std::vector<ElementInfo> elements_;
};

// Variables exist only for robots whose capability a task requires; they
// are ordered by robot id, then (k, l). `comm_pairs` narrows the overlap
// constraint; by default every consecutive pair inside each subsequence.
AllocationModel build_model(const mission::EssentialSequence& seq,
                            const mission::TeamModel& team,
                            const mission::TaskCatalog& catalog,
                            const std::optional<std::vector<ElementPair>>& comm_pairs =
                                std::nullopt);

// Robot id -> tasks it takes part in. Every robot of the model has an entry.
struct Assignment {
  std::map<int, std::set<TaskRef>> tasks;

  std::vector<int> participants(TaskRef t) const;
  bool operator==(const Assignment&) const = default;
};

// Decodes a full variable assignment; throws InvariantError if it violates
// the model.
Assignment decode(const AllocationModel& model, const std::vector<char>& values);
std::vector<char> encode(const AllocationModel& model, const Assignment& a);

// True iff some member of `history` gives every robot a subset of the tasks
// `candidate` gives it.
bool dominated(const Assignment& candidate, const std::vector<Assignment>& history);

struct EnumerationStats {
  std::size_t variables = 0;
  std::size_t clauses = 0;
  std::size_t emitted = 0;
  // Models skipped by the dominance filter (lazy filtering) or subtrees cut
  // by superset blocking.
  std::size_t filtered = 0;
};

// Depth-first model enumeration: variables in model order, false before
// true, each found model blocked. Resumable between calls to next().
class AssignmentStream {
 public:
  explicit AssignmentStream(AllocationModel model);

  // Next model not blocked so far; nullopt once exhausted.
  std::optional<Assignment> next();
  // Next model not dominated by an earlier emitted one from this stream.
  // Dominated models are counted in stats().filtered and skipped.
  std::optional<Assignment> next_undominated();
  // Excludes every later model that contains all of `a`'s true variables.
  void block_supersets(const Assignment& a);

  const AllocationModel& model() const { return model_; }
  const EnumerationStats& stats() const { return stats_; }

 private:
  bool consistent() const;
  bool cut_hit() const;

  AllocationModel model_;
  std::vector<signed char> value_;  // -1 unassigned
  std::size_t depth_ = 0;
  bool backtrack_ = false;
  bool exhausted_ = false;
  std::unordered_set<std::string> blocked_;
  std::vector<std::vector<int>> cuts_;
  std::vector<Assignment> history_;
  EnumerationStats stats_;
};

nlohmann::json to_json(const Assignment& a);

}  // namespace mrtp::allocation
