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

// Collaborative mission layer: which task sequence the team executes and
// how it splits into independently executable parts.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mrtp/ltlf.hpp"
#include "mrtp/nfa.hpp"

namespace mrtp::mission {

using Capability = std::string;

struct TaskSpec {
  std::string name;
  int region = 0;
  // Capability -> number of robots with it that must be present.
  std::map<Capability, int> requirements;
};

using TaskCatalog = std::map<std::string, TaskSpec>;

struct RobotInfo {
  int id = 0;
  Capability capability;
};

// Robots and the capability groups they form. Every robot has exactly one
// capability.
class TeamModel {
 public:
  TeamModel() = default;
  explicit TeamModel(std::vector<RobotInfo> robots);

  const std::vector<RobotInfo>& robots() const { return robots_; }
  std::vector<int> ids() const;
  const Capability& capability_of(int robot) const;
  // Ids of the robots with capability `c`, ascending.
  const std::vector<int>& group(const Capability& c) const;
  std::size_t group_size(const Capability& c) const { return group(c).size(); }
  std::set<Capability> capabilities() const;

 private:
  std::vector<RobotInfo> robots_;
  std::map<Capability, std::vector<int>> groups_;
};

// True when the team can staff every task of `tasks` at the same time.
// Robots are single-capability and serve one task at a time, so demands
// for the same capability add up.
bool simultaneously_feasible(const std::set<std::string>& tasks,
                             const TaskCatalog& catalog, const TeamModel& team);

// Removes every transition none of whose minimal symbols the team can
// staff. Guard cubes whose positive part cannot be staffed are dropped from
// the surviving guards as well. Throws SpecInfeasible when no accepting
// state stays reachable, InvariantError on atoms missing from `catalog`.
ltlf::Nfa prune_nfa(const ltlf::Nfa& nfa, const TaskCatalog& catalog,
                    const TeamModel& team);

// Sorted state ids.
using DecompositionStates = std::vector<int>;

// States on some accepting run that may idle: the self-loop guard exists
// and is satisfied by the empty symbol.
DecompositionStates find_decomposition_states(const ltlf::Nfa& nfa);

// One collaborative task occurrence inside the essential sequence.
// All indices are 1-based.
struct TaskInstance {
  int k = 0;           // subsequence
  int l = 0;           // position of the task inside subsequence k
  int m = 0;           // element inside subsequence k
  int j = 0;           // position inside the element
  int element = 0;     // element index in the whole sequence
  std::string name;
};

struct EssentialSequence {
  std::vector<int> run;                               // NFA states
  std::vector<std::vector<std::string>> elements;     // sorted names per step
  std::vector<std::size_t> boundaries;                // start element of each subsequence

  std::size_t size() const { return elements.size(); }
  std::size_t num_subsequences() const { return boundaries.size(); }
  // Elements [begin, end) of subsequence k (1-based).
  std::pair<std::size_t, std::size_t> subsequence_range(int k) const;
  // Subsequence (1-based) that owns global element `e` (0-based).
  int subsequence_of(std::size_t element) const;
  std::vector<TaskInstance> tasks() const;
  // (k, l) lookup; nullopt when out of range.
  std::optional<TaskInstance> task(int k, int l) const;
};

// Outcome of an exhaustive interleaving audit.
enum class InterleavingResult { kAllAccepted, kRejected, kTooMany };

// Checks that every merge of `parts` preserving the order inside each part
// is accepted by `nfa`. Gives up with kTooMany after `cap` merges.
InterleavingResult check_interleavings(const ltlf::Nfa& nfa,
                                       const std::vector<std::vector<ltlf::AtomSet>>& parts,
                                       std::size_t cap = 100000);

// Selects the accepting run that needs the fewest idle steps, then the
// fewest synchronized (multi-task) steps, then the fewest steps, ties going
// to the lexicographically smallest state sequence. Each step keeps its
// first minimal symbol. The element list is split at decomposition states
// along the run whenever the resulting parts pass check_interleavings.
// Throws SpecInfeasible when no accepting run exists.
EssentialSequence select_essential_sequence(const ltlf::Nfa& nfa,
                                            const DecompositionStates& d);

enum class ConstraintKind { kSync, kOrder };

struct TemporalConstraint {
  ConstraintKind kind;
  std::string first;
  std::string second;
  int subsequence = 0;
  bool operator==(const TemporalConstraint&) const = default;
};

std::vector<TemporalConstraint> temporal_constraints(const EssentialSequence& seq);

nlohmann::json to_json(const EssentialSequence& seq);

}  // namespace mrtp::mission
