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

#pragma once

#include "json.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrtp/ltlf.hpp"

namespace mrtp::ltlf {

struct Edge {
  int to;
  Guard guard;
};

// Guard-labelled nondeterministic finite automaton. States are dense ids
// 0..num_states()-1; at most one guard per ordered state pair.
class Nfa {
 public:
  Nfa() = default;
  Nfa(Universe universe, std::size_t num_states);

  const Universe& universe() const { return universe_; }
  std::size_t num_states() const { return out_.size(); }

  const std::vector<int>& initial() const { return initial_; }
  bool is_initial(int q) const;
  bool is_accepting(int q) const { return accepting_[q]; }
  std::vector<int> accepting_states() const;

  const std::vector<Edge>& out(int q) const { return out_[q]; }
  // nullptr when there is no transition from `from` to `to`.
  const Guard* guard(int from, int to) const;

  // Human-readable description of a state (the obligations it tracks).
  const std::string& label(int q) const { return labels_[q]; }

  void add_initial(int q);
  void set_accepting(int q, bool accepting);
  // Disjoins with an existing guard on the same pair; a false guard removes
  // nothing and adds nothing.
  void add_transition(int from, int to, const Guard& g);
  void remove_transition(int from, int to);
  void replace_guard(int from, int to, const Guard& g);
  void set_label(int q, std::string label) { labels_[q] = std::move(label); }

  // States reachable from an initial state / able to reach an accepting one.
  std::vector<char> reachable() const;
  std::vector<char> coreachable() const;

  nlohmann::json to_json() const;
  std::string to_dot() const;

 private:
  Universe universe_;
  std::vector<int> initial_;
  std::vector<char> accepting_;
  std::vector<std::vector<Edge>> out_;
  std::vector<std::string> labels_;
};

inline constexpr std::size_t kDefaultStateCap = 100000;

// Tableau construction. States are conjunctions of pending obligations in
// negation normal form; accepting states are those whose obligations hold
// on the empty suffix. States that cannot reach acceptance are dropped
// (the initial state is always kept). The universe defaults to the atoms
// of `f`; an explicit universe must contain them.
Nfa to_nfa(const Formula& f, std::size_t state_cap = kDefaultStateCap);
Nfa to_nfa(const Formula& f, const Universe& universe,
           std::size_t state_cap = kDefaultStateCap);

// Subset simulation; the empty trace is accepted iff an initial state is
// accepting.
bool nfa_accepts(const Nfa& nfa, std::span<const AtomSet> trace);

}  // namespace mrtp::ltlf
