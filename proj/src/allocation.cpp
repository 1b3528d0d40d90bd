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

#include "mrtp/allocation.hpp"

#include <algorithm>
#include <string>

#include "mrtp/error.hpp"

namespace mrtp::allocation {

int AllocationModel::var(int robot, TaskRef t) const {
  auto it = index_.find({robot, t});
  return it == index_.end() ? -1 : it->second;
}

bool AllocationModel::satisfied(const std::vector<char>& values) const {
  for (const auto& c : at_least_) {
    int n = 0;
    for (int v : c.vars) n += values[v] ? 1 : 0;
    if (n < c.count) return false;
  }
  for (const auto& c : at_most_one_) {
    int n = 0;
    for (int v : c.vars) n += values[v] ? 1 : 0;
    if (n > 1) return false;
  }
  for (const auto& c : overlap_) {
    auto any = [&values](const std::vector<int>& vs) {
      return std::any_of(vs.begin(), vs.end(), [&values](int v) { return values[v] != 0; });
    };
    bool ok = false;
    for (const auto& [a, b] : c.per_robot) ok = ok || (any(a) && any(b));
    if (!ok) return false;
  }
  return true;
}

AllocationModel build_model(const mission::EssentialSequence& seq,
                            const mission::TeamModel& team,
                            const mission::TaskCatalog& catalog,
                            const std::optional<std::vector<ElementPair>>& comm_pairs) {
  AllocationModel m;
  m.robots_ = team.ids();
  auto instances = seq.tasks();
  for (const auto& t : instances) m.tasks_.push_back({t.k, t.l});
  std::sort(m.tasks_.begin(), m.tasks_.end());

  auto spec_of = [&catalog](const std::string& name) -> const mission::TaskSpec& {
    auto it = catalog.find(name);
    if (it == catalog.end()) throw InvariantError("unknown collaborative task " + name);
    return it->second;
  };
  auto instance_of = [&instances](TaskRef r) -> const mission::TaskInstance& {
    for (const auto& t : instances)
      if (t.k == r.k && t.l == r.l) return t;
    throw InvariantError("task index out of range");
  };

  for (const auto& r : team.robots())
    for (const auto& t : m.tasks_) {
      const auto& req = spec_of(instance_of(t).name).requirements;
      if (req.count(r.capability) == 0) continue;
      m.index_[{r.id, t}] = static_cast<int>(m.vars_.size());
      m.vars_.push_back({r.id, t});
    }

  // (1) per task and required capability.
  for (const auto& t : m.tasks_) {
    for (const auto& [cap, count] : spec_of(instance_of(t).name).requirements) {
      AtLeast c;
      c.count = count;
      for (int i : team.group(cap)) c.vars.push_back(m.var(i, t));
      m.at_least_.push_back(std::move(c));
    }
  }

  // Variables of robot i inside element e.
  m.elements_.resize(seq.size());
  for (const auto& t : instances) {
    auto& info = m.elements_[t.element - 1];
    for (int i : m.robots_) {
      int v = m.var(i, {t.k, t.l});
      if (v >= 0) info.robot_vars[i].push_back(v);
    }
  }
  for (std::size_t c = 0; c < m.at_least_.size(); ++c) {
    int v = m.at_least_[c].vars.empty() ? -1 : m.at_least_[c].vars.front();
    if (v < 0) continue;
    const auto& t = instance_of(m.vars_[v].task);
    m.elements_[t.element - 1].tasks.push_back(static_cast<int>(c));
  }

  // (2) one task per robot per element.
  for (const auto& info : m.elements_)
    for (const auto& [robot, vars] : info.robot_vars)
      if (vars.size() > 1) m.at_most_one_.push_back({vars});

  // (3) consecutive elements share a robot.
  std::vector<ElementPair> pairs;
  if (comm_pairs) {
    pairs = *comm_pairs;
  } else {
    for (int k = 1; k <= static_cast<int>(seq.num_subsequences()); ++k) {
      auto [b, e] = seq.subsequence_range(k);
      for (std::size_t x = b; x + 1 < e; ++x) pairs.push_back({k, static_cast<int>(x - b) + 1});
    }
  }
  for (const auto& [k, mi] : pairs) {
    if (k < 1 || k > static_cast<int>(seq.num_subsequences()))
      throw InvariantError("communication pair refers to a missing subsequence");
    auto [b, e] = seq.subsequence_range(k);
    std::size_t first = b + static_cast<std::size_t>(mi) - 1;
    if (mi < 1 || first + 1 >= e)
      throw InvariantError("communication pair refers to a missing element pair");
    Overlap c;
    for (int i : m.robots_) {
      auto a = m.elements_[first].robot_vars.find(i);
      auto z = m.elements_[first + 1].robot_vars.find(i);
      if (a == m.elements_[first].robot_vars.end() ||
          z == m.elements_[first + 1].robot_vars.end())
        continue;
      c.per_robot.push_back({a->second, z->second});
    }
    m.overlap_.push_back(std::move(c));
  }
  return m;
}

std::vector<int> Assignment::participants(TaskRef t) const {
  std::vector<int> out;
  for (const auto& [robot, set] : tasks)
    if (set.count(t)) out.push_back(robot);
  return out;
}

Assignment decode(const AllocationModel& model, const std::vector<char>& values) {
  if (values.size() != model.variables().size())
    throw InvariantError("assignment size does not match the model");
  if (!model.satisfied(values)) throw InvariantError("assignment violates the model");
  Assignment a;
  for (int r : model.robots()) a.tasks[r];
  for (std::size_t v = 0; v < values.size(); ++v)
    if (values[v]) a.tasks[model.variables()[v].robot].insert(model.variables()[v].task);
  return a;
}

std::vector<char> encode(const AllocationModel& model, const Assignment& a) {
  std::vector<char> values(model.variables().size(), 0);
  for (const auto& [robot, set] : a.tasks)
    for (const auto& t : set) {
      int v = model.var(robot, t);
      if (v < 0) throw InvariantError("assignment uses a pair without a variable");
      values[v] = 1;
    }
  return values;
}

bool dominated(const Assignment& candidate, const std::vector<Assignment>& history) {
  static const std::set<TaskRef> kNone;
  for (const auto& h : history) {
    bool covers = true;
    for (const auto& [robot, set] : h.tasks) {
      auto it = candidate.tasks.find(robot);
      const auto& mine = it == candidate.tasks.end() ? kNone : it->second;
      if (!std::includes(mine.begin(), mine.end(), set.begin(), set.end())) {
        covers = false;
        break;
      }
    }
    if (covers) return true;
  }
  return false;
}

AssignmentStream::AssignmentStream(AllocationModel model)
    : model_(std::move(model)), value_(model_.variables().size(), -1) {
  stats_.variables = model_.variables().size();
  stats_.clauses = model_.num_clauses();
}

bool AssignmentStream::cut_hit() const {
  for (const auto& cut : cuts_)
    if (std::all_of(cut.begin(), cut.end(), [this](int v) { return value_[v] == 1; }))
      return true;
  return false;
}

// Partial-assignment lookahead; false means no completion can satisfy the
// model.
bool AssignmentStream::consistent() const {
  for (const auto& c : model_.at_least_) {
    int possible = 0;
    for (int v : c.vars) possible += value_[v] != 0 ? 1 : 0;
    if (possible < c.count) return false;
  }
  for (const auto& c : model_.at_most_one_) {
    int n = 0;
    for (int v : c.vars) n += value_[v] == 1 ? 1 : 0;
    if (n > 1) return false;
  }
  for (const auto& c : model_.overlap_) {
    auto maybe = [this](const std::vector<int>& vs) {
      return std::any_of(vs.begin(), vs.end(), [this](int v) { return value_[v] != 0; });
    };
    bool ok = false;
    for (const auto& [a, b] : c.per_robot) ok = ok || (maybe(a) && maybe(b));
    if (!ok) return false;
  }
  // Robots still free inside an element must cover the outstanding demand
  // there.
  for (const auto& info : model_.elements_) {
    std::map<std::vector<int>, int> demand;  // robot group -> outstanding count
    for (int c : info.tasks) {
      const auto& cl = model_.at_least_[c];
      int have = 0;
      for (int v : cl.vars) have += value_[v] == 1 ? 1 : 0;
      if (have >= cl.count) continue;
      std::vector<int> group;
      for (int v : cl.vars) group.push_back(model_.vars_[v].robot);
      demand[group] += cl.count - have;
    }
    for (const auto& [group, total] : demand) {
      int free = 0;
      for (int robot : group) {
        const auto& vars = info.robot_vars.at(robot);
        bool busy = false, open = false;
        for (int w : vars) {
          busy = busy || value_[w] == 1;
          open = open || value_[w] == -1;
        }
        free += (!busy && open) ? 1 : 0;
      }
      if (free < total) return false;
    }
  }
  return !cut_hit();
}

std::optional<Assignment> AssignmentStream::next() {
  const std::size_t n = value_.size();
  while (!exhausted_) {
    if (backtrack_) {
      while (depth_ > 0 && value_[depth_ - 1] == 1) value_[--depth_] = -1;
      if (depth_ == 0) {
        exhausted_ = true;
        break;
      }
      value_[depth_ - 1] = 1;
      backtrack_ = !consistent();
      if (backtrack_ && cut_hit()) ++stats_.filtered;
      continue;
    }
    if (depth_ == n) {
      backtrack_ = true;
      std::string key(value_.begin(), value_.end());
      if (!blocked_.insert(key).second) continue;
      std::vector<char> values(value_.begin(), value_.end());
      if (!model_.satisfied(values)) continue;
      ++stats_.emitted;
      return decode(model_, values);
    }
    value_[depth_++] = 0;
    backtrack_ = !consistent();
  }
  return std::nullopt;
}

std::optional<Assignment> AssignmentStream::next_undominated() {
  while (auto a = next()) {
    if (dominated(*a, history_)) {
      ++stats_.filtered;
      continue;
    }
    history_.push_back(*a);
    return a;
  }
  return std::nullopt;
}

void AssignmentStream::block_supersets(const Assignment& a) {
  auto values = encode(model_, a);
  std::vector<int> cut;
  for (std::size_t v = 0; v < values.size(); ++v)
    if (values[v]) cut.push_back(static_cast<int>(v));
  cuts_.push_back(std::move(cut));
}

nlohmann::json to_json(const Assignment& a) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [robot, set] : a.tasks) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& t : set) list.push_back({t.k, t.l});
    j[std::to_string(robot)] = list;
  }
  return j;
}

}  // namespace mrtp::allocation
