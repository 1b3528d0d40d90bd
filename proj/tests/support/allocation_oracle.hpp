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

// Random allocation instances and a brute-force model enumerator that only
// looks at the raw robot/task definitions.

#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mrtp/allocation.hpp"

namespace mrtp::testing {

struct AllocationInstance {
  mission::EssentialSequence seq;
  mission::TeamModel team;
  mission::TaskCatalog catalog;
  std::vector<allocation::ElementPair> comm_pairs;
};

inline AllocationInstance random_allocation_instance(std::mt19937_64& rng) {
  AllocationInstance inst;
  auto pick = [&rng](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  std::vector<std::string> caps{"c1", "c2", "c3"};
  int ncaps = 1 + pick(3);
  int n = 1 + pick(4);
  std::vector<mission::RobotInfo> robots;
  for (int i = 1; i <= n; ++i) robots.push_back({i, caps[pick(ncaps)]});
  inst.team = mission::TeamModel(robots);

  int tasks = 1 + pick(4);
  std::vector<std::string> names;
  for (int t = 1; t <= tasks; ++t) {
    std::string name = "ct" + std::to_string(t);
    std::map<std::string, int> req;
    for (int c = 0; c < ncaps; ++c)
      if (pick(2) == 0) req[caps[c]] = 1 + pick(2);
    if (req.empty()) req[caps[pick(ncaps)]] = 1;
    for (auto& [cap, m] : req)
      m = std::max(1, std::min(m, static_cast<int>(inst.team.group_size(cap))));
    inst.catalog[name] = mission::TaskSpec{name, t, req};
    names.push_back(name);
  }
  // Group names into elements and elements into subsequences.
  for (std::size_t t = 0; t < names.size(); ++t) {
    if (t == 0 || pick(3) != 0) inst.seq.elements.push_back({});
    inst.seq.elements.back().push_back(names[t]);
  }
  inst.seq.boundaries = {0};
  for (std::size_t e = 1; e < inst.seq.elements.size(); ++e)
    if (pick(3) == 0) inst.seq.boundaries.push_back(e);
  for (int k = 1; k <= static_cast<int>(inst.seq.num_subsequences()); ++k) {
    auto [b, e] = inst.seq.subsequence_range(k);
    for (std::size_t x = b; x + 1 < e; ++x)
      if (pick(4) != 0) inst.comm_pairs.push_back({k, static_cast<int>(x - b) + 1});
  }
  return inst;
}

// Robot -> set of task names, checked directly against the definitions.
inline bool raw_constraints_hold(const AllocationInstance& inst,
                                 const std::map<int, std::set<std::string>>& take) {
  auto has = [&take](int robot, const std::string& t) {
    auto it = take.find(robot);
    return it != take.end() && it->second.count(t) > 0;
  };
  for (const auto& el : inst.seq.elements)
    for (const auto& t : el)
      for (const auto& [cap, m] : inst.catalog.at(t).requirements) {
        int count = 0;
        for (const auto& r : inst.team.robots())
          if (r.capability == cap && has(r.id, t)) ++count;
        if (count < m) return false;
      }
  for (const auto& el : inst.seq.elements)
    for (const auto& r : inst.team.robots()) {
      int count = 0;
      for (const auto& t : el) count += has(r.id, t) ? 1 : 0;
      if (count > 1) return false;
    }
  for (const auto& [k, m] : inst.comm_pairs) {
    auto [b, e] = inst.seq.subsequence_range(k);
    const auto& e1 = inst.seq.elements[b + m - 1];
    const auto& e2 = inst.seq.elements[b + m];
    bool shared = false;
    for (const auto& r : inst.team.robots()) {
      bool in1 = false, in2 = false;
      for (const auto& t : e1) in1 = in1 || has(r.id, t);
      for (const auto& t : e2) in2 = in2 || has(r.id, t);
      shared = shared || (in1 && in2);
    }
    if (!shared) return false;
  }
  return true;
}

// Every robot/task pair where the robot's capability is required is a
// candidate; all 2^pairs subsets are tried.
inline std::set<std::map<int, std::set<std::string>>> brute_force_models(
    const AllocationInstance& inst) {
  std::vector<std::pair<int, std::string>> pairs;
  for (const auto& r : inst.team.robots())
    for (const auto& el : inst.seq.elements)
      for (const auto& t : el)
        if (inst.catalog.at(t).requirements.count(r.capability)) pairs.push_back({r.id, t});
  std::set<std::map<int, std::set<std::string>>> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << pairs.size()); ++bits) {
    std::map<int, std::set<std::string>> take;
    for (const auto& r : inst.team.robots()) take[r.id];
    for (std::size_t p = 0; p < pairs.size(); ++p)
      if (bits >> p & 1) take[pairs[p].first].insert(pairs[p].second);
    if (raw_constraints_hold(inst, take)) out.insert(take);
  }
  return out;
}

inline std::map<int, std::set<std::string>> by_name(const AllocationInstance& inst,
                                                    const allocation::Assignment& a) {
  std::map<int, std::set<std::string>> out;
  for (const auto& [robot, set] : a.tasks) {
    auto& names = out[robot];
    for (const auto& t : set) names.insert(inst.seq.task(t.k, t.l)->name);
  }
  return out;
}

}  // namespace mrtp::testing
