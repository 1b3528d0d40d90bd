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

// End-to-end planning: mission model, allocation, local plans, adjusting.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mrtp/adjust.hpp"
#include "mrtp/allocation.hpp"
#include "mrtp/mission.hpp"
#include "mrtp/nfa.hpp"
#include "mrtp/scenario.hpp"

namespace mrtp::pipeline {

using localplan::Time;

// Global formula, its staffed automaton and the essential sequence.
struct MissionModel {
  ltlf::Formula phi = ltlf::Formula::True();
  ltlf::Nfa pruned;
  mission::EssentialSequence sequence;
  std::vector<adjust::GeneralizedTask> order;
};

// Throws SyntaxError, SpecInfeasible.
MissionModel build_mission(const scenario::Scenario& s);

struct PipelineOptions {
  bool adjust = true;
  std::uint64_t seed = 0;
  double budget_seconds = 1800;
  std::size_t max_assignments = 0;  // 0: until the stream is exhausted
  bool lazy_filter = false;         // dominance check after the fact instead of cuts
};

// Scenario options override seed and budget when present.
PipelineOptions options_for(const scenario::Scenario& s, PipelineOptions base = {});

struct RobotSolution {
  int robot = 0;
  std::vector<std::string> tasks;     // ascending (k, l)
  std::vector<std::size_t> task_gt;   // element index of each task
  localplan::Run run;
  std::vector<localplan::PlanStep> plan;
};

struct SolverStats {
  std::size_t evaluated = 0;
  std::size_t filtered = 0;
  std::size_t skipped = 0;  // assignments some robot could not plan
  std::size_t variables = 0;
  std::size_t clauses = 0;
  double t_cal = 0;  // seconds
  bool budget_exhausted = false;
  // (assignments evaluated, best T^colla so far)
  std::vector<std::pair<std::size_t, Time>> trajectory;
};

struct Solution {
  allocation::Assignment assignment;
  MissionModel mission;
  std::vector<RobotSolution> robots;
  adjust::TimeCostReport cost;
  Time initial = 0;         // T^colla of the chosen assignment before adjusting
  Time best_initial = 0;    // smallest pre-adjusting T^colla over evaluated assignments
  adjust::AdjustReport adjustment;
  SolverStats stats;
};

// Throws SpecInfeasible, AllocationInfeasible, PlanInfeasible and
// BudgetExhausted. The result has passed simulation and verification.
Solution run_pipeline(const scenario::Scenario& s, const PipelineOptions& options = {});

nlohmann::json to_json(const Solution& sol, const scenario::Scenario& s);

}  // namespace mrtp::pipeline
