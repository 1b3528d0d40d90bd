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

// Joint execution of per-robot plans, specification checks and the
// exhaustive joint-plan baseline.

#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mrtp/pipeline.hpp"
#include "mrtp/scenario.hpp"

namespace mrtp::execution {

using localplan::Time;

// A robot's walk over grid cells and where it performs collaborative tasks.
struct ExecPlan {
  int robot = 0;
  std::vector<int> cells;
  // (waypoint index, task): the step leaving that waypoint performs it.
  std::vector<std::pair<std::size_t, std::string>> performs;
};

std::vector<ExecPlan> exec_plans(const pipeline::Solution& sol);
// Reads the "robots" section of a plan document. Throws SchemaError.
std::vector<ExecPlan> exec_plans_from_json(const nlohmann::json& plan,
                                           const scenario::Scenario& s);

struct TaskEvent {
  std::size_t element = 0;  // 0-based element of the essential sequence
  std::vector<std::string> tasks;
  Time time = 0;
  std::vector<int> robots;
};

struct RobotTimeline {
  int robot = 0;
  std::vector<Time> arrive;  // per waypoint
  std::vector<Time> wait;    // per waypoint, before leaving it
  Time busy = 0;             // total step weight
  Time waited = 0;
  Time finish = 0;           // busy + waited
  std::map<std::string, Time> performed;
  // One symbol per transition, waiting included; individual tasks only.
  std::vector<std::set<std::string>> individual_trace;
};

struct JointTrace {
  std::vector<TaskEvent> events;  // in firing order
  std::vector<RobotTimeline> robots;
  bool deadlock = false;
  std::vector<std::string> problems;
};

// Discrete-event run: robots follow their walks at step weights and hold
// at a performing waypoint until every participant of that element has
// arrived; the element then fires at the latest arrival.
JointTrace simulate_execution(const scenario::Scenario& s, const mission::EssentialSequence& seq,
                              const std::vector<ExecPlan>& plans);

struct VerifyReport {
  bool plans_valid = true;
  bool individual = true;  // (a)
  bool global = true;      // (b)
  bool sync = true;        // (c)
  bool order = true;       // (d)
  std::vector<std::string> problems;
  bool ok() const { return plans_valid && individual && global && sync && order; }
};

nlohmann::json to_json(const VerifyReport& r);

VerifyReport verify_solution(const scenario::Scenario& s, const pipeline::MissionModel& m,
                             const std::vector<ExecPlan>& plans, const JointTrace& trace);

struct OracleOptions {
  std::size_t max_states = 100000;
  std::size_t max_robots = 2;
};

struct OracleResult {
  Time T_colla = 0;
  std::size_t states = 0;
};

// Optimal waiting-aware total time over all joint behaviours: each robot
// satisfies its formula, collaborative tasks fire when enough capable
// robots step out of the task cell together, and the fired sets satisfy the
// global formula. Unit cell weights only. Throws ResourceError above the
// caps, PlanInfeasible when no joint behaviour exists.
OracleResult brute_force_joint_plan(const scenario::Scenario& s, const OracleOptions& o = {});

}  // namespace mrtp::execution
