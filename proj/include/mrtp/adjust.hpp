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

// Waiting-aware time cost and the greedy execution-plan adjusting protocol.

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mrtp/localplan.hpp"

namespace mrtp::adjust {

using localplan::Time;

// sigma^k(m), 1-based.
struct GeneralizedTask {
  int k = 0;
  int m = 0;
  std::vector<std::string> tasks;
  std::string label() const;
};

struct Schedule {
  std::vector<GeneralizedTask> order;  // ascending (k, m)
  std::vector<std::vector<int>> participants;  // per order entry, ascending ids
  // robot -> order index -> ideal arrival t_i
  std::map<int, std::map<std::size_t, Time>> arrival;
  std::map<int, Time> indiv;  // T_i^indiv

  // Throws InvariantError when a task has no participant or a participant
  // lacks an arrival.
  void validate() const;
};

struct TimeCostReport {
  std::vector<Time> task_time;                     // t(ct) per order entry
  std::vector<std::map<int, Time>> delay_before;   // participant delays entering each task
  std::map<int, Time> delay;                       // final delay_i
  std::map<int, Time> colla;                       // T_i^colla
  Time total = 0;                                  // T^colla
};

TimeCostReport time_cost(const Schedule& schedule);

// The only data robots exchange while adjusting.
struct TimingMessage {
  int sender = 0;
  std::size_t task = 0;  // index into Schedule::order
  Time arrival = 0;
  bool operator==(const TimingMessage&) const = default;
};

// In-process broadcast channel. Keeps every message for auditing.
class MessageBus {
 public:
  void publish(const TimingMessage& m) { transcript_.push_back(m); }
  const std::vector<TimingMessage>& transcript() const { return transcript_; }
  // Latest arrival per (sender, task), folded into a schedule skeleton
  // with no individual durations.
  Schedule board(const std::vector<GeneralizedTask>& order) const;

 private:
  std::vector<TimingMessage> transcript_;
};

// Per-product search data that adjusting reuses.
struct ProductAids {
  localplan::AcceptTree tree;
  std::map<std::string, std::vector<int>> collaborative;  // C(ct) per task
};

ProductAids make_aids(const localplan::ProductAutomaton& p, const std::vector<std::string>& tasks);

// Everything one robot knows privately.
struct RobotPlan {
  int robot = 0;
  std::shared_ptr<const localplan::ProductAutomaton> product;
  std::shared_ptr<const ProductAids> aids;  // built on demand when null
  localplan::Run run;
  std::vector<std::string> tasks;    // assigned collaborative tasks, ascending (k, l)
  std::vector<std::size_t> task_gt;  // Schedule::order index of each
};

// Order entries with participants, arrivals and individual durations
// derived from the plans' runs.
Schedule make_schedule(const std::vector<GeneralizedTask>& order,
                       const std::vector<RobotPlan>& plans);

// Alternative run for `plan` that re-times its visit of order entry `gt`:
// the run up to the previous task is kept, then it goes to another state
// of C(ct), performs ct there and completes as cheaply as possible.
// `board` holds the latest arrivals of every participant; its `indiv`
// needs only this robot's entry.
std::optional<localplan::Run> opt_time(const RobotPlan& plan, std::size_t gt, bool is_max,
                                       const Schedule& board, std::mt19937_64& rng,
                                       const ProductAids& aids);

struct AdjustLogEntry {
  std::size_t pass = 0;
  std::string task;
  int robot = 0;
  bool is_max = true;
  bool accepted = false;
  Time before = 0;
  Time after = 0;
};

nlohmann::json to_json(const AdjustLogEntry& e);

struct AdjustReport {
  TimeCostReport initial;
  TimeCostReport final;
  std::size_t passes = 0;
  std::size_t accepted = 0;
  std::vector<AdjustLogEntry> log;
  std::vector<TimingMessage> transcript;
};

struct AdjustOptions {
  std::uint64_t seed = 0;
  std::size_t max_passes = 100000;
};

// Runs the protocol in place on `plans`.
AdjustReport adjust_plans(std::vector<RobotPlan>& plans,
                          const std::vector<GeneralizedTask>& order,
                          const AdjustOptions& options = {});

}  // namespace mrtp::adjust
