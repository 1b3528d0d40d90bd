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

// Scenario documents: grid, robots, tasks, formulas and solver options.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mrtp/allocation.hpp"
#include "mrtp/localplan.hpp"
#include "mrtp/mission.hpp"

namespace mrtp::scenario {

using Cell = std::pair<int, int>;  // (x, y)

struct RobotSpec {
  int id = 0;
  std::string capability;
  Cell start;
};

struct IndividualTask {
  std::string name;
  Cell cell;
};

struct CollaborativeTask {
  std::string name;
  Cell cell;
  std::map<std::string, int> requirements;
};

struct Options {
  std::optional<std::uint64_t> seed;
  std::optional<double> budget_seconds;
  std::optional<std::vector<allocation::ElementPair>> comm_pairs;
};

struct Scenario {
  int width = 0;
  int height = 0;
  std::vector<Cell> blocked;
  std::map<Cell, localplan::Time> costs;  // optional per-cell entry weights
  std::vector<RobotSpec> robots;
  std::map<int, std::vector<IndividualTask>> individual_tasks;
  std::vector<CollaborativeTask> collaborative_tasks;
  std::map<int, std::string> individual_specs;  // missing entries mean "true"
  std::string global_spec = "true";
  Options options;

  localplan::Grid grid() const;
  mission::TeamModel team() const;
  mission::TaskCatalog catalog() const;
  int cell_id(const Cell& c) const { return c.second * width + c.first; }
  const RobotSpec& robot(int id) const;
  std::string individual_spec(int robot) const;
  // Individual task labels of one robot, by cell id.
  std::map<int, std::set<std::string>> individual_labels(int robot) const;
};

// Throws SchemaError (with a JSON pointer) on structural problems and
// InvariantError on domain violations.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);
void validate(const Scenario& s);

// Throws IoError, SchemaError, InvariantError, SyntaxError.
Scenario load_scenario(const std::string& path);
// Canonical form: sorted keys, two-space indent, trailing newline.
std::string canonical(const nlohmann::json& j);
void save_scenario(const Scenario& s, const std::string& path);

struct GeneratorParams {
  std::uint64_t seed = 0;
  int width = 5;
  int height = 5;
  int robots = 2;
  int individual_per_robot = 4;
  int collaborative = 4;
  int capabilities = 2;
  double obstacle_ratio = 0.08;
};

// Deterministic in the parameters. Throws InvariantError when they cannot
// produce a feasible scenario.
Scenario generate_scenario(const GeneratorParams& p);

}  // namespace mrtp::scenario
