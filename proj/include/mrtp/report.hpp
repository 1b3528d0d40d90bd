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

// Static map rendering and benchmark tables.

#pragma once

#include <cstddef>
#include <string>

#include "mrtp/pipeline.hpp"
#include "mrtp/scenario.hpp"

namespace mrtp::report {

// One character per cell: '#' blocked, 'C' collaborative task, 't'
// individual task, robot start as its id's last digit, '.' free.
std::string render_ascii(const scenario::Scenario& s);

// Map with tasks, starts and each robot's walk with numbered waypoints.
std::string render_svg(const scenario::Scenario& s, const pipeline::Solution* sol = nullptr);

struct BenchRow {
  std::string env_size;  // "WxH"
  std::size_t robots = 0;
  localplan::Time T_colla = 0;
  localplan::Time T_colla_init = 0;
  double t_cal = 0;
  double t_cal_no_adjust = 0;
  std::size_t assignments_evaluated = 0;
  std::size_t assignments_filtered = 0;
};

std::string csv_header();
std::string csv_row(const BenchRow& r);

}  // namespace mrtp::report
