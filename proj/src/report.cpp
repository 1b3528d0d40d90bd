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

#include "mrtp/report.hpp"

#include <cstdio>
#include <sstream>

namespace mrtp::report {

std::string render_ascii(const scenario::Scenario& s) {
  std::vector<std::string> rows(static_cast<std::size_t>(s.height), std::string(static_cast<std::size_t>(s.width), '.'));
  auto put = [&rows](const scenario::Cell& c, char ch) { rows[c.second][c.first] = ch; };
  for (const auto& c : s.blocked) put(c, '#');
  for (const auto& [id, list] : s.individual_tasks)
    for (const auto& t : list) put(t.cell, 't');
  for (const auto& t : s.collaborative_tasks) put(t.cell, 'C');
  for (const auto& r : s.robots) put(r.start, static_cast<char>('0' + r.id % 10));
  std::string out;
  // Row y = height - 1 on top.
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) out += *it + "\n";
  return out;
}

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                         "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

}  // namespace

std::string render_svg(const scenario::Scenario& s, const pipeline::Solution* sol) {
  const int u = 40;
  std::ostringstream o;
  auto px = [&](int x) { return x * u + u / 2; };
  auto py = [&](int y) { return (s.height - 1 - y) * u + u / 2; };
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << s.width * u << "\" height=\""
    << s.height * u << "\" font-family=\"monospace\" font-size=\"10\">\n";
  auto grid = s.grid();
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x)
      o << "<rect x=\"" << x * u << "\" y=\"" << (s.height - 1 - y) * u << "\" width=\"" << u
        << "\" height=\"" << u << "\" fill=\"" << (grid.blocked(s.cell_id({x, y})) ? "#444" : "#fff")
        << "\" stroke=\"#ccc\"/>\n";
  for (const auto& [id, list] : s.individual_tasks)
    for (const auto& t : list)
      o << "<text x=\"" << px(t.cell.first) - 16 << "\" y=\"" << py(t.cell.second) - 8 << "\" fill=\"#555\">"
        << t.name << "</text>\n";
  for (const auto& t : s.collaborative_tasks)
    o << "<rect x=\"" << t.cell.first * u + 2 << "\" y=\"" << (s.height - 1 - t.cell.second) * u + 2
      << "\" width=\"" << u - 4 << "\" height=\"" << u - 4 << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << px(t.cell.first) - 8 << "\" y=\"" << py(t.cell.second) + 14 << "\">" << t.name << "</text>\n";
  for (std::size_t i = 0; i < s.robots.size(); ++i) {
    const auto& r = s.robots[i];
    o << "<circle cx=\"" << px(r.start.first) << "\" cy=\"" << py(r.start.second) << "\" r=\"6\" fill=\""
      << kColors[i % 10] << "\"/>\n";
  }
  if (sol) {
    for (std::size_t i = 0; i < sol->robots.size(); ++i) {
      const auto& plan = sol->robots[i].plan;
      const char* color = kColors[i % 10];
      int off = static_cast<int>(i % 5) * 3 - 6;
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (const auto& st : plan) o << px(grid.x(st.region)) + off << "," << py(grid.y(st.region)) + off << " ";
      o << "\"/>\n";
      for (std::size_t x = 0; x < plan.size(); ++x)
        o << "<text x=\"" << px(grid.x(plan[x].region)) + off + 2 << "\" y=\"" << py(grid.y(plan[x].region)) + off
          << "\" fill=\"" << color << "\">" << x << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

std::string csv_header() {
  return "env_size,N,T_colla,T_colla_init,t_cal,t_cal_no_adjust,assignments_evaluated,assignments_filtered\n";
}

std::string csv_row(const BenchRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%zu,%lld,%lld,%.6f,%.6f,%zu,%zu\n", r.env_size.c_str(), r.robots,
                static_cast<long long>(r.T_colla), static_cast<long long>(r.T_colla_init), r.t_cal,
                r.t_cal_no_adjust, r.assignments_evaluated, r.assignments_filtered);
  return buf;
}

}  // namespace mrtp::report
