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

#include "mrtp/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <tuple>

#include "mrtp/error.hpp"
#include "mrtp/ltlf.hpp"
#include "mrtp/pipeline.hpp"

namespace mrtp::scenario {

using nlohmann::json;

localplan::Grid Scenario::grid() const { return localplan::Grid(width, height, blocked, costs); }

mission::TeamModel Scenario::team() const {
  std::vector<mission::RobotInfo> info;
  for (const auto& r : robots) info.push_back({r.id, r.capability});
  return mission::TeamModel(info);
}

mission::TaskCatalog Scenario::catalog() const {
  mission::TaskCatalog c;
  for (const auto& t : collaborative_tasks) c[t.name] = {t.name, cell_id(t.cell), t.requirements};
  return c;
}

const RobotSpec& Scenario::robot(int id) const {
  for (const auto& r : robots)
    if (r.id == id) return r;
  throw InvariantError("unknown robot " + std::to_string(id));
}

std::string Scenario::individual_spec(int robot) const {
  auto it = individual_specs.find(robot);
  return it == individual_specs.end() ? "true" : it->second;
}

std::map<int, std::set<std::string>> Scenario::individual_labels(int robot) const {
  std::map<int, std::set<std::string>> out;
  auto it = individual_tasks.find(robot);
  if (it == individual_tasks.end()) return out;
  for (const auto& t : it->second) out[cell_id(t.cell)].insert(t.name);
  return out;
}

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string at(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(at(path, key), "missing field '" + key + "'");
  return *it;
}

int to_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

std::string to_str(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

Cell to_cell(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw SchemaError(path, "expected [x, y]");
  return {to_int(j[0], at(path, 0)), to_int(j[1], at(path, 1))};
}

int robot_key(const std::string& key, const std::string& path) {
  try {
    std::size_t used = 0;
    int v = std::stoi(key, &used);
    if (used == key.size()) return v;
  } catch (const std::exception&) {
  }
  throw SchemaError(path, "robot keys must be integer ids");
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  Scenario s;
  const std::string root;
  const json& grid = field(j, "grid", root);
  s.width = to_int(field(grid, "width", "/grid"), "/grid/width");
  s.height = to_int(field(grid, "height", "/grid"), "/grid/height");
  if (grid.contains("blocked")) {
    const json& b = array(grid["blocked"], "/grid/blocked");
    for (std::size_t i = 0; i < b.size(); ++i) s.blocked.push_back(to_cell(b[i], at("/grid/blocked", i)));
  }
  if (grid.contains("costs")) {
    const json& c = array(grid["costs"], "/grid/costs");
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::string p = at("/grid/costs", i);
      if (!c[i].is_array() || c[i].size() != 3) throw SchemaError(p, "expected [x, y, cost]");
      s.costs[{to_int(c[i][0], at(p, 0)), to_int(c[i][1], at(p, 1))}] = to_int(c[i][2], at(p, 2));
    }
  }

  const json& robots = array(field(j, "robots", root), "/robots");
  for (std::size_t i = 0; i < robots.size(); ++i) {
    std::string p = at("/robots", i);
    RobotSpec r;
    r.id = to_int(field(robots[i], "id", p), at(p, "id"));
    r.capability = to_str(field(robots[i], "capability", p), at(p, "capability"));
    r.start = to_cell(field(robots[i], "start", p), at(p, "start"));
    s.robots.push_back(r);
  }

  if (j.contains("individual_tasks")) {
    const json& it = j["individual_tasks"];
    if (!it.is_object()) throw SchemaError("/individual_tasks", "expected an object");
    for (const auto& [key, list] : it.items()) {
      std::string p = at("/individual_tasks", key);
      int id = robot_key(key, p);
      array(list, p);
      auto& out = s.individual_tasks[id];
      for (std::size_t i = 0; i < list.size(); ++i) {
        std::string q = at(p, i);
        out.push_back({to_str(field(list[i], "name", q), at(q, "name")),
                       to_cell(field(list[i], "cell", q), at(q, "cell"))});
      }
    }
  }

  if (j.contains("collaborative_tasks")) {
    const json& ct = array(j["collaborative_tasks"], "/collaborative_tasks");
    for (std::size_t i = 0; i < ct.size(); ++i) {
      std::string p = at("/collaborative_tasks", i);
      CollaborativeTask t;
      t.name = to_str(field(ct[i], "name", p), at(p, "name"));
      t.cell = to_cell(field(ct[i], "cell", p), at(p, "cell"));
      const json& req = field(ct[i], "requires", p);
      if (!req.is_object()) throw SchemaError(at(p, "requires"), "expected an object");
      for (const auto& [cap, n] : req.items())
        t.requirements[cap] = to_int(n, at(at(p, "requires"), cap));
      s.collaborative_tasks.push_back(std::move(t));
    }
  }

  if (j.contains("specs")) {
    const json& sp = j["specs"];
    if (!sp.is_object()) throw SchemaError("/specs", "expected an object");
    if (sp.contains("individual")) {
      const json& ind = sp["individual"];
      if (!ind.is_object()) throw SchemaError("/specs/individual", "expected an object");
      for (const auto& [key, f] : ind.items()) {
        std::string p = at("/specs/individual", key);
        s.individual_specs[robot_key(key, p)] = to_str(f, p);
      }
    }
    if (sp.contains("global")) s.global_spec = to_str(sp["global"], "/specs/global");
  }

  if (j.contains("options")) {
    const json& o = j["options"];
    if (!o.is_object()) throw SchemaError("/options", "expected an object");
    if (o.contains("seed")) {
      if (!o["seed"].is_number_unsigned()) throw SchemaError("/options/seed", "expected a non-negative integer");
      s.options.seed = o["seed"].get<std::uint64_t>();
    }
    if (o.contains("budget_seconds")) {
      if (!o["budget_seconds"].is_number()) throw SchemaError("/options/budget_seconds", "expected a number");
      s.options.budget_seconds = o["budget_seconds"].get<double>();
    }
    if (o.contains("comm_pairs")) {
      const json& cp = array(o["comm_pairs"], "/options/comm_pairs");
      std::vector<allocation::ElementPair> pairs;
      for (std::size_t i = 0; i < cp.size(); ++i) {
        auto c = to_cell(cp[i], at("/options/comm_pairs", i));
        pairs.push_back({c.first, c.second});
      }
      s.options.comm_pairs = pairs;
    }
  }
  validate(s);
  return s;
}

json to_json(const Scenario& s) {
  json j;
  j["grid"] = {{"width", s.width}, {"height", s.height}, {"blocked", json::array()}};
  for (const auto& [x, y] : s.blocked) j["grid"]["blocked"].push_back({x, y});
  if (!s.costs.empty()) {
    j["grid"]["costs"] = json::array();
    for (const auto& [c, w] : s.costs) j["grid"]["costs"].push_back({c.first, c.second, w});
  }
  j["robots"] = json::array();
  for (const auto& r : s.robots)
    j["robots"].push_back({{"id", r.id}, {"capability", r.capability}, {"start", {r.start.first, r.start.second}}});
  j["individual_tasks"] = json::object();
  for (const auto& [id, list] : s.individual_tasks) {
    json l = json::array();
    for (const auto& t : list) l.push_back({{"name", t.name}, {"cell", {t.cell.first, t.cell.second}}});
    j["individual_tasks"][std::to_string(id)] = l;
  }
  j["collaborative_tasks"] = json::array();
  for (const auto& t : s.collaborative_tasks) {
    json req = json::object();
    for (const auto& [cap, n] : t.requirements) req[cap] = n;
    j["collaborative_tasks"].push_back(
        {{"name", t.name}, {"cell", {t.cell.first, t.cell.second}}, {"requires", req}});
  }
  j["specs"] = {{"individual", json::object()}, {"global", s.global_spec}};
  for (const auto& [id, f] : s.individual_specs) j["specs"]["individual"][std::to_string(id)] = f;
  j["options"] = json::object();
  if (s.options.seed) j["options"]["seed"] = *s.options.seed;
  if (s.options.budget_seconds) j["options"]["budget_seconds"] = *s.options.budget_seconds;
  if (s.options.comm_pairs) {
    j["options"]["comm_pairs"] = json::array();
    for (const auto& [k, m] : *s.options.comm_pairs) j["options"]["comm_pairs"].push_back({k, m});
  }
  return j;
}

void validate(const Scenario& s) {
  if (s.width <= 0 || s.height <= 0) throw InvariantError("grid dimensions must be positive");
  auto grid = s.grid();  // checks blocked and cost cells
  auto free_cell = [&](const Cell& c, const std::string& what) {
    if (!grid.in_bounds(c.first, c.second)) throw InvariantError(what + " lies outside the grid");
    if (grid.blocked(s.cell_id(c))) throw InvariantError(what + " lies on a blocked cell");
  };
  if (s.robots.empty()) throw InvariantError("the team has no robots");
  std::set<int> ids;
  for (const auto& r : s.robots) {
    if (!ids.insert(r.id).second) throw InvariantError("duplicate robot id " + std::to_string(r.id));
    if (r.capability.empty()) throw InvariantError("robot " + std::to_string(r.id) + " has no capability");
    free_cell(r.start, "start of robot " + std::to_string(r.id));
  }
  std::set<std::string> names;
  auto fresh = [&names](const std::string& n) {
    if (n.empty() || !std::all_of(n.begin(), n.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }))
      throw InvariantError("invalid task name '" + n + "'");
    if (n == "true" || n == "false" || n == "F" || n == "G" || n == "U")
      throw InvariantError("task name '" + n + "' is reserved");
    if (!names.insert(n).second) throw InvariantError("task name '" + n + "' is used twice");
  };
  for (const auto& [id, list] : s.individual_tasks) {
    if (!ids.count(id)) throw InvariantError("individual tasks for unknown robot " + std::to_string(id));
    for (const auto& t : list) {
      fresh(t.name);
      free_cell(t.cell, "task " + t.name);
    }
  }
  std::set<std::string> collab;
  for (const auto& t : s.collaborative_tasks) {
    fresh(t.name);
    collab.insert(t.name);
    free_cell(t.cell, "task " + t.name);
    if (t.requirements.empty()) throw InvariantError("task " + t.name + " requires no robots");
    for (const auto& [cap, n] : t.requirements)
      if (n <= 0) throw InvariantError("task " + t.name + " needs a positive count of " + cap);
  }
  for (const auto& [id, f] : s.individual_specs) {
    if (!ids.count(id)) throw InvariantError("individual formula for unknown robot " + std::to_string(id));
    std::set<std::string> own;
    auto it = s.individual_tasks.find(id);
    if (it != s.individual_tasks.end())
      for (const auto& t : it->second) own.insert(t.name);
    for (const auto& a : ltlf::parse_ltlf(f).atoms())
      if (!own.count(a))
        throw InvariantError("formula of robot " + std::to_string(id) + " uses '" + a +
                             "', which is not one of its individual tasks");
  }
  for (const auto& a : ltlf::parse_ltlf(s.global_spec).atoms())
    if (!collab.count(a)) throw InvariantError("global formula uses unknown collaborative task '" + a + "'");
  if (s.options.budget_seconds && *s.options.budget_seconds <= 0)
    throw InvariantError("budget must be positive");
}

std::string canonical(const json& j) { return j.dump(2) + "\n"; }

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << canonical(to_json(s));
  if (!out) throw IoError("cannot write " + path);
}

namespace {

std::string individual_formula(const std::vector<std::string>& ts) {
  if (ts.empty()) return "true";
  std::string f;
  for (const auto& t : ts) f += (f.empty() ? "F " : " & F ") + t;
  if (ts.size() >= 2) f += " & (!" + ts.front() + " U " + ts.back() + ")";
  return f;
}

std::string global_formula(int k) {
  auto ct = [](int j) { return "ct" + std::to_string(j); };
  if (k == 1) return "F ct1";
  if (k == 2) return "F ct1 & F ct2 & (!ct2 U ct1)";
  if (k == 3) return "F ct1 & F ct2 & (!ct3 U ct2) & F (ct1 & F ct3)";
  std::string f = "F ct1 & F ct2";
  for (int j = 4; j <= k; ++j) f += " & F " + ct(j);
  return f + " & (!ct3 U ct2) & F (ct4 & F ct3)";
}

}  // namespace

Scenario generate_scenario(const GeneratorParams& p) {
  if (p.width <= 0 || p.height <= 0 || p.robots <= 0 || p.capabilities <= 0 ||
      p.collaborative < 0 || p.individual_per_robot < 0)
    throw InvariantError("generator parameters must be positive");
  if (p.capabilities > p.robots)
    throw InvariantError("every capability needs at least one robot");
  std::mt19937_64 rng(p.seed);
  auto below = [&rng](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

  Scenario s;
  s.width = p.width;
  s.height = p.height;
  const int size = p.width * p.height;
  const int needed = p.collaborative + p.robots * (p.individual_per_robot + 1);
  if (needed > size) throw InvariantError("grid too small for the requested tasks and robots");

  std::vector<int> order(size);
  for (int c = 0; c < size; ++c) order[c] = c;
  std::shuffle(order.begin(), order.end(), rng);
  int budget = std::min(static_cast<int>(p.obstacle_ratio * size), size - needed);
  std::vector<int> blocked;
  for (int c : order) {
    if (static_cast<int>(blocked.size()) >= budget) break;
    std::vector<Cell> trial = s.blocked;
    trial.push_back({c % p.width, c / p.width});
    if (localplan::Grid(p.width, p.height, trial).connected()) {
      s.blocked = std::move(trial);
      blocked.push_back(c);
    }
  }
  std::sort(s.blocked.begin(), s.blocked.end(), [](const Cell& a, const Cell& b) {
    return std::tie(a.second, a.first) < std::tie(b.second, b.first);
  });
  std::vector<Cell> free;
  for (int c : order)
    if (std::find(blocked.begin(), blocked.end(), c) == blocked.end())
      free.push_back({c % p.width, c / p.width});
  std::size_t next = 0;

  std::map<std::string, int> group;
  for (int i = 1; i <= p.robots; ++i) {
    std::string cap = "c" + std::to_string(i <= p.capabilities ? i : 1 + below(p.capabilities));
    ++group[cap];
    s.robots.push_back({i, cap, {0, 0}});
  }
  std::vector<Cell> ct_cells;
  for (int j = 1; j <= p.collaborative; ++j) ct_cells.push_back(free[next++]);
  s.global_spec = p.collaborative > 0 ? global_formula(p.collaborative) : "true";
  // Requirements are redrawn until some allocation exists.
  bool feasible = false;
  for (int attempt = 0; attempt < 200 && !feasible; ++attempt) {
    s.collaborative_tasks.clear();
    for (int j = 1; j <= p.collaborative; ++j) {
      CollaborativeTask t;
      t.name = "ct" + std::to_string(j);
      t.cell = ct_cells[static_cast<std::size_t>(j - 1)];
      int kinds = 1 + below(std::min(3, p.capabilities));
      while (static_cast<int>(t.requirements.size()) < kinds) {
        std::string cap = "c" + std::to_string(1 + below(p.capabilities));
        if (t.requirements.count(cap)) continue;
        t.requirements[cap] = std::min(1 + below(3), group[cap]);
      }
      s.collaborative_tasks.push_back(std::move(t));
    }
    try {
      auto m = pipeline::build_mission(s);
      allocation::AssignmentStream stream(allocation::build_model(m.sequence, s.team(), s.catalog()));
      feasible = stream.next().has_value();
    } catch (const SpecInfeasible&) {
    }
  }
  if (!feasible) throw InvariantError("could not draw feasible task requirements");
  for (auto& r : s.robots) {
    std::vector<std::string> names;
    for (int j = 1; j <= p.individual_per_robot; ++j) {
      std::string name = "r" + std::to_string(r.id) + "_ts" + std::to_string(j);
      s.individual_tasks[r.id].push_back({name, free[next++]});
      names.push_back(name);
    }
    s.individual_specs[r.id] = individual_formula(names);
  }
  for (auto& r : s.robots) r.start = free[next++];
  s.options.seed = p.seed;
  validate(s);
  return s;
}

}  // namespace mrtp::scenario
