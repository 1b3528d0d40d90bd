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

// Command-line front end: plan, gen, verify, oracle, bench.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "mrtp/error.hpp"
#include "mrtp/execution.hpp"
#include "mrtp/pipeline.hpp"
#include "mrtp/report.hpp"
#include "mrtp/scenario.hpp"

using namespace mrtp;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInfeasible = 2;
constexpr int kBudget = 3;
constexpr int kIo = 4;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

std::pair<int, int> parse_size(const std::string& s) {
  int w = 0, h = 0;
  char x = 0;
  std::istringstream in(s);
  if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || w <= 0 || h <= 0)
    throw InvariantError("grid size must look like 10x10");
  return {w, h};
}

struct PlanArgs {
  std::string scenario, out, render, csv, log;
  std::optional<std::uint64_t> seed;
  std::optional<double> budget;
  bool no_adjust = false;
  std::size_t max_assignments = 0;
};

int cmd_plan(const PlanArgs& a) {
  auto s = scenario::load_scenario(a.scenario);
  pipeline::PipelineOptions o = pipeline::options_for(s);
  if (a.seed) o.seed = *a.seed;
  if (a.budget) o.budget_seconds = *a.budget;
  o.adjust = !a.no_adjust;
  o.max_assignments = a.max_assignments;
  auto sol = pipeline::run_pipeline(s, o);
  auto doc = pipeline::to_json(sol, s);
  if (!a.out.empty()) write_file(a.out, doc.dump(2) + "\n");
  if (!a.render.empty()) write_file(a.render, report::render_svg(s, &sol));
  if (!a.log.empty()) {
    std::string lines;
    for (const auto& e : sol.adjustment.log) lines += adjust::to_json(e).dump() + "\n";
    write_file(a.log, lines);
  }
  if (!a.csv.empty()) {
    double t_plain = sol.stats.t_cal;
    if (o.adjust) {
      auto plain = o;
      plain.adjust = false;
      t_plain = pipeline::run_pipeline(s, plain).stats.t_cal;
    }
    report::BenchRow row{std::to_string(s.width) + "x" + std::to_string(s.height),
                         s.robots.size(),
                         sol.cost.total,
                         sol.initial,
                         sol.stats.t_cal,
                         t_plain,
                         sol.stats.evaluated,
                         sol.stats.filtered};
    write_file(a.csv, report::csv_header() + report::csv_row(row));
  }
  std::cout << "T_colla " << sol.cost.total << " (initial " << sol.initial << "), "
            << sol.stats.evaluated << " assignments evaluated, " << sol.stats.filtered
            << " filtered, t_cal " << sol.stats.t_cal << " s"
            << (sol.stats.budget_exhausted ? ", budget reached" : "") << "\n";
  if (a.out.empty()) std::cout << doc["robots"].dump(2) << "\n";
  return kOk;
}

int cmd_gen(std::uint64_t seed, const std::string& grid, int robots, int collab, int caps, int indiv,
            const std::string& out) {
  auto [w, h] = parse_size(grid);
  scenario::GeneratorParams p;
  p.seed = seed;
  p.width = w;
  p.height = h;
  p.robots = robots;
  p.collaborative = collab;
  p.capabilities = caps;
  p.individual_per_robot = indiv;
  auto s = scenario::generate_scenario(p);
  if (out.empty()) {
    std::cout << scenario::canonical(scenario::to_json(s));
  } else {
    scenario::save_scenario(s, out);
  }
  return kOk;
}

int cmd_verify(const std::string& scen, const std::string& plan_path) {
  auto s = scenario::load_scenario(scen);
  std::ifstream in(plan_path);
  if (!in) throw IoError("cannot open " + plan_path);
  nlohmann::json plan;
  try {
    plan = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  auto m = pipeline::build_mission(s);
  auto plans = execution::exec_plans_from_json(plan, s);
  auto trace = execution::simulate_execution(s, m.sequence, plans);
  auto rep = execution::verify_solution(s, m, plans, trace);
  auto j = execution::to_json(rep);
  localplan::Time total = 0;
  for (const auto& t : trace.robots) total += t.finish;
  j["T_colla"] = total;
  std::cout << j.dump(2) << "\n";
  return rep.ok() ? kOk : kFailed;
}

int cmd_oracle(const std::string& scen, std::size_t cap) {
  auto s = scenario::load_scenario(scen);
  execution::OracleOptions o;
  o.max_states = cap;
  auto r = execution::brute_force_joint_plan(s, o);
  std::cout << nlohmann::json{{"T_colla", r.T_colla}, {"states", r.states}}.dump(2) << "\n";
  return kOk;
}

struct BenchArgs {
  std::vector<std::string> sizes{"10x10", "15x15"};
  std::vector<int> robots{5, 10};
  int trials = 10, collab = 4, caps = 3, indiv = 4;
  std::uint64_t seed = 1;
  std::size_t max_assignments = 20;
  double budget = 300;
  std::string csv;
};

int cmd_bench(const BenchArgs& a) {
  std::string csv = report::csv_header();
  for (const auto& size : a.sizes)
    for (int n : a.robots) {
      auto [w, h] = parse_size(size);
      double ratio = 0, strict = 0;
      int solved = 0;
      for (int t = 0; t < a.trials; ++t) {
        scenario::GeneratorParams p;
        p.seed = a.seed + static_cast<std::uint64_t>(t) * 7919 + static_cast<std::uint64_t>(n * 131 + w);
        p.width = w;
        p.height = h;
        p.robots = n;
        p.collaborative = a.collab;
        p.capabilities = a.caps;
        p.individual_per_robot = a.indiv;
        auto s = scenario::generate_scenario(p);
        pipeline::PipelineOptions o;
        o.seed = p.seed;
        o.budget_seconds = a.budget;
        o.max_assignments = a.max_assignments;
        try {
          auto with = pipeline::run_pipeline(s, o);
          o.adjust = false;
          auto without = pipeline::run_pipeline(s, o);
          report::BenchRow row{size, static_cast<std::size_t>(n), with.cost.total, with.initial,
                               with.stats.t_cal, without.stats.t_cal, with.stats.evaluated,
                               with.stats.filtered};
          csv += report::csv_row(row);
          ratio += static_cast<double>(with.cost.total) / static_cast<double>(with.initial);
          strict += static_cast<double>(with.cost.total) / static_cast<double>(without.cost.total);
          ++solved;
        } catch (const Error& e) {
          std::cerr << size << " N=" << n << " trial " << t << ": " << e.what() << "\n";
        }
      }
      std::cout << size << " N=" << n << ": " << solved << "/" << a.trials << " solved, mean ratio "
                << (solved ? ratio / solved : 0.0) << ", against the best unadjusted run "
                << (solved ? strict / solved : 0.0) << "\n";
    }
  if (a.csv.empty()) {
    std::cout << csv;
  } else {
    write_file(a.csv, csv);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot collaborative task planning"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Solve a scenario");
  p->add_option("--scenario", plan.scenario, "Scenario JSON")->required();
  p->add_option("--seed", plan.seed, "Seed for the adjusting protocol");
  p->add_option("--budget", plan.budget, "Time budget in seconds");
  p->add_flag("--no-adjust", plan.no_adjust, "Skip execution-plan adjusting");
  p->add_option("--out", plan.out, "Write the plan JSON here");
  p->add_option("--render", plan.render, "Write an SVG map here");
  p->add_option("--csv", plan.csv, "Write a benchmark CSV row here");
  p->add_option("--log", plan.log, "Write the adjusting log (JSON lines) here");
  p->add_option("--max-assignments", plan.max_assignments, "Stop after this many assignments (0: no limit)");

  std::uint64_t gseed = 0;
  std::string ggrid = "5x5", gout;
  int grobots = 2, gcollab = 4, gcaps = 2, gindiv = 4;
  auto* g = app.add_subcommand("gen", "Generate a random scenario");
  g->add_option("--seed", gseed)->required();
  g->add_option("--grid", ggrid, "WxH")->required();
  g->add_option("--robots", grobots)->required();
  g->add_option("--collab", gcollab)->required();
  g->add_option("--caps", gcaps)->required();
  g->add_option("--indiv", gindiv, "Individual tasks per robot");
  g->add_option("--out", gout, "Output file (stdout when omitted)");

  std::string vscen, vplan;
  auto* v = app.add_subcommand("verify", "Simulate and check a plan");
  v->add_option("--scenario", vscen)->required();
  v->add_option("--plan", vplan)->required();

  std::string oscen;
  std::size_t ocap = 100000;
  auto* o = app.add_subcommand("oracle", "Exhaustive joint-plan baseline (two robots at most)");
  o->add_option("--scenario", oscen)->required();
  o->add_option("--max-states", ocap);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Random-suite benchmark");
  b->add_option("--sizes", bench.sizes)->delimiter(',');
  b->add_option("--robots", bench.robots)->delimiter(',');
  b->add_option("--trials", bench.trials);
  b->add_option("--collab", bench.collab);
  b->add_option("--caps", bench.caps);
  b->add_option("--indiv", bench.indiv);
  b->add_option("--seed", bench.seed);
  b->add_option("--max-assignments", bench.max_assignments);
  b->add_option("--budget", bench.budget);
  b->add_option("--csv", bench.csv);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*p) return cmd_plan(plan);
    if (*g) return cmd_gen(gseed, ggrid, grobots, gcollab, gcaps, gindiv, gout);
    if (*v) return cmd_verify(vscen, vplan);
    if (*o) return cmd_oracle(oscen, ocap);
    if (*b) return cmd_bench(bench);
  } catch (const SpecInfeasible& e) {
    std::cerr << "infeasible specification: " << e.what() << "\n";
    return kInfeasible;
  } catch (const AllocationInfeasible& e) {
    std::cerr << "infeasible allocation: " << e.what() << "\n";
    return kInfeasible;
  } catch (const PlanInfeasible& e) {
    std::cerr << "infeasible plan: " << e.what() << "\n";
    return kInfeasible;
  } catch (const BudgetExhausted& e) {
    std::cerr << e.what() << "\n";
    return kBudget;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kBudget;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return kIo;
  } catch (const SchemaError& e) {
    std::cerr << e.what() << "\n";
    return kIo;
  } catch (const SyntaxError& e) {
    std::cerr << "formula: " << e.what() << "\n";
    return kIo;
  } catch (const InvariantError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kIo;
  }
  return kFailed;
}
