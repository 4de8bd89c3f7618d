// Copyright 2026 The moffo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// moffo command-line tool.
//
// Exit codes: 0 ok, 2 invalid config, 3 runtime failure, 4 bound violated,
// 5 gradient check failed.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "moffo/experiment.hpp"
#include "moffo/problems.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitBound = 4;
constexpr int kExitGradcheck = 5;

int Gradcheck(const std::string& only) {
  bool all_ok = true;
  bool matched = false;
  for (const auto& info : moffo::problem_registry()) {
    if (!only.empty() && info.name != only) continue;
    matched = true;
    const moffo::ProblemHierarchy p = moffo::make_default_problem(info.name);
    for (int level = 1; level <= p.depth(); ++level) {
      const moffo::GradientOracle& oracle = *p.exact[static_cast<std::size_t>(level - 1)];
      // Probe away from x0 too; x0 = 0 is a special point for several problems.
      std::mt19937_64 rng(static_cast<std::uint64_t>(level));
      std::normal_distribution<double> normal(0.0, 0.5);
      moffo::Vector x(oracle.dimension());
      for (auto& v : x) v = normal(rng);
      const double err = moffo::finite_difference_check(p, level, x, info.gradcheck_step, 1);
      const bool ok = err <= info.gradcheck_threshold;
      all_ok = all_ok && ok;
      std::printf("%-10s level %d  n=%-6ld rel_err=%.3e  threshold=%.0e  %s\n", info.name.c_str(),
                  level, static_cast<long>(oracle.dimension()), err, info.gradcheck_threshold,
                  ok ? "PASS" : "FAIL");
    }
  }
  if (!matched) {
    std::cerr << "unknown problem '" << only << "'\n";
    return kExitConfig;
  }
  return all_ok ? 0 : kExitGradcheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel objective-function-free trust-region optimizer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run the solver and baselines from a JSON config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides runs.output_dir)");
  run->add_option("--seed", seed, "Single seed (overrides runs.seeds)");

  std::string bounds_config;
  std::string bounds_json;
  auto* bounds = app.add_subcommand("check-bounds", "Evaluate theory constants and check rates");
  bounds->add_option("config", bounds_config, "Experiment config (JSON)")->required();
  bounds->add_option("--json", bounds_json,
                     "Report path (default: <runs.output_dir>/bounds_report.json)");

  std::string gc_problem;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gradcheck->add_option("--problem", gc_problem, "Restrict to one built-in problem");

  auto* list = app.add_subcommand("list-problems", "List built-in problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      moffo::ExperimentConfig config = moffo::load_experiment_config(config_path);
      if (seed) config.seeds = {*seed};
      const std::string dir = out_dir.empty() ? config.output_dir : out_dir;
      const nlohmann::json summary = moffo::run_experiment(config, dir);
      for (const auto& r : summary["runs"]) {
        std::printf("%-22s seed %-4llu %-18s iters %-6ld cost %-12.4f |g| %.3e\n",
                    r["method"].get<std::string>().c_str(),
                    static_cast<unsigned long long>(r["seed"].get<std::uint64_t>()),
                    r["status"].get<std::string>().c_str(), r["iterations"].get<long>(),
                    r["cost"].get<double>(), r["final_grad_norm"].get<double>());
      }
      std::printf("wrote %s/summary.json\n", dir.c_str());
      return 0;
    }
    if (*bounds) {
      const moffo::ExperimentConfig config = moffo::load_experiment_config(bounds_config);
      bool ok = true;
      const nlohmann::json report = moffo::check_bounds(config, &ok);
      std::cout << report.dump(2) << '\n';
      std::filesystem::path path = bounds_json;
      if (path.empty()) {
        std::filesystem::create_directories(config.output_dir);
        path = std::filesystem::path(config.output_dir) / "bounds_report.json";
      }
      std::ofstream(path) << report.dump(2) << '\n';
      return ok ? 0 : kExitBound;
    }
    if (*gradcheck) return Gradcheck(gc_problem);
    if (*list) {
      for (const auto& info : moffo::problem_registry()) {
        std::printf("%-10s %s\n", info.name.c_str(), info.description.c_str());
      }
      return 0;
    }
  } catch (const moffo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
