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

// JSON experiment configs, run orchestration and bound checking.
//
// Config layout (unknown keys are rejected at every level):
//   problem:   {name, n, levels, k_fine, width, n_in, n_out, horizon, beta1,
//               beta2, samples, data_seed, noise: {kind, fraction, sigma, seed}}
//   solver:    SolverConfig fields plus `eps`, `stop_exact_rel`
//   baselines: [{kind: sgd | adagrad_oracle | single_level_variant, lr, i_max}]
//   runs:      {repetitions, seeds, output_dir, trace}

#ifndef MOFFO_EXPERIMENT_HPP_
#define MOFFO_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "moffo/problems.hpp"
#include "moffo/solver.hpp"

namespace moffo {

/// Invalid experiment configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BaselineSpec {
  std::string kind;
  double lr = 0.01;
  std::optional<long> i_max;
};

struct ExperimentConfig {
  nlohmann::json problem;
  SolverConfig solver;
  /// Stop when the noise-free top gradient drops below this fraction of its
  /// initial norm. Measured outside the solver; never charged.
  std::optional<double> stop_exact_rel;
  std::vector<BaselineSpec> baselines;
  std::vector<std::uint64_t> seeds = {0};
  std::string output_dir = "moffo_out";
  bool trace_lower = true;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::string& path);

/// Builds the (possibly noisy) problem described by a `problem` block.
ProblemHierarchy build_problem(const nlohmann::json& spec);

struct RunOutcome {
  std::string method;
  std::uint64_t seed = 0;
  SolveResult result;
  double wall_seconds = 0.0;
  double exact_grad_norm = 0.0;
  double exact_grad_norm0 = 0.0;
};

/// Runs one method for one seed. `method` is "mofftr" or a baseline kind.
RunOutcome run_method(const ExperimentConfig& config, const ProblemHierarchy& problem,
                      const BaselineSpec& method, std::uint64_t seed);

/// Runs every (method, seed) pair, writes trace CSVs and summary.json into
/// `out_dir`, and returns the summary. Parallel over runs, capped by
/// MOFFO_THREADS.
nlohmann::json run_experiment(const ExperimentConfig& config, const std::string& out_dir);

/// Computes theory constants, runs the solver, checks the rates. `ok` is
/// false when an asserting check fails.
nlohmann::json check_bounds(const ExperimentConfig& config, bool* ok);

/// Worker count from MOFFO_THREADS (default: hardware concurrency).
unsigned sweep_threads();

}  // namespace moffo

#endif  // MOFFO_EXPERIMENT_HPP_
