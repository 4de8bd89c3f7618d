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

// Reference single-level methods on the top level of a problem.

#ifndef MOFFO_BASELINES_HPP_
#define MOFFO_BASELINES_HPP_

#include <cstdint>

#include "moffo/problems.hpp"
#include "moffo/solver.hpp"

namespace moffo {

struct BaselineOptions {
  long i_max = 1000;
  double eps = 1e-6;
  bool eps_relative = false;
  std::uint64_t seed = 0;
};

/// x <- x - lr g.
SolveResult run_sgd(const ProblemHierarchy& problem, double lr, const BaselineOptions& opts,
                    const StopMonitor& monitor = {});

/// Textbook AdaGrad without momentum: x <- x - g / sqrt(s + sum g^2).
SolveResult run_adagrad(const ProblemHierarchy& problem, double varsigma,
                        const BaselineOptions& opts, const StopMonitor& monitor = {});

/// The multilevel solver called on the top level alone.
SolveResult run_single_level(const ProblemHierarchy& problem, SolverConfig config,
                             const StopMonitor& monitor = {});

}  // namespace moffo

#endif  // MOFFO_BASELINES_HPP_
