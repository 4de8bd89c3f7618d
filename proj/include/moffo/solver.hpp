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

// Recursive multilevel trust-region driver.

#ifndef MOFFO_SOLVER_HPP_
#define MOFFO_SOLVER_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moffo/common.hpp"
#include "moffo/hierarchy.hpp"
#include "moffo/step.hpp"
#include "moffo/weights.hpp"

namespace moffo {

/// Builds B for the Taylor model at (level, x, g). Must respect kappa_B.
using HessianProvider = std::function<HessianModel(int level, const Vector& x, const Vector& g)>;

struct SolverConfig {
  double kappa_r = 0.01;
  double alpha = 5.0;
  double tau = 1.0;
  double kappa_b = 1.0;
  double varsigma = 0.01;
  /// Optional per-level floors, index l-1. Overrides `varsigma` when set.
  std::vector<Vector> floors;
  double mu = 0.5;
  /// Growth exponent for MAXGI; NaN means nu = mu.
  double nu = std::numeric_limits<double>::quiet_NaN();
  WeightKind weights = WeightKind::kAdagradLike;

  double eps_top = 1e-6;
  /// Interpret eps_top relative to ||g_{r,0}||.
  bool eps_relative = false;
  /// Iteration budget per level, index l-1.
  std::vector<long> i_max = {1000};
  int pre_smooth = 1;
  int post_smooth = 0;
  double lower_eps_factor = 0.1;

  /// Stop a lower-level run as soon as its linear decrease drops below
  /// kappa_R times the one of the calling iteration.
  bool strict_descent_monitoring = false;
  /// Weak coherence: no correction term, recursion only if the defect
  /// ||grad f_{l-1}(R x) - R g|| is at most kappa_E * delta_{l-1}.
  std::optional<double> weak_coherence_kappa_e;

  /// Multiplier on the raw radius (1 for the analysed method).
  double step_scale = 1.0;
  bool refine_taylor = false;
  HessianProvider hessian;  // empty: B = 0

  std::uint64_t seed = 0;
  /// Keep lower-level records in the trace.
  bool record_lower = true;
  /// Evaluate the value oracle for the f_diag column. Never read by the solver.
  bool diagnostics = false;
  /// Re-check the structural inequalities at run time and throw on violation.
  bool check_invariants = true;
};

/// Throws DomainError naming the offending field.
void ValidateConfig(const SolverConfig& config, int depth);

enum class IterationKind { kTaylor, kRecursive, kFinal };
std::string_view ToString(IterationKind kind);

struct IterationRecord {
  int level = 0;
  long iter = 0;
  IterationKind kind = IterationKind::kFinal;
  double grad_norm = 0.0;
  double step_norm = 0.0;
  double delta_hat_norm = std::numeric_limits<double>::quiet_NaN();
  double delta_norm = std::numeric_limits<double>::quiet_NaN();
  double w_min = std::numeric_limits<double>::quiet_NaN();
  double w_max = std::numeric_limits<double>::quiet_NaN();
  double cost_cum = 0.0;
  double f_diag = std::numeric_limits<double>::quiet_NaN();
};

using Trace = std::vector<IterationRecord>;

/// Gradient evaluations per level in full-dataset units, and the weighted
/// total C = sum_l 2^(l-r) #_l.
class CostLedger {
 public:
  explicit CostLedger(int depth = 1);

  void Charge(int level, double fraction);
  int depth() const { return static_cast<int>(counts_.size()); }
  double count(int level) const;
  double total() const { return total_; }

 private:
  std::vector<double> counts_;
  double total_ = 0.0;
};

enum class SolveStatus { kConverged, kMaxIterations, kStoppedByMonitor };
std::string_view ToString(SolveStatus status);

struct SolveResult {
  Vector x;
  Trace trace;
  CostLedger ledger;
  SolveStatus status = SolveStatus::kMaxIterations;
  long top_iterations = 0;
  double final_grad_norm = 0.0;
  /// Retained lower iterations per recursion (strict descent monitoring).
  std::vector<long> lower_retained;
  /// Number of times each runtime invariant was evaluated.
  std::map<std::string, long> invariant_checks;
  /// Recursion attempts vetoed by the descent test or the coherence test.
  long recursions = 0;
  long vetoed_recursions = 0;
};

/// Called after every top-level gradient evaluation; returning true stops
/// the run. Used for out-of-band stopping rules.
using StopMonitor = std::function<bool(const Vector& x, const Vector& g, long iter)>;

/// True when sum (Rg)_j^2 / w_low_j >= kappa_R * sum g_j^2 / w_j.
bool should_recurse(const Vector& rg, const Vector& w_low, const Vector& g, const Vector& w,
                    double kappa_r);

enum class CycleAction { kTaylor, kTryRecursive };

/// V-cycle position of iteration i: pre_smooth Taylor iterations, one
/// recursive attempt, post_smooth Taylor iterations, repeated.
CycleAction cycle_shape(int level, long i, int pre_smooth, int post_smooth);

/// Number of leading lower iterations whose linear decrease stays at or above
/// kappa_R * sum g_j^2 / w_j.
long monitor_new_cond(const std::vector<double>& lower_decreases, const Vector& g,
                      const Vector& w, double kappa_r);

/// Top-level call with delta = +inf and the configured floors.
SolveResult solve(const LevelHierarchy& hierarchy, const SolverConfig& config, const Vector& x0,
                  const StopMonitor& monitor = {});

}  // namespace moffo

#endif  // MOFFO_SOLVER_HPP_
