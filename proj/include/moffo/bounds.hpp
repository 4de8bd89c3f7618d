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

// Complexity constants and rate checks over solver traces.

#ifndef MOFFO_BOUNDS_HPP_
#define MOFFO_BOUNDS_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "moffo/common.hpp"
#include "moffo/problems.hpp"
#include "moffo/solver.hpp"

namespace moffo {

/// Inputs of the beta recursion. `i_max[l-1]` is the budget of level l and
/// `sigma_min[l-1]` the smallest singular value of P_l (entry 0 unused).
struct BetaParams {
  double tau = 1.0;
  double varsigma_min = 0.01;
  double kappa_b = 1.0;
  double kappa_r = 0.01;
  double omega = 0.5;
  double alpha = 5.0;
  double lipschitz = 1.0;
  std::vector<double> i_max;
  std::vector<double> sigma_min;
};

struct BetaConstants {
  std::vector<double> beta1;  // index l-1
  std::vector<double> beta2;
};

/// beta_{1,1} = tau s_min / (2 kappa_B), beta_{1,l+1} = kappa_R beta_{1,l} / max(omega, 1),
/// beta_{2,1} = kappa_B,
/// beta_{2,l+1} = max(beta_{2,l}, 2 alpha^2 i_l (beta_{2,l} + L) / (max(omega, 1) sigma_min[P_{l+1}]^2)).
BetaConstants beta_recursion(const BetaParams& params, int levels);

/// Lower real branch W_{-1} on [-1/e, 0): the solution w <= -1 of w e^w = x.
double lambert_w_minus1(double x);

/// |W_{-1}(-e^{-x-1})| <= 1 + sqrt(2x) + x.
bool lambert_bound_check(double x);

struct KappaStar {
  double value = 0.0;
  double psi = 0.0;  // only for mu = 1/2, NaN otherwise
  std::string branch;
  std::vector<double> terms;  // arguments of the max, in order
};

KappaStar kappa_star(double mu, double varsigma, double n, double gamma0, double lipschitz,
                     double beta1, double beta2);

struct DivergentThresholds {
  double i_theta = 0.0;
  double i_sigma = 0.0;
  double kappa_diamond = 0.0;
};

/// Thresholds of the divergent-weight rate. `a_func` defaults to a(k) = 1.
DivergentThresholds divergent_thresholds(double vartheta, double mu, double nu,
                                         double varsigma_min, double n, double alpha,
                                         double lipschitz, double beta1, double beta2,
                                         double gamma0,
                                         const std::function<double(double)>& a_func = {});

enum class CheckStatus { kPass, kFail, kInconclusive };
std::string_view ToString(CheckStatus status);

struct RateReport {
  std::string name;
  CheckStatus status = CheckStatus::kInconclusive;
  /// Largest (adagrad) or smallest (divergent) observed ratio; NaN if none.
  double ratio = 0.0;
  long iterations = 0;
  std::string detail;
};

/// Top-level gradient norms in iteration order.
std::vector<double> top_gradient_norms(const Trace& trace, int top_level);

/// sum_{k<=i} ||g_k||^2 <= kappa_star for every i.
RateReport check_adagrad_rate(std::span<const double> grad_norms, double kappa_star);

/// min over i of min_{k in (i_sigma, i]} ||g_k||^2 (i - i_theta) / (kappa_diamond (i+1)^mu);
/// passes when that minimum is at most 1.
RateReport check_divergent_rate(std::span<const double> grad_norms,
                                const DivergentThresholds& thresholds, double mu);

/// Exact L when the problem has one; otherwise twice the largest difference
/// quotient over `pairs` random point pairs in a box of half-width `radius`
/// around x0.
double estimate_lipschitz(const ProblemHierarchy& problem, std::uint64_t seed, int pairs = 1000,
                          double radius = 1.0);

struct TheoryConstants {
  double lipschitz = 0.0;
  double gamma0 = 0.0;
  std::vector<double> beta1;
  std::vector<double> beta2;
  KappaStar kappa_star;
  double vartheta = 0.0;
  DivergentThresholds divergent;
  double n = 0.0;
  int r = 1;
  double alpha = 0.0;
  double omega = 1.0;
  double tau = 0.0;
  double varsigma_min = 0.0;
  double kappa_b = 0.0;
  double kappa_r = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  std::vector<double> i_max;
  std::vector<double> sigma_min;
};

/// Evaluates every constant for `problem` under `config`. For MAXGI the
/// divergent thresholds use vartheta = beta_{1,r} / 2.
TheoryConstants compute_theory_constants(const ProblemHierarchy& problem,
                                         const SolverConfig& config, std::uint64_t seed = 0);

nlohmann::json ToJson(const TheoryConstants& constants);
nlohmann::json ToJson(const RateReport& report);

}  // namespace moffo

#endif  // MOFFO_BOUNDS_HPP_
