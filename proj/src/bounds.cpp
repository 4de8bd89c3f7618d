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

#include "moffo/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace moffo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// JSON has no infinities; they are written as strings.
nlohmann::json Num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::json Nums(const std::vector<double>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (double x : v) out.push_back(Num(x));
  return out;
}

}  // namespace

BetaConstants beta_recursion(const BetaParams& p, int levels) {
  if (levels < 1) throw DimensionError("beta_recursion: need at least one level");
  if (static_cast<int>(p.i_max.size()) < levels - 1 ||
      static_cast<int>(p.sigma_min.size()) < levels) {
    if (levels > 1) throw DimensionError("beta_recursion: i_max / sigma_min too short");
  }
  const double w = std::max(p.omega, 1.0);
  BetaConstants out;
  out.beta1.push_back(p.tau * p.varsigma_min / (2.0 * p.kappa_b));
  out.beta2.push_back(p.kappa_b);
  for (int l = 1; l < levels; ++l) {
    const double b1 = out.beta1.back();
    const double b2 = out.beta2.back();
    const double imax = p.i_max[static_cast<std::size_t>(l - 1)];
    const double smin = p.sigma_min[static_cast<std::size_t>(l)];
    if (!(smin > 0.0)) throw DomainError("beta_recursion: sigma_min must be positive");
    out.beta1.push_back(p.kappa_r / w * b1);
    out.beta2.push_back(
        std::max(b2, 2.0 * p.alpha * p.alpha * imax * (b2 + p.lipschitz) / (w * smin * smin)));
  }
  return out;
}

KappaStar kappa_star(double mu, double varsigma, double n, double gamma0, double lipschitz,
                     double beta1, double beta2) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("kappa_star: mu must lie in (0, 1)");
  KappaStar k;
  k.psi = kNaN;
  const double c = n * (beta2 + 0.5 * lipschitz);
  if (mu < 0.5) {
    k.branch = "mu<1/2";
    k.terms = {varsigma, std::pow(4.0 * c / (beta1 * (1.0 - 2.0 * mu)), 1.0 / mu),
               0.5 * std::pow((1.0 - 2.0 * mu) * gamma0 / c, 1.0 / (1.0 - 2.0 * mu))};
  } else if (mu == 0.5) {
    k.branch = "mu=1/2";
    k.psi = 4.0 * std::max(1.5 * beta1, c) / (beta1 * std::sqrt(varsigma));
    const double w = lambert_w_minus1(-1.0 / k.psi);
    k.terms = {varsigma, 0.5 * std::exp(2.0 * gamma0 / c),
               0.5 * varsigma * k.psi * k.psi * w * w};
  } else {
    k.branch = "mu>1/2";
    const double inner =
        std::pow(2.0, mu) / beta1 *
        (gamma0 + n * (beta2 + lipschitz) * std::pow(varsigma, 1.0 - 2.0 * mu) / (2.0 * mu - 1.0));
    k.terms = {varsigma, std::pow(inner, 1.0 / (1.0 - mu))};
  }
  k.value = *std::max_element(k.terms.begin(), k.terms.end());
  return k;
}

DivergentThresholds divergent_thresholds(double vartheta, double mu, double nu,
                                         double varsigma_min, double n, double alpha,
                                         double lipschitz, double beta1, double beta2,
                                         double gamma0,
                                         const std::function<double(double)>& a_func) {
  if (!(vartheta > 0.0)) throw DomainError("divergent_thresholds: vartheta must be positive");
  if (vartheta >= beta1 - 1e-9) {
    throw DomainError("divergent_thresholds: vartheta must lie below beta1 (guard 1e-9)");
  }
  if (!(mu > 0.0 && mu < 1.0) || !(nu > 0.0)) {
    throw DomainError("divergent_thresholds: bad exponents");
  }
  const double c = beta2 + 0.5 * alpha * alpha * lipschitz;
  DivergentThresholds t;
  t.i_theta = std::pow(c / (varsigma_min * (beta1 - vartheta)), 1.0 / nu) - 1.0;
  double sum_a2 = 0.0;
  if (t.i_theta >= 0.0) {
    const double count = std::floor(t.i_theta) + 1.0;
    if (!a_func) {
      sum_a2 = count;
    } else {
      constexpr double kMaxTerms = 1e7;
      if (count > kMaxTerms) throw NumericalError("divergent_thresholds: sum too long");
      for (double k = 0.0; k < count; k += 1.0) sum_a2 += a_func(k) * a_func(k);
    }
  }
  t.kappa_diamond = 2.0 / vartheta * (gamma0 + n * c * sum_a2);
  t.i_sigma = std::pow(2.0 * (t.i_theta + 1.0) * t.kappa_diamond / varsigma_min, 1.0 / (1.0 - mu));
  return t;
}

std::string_view ToString(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass:
      return "pass";
    case CheckStatus::kFail:
      return "fail";
    case CheckStatus::kInconclusive:
      return "inconclusive";
  }
  return "";
}

std::vector<double> top_gradient_norms(const Trace& trace, int top_level) {
  std::vector<double> out;
  for (const auto& rec : trace) {
    if (rec.level == top_level) out.push_back(rec.grad_norm);
  }
  return out;
}

RateReport check_adagrad_rate(std::span<const double> grad_norms, double kappa_star) {
  RateReport r;
  r.name = "adagrad_rate";
  r.iterations = static_cast<long>(grad_norms.size());
  double sum = 0.0;
  double worst = 0.0;
  long worst_i = -1;
  for (std::size_t i = 0; i < grad_norms.size(); ++i) {
    sum += grad_norms[i] * grad_norms[i];
    const double ratio = sum / kappa_star;
    if (ratio > worst) {
      worst = ratio;
      worst_i = static_cast<long>(i);
    }
  }
  r.ratio = worst;
  r.status = worst <= 1.0 ? CheckStatus::kPass : CheckStatus::kFail;
  if (r.status == CheckStatus::kFail) {
    r.detail = "sum of squared gradients exceeds kappa_star at iteration " + std::to_string(worst_i);
  }
  return r;
}

RateReport check_divergent_rate(std::span<const double> grad_norms,
                                const DivergentThresholds& t, double mu) {
  RateReport r;
  r.name = "divergent_rate";
  r.iterations = static_cast<long>(grad_norms.size());
  r.ratio = kNaN;
  const double last = static_cast<double>(grad_norms.size()) - 1.0;
  if (!(last > t.i_sigma) || !(last > t.i_theta)) {
    r.status = CheckStatus::kInconclusive;
    r.detail = "trace of " + std::to_string(grad_norms.size()) +
               " top-level iterations does not pass i_sigma = " + std::to_string(t.i_sigma);
    return r;
  }
  // First k strictly above i_sigma.
  const auto k0 = static_cast<std::size_t>(std::floor(std::max(t.i_sigma, t.i_theta)) + 1.0);
  double running_min = std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = k0; i < grad_norms.size(); ++i) {
    running_min = std::min(running_min, grad_norms[i] * grad_norms[i]);
    const double di = static_cast<double>(i);
    const double rho = running_min * (di - t.i_theta) / (t.kappa_diamond * std::pow(di + 1.0, mu));
    best = std::min(best, rho);
  }
  r.ratio = best;
  r.status = best <= 1.0 ? CheckStatus::kPass : CheckStatus::kFail;
  return r;
}

double estimate_lipschitz(const ProblemHierarchy& problem, std::uint64_t seed, int pairs,
                          double radius) {
  if (problem.lipschitz) return *problem.lipschitz;
  const GradientOracle& f = problem.exact_top();
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-radius, radius);
  double best = 0.0;
  const Index n = f.dimension();
  for (int t = 0; t < pairs; ++t) {
    Vector x = problem.x0, y = problem.x0;
    for (Index j = 0; j < n; ++j) {
      x(j) += unif(rng);
      y(j) += unif(rng);
    }
    const double dx = (x - y).norm();
    if (dx == 0.0) continue;
    best = std::max(best, (f.gradient(x) - f.gradient(y)).norm() / dx);
  }
  return 2.0 * best;
}

TheoryConstants compute_theory_constants(const ProblemHierarchy& problem,
                                         const SolverConfig& config, std::uint64_t seed) {
  ValidateConfig(config, problem.depth());
  TheoryConstants t;
  const int r = problem.depth();
  t.r = r;
  t.lipschitz = estimate_lipschitz(problem, seed);
  const auto f0 = problem.exact_top().value(problem.x0);
  if (!f0 || !problem.f_low) {
    throw std::invalid_argument("theory constants need a value oracle and f_low");
  }
  t.gamma0 = *f0 - *problem.f_low;
  t.n = static_cast<double>(problem.hierarchy.dimension(r));
  t.alpha = config.alpha;
  t.omega = r > 1 ? problem.hierarchy.transfer_into(r).omega() : 1.0;
  for (int l = 2; l < r; ++l) {
    if (problem.hierarchy.transfer_into(l).omega() != t.omega) {
      throw DomainError("theory constants need one omega for the whole hierarchy");
    }
  }
  t.tau = config.tau;
  t.kappa_b = config.kappa_b;
  t.kappa_r = config.kappa_r;
  t.mu = config.mu;
  t.nu = std::isnan(config.nu) ? config.mu : config.nu;
  t.varsigma_min = config.varsigma;
  for (const auto& f : config.floors) t.varsigma_min = std::min(t.varsigma_min, f.minCoeff());
  t.sigma_min.push_back(kNaN);
  for (int l = 2; l <= r; ++l) {
    t.sigma_min.push_back(problem.hierarchy.transfer_into(l).sigma_min());
  }
  for (long v : config.i_max) t.i_max.push_back(static_cast<double>(v));

  BetaParams bp;
  bp.tau = t.tau;
  bp.varsigma_min = t.varsigma_min;
  bp.kappa_b = t.kappa_b;
  bp.kappa_r = t.kappa_r;
  bp.omega = t.omega;
  bp.alpha = t.alpha;
  bp.lipschitz = t.lipschitz;
  bp.i_max = t.i_max;
  bp.sigma_min = t.sigma_min;
  const BetaConstants b = beta_recursion(bp, r);
  t.beta1 = b.beta1;
  t.beta2 = b.beta2;
  t.kappa_star = kappa_star(t.mu, t.varsigma_min, t.n, t.gamma0, t.lipschitz, b.beta1.back(),
                            b.beta2.back());
  if (config.weights == WeightKind::kMaxGi) {
    t.vartheta = 0.5 * b.beta1.back();
    t.divergent = divergent_thresholds(t.vartheta, t.mu, t.nu, t.varsigma_min, t.n, t.alpha,
                                       t.lipschitz, b.beta1.back(), b.beta2.back(), t.gamma0);
  } else {
    t.vartheta = kNaN;
    t.divergent = {kNaN, kNaN, kNaN};
  }
  return t;
}

nlohmann::json ToJson(const TheoryConstants& t) {
  nlohmann::json j;
  j["L"] = Num(t.lipschitz);
  j["Gamma0"] = Num(t.gamma0);
  j["beta1"] = Nums(t.beta1);
  j["beta2"] = Nums(t.beta2);
  j["kappa_star"] = Num(t.kappa_star.value);
  j["kappa_star_branch"] = t.kappa_star.branch;
  j["kappa_star_terms"] = Nums(t.kappa_star.terms);
  j["psi"] = Num(t.kappa_star.psi);
  j["vartheta"] = Num(t.vartheta);
  j["i_theta"] = Num(t.divergent.i_theta);
  j["i_sigma"] = Num(t.divergent.i_sigma);
  j["kappa_diamond"] = Num(t.divergent.kappa_diamond);
  j["n"] = Num(t.n);
  j["r"] = t.r;
  j["alpha"] = Num(t.alpha);
  j["omega"] = Num(t.omega);
  j["tau"] = Num(t.tau);
  j["varsigma_min"] = Num(t.varsigma_min);
  j["kappa_B"] = Num(t.kappa_b);
  j["kappa_R"] = Num(t.kappa_r);
  j["mu"] = Num(t.mu);
  j["nu"] = Num(t.nu);
  j["i_max"] = Nums(t.i_max);
  j["sigma_min"] = Nums(t.sigma_min);
  return j;
}

nlohmann::json ToJson(const RateReport& r) {
  nlohmann::json j;
  j["status"] = std::string(ToString(r.status));
  j["max_ratio"] = Num(r.ratio);
  j["iterations"] = r.iterations;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

}  // namespace moffo
