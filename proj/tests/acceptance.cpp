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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. `moffo_acceptance 6 7` runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "moffo/bounds.hpp"
#include "moffo/experiment.hpp"
#include "moffo/hierarchy.hpp"
#include "moffo/problems.hpp"
#include "moffo/solver.hpp"
#include "moffo/step.hpp"
#include "moffo/trace_io.hpp"
#include "moffo/weights.hpp"

namespace moffo {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Textbook momentum-less AdaGrad on the 2-D quadratic, written against the
// closed-form gradient only.
std::vector<Vector> ReferenceAdagrad(const Vector& d, const Vector& x0, double varsigma, int iters) {
  std::vector<Vector> xs;
  Vector x = x0;
  Vector acc = Vector::Zero(x.size());
  for (int k = 0; k <= iters; ++k) {
    xs.push_back(x);
    const Vector g = d.cwiseProduct(x);
    acc.array() += g.array().square();
    for (Index j = 0; j < x.size(); ++j) x(j) -= g(j) / std::sqrt(varsigma + acc(j));
  }
  return xs;
}

Outcome Criterion1() {
  const auto start = Clock::now();
  const Vector d = Vector::LinSpaced(2, 1.0, 2.0);
  const Vector x0 = (Vector(2) << 3.0, -4.0).finished();
  ProblemHierarchy p = diagonal_quadratic(d, x0);
  SolverConfig c;
  c.mu = 0.5;
  c.tau = 1.0;
  c.i_max = {1000};
  c.eps_top = 0.0;
  std::vector<Vector> xs;
  solve(p.hierarchy, c, p.x0, [&xs](const Vector& x, const Vector&, long) {
    xs.push_back(x);
    return false;
  });
  const std::vector<Vector> ref = ReferenceAdagrad(d, x0, c.varsigma, 1000);
  double worst = 0.0;
  for (std::size_t k = 0; k < std::min(xs.size(), ref.size()); ++k) {
    for (Index j = 0; j < 2; ++j) {
      const double scale = std::max(std::abs(ref[k](j)), 1e-300);
      worst = std::max(worst, std::abs(xs[k](j) - ref[k](j)) / scale);
    }
  }
  const double secs = Seconds(start);
  char buf[160];
  std::snprintf(buf, sizeof buf, "iterates=%zu max_rel_diff=%.2e time=%.3fs", xs.size(), worst,
                secs);
  return {xs.size() == 1001 && worst <= 1e-12 && secs < 1.0, buf};
}

SolverConfig RateConfig(double mu, int depth) {
  SolverConfig c;
  c.mu = mu;
  c.eps_top = 0.0;
  c.i_max.assign(static_cast<std::size_t>(depth), 3);
  c.i_max.back() = 10000;
  return c;
}

Outcome Criterion2() {
  bool all = true;
  std::string detail;
  for (int depth : {1, 3}) {
    ProblemHierarchy p = depth == 1 ? quadratic_2d() : laplacian_quadratic_1d(63, 3);
    for (double mu : {0.1, 0.5, 0.9}) {
      const auto start = Clock::now();
      const SolverConfig c = RateConfig(mu, depth);
      const TheoryConstants k = compute_theory_constants(p, c);
      const SolveResult res = solve(p.hierarchy, c, p.x0);
      const std::vector<double> norms = top_gradient_norms(res.trace, depth);
      const RateReport r = check_adagrad_rate(norms, k.kappa_star.value);
      const double secs = Seconds(start);
      // Short traces only when the gradient underflowed to exactly zero.
      const bool full = norms.size() >= 10001 || (res.status == SolveStatus::kConverged &&
                                                   res.final_grad_norm == 0.0);
      const bool ok = r.status == CheckStatus::kPass && full && secs < 10.0;
      all = all && ok;
      char buf[200];
      std::snprintf(buf, sizeof buf, "\n    r=%d mu=%.1f Gamma0=%.4g kappa*=%.3e sum/kappa*=%.3e i=%zu %.2fs %s",
                    depth, mu, k.gamma0, k.kappa_star.value, r.ratio, norms.size() - 1, secs,
                    ok ? "ok" : "FAIL");
      detail += buf;
    }
  }
  return {all, detail};
}

Outcome Criterion3() {
  ProblemHierarchy p = quadratic_2d();
  SolverConfig c;
  c.weights = WeightKind::kMaxGi;
  c.mu = 0.1;
  c.nu = 0.1;
  c.eps_top = 0.0;
  const TheoryConstants k = compute_theory_constants(p, c);
  constexpr double kCap = 1e5;
  const double i_sigma = k.divergent.i_sigma;
  const bool capped = !std::isfinite(i_sigma) || 2.0 * i_sigma > kCap;
  c.i_max = {static_cast<long>(capped ? kCap : std::max(2.0 * i_sigma, 10.0))};
  const SolveResult res = solve(p.hierarchy, c, p.x0);
  const RateReport r = check_divergent_rate(top_gradient_norms(res.trace, 1), k.divergent, c.mu);
  char buf[240];
  std::snprintf(buf, sizeof buf, "i_theta=%.3e i_sigma=%.3e kappa_diamond=%.3e run=%ld status=%s min_ratio=%.3e",
                k.divergent.i_theta, i_sigma, k.divergent.kappa_diamond, res.top_iterations,
                std::string(ToString(r.status)).c_str(), r.ratio);
  const bool ok = r.status == CheckStatus::kPass || (capped && r.status == CheckStatus::kInconclusive);
  return {ok, buf};
}

// Random small problem with a random admissible configuration.
struct FuzzCase {
  ProblemHierarchy problem;
  SolverConfig config;
};

FuzzCase RandomCase(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  FuzzCase fc;
  const int kind = static_cast<int>(unit(rng) * 3.0);
  if (kind == 0) {
    const Index n = 1 + static_cast<Index>(unit(rng) * 6);
    Vector d(n), x0(n);
    for (Index j = 0; j < n; ++j) {
      d(j) = std::pow(10.0, 3.0 * unit(rng) - 1.0);
      x0(j) = 3.0 * normal(rng);
    }
    fc.problem = diagonal_quadratic(d, x0);
  } else if (kind == 1) {
    const int levels = 2 + static_cast<int>(unit(rng) * 2.0);
    fc.problem = laplacian_quadratic_1d(levels == 2 ? 15 : 31, levels);
  } else {
    fc.problem = nonconvex_chain_1d(15, 2 + static_cast<int>(unit(rng) * 2.0));
  }
  const int depth = fc.problem.depth();
  SolverConfig& c = fc.config;
  c.kappa_r = 0.001 + 0.9 * unit(rng);
  c.alpha = 1.0 + 9.0 * unit(rng);
  c.tau = 0.05 + 0.95 * unit(rng);
  c.varsigma = 1e-3 + unit(rng) * (1.0 - 1e-3);
  c.mu = 0.05 + 0.9 * unit(rng);
  if (unit(rng) < 0.3) {
    c.weights = WeightKind::kMaxGi;
    c.nu = c.mu * (0.1 + 0.9 * unit(rng));
  }
  c.eps_top = 0.0;
  c.i_max.assign(static_cast<std::size_t>(depth), 0);
  for (auto& v : c.i_max) v = 1 + static_cast<long>(unit(rng) * 4.0);
  c.i_max.back() = 10 + static_cast<long>(unit(rng) * 40.0);
  c.pre_smooth = 1 + static_cast<int>(unit(rng) * 2.0);
  c.post_smooth = static_cast<int>(unit(rng) * 2.0);
  c.strict_descent_monitoring = unit(rng) < 0.3;
  if (unit(rng) < 0.2) c.weak_coherence_kappa_e = std::pow(10.0, 4.0 * unit(rng) - 1.0);
  c.refine_taylor = unit(rng) < 0.3;
  c.seed = rng();
  if (!fc.problem.hessians.empty() && unit(rng) < 0.5) {
    const auto hessians = fc.problem.hessians;
    // Gershgorin bound of the finest stiffness with some headroom.
    const double kb = 4.0 * std::pow(32.0, 2) * 4.0 + 1e3;
    c.kappa_b = kb;
    c.hessian = [hessians, kb](int level, const Vector& x, const Vector&) {
      return hessians[static_cast<std::size_t>(level - 1)](x, kb);
    };
  } else {
    c.kappa_b = 1.0 + 10.0 * unit(rng);
  }
  return fc;
}

Outcome Criterion4() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  long violations = 0;
  long errors = 0;
  std::map<std::string, long> counts;
  std::string first;

  // Solver runs: every structural inequality is re-checked at run time.
  for (int t = 0; t < 10000; ++t) {
    FuzzCase fc = RandomCase(rng);
    fc.config.check_invariants = true;
    try {
      const SolveResult res = solve(fc.problem.hierarchy, fc.config, fc.problem.x0);
      for (const auto& [name, n] : res.invariant_checks) counts[name] += n;
    } catch (const InvariantViolation& e) {
      ++violations;
      if (first.empty()) first = "run " + std::to_string(t) + ": " + e.what();
    } catch (const std::exception& e) {
      ++errors;
      if (first.empty()) first = "run " + std::to_string(t) + ": " + e.what();
    }
  }

  // Direct step and lower-weight checks, 10^4 each.
  for (int t = 0; t < 10000; ++t) {
    const Index n = 1 + static_cast<Index>(unit(rng) * 12);
    const double varsigma = 1e-3 + unit(rng) * (1.0 - 1e-3);
    const double kappa_b = 1.0 + 20.0 * unit(rng);
    const double tau = 0.05 + 0.95 * unit(rng);
    Vector g(n), w(n), d(n);
    for (Index j = 0; j < n; ++j) {
      g(j) = normal(rng) * std::pow(10.0, 4.0 * unit(rng) - 2.0);
      w(j) = varsigma + std::abs(normal(rng)) * 10.0;
      d(j) = (2.0 * unit(rng) - 1.0) * kappa_b;
    }
    const HessianModel b =
        t % 3 == 0 ? HessianModel::Zero(kappa_b) : HessianModel::Diagonal(d, kappa_b);
    const TrustRegion tr = compute_radius(w, g, true, 0.0, 1.0);
    const Vector s = taylor_step(g, tr.radius, b, tau, t % 2 == 0);
    const Vector s_q = cauchy_step(g, tr.radius, b);
    const bool in_box = (s.cwiseAbs().array() <= tr.radius.array() * (1.0 + 1e-15)).all();
    const bool gcp = b.Model(g, s) <= tau * b.Model(g, s_q) + 1e-12 * std::abs(b.Model(g, s_q));
    const bool gs = TaylorDecreaseSlack(g, s, w, tr.radius, tau, varsigma, kappa_b) >=
                    -1e-12 * (1.0 + std::abs(g.dot(s)));
    const bool stepnorm = s.norm() <= tr.radius.norm() * (1.0 + 1e-15);

    Vector floors(n), rg(n);
    for (Index j = 0; j < n; ++j) {
      floors(j) = 1e-4 + unit(rng) * (1.0 - 1e-4);
      rg(j) = normal(rng) * std::pow(10.0, 6.0 * unit(rng) - 3.0);
    }
    const double p_norm = 0.5 + 2.0 * unit(rng);
    const double alpha = 1.0 + 10.0 * unit(rng);
    const double delta = std::pow(10.0, 6.0 * unit(rng) - 4.0);
    const double bound = alpha * delta / p_norm;
    const double w_upper_min = unit(rng) * 5.0;
    const double w_upper_norm = std::pow(10.0, 4.0 * unit(rng) - 1.0);
    const Vector wd = init_lower_divergent(floors, p_norm, rg, alpha, delta, w_upper_min);
    const Vector wa = init_lower_adagrad(floors, p_norm, rg, alpha, delta, w_upper_norm);
    const bool low_tr = rg.cwiseAbs().cwiseQuotient(wd).norm() <= bound * (1.0 + 1e-12) &&
                        rg.cwiseAbs().cwiseQuotient(wa).norm() <= bound * (1.0 + 1e-12);
    const bool rw = wd.minCoeff() >= w_upper_min && wa.norm() >= w_upper_norm;
    for (auto [name, ok] : {std::pair{"step_in_box", in_box}, {"cauchy_fraction", gcp},
                            {"taylor_decrease_direct", gs}, {"stepnorm_direct", stepnorm},
                            {"lower_radius_init", low_tr}, {"lower_weight_growth_init", rw}}) {
      ++counts[name];
      if (!ok) {
        ++violations;
        if (first.empty()) first = std::string(name) + " at case " + std::to_string(t);
      }
    }
  }
  std::string detail = "violations=" + std::to_string(violations) +
                       " errors=" + std::to_string(errors);
  for (const auto& [name, n] : counts) detail += "\n    " + name + ": " + std::to_string(n);
  if (!first.empty()) detail += "\n    first: " + first;
  char buf[64];
  std::snprintf(buf, sizeof buf, "\n    time=%.1fs", Seconds(start));
  detail += buf;
  const bool all_seen = counts["coherence_identity"] > 0 && counts["step_cap"] > 0 &&
                        counts["lower_radius"] > 0 && counts["lower_weight_growth"] > 0;
  return {violations == 0 && errors == 0 && all_seen, detail};
}

Outcome Criterion5() {
  std::vector<std::pair<std::string, TransferOperator>> ops = {
      {"linear_interpolation_1d(9)", linear_interpolation_1d(9)},
      {"dirichlet_interpolation_1d(15)", dirichlet_interpolation_1d(15)},
      {"depth_prolongation(5,7,3)", build_depth_prolongation(5, 7, 3)}};
  for (const auto& info : problem_registry()) {
    const ProblemHierarchy p = make_default_problem(info.name);
    for (int level = 2; level <= p.depth(); ++level) {
      ops.emplace_back(info.name + " into level " + std::to_string(level),
                       p.hierarchy.transfer_into(level));
    }
  }
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  long bad = 0;
  double worst = 0.0;
  for (const auto& [name, op] : ops) {
    for (int k = 0; k < 1000; ++k) {
      Vector g(op.fine_dim()), s(op.coarse_dim());
      for (auto& v : g) v = normal(rng);
      for (auto& v : s) v = normal(rng);
      const double lhs = g.dot(op.Prolong(s));
      const double diff = std::abs(lhs - op.Restrict(g).dot(s) / op.omega());
      worst = std::max(worst, diff / (1.0 + std::abs(lhs)));
      if (diff > 1e-10 * (1.0 + std::abs(lhs))) ++bad;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "operators=%zu instances=%zu violations=%ld worst_rel=%.2e",
                ops.size(), ops.size() * 1000, bad, worst);
  return {bad == 0, buf};
}

json LaplacianConfig(bool noisy) {
  json doc = {
      {"problem", {{"name", "laplacian"}, {"n", 255}, {"levels", 3}}},
      {"solver",
       {{"alpha", 5.0},
        {"mu", 0.5},
        {"eps", 0.0},
        {"hessian", "exact"},
        {"kappa_B", noisy ? 1.2e6 : 3e5},
        {"i_max", noisy ? json::array({1, 1, 300000}) : json::array({2, 2, 300000})},
        {"stop_exact_rel", noisy ? 1e-2 : 1e-3}}},
      {"baselines", json::array({{{"kind", "single_level_variant"}}})}};
  if (noisy) {
    doc["solver"]["hessian_scale"] = 4.0;
    doc["problem"]["noise"] = {{"kind", "minibatch"}, {"fraction", 0.25}, {"seed", 3}};
  }
  return doc;
}

Outcome Criterion6() {
  const auto start = Clock::now();
  const ExperimentConfig c = parse_experiment_config(LaplacianConfig(false));
  const ProblemHierarchy p = build_problem(c.problem);
  const RunOutcome ml = run_method(c, p, BaselineSpec{"mofftr"}, 0);
  const RunOutcome sl = run_method(c, p, BaselineSpec{"single_level_variant"}, 0);
  const double c3 = ml.result.ledger.total(), c1 = sl.result.ledger.total();
  const bool reached = ml.result.status == SolveStatus::kStoppedByMonitor &&
                       sl.result.status == SolveStatus::kStoppedByMonitor;
  const double secs = Seconds(start);
  char buf[240];
  std::snprintf(buf, sizeof buf, "C(r=3)=%.1f (%ld it) C(r=1)=%.1f (%ld it) ratio=%.2f time=%.1fs",
                c3, ml.result.top_iterations, c1, sl.result.top_iterations, c1 / c3, secs);
  return {reached && c3 <= c1 / 1.2 && secs < 30.0, buf};
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Outcome Criterion7() {
  const auto start = Clock::now();
  ExperimentConfig c = parse_experiment_config(LaplacianConfig(true));
  c.seeds.clear();
  for (std::uint64_t s = 0; s < 10; ++s) c.seeds.push_back(s);
  c.output_dir = "";
  const ProblemHierarchy p = build_problem(c.problem);
  std::vector<double> ml, sl;
  bool reached = true;
  for (std::uint64_t seed : c.seeds) {
    const RunOutcome a = run_method(c, p, BaselineSpec{"mofftr"}, seed);
    const RunOutcome b = run_method(c, p, BaselineSpec{"single_level_variant"}, seed);
    reached = reached && a.result.status == SolveStatus::kStoppedByMonitor &&
              b.result.status == SolveStatus::kStoppedByMonitor;
    ml.push_back(a.result.ledger.total());
    sl.push_back(b.result.ledger.total());
  }
  const double m3 = Median(ml), m1 = Median(sl);
  char buf[200];
  std::snprintf(buf, sizeof buf, "median C(r=3)=%.1f median C(r=1)=%.1f ratio=%.2f all_reached=%d time=%.1fs",
                m3, m1, m1 / m3, reached ? 1 : 0, Seconds(start));
  return {reached && m3 <= m1, buf};
}

Outcome Criterion8() {
  const double branch = lambert_w_minus1(-1.0 / std::numbers::e);
  bool ok = std::abs(branch + 1.0) <= 1e-8;
  double worst = 0.0;
  const double lo = std::log(1e-8), hi = std::log(1.0 / std::numbers::e);
  for (int k = 0; k < 100; ++k) {
    const double x = -std::exp(lo + (hi - lo) * (k + 0.5) / 100.0);
    const double w = lambert_w_minus1(x);
    const double res = std::abs(w * std::exp(w) - x) / std::abs(x);
    worst = std::max(worst, res);
    ok = ok && w <= -1.0 && res <= 1e-12;
  }
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unif(0.0, 50.0);
  int bound_fail = 0;
  for (int k = 0; k < 100; ++k) {
    double x = unif(rng);
    while (x == 0.0) x = unif(rng);
    if (!lambert_bound_check(x)) ++bound_fail;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "W(-1/e)=%.12f max_rel_residual=%.2e bound_failures=%d", branch,
                worst, bound_fail);
  return {ok && bound_fail == 0, buf};
}

Outcome Criterion9() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& info : problem_registry()) {
    const ProblemHierarchy p = make_default_problem(info.name);
    for (int level = 1; level <= p.depth(); ++level) {
      std::mt19937_64 rng(static_cast<std::uint64_t>(level));
      std::normal_distribution<double> normal(0.0, 0.5);
      Vector x(p.exact[static_cast<std::size_t>(level - 1)]->dimension());
      for (auto& v : x) v = normal(rng);
      const double err = finite_difference_check(p, level, x, info.gradcheck_step, 1);
      const bool pass = err <= info.gradcheck_threshold;
      ok = ok && pass;
      char buf[120];
      std::snprintf(buf, sizeof buf, "\n    %-9s level %d rel_err=%.2e threshold=%.0e %s",
                    info.name.c_str(), level, err, info.gradcheck_threshold, pass ? "ok" : "FAIL");
      detail += buf;
    }
  }
  const double secs = Seconds(start);
  char buf[48];
  std::snprintf(buf, sizeof buf, "\n    time=%.1fs", secs);
  detail += buf;
  return {ok && secs < 20.0, detail};
}

Outcome Criterion10() {
  struct Case {
    std::string name;
    ProblemHierarchy problem;
    SolverConfig config;
  };
  std::vector<Case> cases;
  {
    SolverConfig c;
    c.i_max = {1000};
    c.eps_top = 0.0;
    cases.push_back({"adagrad_equivalence", quadratic_2d(), c});
  }
  for (double mu : {0.1, 0.5, 0.9}) {
    cases.push_back({"rate_r1_mu" + std::to_string(mu).substr(0, 3), quadratic_2d(),
                     RateConfig(mu, 1)});
    cases.push_back({"rate_r3_mu" + std::to_string(mu).substr(0, 3),
                     laplacian_quadratic_1d(63, 3), RateConfig(mu, 3)});
  }
  {
    const ExperimentConfig ec = parse_experiment_config(LaplacianConfig(false));
    SolverConfig c = ec.solver;
    c.eps_top = 1e-3;
    c.eps_relative = true;
    cases.push_back({"multilevel_benefit", build_problem(ec.problem), c});
  }
  bool ok = true;
  std::string detail;
  for (Case& k : cases) {
    SolverConfig off = k.config, on = k.config;
    off.diagnostics = false;
    on.diagnostics = true;
    const SolveResult a = solve(k.problem.hierarchy, off, k.problem.x0);
    const SolveResult b = solve(k.problem.hierarchy, on, k.problem.x0);
    const bool same = trace_csv(a.trace, false) == trace_csv(b.trace, false);
    const bool evaluated = std::any_of(b.trace.begin(), b.trace.end(), [](const IterationRecord& r) {
      return !std::isnan(r.f_diag);
    });
    ok = ok && same && evaluated;
    detail += "\n    " + k.name + ": rows=" + std::to_string(a.trace.size()) +
              (same ? " identical" : " DIFFERENT") + (evaluated ? "" : " (no f_diag values)");
  }
  return {ok, detail};
}

}  // namespace
}  // namespace moffo

int main(int argc, char** argv) {
  using moffo::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AdaGrad equivalence", moffo::Criterion1},
      {"AdaGrad-like rate bound", moffo::Criterion2},
      {"MAXGI rate diagnostic", moffo::Criterion3},
      {"structural invariants (fuzz)", moffo::Criterion4},
      {"linear coherence identity", moffo::Criterion5},
      {"multilevel benefit, Laplacian", moffo::Criterion6},
      {"noise robustness, minibatch 0.25", moffo::Criterion7},
      {"Lambert W_{-1}", moffo::Criterion8},
      {"gradient checks", moffo::Criterion9},
      {"value oracle does not affect iterates", moffo::Criterion10}};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d: %s  %s  %s\n", id, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
