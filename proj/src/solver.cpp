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

#include "moffo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace moffo {

namespace {

// Relative slack for re-checked inequalities that hold exactly in real arithmetic.
constexpr double kRoundoff = 1e-12;

void Require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw DomainError("solver." + field + ": " + what);
}

// State handed from a recursive iteration to the lower-level call.
struct LowerContext {
  Vector correction;  // v_{l-1}
  Vector g0;          // gradient of the lower model at the anchor, already charged
  bool exact_coherence = true;
  std::optional<double> descent_threshold;
};

class Engine {
 public:
  Engine(const LevelHierarchy& h, const SolverConfig& c, const StopMonitor& monitor)
      : h_(h), c_(c), monitor_(monitor), rng_(c.seed), result_() {
    const int r = h_.depth();
    result_.ledger = CostLedger(r);
    nu_ = std::isnan(c_.nu) ? c_.mu : c_.nu;
    for (int l = 1; l <= r; ++l) {
      floors_.push_back(c_.floors.empty() ? Vector::Constant(h_.dimension(l), c_.varsigma)
                                          : c_.floors[static_cast<std::size_t>(l - 1)]);
    }
    for (const auto& f : floors_) {
      varsigma_min_ = std::min(varsigma_min_, f.minCoeff());
    }
  }

  SolveResult Run(const Vector& x0) {
    const int r = h_.depth();
    if (x0.size() != h_.dimension(r)) throw DimensionError("solve: x0 has the wrong size");
    WeightState weights(c_.weights, c_.mu, nu_, floors_.back());
    result_.x = Mofftr(r, x0, c_.eps_top, IterMax(r), std::numeric_limits<double>::infinity(),
                       std::move(weights), nullptr);
    return std::move(result_);
  }

 private:
  long IterMax(int level) const { return c_.i_max[static_cast<std::size_t>(level - 1)]; }

  void Check(bool ok, const char* name, const std::string& detail = {}) {
    ++result_.invariant_checks[name];
    if (c_.check_invariants && !ok) {
      throw InvariantViolation(std::string(name) + " violated" +
                               (detail.empty() ? "" : ": " + detail));
    }
  }

  Vector Evaluate(int level, const Vector& x) {
    double fraction = 1.0;
    Vector g = h_.oracle(level).sample_gradient(x, rng_, &fraction);
    result_.ledger.Charge(level, fraction);
    return g;
  }

  double Diagnostic(int level, const Vector& x, const Vector& anchor, const LowerContext* ctx) {
    if (!c_.diagnostics) return std::numeric_limits<double>::quiet_NaN();
    const auto f = h_.oracle(level).value(x);
    if (!f) return std::numeric_limits<double>::quiet_NaN();
    if (ctx == nullptr) return *f;
    return *f + ctx->correction.dot(x - anchor);
  }

  std::size_t Push(IterationRecord rec) {
    if (rec.level != h_.depth() && !c_.record_lower) return kNoRecord;
    result_.trace.push_back(rec);
    return result_.trace.size() - 1;
  }

  IterationRecord* At(std::size_t idx) {
    return idx == kNoRecord ? nullptr : &result_.trace[idx];
  }

  IterationRecord FinalRecord(int level, long i, double gnorm, double f) const {
    IterationRecord rec;
    rec.level = level;
    rec.iter = i;
    rec.kind = IterationKind::kFinal;
    rec.grad_norm = gnorm;
    rec.cost_cum = result_.ledger.total();
    rec.f_diag = f;
    return rec;
  }

  HessianModel Hessian(int level, const Vector& x, const Vector& g) const {
    if (!c_.hessian) return HessianModel::Zero(c_.kappa_b);
    HessianModel b = c_.hessian(level, x, g);
    if (b.kappa_b() > c_.kappa_b) throw DomainError("hessian provider exceeds solver.kappa_b");
    return b;
  }

  // Steps 0-5 at one level. `ctx` is null at the top.
  Vector Mofftr(int level, const Vector& x0, double eps, long i_max, double delta,
                WeightState weights, const LowerContext* ctx) {
    const bool top = level == h_.depth();
    const TransferOperator* up = top ? nullptr : &h_.transfer_into(level + 1);
    const double p_up_norm = top ? 1.0 : up->norm();

    Vector x = x0;
    Vector x_prev = x0;
    long retained = 0;
    for (long i = 0;; ++i) {
      // Step 1: termination.
      if (!top) {
        if (i > 0) {
          const double dist = up->Prolong(x - x0).norm();
          if (dist > delta) {
            if (ctx != nullptr && ctx->exact_coherence) {
              Check(i > 1, "first_lower_iterate_accepted",
                    "level " + std::to_string(level));
            }
            if (c_.strict_descent_monitoring) result_.lower_retained.push_back(retained);
            return x_prev;
          }
          const double step = up->Prolong(x - x_prev).norm();
          Check(step <= 2.0 * delta * (1.0 + kRoundoff), "step_cap");
        }
        if (i == i_max) {
          // The returned point does not depend on g, so it is not evaluated.
          if (c_.strict_descent_monitoring) result_.lower_retained.push_back(retained);
          return x;
        }
      }

      Vector g;
      if (i == 0 && ctx != nullptr) {
        g = ctx->g0;
      } else {
        g = Evaluate(level, x);
        if (ctx != nullptr && !ctx->exact_coherence) {
          // Weak coherence: the lower model is f_{l-1} itself.
        } else if (ctx != nullptr) {
          g += ctx->correction;
        }
      }
      const double gnorm = g.norm();
      if (top) {
        if (i == 0 && c_.eps_relative) eps = c_.eps_top * gnorm;
        result_.top_iterations = i;
        result_.final_grad_norm = gnorm;
        if (monitor_ && monitor_(x, g, i)) {
          Push(FinalRecord(level, i, gnorm, Diagnostic(level, x, x0, ctx)));
          result_.status = SolveStatus::kStoppedByMonitor;
          return x;
        }
      }
      if (gnorm <= eps || i == i_max) {
        Push(FinalRecord(level, i, gnorm, Diagnostic(level, x, x0, ctx)));
        if (top) {
          result_.status = gnorm <= eps ? SolveStatus::kConverged : SolveStatus::kMaxIterations;
        } else if (c_.strict_descent_monitoring) {
          result_.lower_retained.push_back(retained);
        }
        return x;
      }

      // Step 2: weights from the current gradient, then the radius.
      const Vector w = weights.Update(g);
      const TrustRegion tr = compute_radius(w, g, top, delta, p_up_norm, c_.step_scale);
      const double decrease = WeightedDecrease(g, w);
      if (ctx != nullptr && ctx->descent_threshold) {
        if (i == 0 && ctx->exact_coherence) {
          Check(decrease >= *ctx->descent_threshold, "first_lower_descent");
        }
        if (decrease < *ctx->descent_threshold) {
          Push(FinalRecord(level, i, gnorm, Diagnostic(level, x, x0, ctx)));
          result_.lower_retained.push_back(retained);
          return x;
        }
      }
      ++retained;

      IterationRecord rec;
      rec.level = level;
      rec.iter = i;
      rec.kind = IterationKind::kTaylor;
      rec.grad_norm = gnorm;
      rec.delta_hat_norm = tr.raw_radius.norm();
      rec.delta_norm = tr.radius.norm();
      rec.w_min = w.minCoeff();
      rec.w_max = w.maxCoeff();
      rec.cost_cum = result_.ledger.total();
      rec.f_diag = Diagnostic(level, x, x0, ctx);
      const std::size_t idx = Push(rec);

      // Step 3: recursion, if scheduled and not vetoed.
      Vector s;
      bool recursive = false;
      if (level > 1 &&
          cycle_shape(level, i, c_.pre_smooth, c_.post_smooth) == CycleAction::kTryRecursive) {
        recursive = TryRecursion(level, x, g, w, tr, decrease, &s);
      }

      // Step 4: Taylor step.
      if (!recursive) {
        const HessianModel b = Hessian(level, x, g);
        s = taylor_step(g, tr.radius, b, c_.tau, c_.refine_taylor);
        const double raw_unscaled = (g.cwiseAbs().array() / w.array()).matrix().norm();
        const double scale = raw_unscaled > 0.0 ? tr.radius.norm() / raw_unscaled : 1.0;
        if (scale <= 1.0 + kRoundoff) {
          const double slack = TaylorDecreaseSlack(g, s, w, tr.radius, c_.tau, varsigma_min_,
                                                   c_.kappa_b, std::min(scale, 1.0));
          Check(slack >= -kRoundoff * (1.0 + std::abs(g.dot(s))), "taylor_decrease");
        }
        Check(s.norm() <= tr.radius.norm() * (1.0 + kRoundoff), "stepnorm");
        if (!top) {
          Check(up->Prolong(s).norm() <= 2.0 * delta * (1.0 + kRoundoff), "step_cap");
        }
      }
      if (IterationRecord* r = At(idx)) {
        r->kind = recursive ? IterationKind::kRecursive : IterationKind::kTaylor;
        r->step_norm = s.norm();
      }

      // Step 5.
      x_prev = x;
      x += s;
    }
  }

  bool TryRecursion(int level, const Vector& x, const Vector& g, const Vector& w,
                    const TrustRegion& tr, double decrease, Vector* s) {
    const TransferOperator& op = h_.transfer_into(level);
    const double delta_norm = tr.radius.norm();
    if (!(delta_norm > 0.0)) return false;
    ++result_.recursions;

    const Vector rg = op.Restrict(g);
    const Vector& floors_low = floors_[static_cast<std::size_t>(level - 2)];
    const double p_norm = op.norm();
    Vector w_low0 = c_.weights == WeightKind::kAdagradLike
                        ? init_lower_adagrad(floors_low, p_norm, rg, c_.alpha, delta_norm, w.norm())
                        : init_lower_divergent(floors_low, p_norm, rg, c_.alpha, delta_norm,
                                               w.minCoeff());

    const double low_radius = (rg.cwiseAbs().array() / w_low0.array()).matrix().norm();
    Check(low_radius <= c_.alpha * delta_norm / p_norm * (1.0 + kRoundoff), "lower_radius");
    if (c_.weights == WeightKind::kAdagradLike) {
      Check(w_low0.norm() >= w.norm(), "lower_weight_growth");
    } else {
      Check(w_low0.minCoeff() >= w.minCoeff(), "lower_weight_growth");
    }
    Check((w_low0.array() >= floors_low.array()).all(), "lower_weight_floor");

    if (!should_recurse(rg, w_low0, g, w, c_.kappa_r)) {
      ++result_.vetoed_recursions;
      return false;
    }

    const Vector x_low0 = op.Restrict(x);
    const double delta_low = c_.alpha * delta_norm;
    LowerContext ctx;
    const Vector g_low = Evaluate(level - 1, x_low0);
    if (c_.weak_coherence_kappa_e) {
      const double defect = (g_low - rg).norm();
      if (!coherence_defect_ok(defect, delta_low, *c_.weak_coherence_kappa_e)) {
        ++result_.vetoed_recursions;
        return false;
      }
      ctx.exact_coherence = false;
      ctx.correction = Vector::Zero(rg.size());
      ctx.g0 = g_low;
    } else {
      const CoherentModel model = build_coherent_model(g_low, x_low0, g, op);
      ctx.correction = model.correction();
      ctx.g0 = model.Gradient(g_low);
      Check((ctx.g0 - rg).norm() <= kRoundoff * (1.0 + rg.norm()), "coherence_identity");
    }
    if (c_.strict_descent_monitoring) ctx.descent_threshold = c_.kappa_r * decrease;

    WeightState lower = seed_lower_state(c_.weights, c_.mu, nu_, floors_low, w_low0, ctx.g0);
    const Vector y = Mofftr(level - 1, x_low0, c_.lower_eps_factor * rg.norm(), IterMax(level - 1),
                            delta_low, std::move(lower), &ctx);
    *s = op.Prolong(y - x_low0);
    Check(s->norm() <= delta_low * (1.0 + kRoundoff), "stepnorm");
    return true;
  }

  static constexpr std::size_t kNoRecord = static_cast<std::size_t>(-1);

  const LevelHierarchy& h_;
  const SolverConfig& c_;
  const StopMonitor& monitor_;
  Rng rng_;
  SolveResult result_;
  double nu_ = 0.5;
  std::vector<Vector> floors_;
  double varsigma_min_ = 1.0;
};

}  // namespace

void ValidateConfig(const SolverConfig& c, int depth) {
  Require(c.kappa_r > 0.0 && c.kappa_r < 1.0, "kappa_R", "must lie in (0, 1)");
  Require(c.alpha >= 1.0, "alpha", "must be >= 1");
  Require(c.tau > 0.0 && c.tau <= 1.0, "tau", "must lie in (0, 1]");
  Require(c.kappa_b >= 1.0, "kappa_B", "must be >= 1");
  Require(c.varsigma > 0.0 && c.varsigma <= 1.0, "varsigma", "must lie in (0, 1]");
  Require(c.floors.empty() || static_cast<int>(c.floors.size()) == depth, "floors",
          "need one vector per level");
  for (const auto& f : c.floors) {
    Require((f.array() > 0.0).all() && (f.array() <= 1.0).all(), "floors", "must lie in (0, 1]");
  }
  Require(c.mu > 0.0 && c.mu < 1.0, "mu", "must lie in (0, 1)");
  if (c.weights == WeightKind::kMaxGi && !std::isnan(c.nu)) {
    Require(c.nu > 0.0 && c.nu <= c.mu, "nu", "must lie in (0, mu]");
  }
  Require(c.eps_top >= 0.0, "eps_top", "must be >= 0");
  Require(static_cast<int>(c.i_max.size()) == depth, "i_max", "need one budget per level");
  for (long v : c.i_max) Require(v >= 1, "i_max", "budgets must be positive");
  Require(c.pre_smooth >= 1, "pre_smooth", "must be >= 1");
  Require(c.post_smooth >= 0, "post_smooth", "must be >= 0");
  Require(c.lower_eps_factor > 0.0 && c.lower_eps_factor <= 1.0, "lower_eps_factor",
          "must lie in (0, 1]");
  if (c.weak_coherence_kappa_e) {
    Require(*c.weak_coherence_kappa_e >= 0.0, "weak_coherence", "kappa_E must be >= 0");
  }
  Require(c.step_scale > 0.0 && std::isfinite(c.step_scale), "step_scale", "must be positive");
}

std::string_view ToString(IterationKind kind) {
  switch (kind) {
    case IterationKind::kTaylor:
      return "taylor";
    case IterationKind::kRecursive:
      return "recursive";
    case IterationKind::kFinal:
      return "final";
  }
  return "";
}

std::string_view ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kMaxIterations:
      return "max_iterations";
    case SolveStatus::kStoppedByMonitor:
      return "stopped_by_monitor";
  }
  return "";
}

CostLedger::CostLedger(int depth) : counts_(static_cast<std::size_t>(std::max(depth, 1)), 0.0) {}

void CostLedger::Charge(int level, double fraction) {
  if (level < 1 || level > depth()) throw std::out_of_range("CostLedger: bad level");
  if (!(fraction >= 0.0)) throw DomainError("CostLedger: negative charge");
  counts_[static_cast<std::size_t>(level - 1)] += fraction;
  total_ += std::ldexp(fraction, level - depth());
}

double CostLedger::count(int level) const {
  if (level < 1 || level > depth()) throw std::out_of_range("CostLedger: bad level");
  return counts_[static_cast<std::size_t>(level - 1)];
}

bool should_recurse(const Vector& rg, const Vector& w_low, const Vector& g, const Vector& w,
                    double kappa_r) {
  return WeightedDecrease(rg, w_low) >= kappa_r * WeightedDecrease(g, w);
}

CycleAction cycle_shape(int level, long i, int pre_smooth, int post_smooth) {
  if (level <= 1) return CycleAction::kTaylor;
  const long period = static_cast<long>(pre_smooth) + 1 + post_smooth;
  return i % period == pre_smooth ? CycleAction::kTryRecursive : CycleAction::kTaylor;
}

long monitor_new_cond(const std::vector<double>& lower_decreases, const Vector& g,
                      const Vector& w, double kappa_r) {
  const double threshold = kappa_r * WeightedDecrease(g, w);
  long k = 0;
  for (double d : lower_decreases) {
    if (d < threshold) break;
    ++k;
  }
  return k;
}

SolveResult solve(const LevelHierarchy& hierarchy, const SolverConfig& config, const Vector& x0,
                  const StopMonitor& monitor) {
  ValidateConfig(config, hierarchy.depth());
  Engine engine(hierarchy, config, monitor);
  return engine.Run(x0);
}

}  // namespace moffo
