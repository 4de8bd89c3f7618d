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

#include "moffo/step.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace moffo {

TrustRegion compute_radius(const Vector& w, const Vector& g, bool is_top, double delta,
                           double p_up_norm, double step_scale) {
  RequireSameSize(w, g, "compute_radius");
  if ((w.array() <= 0.0).any()) throw DomainError("compute_radius: weights must be positive");
  if (!is_top && !(delta > 0.0)) throw DomainError("compute_radius: delta must be positive");

  TrustRegion tr;
  tr.raw_radius = step_scale * (g.cwiseAbs().array() / w.array()).matrix();
  tr.cap = is_top ? std::numeric_limits<double>::infinity() : delta;
  if (is_top) {
    tr.radius = tr.raw_radius;
    return tr;
  }
  const double raw_norm = tr.raw_radius.norm();
  double scale = 1.0;
  if (raw_norm > 0.0) scale = std::min(2.0 * delta / (p_up_norm * raw_norm), 1.0);
  tr.radius = scale * tr.raw_radius;
  return tr;
}

HessianModel::HessianModel(Kind kind, Vector d, Matrix b, double kappa_b, Vector off)
    : kind_(kind), diag_(std::move(d)), dense_(std::move(b)), kappa_b_(kappa_b), off_(std::move(off)) {
  if (!(kappa_b_ >= 1.0)) throw DomainError("HessianModel: kappa_B must be >= 1");
}

HessianModel HessianModel::Zero(double kappa_b) { return {Kind::kZero, {}, {}, kappa_b}; }

HessianModel HessianModel::Diagonal(Vector d, double kappa_b) {
  if (d.size() > 0 && d.cwiseAbs().maxCoeff() > kappa_b) {
    throw DomainError("HessianModel: ||B|| exceeds kappa_B");
  }
  return {Kind::kDiagonal, std::move(d), {}, kappa_b};
}

HessianModel HessianModel::Tridiagonal(Vector d, Vector off, double kappa_b) {
  const Index n = d.size();
  if (off.size() != std::max<Index>(n - 1, 0)) {
    throw DimensionError("HessianModel: off-diagonal must have n - 1 entries");
  }
  // Gershgorin certifies ||B||_2.
  double bound = 0.0;
  for (Index j = 0; j < n; ++j) {
    double row = std::abs(d(j));
    if (j > 0) row += std::abs(off(j - 1));
    if (j + 1 < n) row += std::abs(off(j));
    bound = std::max(bound, row);
  }
  if (bound > kappa_b) throw DomainError("HessianModel: ||B|| exceeds kappa_B");
  return {Kind::kTridiagonal, std::move(d), {}, kappa_b, std::move(off)};
}

HessianModel HessianModel::Explicit(Matrix b, double kappa_b) {
  if (b.rows() != b.cols()) throw DimensionError("HessianModel: matrix must be square");
  if (!b.isApprox(b.transpose(), 1e-12)) throw DomainError("HessianModel: matrix not symmetric");
  // ||B||_2 <= ||B||_F is enough to certify the bound.
  if (b.norm() > kappa_b) throw DomainError("HessianModel: ||B|| exceeds kappa_B");
  return {Kind::kExplicit, {}, std::move(b), kappa_b};
}

HessianModel HessianModel::Scaled(double c) const {
  if (!(c > 0.0)) throw DomainError("HessianModel::Scaled: factor must be positive");
  return {kind_, c * diag_, c * dense_, c * kappa_b_, c * off_};
}

Vector HessianModel::Apply(const Vector& s) const {
  switch (kind_) {
    case Kind::kZero:
      return Vector::Zero(s.size());
    case Kind::kDiagonal:
      RequireSameSize(diag_, s, "HessianModel::Apply");
      return diag_.cwiseProduct(s);
    case Kind::kTridiagonal: {
      RequireSameSize(diag_, s, "HessianModel::Apply");
      Vector y = diag_.cwiseProduct(s);
      const Index n = s.size();
      if (n > 1) {
        y.head(n - 1) += off_.cwiseProduct(s.tail(n - 1));
        y.tail(n - 1) += off_.cwiseProduct(s.head(n - 1));
      }
      return y;
    }
    case Kind::kExplicit:
      if (dense_.cols() != s.size()) throw DimensionError("HessianModel::Apply: size mismatch");
      return dense_ * s;
  }
  return {};
}

double HessianModel::Quadratic(const Vector& s) const {
  if (kind_ == Kind::kZero) return 0.0;
  return s.dot(Apply(s));
}

Vector HessianModel::Diag(Index n) const {
  switch (kind_) {
    case Kind::kZero:
      return Vector::Zero(n);
    case Kind::kDiagonal:
    case Kind::kTridiagonal:
      return diag_;
    case Kind::kExplicit:
      return dense_.diagonal();
  }
  return {};
}

Vector linear_step(const Vector& g, const Vector& radius) {
  RequireSameSize(g, radius, "linear_step");
  Vector s(g.size());
  for (Index j = 0; j < g.size(); ++j) s(j) = -Sign(g(j)) * radius(j);
  return s;
}

Vector cauchy_step(const Vector& g, const Vector& radius, const HessianModel& b) {
  Vector s_l = linear_step(g, radius);
  const double curvature = b.Quadratic(s_l);
  if (curvature > 0.0) {
    const double gamma = std::min(1.0, std::abs(g.dot(s_l)) / curvature);
    s_l *= gamma;
  }
  return s_l;
}

Vector taylor_step(const Vector& g, const Vector& radius, const HessianModel& b, double tau,
                   bool refine) {
  if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("taylor_step: tau must lie in (0, 1]");
  Vector s_q = cauchy_step(g, radius, b);
  const double target = tau * b.Model(g, s_q);
  Vector s = s_q;
  if (refine && b.kind() != HessianModel::Kind::kZero) {
    const Vector d = b.Diag(g.size());
    Vector trial(g.size());
    for (Index j = 0; j < g.size(); ++j) {
      if (d(j) > 0.0) {
        trial(j) = std::clamp(-g(j) / d(j), -radius(j), radius(j));
      } else {
        trial(j) = -Sign(g(j)) * radius(j);
      }
    }
    if (b.Model(g, trial) <= target) s = std::move(trial);
  }
  if ((s.cwiseAbs().array() > radius.array()).any() || !(b.Model(g, s) <= target)) {
    throw InvariantViolation("taylor_step: step violates the box or the Cauchy decrease");
  }
  return s;
}

double TaylorDecreaseSlack(const Vector& g, const Vector& s, const Vector& w,
                           const Vector& radius, double tau, double varsigma_min, double kappa_b,
                           double radius_scale) {
  const double rhs =
      -radius_scale * (tau * varsigma_min / (2.0 * kappa_b)) * WeightedDecrease(g, w) +
                     0.5 * kappa_b * radius.squaredNorm();
  return rhs - g.dot(s);
}

double WeightedDecrease(const Vector& g, const Vector& w) {
  RequireSameSize(g, w, "WeightedDecrease");
  return (g.array().square() / w.array()).sum();
}

}  // namespace moffo
