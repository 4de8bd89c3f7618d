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

// Componentwise trust region and Taylor steps.

#ifndef MOFFO_STEP_HPP_
#define MOFFO_STEP_HPP_

#include <limits>

#include "moffo/common.hpp"

namespace moffo {

struct TrustRegion {
  Vector radius;      // Delta
  Vector raw_radius;  // Delta-hat = D(w) |g|
  double cap = std::numeric_limits<double>::infinity();  // delta_l
};

/// Radius |g_j| / w_j, shrunk at lower levels so that one step cannot carry
/// the prolonged iterate further than 2 delta. `step_scale` multiplies the raw
/// radius (1 for the analysed method).
TrustRegion compute_radius(const Vector& w, const Vector& g, bool is_top, double delta,
                           double p_up_norm, double step_scale = 1.0);

/// Symmetric Hessian approximation with ||B|| <= kappa_B.
class HessianModel {
 public:
  enum class Kind { kZero, kDiagonal, kTridiagonal, kExplicit };

  static HessianModel Zero(double kappa_b = 1.0);
  static HessianModel Diagonal(Vector d, double kappa_b);
  /// Symmetric tridiagonal: main diagonal `d`, off-diagonal `off` (size n-1).
  static HessianModel Tridiagonal(Vector d, Vector off, double kappa_b);
  static HessianModel Explicit(Matrix b, double kappa_b);

  /// c B, with kappa_B scaled alike.
  HessianModel Scaled(double c) const;

  Kind kind() const { return kind_; }
  double kappa_b() const { return kappa_b_; }
  Vector Apply(const Vector& s) const;
  /// s^T B s
  double Quadratic(const Vector& s) const;
  /// Quadratic model g^T s + s^T B s / 2.
  double Model(const Vector& g, const Vector& s) const { return g.dot(s) + 0.5 * Quadratic(s); }
  /// Diagonal of B (zeros for kZero).
  Vector Diag(Index n) const;

 private:
  HessianModel(Kind kind, Vector d, Matrix b, double kappa_b, Vector off = {});

  Kind kind_;
  Vector diag_;
  Matrix dense_;
  double kappa_b_;
  Vector off_;
};

/// Minimizer of g^T s over the box |s_j| <= Delta_j.
Vector linear_step(const Vector& g, const Vector& radius);

/// gamma * s_L with the Cauchy-like gamma = min(1, |g^T s_L| / s_L^T B s_L).
Vector cauchy_step(const Vector& g, const Vector& radius, const HessianModel& b);

/// A step inside the box achieving at least a fraction tau of the Cauchy
/// model decrease. With `refine` a single projected diagonal Newton sweep is
/// tried and kept only if it keeps that guarantee.
Vector taylor_step(const Vector& g, const Vector& radius, const HessianModel& b, double tau,
                   bool refine = false);

/// Linear-decrease bound for a Taylor step:
///   g^T s <= -(tau s_min / 2 kappa_B) sum g_j^2 / w_j + (kappa_B / 2) ||Delta||^2.
/// Returns the slack (rhs - lhs); negative means violated. When the radius is
/// a shrunken copy c * D(w)|g| (lower levels), pass c as `radius_scale`; the
/// first term is then multiplied by c.
double TaylorDecreaseSlack(const Vector& g, const Vector& s, const Vector& w,
                           const Vector& radius, double tau, double varsigma_min, double kappa_b,
                           double radius_scale = 1.0);

/// sum_j g_j^2 / w_j
double WeightedDecrease(const Vector& g, const Vector& w);

}  // namespace moffo

#endif  // MOFFO_STEP_HPP_
