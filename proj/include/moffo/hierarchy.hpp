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

// Level stack, transfer operators and first-order coherent lower-level models.

#ifndef MOFFO_HIERARCHY_HPP_
#define MOFFO_HIERARCHY_HPP_

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "moffo/common.hpp"

namespace moffo {

/// Gradient access to one member f_l of the hierarchy.
///
/// Implementations must be safe for concurrent calls: all randomness comes in
/// through the caller-owned `Rng`.
class GradientOracle {
 public:
  virtual ~GradientOracle() = default;

  virtual Index dimension() const = 0;

  /// Exact gradient.
  virtual Vector gradient(const Vector& x) const = 0;

  /// Gradient as seen by the optimizer. Noise wrappers override this; the
  /// default forwards to `gradient`. `cost_fraction` receives the fraction of
  /// the full dataset touched by the call.
  virtual Vector sample_gradient(const Vector& x, Rng& rng, double* cost_fraction) const;

  /// Objective value, for diagnostics only. Solver control flow never reads it.
  virtual std::optional<double> value(const Vector& /*x*/) const { return std::nullopt; }

  /// Number of samples for sum-structured objectives, 0 otherwise.
  virtual Index sample_count() const { return 0; }

  /// Unbiased gradient estimate built from the listed samples only.
  virtual Vector subset_gradient(const Vector& x, std::span<const Index> samples) const;
};

using OraclePtr = std::shared_ptr<const GradientOracle>;

/// Full-column-rank prolongation P (fine x coarse) with restriction R = omega * P^T.
class TransferOperator {
 public:
  TransferOperator(Matrix prolongation, double omega);

  const Matrix& prolongation() const { return p_; }
  double omega() const { return omega_; }
  Index fine_dim() const { return p_.rows(); }
  Index coarse_dim() const { return p_.cols(); }

  Matrix restriction() const;
  Vector Prolong(const Vector& coarse) const;
  Vector Restrict(const Vector& fine) const;

  /// Spectral norm ||P||, computed once.
  double norm() const;
  /// Smallest singular value of P, computed once.
  double sigma_min() const;

 private:
  struct Cache {
    std::once_flag norm_once;
    std::once_flag sigma_once;
    double norm = 0.0;
    double sigma_min = 0.0;
  };

  Matrix p_;
  double omega_;
  std::shared_ptr<Cache> cache_;
};

Matrix restriction_of(const TransferOperator& op);
double operator_norm(const TransferOperator& op);
double sigma_min(const TransferOperator& op);

/// Power iteration on P^T P from the all-ones seed. Throws NumericalError
/// when the relative change does not drop below `rel_tol` within `max_iter`.
double SpectralNormPowerIteration(const Matrix& p, double rel_tol = 1e-10, int max_iter = 10000);

/// Vertex-centred 1D linear interpolation: (2n-1) x n, coarse points copied,
/// midpoints averaged.
TransferOperator linear_interpolation_1d(Index n_coarse, double omega = 0.5);

/// Interior-node 1D linear interpolation for homogeneous Dirichlet grids:
/// (2n+1) x n, with the missing boundary values taken as zero.
TransferOperator dirichlet_interpolation_1d(Index n_coarse, double omega = 0.5);

/// Ordered stack of gradient oracles f_1 (coarsest) ... f_r (finest) plus the
/// prolongations P_l from level l-1 to level l.
class LevelHierarchy {
 public:
  LevelHierarchy() = default;
  /// `transfers[k]` maps level k+1 to level k+2 (1-based levels).
  LevelHierarchy(std::vector<OraclePtr> oracles, std::vector<TransferOperator> transfers);

  int depth() const { return static_cast<int>(oracles_.size()); }
  Index dimension(int level) const { return oracle(level).dimension(); }
  const GradientOracle& oracle(int level) const;
  const OraclePtr& oracle_ptr(int level) const;
  /// P_level, mapping level-1 into level. Valid for level in [2, depth()].
  const TransferOperator& transfer_into(int level) const;

  /// The top `levels` members of this hierarchy.
  LevelHierarchy TopLevels(int levels) const;
  /// Same operators, different oracles (used by noise wrappers).
  LevelHierarchy WithOracles(std::vector<OraclePtr> oracles) const;

 private:
  std::vector<OraclePtr> oracles_;
  std::vector<TransferOperator> transfers_;
};

/// h_{l-1}(x) = f_{l-1}(x) + v^T (x - x0), with v chosen so that the model
/// gradient at the anchor x0 equals R g_upper.
class CoherentModel {
 public:
  CoherentModel(Vector anchor, Vector anchor_gradient, Vector correction);

  const Vector& anchor() const { return anchor_; }
  /// R_l g_{l,i}; the exact model gradient at the anchor.
  const Vector& anchor_gradient() const { return anchor_gradient_; }
  const Vector& correction() const { return correction_; }

  Vector Gradient(const Vector& base_gradient) const { return base_gradient + correction_; }
  double Value(double base_value, const Vector& x) const {
    return base_value + correction_.dot(x - anchor_);
  }

 private:
  Vector anchor_;
  Vector anchor_gradient_;
  Vector correction_;
};

/// Builds the model from an already evaluated lower gradient at `x_low0`.
CoherentModel build_coherent_model(const Vector& lower_gradient_at_anchor, const Vector& x_low0,
                                   const Vector& g_upper, const TransferOperator& op);
/// Convenience overload evaluating the exact lower gradient.
CoherentModel build_coherent_model(const GradientOracle& lower, const Vector& x_low0,
                                   const Vector& g_upper, const TransferOperator& op);

/// Weak coherence test ||E g|| <= kappa_E * delta_lower.
bool coherence_defect_ok(double e_norm_estimate, double delta_lower, double kappa_e);

}  // namespace moffo

#endif  // MOFFO_HIERARCHY_HPP_
