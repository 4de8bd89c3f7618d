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

#include "moffo/hierarchy.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/SVD>

namespace moffo {

namespace {

// Dense SVD is used for both singular values up to this size; above it the
// norm comes from power iteration.
constexpr Index kDenseSvdLimit = 512;

}  // namespace

Vector GradientOracle::sample_gradient(const Vector& x, Rng& /*rng*/, double* cost_fraction) const {
  if (cost_fraction != nullptr) *cost_fraction = 1.0;
  return gradient(x);
}

Vector GradientOracle::subset_gradient(const Vector& /*x*/,
                                       std::span<const Index> /*samples*/) const {
  throw std::logic_error("objective is not sum-structured");
}

TransferOperator::TransferOperator(Matrix prolongation, double omega)
    : p_(std::move(prolongation)), omega_(omega), cache_(std::make_shared<Cache>()) {
  if (p_.rows() == 0 || p_.cols() == 0) {
    throw DimensionError("TransferOperator: empty prolongation");
  }
  if (p_.rows() < p_.cols()) {
    throw DimensionError("TransferOperator: prolongation must be tall (n_fine >= n_coarse)");
  }
  if (!(omega_ > 0.0) || !std::isfinite(omega_)) {
    throw DomainError("TransferOperator: omega must be positive");
  }
}

Matrix TransferOperator::restriction() const { return omega_ * p_.transpose(); }

Vector TransferOperator::Prolong(const Vector& coarse) const {
  if (coarse.size() != p_.cols()) throw DimensionError("Prolong: size mismatch");
  return p_ * coarse;
}

Vector TransferOperator::Restrict(const Vector& fine) const {
  if (fine.size() != p_.rows()) throw DimensionError("Restrict: size mismatch");
  return omega_ * (p_.transpose() * fine);
}

double TransferOperator::norm() const {
  std::call_once(cache_->norm_once, [this] {
    if (std::min(p_.rows(), p_.cols()) <= kDenseSvdLimit) {
      Eigen::JacobiSVD<Matrix> svd(p_);
      cache_->norm = svd.singularValues()(0);
    } else {
      cache_->norm = SpectralNormPowerIteration(p_);
    }
  });
  return cache_->norm;
}

double TransferOperator::sigma_min() const {
  std::call_once(cache_->sigma_once, [this] {
    Eigen::BDCSVD<Matrix> svd(p_);
    const auto& s = svd.singularValues();
    cache_->sigma_min = s(s.size() - 1);
  });
  return cache_->sigma_min;
}

Matrix restriction_of(const TransferOperator& op) { return op.restriction(); }
double operator_norm(const TransferOperator& op) { return op.norm(); }
double sigma_min(const TransferOperator& op) { return op.sigma_min(); }

double SpectralNormPowerIteration(const Matrix& p, double rel_tol, int max_iter) {
  Vector v = Vector::Ones(p.cols()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector u = p.transpose() * (p * v);
    const double next = v.dot(u);  // Rayleigh quotient of P^T P
    const double unorm = u.norm();
    if (unorm == 0.0) return 0.0;
    v = u / unorm;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) {
      return std::sqrt(next);
    }
    lambda = next;
  }
  throw NumericalError("power iteration did not converge in " + std::to_string(max_iter) +
                       " iterations");
}

TransferOperator linear_interpolation_1d(Index n_coarse, double omega) {
  if (n_coarse < 2) throw DimensionError("linear_interpolation_1d: n_coarse must be >= 2");
  Matrix p = Matrix::Zero(2 * n_coarse - 1, n_coarse);
  for (Index k = 0; k < n_coarse; ++k) {
    p(2 * k, k) = 1.0;
    if (k + 1 < n_coarse) {
      p(2 * k + 1, k) = 0.5;
      p(2 * k + 1, k + 1) = 0.5;
    }
  }
  return TransferOperator(std::move(p), omega);
}

TransferOperator dirichlet_interpolation_1d(Index n_coarse, double omega) {
  if (n_coarse < 1) throw DimensionError("dirichlet_interpolation_1d: n_coarse must be >= 1");
  Matrix p = Matrix::Zero(2 * n_coarse + 1, n_coarse);
  for (Index k = 0; k < n_coarse; ++k) {
    p(2 * k + 1, k) = 1.0;
    p(2 * k, k) = 0.5;
    p(2 * k + 2, k) = 0.5;
  }
  return TransferOperator(std::move(p), omega);
}

LevelHierarchy::LevelHierarchy(std::vector<OraclePtr> oracles,
                               std::vector<TransferOperator> transfers)
    : oracles_(std::move(oracles)), transfers_(std::move(transfers)) {
  if (oracles_.empty()) throw DimensionError("LevelHierarchy: need at least one level");
  if (transfers_.size() + 1 != oracles_.size()) {
    throw DimensionError("LevelHierarchy: need exactly one transfer operator per level pair");
  }
  for (const auto& o : oracles_) {
    if (!o) throw std::invalid_argument("LevelHierarchy: null oracle");
  }
  for (std::size_t k = 0; k < transfers_.size(); ++k) {
    const auto& op = transfers_[k];
    if (op.coarse_dim() != oracles_[k]->dimension() ||
        op.fine_dim() != oracles_[k + 1]->dimension()) {
      throw DimensionError("LevelHierarchy: transfer operator " + std::to_string(k + 2) +
                           " does not match level dimensions");
    }
  }
}

const GradientOracle& LevelHierarchy::oracle(int level) const { return *oracle_ptr(level); }

const OraclePtr& LevelHierarchy::oracle_ptr(int level) const {
  if (level < 1 || level > depth()) throw std::out_of_range("LevelHierarchy: bad level");
  return oracles_[static_cast<std::size_t>(level - 1)];
}

const TransferOperator& LevelHierarchy::transfer_into(int level) const {
  if (level < 2 || level > depth()) throw std::out_of_range("LevelHierarchy: no transfer");
  return transfers_[static_cast<std::size_t>(level - 2)];
}

LevelHierarchy LevelHierarchy::TopLevels(int levels) const {
  if (levels < 1 || levels > depth()) throw std::out_of_range("LevelHierarchy: bad level count");
  const std::size_t skip = static_cast<std::size_t>(depth() - levels);
  std::vector<OraclePtr> oracles(oracles_.begin() + static_cast<std::ptrdiff_t>(skip),
                                 oracles_.end());
  std::vector<TransferOperator> transfers(transfers_.begin() + static_cast<std::ptrdiff_t>(skip),
                                          transfers_.end());
  return LevelHierarchy(std::move(oracles), std::move(transfers));
}

LevelHierarchy LevelHierarchy::WithOracles(std::vector<OraclePtr> oracles) const {
  return LevelHierarchy(std::move(oracles), transfers_);
}

CoherentModel::CoherentModel(Vector anchor, Vector anchor_gradient, Vector correction)
    : anchor_(std::move(anchor)),
      anchor_gradient_(std::move(anchor_gradient)),
      correction_(std::move(correction)) {
  RequireSameSize(anchor_, anchor_gradient_, "CoherentModel");
  RequireSameSize(anchor_, correction_, "CoherentModel");
}

CoherentModel build_coherent_model(const Vector& lower_gradient_at_anchor, const Vector& x_low0,
                                   const Vector& g_upper, const TransferOperator& op) {
  if (g_upper.size() != op.fine_dim() || x_low0.size() != op.coarse_dim()) {
    throw DimensionError("build_coherent_model: shape mismatch");
  }
  RequireSameSize(lower_gradient_at_anchor, x_low0, "build_coherent_model");
  Vector rg = op.Restrict(g_upper);
  Vector v = rg - lower_gradient_at_anchor;
  return CoherentModel(x_low0, std::move(rg), std::move(v));
}

CoherentModel build_coherent_model(const GradientOracle& lower, const Vector& x_low0,
                                   const Vector& g_upper, const TransferOperator& op) {
  if (lower.dimension() != x_low0.size()) throw DimensionError("build_coherent_model: shape");
  return build_coherent_model(lower.gradient(x_low0), x_low0, g_upper, op);
}

bool coherence_defect_ok(double e_norm_estimate, double delta_lower, double kappa_e) {
  if (e_norm_estimate == 0.0) return true;
  return e_norm_estimate <= kappa_e * delta_lower;
}

}  // namespace moffo
