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

#include "moffo/weights.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace moffo {

namespace {

// sqrt for the AdaGrad exponent keeps mu = 1/2 bit-identical to textbook AdaGrad.
double Power(double base, double mu) {
  return mu == 0.5 ? std::sqrt(base) : std::pow(base, mu);
}

void CheckFloors(const Vector& varsigma) {
  for (Index j = 0; j < varsigma.size(); ++j) {
    if (!(varsigma(j) > 0.0 && varsigma(j) <= 1.0)) {
      throw DomainError("weight floors must lie in (0, 1]");
    }
  }
}

void CheckLowerInputs(const Vector& varsigma, const Vector& rg, double alpha, double delta_norm) {
  RequireSameSize(varsigma, rg, "lower weight initialization");
  if (!(delta_norm > 0.0)) throw DomainError("lower weight initialization: ||Delta|| must be > 0");
  if (!(alpha >= 1.0)) throw DomainError("lower weight initialization: alpha must be >= 1");
}

// max(s_j, ||P|| |Rg|_j / (alpha ||Delta||))
Vector SimpleLowerWeights(const Vector& varsigma, double p_norm, const Vector& rg, double alpha,
                          double delta_norm) {
  const double scale = p_norm / (alpha * delta_norm);
  Vector w(varsigma.size());
  for (Index j = 0; j < w.size(); ++j) {
    w(j) = std::max(varsigma(j), scale * std::abs(rg(j)));
  }
  return w;
}

// The componentwise rule bounds every |Rg_j| / w_j by alpha ||Delta|| / ||P||
// but the 2-norm of the vector can exceed that by up to sqrt(n). A uniform
// rescale restores the norm bound and can only help the other conditions.
Vector EnforceLowerRadius(Vector w, double p_norm, const Vector& rg, double alpha,
                          double delta_norm) {
  const double bound = alpha * delta_norm / p_norm;
  const double lhs = (rg.cwiseAbs().array() / w.array()).matrix().norm();
  if (lhs <= bound) return w;
  w *= lhs / bound;
  while ((rg.cwiseAbs().array() / w.array()).matrix().norm() > bound) {
    w *= std::nextafter(1.0, 2.0);
  }
  return w;
}

}  // namespace

std::string_view ToString(WeightKind kind) {
  return kind == WeightKind::kAdagradLike ? "adagrad" : "maxgi";
}

WeightKind ParseWeightKind(std::string_view name) {
  if (name == "adagrad" || name == "adagrad_like") return WeightKind::kAdagradLike;
  if (name == "maxgi") return WeightKind::kMaxGi;
  throw std::invalid_argument("unknown weight kind '" + std::string(name) + "'");
}

WeightState::WeightState(WeightKind kind, double mu, double nu, Vector varsigma)
    : kind_(kind), mu_(mu), nu_(nu), varsigma_(std::move(varsigma)) {
  if (!(mu_ > 0.0 && mu_ < 1.0)) throw DomainError("weights: mu must lie in (0, 1)");
  if (kind_ == WeightKind::kMaxGi && !(nu_ > 0.0 && nu_ <= mu_)) {
    throw DomainError("weights: nu must lie in (0, mu]");
  }
  CheckFloors(varsigma_);
  accumulator_ = Vector::Zero(varsigma_.size());
  offsets_ = Vector::Zero(varsigma_.size());
}

Vector WeightState::Update(const Vector& g) {
  RequireSameSize(g, varsigma_, "WeightState::Update");
  const long i = iteration_++;
  Vector w(g.size());
  if (kind_ == WeightKind::kAdagradLike) {
    accumulator_.array() += g.array().square();
    for (Index j = 0; j < w.size(); ++j) {
      w(j) = Power(varsigma_(j) + offsets_(j) + accumulator_(j), mu_);
    }
  } else {
    accumulator_ = accumulator_.cwiseMax(g.cwiseAbs());
    const double growth = std::pow(static_cast<double>(i + 1), nu_);
    for (Index j = 0; j < w.size(); ++j) {
      w(j) = std::max(varsigma_(j), accumulator_(j)) * growth;
    }
  }
  if (prescribed_) {
    if (i == 0) return *prescribed_;
    w = w.cwiseMax(*prescribed_);
  }
  return w;
}

Vector init_lower_divergent(const Vector& varsigma, double p_norm, const Vector& rg, double alpha,
                            double delta_norm, double min_upper_weight) {
  CheckLowerInputs(varsigma, rg, alpha, delta_norm);
  Vector w = SimpleLowerWeights(varsigma, p_norm, rg, alpha, delta_norm).cwiseMax(min_upper_weight);
  return EnforceLowerRadius(std::move(w), p_norm, rg, alpha, delta_norm);
}

Vector init_lower_adagrad(const Vector& varsigma, double p_norm, const Vector& rg, double alpha,
                          double delta_norm, double upper_weight_norm) {
  CheckLowerInputs(varsigma, rg, alpha, delta_norm);
  Vector w_hat = SimpleLowerWeights(varsigma, p_norm, rg, alpha, delta_norm);
  const double scale = std::max(1.0, upper_weight_norm / w_hat.norm());
  Vector w = scale * w_hat;
  // Rounding in the product must not undercut either condition.
  while (w.norm() < upper_weight_norm) w *= std::nextafter(1.0, 2.0);
  return EnforceLowerRadius(std::move(w), p_norm, rg, alpha, delta_norm);
}

WeightState seed_lower_state(WeightKind kind, double mu, double nu, const Vector& varsigma,
                             const Vector& w0, const Vector& g0) {
  RequireSameSize(varsigma, w0, "seed_lower_state");
  RequireSameSize(varsigma, g0, "seed_lower_state");
  WeightState state(kind, mu, nu, varsigma);
  if (kind == WeightKind::kAdagradLike) {
    // Offsets make the accumulated schedule start from w0 rather than jump to it.
    for (Index j = 0; j < w0.size(); ++j) {
      const double target = std::pow(w0(j), 1.0 / mu);
      state.offsets_(j) = std::max(0.0, target - varsigma(j) - g0(j) * g0(j));
    }
  }
  state.prescribed_ = w0;
  return state;
}

}  // namespace moffo
