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

// Per-coordinate weight schedules. The trust-region radius is |g_j| / w_j, so
// weights play the role of inverse learning rates.

#ifndef MOFFO_WEIGHTS_HPP_
#define MOFFO_WEIGHTS_HPP_

#include <optional>
#include <string_view>

#include "moffo/common.hpp"

namespace moffo {

enum class WeightKind {
  kAdagradLike,  // w_j = (s_j + c_j + sum_k g_kj^2)^mu
  kMaxGi,        // w_j = max(s_j, max_k |g_kj|) (i+1)^nu
};

std::string_view ToString(WeightKind kind);
WeightKind ParseWeightKind(std::string_view name);

class WeightState {
 public:
  /// Fresh top-level schedule: no offsets, no prescribed floor.
  WeightState(WeightKind kind, double mu, double nu, Vector varsigma);

  /// Feeds the gradient of the current iteration and returns the weights to
  /// use at that iteration. Emitted weights never decrease.
  Vector Update(const Vector& g);

  WeightKind kind() const { return kind_; }
  double mu() const { return mu_; }
  double nu() const { return nu_; }
  long iteration() const { return iteration_; }
  Index dimension() const { return varsigma_.size(); }
  const Vector& floors() const { return varsigma_; }
  /// Sum of squares (AdaGrad-like) or running max |g| (MAXGI).
  const Vector& accumulator() const { return accumulator_; }
  const Vector& offsets() const { return offsets_; }
  const std::optional<Vector>& prescribed_floor() const { return prescribed_; }

 private:
  friend WeightState seed_lower_state(WeightKind, double, double, const Vector&, const Vector&,
                                      const Vector&);

  WeightKind kind_;
  double mu_;
  double nu_;
  Vector varsigma_;
  Vector accumulator_;
  Vector offsets_;
  std::optional<Vector> prescribed_;
  long iteration_ = 0;
};

/// Lower-level initial weights for divergent (MAXGI) schedules:
/// w_j = max(s_j, ||P|| |Rg|_j / (alpha ||Delta||), min_k w_upper_k), scaled up
/// uniformly if needed so that ||D(w) |Rg||| <= alpha ||Delta|| / ||P||.
Vector init_lower_divergent(const Vector& varsigma, double p_norm, const Vector& rg, double alpha,
                            double delta_norm, double min_upper_weight);

/// Lower-level initial weights for AdaGrad-like schedules: the simple bound
/// rescaled so that ||w_out|| >= ||w_upper|| and the radius bound above holds.
Vector init_lower_adagrad(const Vector& varsigma, double p_norm, const Vector& rg, double alpha,
                          double delta_norm, double upper_weight_norm);

/// Schedule for a lower level whose first emitted weights are exactly `w0`
/// and which never drops below `w0` afterwards. `g0` is the restricted upper
/// gradient (the first lower gradient under linear coherence).
WeightState seed_lower_state(WeightKind kind, double mu, double nu, const Vector& varsigma,
                             const Vector& w0, const Vector& g0);

}  // namespace moffo

#endif  // MOFFO_WEIGHTS_HPP_
