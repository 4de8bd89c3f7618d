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

// Built-in problem hierarchies and noise wrappers.

#ifndef MOFFO_PROBLEMS_HPP_
#define MOFFO_PROBLEMS_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "moffo/common.hpp"
#include "moffo/hierarchy.hpp"
#include "moffo/step.hpp"

namespace moffo {

enum class NoiseKind { kNone, kMinibatch, kGaussian };

struct NoiseModel {
  NoiseKind kind = NoiseKind::kNone;
  double fraction = 1.0;  // minibatch
  double sigma = 0.0;     // gaussian
  std::uint64_t seed = 0;
};

/// Regression samples, one per row.
struct Dataset {
  Matrix features;
  Matrix targets;
};

struct ProblemHierarchy {
  std::string name;
  LevelHierarchy hierarchy;
  /// Noise-free oracles, index l-1. Equal to the hierarchy's oracles unless a
  /// noise wrapper was applied.
  std::vector<OraclePtr> exact;
  Vector x0;
  /// Gradient Lipschitz constant of the top level (exact, or a certified
  /// upper bound when `lipschitz_is_bound`).
  std::optional<double> lipschitz;
  bool lipschitz_is_bound = false;
  /// Lower bound on f_r. Diagnostics and theory constants only.
  std::optional<double> f_low;
  Index dataset_size = 0;
  /// Exact Hessian models per level (index l-1), when available. Empty
  /// otherwise.
  std::vector<std::function<HessianModel(const Vector& x, double kappa_b)>> hessians;
  NoiseModel noise;
  std::shared_ptr<const Dataset> dataset;

  int depth() const { return hierarchy.depth(); }
  const GradientOracle& exact_top() const { return *exact.back(); }
  /// The same problem restricted to its top `levels` levels.
  ProblemHierarchy TopLevels(int levels) const;
};

/// f(x) = x^T diag(d) x / 2 on a single level.
ProblemHierarchy diagonal_quadratic(const Vector& d, const Vector& x0);

/// f(x) = (x_1^2 + 2 x_2^2) / 2 started from (3, -4).
ProblemHierarchy quadratic_2d();

/// 1D Dirichlet Laplacian quadratic on n_fine = 2^m - 1 interior nodes.
/// Coarser levels use the same stencil on their own grid and the restricted
/// right-hand side. Starts from zero.
ProblemHierarchy laplacian_quadratic_1d(Index n_fine, int levels);

/// Tridiagonal [-1, 2, -1] / h^2 with h = 1 / (n + 1).
Matrix laplacian_matrix_1d(Index n);

/// Discrete elastic chain with a cosine potential and a smooth load,
/// u_0 = u_{n+1} = 0. Nonconvex, bounded below by -n h.
ProblemHierarchy nonconvex_chain_1d(Index n_fine, int levels);

struct ResNetSpec {
  int k_fine = 9;  // layers on the finest level
  int levels = 2;
  int width = 4;
  int n_in = 2;
  int n_out = 1;
  double horizon = 3.0;
  double beta1 = 1e-4;
  double beta2 = 1e-4;
  double init_scale = 0.1;
};

/// Layer count at `level` (1-based) when the finest of `levels` has k_fine.
int resnet_layers(const ResNetSpec& spec, int level);
Index resnet_dimension(const ResNetSpec& spec, int layers);

/// Continuous-depth residual network trained by mean-square regression on a
/// seeded synthetic dataset; forward Euler in depth.
ProblemHierarchy resnet_regression(const ResNetSpec& spec, Index n_samples, std::uint64_t seed);

/// Linear interpolation in depth for the layer parameters; the shared
/// parameters (input map, output map and bias) are carried over with the
/// factor 1/omega, so that restriction copies them unchanged.
TransferOperator build_depth_prolongation(Index k_coarse, Index per_layer, Index shared,
                                          double omega = 0.5);

/// Each gradient call uses ceil(fraction |D|) samples drawn without replacement.
ProblemHierarchy with_minibatch(const ProblemHierarchy& problem, double fraction,
                                std::uint64_t seed);

/// Adds N(0, sigma^2) noise to every gradient component.
ProblemHierarchy with_gaussian_noise(const ProblemHierarchy& problem, double sigma,
                                     std::uint64_t seed);

/// Largest relative deviation between central differences of the value
/// oracle and the gradient oracle at `level`. Coordinates are probed one by
/// one up to dimension 100, random unit directions above.
double finite_difference_check(const ProblemHierarchy& problem, int level, const Vector& x,
                               double h, std::uint64_t seed = 0);

void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

struct ProblemInfo {
  std::string name;
  std::string description;
  double gradcheck_threshold;
  double gradcheck_step;
};

/// Built-in problems in registry order.
const std::vector<ProblemInfo>& problem_registry();
/// Default instance of a registered problem. Throws std::invalid_argument
/// for unknown names.
ProblemHierarchy make_default_problem(const std::string& name);

}  // namespace moffo

#endif  // MOFFO_PROBLEMS_HPP_
