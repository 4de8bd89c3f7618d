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

// Continuous-depth residual network discretized by forward Euler.
//
// Parameter layout for K layers of width m:
//   [theta_0 ... theta_{K-1} | Q | W_T | b_T]
// with theta_k = (W_k row-major (m x m), b_k (m)), Q (m x n_in) and
// W_T (n_out x m) row-major.

#include <cmath>
#include <numeric>
#include <utility>

#include "moffo/problems.hpp"

namespace moffo {

namespace {

struct Layout {
  int layers;
  int m;
  int n_in;
  int n_out;

  Index per_layer() const { return static_cast<Index>(m) * m + m; }
  Index shared() const { return static_cast<Index>(m) * n_in + static_cast<Index>(n_out) * m + n_out; }
  Index size() const { return layers * per_layer() + shared(); }
  Index w(int k) const { return k * per_layer(); }
  Index b(int k) const { return k * per_layer() + static_cast<Index>(m) * m; }
  Index q() const { return layers * per_layer(); }
  Index wt() const { return q() + static_cast<Index>(m) * n_in; }
  Index bt() const { return wt() + static_cast<Index>(n_out) * m; }
};

using RowMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMapMut = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

class ResNetOracle final : public GradientOracle {
 public:
  ResNetOracle(const ResNetSpec& spec, int layers, std::shared_ptr<const Dataset> data)
      : spec_(spec),
        lay_{layers, spec.width, spec.n_in, spec.n_out},
        data_(std::move(data)),
        dt_(spec.horizon / (layers - 1)) {}

  Index dimension() const override { return lay_.size(); }
  Index sample_count() const override { return data_->features.rows(); }

  Vector gradient(const Vector& x) const override {
    std::vector<Index> all(static_cast<std::size_t>(sample_count()));
    std::iota(all.begin(), all.end(), Index{0});
    Vector g;
    Evaluate(x, all, &g);
    return g;
  }

  std::optional<double> value(const Vector& x) const override {
    std::vector<Index> all(static_cast<std::size_t>(sample_count()));
    std::iota(all.begin(), all.end(), Index{0});
    return Evaluate(x, all, nullptr);
  }

  Vector subset_gradient(const Vector& x, std::span<const Index> samples) const override {
    Vector g;
    Evaluate(x, samples, &g);
    return g;
  }

 private:
  // Mean-square loss over `samples` plus the full regularizer; fills the
  // gradient when `grad` is non-null.
  double Evaluate(const Vector& x, std::span<const Index> samples, Vector* grad) const {
    if (x.size() != lay_.size()) throw DimensionError("resnet: parameter vector has wrong size");
    const int m = lay_.m;
    const int k_layers = lay_.layers;
    const double inv_batch = samples.empty() ? 0.0 : 1.0 / static_cast<double>(samples.size());
    if (grad != nullptr) *grad = Vector::Zero(x.size());

    const RowMap q_map(x.data() + lay_.q(), m, lay_.n_in);
    const RowMap wt_map(x.data() + lay_.wt(), lay_.n_out, m);
    const Eigen::Map<const Vector> bt(x.data() + lay_.bt(), lay_.n_out);

    double loss = 0.0;
    std::vector<Vector> states(static_cast<std::size_t>(k_layers));
    std::vector<Vector> acts(static_cast<std::size_t>(k_layers));
    for (Index s : samples) {
      const Vector y = data_->features.row(s).transpose();
      const Vector c = data_->targets.row(s).transpose();
      states[0] = q_map * y;
      for (int k = 0; k + 1 < k_layers; ++k) {
        const RowMap wk(x.data() + lay_.w(k), m, m);
        const Eigen::Map<const Vector> bk(x.data() + lay_.b(k), m);
        acts[static_cast<std::size_t>(k)] =
            (wk * states[static_cast<std::size_t>(k)] + bk).array().tanh().matrix();
        states[static_cast<std::size_t>(k + 1)] =
            states[static_cast<std::size_t>(k)] + dt_ * acts[static_cast<std::size_t>(k)];
      }
      const Vector& q_last = states[static_cast<std::size_t>(k_layers - 1)];
      const Vector residual = wt_map * q_last + bt - c;
      loss += residual.squaredNorm() * inv_batch;
      if (grad == nullptr) continue;

      Vector& gr = *grad;
      const Vector dc = 2.0 * inv_batch * residual;
      RowMapMut(gr.data() + lay_.wt(), lay_.n_out, m) += dc * q_last.transpose();
      gr.segment(lay_.bt(), lay_.n_out) += dc;
      Vector lambda = wt_map.transpose() * dc;
      for (int k = k_layers - 2; k >= 0; --k) {
        const auto ku = static_cast<std::size_t>(k);
        const RowMap wk(x.data() + lay_.w(k), m, m);
        const Vector dz =
            (dt_ * (1.0 - acts[ku].array().square()) * lambda.array()).matrix();
        RowMapMut(gr.data() + lay_.w(k), m, m) += dz * states[ku].transpose();
        gr.segment(lay_.b(k), m) += dz;
        lambda += wk.transpose() * dz;
      }
      RowMapMut(gr.data() + lay_.q(), m, lay_.n_in) += lambda * y.transpose();
    }

    // Tikhonov term on the output map and the discretized time regularizer.
    const double b1 = spec_.beta1;
    const double b2 = spec_.beta2;
    const Index out_begin = lay_.wt();
    const Index out_size = lay_.n_out * static_cast<Index>(m) + lay_.n_out;
    loss += 0.5 * b1 * x.segment(out_begin, out_size).squaredNorm();
    if (grad != nullptr) grad->segment(out_begin, out_size) += b1 * x.segment(out_begin, out_size);
    const Index p = lay_.per_layer();
    for (int k = 0; k < k_layers; ++k) {
      const auto th = x.segment(k * p, p);
      loss += dt_ * 0.5 * b1 * th.squaredNorm();
      if (grad != nullptr) grad->segment(k * p, p) += dt_ * b1 * th;
      if (k + 1 < k_layers) {
        const Vector diff = (x.segment((k + 1) * p, p) - th) / dt_;
        loss += dt_ * 0.5 * b2 * diff.squaredNorm();
        if (grad != nullptr) {
          grad->segment((k + 1) * p, p) += b2 * diff;
          grad->segment(k * p, p) -= b2 * diff;
        }
      }
    }
    return loss;
  }

  ResNetSpec spec_;
  Layout lay_;
  std::shared_ptr<const Dataset> data_;
  double dt_;
};

}  // namespace

int resnet_layers(const ResNetSpec& spec, int level) {
  int k = spec.k_fine;
  for (int l = spec.levels; l > level; --l) k = (k + 1) / 2;
  return k;
}

Index resnet_dimension(const ResNetSpec& spec, int layers) {
  return Layout{layers, spec.width, spec.n_in, spec.n_out}.size();
}

TransferOperator build_depth_prolongation(Index k_coarse, Index per_layer, Index shared,
                                          double omega) {
  if (k_coarse < 2) throw DimensionError("build_depth_prolongation: k_coarse must be >= 2");
  if (per_layer < 1 || shared < 0) throw DimensionError("build_depth_prolongation: bad blocks");
  const Matrix p1 = linear_interpolation_1d(k_coarse, omega).prolongation();
  const Index kf = p1.rows();
  Matrix p = Matrix::Zero(kf * per_layer + shared, k_coarse * per_layer + shared);
  for (Index a = 0; a < kf; ++a) {
    for (Index b = 0; b < k_coarse; ++b) {
      if (p1(a, b) == 0.0) continue;
      for (Index j = 0; j < per_layer; ++j) p(a * per_layer + j, b * per_layer + j) = p1(a, b);
    }
  }
  for (Index j = 0; j < shared; ++j) {
    p(kf * per_layer + j, k_coarse * per_layer + j) = 1.0 / omega;
  }
  return TransferOperator(std::move(p), omega);
}

ProblemHierarchy resnet_regression(const ResNetSpec& spec, Index n_samples, std::uint64_t seed) {
  if (spec.width < 1 || spec.width > 16) throw DimensionError("resnet: width must lie in [1, 16]");
  if (spec.k_fine < 2 || spec.k_fine > 17) throw DimensionError("resnet: k_fine must lie in [2, 17]");
  if (n_samples < 1 || n_samples > 512) throw DimensionError("resnet: n_samples must lie in [1, 512]");
  if (spec.n_in < 1 || spec.n_out < 1) throw DimensionError("resnet: bad input/output size");
  if (spec.levels < 1) throw DimensionError("resnet: need at least one level");
  for (int l = spec.levels; l > 1; --l) {
    const int k = resnet_layers(spec, l);
    if (k < 3 || k % 2 == 0) {
      throw DimensionError("resnet: k_fine must allow halving (K = 2 K_coarse - 1) at every level");
    }
  }
  if (!(spec.horizon > 0.0)) throw DomainError("resnet: horizon must be positive");

  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> normal;

  auto data = std::make_shared<Dataset>();
  data->features.resize(n_samples, spec.n_in);
  for (Index s = 0; s < n_samples; ++s) {
    for (int j = 0; j < spec.n_in; ++j) data->features(s, j) = unif(rng);
  }
  Matrix mix(spec.n_out, spec.n_in);
  for (Index a = 0; a < mix.rows(); ++a) {
    for (Index b = 0; b < mix.cols(); ++b) mix(a, b) = normal(rng);
  }
  data->targets = (data->features * mix.transpose()).array().sin().matrix();

  std::vector<OraclePtr> oracles;
  std::vector<TransferOperator> transfers;
  const Layout fine{spec.k_fine, spec.width, spec.n_in, spec.n_out};
  for (int l = 1; l <= spec.levels; ++l) {
    const int k = resnet_layers(spec, l);
    oracles.push_back(std::make_shared<ResNetOracle>(spec, k, data));
    if (l > 1) {
      transfers.push_back(build_depth_prolongation(resnet_layers(spec, l - 1), fine.per_layer(),
                                                   fine.shared(), 0.5));
    }
  }

  ProblemHierarchy p;
  p.name = "resnet";
  p.hierarchy = LevelHierarchy(oracles, transfers);
  p.exact = oracles;
  p.x0.resize(fine.size());
  const double shared_scale = 1.0 / std::sqrt(static_cast<double>(spec.width));
  for (Index j = 0; j < fine.q(); ++j) p.x0(j) = spec.init_scale * normal(rng);
  for (Index j = fine.q(); j < fine.size(); ++j) p.x0(j) = shared_scale * normal(rng);
  p.f_low = 0.0;
  p.dataset_size = n_samples;
  p.dataset = data;
  return p;
}

}  // namespace moffo
