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

#include "moffo/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace moffo {

namespace {

class DiagonalQuadratic final : public GradientOracle {
 public:
  explicit DiagonalQuadratic(Vector d) : d_(std::move(d)) {}
  Index dimension() const override { return d_.size(); }
  Vector gradient(const Vector& x) const override {
    RequireSameSize(x, d_, "DiagonalQuadratic");
    return d_.cwiseProduct(x);
  }
  std::optional<double> value(const Vector& x) const override {
    return 0.5 * x.dot(d_.cwiseProduct(x));
  }

 private:
  Vector d_;
};

// (A x)_k with A = tridiag(-1, 2, -1) / h^2 and zero boundary values.
double LaplacianRow(const Vector& x, Index k, double inv_h2) {
  const Index n = x.size();
  const double left = k > 0 ? x(k - 1) : 0.0;
  const double right = k + 1 < n ? x(k + 1) : 0.0;
  return (2.0 * x(k) - left - right) * inv_h2;
}

class LaplacianQuadratic final : public GradientOracle {
 public:
  explicit LaplacianQuadratic(Vector b)
      : b_(std::move(b)), inv_h2_(std::pow(static_cast<double>(b_.size() + 1), 2)) {}

  Index dimension() const override { return b_.size(); }

  Vector gradient(const Vector& x) const override {
    RequireSameSize(x, b_, "LaplacianQuadratic");
    Vector g(x.size());
    for (Index k = 0; k < x.size(); ++k) g(k) = LaplacianRow(x, k, inv_h2_) - b_(k);
    return g;
  }

  std::optional<double> value(const Vector& x) const override {
    RequireSameSize(x, b_, "LaplacianQuadratic");
    double quad = 0.0;
    for (Index k = 0; k < x.size(); ++k) quad += x(k) * LaplacianRow(x, k, inv_h2_);
    return 0.5 * quad - b_.dot(x);
  }

  // Rows of the residual are the samples.
  Index sample_count() const override { return b_.size(); }

  Vector subset_gradient(const Vector& x, std::span<const Index> rows) const override {
    RequireSameSize(x, b_, "LaplacianQuadratic");
    Vector g = Vector::Zero(x.size());
    if (rows.empty()) return g;
    const double scale = static_cast<double>(b_.size()) / static_cast<double>(rows.size());
    for (Index k : rows) g(k) += scale * (LaplacianRow(x, k, inv_h2_) - b_(k));
    return g;
  }

  const Vector& rhs() const { return b_; }

 private:
  Vector b_;
  double inv_h2_;
};

// Thomas algorithm for tridiag(-1, 2, -1) / h^2 u = b.
Vector SolveLaplacian(const Vector& b) {
  const Index n = b.size();
  const double h2 = 1.0 / std::pow(static_cast<double>(n + 1), 2);
  Vector c(n), d(n);
  double denom = 2.0;
  c(0) = -1.0 / denom;
  d(0) = b(0) * h2 / denom;
  for (Index k = 1; k < n; ++k) {
    denom = 2.0 + c(k - 1);
    c(k) = -1.0 / denom;
    d(k) = (b(k) * h2 + d(k - 1)) / denom;
  }
  Vector u(n);
  u(n - 1) = d(n - 1);
  for (Index k = n - 2; k >= 0; --k) u(k) = d(k) - c(k) * u(k + 1);
  return u;
}

class ElasticChain final : public GradientOracle {
 public:
  explicit ElasticChain(Vector load)
      : load_(std::move(load)), h_(1.0 / static_cast<double>(load_.size() + 1)) {}

  Index dimension() const override { return load_.size(); }

  Vector gradient(const Vector& u) const override {
    RequireSameSize(u, load_, "ElasticChain");
    const Index n = u.size();
    Vector g(n);
    for (Index k = 0; k < n; ++k) g(k) = -h_ * std::sin(u(k)) - h_ * load_(k);
    for (Index e = 0; e <= n; ++e) {
      const double left = e > 0 ? u(e - 1) : 0.0;
      const double right = e < n ? u(e) : 0.0;
      const double t = (right - left) / h_;
      const double d = t / std::sqrt(1.0 + t * t);
      if (e < n) g(e) += d;
      if (e > 0) g(e - 1) -= d;
    }
    return g;
  }

  std::optional<double> value(const Vector& u) const override {
    RequireSameSize(u, load_, "ElasticChain");
    const Index n = u.size();
    double f = 0.0;
    for (Index e = 0; e <= n; ++e) {
      const double left = e > 0 ? u(e - 1) : 0.0;
      const double right = e < n ? u(e) : 0.0;
      const double t = (right - left) / h_;
      f += h_ * std::sqrt(1.0 + t * t);
    }
    for (Index k = 0; k < n; ++k) f += h_ * std::cos(u(k)) - h_ * load_(k) * u(k);
    return f;
  }

 private:
  Vector load_;
  double h_;
};

class MinibatchOracle final : public GradientOracle {
 public:
  MinibatchOracle(OraclePtr base, double fraction, std::uint64_t seed)
      : base_(std::move(base)), fraction_(fraction), seed_(seed) {
    n_ = base_->sample_count();
    if (n_ <= 0) throw std::invalid_argument("with_minibatch: objective is not sum-structured");
    batch_ = std::clamp<Index>(static_cast<Index>(std::ceil(fraction_ * static_cast<double>(n_))),
                               1, n_);
  }

  Index dimension() const override { return base_->dimension(); }
  Vector gradient(const Vector& x) const override { return base_->gradient(x); }
  std::optional<double> value(const Vector& x) const override { return base_->value(x); }
  Index sample_count() const override { return n_; }
  Vector subset_gradient(const Vector& x, std::span<const Index> s) const override {
    return base_->subset_gradient(x, s);
  }

  Vector sample_gradient(const Vector& x, Rng& rng, double* cost_fraction) const override {
    if (batch_ == n_) {
      if (cost_fraction != nullptr) *cost_fraction = 1.0;
      return base_->gradient(x);
    }
    const std::uint64_t draw = rng();
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32)};
    Rng local(seq);
    std::vector<Index> idx(static_cast<std::size_t>(n_));
    std::iota(idx.begin(), idx.end(), Index{0});
    // Partial Fisher-Yates: the first batch_ entries are a uniform sample.
    for (Index k = 0; k < batch_; ++k) {
      std::uniform_int_distribution<Index> pick(k, n_ - 1);
      std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(local))]);
    }
    std::sort(idx.begin(), idx.begin() + batch_);
    if (cost_fraction != nullptr) {
      *cost_fraction = static_cast<double>(batch_) / static_cast<double>(n_);
    }
    return base_->subset_gradient(x, std::span<const Index>(idx.data(),
                                                            static_cast<std::size_t>(batch_)));
  }

 private:
  OraclePtr base_;
  double fraction_;
  std::uint64_t seed_;
  Index n_ = 0;
  Index batch_ = 0;
};

class GaussianNoiseOracle final : public GradientOracle {
 public:
  GaussianNoiseOracle(OraclePtr base, double sigma, std::uint64_t seed)
      : base_(std::move(base)), sigma_(sigma), seed_(seed) {}

  Index dimension() const override { return base_->dimension(); }
  Vector gradient(const Vector& x) const override { return base_->gradient(x); }
  std::optional<double> value(const Vector& x) const override { return base_->value(x); }

  Vector sample_gradient(const Vector& x, Rng& rng, double* cost_fraction) const override {
    Vector g = base_->gradient(x);
    const std::uint64_t draw = rng();
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32)};
    Rng local(seq);
    std::normal_distribution<double> normal(0.0, sigma_);
    for (Index j = 0; j < g.size(); ++j) g(j) += normal(local);
    if (cost_fraction != nullptr) *cost_fraction = 1.0;
    return g;
  }

 private:
  OraclePtr base_;
  double sigma_;
  std::uint64_t seed_;
};

void CheckLevels(Index n_fine, int levels, const char* what) {
  if (levels < 1) throw DimensionError(std::string(what) + ": need at least one level");
  Index n = n_fine;
  if (n < 1 || ((n + 1) & n) != 0) {
    throw DimensionError(std::string(what) + ": n_fine must be 2^m - 1");
  }
  for (int l = 1; l < levels; ++l) {
    n = (n - 1) / 2;
    if (n < 1) throw DimensionError(std::string(what) + ": too many levels for n_fine");
  }
}

std::vector<TransferOperator> DirichletTransfers(Index n_fine, int levels) {
  std::vector<TransferOperator> out;
  Index n = n_fine;
  for (int l = 1; l < levels; ++l) {
    const Index coarse = (n - 1) / 2;
    out.insert(out.begin(), dirichlet_interpolation_1d(coarse, 0.5));
    n = coarse;
  }
  return out;
}

// Smooth forcing of the Laplacian with exact solution sum a_m sin(m pi t).
double LaplacianForcing(double t) {
  constexpr double kPi = std::numbers::pi;
  constexpr int kModes[] = {1, 3, 7};
  constexpr double kAmps[] = {1.0, 0.3, 0.1};
  double f = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double m = kModes[k] * kPi;
    f += kAmps[k] * m * m * std::sin(m * t);
  }
  return f;
}

double ChainLoad(double t) {
  constexpr double kPi = std::numbers::pi;
  return 2.0 * std::sin(kPi * t) + 0.5 * std::sin(3.0 * kPi * t);
}

Vector Grid(Index n, double (*f)(double)) {
  Vector v(n);
  const double h = 1.0 / static_cast<double>(n + 1);
  for (Index k = 0; k < n; ++k) v(k) = f(static_cast<double>(k + 1) * h);
  return v;
}

}  // namespace

ProblemHierarchy ProblemHierarchy::TopLevels(int levels) const {
  ProblemHierarchy out = *this;
  out.hierarchy = hierarchy.TopLevels(levels);
  out.exact.assign(exact.end() - levels, exact.end());
  if (!hessians.empty()) out.hessians.assign(hessians.end() - levels, hessians.end());
  return out;
}

ProblemHierarchy diagonal_quadratic(const Vector& d, const Vector& x0) {
  RequireSameSize(d, x0, "diagonal_quadratic");
  if ((d.array() < 0.0).any()) throw DomainError("diagonal_quadratic: negative curvature");
  ProblemHierarchy p;
  p.name = "quadratic";
  auto oracle = std::make_shared<DiagonalQuadratic>(d);
  p.hierarchy = LevelHierarchy({oracle}, {});
  p.exact = {oracle};
  p.x0 = x0;
  p.lipschitz = d.maxCoeff();
  p.f_low = 0.0;
  p.hessians = {[d](const Vector&, double kappa_b) { return HessianModel::Diagonal(d, kappa_b); }};
  return p;
}

ProblemHierarchy quadratic_2d() {
  return diagonal_quadratic(Vector::LinSpaced(2, 1.0, 2.0), (Vector(2) << 3.0, -4.0).finished());
}

Matrix laplacian_matrix_1d(Index n) {
  if (n < 1) throw DimensionError("laplacian_matrix_1d: n must be >= 1");
  const double inv_h2 = std::pow(static_cast<double>(n + 1), 2);
  Matrix a = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    a(k, k) = 2.0 * inv_h2;
    if (k > 0) a(k, k - 1) = -inv_h2;
    if (k + 1 < n) a(k, k + 1) = -inv_h2;
  }
  return a;
}

ProblemHierarchy laplacian_quadratic_1d(Index n_fine, int levels) {
  CheckLevels(n_fine, levels, "laplacian_quadratic_1d");
  std::vector<TransferOperator> transfers = DirichletTransfers(n_fine, levels);
  std::vector<Vector> rhs(static_cast<std::size_t>(levels));
  rhs.back() = Grid(n_fine, &LaplacianForcing);
  for (int l = levels - 1; l >= 1; --l) {
    rhs[static_cast<std::size_t>(l - 1)] =
        transfers[static_cast<std::size_t>(l - 1)].Restrict(rhs[static_cast<std::size_t>(l)]);
  }
  std::vector<OraclePtr> oracles;
  for (const auto& b : rhs) oracles.push_back(std::make_shared<LaplacianQuadratic>(b));

  ProblemHierarchy p;
  p.name = "laplacian";
  p.hierarchy = LevelHierarchy(oracles, transfers);
  p.exact = oracles;
  p.x0 = Vector::Zero(n_fine);
  const double n1 = static_cast<double>(n_fine + 1);
  p.lipschitz = (2.0 + 2.0 * std::cos(std::numbers::pi / n1)) * n1 * n1;
  const Vector u = SolveLaplacian(rhs.back());
  p.f_low = -0.5 * rhs.back().dot(u);
  p.dataset_size = n_fine;
  for (const auto& b : rhs) {
    const Index n = b.size();
    const double inv_h2 = std::pow(static_cast<double>(n + 1), 2);
    p.hessians.push_back([n, inv_h2](const Vector&, double kappa_b) {
      return HessianModel::Tridiagonal(Vector::Constant(n, 2.0 * inv_h2),
                                       Vector::Constant(n - 1, -inv_h2), kappa_b);
    });
  }
  return p;
}

ProblemHierarchy nonconvex_chain_1d(Index n_fine, int levels) {
  CheckLevels(n_fine, levels, "nonconvex_chain_1d");
  std::vector<TransferOperator> transfers = DirichletTransfers(n_fine, levels);
  std::vector<OraclePtr> oracles;
  Index n = n_fine;
  std::vector<Index> sizes;
  for (int l = 0; l < levels; ++l) {
    sizes.insert(sizes.begin(), n);
    n = (n - 1) / 2;
  }
  for (Index m : sizes) {
    Vector load = Grid(m, &ChainLoad);
    const double h = 1.0 / static_cast<double>(m + 1);
    // The bound below needs h sum |F| < 2.
    if (h * load.cwiseAbs().sum() >= 2.0) throw InvariantViolation("chain load too large");
    oracles.push_back(std::make_shared<ElasticChain>(std::move(load)));
  }
  ProblemHierarchy p;
  p.name = "chain";
  p.hierarchy = LevelHierarchy(oracles, transfers);
  p.exact = oracles;
  p.x0 = Vector::Zero(n_fine);
  const double h = 1.0 / static_cast<double>(n_fine + 1);
  p.lipschitz = 4.0 / h + h;
  p.lipschitz_is_bound = true;
  p.f_low = -static_cast<double>(n_fine) * h;
  return p;
}

ProblemHierarchy with_minibatch(const ProblemHierarchy& problem, double fraction,
                                std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw DomainError("with_minibatch: fraction must lie in (0, 1]");
  }
  std::vector<OraclePtr> wrapped;
  for (int l = 1; l <= problem.depth(); ++l) {
    wrapped.push_back(std::make_shared<MinibatchOracle>(problem.hierarchy.oracle_ptr(l), fraction,
                                                        seed + static_cast<std::uint64_t>(l)));
  }
  ProblemHierarchy out = problem;
  out.hierarchy = problem.hierarchy.WithOracles(std::move(wrapped));
  out.noise = {NoiseKind::kMinibatch, fraction, 0.0, seed};
  return out;
}

ProblemHierarchy with_gaussian_noise(const ProblemHierarchy& problem, double sigma,
                                     std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw DomainError("with_gaussian_noise: sigma must be >= 0");
  std::vector<OraclePtr> wrapped;
  for (int l = 1; l <= problem.depth(); ++l) {
    wrapped.push_back(std::make_shared<GaussianNoiseOracle>(problem.hierarchy.oracle_ptr(l), sigma,
                                                            seed + static_cast<std::uint64_t>(l)));
  }
  ProblemHierarchy out = problem;
  out.hierarchy = problem.hierarchy.WithOracles(std::move(wrapped));
  out.noise = {NoiseKind::kGaussian, 1.0, sigma, seed};
  return out;
}

double finite_difference_check(const ProblemHierarchy& problem, int level, const Vector& x,
                               double h, std::uint64_t seed) {
  if (!(h > 0.0)) throw DomainError("finite_difference_check: h must be positive");
  const GradientOracle& f = *problem.exact.at(static_cast<std::size_t>(level - 1));
  if (x.size() != f.dimension()) throw DimensionError("finite_difference_check: bad point");
  if (!f.value(x)) throw std::invalid_argument("finite_difference_check: no value oracle");
  const Vector g = f.gradient(x);
  auto central = [&](const Vector& d) {
    return (*f.value(x + h * d) - *f.value(x - h * d)) / (2.0 * h);
  };
  constexpr Index kCoordinateLimit = 100;
  constexpr int kDirections = 20;
  double err = 0.0;
  if (x.size() <= kCoordinateLimit) {
    const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
    for (Index j = 0; j < x.size(); ++j) {
      err = std::max(err, std::abs(central(Vector::Unit(x.size(), j)) - g(j)) / scale);
    }
  } else {
    Rng rng(seed);
    std::normal_distribution<double> normal;
    const double scale = std::max(g.norm(), 1e-300);
    for (int t = 0; t < kDirections; ++t) {
      Vector d(x.size());
      for (Index j = 0; j < d.size(); ++j) d(j) = normal(rng);
      d.normalize();
      err = std::max(err, std::abs(central(d) - g.dot(d)) / scale);
    }
  }
  return err;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  if (data.features.rows() != data.targets.rows()) {
    throw DimensionError("write_dataset_csv: row counts differ");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "id";
  for (Index j = 0; j < data.features.cols(); ++j) out << ",x" << j;
  for (Index j = 0; j < data.targets.cols(); ++j) out << ",y" << j;
  out << '\n';
  for (Index s = 0; s < data.features.rows(); ++s) {
    out << s;
    for (Index j = 0; j < data.features.cols(); ++j) out << ',' << data.features(s, j);
    for (Index j = 0; j < data.targets.cols(); ++j) out << ',' << data.targets(s, j);
    out << '\n';
  }
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  Index n_in = 0, n_out = 0;
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
      if (!cell.empty() && cell[0] == 'x') ++n_in;
      if (!cell.empty() && cell[0] == 'y') ++n_out;
    }
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    std::getline(ss, cell, ',');  // id
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<Index>(row.size()) != n_in + n_out) {
      throw std::runtime_error(path + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  Dataset d;
  d.features.resize(static_cast<Index>(rows.size()), n_in);
  d.targets.resize(static_cast<Index>(rows.size()), n_out);
  for (std::size_t s = 0; s < rows.size(); ++s) {
    for (Index j = 0; j < n_in; ++j) d.features(static_cast<Index>(s), j) = rows[s][j];
    for (Index j = 0; j < n_out; ++j) {
      d.targets(static_cast<Index>(s), j) = rows[s][static_cast<std::size_t>(n_in + j)];
    }
  }
  return d;
}

const std::vector<ProblemInfo>& problem_registry() {
  static const std::vector<ProblemInfo> kRegistry = {
      {"quadratic", "2-D diagonal quadratic diag(1, 2) from (3, -4), one level", 1e-9, 1e-4},
      {"laplacian", "1-D Dirichlet Laplacian quadratic, n = 255, 3 levels", 1e-9, 1e-4},
      {"chain", "nonconvex elastic chain with cosine potential, n = 63, 3 levels", 1e-6, 1e-6},
      {"resnet", "continuous-depth ResNet regression, 9 layers, width 4, 2 levels", 1e-5, 1e-5},
  };
  return kRegistry;
}

ProblemHierarchy make_default_problem(const std::string& name) {
  if (name == "quadratic") return quadratic_2d();
  if (name == "laplacian") return laplacian_quadratic_1d(255, 3);
  if (name == "chain") return nonconvex_chain_1d(63, 3);
  if (name == "resnet") return resnet_regression(ResNetSpec{}, 64, 7);
  throw std::invalid_argument("unknown problem '" + name + "'");
}

}  // namespace moffo
