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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "moffo/step.hpp"

namespace moffo {
namespace {

Vector V(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

TEST(Radius, TopLevel) {
  TrustRegion tr = compute_radius(V({2, 4}), V({1, -2}), true, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(tr.radius(0), 0.5);
  EXPECT_DOUBLE_EQ(tr.radius(1), 0.5);
  EXPECT_TRUE(tr.raw_radius.isApprox(tr.radius));
}

TEST(Radius, LowerLevelShrinks) {
  TrustRegion tr = compute_radius(V({2, 4}), V({1, -2}), false, 0.1, 1.0);
  EXPECT_NEAR(tr.raw_radius.norm(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(tr.radius(0), 0.141421356, 1e-8);
  EXPECT_NEAR(tr.radius(1), 0.141421356, 1e-8);
  EXPECT_NEAR(tr.radius.norm(), 0.2, 1e-14);
}

TEST(Radius, ZeroGradient) {
  TrustRegion tr = compute_radius(V({1, 1}), Vector::Zero(2), false, 0.1, 1.0);
  EXPECT_EQ(tr.radius.norm(), 0.0);
  EXPECT_THROW(compute_radius(V({0, 1}), V({1, 1}), true, 0.0, 1.0), DomainError);
}

TEST(LinearStep, BoxCorner) {
  Vector s = linear_step(V({1, -2}), V({0.5, 0.5}));
  EXPECT_DOUBLE_EQ(s(0), -0.5);
  EXPECT_DOUBLE_EQ(s(1), 0.5);
  EXPECT_EQ(linear_step(Vector::Zero(2), V({1, 1})).norm(), 0.0);
}

TEST(LinearStep, MatchesCornerEnumeration) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 200; ++t) {
    Vector g(3), r(3);
    for (Index j = 0; j < 3; ++j) {
      g(j) = normal(rng);
      r(j) = std::abs(normal(rng));
    }
    double best = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
      double v = 0.0;
      for (int j = 0; j < 3; ++j) v += g(j) * ((mask >> j) & 1 ? r(j) : -r(j));
      best = std::min(best, v);
    }
    EXPECT_NEAR(g.dot(linear_step(g, r)), best, 1e-14);
  }
}

TEST(CauchyStep, Examples) {
  Vector s = cauchy_step(V({1, -2}), V({1, 1}), HessianModel::Diagonal(V({1, 1}), 1.0));
  EXPECT_DOUBLE_EQ(s(0), -1.0);
  EXPECT_DOUBLE_EQ(s(1), 1.0);
  s = cauchy_step(V({1, -2}), V({1, 1}), HessianModel::Zero());
  EXPECT_DOUBLE_EQ(s(0), -1.0);
  s = cauchy_step(V({1}), V({1}), HessianModel::Diagonal(V({4}), 4.0));
  EXPECT_DOUBLE_EQ(s(0), -0.25);
}

TEST(TaylorStep, LinearModelIsCorner) {
  const Vector g = V({3, -1, 0.5});
  const Vector r = V({0.1, 0.2, 0.3});
  EXPECT_TRUE(taylor_step(g, r, HessianModel::Zero(), 1.0).isApprox(linear_step(g, r)));
  EXPECT_THROW(taylor_step(g, r, HessianModel::Zero(), 0.0), DomainError);
}

TEST(Hessian, TridiagonalMatchesDense) {
  const Vector d = V({2, 3, 4, 5});
  const Vector off = V({-1, 0.5, -0.25});
  Matrix dense = Matrix::Zero(4, 4);
  dense.diagonal() = d;
  for (Index j = 0; j < 3; ++j) dense(j, j + 1) = dense(j + 1, j) = off(j);
  HessianModel tri = HessianModel::Tridiagonal(d, off, 10.0);
  HessianModel full = HessianModel::Explicit(dense, 10.0);
  const Vector s = V({1, -2, 0.5, 3});
  EXPECT_TRUE(tri.Apply(s).isApprox(full.Apply(s)));
  EXPECT_TRUE(tri.Diag(4).isApprox(d));
  EXPECT_THROW(HessianModel::Tridiagonal(d, off, 5.0), DomainError);
  EXPECT_THROW(HessianModel::Tridiagonal(d, V({1}), 10.0), DimensionError);
  HessianModel twice = tri.Scaled(2.0);
  EXPECT_DOUBLE_EQ(twice.kappa_b(), 20.0);
  EXPECT_TRUE(twice.Apply(s).isApprox(2.0 * tri.Apply(s)));
}

TEST(Hessian, RejectsOversizedModels) {
  EXPECT_THROW(HessianModel::Diagonal(V({3}), 2.0), DomainError);
  EXPECT_THROW(HessianModel::Zero(0.5), DomainError);
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_THROW(HessianModel::Explicit(a, 10.0), DomainError);
}

// Box bound, Cauchy-fraction bound and the linear-decrease inequality over
// random instances with weights above their floor.
TEST(TaylorStep, FuzzStructuralBounds) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 10000; ++t) {
    const Index n = 1 + static_cast<Index>(unit(rng) * 12);
    const double varsigma = 1e-3 + unit(rng) * (1.0 - 1e-3);
    const double kappa_b = 1.0 + 20.0 * unit(rng);
    const double tau = 0.05 + 0.95 * unit(rng);
    Vector g(n), w(n), d(n);
    for (Index j = 0; j < n; ++j) {
      g(j) = normal(rng) * std::pow(10.0, 4.0 * unit(rng) - 2.0);
      w(j) = varsigma + std::abs(normal(rng)) * 10.0;
      d(j) = (2.0 * unit(rng) - 1.0) * kappa_b;
    }
    const HessianModel b = t % 3 == 0 ? HessianModel::Zero(kappa_b)
                                      : HessianModel::Diagonal(d, kappa_b);
    const Vector radius = g.cwiseAbs().cwiseQuotient(w);
    const Vector s = taylor_step(g, radius, b, tau, t % 2 == 0);
    EXPECT_TRUE((s.cwiseAbs().array() <= radius.array() * (1.0 + 1e-15)).all()) << t;
    const Vector s_q = cauchy_step(g, radius, b);
    EXPECT_LE(b.Model(g, s), tau * b.Model(g, s_q) + 1e-12 * std::abs(b.Model(g, s_q))) << t;
    const double slack = TaylorDecreaseSlack(g, s, w, radius, tau, varsigma, kappa_b);
    EXPECT_GE(slack, -1e-12 * (1.0 + std::abs(g.dot(s)))) << t;
  }
}

// With a shrunken radius c D(w)|g| the first term scales by c.
TEST(TaylorStep, ShrunkRadiusDecrease) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 2000; ++t) {
    const Index n = 1 + static_cast<Index>(unit(rng) * 8);
    Vector g(n), w(n);
    for (Index j = 0; j < n; ++j) {
      g(j) = normal(rng);
      w(j) = 0.01 + std::abs(normal(rng));
    }
    const double c = unit(rng);
    const Vector radius = c * g.cwiseAbs().cwiseQuotient(w);
    const Vector s = taylor_step(g, radius, HessianModel::Zero(), 1.0);
    EXPECT_GE(TaylorDecreaseSlack(g, s, w, radius, 1.0, 0.01, 1.0, c), -1e-12);
  }
}

TEST(WeightedDecrease, Value) {
  EXPECT_DOUBLE_EQ(WeightedDecrease(V({1, 2}), V({1, 4})), 2.0);
}

}  // namespace
}  // namespace moffo
