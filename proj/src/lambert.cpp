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
#include <limits>
#include <numbers>

#include "moffo/bounds.hpp"

namespace moffo {

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

}  // namespace

double lambert_w_minus1(double x) {
  // Tolerate a few ulps below -1/e so that -1/e computed in floating point
  // lands on the branch point.
  if (!(x < 0.0) || x < -kInvE * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
    throw DomainError("lambert_w_minus1: x must lie in [-1/e, 0)");
  }
  if (x <= -kInvE) return -1.0;

  double w;
  const double q = 1.0 + std::numbers::e * x;  // distance to the branch point
  if (q < 0.25) {
    // Puiseux series around the branch point.
    const double p = -std::sqrt(2.0 * q);
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else {
    const double l1 = std::log(-x);
    w = l1 - std::log(-l1);
  }
  // Bracket [lo, hi] with f(lo) > 0 > f(hi) for f(w) = w e^w - x; f is
  // decreasing on (-inf, -1].
  double lo = -std::numeric_limits<double>::max();
  double hi = -1.0;
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (f == 0.0) return w;
    if (f > 0.0) {
      lo = std::max(lo, w);
    } else {
      hi = std::min(hi, w);
    }
    const double wp1 = w + 1.0;
    double next;
    if (wp1 == 0.0) {
      next = 0.5 * (w + (lo > -1e300 ? lo : 2.0 * w));
    } else {
      // Halley's step.
      const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
      next = w - f / denom;
    }
    if (!(next > lo && next < hi)) {
      next = lo > -1e300 ? 0.5 * (lo + hi) : 2.0 * hi - 1.0;
    }
    if (std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(w)) {
      return next;
    }
    w = next;
  }
  return w;
}

bool lambert_bound_check(double x) {
  if (!(x > 0.0)) throw DomainError("lambert_bound_check: x must be positive");
  const double bound = 1.0 + std::sqrt(2.0 * x) + x;
  if (x > 1e-3) return std::abs(lambert_w_minus1(-std::exp(-x - 1.0))) <= bound;
  // Forming -e^{-x-1} cancels x against the branch point. Solve
  // t - log1p(t) = x for t = |W| - 1 instead; Newton from t = sqrt(2x) + x
  // decreases monotonically since the map is convex.
  double t = std::sqrt(2.0 * x) + x;
  for (int it = 0; it < 100; ++it) {
    const double step = (t - std::log1p(t) - x) * (1.0 + t) / t;
    t -= step;
    if (std::abs(step) <= 1e-15 * t) break;
  }
  return 1.0 + t <= bound;
}

}  // namespace moffo
