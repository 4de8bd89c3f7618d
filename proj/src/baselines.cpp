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

#include "moffo/baselines.hpp"

#include <cmath>
#include <functional>

namespace moffo {

namespace {

using Update = std::function<Vector(const Vector& g, IterationRecord* rec)>;

SolveResult Loop(const ProblemHierarchy& problem, const BaselineOptions& opts,
                 const StopMonitor& monitor, const Update& update) {
  if (opts.i_max < 0) throw DomainError("baseline: i_max must be >= 0");
  const GradientOracle& f = problem.hierarchy.oracle(problem.depth());
  SolveResult res;
  res.ledger = CostLedger(1);
  res.x = problem.x0;
  Rng rng(opts.seed);
  double eps = opts.eps;
  for (long i = 0;; ++i) {
    double fraction = 1.0;
    const Vector g = f.sample_gradient(res.x, rng, &fraction);
    res.ledger.Charge(1, fraction);
    const double gnorm = g.norm();
    if (i == 0 && opts.eps_relative) eps = opts.eps * gnorm;
    res.top_iterations = i;
    res.final_grad_norm = gnorm;
    IterationRecord rec;
    rec.level = 1;
    rec.iter = i;
    rec.grad_norm = gnorm;
    rec.cost_cum = res.ledger.total();
    if (monitor && monitor(res.x, g, i)) {
      res.status = SolveStatus::kStoppedByMonitor;
      res.trace.push_back(rec);
      return res;
    }
    if (gnorm <= eps || i == opts.i_max) {
      res.status = gnorm <= eps ? SolveStatus::kConverged : SolveStatus::kMaxIterations;
      res.trace.push_back(rec);
      return res;
    }
    rec.kind = IterationKind::kTaylor;
    const Vector s = update(g, &rec);
    rec.step_norm = s.norm();
    res.trace.push_back(rec);
    res.x += s;
  }
}

}  // namespace

SolveResult run_sgd(const ProblemHierarchy& problem, double lr, const BaselineOptions& opts,
                    const StopMonitor& monitor) {
  if (!(lr > 0.0)) throw DomainError("sgd: learning rate must be positive");
  return Loop(problem, opts, monitor, [lr](const Vector& g, IterationRecord*) -> Vector {
    return -lr * g;
  });
}

SolveResult run_adagrad(const ProblemHierarchy& problem, double varsigma,
                        const BaselineOptions& opts, const StopMonitor& monitor) {
  if (!(varsigma > 0.0)) throw DomainError("adagrad: varsigma must be positive");
  Vector acc = Vector::Zero(problem.hierarchy.dimension(problem.depth()));
  return Loop(problem, opts, monitor, [&acc, varsigma](const Vector& g, IterationRecord* rec) {
    Vector s(g.size());
    double wmin = INFINITY, wmax = 0.0;
    for (Index j = 0; j < g.size(); ++j) {
      acc(j) += g(j) * g(j);
      const double w = std::sqrt(varsigma + acc(j));
      wmin = std::min(wmin, w);
      wmax = std::max(wmax, w);
      s(j) = -g(j) / w;
    }
    rec->w_min = wmin;
    rec->w_max = wmax;
    return s;
  });
}

SolveResult run_single_level(const ProblemHierarchy& problem, SolverConfig config,
                             const StopMonitor& monitor) {
  const ProblemHierarchy top = problem.TopLevels(1);
  if (!config.i_max.empty()) config.i_max = {config.i_max.back()};
  if (!config.floors.empty()) config.floors = {config.floors.back()};
  if (config.hessian) {
    // Levels are renumbered: the top becomes level 1.
    config.hessian = [inner = config.hessian, shift = problem.depth() - 1](
                         int level, const Vector& x, const Vector& g) {
      return inner(level + shift, x, g);
    };
  }
  return solve(top.hierarchy, config, top.x0, monitor);
}

}  // namespace moffo
