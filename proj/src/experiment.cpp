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

#include "moffo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "moffo/baselines.hpp"
#include "moffo/bounds.hpp"
#include "moffo/trace_io.hpp"

namespace moffo {

namespace {

using nlohmann::json;

// Typed access to one JSON object that remembers which keys were read, so
// that leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool Has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  template <typename T>
  T Get(const std::string& key, T fallback) {
    if (!Has(key)) return fallback;
    return As<T>(key);
  }

  template <typename T>
  T Require(const std::string& key) {
    if (!Has(key)) throw ConfigError(Field(key) + ": required");
    return As<T>(key);
  }

  const json& Raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string Field(const std::string& key) const { return path_ + "." + key; }

  void Finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(Field(key) + ": unknown key");
    }
  }

 private:
  template <typename T>
  T As(const std::string& key) {
    const json& v = obj_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(Field(key) + ": expected a boolean");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!v.is_number()) throw ConfigError(Field(key) + ": expected a number");
        if constexpr (std::is_integral_v<T>) {
          if (!v.is_number_integer()) throw ConfigError(Field(key) + ": expected an integer");
        }
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(Field(key) + ": expected a string");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(Field(key) + ": " + e.what());
    }
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

SolverConfig ParseSolver(const json& obj, const ProblemHierarchy& problem,
                         std::optional<double>* stop_exact_rel) {
  const int depth = problem.depth();
  Reader r(obj, "solver");
  SolverConfig c;
  c.kappa_r = r.Get("kappa_R", c.kappa_r);
  c.alpha = r.Get("alpha", c.alpha);
  c.tau = r.Get("tau", c.tau);
  c.kappa_b = r.Get("kappa_B", c.kappa_b);
  c.varsigma = r.Get("varsigma", c.varsigma);
  if (r.Has("varsigma_levels")) {
    const json& v = r.Raw("varsigma_levels");
    if (!v.is_array() || v.size() != static_cast<std::size_t>(depth)) {
      throw ConfigError(r.Field("varsigma_levels") + ": expected one number per level");
    }
    for (int l = 1; l <= depth; ++l) {
      const json& e = v[static_cast<std::size_t>(l - 1)];
      if (!e.is_number() || !(e.get<double>() > 0.0)) {
        throw ConfigError(r.Field("varsigma_levels") + ": entries must be positive numbers");
      }
      c.floors.push_back(Vector::Constant(problem.hierarchy.dimension(l), e.get<double>()));
    }
  }
  c.mu = r.Get("mu", c.mu);
  if (r.Has("nu")) c.nu = r.Get("nu", 0.0);
  if (r.Has("weights")) {
    try {
      c.weights = ParseWeightKind(r.Get<std::string>("weights", ""));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(r.Field("weights") + ": " + e.what());
    }
  }
  c.eps_top = r.Get("eps", c.eps_top);
  c.eps_relative = r.Get("eps_relative", c.eps_relative);
  if (r.Has("i_max")) {
    const json& v = r.Raw("i_max");
    if (v.is_number_integer()) {
      c.i_max.assign(static_cast<std::size_t>(depth), v.get<long>());
    } else if (v.is_array()) {
      c.i_max.clear();
      for (const auto& e : v) {
        if (!e.is_number_integer()) throw ConfigError(r.Field("i_max") + ": expected integers");
        c.i_max.push_back(e.get<long>());
      }
    } else {
      throw ConfigError(r.Field("i_max") + ": expected an integer or an array");
    }
  } else {
    c.i_max.assign(static_cast<std::size_t>(depth), 2);
    c.i_max.back() = 1000;
  }
  c.pre_smooth = r.Get("pre_smooth", c.pre_smooth);
  c.post_smooth = r.Get("post_smooth", c.post_smooth);
  c.lower_eps_factor = r.Get("lower_eps_factor", c.lower_eps_factor);
  c.strict_descent_monitoring = r.Get("strict_descent_monitoring", c.strict_descent_monitoring);
  if (r.Has("weak_coherence_kappa_E")) {
    c.weak_coherence_kappa_e = r.Get("weak_coherence_kappa_E", 0.0);
  }
  const auto hessian = r.Get<std::string>("hessian", "none");
  const double hessian_scale = r.Get("hessian_scale", 1.0);
  if (!(hessian_scale > 0.0)) throw ConfigError(r.Field("hessian_scale") + ": must be positive");
  if (hessian != "exact" && r.Has("hessian_scale")) {
    throw ConfigError(r.Field("hessian_scale") + ": only meaningful with hessian = exact");
  }
  if (hessian == "exact") {
    if (problem.hessians.empty()) {
      throw ConfigError(r.Field("hessian") + ": no exact Hessian for this problem");
    }
    for (int l = 1; l <= depth; ++l) {
      try {
        problem.hessians[static_cast<std::size_t>(l - 1)](problem.x0, c.kappa_b / hessian_scale);
      } catch (const DomainError& e) {
        throw ConfigError(r.Field("kappa_B") + ": " + e.what());
      }
    }
    c.hessian = [h = problem.hessians, kb = c.kappa_b, hessian_scale](int level, const Vector& x,
                                                                       const Vector&) {
      return h[static_cast<std::size_t>(level - 1)](x, kb / hessian_scale).Scaled(hessian_scale);
    };
  } else if (hessian != "none") {
    throw ConfigError(r.Field("hessian") + ": expected none or exact");
  }
  c.step_scale = r.Get("step_scale", c.step_scale);
  c.refine_taylor = r.Get("refine_taylor", c.refine_taylor);
  c.diagnostics = r.Get("diagnostics", c.diagnostics);
  c.check_invariants = r.Get("check_invariants", c.check_invariants);
  if (r.Has("stop_exact_rel")) *stop_exact_rel = r.Get("stop_exact_rel", 0.0);
  r.Finish();
  try {
    ValidateConfig(c, depth);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (*stop_exact_rel && !(**stop_exact_rel > 0.0)) {
    throw ConfigError("solver.stop_exact_rel: must be positive");
  }
  return c;
}

json RunJson(const RunOutcome& o, const std::string& trace_file) {
  json j;
  j["method"] = o.method;
  j["seed"] = o.seed;
  j["status"] = std::string(ToString(o.result.status));
  j["iterations"] = o.result.top_iterations;
  j["final_grad_norm"] = o.result.final_grad_norm;
  j["final_exact_grad_norm"] = o.exact_grad_norm;
  j["initial_exact_grad_norm"] = o.exact_grad_norm0;
  j["cost"] = o.result.ledger.total();
  json per_level = json::array();
  for (int l = 1; l <= o.result.ledger.depth(); ++l) per_level.push_back(o.result.ledger.count(l));
  j["gradient_evaluations"] = per_level;
  j["wall_time_s"] = o.wall_seconds;
  j["trace_file"] = trace_file;
  return j;
}

}  // namespace

ProblemHierarchy build_problem(const json& spec) {
  Reader r(spec, "problem");
  const auto name = r.Require<std::string>("name");
  ProblemHierarchy p;
  if (name == "quadratic") {
    p = quadratic_2d();
  } else if (name == "laplacian" || name == "chain") {
    const long n = r.Get("n", name == "laplacian" ? 255L : 63L);
    const int levels = r.Get("levels", 3);
    try {
      p = name == "laplacian" ? laplacian_quadratic_1d(n, levels) : nonconvex_chain_1d(n, levels);
    } catch (const DimensionError& e) {
      throw ConfigError(r.Field("n") + ": " + e.what());
    }
  } else if (name == "resnet") {
    ResNetSpec s;
    s.k_fine = r.Get("k_fine", s.k_fine);
    s.levels = r.Get("levels", s.levels);
    s.width = r.Get("width", s.width);
    s.n_in = r.Get("n_in", s.n_in);
    s.n_out = r.Get("n_out", s.n_out);
    s.horizon = r.Get("horizon", s.horizon);
    s.beta1 = r.Get("beta1", s.beta1);
    s.beta2 = r.Get("beta2", s.beta2);
    const long samples = r.Get("samples", 64L);
    const auto seed = r.Get<std::uint64_t>("data_seed", 7);
    try {
      p = resnet_regression(s, samples, seed);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("problem: ") + e.what());
    }
  } else {
    throw ConfigError(r.Field("name") + ": unknown problem '" + name + "'");
  }
  if (r.Has("noise")) {
    Reader nr(r.Raw("noise"), "problem.noise");
    const auto kind = nr.Require<std::string>("kind");
    const auto seed = nr.Get<std::uint64_t>("seed", 0);
    try {
      if (kind == "minibatch") {
        p = with_minibatch(p, nr.Require<double>("fraction"), seed);
      } else if (kind == "gaussian") {
        p = with_gaussian_noise(p, nr.Require<double>("sigma"), seed);
      } else if (kind != "none") {
        throw ConfigError(nr.Field("kind") + ": unknown noise kind '" + kind + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("problem.noise: ") + e.what());
    }
    nr.Finish();
  }
  r.Finish();
  return p;
}

ExperimentConfig parse_experiment_config(const json& doc) {
  Reader top(doc, "config");
  ExperimentConfig c;
  c.problem = top.Require<json>("problem");
  const ProblemHierarchy problem = build_problem(c.problem);
  c.solver = ParseSolver(top.Has("solver") ? top.Raw("solver") : json::object(), problem,
                         &c.stop_exact_rel);
  if (top.Has("baselines")) {
    const json& list = top.Raw("baselines");
    if (!list.is_array()) throw ConfigError("baselines: expected an array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      Reader b(list[k], "baselines[" + std::to_string(k) + "]");
      BaselineSpec spec;
      spec.kind = b.Require<std::string>("kind");
      if (spec.kind != "sgd" && spec.kind != "adagrad_oracle" &&
          spec.kind != "single_level_variant") {
        throw ConfigError(b.Field("kind") + ": unknown baseline '" + spec.kind + "'");
      }
      spec.lr = b.Get("lr", spec.lr);
      if (!(spec.lr > 0.0)) throw ConfigError(b.Field("lr") + ": must be positive");
      if (b.Has("i_max")) spec.i_max = b.Get("i_max", 0L);
      b.Finish();
      c.baselines.push_back(spec);
    }
  }
  if (top.Has("runs")) {
    Reader r(top.Raw("runs"), "runs");
    const long reps = r.Get("repetitions", -1L);
    if (r.Has("seeds")) {
      const json& s = r.Raw("seeds");
      if (!s.is_array() || s.empty()) throw ConfigError("runs.seeds: expected a non-empty array");
      c.seeds.clear();
      for (const auto& e : s) {
        if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<long>() >= 0)) {
          throw ConfigError("runs.seeds: expected non-negative integers");
        }
        c.seeds.push_back(e.get<std::uint64_t>());
      }
      if (reps >= 0) {
        if (static_cast<std::size_t>(reps) > c.seeds.size()) {
          throw ConfigError("runs.repetitions: more repetitions than seeds");
        }
        c.seeds.resize(static_cast<std::size_t>(reps));
      }
    } else if (reps >= 0) {
      c.seeds.clear();
      for (long k = 0; k < reps; ++k) c.seeds.push_back(static_cast<std::uint64_t>(k));
    }
    if (c.seeds.empty()) throw ConfigError("runs.repetitions: must be positive");
    c.output_dir = r.Get("output_dir", c.output_dir);
    const auto trace = r.Get<std::string>("trace", "full");
    if (trace != "full" && trace != "top") throw ConfigError("runs.trace: expected full or top");
    c.trace_lower = trace == "full";
    r.Finish();
  }
  c.solver.record_lower = c.trace_lower;
  top.Finish();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_experiment_config(doc);
}

RunOutcome run_method(const ExperimentConfig& config, const ProblemHierarchy& problem,
                      const BaselineSpec& method, std::uint64_t seed) {
  RunOutcome out;
  out.method = method.kind;
  out.seed = seed;
  const GradientOracle& exact = problem.exact_top();
  out.exact_grad_norm0 = exact.gradient(problem.x0).norm();
  StopMonitor monitor;
  if (config.stop_exact_rel) {
    const double threshold = *config.stop_exact_rel * out.exact_grad_norm0;
    monitor = [&exact, threshold](const Vector& x, const Vector&, long) {
      return exact.gradient(x).norm() <= threshold;
    };
  }
  SolverConfig solver = config.solver;
  solver.seed = seed;
  BaselineOptions opts;
  opts.i_max = method.i_max.value_or(solver.i_max.back());
  opts.eps = solver.eps_top;
  opts.eps_relative = solver.eps_relative;
  opts.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  if (method.kind == "mofftr") {
    out.result = solve(problem.hierarchy, solver, problem.x0, monitor);
  } else if (method.kind == "single_level_variant") {
    if (method.i_max) solver.i_max.back() = *method.i_max;
    out.result = run_single_level(problem, solver, monitor);
  } else if (method.kind == "sgd") {
    out.result = run_sgd(problem, method.lr, opts, monitor);
  } else if (method.kind == "adagrad_oracle") {
    out.result = run_adagrad(problem, solver.varsigma, opts, monitor);
  } else {
    throw ConfigError("unknown method '" + method.kind + "'");
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.exact_grad_norm = exact.gradient(out.result.x).norm();
  return out;
}

unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MOFFO_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    if (v >= 1 && std::thread::hardware_concurrency() == 0) n = static_cast<unsigned>(v);
  }
  return n;
}

json run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  const ProblemHierarchy problem = build_problem(config.problem);
  std::vector<BaselineSpec> methods{{"mofftr", 0.0, std::nullopt}};
  methods.insert(methods.end(), config.baselines.begin(), config.baselines.end());

  struct Job {
    std::size_t method;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    for (auto s : config.seeds) jobs.push_back({m, s});
  }
  std::vector<RunOutcome> outcomes(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
      try {
        outcomes[k] = run_method(config, problem, methods[jobs[k].method], jobs[k].seed);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned n_threads =
      std::min<unsigned>(sweep_threads(), static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::filesystem::create_directories(out_dir);
  json summary;
  summary["problem"] = problem.name;
  summary["levels"] = problem.depth();
  summary["runs"] = json::array();
  std::map<std::string, std::vector<double>> costs;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const RunOutcome& o = outcomes[k];
    const std::string file = "trace_" + o.method + "_seed" + std::to_string(o.seed) + ".csv";
    write_trace_csv_file((std::filesystem::path(out_dir) / file).string(), o.result.trace,
                         config.solver.diagnostics);
    summary["runs"].push_back(RunJson(o, file));
    costs[o.method].push_back(o.result.ledger.total());
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  json med;
  for (const auto& [method, v] : costs) med[method] = median(v);
  summary["median_cost"] = med;
  if (costs.count("single_level_variant")) {
    summary["cost_ratio_single_over_multilevel"] =
        median(costs["single_level_variant"]) / median(costs["mofftr"]);
  }
  std::ofstream(std::filesystem::path(out_dir) / "summary.json") << summary.dump(2) << '\n';
  return summary;
}

json check_bounds(const ExperimentConfig& config, bool* ok) {
  const ProblemHierarchy problem = build_problem(config.problem);
  if (problem.noise.kind != NoiseKind::kNone) {
    throw ConfigError("problem.noise: rate checks need noise-free gradients");
  }
  if (!problem.f_low) throw ConfigError("problem.name: no known lower bound for this problem");
  SolverConfig solver = config.solver;
  solver.seed = config.seeds.front();
  const TheoryConstants constants = compute_theory_constants(problem, solver, solver.seed);
  const SolveResult res = solve(problem.hierarchy, solver, problem.x0);
  const std::vector<double> norms = top_gradient_norms(res.trace, problem.depth());

  json report;
  report["problem"] = problem.name;
  report["constants"] = ToJson(constants);
  report["checks"] = json::object();
  *ok = true;
  if (solver.weights == WeightKind::kAdagradLike) {
    const RateReport r = check_adagrad_rate(norms, constants.kappa_star.value);
    report["checks"][r.name] = ToJson(r);
    if (r.status == CheckStatus::kFail) *ok = false;
  } else {
    // A subsequence statement: reported, never asserted.
    const RateReport r = check_divergent_rate(norms, constants.divergent, constants.mu);
    report["checks"][r.name] = ToJson(r);
  }
  json inv = json::object();
  for (const auto& [name, count] : res.invariant_checks) inv[name] = count;
  report["invariant_checks"] = inv;
  report["run"] = {{"status", std::string(ToString(res.status))},
                   {"iterations", res.top_iterations},
                   {"final_grad_norm", res.final_grad_norm},
                   {"cost", res.ledger.total()}};
  return report;
}

}  // namespace moffo
