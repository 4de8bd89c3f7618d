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


// Python bindings. Configs cross the boundary as JSON text; the package
// wrapper in moffo/__init__.py converts dicts.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "json.hpp"

#include "moffo/bounds.hpp"
#include "moffo/experiment.hpp"
#include "moffo/hierarchy.hpp"
#include "moffo/problems.hpp"
#include "moffo/solver.hpp"
#include "moffo/trace_io.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

std::string Solve(const std::string& config_text, std::uint64_t seed) {
  const moffo::ExperimentConfig config = moffo::parse_experiment_config(json::parse(config_text));
  const moffo::ProblemHierarchy problem = moffo::build_problem(config.problem);
  const moffo::RunOutcome out = moffo::run_method(config, problem, {"mofftr"}, seed);
  const moffo::SolveResult& r = out.result;
  json doc = {{"status", std::string(moffo::ToString(r.status))},
              {"iterations", r.top_iterations},
              {"final_grad_norm", r.final_grad_norm},
              {"final_exact_grad_norm", out.exact_grad_norm},
              {"cost", r.ledger.total()},
              {"x", std::vector<double>(r.x.data(), r.x.data() + r.x.size())},
              {"trace_csv", moffo::trace_csv(r.trace, config.solver.diagnostics)}};
  return doc.dump();
}

std::string RunConfig(const std::string& config_text, const std::string& out_dir) {
  const moffo::ExperimentConfig config = moffo::parse_experiment_config(json::parse(config_text));
  return moffo::run_experiment(config, out_dir.empty() ? config.output_dir : out_dir).dump();
}

std::string CheckBounds(const std::string& config_text) {
  const moffo::ExperimentConfig config = moffo::parse_experiment_config(json::parse(config_text));
  bool ok = true;
  json report = moffo::check_bounds(config, &ok);
  report["ok"] = ok;
  return report.dump();
}

}  // namespace

PYBIND11_MODULE(_moffo, m) {
  m.doc() = "Multilevel objective-function-free trust-region optimizer";

  py::register_exception<moffo::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<moffo::DomainError>(m, "DomainError", PyExc_ValueError);

  py::class_<moffo::TransferOperator>(m, "TransferOperator")
      .def(py::init<moffo::Matrix, double>(), py::arg("prolongation"), py::arg("omega"))
      .def_property_readonly("prolongation", &moffo::TransferOperator::prolongation)
      .def_property_readonly("restriction", &moffo::TransferOperator::restriction)
      .def_property_readonly("omega", &moffo::TransferOperator::omega)
      .def_property_readonly("fine_dim", &moffo::TransferOperator::fine_dim)
      .def_property_readonly("coarse_dim", &moffo::TransferOperator::coarse_dim)
      .def("prolong", &moffo::TransferOperator::Prolong)
      .def("restrict", &moffo::TransferOperator::Restrict)
      .def("norm", &moffo::TransferOperator::norm)
      .def("sigma_min", &moffo::TransferOperator::sigma_min);

  m.def("linear_interpolation_1d", &moffo::linear_interpolation_1d, py::arg("n_coarse"),
        py::arg("omega") = 0.5);
  m.def("dirichlet_interpolation_1d", &moffo::dirichlet_interpolation_1d, py::arg("n_coarse"),
        py::arg("omega") = 0.5);

  m.def("lambert_w_minus1", &moffo::lambert_w_minus1, py::arg("x"));
  m.def("lambert_bound_check", &moffo::lambert_bound_check, py::arg("x"));
  m.def(
      "kappa_star",
      [](double mu, double varsigma, double n, double gamma0, double lipschitz, double beta1,
         double beta2) {
        const moffo::KappaStar k =
            moffo::kappa_star(mu, varsigma, n, gamma0, lipschitz, beta1, beta2);
        py::dict d;
        d["value"] = k.value;
        d["psi"] = k.psi;
        d["branch"] = k.branch;
        d["terms"] = k.terms;
        return d;
      },
      py::arg("mu"), py::arg("varsigma"), py::arg("n"), py::arg("gamma0"), py::arg("lipschitz"),
      py::arg("beta1"), py::arg("beta2"));
  m.def(
      "beta_recursion",
      [](double tau, double varsigma_min, double kappa_b, double kappa_r, double omega,
         double alpha, double lipschitz, std::vector<double> i_max,
         std::vector<double> sigma_min, int levels) {
        moffo::BetaParams p{tau,       varsigma_min,       kappa_b, kappa_r, omega, alpha,
                            lipschitz, std::move(i_max), std::move(sigma_min)};
        const moffo::BetaConstants b = moffo::beta_recursion(p, levels);
        return py::make_tuple(b.beta1, b.beta2);
      },
      py::arg("tau"), py::arg("varsigma_min"), py::arg("kappa_b"), py::arg("kappa_r"),
      py::arg("omega"), py::arg("alpha"), py::arg("lipschitz"), py::arg("i_max"),
      py::arg("sigma_min"), py::arg("levels"));

  m.def("list_problems", [] {
    py::list out;
    for (const auto& info : moffo::problem_registry()) out.append(py::make_tuple(info.name, info.description));
    return out;
  });
  m.def(
      "gradcheck",
      [](const std::string& name, int level, const moffo::Vector& x) {
        const moffo::ProblemHierarchy p = moffo::make_default_problem(name);
        for (const auto& info : moffo::problem_registry()) {
          if (info.name == name) return moffo::finite_difference_check(p, level, x, info.gradcheck_step, 1);
        }
        throw std::invalid_argument("unknown problem '" + name + "'");
      },
      py::arg("problem"), py::arg("level"), py::arg("x"));

  m.def("_solve", &Solve, py::arg("config_json"), py::arg("seed") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("_run_config", &RunConfig, py::arg("config_json"), py::arg("out_dir") = "",
        py::call_guard<py::gil_scoped_release>());
  m.def("_check_bounds", &CheckBounds, py::arg("config_json"),
        py::call_guard<py::gil_scoped_release>());
}
