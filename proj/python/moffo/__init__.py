# Copyright 2026 The moffo Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Multilevel objective-function-free trust-region optimizer."""

import json as _json

from ._moffo import (
    ConfigError,
    DomainError,
    TransferOperator,
    beta_recursion,
    dirichlet_interpolation_1d,
    gradcheck,
    kappa_star,
    lambert_bound_check,
    lambert_w_minus1,
    linear_interpolation_1d,
    list_problems,
)
from . import _moffo

__all__ = [
    "ConfigError",
    "DomainError",
    "TransferOperator",
    "beta_recursion",
    "check_bounds",
    "dirichlet_interpolation_1d",
    "gradcheck",
    "kappa_star",
    "lambert_bound_check",
    "lambert_w_minus1",
    "linear_interpolation_1d",
    "list_problems",
    "run_config",
    "solve",
]


def solve(problem, solver=None, seed=0):
    """Runs the solver on a built-in problem.

    `problem` is a name or a problem block such as {"name": "laplacian", "n": 63};
    `solver` holds solver config keys. Returns a dict with x, status,
    iterations, cost, final_grad_norm and the trace as CSV text.
    """
    if isinstance(problem, str):
        problem = {"name": problem}
    doc = {"problem": problem, "solver": dict(solver or {})}
    return _json.loads(_moffo._solve(_json.dumps(doc), seed))


def run_config(config, out_dir=""):
    """Runs a full experiment config (dict or path); returns the summary."""
    if isinstance(config, str):
        with open(config) as f:
            config = _json.load(f)
    return _json.loads(_moffo._run_config(_json.dumps(config), out_dir))


def check_bounds(config):
    """Theory constants and rate checks; the report has an "ok" flag."""
    return _json.loads(_moffo._check_bounds(_json.dumps(config)))
