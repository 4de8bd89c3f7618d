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


import math

import numpy as np
import pytest

import moffo


def test_interpolation_operator():
    op = moffo.linear_interpolation_1d(3)
    assert op.prolongation.shape == (5, 3)
    np.testing.assert_allclose(op.restriction, op.omega * op.prolongation.T)
    np.testing.assert_allclose(op.prolong(np.array([1.0, 2.0, 3.0])), [1, 1.5, 2, 2.5, 3])
    rng = np.random.default_rng(0)
    g, s = rng.normal(size=5), rng.normal(size=3)
    assert abs(g @ op.prolong(s) - op.restrict(g) @ s / op.omega) < 1e-12


def test_lambert():
    assert moffo.lambert_w_minus1(-1 / math.e) == pytest.approx(-1.0, abs=1e-8)
    w = moffo.lambert_w_minus1(-0.1)
    assert w * math.exp(w) == pytest.approx(-0.1, rel=1e-12)
    assert moffo.lambert_bound_check(1.0)
    with pytest.raises(ValueError):
        moffo.lambert_w_minus1(0.5)


def test_kappa_star_and_beta():
    k = moffo.kappa_star(0.5, 1.0, 2.0, 12.5, 2.0, 0.005, 1.0)
    assert k["branch"] == "mu=1/2"
    assert k["value"] == max(k["terms"])
    beta1, beta2 = moffo.beta_recursion(1.0, 0.01, 1.0, 0.01, 0.5, 5.0, 2.0, [3, 3], [0, 0.8], 2)
    assert beta1[0] == pytest.approx(0.005)
    assert beta1[1] == pytest.approx(5e-5)


def test_solve_quadratic():
    r = moffo.solve("quadratic", {"i_max": [5000], "eps": 1e-8})
    assert r["status"] == "converged"
    assert r["final_grad_norm"] <= 1e-8
    np.testing.assert_allclose(r["x"], [0.0, 0.0], atol=1e-7)
    assert r["trace_csv"].startswith("level,")


def test_solve_multilevel_laplacian():
    r = moffo.solve({"name": "laplacian", "n": 63, "levels": 3},
                    {"i_max": [2, 2, 300], "eps": 0})
    assert r["iterations"] == 300
    assert ",recursive," in r["trace_csv"]


def test_config_errors_name_field():
    with pytest.raises(moffo.ConfigError, match="solver.alpah"):
        moffo.solve("quadratic", {"alpah": 2.0})
    with pytest.raises(moffo.ConfigError, match="problem.name"):
        moffo.solve("nope")


def test_run_config_and_check_bounds(tmp_path):
    cfg = {"problem": {"name": "quadratic"},
           "solver": {"i_max": [500]},
           "runs": {"repetitions": 2},
           "baselines": [{"kind": "adagrad_oracle"}]}
    summary = moffo.run_config(cfg, str(tmp_path))
    assert len(summary["runs"]) == 4
    assert (tmp_path / "trace_mofftr_seed1.csv").exists()
    report = moffo.check_bounds(cfg)
    assert report["ok"]


def test_list_and_gradcheck():
    names = [n for n, _ in moffo.list_problems()]
    assert names == ["quadratic", "laplacian", "chain", "resnet"]
    assert moffo.gradcheck("quadratic", 1, np.array([0.3, -0.2])) < 1e-9
