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


"""End-to-end checks of the moffo command-line tool.

Usage: run_cli_tests.py <path to moffo> <configs dir>
"""

import json
import os
import subprocess
import sys
import tempfile
import unittest

MOFFO = None
CONFIGS = None


def run(*args):
    return subprocess.run([MOFFO, *args], capture_output=True, text=True, timeout=600)


class CliTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def write_config(self, doc):
        path = os.path.join(self.dir, "config.json")
        with open(path, "w") as f:
            json.dump(doc, f)
        return path

    def test_list_problems(self):
        r = run("list-problems")
        self.assertEqual(r.returncode, 0)
        names = [line.split()[0] for line in r.stdout.splitlines()]
        self.assertEqual(names, ["quadratic", "laplacian", "chain", "resnet"])

    def test_gradcheck(self):
        r = run("gradcheck")
        self.assertEqual(r.returncode, 0, r.stdout + r.stderr)
        self.assertNotIn("FAIL", r.stdout)
        self.assertEqual(run("gradcheck", "--problem", "nope").returncode, 2)

    def test_unknown_problem_is_config_error(self):
        r = run("run", self.write_config({"problem": {"name": "rosenbrock"}}))
        self.assertEqual(r.returncode, 2)
        self.assertIn("problem.name", r.stderr)

    def test_unknown_key_is_config_error(self):
        r = run("run", self.write_config({"problem": {"name": "quadratic"},
                                          "solver": {"alpah": 2}}))
        self.assertEqual(r.returncode, 2)
        self.assertIn("solver.alpah", r.stderr)

    def test_bad_usage_and_missing_file(self):
        self.assertEqual(run().returncode, 2)
        self.assertEqual(run("run", os.path.join(self.dir, "missing.json")).returncode, 2)

    def test_run_writes_one_trace_per_repetition(self):
        out = os.path.join(self.dir, "out")
        path = self.write_config({"problem": {"name": "quadratic"},
                                  "solver": {"i_max": [300]},
                                  "runs": {"repetitions": 5}})
        r = run("run", path, "--out", out)
        self.assertEqual(r.returncode, 0, r.stderr)
        traces = sorted(f for f in os.listdir(out) if f.startswith("trace_mofftr_"))
        self.assertEqual(traces, [f"trace_mofftr_seed{k}.csv" for k in range(5)])
        with open(os.path.join(out, "summary.json")) as f:
            summary = json.load(f)
        self.assertEqual(len(summary["runs"]), 5)

    def test_seed_override(self):
        out = os.path.join(self.dir, "out")
        r = run("run", os.path.join(CONFIGS, "quadratic_adagrad.json"), "--out", out,
                "--seed", "9")
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertTrue(os.path.exists(os.path.join(out, "trace_mofftr_seed9.csv")))
        self.assertTrue(os.path.exists(os.path.join(out, "trace_adagrad_oracle_seed9.csv")))

    def test_check_bounds(self):
        report_path = os.path.join(self.dir, "bounds.json")
        r = run("check-bounds", os.path.join(CONFIGS, "quadratic_bounds.json"),
                "--json", report_path)
        self.assertEqual(r.returncode, 0, r.stderr)
        with open(report_path) as f:
            report = json.load(f)
        self.assertEqual(report["checks"]["adagrad_rate"]["status"], "pass")
        self.assertAlmostEqual(report["constants"]["Gamma0"], 20.5)

    def test_check_bounds_rejects_noise(self):
        path = self.write_config({"problem": {"name": "laplacian", "n": 31,
                                              "noise": {"kind": "minibatch", "fraction": 0.5}}})
        self.assertEqual(run("check-bounds", path).returncode, 2)

    def test_shipped_configs_parse(self):
        # Every shipped config parses and runs on a tiny budget.
        for name in sorted(os.listdir(CONFIGS)):
            with open(os.path.join(CONFIGS, name)) as f:
                doc = json.load(f)
            doc["solver"]["i_max"] = [1] * len(doc["solver"].get("i_max", [1]))
            doc["baselines"] = []
            doc["runs"] = {"seeds": [0]}
            r = run("run", self.write_config(doc), "--out", os.path.join(self.dir, name))
            self.assertEqual(r.returncode, 0, name + ": " + r.stderr)


if __name__ == "__main__":
    MOFFO, CONFIGS = sys.argv[1], sys.argv[2]
    unittest.main(argv=sys.argv[:1], verbosity=2)
