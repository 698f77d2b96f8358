#
# Copyright 2026 The Datamarket Authors
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
#

from fractions import Fraction
import json
import os
import subprocess

import pytest

import datamarket as dm

WORKED = [(1, 1), (1, 4), (2, 3), (2, 7), (3, 5), (3, 8)]


def test_worked_pricing():
    r = dm.maximize_revenue(WORKED, [1, 2, 3])
    assert r["revenue"] == 19
    assert r["prices"] in ([3, 3, 5], [4, 5, 5])
    assert isinstance(r["prices"][0], Fraction)
    assert r["opt"][0] == [2, 3, 4, 0, 0, 0]
    assert dm.solution_space_sizes(WORKED, [1, 2, 3]) == [6, 5, 6]


def test_dealer_and_baselines():
    dealer = dm.maximize_revenue(WORKED, [1, 2, 3], survey_only=True)
    assert dealer["revenue"] <= 19
    low = dm.baseline_prices("low", WORKED, 3)
    assert low["price_units"] == [1, 1, 1]


def test_shapley_with_python_utility():
    def utility(ids):
        return float(len(ids) >= 2)

    exact = dm.exact_shapley([1, 2, 3], utility)
    assert exact["values"] == pytest.approx([1 / 3] * 3)
    mc = dm.monte_carlo_shapley([1, 2, 3], utility, permutations=300, seed=4)
    assert sum(mc["values"]) == pytest.approx(1.0)


def test_selection():
    items = [(1, 5.0, 10, 0), (2, 4.0, 6, 0), (3, 3.0, 5, 0)]
    r = dm.solve_bcmvp(items, 11, "bruteforce")
    assert r["chosen"] == [2, 3]
    assert r["total_value"] == 7.0
    assert dm.solve_bcmvp(items, 11, "dp")["total_value"] == 7.0


def test_training_and_noise():
    s1, s2 = dm.noise_scales(1.0, 0.01, 1.0, 1e-6, 1e-3)
    assert s1 == pytest.approx(20 * 13.815510557964274)
    x = [[0.5, 0.1], [-0.5, 0.0], [0.4, -0.2], [-0.3, 0.3]]
    y = [1, -1, 1, -1]
    m = dm.train_dp_erm(x, y, epsilon=1000.0, seed=3)
    assert m["sigma1"] > 0
    assert dm.classification_accuracy(m["weights"], x, y) == 1.0


def test_errors_are_raised():
    with pytest.raises(dm.DatamarketError):
        dm.solve_bcmvp([(1, 1.0, 1, 0)], 1, "magic")
    with pytest.raises(ValueError):
        dm.maximize_revenue([(4, 10)], [1, 2])


def test_generated_survey_is_reproducible():
    a = dm.generate_survey("gaussian", 5, 50, 9)
    assert a == dm.generate_survey("gaussian", 5, 50, 9)
    assert len(a) == 50


def test_run_manifest(tmp_path):
    cli = os.environ.get("DATAMARKET_CLI")
    if not cli:
        pytest.skip("DATAMARKET_CLI not set")
    subprocess.run([cli, "gen", "--out", str(tmp_path), "--owners", "10", "--tiers", "2",
                    "--permutations", "5"], check=True)
    text = dm.run_manifest(str(tmp_path / "config.json"), str(tmp_path / "out"))
    assert text == dm.run_manifest(str(tmp_path / "config.json"))
    report = json.loads(text)
    assert len(report["tiers"]) == 2
    assert (tmp_path / "out" / "prices.csv").exists()
