# Copyright 2026 The Falsiflow Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import os
import subprocess

import pytest

import falsiflow as ff


def two_outcome_model():
    g = ff.Correspondence(["u", "v"], ["(0,0)", "(0,1)"], {"u": ["(0,0)"], "v": ["(0,0)", "(0,1)"]})
    nu = ff.Distribution(["u", "v"], [0.5, 0.5])
    return g, nu


def test_distribution_round_trip():
    d = ff.Distribution(["a", "b"], [0.25, 0.75])
    assert d.masses == [250_000_000, 750_000_000]
    assert d.support == ["a", "b"]
    assert d.to_dict()["denominator"] == ff.DENOMINATOR
    assert ff.total_variation(d, ff.Distribution(["a", "b"], [0.5, 0.5])) == pytest.approx(0.25)


def test_solve_zero_one_witness():
    g, nu = two_outcome_model()
    report = ff.solve_zero_one(ff.Distribution(g.outcomes, [0.3, 0.7]), nu, g)
    assert report["compatible"] is False
    assert report["witness"] == ["(0,1)"]
    assert report["primal"] == pytest.approx(0.2)
    brute = ff.core_deficiency_bruteforce(g, nu, ff.Distribution(g.outcomes, [0.3, 0.7]))
    assert brute["value"] == pytest.approx(report["primal"])


def test_errors_carry_codes():
    with pytest.raises(ff.FalsiflowError) as info:
        ff.Distribution(["a"], [0.5])
    assert info.value.code == "MassSumOutOfTolerance"


def test_models_and_dual():
    g, nu = ff.line_network_game([0.4, 0.2, 0.2, 0.2])
    assert g.image("q000_111") == ["(0,0,0)", "(1,1,1)"]
    p = ff.Distribution(g.outcomes, [0.4, 0.25, 0.25, 0.1])
    assert ff.solve_zero_one(p, nu, g)["compatible"] is False
    model, p4 = ff.example4_instance(10)
    assert ff.primal_lp(model, p4) == pytest.approx(0.1, abs=1e-6)
    assert ff.maximize_dual(model, p4)["T"] == pytest.approx(0.1, abs=1e-6)
    pilot = ff.binary_response_pilot(0.5)
    cert = ff.maximize_dual(pilot, ff.pilot_distribution(0.5, 0.3, 0.7))
    assert cert["compatible"] is True


def test_statistics_and_bootstrap():
    g, nu = ff.entry_game(-1.0, -1.0, cells=20)
    data = ff.simulate(g, nu, 300, seed=4, rule="uniform-random", rule_seed=1)
    assert len(data) == 300
    assert ff.simulate(g, nu, 300, seed=4, rule="uniform-random", rule_seed=1) == data
    stat = ff.statistic(data, "tv-core", g=g, nu=nu)
    assert stat["n"] == 300
    boot = ff.bootstrap(data, "tv-core", B=30, seed=2, g=g, nu=nu)
    assert 0.0 < boot["pvalue"] <= 1.0
    assert boot == ff.bootstrap(data, "tv-core", B=30, seed=2, g=g, nu=nu)
    with pytest.raises(ff.FalsiflowError):
        ff.statistic(data, "tv-core")


@pytest.mark.skipif("FALSIFLOW_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_check(tmp_path):
    model = tmp_path / "model.json"
    model.write_text(json.dumps({"model": "example4", "params": {"M": 4}}))
    out = subprocess.run([os.environ["FALSIFLOW_CLI"], "check", "--model", str(model)],
                         capture_output=True, text=True)
    assert out.returncode == 1
    assert json.loads(out.stdout)["T"] == pytest.approx(0.25, abs=1e-6)
