"""End-to-end smoke tests for the python bindings and the CLI."""

import json
import math
import os
import subprocess

import pytest

import nphkit


def toy_dataset():
    rows = [(1.0, True, 0), (2.0, True, 1), (3.0, False, 0), (4.0, True, 1),
            (5.0, True, 0), (6.0, False, 1), (7.0, True, 0), (8.0, True, 1)]
    return nphkit.Dataset(rows)


def test_km_basic():
    d = toy_dataset()
    km = nphkit.km_estimate(d)
    assert km.survival(0.0) == 1.0
    assert 0.0 <= km.survival(8.0) <= 1.0
    assert km.survival(8.0) <= km.survival(1.0)


def test_logrank_and_maxcombo():
    d = nphkit.simulate_trial(nphkit.scenario_by_name("first"), 5)
    lr = nphkit.weighted_logrank(d, 0.0, 0.0)
    assert 0.0 <= lr["p"] <= 1.0
    mc = nphkit.maxcombo(d)
    assert 0.0 <= mc["p"] <= 1.0
    assert len(mc["component_Z"]) == 3
    # maxcombo takes the best of its component statistics, so it cannot
    # have a smaller z-statistic than the plain log-rank component
    assert mc["Z_max"] >= abs(lr["Z"]) - 1e-12


def test_rmst_difference():
    d = nphkit.simulate_trial(nphkit.scenario_by_name("inovate"), 5)
    r = nphkit.rmst_difference_test(d)
    assert 0.0 <= r["p"] <= 1.0
    assert math.isfinite(r["delta"])
    assert r["t_star"] > 0.0


def test_cox_and_ph_tests():
    d = nphkit.simulate_trial(nphkit.scenario_by_name("gog0218"), 5)
    fit = nphkit.cox_fit(d)
    assert fit.converged
    gt = nphkit.grambsch_therneau_test(fit, d)
    assert 0.0 <= gt["p"] <= 1.0
    sg = nphkit.schoenfeld_global_test(fit, d)
    assert 0.0 <= sg["p"] <= 1.0


def test_aft_families():
    d = nphkit.simulate_trial(nphkit.scenario_by_name("first"), 5)
    gg = nphkit.aft_fit(d, "gg")
    assert gg.converged
    assert 0.0 <= gg.wald_p <= 1.0
    gf = nphkit.aft_fit(d, "gf")
    # the four-parameter family can land on a boundary; it must still
    # report a usable fit or flag failure, never crash
    if gf.converged:
        assert gf.loglik >= gg.loglik - 1e-4


def test_simulation_determinism():
    s = nphkit.scenario_by_name("null")
    a = nphkit.simulate_trial(s, 42)
    b = nphkit.simulate_trial(s, 42)
    assert a.rows() == b.rows()


def test_scenario_fields():
    names = nphkit.builtin_scenarios()
    assert set(names) >= {"first", "inovate", "gog0218", "null",
                          "cancel1", "cancel2", "cancel3"}
    s = nphkit.scenario_by_name("first")
    assert s.n0 == 541 and s.n1 == 541
    assert s.followup == 60.0
    assert 0.0 <= s.censor_window <= s.followup
    assert s.arm0.survival(8.0) == pytest.approx(math.exp(-0.224))


def test_simulate_power_smoke():
    out = nphkit.simulate_power("null", 25, seed=9,
                                methods=["logrank", "rmst_diff"])
    for name in ("logrank", "rmst_diff"):
        row = out[name]
        assert row["n_success"] + row["n_fail"] == 25
        assert 0.0 <= row["rejection"] <= 1.0


def test_ipd_csv_roundtrip(tmp_path):
    d = toy_dataset()
    path = str(tmp_path / "ipd.csv")
    nphkit.write_ipd_csv(d, path)
    back = nphkit.read_ipd_csv(path)
    assert back.rows() == d.rows()


@pytest.fixture(scope="module")
def cli():
    path = os.environ.get("NPHKIT_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("NPHKIT_CLI not set")
    return path


def test_cli_analyze(cli, tmp_path):
    d = nphkit.simulate_trial(nphkit.scenario_by_name("inovate"), 7)
    ipd = str(tmp_path / "trial.csv")
    nphkit.write_ipd_csv(d, ipd)
    out = subprocess.run([cli, "analyze", ipd],
                         capture_output=True, text=True, check=True)
    rep = json.loads(out.stdout)
    assert 0.0 <= rep["tests"]["logrank"]["p"] <= 1.0
    assert 0.0 <= rep["tests"]["maxcombo"]["p"] <= 1.0


def test_cli_scenarios_and_simulate(cli, tmp_path):
    out = subprocess.run([cli, "scenarios"], capture_output=True,
                         text=True, check=True)
    scen = json.loads(out.stdout)
    assert any(s["name"] == "null" for s in scen)
    report = str(tmp_path / "report.json")
    subprocess.run([cli, "simulate", "--scenario", "null", "--reps", "20",
                    "--seed", "3", "--methods", "logrank,rmst_diff",
                    "-o", report], capture_output=True, text=True, check=True)
    rep = json.loads(open(report).read())
    assert rep["n_reps"] == 20
    csv_out = str(tmp_path / "report.csv")
    subprocess.run([cli, "report", report, "-o", csv_out],
                   capture_output=True, text=True, check=True)
    lines = open(csv_out).read().splitlines()
    assert lines[0] == "scenario,source,metric,grid_time,value"
    assert any(",logrank,rejection," in line for line in lines[1:])
