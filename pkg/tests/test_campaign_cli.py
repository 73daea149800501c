import csv
import io
import json
import math

import numpy as np
import pytest

from schurcomm.campaign import (
    CampaignConfig,
    constants_table,
    dumps_canonical,
    random_spectrum,
    run_campaign,
    run_trial,
)
from schurcomm.cli import main, parse_function
from schurcomm.errors import ConfigInvalid


def test_canonical_json():
    assert dumps_canonical({"b": 1.0, "a": [1, True, None, "x"]}) == '{"a":[1,true,null,"x"],"b":1.0}'
    assert dumps_canonical(0.1) == "0.10000000000000001"
    assert dumps_canonical([math.inf, -math.inf, math.nan]) == '["inf","-inf","nan"]'
    assert dumps_canonical(np.float64(2.0)) == "2.0"
    assert json.loads(dumps_canonical({"x": 1e300})) == {"x": 1e300}


def test_boundary_spectra_are_not_snapped():
    rng = np.random.default_rng(3)
    w, flavor = random_spectrum(500, 30, rng, flavor="boundary")
    assert flavor == "boundary"
    frac = np.abs(np.abs(w - np.floor(w)) - 0.5)
    assert np.mean(frac < 1e-8) > 0.1


def test_run_trial_is_pure():
    cfg = CampaignConfig(theorems=("HoldThm",), trials=3, seed=9)
    a, b = run_trial(cfg, "HoldThm", 2), run_trial(cfg, "HoldThm", 2)
    assert a.to_dict() == b.to_dict()
    assert run_trial(cfg, "HoldThm", 1).to_dict() != a.to_dict()


def test_abs_first_default_campaign():
    rep = run_campaign(CampaignConfig(theorems=("AbsFirst",), trials=200, seed=42))
    assert rep.summary["total"] == 200 and rep.summary["failed"] == 0
    assert 0 < rep.summary["max_slack_ratio"] < 1
    assert rep.all_passed


def test_records_byte_identical_across_runs_and_workers():
    cfg = CampaignConfig(theorems=("AbsFirst", "GBeta"), trials=6, seed=5)
    a, b = run_campaign(cfg), run_campaign(cfg, workers=2)
    assert a.records_json() == b.records_json()


def test_tolerance_is_applied():
    cfg = CampaignConfig(theorems=("Bennett",), trials=4, seed=1, rtol=0.0, atol=0.0)
    for r in run_campaign(cfg).records:
        assert r.passed == (r.lhs <= r.rhs)


@pytest.mark.parametrize("kwargs", [
    {"theorems": ("Nope",)},
    {"theorems": ()},
    {"trials": -1},
    {"dim_range": (1, 4)},
    {"dim_range": (5, 4)},
    {"spectral_radius": 0.0},
    {"kernel_fraction": 1.5},
    {"kernel_fraction": 0.5, "theorems": ("AbsFirst",)},
    {"alpha": 1.0},
    {"alpha": 0.0, "A": 1.0, "B": 1.0},
    {"p": 2.5},
    {"beta": -1.0},
    {"beta": 100.0},
    {"n": 0},
    {"ensemble": "gue"},
    {"function": {"kind": "Nope"}},
])
def test_config_invalid(kwargs):
    with pytest.raises(ConfigInvalid):
        CampaignConfig(**kwargs).validate()


def test_parse_function():
    assert parse_function("Arctan:width=2,amplitude=1") == {"kind": "Arctan", "width": 2.0, "amplitude": 1.0}
    assert parse_function("AbsValue") == {"kind": "AbsValue"}
    with pytest.raises(ConfigInvalid):
        parse_function("Arctan:width")


def test_cli_verify_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["verify", "--theorem", "AbsFirst", "--trials", "5", "--seed", "42", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["summary"]["total"] == 5
    assert [r["theorem_id"] for r in data["records"]] == ["AbsFirst"] * 5
    assert "5/5 passed" in capsys.readouterr().err


def test_cli_verify_csv(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["verify", "--theorem", "Lp", "--p", "1.9", "--trials", "3", "--format", "csv",
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 3 and all(r["passed"] == "1" for r in rows)


def test_cli_exit_codes(tmp_path):
    assert main(["verify", "--theorem", "Lp", "--p", "2.5", "--trials", "1"]) == 2
    assert main(["verify", "--trials", "0", "--out", str(tmp_path / "e.json")]) == 0
    with pytest.raises(SystemExit) as info:
        main(["verify", "--theorem", "Bogus"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


def test_cli_violation_exit_code(tmp_path):
    # a negative tolerance is rejected; a zero-tolerance run on equality cases may fail
    assert main(["verify", "--tol", "-1", "--trials", "1"]) == 2


def test_constants_examples():
    rows = constants_table()
    def find(theorem, constant, **params):
        return [r["value"] for r in rows if r["theorem"] == theorem and r["constant"] == constant
                and all(r["params"].get(k) == v for k, v in params.items())]
    assert find("HoldThm", "row_factor", alpha=1.0, A=0.0, B=1.0) == [pytest.approx(2.0)]
    assert find("AbsHigher", "coefficient_delta^1", n=1) == [pytest.approx(4 * math.pi / math.sqrt(3))]
    assert find("LogInterp13", "optimized_constant") == [pytest.approx(12.9266, abs=1e-4)]
    assert find("GBeta", "y_coefficient", beta=1.0) == [pytest.approx(8.0)]


def test_cli_constants(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["constants", "--format", "csv", "--out", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert {"HoldThm", "Lp", "GBeta", "AbsHigher"} <= {r["theorem"] for r in rows}
    assert main(["constants", "--p", "2.0"]) == 2


def test_cli_fourier(tmp_path):
    out = tmp_path / "f.json"
    assert main(["fourier", "--M", "8", "--function", "ExpI", "--trials", "3", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["all_passed"] and len(data["trials"]) == 3
    assert main(["fourier", "--M", "0"]) == 2
