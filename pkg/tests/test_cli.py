import json
import subprocess
import sys

import pytest

from qosclab.cli import ConfigError, load_config, run_suite
from qosclab.cli.catalog import CHECKS, SUITES, explain
from qosclab.cli.main import main


def test_defaults_valid():
    cfg = load_config()
    assert cfg.profile == (2, 1)
    assert cfg.suites == SUITES


def test_overrides_and_yaml(tmp_path):
    f = tmp_path / "c.yaml"
    f.write_text("profile: [1, 2]\nseed: 5\nsuites: [ybe, drinfeld]\ntolerances: {ybe: 1.0e-11}\n")
    cfg = load_config(f, ["samples=2", "tol.drinfeld=1e-9", "twist=[1, 0.1, 0.01j]"])
    assert cfg.profile == (1, 2) and cfg.seed == 5 and cfg.samples == 2
    assert cfg.tol("ybe") == 1e-11 and cfg.tol("drinfeld") == 1e-9
    assert cfg.twist == (1, 0.1, 0.01j)


@pytest.mark.parametrize("override", ["suites=nonsense", "bogus=1", "profile=0,0",
                                      "tol.nope=1", "twist=[1, 0]", "q_modulus=0.5,1"])
def test_invalid_config(override):
    with pytest.raises(ConfigError):
        load_config(None, [override])


def test_unsupported_index_set_needs_flag():
    with pytest.raises(ConfigError, match="skip_unsupported"):
        load_config(None, ["profile=2,2", "index_sets={1,2}"])
    cfg = load_config(None, ["profile=2,2", "index_sets={1,2};{1}", "skip_unsupported=true"])
    ok, skipped = cfg.resolved_index_sets()
    assert [s.label for s in ok] == ["{1}"] and [s.label for s in skipped] == ["{1,2}"]


def test_explain_known_and_unknown():
    text = explain("qq-1")
    assert "QQ-relation" in text and "tolerance" in text
    assert "RLL" in explain("rll-affine")
    with pytest.raises(KeyError):
        explain("nope")


def test_every_suite_has_checks():
    assert {c.suite for c in CHECKS.values()} == set(SUITES)


def test_report_records(capsys):
    cfg = load_config(None, ["profile=1,1", "suites=ybe,qq,drinfeld", "samples=1"])
    rep = run_suite(cfg)
    assert rep.passed
    body = rep.body()
    assert body["schema_version"] == "1.0"
    rec = body["records"][0]
    for key in ("suite", "anchor", "params", "residual", "tol", "pass", "truncation_bound"):
        assert key in rec
    assert "timing" in json.loads(rep.to_json())


def test_kr_limit_skipped_for_superalgebra():
    rep = run_suite(load_config(None, ["profile=1,1", "suites=kr-limit"]))
    assert not rep.records and any("N = 0" in n for n in rep.notes)


def test_same_seed_same_body():
    over = ["profile=2,0", "suites=ybe,rll,qq,characters", "samples=1", "seed=11"]
    a = run_suite(load_config(None, over)).body_json()
    b = run_suite(load_config(None, over), workers=2).body_json()
    assert a == b
    c = run_suite(load_config(None, over[:-1] + ["seed=12"])).body_json()
    assert a != c


def test_main_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "--profile", "1,0", "--suites", "ybe", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["body"]["passed"]
    assert main(["run", "--suites", "nope"]) == 2
    assert main(["explain", "nope"]) == 2
    assert main(["list"]) == 0
    # an impossible tolerance must fail the run
    assert main(["run", "--profile", "2,0", "--suites", "osc-relations",
                 "-s", "tol.osc=-1", "--no-timing"]) == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qosclab.cli", "explain", "ybe"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "Yang-Baxter" in r.stdout


def test_golden_regression(tmp_path):
    gold = tmp_path / "gold.json"
    args = ["run", "--profile", "2,0", "--suites", "ybe,drinfeld", "--seed", "3"]
    assert main(args + ["--json", str(gold)]) == 0
    assert main(args + ["--golden", str(gold), "-o", str(tmp_path / "new.json")]) == 0
    # a different seed draws different parameters
    assert main(["run", "--profile", "2,0", "--suites", "ybe,drinfeld", "--seed", "4",
                 "--golden", str(gold), "-o", str(tmp_path / "other.json")]) == 1


def test_compare_bodies_residual_tolerance():
    from qosclab.cli.report import compare_bodies
    rec = {"suite": "ybe", "check": "ybe", "case": "#0", "key": "", "params": {},
           "residual": 1e-15, "tol": 1e-12, "pass": True}
    a = {"schema_version": "1.0", "config": {}, "records": [rec]}
    b = {"schema_version": "1.0", "config": {}, "records": [{**rec, "residual": 5e-14}]}
    assert compare_bodies(a, b) == []
    c = {"schema_version": "1.0", "config": {}, "records": [{**rec, "residual": 1e-12}]}
    assert len(compare_bodies(a, c)) == 1
    assert any("missing" in d for d in compare_bodies(a, {**a, "records": []}))
