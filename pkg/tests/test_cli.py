import csv
import json
import subprocess
import sys

import pytest

from zerocount import cli
from zerocount.core import Params


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out)])
    return code, out


def test_parser_rejects_unknown():
    with pytest.raises(SystemExit):
        cli.main(["nope"])


def test_run_config_validation():
    with pytest.raises(ValueError):
        cli.RunConfig("full-certify", slack=0.0)
    with pytest.raises(ValueError):
        cli.RunConfig("full-certify", jobs=0)


def test_specfun_table(tmp_path):
    code, out = run(tmp_path, "specfun-table", "--sigma", "0.861", "--steps", "20")
    rows = list(csv.DictReader(out.open()))
    assert code == 0 and len(rows) == 20
    assert list(rows[0]) == ["sigma", "t", "value", "remainder_radius", "reference", "abs_error"]
    assert all(float(r["abs_error"]) <= float(r["remainder_radius"]) for r in rows)


def test_verify_lemma21(tmp_path):
    code, out = run(tmp_path, "verify-lemma21")
    data = json.loads(out.read_text())
    assert code == 0 and data["verdict"] and len(data["roots"]) == 7


def test_verify_lemma21_inadmissible(tmp_path):
    code, out = run(tmp_path, "verify-lemma21", "--a1", "0.9")
    assert code == 1 and not json.loads(out.read_text())["verdict"]


def test_search_params_small_box(tmp_path):
    code, out = run(tmp_path, "search-params", "--box", "0.7:0.75,1.0:1.1,0.9:0.95,0.3:0.4")
    data = json.loads(out.read_text())
    assert code == 0 and data["d_a1"] <= 0.722 * 1.07 + 1e-12


def test_search_params_empty_box(tmp_path, capsys):
    code, _ = run(tmp_path, "search-params", "--box", "0.7:0.75,0.9:0.95,1.0:1.1,0.3:0.4")
    assert code == 1 and "no admissible point" in capsys.readouterr().err


def test_gamma_check_csv(tmp_path):
    code, out = run(tmp_path, "gamma-check", "--steps", "50")
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 50
    sups = [float(r["gamma2_running_sup"]) for r in rows]
    assert sups == sorted(sups)
    assert code in (0, 1)


def test_prime_sums(tmp_path):
    code, out = run(tmp_path, "prime-sums", "--cutoff", "79")
    data = json.loads(out.read_text())
    assert code == 0 and len(data["rows"]) == 22 and data["total_per_degree"] <= 5.633


def test_bound(tmp_path):
    code, out = run(tmp_path, "bound", "--T", "100", "--nk", "1", "--r1", "1", "--r2", "0", "--log-dk", "0")
    data = json.loads(out.read_text())
    assert code == 0 and data["lower"] < data["upper"]
    assert data["constants"]["kappa"] == "0.194"


def test_bound_bad_signature(tmp_path, capsys):
    code, _ = run(tmp_path, "bound", "--T", "10", "--nk", "3", "--r1", "1", "--r2", "0")
    assert code == 2 and "n_K" in capsys.readouterr().err


def test_validate_bundled(tmp_path):
    code, out = run(tmp_path, "validate", "--t-min", "1", "--t-max", "99", "--step", "0.5")
    rows = list(csv.DictReader(out.open()))
    assert code == 0 and len(rows) == 197


def test_validate_beyond_table(tmp_path):
    code, _ = run(tmp_path, "validate", "--t-max", "400")
    assert code == 2


def _certify(tmp_path, *extra, name="cert.json"):
    code, out = run(tmp_path, "full-certify", "--gamma-steps", "300", *extra, name=name)
    return code, json.loads(out.read_text()), out.read_bytes()


def test_full_certify_rows_carry_constants(tmp_path):
    _, rep, _ = _certify(tmp_path)
    for stage in rep["stages"].values():
        for row in stage["rows"]:
            assert {"published", "computed", "slack", "pass"} <= set(row)


def test_full_certify_skips_validation_without_table(tmp_path, monkeypatch):
    monkeypatch.delenv("ZEROCOUNT_ZEROS", raising=False)
    _, rep, _ = _certify(tmp_path)
    assert rep["stages"]["validation"].get("skipped")


def test_full_certify_uses_env_table(tmp_path, monkeypatch):
    from importlib import resources

    monkeypatch.setenv("ZEROCOUNT_ZEROS", str(resources.files("zerocount").joinpath("data/zeros_100.txt")))
    _, rep, _ = _certify(tmp_path)
    v = rep["stages"]["validation"]
    assert v["pass"] and not v.get("skipped")


def test_full_certify_a1_below_a2_fails_at_lemma21(tmp_path, capsys):
    code, rep, _ = _certify(tmp_path, "--params", "0.722,0.9,0.93,0.365")
    assert code != 0 and rep["first_failure"] == "lemma21"
    assert "lemma21" in capsys.readouterr().err


def test_full_certify_deterministic(tmp_path):
    _, _, a = _certify(tmp_path, "--bundled-zeros", name="a.json")
    _, _, b = _certify(tmp_path, "--bundled-zeros", name="b.json")
    _, _, c = _certify(tmp_path, "--bundled-zeros", "--jobs", "3", name="c.json")
    assert a == b == c


def test_full_certify_exit_code_matches_report(tmp_path):
    code, rep, _ = _certify(tmp_path)
    assert (code == 0) == rep["pass"]
    if code:
        assert not rep["stages"][rep["first_failure"]]["pass"]


def test_params_flag():
    args = cli.build_parser().parse_args(["verify-lemma21", "--params", "0.8,1.1,0.9,0.3"])
    assert cli._params(args) == Params(0.8, 1.1, 0.9, 0.3)


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "zerocount", "bound", "--T", "50"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["T"] == 50.0
