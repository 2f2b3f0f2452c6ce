import json
import re
import subprocess
import sys

import pytest

from ruijsenaars.cli import ConfigError, _fmt, main, parse_config
from ruijsenaars.model import ModelCase
from ruijsenaars.verify import IdentityId


def test_source_example_exit_zero(tmp_path):
    out = tmp_path / "r.json"
    assert main(["--case", "rational", "--identity", "source", "--N", "3", "--samples", "20",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert {r["sign"] for r in doc["results"]} == {1, -1}
    assert all(r["passed"] for r in doc["results"])


def test_negative_wh_example_exit_zero(tmp_path):
    out = tmp_path / "r.json"
    assert main(["--case", "elliptic", "--identity", "wh", "--masses", "1,1", "--expect-fail",
                 "--out", str(out)]) == 0
    (res,) = json.loads(out.read_text())["results"]
    assert res["expect_fail"] and res["passed"]


@pytest.mark.parametrize("argv", [["--identity", "bogus"], ["--case", "parabolic"],
                                  ["--g", "0"], ["--masses", "1,x"], ["--samples", "0"],
                                  ["--tol", "-1"], ["--N", "-2"], ["--unknown-flag"]])
def test_configuration_errors_exit_two(argv, capsys):
    assert main(argv) == 2


def test_failure_exit_one(tmp_path):
    assert main(["--case", "rational", "--identity", "wh", "--tol", "1e-300", "--samples", "3",
                 "--out", str(tmp_path / "r.json")]) == 1


def test_elliptic_unbalanced_positive_is_skipped(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["--case", "elliptic", "--identity", "wh", "--masses", "1,1", "--out", str(out)]) == 0
    (res,) = json.loads(out.read_text())["results"]
    assert res["skipped"] and "balancing" in res["reason"]
    assert "SKIP" in capsys.readouterr().out


def test_list_mentions_every_identity(capsys):
    assert main(["--list"]) == 0
    text = capsys.readouterr().out
    for ident in IdentityId:
        assert ident.value in text
    assert "balancing" in text


def test_parse_config_defaults_and_overrides():
    cfg = parse_config([])
    assert cfg.cases == list(ModelCase) and cfg.identities == list(IdentityId) and not cfg.custom
    cfg = parse_config(["--case", "trig", "--identity", "cor4", "--g", "3", "--trunc", "80"])
    assert cfg.cases == [ModelCase.TRIGONOMETRIC] and cfg.identities == [IdentityId.COR4]
    assert cfg.params.g == 3 and cfg.numerics.truncation_L == 80
    with pytest.raises(ConfigError):
        parse_config(["--masses", "0,1"])


def test_float_format():
    assert _fmt(0.1) == "0.10000000000000001"
    assert _fmt(float("nan")) == "null"
    assert _fmt({"a": [1, True, None, "x"]}) == '{"a": [1, true, null, "x"]}'


def test_report_byte_identical_and_17_digits(tmp_path):
    argv = ["--case", "hyperbolic", "--identity", "cor2", "--samples", "2"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert set(doc) == {"version", "seed", "params", "numerics", "results"}
    nums = re.findall(r'"max_rel_residual": ([0-9.e+-]+)', a.read_text())
    assert nums and all(float(format(float(x), ".17g")) == float(x) for x in nums)
    assert all(r["runtime_ms"] is None for r in doc["results"])


def test_timing_flag_records_runtime(tmp_path):
    out = tmp_path / "t.json"
    assert main(["--case", "rational", "--identity", "lemma2", "--samples", "2", "--timing",
                 "--out", str(out)]) == 0
    assert all(r["runtime_ms"] >= 0 for r in json.loads(out.read_text())["results"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ruijsenaars", "--case", "rational", "--identity",
                           "gamma", "--samples", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["results"][0]["identity"] == "GammaFunctional"
    assert "PASS" in proc.stderr
