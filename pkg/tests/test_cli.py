from __future__ import annotations

import json
import os

import pytest

from discrepancy_lab.cli import main, parse_n, parse_sigma, UsageError
from discrepancy_lab.pointset import generate_vdc, load_points


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_writes_v2(tmp_path):
    path = tmp_path / "v2.txt"
    assert main(["gen", "--n", "2", "--sigma", "zeros", "--out", str(path)]) == 0
    assert load_points(path).same_points(generate_vdc(2, "00"))


def test_mean_prints_plain_fraction(capsys):
    assert run(capsys, "mean", "--n", "4", "--sigma", "zeros")[:2] == (0, "1/2\n")


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", "--n", "2", "--sigma", "zeros", "1/2,1/2", "1,1")
    rows = json.loads(out)
    assert code == 0 and [r["count"] for r in rows] == [1, 4]


def test_sweep_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["sweep", "--n", "4..6", "--sigma", "balanced", "--alpha", "2", "--format", "csv"]
    assert main(base + ["--out", str(a)]) == 0
    assert main(base + ["--out", str(b), "--workers", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0].split(",")
    assert header == ["n", "N", "mean", "linf", "linf/n", "l2", "l2/sqrt(n)", "exp2_proxy/sqrt(n)",
                      "bmo_global/sqrt(n)", "riesz_lower/n^{1-1/alpha}"]
    assert len(a.read_text().splitlines()) == 4


def test_norms_and_bmo_json(capsys):
    code, out, _ = run(capsys, "norms", "--n", "3", "--pgrid", "2,4")
    assert code == 0 and set(json.loads(out)["lp"]) == {"2", "4"}
    code, out, _ = run(capsys, "bmo", "--n", "3")
    assert code == 0 and json.loads(out)["family"] in ("global", "squares", "rectangles", "greedy")


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "--n", "5", "--sigma", "balanced", "--alpha", "2,4")
    certs = json.loads(out)
    assert code == 0 and [c["alpha"] for c in certs] == [2.0, 4.0]
    assert run(capsys, "certify", "--n", "5", "--alpha", "1")[0] == 2


def test_haar_scan_csv(capsys):
    code, out, _ = run(capsys, "haar-scan", "--n", "2", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("k,i,l,j")
    assert len(lines) == 1 + sum(1 << m for m in range(5) for _ in range(m + 1))


def test_exit_codes(capsys):
    assert run(capsys, "mean", "--n", "4", "--sigma", "01")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "haar-scan", "--n", "10", "--budget", "100")[0] == 3
    code, _, err = run(capsys, "mean")
    assert code == 2 and "--n" in err


def test_check_subset(capsys):
    code, out, _ = run(capsys, "check", "--only", "1", "13")
    assert code == 0 and out.count("[PASS]") == 2


def test_parsers():
    assert parse_n("4..6") == [4, 5, 6]
    assert parse_n("7") == [7]
    with pytest.raises(UsageError):
        parse_n("6..4")
    assert str(parse_sigma("balanced", 4)) == "1100"
    assert parse_sigma("random:3", 6) == parse_sigma("random", 6, seed=3)
    with pytest.raises(UsageError):
        parse_sigma("012", 3)


def test_budget_flag_does_not_leak(capsys, monkeypatch):
    monkeypatch.delenv("DISCREPANCY_LAB_BUDGET", raising=False)
    run(capsys, "haar-scan", "--n", "10", "--budget", "100")
    assert "DISCREPANCY_LAB_BUDGET" not in os.environ
