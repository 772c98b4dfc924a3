"""End-to-end runs of the command-line interface."""

import csv
import json
import math
from pathlib import Path

import pytest

from plent.cli import main


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def read_json(tmp_path, name):
    return json.loads((Path(tmp_path) / name).read_text())


def read_csv(tmp_path, name):
    with open(Path(tmp_path) / name, newline="") as fh:
        return list(csv.reader(fh))


def test_commute_check_coprime_tents(tmp_path):
    assert run(tmp_path, "commute-check", "--f", "tent:2", "--g", "tent:3") == 0
    payload = read_json(tmp_path, "commute.json")
    assert payload["strongly_commutes"] is True


def test_commute_check_failure_exits_one_with_witness(tmp_path):
    assert run(tmp_path, "commute-check", "--f", "tent:6", "--g", "tent:4") == 1
    payload = read_json(tmp_path, "commute.json")
    assert payload["strongly_commutes"] is False
    assert "g_after_f_inverse" in payload and "f_inverse_after_g" in payload


def test_branches_csv(tmp_path):
    assert run(tmp_path, "branches", "--n", "3", "--m", "2", "--kmax", "4") == 0
    rows = read_csv(tmp_path, "branches.csv")
    assert rows[0] == ["k", "count", "log_growth"]
    counts = [int(r[1]) for r in rows[1:]]
    assert counts == [4, 14, 46, 146]


def test_horseshoe_subcommand(tmp_path):
    code = run(
        tmp_path, "horseshoe",
        "--f", "tent:2", "--g", "tent:2", "--mode", "invcomp", "--n", "2",
    )
    assert code == 0
    payload = read_json(tmp_path, "horseshoe.json")
    assert payload["found"] and payload["reverified"]
    assert len(payload["intervals"]) == 2


def test_horseshoe_not_found_exits_one(tmp_path):
    code = run(
        tmp_path, "horseshoe",
        "--f", "tent:2", "--g", "tent:2", "--mode", "invcomp", "--n", "40",
    )
    assert code == 1
    assert read_json(tmp_path, "horseshoe.json")["found"] is False


def test_bracket_subcommand(tmp_path):
    assert run(tmp_path, "bracket", "--n", "3", "--m", "2", "--kmax", "3") == 0
    payload = read_json(tmp_path, "bracket.json")
    assert payload["target"] == pytest.approx(math.log(3))
    lower = payload["lower"][-1][1]
    upper = payload["upper"][-1][1]
    assert lower <= math.log(3) <= upper


def test_entropy_map_subcommand(tmp_path):
    assert run(tmp_path, "entropy-map", "--f", "slope:3/2", "--nmax", "3") == 0
    payload = read_json(tmp_path, "lap_growth.json")
    assert payload["exact"] == pytest.approx(math.log(1.5))


def test_entropy_rel_subcommand(tmp_path):
    code = run(
        tmp_path, "entropy-rel",
        "--f", "tent:2", "--g", "tent:3",
        "--nmax", "2", "--grid", "1/16", "--eps", "1/8",
    )
    assert code == 0
    rows = read_csv(tmp_path, "entropy_rel.csv")
    assert rows[0] == ["n", "eps", "grid", "s_count", "r_count", "estimate"]
    assert len(rows) == 3


def test_invlim_subcommand(tmp_path):
    code = run(
        tmp_path, "invlim",
        "--system", "shift", "--f", "tent:2",
        "--depth", "4", "--nmax", "3", "--grid", "1/32",
    )
    assert code == 0
    rows = read_csv(tmp_path, "invlim.csv")
    assert rows[0][0] == "n"
    assert len(rows) == 4


def test_appendix_subcommand(tmp_path):
    code = run(
        tmp_path, "appendix",
        "--s", "2", "--nseq", "2,5", "--kmax", "1", "--kbranch", "4",
    )
    assert code == 0
    payload = read_json(tmp_path, "appendix.json")
    assert payload["compatible"] and payload["bounds_ok"]


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "m": 2, "kmax": 5}))
    out = tmp_path / "out"
    code = main([
        "branches", "--config", str(cfg), "--kmax", "2", "--out", str(out),
    ])
    assert code == 0
    rows = read_csv(out, "branches.csv")
    assert len(rows) == 3  # header + k=1,2: the explicit flag wins


def test_failures_produce_report_and_exit_two(tmp_path):
    code = run(tmp_path, "entropy-map", "--f", "mystery:9")
    assert code == 2
    payload = read_json(tmp_path, "failure.json")
    assert "error" in payload


def test_thread_count_does_not_change_artifacts(tmp_path, monkeypatch):
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("PLENT_THREADS", threads)
        out = tmp_path / f"t{threads}"
        assert main([
            "entropy-rel", "--f", "tent:2", "--g", "tent:3",
            "--nmax", "2", "--grid", "1/16", "--eps", "1/8",
            "--out", str(out),
        ]) == 0
        outs.append((out / "entropy_rel.csv").read_text())
    assert outs[0] == outs[1]
