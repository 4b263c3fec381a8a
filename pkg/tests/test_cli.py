import json
import subprocess
import sys

import pytest

from conftest import CORPUS, REPO, SOLVER


def run_cli(*args, timeout=300):
    return subprocess.run(
        [sys.executable, "-m", "permver.cli", *args],
        capture_output=True, text=True, timeout=timeout, cwd=REPO,
    )


BASE = ["--solver-path", str(SOLVER), "--timeout-ms", "60000"]


def test_verify_exit_zero_on_verifying_file():
    r = run_cli("verify", "--algorithm", "se-ps", str(CORPUS / "hf_abs.pv"), *BASE)
    assert r.returncode == 0, r.stderr
    assert "verified" in r.stdout


def test_verify_exit_one_on_errors():
    r = run_cli("verify", "--algorithm", "se-ps", str(CORPUS / "hf_two_bugs.pv"), *BASE)
    assert r.returncode == 1
    assert "4:14" in r.stdout and "5:14" in r.stdout


def test_verify_exit_two_on_usage_error():
    r = run_cli("verify", str(CORPUS / "hf_abs.pv"), *BASE)
    assert r.returncode == 2
    r2 = run_cli("verify", "--algorithm", "se-ps", "--portfolio", "P0",
                 str(CORPUS / "hf_abs.pv"), *BASE)
    assert r2.returncode == 2


def test_verify_exit_two_on_bad_input(tmp_path):
    bad = tmp_path / "bad.pv"
    bad.write_text("method m() { inhale acc(x.f) }")
    r = run_cli("verify", "--algorithm", "se-ps", str(bad), *BASE)
    assert r.returncode == 2
    assert "input error" in r.stderr


def test_verify_exit_two_on_bad_solver():
    r = run_cli("verify", "--algorithm", "se-ps", str(CORPUS / "hf_abs.pv"),
                "--solver-path", "/nonexistent/solver")
    assert r.returncode == 2


def test_portfolio_p3_on_disjunctive_prints_winner():
    r = run_cli("verify", "--portfolio", "P3", "--sequential",
                str(CORPUS / "hm_disjunctive.pv"), *BASE)
    assert r.returncode == 0, r.stderr
    assert "winner se-tr" in r.stdout


def test_json_output_schema():
    r = run_cli("verify", "--algorithm", "vcg-tr", "--format", "json",
                str(CORPUS / "hm_leak_write.pv"), *BASE)
    assert r.returncode == 1
    doc = json.loads(r.stdout)
    assert doc["schema_version"] == 1
    res = doc["results"][0]
    assert res["method"] == "leakwrite"
    assert res["verdict"] == "errors"
    assert res["errors"][0]["line"] == 8


def test_human_report_byte_identical_across_reruns():
    args = ["verify", "--algorithm", "se-pc", "--seed", "7",
            str(CORPUS / "bh_max3.pv"), str(CORPUS / "hm_swap.pv"), *BASE]
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout


def test_dump_smt_vcg(tmp_path):
    r = run_cli("dump-smt", "--algorithm", "vcg-tr", "--out", str(tmp_path),
                str(CORPUS / "hm_swap.pv"), *BASE)
    assert r.returncode == 0, r.stderr
    files = list(tmp_path.glob("*.smt2"))
    assert len(files) == 1
    text = files[0].read_text()
    assert "(check-sat)" in text and "(assert" in text


def test_dump_smt_se_transcript(tmp_path):
    r = run_cli("dump-smt", "--algorithm", "se-ps", "--out", str(tmp_path),
                str(CORPUS / "hm_swap.pv"), *BASE)
    assert r.returncode == 0, r.stderr
    transcripts = list(tmp_path.rglob("*.smt2"))
    assert transcripts
    assert "(set-option" in transcripts[0].read_text()


def test_bench_smoke_writes_four_csvs(tmp_path):
    manifest = tmp_path / "suite.txt"
    manifest.write_text(
        f"{CORPUS}/hf_abs.pv hf verify\n"
        f"{CORPUS}/hf_two_bugs.pv hf errors 4:14,5:14\n"
    )
    r = run_cli("bench", "--suite", str(manifest), "--repeats", "1",
                "--algorithms", "se-ps,vcg-tr", "--out", str(tmp_path / "out"),
                *BASE, timeout=600)
    assert r.returncode == 0, r.stderr
    for name in ("runs.csv", "aggregates.csv", "rpd.csv", "completeness.csv"):
        assert (tmp_path / "out" / name).exists()
    aggs = (tmp_path / "out" / "aggregates.csv").read_text()
    assert "AsExpected" in aggs
