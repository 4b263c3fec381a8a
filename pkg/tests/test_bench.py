"""Benchmark arithmetic, classification, CSV schemas, and the suite runner."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from permver import AlgorithmId
from permver.bench import (
    AggregateRecord,
    ExampleSpec,
    ManifestError,
    RunRecord,
    aggregate,
    apply_overhead_correction,
    baseline_correction,
    classify,
    completeness_table,
    export_aggregates,
    export_completeness,
    export_rpds,
    export_runs,
    import_runs,
    load_manifest,
    mean_mid,
    rpd,
    rpd_records,
    run_suite,
)

from conftest import CORPUS, make_cfg

A = AlgorithmId


# -- rpd -------------------------------------------------------------------------


def test_rpd_equal_times_is_zero():
    assert rpd(5.0, 5.0) == 0.0


def test_rpd_half_time_is_plus_66():
    assert math.isclose(rpd(1.0, 2.0), 200.0 / 3.0, abs_tol=1e-9)


def test_rpd_instant_first_is_plus_200():
    assert rpd(0.0, 7.0) == 200.0


def test_rpd_undefined_for_two_zeros():
    assert rpd(0.0, 0.0) is None


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.001, max_value=1e6),
       st.floats(min_value=0.001, max_value=1e6))
def test_rpd_antisymmetric_and_bounded(a, b):
    v = rpd(a, b)
    assert math.isclose(v, -rpd(b, a), rel_tol=1e-12)
    assert -200.0 <= v <= 200.0


# -- aggregation ---------------------------------------------------------------------


def _runs(example, algo, verdicts_times, expected_positions=frozenset()):
    out = []
    for i, (verdict, t) in enumerate(verdicts_times, start=1):
        out.append(RunRecord(example, "g", algo, i, i, t, verdict,
                             expected_positions if verdict == "errors" else frozenset()))
    return out


def test_mean_of_middle_runs():
    assert mean_mid([1, 2, 3, 4, 100]) == 3.0
    assert mean_mid([7, 9]) == 8.0  # fewer than three runs: plain mean


def test_classification_cases():
    ok = _runs("e", A.SE_PS, [("verified", 1)] * 5)
    assert classify(ok, ("verify",)) == "AsExpected"
    mixed = _runs("e", A.SE_PS, [("verified", 1)] * 4 + [("errors", 1)])
    assert classify(mixed, ("verify",)) == "Inconsistent"
    timed = _runs("e", A.SE_PS, [("verified", 1)] * 4 + [("timeout", 1)])
    assert classify(timed, ("verify",)) == "Timeout"
    wrong = _runs("e", A.SE_PS, [("errors", 1)] * 5, frozenset({(3, 1)}))
    assert classify(wrong, ("verify",)) == "UnexpectedErrors"
    expected_err = classify(wrong, ("errors", frozenset({(3, 1)})))
    assert expected_err == "AsExpected"
    wrong_pos = classify(wrong, ("errors", frozenset({(4, 1)})))
    assert wrong_pos == "UnexpectedErrors"


def test_classification_partition_property():
    random.seed(1)
    kinds = ["verified", "errors", "timeout"]
    for _ in range(200):
        rs = _runs("e", A.SE_PS,
                   [(random.choice(kinds), random.random()) for _ in range(5)],
                   frozenset({(1, 1)}))
        expected = random.choice([("verify",), ("errors", frozenset({(1, 1)}))])
        c = classify(rs, expected)
        assert c in ("AsExpected", "UnexpectedErrors", "Timeout", "Inconsistent")


def test_aggregate_is_order_insensitive():
    rs = _runs("e", A.SE_PS, [("verified", t) for t in (1, 2, 3, 4, 100)])
    expected = {"e": ("verify",)}
    direct = aggregate(rs, expected)
    shuffled = aggregate(list(reversed(rs)), expected)
    assert direct == shuffled
    assert direct[0].mean_mid_ms == 3.0
    assert direct[0].classification == "AsExpected"


# -- overhead correction ----------------------------------------------------------------


def test_equal_overheads_correct_nothing():
    rs = _runs("e", A.SE_PS, [("verified", 50.0)] * 3)
    out = apply_overhead_correction(rs, {A.SE_PS: 100.0, A.VCG_TA: 100.0})
    assert [r.wall_ms for r in out] == [50.0] * 3


def test_overhead_subtracts_difference_to_lowest():
    rs = (_runs("e", A.SE_PS, [("verified", 500.0)])
          + _runs("e", A.VCG_TA, [("verified", 500.0)]))
    out = apply_overhead_correction(rs, {A.SE_PS: 100.0, A.VCG_TA: 420.0})
    by_algo = {r.algorithm: r.wall_ms for r in out}
    assert by_algo[A.SE_PS] == 500.0
    assert by_algo[A.VCG_TA] == 500.0 - 320.0


def test_corrected_times_clamp_at_zero():
    rs = _runs("e", A.VCG_TA, [("verified", 10.0)])
    out = apply_overhead_correction(rs, {A.SE_PS: 0.0, A.VCG_TA: 100.0})
    assert out[0].wall_ms == 0.0


# -- rpd records ------------------------------------------------------------------------


def _agg(example, algo, ms, classification="AsExpected", group="g"):
    return AggregateRecord(example, group, algo, ms, classification)


def test_rpd_records_only_for_agreeing_as_expected_pairs():
    aggs = [
        _agg("e1", A.SE_PS, 1.0), _agg("e1", A.VCG_TA, 2.0),
        _agg("e2", A.SE_PS, 1.0), _agg("e2", A.VCG_TA, 2.0, "Timeout"),
        _agg("e3", A.SE_PS, 0.0), _agg("e3", A.VCG_TA, 0.0),
    ]
    rpds = rpd_records(aggs)
    keys = {(r.example, r.algo_a, r.algo_b) for r in rpds}
    assert ("e1", A.SE_PS, A.VCG_TA) in keys
    assert all(r.example != "e2" for r in rpds)  # timeout pair excluded
    assert all(r.example != "e3" for r in rpds)  # both-zero pair skipped
    assert math.isclose(rpds[0].rpd, 200.0 / 3.0, abs_tol=1e-9)


# -- completeness table ------------------------------------------------------------------


def test_completeness_percentages():
    aggs = [_agg(f"e{i}", A.SE_PS, 1.0) for i in range(9)]
    aggs.append(_agg("e9", A.SE_PS, 1.0, "UnexpectedErrors"))
    rows = completeness_table(aggs, ["g"])
    all_row = [r for r in rows if r[0] == "All"][0]
    assert all_row[2] == 10.0 and all_row[3] == 0.0


def test_completeness_timeout_counts_in_both_columns():
    aggs = [_agg(f"e{i}", A.SE_PS, 1.0) for i in range(4)]
    aggs.append(_agg("e4", A.SE_PS, 1.0, "Timeout"))
    rows = completeness_table(aggs, ["g"])
    g_row = [r for r in rows if r[0] == "g"][0]
    assert g_row[2] == 20.0 and g_row[3] == 20.0


def test_all_zero_group():
    aggs = [_agg(f"e{i}", A.SE_PS, 1.0) for i in range(8)]
    rows = completeness_table(aggs, ["g"])
    assert all(r[2] == 0.0 and r[3] == 0.0 for r in rows)


# -- CSV schemas -------------------------------------------------------------------------


def test_runs_csv_roundtrip(tmp_path):
    rs = (_runs("a.pv", A.SE_PS, [("verified", 1.5), ("errors", 2.5)], frozenset({(3, 7)}))
          + _runs("b.pv", A.VCG_TR, [("timeout", 9.0)]))
    path = tmp_path / "runs.csv"
    export_runs(rs, path)
    header = path.read_text().splitlines()[0]
    assert header == "example,group,algorithm,run_index,seed,wall_ms,verdict,error_positions"
    back = import_runs(path)
    assert sorted(back, key=str) == sorted(rs, key=str)


def test_empty_exports_are_header_only(tmp_path):
    export_runs([], tmp_path / "runs.csv")
    export_aggregates([], tmp_path / "agg.csv")
    export_rpds([], tmp_path / "rpd.csv")
    export_completeness([], tmp_path / "c.csv")
    for name, header in [
        ("runs.csv", "example,group,algorithm,run_index,seed,wall_ms,verdict,error_positions"),
        ("agg.csv", "example,group,algorithm,mean_mid_ms,classification"),
        ("rpd.csv", "example,group,algo_a,algo_b,rpd"),
        ("c.csv", "group,algorithm,pct_incomplete,pct_timeout_or_inconsistent"),
    ]:
        lines = (tmp_path / name).read_text().splitlines()
        assert lines == [header]


# -- manifest ---------------------------------------------------------------------------


def test_load_corpus_manifest():
    examples = load_manifest(CORPUS / "manifest.txt")
    assert len(examples) >= 30
    groups = {e.group for e in examples}
    assert groups == {"bh", "hf", "hm", "pr"}
    failing = [e for e in examples if not e.expects_verify]
    assert failing and all(e.expected[1] for e in failing)


def test_manifest_rejects_positions_outside_file(tmp_path):
    f = tmp_path / "ex.pv"
    f.write_text("method m() { }\n")
    man = tmp_path / "m.txt"
    man.write_text("ex.pv g errors 99:1\n")
    with pytest.raises(ManifestError):
        load_manifest(man)


# -- runner ------------------------------------------------------------------------------


def test_run_suite_produces_one_record_per_cell(tmp_path):
    examples = [e for e in load_manifest(CORPUS / "manifest.txt")
                if e.name in ("hf_abs.pv", "hf_two_bugs.pv")]
    cfg = make_cfg()
    records = run_suite(examples, [A.SE_PS], repeats=2, seeds=[11, 12], cfg=cfg,
                        warmup=False)
    assert len(records) == 4
    cells = {(r.example, r.algorithm, r.run_index) for r in records}
    assert len(cells) == 4
    assert {r.seed for r in records if r.run_index == 1} == {11}
    assert {r.seed for r in records if r.run_index == 2} == {12}
    bugs = [r for r in records if r.example == "hf_two_bugs.pv"]
    assert all(r.verdict == "errors" and r.error_positions == frozenset({(4, 14), (5, 14)})
               for r in bugs)


def test_suite_requires_enough_seeds():
    from permver.bench import SuiteError

    with pytest.raises(SuiteError):
        run_suite([], [A.SE_PS], repeats=3, seeds=[1], cfg=make_cfg())
