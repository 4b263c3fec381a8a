"""Benchmark records and their arithmetic: middle-run means, completeness
classification, relative percentage differences, overhead correction, and
the CSV schemas."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

from ..algorithms import AlgorithmId
from .manifest import format_positions, parse_positions

CLASSIFICATIONS = ("AsExpected", "UnexpectedErrors", "Timeout", "Inconsistent")


@dataclass(frozen=True)
class RunRecord:
    example: str
    group: str
    algorithm: AlgorithmId
    run_index: int  # 1-based
    seed: int
    wall_ms: float
    verdict: str  # "verified" | "errors" | "timeout"
    error_positions: frozenset = frozenset()

    def verdict_key(self):
        if self.verdict == "errors":
            return ("errors", self.error_positions)
        return (self.verdict,)


@dataclass(frozen=True)
class AggregateRecord:
    example: str
    group: str
    algorithm: AlgorithmId
    mean_mid_ms: float
    classification: str


@dataclass(frozen=True)
class RpdRecord:
    example: str
    group: str
    algo_a: AlgorithmId
    algo_b: AlgorithmId
    rpd: float


def rpd(t1: float, t2: float) -> float | None:
    """Relative percentage difference of two run times; positive means the
    first was faster. Undefined (None) when both are zero."""
    if t1 + t2 == 0:
        return None
    return (t2 - t1) / (0.5 * (t2 + t1)) * 100.0


def mean_mid(times) -> float:
    """Drop the shortest and longest run, mean the rest (needs 3 or more
    values; otherwise the plain mean)."""
    ts = sorted(times)
    if len(ts) >= 3:
        ts = ts[1:-1]
    return sum(ts) / len(ts)


def classify(records, expected) -> str:
    """One of the four completeness classes, checked in order: AsExpected,
    Timeout, Inconsistent, UnexpectedErrors."""
    if expected[0] == "verify":
        want = ("verified",)
    else:
        want = ("errors", expected[1])
    keys = [r.verdict_key() for r in records]
    if all(k == want for k in keys):
        return "AsExpected"
    if any(r.verdict == "timeout" for r in records):
        return "Timeout"
    if len(set(keys)) > 1:
        return "Inconsistent"
    return "UnexpectedErrors"


def aggregate(records, expected_by_example: dict) -> list:
    """One AggregateRecord per (example, algorithm); insensitive to record
    order."""
    groups: dict = {}
    for r in records:
        groups.setdefault((r.example, r.algorithm), []).append(r)
    out = []
    for (example, algorithm), rs in sorted(
            groups.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        rs = sorted(rs, key=lambda r: r.run_index)
        expected = expected_by_example[example]
        out.append(AggregateRecord(
            example=example,
            group=rs[0].group,
            algorithm=algorithm,
            mean_mid_ms=mean_mid([r.wall_ms for r in rs]),
            classification=classify(rs, expected),
        ))
    return out


def baseline_correction(overheads: dict) -> dict:
    """Per-algorithm time to subtract: own startup overhead minus the lowest
    overhead across algorithms."""
    lowest = min(overheads.values())
    return {a: o - lowest for a, o in overheads.items()}


def apply_overhead_correction(records, overheads: dict) -> list:
    corr = baseline_correction(overheads)
    out = []
    for r in records:
        delta = corr.get(r.algorithm, 0.0)
        out.append(replace(r, wall_ms=max(0.0, r.wall_ms - delta)))
    return out


def rpd_records(aggregates) -> list:
    """RPDs for algorithm pairs on examples where both are AsExpected (and
    therefore verdict-equal); pairs follow the algorithm enum order."""
    per_example: dict = {}
    for a in aggregates:
        per_example.setdefault(a.example, {})[a.algorithm] = a
    algos = list(AlgorithmId)
    out = []
    for example in sorted(per_example):
        row = per_example[example]
        for i, a in enumerate(algos):
            for b in algos[i + 1:]:
                ra, rb = row.get(a), row.get(b)
                if ra is None or rb is None:
                    continue
                if ra.classification != "AsExpected" or rb.classification != "AsExpected":
                    continue
                value = rpd(ra.mean_mid_ms, rb.mean_mid_ms)
                if value is None:
                    continue
                out.append(RpdRecord(example, ra.group, a, b, value))
    return out


def completeness_table(aggregates, groups=None) -> list:
    """Rows (group, algorithm, pct incomplete, pct timeout-or-inconsistent),
    including an `All` row across the union of groups."""
    if groups is None:
        groups = []
        for a in aggregates:
            if a.group not in groups:
                groups.append(a.group)
    algos = []
    for a in aggregates:
        if a.algorithm not in algos:
            algos.append(a.algorithm)
    algos.sort(key=lambda x: x.value)

    def row(tag: str, members) -> list:
        rows = []
        for algo in algos:
            cell = [a for a in members if a.algorithm == algo]
            if not cell:
                continue
            n = len(cell)
            bad = sum(1 for a in cell if a.classification != "AsExpected")
            toi = sum(1 for a in cell if a.classification in ("Timeout", "Inconsistent"))
            rows.append((tag, algo, 100.0 * bad / n, 100.0 * toi / n))
        return rows

    out = row("All", aggregates)
    for g in groups:
        out.extend(row(g, [a for a in aggregates if a.group == g]))
    return out


# -- CSV schemas --------------------------------------------------------------

RUNS_HEADER = ["example", "group", "algorithm", "run_index", "seed", "wall_ms",
               "verdict", "error_positions"]
AGGREGATES_HEADER = ["example", "group", "algorithm", "mean_mid_ms", "classification"]
RPD_HEADER = ["example", "group", "algo_a", "algo_b", "rpd"]
COMPLETENESS_HEADER = ["group", "algorithm", "pct_incomplete",
                       "pct_timeout_or_inconsistent"]


def export_runs(records, path):
    records = sorted(records, key=lambda r: (r.example, r.algorithm.value, r.run_index))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RUNS_HEADER)
        for r in records:
            w.writerow([
                r.example, r.group, r.algorithm.value, r.run_index, r.seed,
                f"{r.wall_ms:.3f}", r.verdict,
                format_positions(r.error_positions).replace(",", ";"),
            ])


def import_runs(path) -> list:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            positions = frozenset()
            if row["error_positions"]:
                positions = parse_positions(row["error_positions"].replace(";", ","))
            out.append(RunRecord(
                example=row["example"],
                group=row["group"],
                algorithm=AlgorithmId.from_name(row["algorithm"]),
                run_index=int(row["run_index"]),
                seed=int(row["seed"]),
                wall_ms=float(row["wall_ms"]),
                verdict=row["verdict"],
                error_positions=positions,
            ))
    return out


def export_aggregates(aggregates, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(AGGREGATES_HEADER)
        for a in aggregates:
            w.writerow([a.example, a.group, a.algorithm.value,
                        f"{a.mean_mid_ms:.3f}", a.classification])


def export_rpds(rpds, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RPD_HEADER)
        for r in rpds:
            w.writerow([r.example, r.group, r.algo_a.value, r.algo_b.value,
                        f"{r.rpd:.6f}"])


def export_completeness(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COMPLETENESS_HEADER)
        for (group, algo, pct_bad, pct_toi) in rows:
            w.writerow([group, algo.value, f"{pct_bad:.1f}", f"{pct_toi:.1f}"])
