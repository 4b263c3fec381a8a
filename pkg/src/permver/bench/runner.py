"""Suite execution: repeated sequential runs with per-run seeds, a discarded
warm-up run per (example, algorithm), and the startup-overhead baseline."""

from __future__ import annotations

import time
from dataclasses import replace as dc_replace
from pathlib import Path

from ..algorithms import AlgorithmId, verify_program
from ..lang import parse, typecheck
from ..lang.ast import Program
from ..se import Deadline, EngineOptions, Verdict
from ..smt import SolverConfig
from .records import RunRecord


class SuiteError(Exception):
    pass


def file_verdict(outcomes):
    """Collapse per-method outcomes into one per-example verdict. Any method
    hitting the deadline makes the run a timeout regardless of partial
    errors."""
    if any(o.verdict is Verdict.TIMEOUT for o in outcomes):
        return "timeout", frozenset()
    positions = set()
    for o in outcomes:
        for e in o.errors:
            positions.add((e.pos.line, e.pos.col))
    if positions:
        return "errors", frozenset(positions)
    return "verified", frozenset()


def load_program(path: str) -> Program:
    text = Path(path).read_text()
    prog = parse(text)
    diags = typecheck(prog)
    if diags:
        raise SuiteError(f"{path}: " + "; ".join(map(str, diags)))
    return prog


def run_suite(examples, algorithms, repeats: int, seeds, cfg: SolverConfig,
              warmup: bool = True, options: EngineOptions | None = None,
              progress=None, transcript_dir: str | None = None) -> list:
    """Sequential measurement: every (example, algorithm, run index) yields
    exactly one record; the harness itself never aborts a suite run."""
    if len(seeds) < repeats:
        raise SuiteError(f"need at least {repeats} seeds, got {len(seeds)}")
    options = options or EngineOptions()
    records = []
    for ex in examples:
        program = load_program(ex.path)
        for algo in algorithms:
            if warmup:
                run_cfg = dc_replace(cfg, random_seed=seeds[0], transcript_dir=None)
                _run_once(program, algo, run_cfg, options)
            for i in range(1, repeats + 1):
                seed = seeds[i - 1]
                tdir = None
                if transcript_dir:
                    tdir = str(Path(transcript_dir) / ex.name / algo.value / f"run{i}")
                run_cfg = dc_replace(cfg, random_seed=seed, transcript_dir=tdir)
                wall_ms, verdict, positions = _run_once(program, algo, run_cfg, options)
                records.append(RunRecord(
                    example=ex.name,
                    group=ex.group,
                    algorithm=algo,
                    run_index=i,
                    seed=seed,
                    wall_ms=wall_ms,
                    verdict=verdict,
                    error_positions=positions,
                ))
                if progress:
                    progress(records[-1])
    return records


def _run_once(program: Program, algo: AlgorithmId, cfg: SolverConfig,
              options: EngineOptions):
    started = time.perf_counter()
    outcomes = verify_program(program, algo, cfg, options=options,
                              deadline=Deadline(cfg.timeout_ms))
    wall_ms = (time.perf_counter() - started) * 1000.0
    verdict, positions = file_verdict(outcomes)
    return wall_ms, verdict, positions


def baseline_overhead(algorithms, cfg: SolverConfig, repeats: int = 3) -> dict:
    """Fixed startup cost per algorithm, measured by verifying an empty
    program (the solver session is still opened and configured)."""
    from .records import mean_mid

    empty = Program()
    out = {}
    for algo in algorithms:
        times = []
        for _ in range(max(1, repeats)):
            started = time.perf_counter()
            verify_program(empty, algo, cfg)
            times.append((time.perf_counter() - started) * 1000.0)
        out[algo] = mean_mid(times)
    return out
