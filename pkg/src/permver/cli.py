"""Command-line driver: verify, bench, and dump-smt subcommands.

Exit codes: 0 all methods verified (or bench completed), 1 verification
errors, 2 usage, input, or solver-start errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .algorithms import AlgorithmId, verify_program
from .bench import (
    aggregate,
    apply_overhead_correction,
    baseline_overhead,
    completeness_table,
    export_aggregates,
    export_completeness,
    export_rpds,
    export_runs,
    load_manifest,
    rpd_records,
    run_suite,
)
from .bench.runner import SuiteError
from .lang import ParseError, TypecheckError, typecheck_strict, parse as parse_text
from .portfolio import PRESETS, UnknownPreset, preset, run_portfolio
from .se import EngineOptions, Verdict
from .smt import SolverConfig, SolverStartError
from .vcg import encode_method

SCHEMA_VERSION = 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="permver",
        description="multi-backend verifier for a small permission-logic language",
    )
    p.add_argument("--version", action="version", version=f"permver {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_solver_args(sp):
        sp.add_argument("--solver-path", help="SMT solver executable "
                        "(default: $PERMVER_SOLVER, bundled WASM Z3, or z3 on PATH)")
        sp.add_argument("--timeout-ms", type=int, default=600_000,
                        help="per-example budget in milliseconds (default 600000)")
        sp.add_argument("--seed", type=int, default=0, help="solver random seed")
        sp.add_argument("--dump-transcripts", metavar="DIR",
                        help="log every solver session to DIR as replayable SMT-LIB")

    v = sub.add_parser("verify", help="verify one or more source files")
    v.add_argument("files", nargs="+")
    v.add_argument("--algorithm", help="one of " + ", ".join(a.value for a in AlgorithmId))
    v.add_argument("--portfolio", help="one of " + ", ".join(PRESETS))
    v.add_argument("--sequential", action="store_true",
                   help="run portfolio members sequentially instead of in parallel")
    v.add_argument("--format", choices=["human", "json", "csv"], default="human")
    v.add_argument("--no-consolidation", action="store_true",
                   help="debug: disable state consolidation in partial-heap backends")
    v.add_argument("--no-prune", action="store_true",
                   help="debug: disable branch feasibility pruning")
    v.add_argument("--check-invariants", action="store_true",
                   help="debug: re-verify internal invariants with extra solver queries")
    add_solver_args(v)

    b = sub.add_parser("bench", help="run a benchmark suite from a manifest")
    b.add_argument("--suite", required=True, help="manifest file")
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--seeds", help="comma-separated per-run seeds "
                   "(default: 1..repeats)")
    b.add_argument("--algorithms", help="comma-separated subset (default: all five)")
    b.add_argument("--out", required=True, help="output directory for the CSVs")
    b.add_argument("--no-warmup", action="store_true")
    b.add_argument("--no-overhead-correction", action="store_true")
    add_solver_args(b)

    d = sub.add_parser("dump-smt", help="emit solver input without verifying")
    d.add_argument("files", nargs="+")
    d.add_argument("--algorithm", required=True)
    d.add_argument("--out", required=True, help="output directory")
    add_solver_args(d)
    return p


def _solver_config(args, transcript_dir=None) -> SolverConfig:
    return SolverConfig(
        solver_path=args.solver_path,
        timeout_ms=args.timeout_ms,
        random_seed=args.seed,
        transcript_dir=transcript_dir or args.dump_transcripts,
    )


def _load(path: str):
    text = Path(path).read_text()
    return typecheck_strict(parse_text(text))


def cmd_verify(args) -> int:
    if bool(args.algorithm) == bool(args.portfolio):
        print("error: pass exactly one of --algorithm or --portfolio", file=sys.stderr)
        return 2
    options = EngineOptions(consolidate=not args.no_consolidation,
                            prune_branches=not args.no_prune,
                            debug_checks=args.check_invariants)
    cfg = _solver_config(args)
    rows = []
    any_error = False
    any_timeout = False
    for path in args.files:
        prog = _load(path)
        if args.algorithm:
            algo = AlgorithmId.from_name(args.algorithm)
            outcomes = verify_program(prog, algo, cfg, options=options)
            for o in outcomes:
                rows.append({
                    "file": path, "method": o.method, "verdict": o.verdict.value,
                    "winner": algo.value, "wall_ms": o.wall_time_s * 1000.0,
                    "queries": o.query_count,
                    "errors": [{"line": e.pos.line, "col": e.pos.col,
                                "kind": e.kind.value, "description": e.description}
                               for e in sorted(o.errors, key=lambda e: (e.pos.line, e.pos.col))],
                })
                any_error |= o.verdict is Verdict.ERRORS
                any_timeout |= o.verdict is Verdict.TIMEOUT
        else:
            spec = preset(args.portfolio, "sequential" if args.sequential else "parallel")
            result = run_portfolio(prog, spec, cfg, options=options)
            for m in result.methods:
                rows.append({
                    "file": path, "method": m.method, "verdict": m.verdict,
                    "winner": m.winner.value if m.winner else "",
                    "wall_ms": sum(mr.wall_time_s for mr in m.members) * 1000.0,
                    "queries": None,
                    "errors": [{"line": e.pos.line, "col": e.pos.col,
                                "kind": e.kind.value, "description": e.description}
                               for e in sorted(m.errors, key=lambda e: (e.pos.line, e.pos.col))],
                })
                any_error |= m.verdict == "errors"
                any_timeout |= m.verdict == "timeout"

    if args.format == "json":
        print(json.dumps({"schema_version": SCHEMA_VERSION, "results": rows}, indent=2))
    elif args.format == "csv":
        print("file,method,verdict,winner,errors")
        for r in rows:
            errs = ";".join(f"{e['line']}:{e['col']}" for e in r["errors"])
            print(f"{r['file']},{r['method']},{r['verdict']},{r['winner']},{errs}")
    else:
        for r in rows:
            if r["verdict"] == "verified":
                win = f" (winner {r['winner']})" if args.portfolio else ""
                print(f"{r['file']}: method {r['method']}: verified{win}")
            elif r["verdict"] == "timeout":
                print(f"{r['file']}: method {r['method']}: timeout")
            else:
                print(f"{r['file']}: method {r['method']}: {len(r['errors'])} error(s)")
                for e in r["errors"]:
                    print(f"  {e['line']}:{e['col']}: {e['kind']}: {e['description']}")
    return 1 if (any_error or any_timeout) else 0


def cmd_bench(args) -> int:
    examples = load_manifest(args.suite)
    if args.algorithms:
        algorithms = [AlgorithmId.from_name(a) for a in args.algorithms.split(",")]
    else:
        algorithms = list(AlgorithmId)
    if args.seeds:
        seeds = [int(s) for s in args.seeds.split(",")]
    else:
        seeds = list(range(1, args.repeats + 1))
    cfg = _solver_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    print(f"measuring startup overhead for {len(algorithms)} algorithm(s)...")
    overheads = baseline_overhead(algorithms, cfg)
    for a, ms in overheads.items():
        print(f"  {a.value}: {ms:.0f} ms")

    total = len(examples) * len(algorithms) * args.repeats
    done = [0]

    def progress(rec):
        done[0] += 1
        print(f"[{done[0]}/{total}] {rec.example} {rec.algorithm.value} "
              f"run {rec.run_index}: {rec.verdict} ({rec.wall_ms:.0f} ms)")

    records = run_suite(examples, algorithms, args.repeats, seeds, cfg,
                        warmup=not args.no_warmup, progress=progress,
                        transcript_dir=args.dump_transcripts)
    if not args.no_overhead_correction:
        records = apply_overhead_correction(records, overheads)
    expected = {ex.name: ex.expected for ex in examples}
    aggs = aggregate(records, expected)
    rpds = rpd_records(aggs)
    groups = []
    for ex in examples:
        if ex.group not in groups:
            groups.append(ex.group)
    table = completeness_table(aggs, groups)
    export_runs(records, out / "runs.csv")
    export_aggregates(aggs, out / "aggregates.csv")
    export_rpds(rpds, out / "rpd.csv")
    export_completeness(table, out / "completeness.csv")
    print(f"wrote {out}/runs.csv, aggregates.csv, rpd.csv, completeness.csv")
    return 0


def cmd_dump_smt(args) -> int:
    algo = AlgorithmId.from_name(args.algorithm)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for path in args.files:
        prog = _load(path)
        stem = Path(path).stem
        if not algo.is_se:
            enc = "tr" if algo is AlgorithmId.VCG_TR else "ta"
            from .algorithms import build_preamble

            preamble = build_preamble(prog, algo)
            for m in prog.methods:
                vc = encode_method(prog, m, enc)
                target = out / f"{stem}.{m.name}.{algo.value}.smt2"
                target.write_text("\n".join(preamble) + "\n" + vc.script())
                print(f"wrote {target}")
        else:
            # symbolic execution interleaves queries with state updates, so
            # the dump is the full session transcript of an actual run
            tdir = out / f"{stem}.{algo.value}"
            cfg = _solver_config(args, transcript_dir=str(tdir))
            verify_program(prog, algo, cfg)
            print(f"wrote transcripts under {tdir}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "dump-smt":
            return cmd_dump_smt(args)
        return 2
    except (ParseError, TypecheckError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except (SolverStartError, SuiteError, UnknownPreset, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
