from __future__ import annotations

from pathlib import Path

import pytest

from permver import AlgorithmId, SolverConfig, parse, typecheck_strict, verify_program
from permver.se import EngineOptions

REPO = Path(__file__).resolve().parents[1]
SOLVER = REPO / "solver" / "z3repl.mjs"
CORPUS = REPO / "corpus"


def pytest_configure(config):
    if not (REPO / "solver" / "node_modules" / "z3-solver").exists():
        pytest.exit(
            "solver shim is not installed; run `npm install` inside solver/ first",
            returncode=3,
        )


def make_cfg(**kw) -> SolverConfig:
    kw.setdefault("solver_path", str(SOLVER))
    kw.setdefault("timeout_ms", 120_000)
    return SolverConfig(**kw)


@pytest.fixture
def cfg() -> SolverConfig:
    return make_cfg()


@pytest.fixture
def session(cfg):
    from permver.smt import Session

    s = Session(cfg, preamble=["(declare-sort Ref 0)", "(declare-const nullref Ref)"])
    yield s
    s.close()


def load_program(src: str):
    return typecheck_strict(parse(src))


def verify_src(src: str, algo: AlgorithmId, cfg=None, **opt_kw):
    cfg = cfg or make_cfg()
    options = EngineOptions(**opt_kw) if opt_kw else None
    return verify_program(load_program(src), algo, cfg, options=options)


def verdicts(outcomes):
    return {o.method: o.verdict.value for o in outcomes}


def corpus_file(name: str) -> str:
    return (CORPUS / name).read_text()
