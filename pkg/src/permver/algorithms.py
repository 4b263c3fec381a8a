"""The five verification algorithms and the per-task solver session setup."""

from __future__ import annotations

from enum import Enum

from .lang.ast import Program, TypeTag
from .se import (
    CombiningStrategy,
    Deadline,
    Engine,
    EngineOptions,
    PartialStrategy,
    TotalStrategy,
    VerificationOutcome,
)
from .se.state import pred_leaf_sorts, sort_of
from .smt import Session, SolverConfig, sort_to_smt
from .vcg import check_vc, encode_method
from .vcg.encode import box_fn, field_const, pred_field_fn, unbox_fn
from .se.total import snap_ctor, snap_proj


class AlgorithmId(Enum):
    SE_PS = "se-ps"
    SE_PC = "se-pc"
    SE_TR = "se-tr"
    VCG_TR = "vcg-tr"
    VCG_TA = "vcg-ta"

    @classmethod
    def from_name(cls, name: str) -> "AlgorithmId":
        for a in cls:
            if a.value == name or a.name.lower() == name.lower().replace("-", "_"):
                return a
        raise ValueError(f"unknown algorithm {name!r}; pick from "
                         f"{', '.join(a.value for a in cls)}")

    @property
    def is_se(self) -> bool:
        return self in (AlgorithmId.SE_PS, AlgorithmId.SE_PC, AlgorithmId.SE_TR)


# reporter priority when a portfolio has no verifying member
PRIORITY = [AlgorithmId.SE_PS, AlgorithmId.SE_PC, AlgorithmId.SE_TR,
            AlgorithmId.VCG_TR, AlgorithmId.VCG_TA]

_SE_STRATEGIES = {
    AlgorithmId.SE_PS: PartialStrategy,
    AlgorithmId.SE_PC: CombiningStrategy,
    AlgorithmId.SE_TR: TotalStrategy,
}


def _snapshot_decls(program: Program) -> list:
    """Per-predicate snapshot constructor/projector pairs with inverse
    axioms (pattern on the constructor application)."""
    lines = []
    for p in program.predicates:
        sorts = pred_leaf_sorts(program, p.name)
        ctor = snap_ctor(p.name)
        if not sorts:
            lines.append(f"(declare-const {ctor} Snap)")
            continue
        args_s = " ".join(sort_to_smt(s) for s in sorts)
        lines.append(f"(declare-fun {ctor} ({args_s}) Snap)")
        bound = " ".join(f"(x{i} {sort_to_smt(s)})" for i, s in enumerate(sorts))
        app = f"({ctor} {' '.join(f'x{i}' for i in range(len(sorts)))})"
        for i, s in enumerate(sorts):
            proj = snap_proj(p.name, i)
            lines.append(f"(declare-fun {proj} (Snap) {sort_to_smt(s)})")
            lines.append(
                f"(assert (forall ({bound}) (! (= ({proj} {app}) x{i}) "
                f":pattern ({app}))))"
            )
    return lines


def _ta_decls(program: Program) -> list:
    """Field identifiers, predicate-instance field functions with injectivity,
    and value boxing for the single-heap encoding."""
    lines = ["(declare-sort Field 0)"]
    fld_names = []
    for f in program.fields:
        c = field_const(f.name)
        lines.append(f"(declare-const {c.name} Field)")
        fld_names.append(c.name)
    if len(fld_names) >= 2:
        lines.append(f"(assert (distinct {' '.join(fld_names)}))")
    for p in program.predicates:
        fn = pred_field_fn(p.name)
        sorts = [sort_of(t) for _, t in p.params]
        args_s = " ".join(sort_to_smt(s) for s in sorts)
        lines.append(f"(declare-fun {fn} ({args_s}) Field)")
        if sorts:
            bound = " ".join(f"(a{i} {sort_to_smt(s)})" for i, s in enumerate(sorts))
            app = f"({fn} {' '.join(f'a{i}' for i in range(len(sorts)))})"
            # injectivity via inverse functions
            for i, s in enumerate(sorts):
                inv = f"{fn}$inv{i}"
                lines.append(f"(declare-fun {inv} (Field) {sort_to_smt(s)})")
                lines.append(
                    f"(assert (forall ({bound}) (! (= ({inv} {app}) a{i}) "
                    f":pattern ({app}))))"
                )
        else:
            app = fn
        # predicate instances never collide with declared fields
        for fname in fld_names:
            if sorts:
                lines.append(
                    f"(assert (forall ({bound}) (! (distinct {app} {fname}) "
                    f":pattern ({app}))))"
                )
            else:
                lines.append(f"(assert (distinct {app} {fname}))")
    for tag in TypeTag:
        box, unbox = box_fn(tag), unbox_fn(tag)
        s = sort_to_smt(sort_of(tag))
        lines.append(f"(declare-fun {box} ({s}) Snap)")
        lines.append(f"(declare-fun {unbox} (Snap) {s})")
        lines.append(
            f"(assert (forall ((v {s})) (! (= ({unbox} ({box} v)) v) "
            f":pattern (({box} v)))))"
        )
    return lines


def build_preamble(program: Program, algo: AlgorithmId) -> list:
    lines = ["(declare-sort Ref 0)", "(declare-const nullref Ref)"]
    needs_snap = algo in (AlgorithmId.SE_TR, AlgorithmId.VCG_TR, AlgorithmId.VCG_TA)
    if needs_snap and (program.predicates or algo is AlgorithmId.VCG_TA):
        lines.append("(declare-sort Snap 0)")
        lines.extend(_snapshot_decls(program))
    if algo is AlgorithmId.VCG_TA:
        lines.extend(_ta_decls(program))
    return lines


def open_task_session(program: Program, algo: AlgorithmId, cfg: SolverConfig,
                      name: str = "task") -> Session:
    return Session(cfg, preamble=build_preamble(program, algo), name=name)


def verify_program(program: Program, algo: AlgorithmId, cfg: SolverConfig,
                   options: EngineOptions | None = None,
                   deadline: Deadline | None = None,
                   session: Session | None = None,
                   methods: list | None = None,
                   report_all: bool = True) -> list:
    """Verify every method of a typechecked program with one algorithm,
    sharing a single solver process across the task."""
    options = options or EngineOptions()
    deadline = deadline or Deadline(cfg.timeout_ms)
    own_session = session is None
    if own_session:
        session = open_task_session(program, algo, cfg)
    try:
        wanted = set(methods) if methods is not None else None
        outcomes = []
        for m in program.methods:
            if wanted is not None and m.name not in wanted:
                continue
            outcomes.append(
                verify_method(program, m, algo, cfg, options, deadline, session,
                              report_all))
        return outcomes
    finally:
        if own_session:
            session.close()


def verify_method(program: Program, m, algo: AlgorithmId, cfg: SolverConfig,
                  options: EngineOptions, deadline: Deadline, session: Session,
                  report_all: bool = True) -> VerificationOutcome:
    if algo.is_se:
        engine = Engine(program, _SE_STRATEGIES[algo], session, options, deadline)
        return engine.verify_method(m)
    enc = "tr" if algo is AlgorithmId.VCG_TR else "ta"
    vc = encode_method(program, m, enc)
    return check_vc(vc, session, deadline, report_all=report_all)
