"""Portfolio runner: several algorithms race per method until one verifies.

The unit of competition is the method. In parallel mode every member gets its
own solver session and thread; the first Verified result wins and the losers
are cancelled cooperatively (a cancellation event checked between obligations,
plus killing the loser's solver process). In sequential mode members run in
fixed priority order and the run stops at the first Verified.
"""

from __future__ import annotations

import threading
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field

from .algorithms import PRIORITY, AlgorithmId, open_task_session, verify_method
from .lang.ast import Program
from .se import Deadline, EngineOptions, TaskCancelled, Verdict
from .smt import SolverConfig

PRESETS = {
    "P0": (AlgorithmId.SE_PS, AlgorithmId.SE_TR, AlgorithmId.VCG_TR, AlgorithmId.VCG_TA),
    "P1": (AlgorithmId.SE_PS, AlgorithmId.SE_TR, AlgorithmId.VCG_TR),
    "P2": (AlgorithmId.SE_PS, AlgorithmId.VCG_TR),
    "P3": (AlgorithmId.SE_PS, AlgorithmId.SE_TR),
}


class UnknownPreset(Exception):
    pass


@dataclass(frozen=True)
class PortfolioSpec:
    name: str
    members: tuple  # non-empty tuple of AlgorithmId
    mode: str = "parallel"  # "parallel" | "sequential"

    def __post_init__(self):
        if not self.members:
            raise ValueError("portfolio needs at least one member")


def preset(name: str, mode: str = "parallel") -> PortfolioSpec:
    if name not in PRESETS:
        raise UnknownPreset(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return PortfolioSpec(name, PRESETS[name], mode)


@dataclass
class MemberResult:
    algorithm: AlgorithmId
    verdict: str  # "verified" | "errors" | "timeout" | "cancelled" | "skipped"
    wall_time_s: float = 0.0
    errors: list = field(default_factory=list)


@dataclass
class MethodResult:
    method: str
    verdict: str  # "verified" | "errors" | "timeout"
    winner: AlgorithmId | None
    errors: list
    members: list  # of MemberResult


@dataclass
class PortfolioResult:
    spec: PortfolioSpec
    methods: list  # of MethodResult

    @property
    def verified(self) -> bool:
        return all(m.verdict == "verified" for m in self.methods)

    @property
    def has_timeout(self) -> bool:
        return any(m.verdict == "timeout" for m in self.methods)


def _priority_order(members) -> list:
    return [a for a in PRIORITY if a in members]


def _run_member(program: Program, method_name: str, algo: AlgorithmId,
                cfg: SolverConfig, options: EngineOptions,
                cancel_event, registry: dict) -> MemberResult:
    deadline = Deadline(cfg.timeout_ms, cancel_event)
    session = open_task_session(program, algo, cfg,
                                name=f"{method_name}.{algo.value}")
    registry[algo] = session
    try:
        m = program.method_decl(method_name)
        out = verify_method(program, m, algo, cfg, options, deadline, session)
        if cancel_event is not None and cancel_event.is_set() \
                and out.verdict is not Verdict.VERIFIED:
            return MemberResult(algo, "cancelled", out.wall_time_s)
        return MemberResult(algo, out.verdict.value, out.wall_time_s, out.errors)
    except TaskCancelled:
        return MemberResult(algo, "cancelled")
    finally:
        session.close()
        registry.pop(algo, None)


def _settle(method_name: str, members: list) -> MethodResult:
    by_algo = {mr.algorithm: mr for mr in members}
    winner = next((mr.algorithm for mr in members if mr.verdict == "verified"), None)
    if winner is not None:
        return MethodResult(method_name, "verified", winner, [], members)
    # the designated reporter is the highest-priority member that produced
    # an error set; with none, the whole method timed out
    for algo in _priority_order(by_algo):
        mr = by_algo[algo]
        if mr.verdict == "errors":
            return MethodResult(method_name, "errors", None, list(mr.errors), members)
    return MethodResult(method_name, "timeout", None, [], members)


def run_portfolio(program: Program, spec: PortfolioSpec, cfg: SolverConfig,
                  options: EngineOptions | None = None,
                  cancellation: bool = True) -> PortfolioResult:
    options = options or EngineOptions()
    methods = []
    for m in program.methods:
        if spec.mode == "sequential":
            methods.append(_run_sequential(program, m.name, spec, cfg, options))
        else:
            methods.append(_run_parallel(program, m.name, spec, cfg, options,
                                         cancellation))
    return PortfolioResult(spec, methods)


def _run_sequential(program: Program, method_name: str, spec: PortfolioSpec,
                    cfg: SolverConfig, options: EngineOptions) -> MethodResult:
    members = []
    ordered = _priority_order(spec.members)
    for i, algo in enumerate(ordered):
        mr = _run_member(program, method_name, algo, cfg, options, None, {})
        members.append(mr)
        if mr.verdict == "verified":
            members.extend(MemberResult(a, "skipped") for a in ordered[i + 1:])
            break
    return _settle(method_name, members)


def _run_parallel(program: Program, method_name: str, spec: PortfolioSpec,
                  cfg: SolverConfig, options: EngineOptions,
                  cancellation: bool) -> MethodResult:
    cancel_event = threading.Event() if cancellation else None
    registry: dict = {}
    ordered = _priority_order(spec.members)
    results: list[MemberResult] = []
    with ThreadPoolExecutor(max_workers=len(ordered)) as pool:
        futures = {
            pool.submit(_run_member, program, method_name, algo, cfg, options,
                        cancel_event, registry): algo
            for algo in ordered
        }
        pending = set(futures)
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                mr = fut.result()
                results.append(mr)
                if mr.verdict == "verified" and cancellation and cancel_event is not None:
                    cancel_event.set()
                    for session in list(registry.values()):
                        try:
                            session.interrupt()
                        except Exception:
                            pass
    results.sort(key=lambda mr: ordered.index(mr.algorithm))
    return _settle(method_name, results)
