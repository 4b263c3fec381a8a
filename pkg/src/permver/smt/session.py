"""Incremental textual session with an external SMT-LIB 2.6 solver.

A Session owns one solver process and talks to it over stdin/stdout with
`:print-success` enabled, so every command is acknowledged and the stream
stays in lockstep. Sessions are single-owner: exactly one verification task
drives a session at a time.
"""

from __future__ import annotations

import os
import queue
import shutil
import subprocess
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .terms import BOOL, Const, Sort, Term, not_, sort_to_smt, to_smt


class SolverStartError(Exception):
    pass


class SessionDead(Exception):
    pass


class StackUnderflow(Exception):
    pass


class ProtocolError(Exception):
    pass


@dataclass(frozen=True)
class SatResult:
    kind: str  # "sat" | "unsat" | "unknown" | "timeout"
    reason: str = ""

    @property
    def is_sat(self) -> bool:
        return self.kind == "sat"

    @property
    def is_unsat(self) -> bool:
        return self.kind == "unsat"

    @property
    def is_timeout(self) -> bool:
        return self.kind == "timeout"


SAT = SatResult("sat")
UNSAT = SatResult("unsat")
TIMED_OUT = SatResult("timeout")


def unknown(reason: str) -> SatResult:
    return SatResult("unknown", reason)


@dataclass
class SolverConfig:
    solver_path: str | None = None
    timeout_ms: int = 600_000
    random_seed: int = 0
    extra_options: list = field(default_factory=list)  # "key=value" strings
    transcript_dir: str | None = None

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")


def find_default_solver() -> str | None:
    """Resolve a solver executable: $PERMVER_SOLVER, then the bundled
    WASM-Z3 REPL (looked up from the working directory and from the package
    checkout), then a `z3` binary on PATH."""
    env = os.environ.get("PERMVER_SOLVER")
    if env:
        return env
    here = Path(__file__).resolve()
    candidates = [Path.cwd()] + list(Path.cwd().parents) + list(here.parents)
    for base in candidates:
        shim = base / "solver" / "z3repl.mjs"
        if shim.exists():
            return str(shim)
    z3 = shutil.which("z3")
    if z3:
        return z3
    return None


def solver_command(path: str) -> list:
    p = Path(path)
    if p.suffix in (".mjs", ".js"):
        node = shutil.which("node")
        if node is None:
            raise SolverStartError("node is required to run the bundled solver shim")
        return [node, str(p)]
    if p.name.startswith("z3"):
        return [str(p), "-in", "-smt2"]
    return [str(p)]


class Session:
    """One live solver process plus an assertion-stack mirror.

    `check_entailed` always restores the stack; `depth` equals pushes minus
    pops and is never negative. All commands sent are recorded when a
    transcript sink is attached, so a transcript replays standalone.
    """

    def __init__(self, cfg: SolverConfig, preamble: list | None = None, name: str = "task"):
        self.cfg = cfg
        self.depth = 0
        self.query_count = 0
        self.solver_time_s = 0.0
        self._fresh_counter = 0
        self._dead = False
        self.check_results: list[SatResult] = []
        self._transcript_file = None
        self._current_timeout_ms = None

        path = cfg.solver_path or find_default_solver()
        if path is None:
            raise SolverStartError(
                "no SMT solver found: pass solver_path, set $PERMVER_SOLVER, or run "
                "`npm install` inside the repository's solver/ directory"
            )
        if not Path(path).exists() and shutil.which(path) is None:
            raise SolverStartError(f"solver executable not found: {path}")
        cmd = solver_command(path)
        try:
            self._proc = subprocess.Popen(
                cmd,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
            )
        except OSError as e:
            raise SolverStartError(f"failed to start solver {cmd}: {e}") from e

        self._lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

        if cfg.transcript_dir:
            Path(cfg.transcript_dir).mkdir(parents=True, exist_ok=True)
            self._transcript_file = open(Path(cfg.transcript_dir) / f"{name}.smt2", "w")

        self._command("(set-option :print-success true)", timeout_s=20.0)
        # E-matching only: quantified goals answer unsat or unknown quickly
        # instead of diverging in model-based instantiation
        self._command("(set-option :auto_config false)")
        self._command("(set-option :smt.mbqi false)")
        self._command(f"(set-option :smt.random-seed {cfg.random_seed})")
        self._command(f"(set-option :sat.random_seed {cfg.random_seed})")
        self._set_timeout(cfg.timeout_ms)
        for opt in cfg.extra_options:
            key, _, value = opt.partition("=")
            self._command(f"(set-option :{key} {value})")
        for line in preamble or []:
            self._command(line)

    # -- low-level I/O ------------------------------------------------------

    def _read_loop(self):
        try:
            for line in self._proc.stdout:
                self._lines.put(line.rstrip("\n"))
        except ValueError:
            pass
        self._lines.put(None)

    def _send(self, text: str):
        if self._dead:
            raise SessionDead("solver session is no longer alive")
        if self._transcript_file:
            self._transcript_file.write(text + "\n")
            self._transcript_file.flush()
        try:
            self._proc.stdin.write(text + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            self._dead = True
            raise SessionDead(f"solver process ended: {e}") from e

    def _recv(self, timeout_s: float) -> str | None:
        try:
            line = self._lines.get(timeout=timeout_s)
        except queue.Empty:
            return None
        if line is None:
            self._dead = True
            raise SessionDead("solver process closed its output")
        return line

    def _command(self, text: str, timeout_s: float = 60.0) -> str:
        """Send one command and read its single response line."""
        self._send(text)
        line = self._recv(timeout_s)
        if line is None:
            self.kill()
            raise SessionDead(f"solver did not answer to: {text[:80]}")
        if line.startswith("(error"):
            raise ProtocolError(f"solver error for {text[:120]}: {line}")
        return line

    def _set_timeout(self, ms: int):
        ms = max(1, int(ms))
        if ms != self._current_timeout_ms:
            self._command(f"(set-option :timeout {ms})")
            self._current_timeout_ms = ms

    # -- public API ---------------------------------------------------------

    @property
    def alive(self) -> bool:
        return not self._dead

    def assert_term(self, t: Term):
        if t.sort != BOOL:
            raise TypeError(f"assert_term requires a Bool term, got {t.sort}")
        self._command(f"(assert {to_smt(t)})")

    def assert_raw(self, text: str):
        self._command(text)

    def declare_const(self, name: str, sort: Sort) -> Const:
        self._command(f"(declare-const {name} {sort_to_smt(sort)})")
        return Const(name, sort)

    def fresh(self, hint: str, sort: Sort) -> Const:
        self._fresh_counter += 1
        name = f"{_sanitize(hint)}!{self._fresh_counter}"
        return self.declare_const(name, sort)

    def push(self):
        self._command("(push 1)")
        self.depth += 1

    def pop(self):
        if self.depth == 0:
            raise StackUnderflow("pop on an empty assertion stack")
        self._command("(pop 1)")
        self.depth -= 1

    def check_sat(self, budget_ms: int | None = None) -> SatResult:
        budget = min(self.cfg.timeout_ms, budget_ms) if budget_ms else self.cfg.timeout_ms
        # only ratchet the solver-side timeout down at halvings; the read
        # deadline below enforces the precise budget either way
        if self._current_timeout_ms and budget < self._current_timeout_ms / 2:
            self._set_timeout(budget)
        started = time.monotonic()
        self._send("(check-sat)")
        # generous wall-clock backstop in case the solver ignores :timeout
        line = self._recv(budget / 1000.0 * 1.5 + 10.0)
        self.query_count += 1
        self.solver_time_s += time.monotonic() - started
        if line is None:
            self.kill()
            result = TIMED_OUT
        elif line == "sat":
            result = SAT
        elif line == "unsat":
            result = UNSAT
        elif line == "unknown":
            reason = self._command("(get-info :reason-unknown)")
            if any(w in reason for w in ("timeout", "canceled", "cancelled", "resource")):
                result = TIMED_OUT
            else:
                result = unknown(reason)
        else:
            raise ProtocolError(f"unexpected check-sat answer: {line}")
        self.check_results.append(result)
        return result

    def check_entailed(self, goal: Term, budget_ms: int | None = None) -> SatResult:
        """Unsat means `goal` is entailed by the current assertions. The
        assertion stack is left exactly as found."""
        if goal.sort != BOOL:
            raise TypeError("check_entailed requires a Bool goal")
        self.push()
        try:
            self.assert_term(not_(goal))
            return self.check_sat(budget_ms)
        finally:
            if not self._dead:
                self.pop()
            else:
                self.depth = max(0, self.depth - 1)

    def entails(self, goal: Term, budget_ms: int | None = None) -> bool:
        return self.check_entailed(goal, budget_ms).is_unsat

    def get_model(self) -> str:
        """Raw model text passthrough (no interpretation)."""
        self._send("(get-model)")
        lines = []
        deadline = time.monotonic() + 30.0
        depth = 0
        while True:
            line = self._recv(max(0.1, deadline - time.monotonic()))
            if line is None:
                break
            lines.append(line)
            depth += line.count("(") - line.count(")")
            if depth <= 0:
                break
        return "\n".join(lines)

    def interrupt(self):
        """Cooperative cancellation hook: kill the solver process."""
        self.kill()

    def kill(self):
        self._dead = True
        try:
            self._proc.kill()
        except OSError:
            pass

    def close(self):
        if not self._dead:
            try:
                self._send("(exit)")
            except SessionDead:
                pass
        try:
            self._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self._proc.kill()
        self._dead = True
        if self._transcript_file:
            self._transcript_file.close()
            self._transcript_file = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _sanitize(hint: str) -> str:
    out = "".join(c if c.isalnum() or c in "_.$" else "_" for c in hint)
    return out or "t"


def replay_transcript(path: str, solver_path: str | None = None, timeout_s: float = 300.0) -> list:
    """Feed a dumped transcript to the solver standalone and return the
    sequence of check-sat answers, for reproducibility checks."""
    solver = solver_path or find_default_solver()
    if solver is None:
        raise SolverStartError("no solver available for transcript replay")
    cmd = solver_command(solver)
    text = Path(path).read_text()
    proc = subprocess.run(
        cmd, input=text, capture_output=True, text=True, timeout=timeout_s
    )
    answers = []
    for line in proc.stdout.splitlines():
        line = line.strip()
        if line in ("sat", "unsat", "unknown"):
            answers.append(line)
    return answers
