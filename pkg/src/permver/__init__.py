"""permver: a multi-backend automated verifier for a small
implicit-dynamic-frames language, with symbolic-execution and
verification-condition-generation backends over partial and total heaps."""

__version__ = "0.1.0"

from .algorithms import AlgorithmId, build_preamble, open_task_session, verify_program
from .lang import parse, pretty, typecheck, typecheck_strict
from .se import Deadline, EngineOptions, Verdict, VerificationOutcome
from .smt import SolverConfig
