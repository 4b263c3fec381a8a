from .engine import Engine, EngineOptions
from .partial import CombiningStrategy, PartialStrategy
from .state import (
    Deadline,
    Obligation,
    ObligationKind,
    SState,
    TaskCancelled,
    TaskTimeout,
    Verdict,
    VerificationOutcome,
)
from .total import TotalStrategy
