"""Shared verification-state types: obligations, outcomes, symbolic state,
snapshot trees, and task deadlines."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from enum import Enum

from ..lang.ast import (
    AAcc,
    ACond,
    AImplies,
    APred,
    APure,
    ASep,
    Assertion,
    Pos,
    Program,
    TypeTag,
)
from ..smt import BOOL, INT, REAL, REF, SNAP, Sort, Term


class ObligationKind(Enum):
    PERMISSION = "permission"
    ASSERT = "assert"
    PRECONDITION = "precondition"
    POSTCONDITION = "postcondition"
    INVARIANT = "invariant"
    WELL_DEFINEDNESS = "well-definedness"


@dataclass(frozen=True)
class Obligation:
    kind: ObligationKind
    pos: Pos
    description: str

    def __str__(self) -> str:
        return f"{self.pos}: {self.kind.value}: {self.description}"


class Verdict(Enum):
    VERIFIED = "verified"
    ERRORS = "errors"
    TIMEOUT = "timeout"


@dataclass
class VerificationOutcome:
    method: str
    verdict: Verdict
    errors: list  # of Obligation; non-empty iff verdict is ERRORS
    wall_time_s: float = 0.0
    query_count: int = 0

    @property
    def verified(self) -> bool:
        return self.verdict is Verdict.VERIFIED


class TaskTimeout(Exception):
    pass


class TaskCancelled(Exception):
    pass


class Deadline:
    """Wall-clock budget for one verification task, checked cooperatively
    between statements and between obligations."""

    def __init__(self, timeout_ms: int | None, cancel_event=None):
        self._end = time.monotonic() + timeout_ms / 1000.0 if timeout_ms else None
        self._cancel = cancel_event

    def check(self):
        if self._cancel is not None and self._cancel.is_set():
            raise TaskCancelled()
        if self._end is not None and time.monotonic() > self._end:
            raise TaskTimeout()

    def remaining_ms(self) -> int | None:
        if self._end is None:
            return None
        return max(1, int((self._end - time.monotonic()) * 1000))


def sort_of(tag: TypeTag) -> Sort:
    return {
        TypeTag.INT: INT,
        TypeTag.BOOL: BOOL,
        TypeTag.REF: REF,
        TypeTag.PERM: REAL,
    }[tag]


# ---------------------------------------------------------------------------
# Snapshot trees
#
# A snapshot mirrors an assertion's structure: one leaf per accessibility
# atom, a unit at pure positions, pairs at separating conjunctions (and at
# conditionals, whose two branches each contribute a subtree). OPAQUE stands
# for a subtree with unknown values; partial-heap strategies expand it lazily
# into fresh symbols, which keeps snapshots finite for recursive predicates.


@dataclass(frozen=True)
class Snap:
    pass


@dataclass(frozen=True)
class SnapUnit(Snap):
    pass


@dataclass(frozen=True)
class SnapLeaf(Snap):
    value: Term


@dataclass(frozen=True)
class SnapPair(Snap):
    left: Snap
    right: Snap


@dataclass(frozen=True)
class SnapOpaque(Snap):
    pass


UNIT = SnapUnit()
OPAQUE = SnapOpaque()


def snap_split(s: Snap) -> tuple:
    if isinstance(s, SnapPair):
        return s.left, s.right
    if isinstance(s, SnapOpaque):
        return OPAQUE, OPAQUE
    raise TypeError(f"cannot split snapshot {s!r}")


def snap_leaf_value(s: Snap) -> Term | None:
    """The value at a leaf position, or None when unknown."""
    if isinstance(s, SnapLeaf):
        return s.value
    if isinstance(s, SnapOpaque):
        return None
    raise TypeError(f"expected snapshot leaf, got {s!r}")


def snap_leaves(s: Snap) -> list:
    if isinstance(s, SnapLeaf):
        return [s.value]
    if isinstance(s, SnapPair):
        return snap_leaves(s.left) + snap_leaves(s.right)
    return []


# Shape templates: TLeaf carries the leaf's sort (the field's sort for field
# atoms, Snap for nested predicate instances).


@dataclass(frozen=True)
class TUnit:
    pass


@dataclass(frozen=True)
class TLeaf:
    sort: Sort


@dataclass(frozen=True)
class TPair:
    left: object
    right: object


def template_of(a: Assertion, program: Program):
    if isinstance(a, APure):
        return TUnit()
    if isinstance(a, AAcc):
        fd = program.field_decl(a.field_name)
        return TLeaf(sort_of(fd.ty))
    if isinstance(a, APred):
        return TLeaf(SNAP)
    if isinstance(a, ASep):
        return TPair(template_of(a.left, program), template_of(a.right, program))
    if isinstance(a, AImplies):
        return template_of(a.body, program)
    if isinstance(a, ACond):
        return TPair(template_of(a.then, program), template_of(a.els, program))
    raise TypeError(f"unhandled assertion {a!r}")


def template_leaf_sorts(tpl) -> list:
    if isinstance(tpl, TLeaf):
        return [tpl.sort]
    if isinstance(tpl, TPair):
        return template_leaf_sorts(tpl.left) + template_leaf_sorts(tpl.right)
    return []


def pred_leaf_sorts(program: Program, pred_name: str) -> list:
    decl = program.predicate_decl(pred_name)
    return template_leaf_sorts(template_of(decl.body, program))


# ---------------------------------------------------------------------------
# Symbolic state


@dataclass(frozen=True)
class OldState:
    store: tuple  # ((name, Term), ...)
    heap: object

    def store_dict(self) -> dict:
        return dict(self.store)


@dataclass(frozen=True)
class SState:
    """Store + path conditions + strategy-owned heap state. Values are
    immutable; execution threads updated copies along each path."""

    store: tuple  # ((name, Term), ...)
    heap: object
    pcs: tuple = ()
    nonnull: frozenset = frozenset()
    old: OldState | None = None

    def store_dict(self) -> dict:
        return dict(self.store)

    def lookup(self, name: str) -> Term:
        for n, t in self.store:
            if n == name:
                return t
        raise KeyError(name)

    def with_var(self, name: str, term: Term) -> "SState":
        items = [(n, t) for n, t in self.store if n != name]
        items.append((name, term))
        return replace(self, store=tuple(items))

    def with_heap(self, heap) -> "SState":
        return replace(self, heap=heap)

    def with_pc(self, term: Term) -> "SState":
        return replace(self, pcs=self.pcs + (term,))

    def with_nonnull(self, term: Term) -> "SState":
        return replace(self, nonnull=self.nonnull | {term})
