"""Sorts and terms with SMT-LIB 2.6 rendering.

Terms are immutable and sort-correct by construction: the constructor
functions below check argument sorts and apply a small set of local
simplifications (constant folding, store/select collapsing, add-then-subtract
cancellation). Quantifiers always carry at least one instantiation pattern.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


# ---------------------------------------------------------------------------
# Sorts


@dataclass(frozen=True)
class Sort:
    kind: str
    params: tuple = ()

    def __repr__(self) -> str:
        if self.params:
            return f"{self.kind}({', '.join(map(repr, self.params))})"
        return self.kind


INT = Sort("Int")
BOOL = Sort("Bool")
REAL = Sort("Real")
REF = Sort("Ref")
SNAP = Sort("Snap")
FIELDID = Sort("Field")


def mask_arr(index: Sort) -> Sort:
    """Total map from `index` to permission amounts (Real)."""
    return Sort("Array", (index, REAL))


def heap_arr(index: Sort, value: Sort) -> Sort:
    """Total map from `index` to `value`."""
    return Sort("Array", (index, value))


def pair_sort(a: Sort, b: Sort) -> Sort:
    return Sort("Pair", (a, b))


def sort_to_smt(s: Sort) -> str:
    if s.kind == "Array":
        return f"(Array {sort_to_smt(s.params[0])} {sort_to_smt(s.params[1])})"
    if s.kind == "Pair":
        return f"(Pair {sort_to_smt(s.params[0])} {sort_to_smt(s.params[1])})"
    return s.kind


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Term:
    @property
    def sort(self) -> Sort:
        raise NotImplementedError


@dataclass(frozen=True)
class IntLit(Term):
    value: int

    @property
    def sort(self) -> Sort:
        return INT


@dataclass(frozen=True)
class RealLit(Term):
    value: Fraction

    @property
    def sort(self) -> Sort:
        return REAL


@dataclass(frozen=True)
class BoolLit(Term):
    value: bool

    @property
    def sort(self) -> Sort:
        return BOOL


@dataclass(frozen=True)
class Const(Term):
    name: str
    sort_: Sort

    @property
    def sort(self) -> Sort:
        return self.sort_


@dataclass(frozen=True)
class App(Term):
    """Application of an interpreted or uninterpreted operator."""

    op: str
    args: tuple
    sort_: Sort

    @property
    def sort(self) -> Sort:
        return self.sort_


@dataclass(frozen=True)
class Quant(Term):
    """Universal quantifier with explicit instantiation patterns."""

    bound: tuple  # tuple of (name, Sort)
    body: Term
    patterns: tuple  # tuple of pattern groups, each a tuple of Terms

    def __post_init__(self):
        if not self.patterns or any(len(g) == 0 for g in self.patterns):
            raise ValueError("quantifier requires at least one instantiation pattern")

    @property
    def sort(self) -> Sort:
        return BOOL


@dataclass(frozen=True)
class Let(Term):
    bindings: tuple  # tuple of (name, Term)
    body: Term

    @property
    def sort(self) -> Sort:
        return self.body.sort


TRUE = BoolLit(True)
FALSE = BoolLit(False)
R_ZERO = RealLit(Fraction(0))
R_ONE = RealLit(Fraction(1))

NULL = Const("nullref", REF)


def real(v) -> RealLit:
    return RealLit(Fraction(v))


def bound_var(name: str, sort: Sort) -> Const:
    return Const(name, sort)


# ---------------------------------------------------------------------------
# Constructors with local simplification

_NUM = (INT, REAL)


def _require(cond: bool, msg: str):
    if not cond:
        raise TypeError(msg)


def _lit_value(t: Term):
    if isinstance(t, (IntLit, RealLit)):
        return t.value
    return None


def _mk_num(sort: Sort, v) -> Term:
    return IntLit(int(v)) if sort == INT else RealLit(Fraction(v))


def add(a: Term, b: Term) -> Term:
    _require(a.sort == b.sort and a.sort in _NUM, f"add: {a.sort} vs {b.sort}")
    va, vb = _lit_value(a), _lit_value(b)
    if va is not None and vb is not None:
        return _mk_num(a.sort, va + vb)
    if va == 0:
        return b
    if vb == 0:
        return a
    return App("+", (a, b), a.sort)


def sub(a: Term, b: Term) -> Term:
    _require(a.sort == b.sort and a.sort in _NUM, f"sub: {a.sort} vs {b.sort}")
    va, vb = _lit_value(a), _lit_value(b)
    if va is not None and vb is not None:
        return _mk_num(a.sort, va - vb)
    if vb == 0:
        return a
    if a == b:
        return _mk_num(a.sort, 0)
    # (x + q) - q  ==>  x
    if isinstance(a, App) and a.op == "+":
        if a.args[1] == b:
            return a.args[0]
        if a.args[0] == b:
            return a.args[1]
    return App("-", (a, b), a.sort)


def neg(a: Term) -> Term:
    _require(a.sort in _NUM, f"neg: {a.sort}")
    v = _lit_value(a)
    if v is not None:
        return _mk_num(a.sort, -v)
    return App("-", (a,), a.sort)


def mul(a: Term, b: Term) -> Term:
    _require(a.sort == b.sort and a.sort in _NUM, f"mul: {a.sort} vs {b.sort}")
    va, vb = _lit_value(a), _lit_value(b)
    if va is not None and vb is not None:
        return _mk_num(a.sort, va * vb)
    if va == 1:
        return b
    if vb == 1:
        return a
    if va == 0 or vb == 0:
        return _mk_num(a.sort, 0)
    return App("*", (a, b), a.sort)


def idiv(a: Term, b: Term) -> Term:
    _require(a.sort == INT and b.sort == INT, "idiv: Int operands required")
    va, vb = _lit_value(a), _lit_value(b)
    if va is not None and vb is not None and vb != 0:
        q = abs(va) // abs(vb)
        if (va < 0) != (vb < 0) and q * abs(vb) != abs(va):
            q += 1
        return IntLit(q if (va < 0) == (vb < 0) else -q)
    return App("div", (a, b), INT)


def _cmp(op: str, a: Term, b: Term, py) -> Term:
    _require(a.sort == b.sort and a.sort in _NUM, f"{op}: {a.sort} vs {b.sort}")
    va, vb = _lit_value(a), _lit_value(b)
    if va is not None and vb is not None:
        return BoolLit(py(va, vb))
    return App(op, (a, b), BOOL)


def lt(a, b) -> Term:
    return _cmp("<", a, b, lambda x, y: x < y)


def le(a, b) -> Term:
    return _cmp("<=", a, b, lambda x, y: x <= y)


def gt(a, b) -> Term:
    return _cmp(">", a, b, lambda x, y: x > y)


def ge(a, b) -> Term:
    return _cmp(">=", a, b, lambda x, y: x >= y)


def eq(a: Term, b: Term) -> Term:
    _require(a.sort == b.sort, f"eq: {a.sort} vs {b.sort}")
    va, vb = _lit_value(a), _lit_value(b)
    if va is not None and vb is not None:
        return BoolLit(va == vb)
    if isinstance(a, BoolLit) and isinstance(b, BoolLit):
        return BoolLit(a.value == b.value)
    return App("=", (a, b), BOOL)


def ne(a: Term, b: Term) -> Term:
    return not_(eq(a, b))


def not_(a: Term) -> Term:
    _require(a.sort == BOOL, f"not: {a.sort}")
    if isinstance(a, BoolLit):
        return BoolLit(not a.value)
    if isinstance(a, App) and a.op == "not":
        return a.args[0]
    return App("not", (a,), BOOL)


def and_(*parts: Term) -> Term:
    flat: list[Term] = []
    for p in parts:
        _require(p.sort == BOOL, f"and: {p.sort}")
        if isinstance(p, BoolLit):
            if not p.value:
                return FALSE
            continue
        if isinstance(p, App) and p.op == "and":
            flat.extend(p.args)
        else:
            flat.append(p)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return App("and", tuple(flat), BOOL)


def or_(*parts: Term) -> Term:
    flat: list[Term] = []
    for p in parts:
        _require(p.sort == BOOL, f"or: {p.sort}")
        if isinstance(p, BoolLit):
            if p.value:
                return TRUE
            continue
        if isinstance(p, App) and p.op == "or":
            flat.extend(p.args)
        else:
            flat.append(p)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return App("or", tuple(flat), BOOL)


def implies(a: Term, b: Term) -> Term:
    _require(a.sort == BOOL and b.sort == BOOL, "implies: Bool operands required")
    if isinstance(a, BoolLit):
        return b if a.value else TRUE
    if isinstance(b, BoolLit):
        return TRUE if b.value else not_(a)
    return App("=>", (a, b), BOOL)


def ite(c: Term, t: Term, e: Term) -> Term:
    _require(c.sort == BOOL, f"ite condition: {c.sort}")
    _require(t.sort == e.sort, f"ite branches: {t.sort} vs {e.sort}")
    if isinstance(c, BoolLit):
        return t if c.value else e
    if t == e:
        return t
    return App("ite", (c, t, e), t.sort)


def min_term(a: Term, b: Term) -> Term:
    if a == b:
        return a
    va, vb = _lit_value(a), _lit_value(b)
    if va is not None and vb is not None:
        return a if va <= vb else b
    return ite(le(a, b), a, b)


def select(arr: Term, idx: Term) -> Term:
    _require(arr.sort.kind == "Array", f"select on {arr.sort}")
    _require(arr.sort.params[0] == idx.sort, f"select index: {idx.sort}")
    if isinstance(arr, App) and arr.op == "store" and arr.args[1] == idx:
        return arr.args[2]
    if isinstance(arr, App) and arr.op == "const-array":
        return arr.args[0]
    return App("select", (arr, idx), arr.sort.params[1])


def store(arr: Term, idx: Term, val: Term) -> Term:
    _require(arr.sort.kind == "Array", f"store on {arr.sort}")
    _require(arr.sort.params[0] == idx.sort, f"store index: {idx.sort}")
    _require(arr.sort.params[1] == val.sort, f"store value: {val.sort}")
    # store-after-store at the same index
    if isinstance(arr, App) and arr.op == "store" and arr.args[1] == idx:
        return store(arr.args[0], idx, val)
    # storing back what is already there (covers val == select(arr, idx)
    # syntactically as well as folded constant-array contents)
    if select(arr, idx) == val:
        return arr
    return App("store", (arr, idx, val), arr.sort)


def const_array(index: Sort, val: Term) -> Term:
    return App("const-array", (val,), heap_arr(index, val.sort))


def ufapp(name: str, args: Sequence[Term], result: Sort) -> Term:
    return App(f"uf:{name}", tuple(args), result)


def distinct(args: Sequence[Term]) -> Term:
    args = tuple(args)
    _require(len(args) >= 2, "distinct needs two or more terms")
    _require(all(a.sort == args[0].sort for a in args), "distinct: mixed sorts")
    return App("distinct", args, BOOL)


def forall(bound: Sequence[tuple], body: Term, patterns: Sequence[Sequence[Term]]) -> Term:
    _require(body.sort == BOOL, "forall body must be Bool")
    return Quant(tuple(bound), body, tuple(tuple(g) for g in patterns))


def let(bindings: Sequence[tuple], body: Term) -> Term:
    if not bindings:
        return body
    return Let(tuple(bindings), body)


# ---------------------------------------------------------------------------
# Rendering


def _render_frac(v: Fraction) -> str:
    if v < 0:
        return f"(- {_render_frac(-v)})"
    if v.denominator == 1:
        return f"{v.numerator}.0"
    return f"(/ {v.numerator}.0 {v.denominator}.0)"


def to_smt(t: Term) -> str:
    if isinstance(t, IntLit):
        return str(t.value) if t.value >= 0 else f"(- {-t.value})"
    if isinstance(t, RealLit):
        return _render_frac(t.value)
    if isinstance(t, BoolLit):
        return "true" if t.value else "false"
    if isinstance(t, Const):
        return t.name
    if isinstance(t, App):
        if t.op == "const-array":
            return f"((as const {sort_to_smt(t.sort_)}) {to_smt(t.args[0])})"
        op = t.op[3:] if t.op.startswith("uf:") else t.op
        if not t.args:
            return op
        return f"({op} {' '.join(to_smt(a) for a in t.args)})"
    if isinstance(t, Quant):
        vars_s = " ".join(f"({n} {sort_to_smt(s)})" for n, s in t.bound)
        pats = " ".join(f":pattern ({' '.join(to_smt(p) for p in grp)})" for grp in t.patterns)
        return f"(forall ({vars_s}) (! {to_smt(t.body)} {pats}))"
    if isinstance(t, Let):
        binds = " ".join(f"({n} {to_smt(v)})" for n, v in t.bindings)
        return f"(let ({binds}) {to_smt(t.body)})"
    raise TypeError(f"cannot render {t!r}")


def free_consts(t: Term, acc: set | None = None) -> set:
    """All Const nodes appearing in `t` (bound names are not tracked; callers
    only use this on quantifier-free terms)."""
    if acc is None:
        acc = set()
    if isinstance(t, Const):
        acc.add(t)
    elif isinstance(t, App):
        for a in t.args:
            free_consts(a, acc)
    elif isinstance(t, (Quant, Let)):
        free_consts(t.body, acc)
    return acc
