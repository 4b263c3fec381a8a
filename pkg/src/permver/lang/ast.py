"""Abstract syntax for the mini verification language.

Node equality ignores source positions and type annotations, so structural
comparison works for round-trip tests. Nodes are plain mutable dataclasses;
the type checker fills in `ty` on expressions and the tree is treated as
immutable afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NO_POS = Pos(0, 0)


class TypeTag(Enum):
    INT = "Int"
    BOOL = "Bool"
    REF = "Ref"
    PERM = "Perm"

    def __str__(self) -> str:
        return self.value


# ---------------------------------------------------------------------------
# Expressions


@dataclass(eq=True)
class Expr:
    pos: Pos = field(compare=False, kw_only=True, default=NO_POS)
    ty: TypeTag | None = field(compare=False, kw_only=True, default=None, repr=False)


@dataclass(eq=True)
class IntLit(Expr):
    value: int = 0


@dataclass(eq=True)
class BoolLit(Expr):
    value: bool = False


@dataclass(eq=True)
class NullLit(Expr):
    pass


@dataclass(eq=True)
class PermLit(Expr):
    """Exact rational permission amount; `none` is 0/1 and `write` is 1/1."""

    num: int = 0
    den: int = 1
    spelling: str = field(default="", compare=False)

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)


@dataclass(eq=True)
class Var(Expr):
    name: str = ""


@dataclass(eq=True)
class FieldRead(Expr):
    recv: Expr = None
    field_name: str = ""


@dataclass(eq=True)
class Old(Expr):
    expr: Expr = None


@dataclass(eq=True)
class Unary(Expr):
    op: str = ""  # "-" | "!"
    operand: Expr = None


@dataclass(eq=True)
class Binary(Expr):
    op: str = ""  # + - * / < <= > >= == != && || ==>
    left: Expr = None
    right: Expr = None


# Raw parse-tree forms that the assertion normalizer consumes. They are
# rejected by the type checker when they survive in pure-expression position.


@dataclass(eq=True)
class AccAtom(Expr):
    """acc(e.f, p) or acc(P(args), p) before assertion normalization."""

    recv: Expr | None = None
    field_name: str = ""
    pred_name: str = ""
    args: list = field(default_factory=list)
    perm: Expr | None = None


@dataclass(eq=True)
class Ternary(Expr):
    cond: Expr = None
    then: Expr = None
    els: Expr = None


# ---------------------------------------------------------------------------
# Assertions


@dataclass(eq=True)
class Assertion:
    pos: Pos = field(compare=False, kw_only=True, default=NO_POS)


@dataclass(eq=True)
class APure(Assertion):
    expr: Expr = None


@dataclass(eq=True)
class AAcc(Assertion):
    recv: Expr = None
    field_name: str = ""
    perm: Expr | None = None  # None means full permission (write)


@dataclass(eq=True)
class APred(Assertion):
    name: str = ""
    args: list = field(default_factory=list)
    perm: Expr | None = None


@dataclass(eq=True)
class ASep(Assertion):
    left: Assertion = None
    right: Assertion = None


@dataclass(eq=True)
class AImplies(Assertion):
    guard: Expr = None
    body: Assertion = None


@dataclass(eq=True)
class ACond(Assertion):
    guard: Expr = None
    then: Assertion = None
    els: Assertion = None


# ---------------------------------------------------------------------------
# Statements


@dataclass(eq=True)
class Stmt:
    pos: Pos = field(compare=False, kw_only=True, default=NO_POS)


@dataclass(eq=True)
class SVarDecl(Stmt):
    name: str = ""
    ty: TypeTag = TypeTag.INT
    init: Expr | None = None


@dataclass(eq=True)
class SAssign(Stmt):
    target: str = ""
    expr: Expr = None


@dataclass(eq=True)
class SFieldWrite(Stmt):
    recv: Expr = None
    field_name: str = ""
    expr: Expr = None


@dataclass(eq=True)
class SNew(Stmt):
    target: str = ""
    fields: list = field(default_factory=list)


@dataclass(eq=True)
class SInhale(Stmt):
    assertion: Assertion = None


@dataclass(eq=True)
class SExhale(Stmt):
    assertion: Assertion = None


@dataclass(eq=True)
class SAssert(Stmt):
    assertion: Assertion = None


@dataclass(eq=True)
class SAssume(Stmt):
    expr: Expr = None


@dataclass(eq=True)
class SIf(Stmt):
    cond: Expr = None
    then: list = field(default_factory=list)
    els: list = field(default_factory=list)


@dataclass(eq=True)
class SWhile(Stmt):
    cond: Expr = None
    invariants: list = field(default_factory=list)
    body: list = field(default_factory=list)


@dataclass(eq=True)
class SCall(Stmt):
    targets: list = field(default_factory=list)
    method: str = ""
    args: list = field(default_factory=list)


@dataclass(eq=True)
class SFold(Stmt):
    pred: APred = None


@dataclass(eq=True)
class SUnfold(Stmt):
    pred: APred = None


# ---------------------------------------------------------------------------
# Declarations


@dataclass(eq=True)
class FieldDecl:
    name: str
    ty: TypeTag
    pos: Pos = field(compare=False, kw_only=True, default=NO_POS)


@dataclass(eq=True)
class PredicateDecl:
    name: str
    params: list  # list of (name, TypeTag)
    body: Assertion
    pos: Pos = field(compare=False, kw_only=True, default=NO_POS)


@dataclass(eq=True)
class MethodDecl:
    name: str
    params: list  # list of (name, TypeTag)
    returns: list  # list of (name, TypeTag)
    preconditions: list
    postconditions: list
    body: list
    pos: Pos = field(compare=False, kw_only=True, default=NO_POS)


@dataclass(eq=True)
class Program:
    fields: list = field(default_factory=list)
    predicates: list = field(default_factory=list)
    methods: list = field(default_factory=list)

    def field_decl(self, name: str) -> FieldDecl | None:
        for f in self.fields:
            if f.name == name:
                return f
        return None

    def predicate_decl(self, name: str) -> PredicateDecl | None:
        for p in self.predicates:
            if p.name == name:
                return p
        return None

    def method_decl(self, name: str) -> MethodDecl | None:
        for m in self.methods:
            if m.name == name:
                return m
        return None
