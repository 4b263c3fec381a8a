"""Name resolution and type checking.

Checking is deterministic and total: the same input always yields the same
accept/reject verdict and diagnostic list. On success every expression node
carries a TypeTag, integer divisions of literals in permission positions have
been rewritten to exact rational literals, and all structural invariants of
the AST hold (checkable again via `validate_typed`).
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    AAcc,
    ACond,
    AccAtom,
    AImplies,
    APred,
    APure,
    ASep,
    Assertion,
    Binary,
    BoolLit,
    Expr,
    FieldRead,
    IntLit,
    MethodDecl,
    NullLit,
    Old,
    PermLit,
    Pos,
    PredicateDecl,
    Program,
    SAssert,
    SAssign,
    SAssume,
    SCall,
    SExhale,
    SFieldWrite,
    SFold,
    SIf,
    SInhale,
    SNew,
    SUnfold,
    SVarDecl,
    SWhile,
    Stmt,
    Ternary,
    TypeTag,
    Unary,
    Var,
)


@dataclass(frozen=True)
class Diag:
    pos: Pos
    message: str

    def __str__(self) -> str:
        return f"{self.pos}: {self.message}"


class TypecheckError(Exception):
    def __init__(self, diags):
        super().__init__("; ".join(map(str, diags)))
        self.diags = list(diags)


class _Scope:
    def __init__(self):
        self.vars: dict = {}  # name -> (TypeTag, kind) with kind in param/return/local

    def declare(self, name: str, ty: TypeTag, kind: str) -> bool:
        if name in self.vars:
            return False
        self.vars[name] = (ty, kind)
        return True

    def lookup(self, name: str):
        return self.vars.get(name)


class Checker:
    def __init__(self, program: Program):
        self.program = program
        self.diags: list[Diag] = []

    def error(self, pos: Pos, message: str):
        self.diags.append(Diag(pos, message))

    # -- entry ----------------------------------------------------------------

    def run(self) -> list:
        self._check_unique_names()
        for f in self.program.fields:
            if f.ty not in (TypeTag.INT, TypeTag.BOOL, TypeTag.REF, TypeTag.PERM):
                self.error(f.pos, f"field {f.name} has unsupported type")
        for p in self.program.predicates:
            self._check_predicate(p)
        for m in self.program.methods:
            self._check_method(m)
        return self.diags

    def _check_unique_names(self):
        for kind, decls in (
            ("field", self.program.fields),
            ("predicate", self.program.predicates),
            ("method", self.program.methods),
        ):
            seen = set()
            for d in decls:
                if d.name in seen:
                    self.error(d.pos, f"duplicate {kind} name {d.name!r}")
                seen.add(d.name)

    def _check_predicate(self, p: PredicateDecl):
        scope = _Scope()
        for name, ty in p.params:
            if not scope.declare(name, ty, "param"):
                self.error(p.pos, f"duplicate parameter {name!r} in predicate {p.name}")
        self.check_assertion(p.body, scope, allow_old=False)

    def _check_method(self, m: MethodDecl):
        scope = _Scope()
        for name, ty in m.params:
            if not scope.declare(name, ty, "param"):
                self.error(m.pos, f"duplicate parameter {name!r} in method {m.name}")
        for name, ty in m.returns:
            if not scope.declare(name, ty, "return"):
                self.error(m.pos, f"duplicate return {name!r} in method {m.name}")
        for pre in m.preconditions:
            self.check_assertion(pre, scope, allow_old=False)
        for post in m.postconditions:
            self.check_assertion(post, scope, allow_old=True)
        self.check_block(m.body, scope)

    # -- statements -------------------------------------------------------------

    def check_block(self, stmts: list, scope: _Scope, top_level: bool = True):
        for s in stmts:
            self.check_stmt(s, scope, top_level)

    def check_stmt(self, s: Stmt, scope: _Scope, top_level: bool = True):
        if isinstance(s, SVarDecl):
            if not top_level:
                self.error(s.pos, "variable declarations must be at the top level of a method body")
            if not scope.declare(s.name, s.ty, "local"):
                self.error(s.pos, f"name {s.name!r} is already declared")
            if s.init is not None:
                s.init = self.check_expr(s.init, scope, expected=s.ty)
        elif isinstance(s, SAssign):
            entry = scope.lookup(s.target)
            if entry is None:
                self.error(s.pos, f"unknown variable {s.target!r}")
                return
            ty, kind = entry
            if kind == "param":
                self.error(s.pos, f"parameter {s.target!r} is not assignable")
            s.expr = self.check_expr(s.expr, scope, expected=ty)
        elif isinstance(s, SFieldWrite):
            s.recv = self.check_expr(s.recv, scope)
            if s.recv.ty not in (None, TypeTag.REF):
                self.error(s.recv.pos, "receiver must be Ref")
            fd = self.program.field_decl(s.field_name)
            if fd is None:
                self.error(s.pos, f"unknown field {s.field_name!r}")
                return
            s.expr = self.check_expr(s.expr, scope, expected=fd.ty)
        elif isinstance(s, SNew):
            entry = scope.lookup(s.target)
            if entry is None:
                self.error(s.pos, f"unknown variable {s.target!r}")
            else:
                ty, kind = entry
                if ty != TypeTag.REF:
                    self.error(s.pos, "new target must be Ref")
                if kind == "param":
                    self.error(s.pos, f"parameter {s.target!r} is not assignable")
            for f in s.fields:
                if self.program.field_decl(f) is None:
                    self.error(s.pos, f"unknown field {f!r}")
        elif isinstance(s, (SInhale, SExhale, SAssert)):
            self.check_assertion(s.assertion, scope, allow_old=False)
        elif isinstance(s, SAssume):
            s.expr = self.check_expr(s.expr, scope, expected=TypeTag.BOOL)
            if _contains_resource(s.expr):
                self.error(s.pos, "assume requires pure expression")
        elif isinstance(s, SIf):
            s.cond = self.check_expr(s.cond, scope, expected=TypeTag.BOOL)
            self.check_block(s.then, scope, top_level=False)
            self.check_block(s.els, scope, top_level=False)
        elif isinstance(s, SWhile):
            s.cond = self.check_expr(s.cond, scope, expected=TypeTag.BOOL)
            for inv in s.invariants:
                self.check_assertion(inv, scope, allow_old=False)
            self.check_block(s.body, scope, top_level=False)
        elif isinstance(s, SCall):
            self._check_call(s, scope)
        elif isinstance(s, (SFold, SUnfold)):
            self.check_assertion(s.pred, scope, allow_old=False)
        else:
            raise AssertionError(f"unhandled statement {s!r}")

    def _check_call(self, s: SCall, scope: _Scope):
        callee = self.program.method_decl(s.method)
        if callee is None:
            self.error(s.pos, f"unknown method {s.method!r}")
            return
        if len(s.args) != len(callee.params):
            self.error(s.pos, f"method {s.method} expects {len(callee.params)} arguments")
            return
        s.args = [
            self.check_expr(a, scope, expected=pty)
            for a, (_, pty) in zip(s.args, callee.params)
        ]
        if len(s.targets) != len(callee.returns):
            self.error(s.pos, f"method {s.method} returns {len(callee.returns)} values")
            return
        if len(set(s.targets)) != len(s.targets):
            self.error(s.pos, "call targets must be distinct")
        for tname, (_, rty) in zip(s.targets, callee.returns):
            entry = scope.lookup(tname)
            if entry is None:
                self.error(s.pos, f"unknown variable {tname!r}")
                continue
            ty, kind = entry
            if kind == "param":
                self.error(s.pos, f"parameter {tname!r} is not assignable")
            if ty != rty:
                self.error(s.pos, f"call target {tname!r} has type {ty}, expected {rty}")

    # -- assertions ---------------------------------------------------------------

    def check_assertion(self, a: Assertion, scope: _Scope, allow_old: bool):
        if isinstance(a, APure):
            a.expr = self.check_expr(a.expr, scope, expected=TypeTag.BOOL, allow_old=allow_old)
            if _contains_resource(a.expr):
                self.error(a.pos, "resource assertion not allowed in this position")
        elif isinstance(a, AAcc):
            a.recv = self.check_expr(a.recv, scope, allow_old=allow_old)
            if a.recv.ty not in (None, TypeTag.REF):
                self.error(a.recv.pos, "receiver must be Ref")
            if self.program.field_decl(a.field_name) is None:
                self.error(a.pos, f"unknown field {a.field_name!r}")
            if a.perm is not None:
                a.perm = self.check_expr(a.perm, scope, expected=TypeTag.PERM, allow_old=allow_old)
        elif isinstance(a, APred):
            decl = self.program.predicate_decl(a.name)
            if decl is None:
                self.error(a.pos, f"unknown predicate {a.name!r}")
            elif len(a.args) != len(decl.params):
                self.error(a.pos, f"predicate {a.name} expects {len(decl.params)} arguments")
            else:
                a.args = [
                    self.check_expr(arg, scope, expected=pty, allow_old=allow_old)
                    for arg, (_, pty) in zip(a.args, decl.params)
                ]
            if a.perm is not None:
                a.perm = self.check_expr(a.perm, scope, expected=TypeTag.PERM, allow_old=allow_old)
        elif isinstance(a, ASep):
            self.check_assertion(a.left, scope, allow_old)
            self.check_assertion(a.right, scope, allow_old)
        elif isinstance(a, AImplies):
            a.guard = self.check_expr(a.guard, scope, expected=TypeTag.BOOL, allow_old=allow_old)
            if _contains_resource(a.guard):
                self.error(a.pos, "guards must be pure")
            self.check_assertion(a.body, scope, allow_old)
        elif isinstance(a, ACond):
            a.guard = self.check_expr(a.guard, scope, expected=TypeTag.BOOL, allow_old=allow_old)
            if _contains_resource(a.guard):
                self.error(a.pos, "guards must be pure")
            self.check_assertion(a.then, scope, allow_old)
            self.check_assertion(a.els, scope, allow_old)
        else:
            raise AssertionError(f"unhandled assertion {a!r}")

    # -- expressions -----------------------------------------------------------------

    def check_expr(self, e: Expr, scope: _Scope, expected: TypeTag | None = None,
                   allow_old: bool = False) -> Expr:
        e = self._infer(e, scope, expected, allow_old)
        if expected is not None and e.ty is not None and e.ty != expected:
            self.error(e.pos, f"expected {expected}, found {e.ty}")
        return e

    def _infer(self, e: Expr, scope: _Scope, expected: TypeTag | None, allow_old: bool) -> Expr:
        if isinstance(e, IntLit):
            if expected == TypeTag.PERM and e.value in (0, 1):
                lit = PermLit(e.value, 1, "none" if e.value == 0 else "write", pos=e.pos)
                lit.ty = TypeTag.PERM
                return lit
            e.ty = TypeTag.INT
        elif isinstance(e, BoolLit):
            e.ty = TypeTag.BOOL
        elif isinstance(e, NullLit):
            e.ty = TypeTag.REF
        elif isinstance(e, PermLit):
            if e.den <= 0:
                self.error(e.pos, "permission denominator must be positive")
            e.ty = TypeTag.PERM
        elif isinstance(e, Var):
            entry = scope.lookup(e.name)
            if entry is None:
                self.error(e.pos, f"unknown name {e.name!r}")
            else:
                e.ty = entry[0]
        elif isinstance(e, FieldRead):
            e.recv = self.check_expr(e.recv, scope, allow_old=allow_old)
            if e.recv.ty not in (None, TypeTag.REF):
                self.error(e.recv.pos, "receiver must be Ref")
            fd = self.program.field_decl(e.field_name)
            if fd is None:
                self.error(e.pos, f"unknown field {e.field_name!r}")
            else:
                e.ty = fd.ty
        elif isinstance(e, Old):
            if not allow_old:
                self.error(e.pos, "old is only allowed in postconditions")
            e.expr = self.check_expr(e.expr, scope, expected=expected, allow_old=allow_old)
            e.ty = e.expr.ty
        elif isinstance(e, Unary):
            if e.op == "-":
                e.operand = self.check_expr(e.operand, scope, expected=TypeTag.INT, allow_old=allow_old)
                e.ty = TypeTag.INT
            else:
                e.operand = self.check_expr(e.operand, scope, expected=TypeTag.BOOL, allow_old=allow_old)
                e.ty = TypeTag.BOOL
        elif isinstance(e, Binary):
            return self._infer_binary(e, scope, expected, allow_old)
        elif isinstance(e, (AccAtom, Ternary)):
            self.error(e.pos, "resource assertion not allowed in pure expression")
            e.ty = TypeTag.BOOL
        else:
            raise AssertionError(f"unhandled expression {e!r}")
        return e

    def _infer_binary(self, e: Binary, scope: _Scope, expected: TypeTag | None,
                      allow_old: bool) -> Expr:
        op = e.op
        if op == "/" and expected == TypeTag.PERM and isinstance(e.left, IntLit) \
                and isinstance(e.right, IntLit):
            if e.right.value <= 0:
                self.error(e.pos, "permission denominator must be positive")
                den = 1
            else:
                den = e.right.value
            lit = PermLit(e.left.value, den, "", pos=e.pos)
            lit.ty = TypeTag.PERM
            return lit
        if op in ("&&", "||", "==>"):
            e.left = self.check_expr(e.left, scope, expected=TypeTag.BOOL, allow_old=allow_old)
            e.right = self.check_expr(e.right, scope, expected=TypeTag.BOOL, allow_old=allow_old)
            e.ty = TypeTag.BOOL
        elif op in ("==", "!="):
            e.left = self.check_expr(e.left, scope, allow_old=allow_old)
            e.right = self.check_expr(e.right, scope, expected=e.left.ty, allow_old=allow_old)
            e.ty = TypeTag.BOOL
        elif op in ("<", "<=", ">", ">="):
            e.left = self.check_expr(e.left, scope, allow_old=allow_old)
            if e.left.ty == TypeTag.PERM:
                e.right = self.check_expr(e.right, scope, expected=TypeTag.PERM, allow_old=allow_old)
            else:
                if e.left.ty not in (None, TypeTag.INT):
                    self.error(e.left.pos, "comparison requires Int or Perm operands")
                e.right = self.check_expr(e.right, scope, expected=TypeTag.INT, allow_old=allow_old)
            e.ty = TypeTag.BOOL
        elif op in ("+", "-"):
            e.left = self.check_expr(e.left, scope, expected=expected, allow_old=allow_old)
            lty = e.left.ty if e.left.ty in (TypeTag.INT, TypeTag.PERM) else TypeTag.INT
            if e.left.ty not in (None, TypeTag.INT, TypeTag.PERM):
                self.error(e.left.pos, f"operator {op} requires Int or Perm operands")
            e.right = self.check_expr(e.right, scope, expected=lty, allow_old=allow_old)
            e.ty = lty
        elif op == "*":
            e.left = self.check_expr(e.left, scope, allow_old=allow_old)
            e.right = self.check_expr(e.right, scope, allow_old=allow_old)
            tys = (e.left.ty, e.right.ty)
            if TypeTag.PERM in tys:
                other = tys[0] if tys[1] == TypeTag.PERM else tys[1]
                if other not in (None, TypeTag.INT, TypeTag.PERM):
                    self.error(e.pos, "permission scalar must be Int")
                e.ty = TypeTag.PERM
            else:
                for side in (e.left, e.right):
                    if side.ty not in (None, TypeTag.INT):
                        self.error(side.pos, "operator * requires Int operands")
                e.ty = TypeTag.INT
        elif op == "/":
            e.left = self.check_expr(e.left, scope, expected=TypeTag.INT, allow_old=allow_old)
            e.right = self.check_expr(e.right, scope, expected=TypeTag.INT, allow_old=allow_old)
            e.ty = TypeTag.INT
        else:
            raise AssertionError(f"unhandled operator {op!r}")
        return e


def _contains_resource(e: Expr) -> bool:
    if isinstance(e, (AccAtom, Ternary)):
        return True
    if isinstance(e, Unary):
        return _contains_resource(e.operand)
    if isinstance(e, Binary):
        return _contains_resource(e.left) or _contains_resource(e.right)
    if isinstance(e, FieldRead):
        return _contains_resource(e.recv)
    if isinstance(e, Old):
        return _contains_resource(e.expr)
    return False


def typecheck(program: Program) -> list:
    """Check and annotate the program in place; returns diagnostics."""
    return Checker(program).run()


def typecheck_strict(program: Program) -> Program:
    """Raise TypecheckError unless the program is well-typed."""
    diags = typecheck(program)
    if diags:
        raise TypecheckError(diags)
    return program


def validate_typed(program: Program) -> bool:
    """Post-typecheck validator walk: every expression carries a type."""

    def expr_ok(e: Expr) -> bool:
        if e is None or e.ty is None or isinstance(e, (AccAtom, Ternary)):
            return False
        kids = []
        if isinstance(e, FieldRead):
            kids = [e.recv]
        elif isinstance(e, Old):
            kids = [e.expr]
        elif isinstance(e, Unary):
            kids = [e.operand]
        elif isinstance(e, Binary):
            kids = [e.left, e.right]
        return all(expr_ok(k) for k in kids)

    def assertion_ok(a: Assertion) -> bool:
        if isinstance(a, APure):
            return expr_ok(a.expr)
        if isinstance(a, AAcc):
            return expr_ok(a.recv) and (a.perm is None or expr_ok(a.perm))
        if isinstance(a, APred):
            return all(expr_ok(x) for x in a.args) and (a.perm is None or expr_ok(a.perm))
        if isinstance(a, ASep):
            return assertion_ok(a.left) and assertion_ok(a.right)
        if isinstance(a, AImplies):
            return expr_ok(a.guard) and assertion_ok(a.body)
        if isinstance(a, ACond):
            return expr_ok(a.guard) and assertion_ok(a.then) and assertion_ok(a.els)
        return False

    def stmt_ok(s: Stmt) -> bool:
        if isinstance(s, SVarDecl):
            return s.init is None or expr_ok(s.init)
        if isinstance(s, SAssign):
            return expr_ok(s.expr)
        if isinstance(s, SFieldWrite):
            return expr_ok(s.recv) and expr_ok(s.expr)
        if isinstance(s, (SInhale, SExhale, SAssert)):
            return assertion_ok(s.assertion)
        if isinstance(s, SAssume):
            return expr_ok(s.expr)
        if isinstance(s, SIf):
            return expr_ok(s.cond) and all(map(stmt_ok, s.then)) and all(map(stmt_ok, s.els))
        if isinstance(s, SWhile):
            return (
                expr_ok(s.cond)
                and all(map(assertion_ok, s.invariants))
                and all(map(stmt_ok, s.body))
            )
        if isinstance(s, SCall):
            return all(map(expr_ok, s.args))
        if isinstance(s, (SFold, SUnfold)):
            return assertion_ok(s.pred)
        return isinstance(s, SNew)

    for p in program.predicates:
        if not assertion_ok(p.body):
            return False
    for m in program.methods:
        ok = all(map(assertion_ok, m.preconditions)) and all(
            map(assertion_ok, m.postconditions)
        )
        if not ok or not all(map(stmt_ok, m.body)):
            return False
    return True
