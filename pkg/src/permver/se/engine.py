"""Symbolic-execution engine: statement execution, branching, produce and
consume over a pluggable heap strategy.

Each path through a method body is explored separately. Branching pushes the
guard onto the solver's assertion stack and runs the remainder of the path
inside that scope (continuation style), so the solver stack depth always
equals the branch nesting depth. Failed obligations are reported and
execution continues as if the obligation had held, so every error along a
path is reported rather than only the first.

Resource-removal boundaries (exhale statements, call preconditions, the
loop-head invariant exhale) are followed by a havoc of unowned locations;
fold and unfold never havoc, which keeps values flowing through predicate
round trips.
"""

from __future__ import annotations

import sys
import time
from dataclasses import replace

from ..lang.ast import (
    AAcc,
    ACond,
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
    TypeTag,
    Unary,
    Var,
)
from ..smt import (
    FALSE,
    NULL,
    REAL,
    REF,
    TRUE,
    App,
    BoolLit as TBool,
    IntLit as TInt,
    RealLit,
    SessionDead,
    Term,
    add,
    and_,
    eq,
    ge,
    gt,
    idiv,
    implies,
    le,
    lt,
    mul,
    ne,
    neg,
    not_,
    or_,
    real,
    sub,
)
from .state import (
    Deadline,
    Obligation,
    ObligationKind,
    OldState,
    OPAQUE,
    Snap,
    SnapLeaf,
    SnapPair,
    SnapUnit,
    SState,
    TaskCancelled,
    TaskTimeout,
    UNIT,
    Verdict,
    VerificationOutcome,
    snap_leaf_value,
    snap_split,
    sort_of,
    template_of,
)

R_ZERO = real(0)
R_ONE = real(1)


class EngineOptions:
    def __init__(self, consolidate: bool = True, prune_branches: bool = True,
                 debug_checks: bool = False):
        self.consolidate = consolidate
        self.prune_branches = prune_branches
        self.debug_checks = debug_checks


class ConsumeCtx:
    """How failures during a consume are reported."""

    def __init__(self, pure_kind: ObligationKind, perm_kind: ObligationKind,
                 what: str, pos_override: Pos | None = None):
        self.pure_kind = pure_kind
        self.perm_kind = perm_kind
        self.what = what
        self.pos_override = pos_override

    def pos(self, node_pos: Pos) -> Pos:
        return self.pos_override or node_pos


CTX_EXHALE = ConsumeCtx(ObligationKind.ASSERT, ObligationKind.PERMISSION, "exhaled assertion")
CTX_ASSERT = ConsumeCtx(ObligationKind.ASSERT, ObligationKind.PERMISSION, "asserted expression")


class Engine:
    def __init__(self, program: Program, strategy_cls, session, options: EngineOptions,
                 deadline: Deadline | None = None):
        self.program = program
        self.session = session
        self.options = options
        self.deadline = deadline or Deadline(None)
        self.strategy = strategy_cls(self)
        self.errors: list[Obligation] = []
        self._error_keys: set = set()
        self.paths_completed = 0

    # -- solver plumbing ---------------------------------------------------------

    def fresh(self, hint: str, sort):
        return self.session.fresh(hint, sort)

    def assume(self, st: SState, fact: Term) -> SState:
        if fact == TRUE:
            return st
        self.session.assert_term(fact)
        return st.with_pc(fact)

    def entails(self, goal: Term) -> bool:
        if goal == TRUE:
            return True
        self.deadline.check()
        result = self.session.check_entailed(goal, self.deadline.remaining_ms())
        if result.is_timeout:
            raise TaskTimeout()
        return result.is_unsat

    def report(self, kind: ObligationKind, pos: Pos, description: str):
        key = (kind, pos, description)
        if key not in self._error_keys:
            self._error_keys.add(key)
            self.errors.append(Obligation(kind, pos, description))

    # -- expression evaluation -----------------------------------------------------

    def eval(self, st: SState, e: Expr, old_mode: bool = False):
        """Evaluate an expression, issuing well-definedness checks (receiver
        non-null, read permission, divisor non-zero) along the way."""
        if isinstance(e, IntLit):
            return st, TInt(e.value)
        if isinstance(e, BoolLit):
            return st, TBool(e.value)
        if isinstance(e, NullLit):
            return st, NULL
        if isinstance(e, PermLit):
            return st, RealLit(e.value)
        if isinstance(e, Var):
            if old_mode and st.old is not None:
                for n, t in st.old.store:
                    if n == e.name:
                        return st, t
            return st, st.lookup(e.name)
        if isinstance(e, Old):
            return self.eval(st, e.expr, old_mode=True)
        if isinstance(e, FieldRead):
            return self._eval_read(st, e, old_mode)
        if isinstance(e, Unary):
            st, v = self.eval(st, e.operand, old_mode)
            return st, (neg(v) if e.op == "-" else not_(v))
        if isinstance(e, Binary):
            return self._eval_binary(st, e, old_mode)
        raise TypeError(f"cannot evaluate {e!r}")

    def _eval_read(self, st: SState, e: FieldRead, old_mode: bool):
        st, x = self.eval(st, e.recv, old_mode)
        fdecl = self.program.field_decl(e.field_name)
        st = self._check_nonnull(st, x, e.pos, f"receiver of .{e.field_name}")
        if old_mode and st.old is not None:
            read_st = replace(st, heap=st.old.heap)
            _, value = self.strategy.read_field(read_st, x, fdecl)
        else:
            st, value = self.strategy.read_field(st, x, fdecl)
        if value is None:
            self.report(ObligationKind.PERMISSION, e.pos,
                        f"insufficient permission to read {_loc(e)}")
            value = self.fresh(e.field_name, sort_of(fdecl.ty))
        return st, value

    def _check_nonnull(self, st: SState, x: Term, pos: Pos, what: str) -> SState:
        if x in st.nonnull:
            return st
        if x == NULL:
            self.report(ObligationKind.WELL_DEFINEDNESS, pos, f"{what} is null")
            return st
        if self.entails(ne(x, NULL)):
            return st.with_nonnull(x)
        self.report(ObligationKind.WELL_DEFINEDNESS, pos, f"{what} might be null")
        return st

    def _eval_binary(self, st: SState, e: Binary, old_mode: bool):
        op = e.op
        st, a = self.eval(st, e.left, old_mode)
        st, b = self.eval(st, e.right, old_mode)
        if op in ("+", "-", "*") and e.ty == TypeTag.PERM:
            return st, {"+": add, "-": sub, "*": mul}[op](_to_real(a), _to_real(b))
        if op == "+":
            return st, add(a, b)
        if op == "-":
            return st, sub(a, b)
        if op == "*":
            return st, mul(a, b)
        if op == "/":
            if not (isinstance(b, TInt) and b.value != 0) and not self.entails(ne(b, TInt(0))):
                self.report(ObligationKind.WELL_DEFINEDNESS, e.pos, "divisor might be zero")
            return st, idiv(a, b)
        if op in ("<", "<=", ">", ">="):
            a, b = _align_numeric(a, b)
            fn = {"<": lt, "<=": le, ">": gt, ">=": ge}[op]
            return st, fn(a, b)
        if op == "==":
            a, b = _align_numeric(a, b)
            return st, eq(a, b)
        if op == "!=":
            a, b = _align_numeric(a, b)
            return st, ne(a, b)
        if op == "&&":
            return st, and_(a, b)
        if op == "||":
            return st, or_(a, b)
        if op == "==>":
            return st, implies(a, b)
        raise TypeError(f"unhandled operator {op!r}")

    def eval_in(self, frame: SState, e: Expr) -> Term:
        """Evaluate against a fixed frame, discarding cache and consolidation
        updates; any path conditions they added remain sound."""
        _, v = self.eval(frame, e)
        return v

    # -- branching --------------------------------------------------------------------

    def branch(self, st: SState, cond: Term, then_k, else_k) -> list:
        """Explore both sides of a split; a side is skipped when a syntactic
        check or an entailment query shows its guard infeasible."""
        if cond == TRUE:
            return then_k(st)
        if cond == FALSE:
            return else_k(st)
        skip_then = skip_else = False
        if self.options.prune_branches:
            if self.entails(cond):
                skip_else = True
            elif self.entails(not_(cond)):
                skip_then = True
        results: list = []
        if not skip_then:
            self.session.push()
            try:
                results += then_k(self.assume(st, cond))
            finally:
                self.session.pop()
        if not skip_else:
            self.session.push()
            try:
                results += else_k(self.assume(st, not_(cond)))
            finally:
                self.session.pop()
        return results

    # -- produce -------------------------------------------------------------------------

    def produce(self, st: SState, a: Assertion, snap: Snap, k,
                scale: Term | None = None) -> list:
        self.deadline.check()
        if isinstance(a, APure):
            st, t = self.eval(st, a.expr)
            if t == FALSE:
                return []  # ex falso: the path is infeasible
            return k(self.assume(st, t))
        if isinstance(a, AAcc):
            st, x = self.eval(st, a.recv)
            st, q = self._eval_perm(st, a.perm, scale)
            st = self.assume(st, ge(q, R_ZERO))
            st = self.assume(st, implies(gt(q, R_ZERO), ne(x, NULL)))
            if isinstance(q, RealLit) and q.value > 0:
                st = st.with_nonnull(x)
            fdecl = self.program.field_decl(a.field_name)
            st, _ = self.strategy.produce_field(st, x, fdecl, q, snap_leaf_value(snap))
            return k(st)
        if isinstance(a, APred):
            args = []
            for arg in a.args:
                st, t = self.eval(st, arg)
                args.append(t)
            st, q = self._eval_perm(st, a.perm, scale)
            st = self.assume(st, ge(q, R_ZERO))
            tree = OPAQUE if isinstance(snap, SnapUnit) else snap
            st = self.strategy.produce_pred(st, a.name, tuple(args), q, tree)
            return k(st)
        if isinstance(a, ASep):
            sl, sr = _split(snap)
            return self.produce(st, a.left, sl,
                                lambda st2: self.produce(st2, a.right, sr, k, scale),
                                scale)
        if isinstance(a, AImplies):
            st, g = self.eval(st, a.guard)
            return self.branch(st, g,
                               lambda st2: self.produce(st2, a.body, snap, k, scale),
                               lambda st2: k(st2))
        if isinstance(a, ACond):
            st, g = self.eval(st, a.guard)
            sl, sr = _split(snap)
            return self.branch(st, g,
                               lambda st2: self.produce(st2, a.then, sl, k, scale),
                               lambda st2: self.produce(st2, a.els, sr, k, scale))
        raise TypeError(f"unhandled assertion {a!r}")

    def produce_seq(self, st: SState, assertions: list, k, snap: Snap = OPAQUE) -> list:
        if not assertions:
            return k(st)
        return self.produce(st, assertions[0], snap,
                            lambda st2: self.produce_seq(st2, assertions[1:], k, snap))

    def _eval_perm(self, st: SState, perm: Expr | None, scale: Term | None = None):
        if perm is None:
            q: Term = R_ONE
        else:
            st, q = self.eval(st, perm)
            q = _to_real(q)
        if scale is not None:
            q = _rmul(scale, q)
        return st, q

    # -- consume -------------------------------------------------------------------------

    def consume(self, st: SState, a: Assertion, frame: SState, ctx: ConsumeCtx, k,
                scale: Term | None = None) -> list:
        """Check and remove `a`. Expressions are evaluated against `frame`,
        the state at the start of the whole consume. `k` receives the updated
        state and the snapshot assembled from the consumed values."""
        self.deadline.check()
        if isinstance(a, APure):
            t = self.eval_in(frame, a.expr)
            if not self.entails(t):
                # a consolidation may contribute the missing non-aliasing facts
                retried = self.strategy.try_consolidate(st)
                if retried is not None:
                    st = retried
                if retried is None or not self.entails(t):
                    self.report(ctx.pure_kind, ctx.pos(a.expr.pos),
                                f"{ctx.what} might not hold")
                    # continue as if the check had succeeded
            return k(self.assume(st, t), UNIT)
        if isinstance(a, AAcc):
            x = self.eval_in(frame, a.recv)
            q = self._scaled_perm(frame, a.perm, scale)
            fdecl = self.program.field_decl(a.field_name)
            st2, leaf = self.strategy.consume_field(st, x, fdecl, q)
            if leaf is None:
                self.report(ctx.perm_kind, ctx.pos(a.pos),
                            f"insufficient permission for {_acc_loc(a)}")
                leaf = self.fresh(a.field_name, sort_of(fdecl.ty))
                st2 = st
            return k(st2, SnapLeaf(leaf))
        if isinstance(a, APred):
            args = tuple(self.eval_in(frame, arg) for arg in a.args)
            q = self._scaled_perm(frame, a.perm, scale)
            st2, tree = self.strategy.consume_pred(st, a.name, args, q)
            if tree is None:
                self.report(ctx.perm_kind, ctx.pos(a.pos),
                            f"insufficient permission for predicate {a.name}")
                tree = OPAQUE
                st2 = st
            return k(st2, tree)
        if isinstance(a, ASep):
            def after_left(st2, left_tree):
                return self.consume(st2, a.right, frame, ctx,
                                    lambda st3, rt: k(st3, SnapPair(left_tree, rt)),
                                    scale)
            return self.consume(st, a.left, frame, ctx, after_left, scale)
        if isinstance(a, AImplies):
            g = self.eval_in(frame, a.guard)
            return self.branch(st, g,
                               lambda st2: self.consume(st2, a.body, frame, ctx, k, scale),
                               lambda st2: k(st2, self._unknown(a.body)))
        if isinstance(a, ACond):
            g = self.eval_in(frame, a.guard)
            return self.branch(
                st, g,
                lambda st2: self.consume(
                    st2, a.then, frame, ctx,
                    lambda st3, t: k(st3, SnapPair(t, self._unknown(a.els))), scale),
                lambda st2: self.consume(
                    st2, a.els, frame, ctx,
                    lambda st3, t: k(st3, SnapPair(self._unknown(a.then), t)), scale),
            )
        raise TypeError(f"unhandled assertion {a!r}")

    def consume_seq(self, st: SState, assertions: list, frame: SState,
                    ctx: ConsumeCtx, k) -> list:
        """Consume a specification list (requires/ensures/invariants) as one
        unit: all expressions evaluate against the fixed entry frame."""
        if not assertions:
            return k(st)
        return self.consume(st, assertions[0], frame, ctx,
                            lambda st2, _t: self.consume_seq(st2, assertions[1:],
                                                             frame, ctx, k))

    def _unknown(self, a: Assertion) -> Snap:
        return self.strategy.unknown_tree(template_of(a, self.program))

    def _scaled_perm(self, frame: SState, perm: Expr | None, scale: Term | None) -> Term:
        q = _to_real(self.eval_in(frame, perm)) if perm is not None else R_ONE
        if scale is not None:
            q = _rmul(scale, q)
        return q

    # -- statements -------------------------------------------------------------------------

    def exec_seq(self, st: SState, stmts: tuple, k) -> list:
        if not stmts:
            return k(st)
        head, rest = stmts[0], tuple(stmts[1:])
        return self.exec_one(st, head, lambda st2: self.exec_seq(st2, rest, k))

    def exec_one(self, st: SState, s: Stmt, k) -> list:
        self.deadline.check()
        if isinstance(s, SVarDecl):
            if s.init is not None:
                st, v = self.eval(st, s.init)
            else:
                v = self.fresh(s.name, sort_of(s.ty))
            return k(st.with_var(s.name, v))
        if isinstance(s, SAssign):
            st, v = self.eval(st, s.expr)
            return k(st.with_var(s.target, v))
        if isinstance(s, SFieldWrite):
            return self._exec_write(st, s, k)
        if isinstance(s, SNew):
            return k(self._exec_new(st, s))
        if isinstance(s, SInhale):
            return self.produce(st, s.assertion, OPAQUE, k)
        if isinstance(s, SExhale):
            return self.consume(st, s.assertion, st, CTX_EXHALE,
                                lambda st2, _t: k(self.strategy.havoc_boundary(st2)))
        if isinstance(s, SAssert):
            return self.consume(st, s.assertion, st, CTX_ASSERT,
                                lambda st2, tree: self.produce(st2, s.assertion, tree, k))
        if isinstance(s, SAssume):
            st, t = self.eval(st, s.expr)
            if t == FALSE:
                return []
            return k(self.assume(st, t))
        if isinstance(s, SIf):
            st, cond = self.eval(st, s.cond)
            return self.branch(st, cond,
                               lambda st2: self.exec_seq(st2, tuple(s.then), k),
                               lambda st2: self.exec_seq(st2, tuple(s.els), k))
        if isinstance(s, SWhile):
            return self._exec_while(st, s, k)
        if isinstance(s, SCall):
            return self._exec_call(st, s, k)
        if isinstance(s, SFold):
            return self._exec_fold(st, s, k)
        if isinstance(s, SUnfold):
            return self._exec_unfold(st, s, k)
        raise TypeError(f"unhandled statement {s!r}")

    def _exec_write(self, st: SState, s: SFieldWrite, k) -> list:
        st, x = self.eval(st, s.recv)
        st, v = self.eval(st, s.expr)
        st = self._check_nonnull(st, x, s.pos, f"receiver of .{s.field_name}")
        fdecl = self.program.field_decl(s.field_name)
        st2, leaf = self.strategy.consume_field(st, x, fdecl, R_ONE)
        if leaf is None:
            self.report(ObligationKind.PERMISSION, s.pos,
                        f"insufficient permission to write {_loc_write(s)}")
            return k(st)
        return k(self.strategy.install_field_value(st2, x, fdecl, v))

    def _exec_new(self, st: SState, s: SNew) -> SState:
        r = self.fresh(s.target, REF)
        st = self.assume(st, ne(r, NULL))
        seen = set()
        for _, t in st.store:
            if t.sort == REF and t not in seen and t != r:
                seen.add(t)
                st = self.assume(st, ne(r, t))
        st = st.with_nonnull(r).with_var(s.target, r)
        for fname in s.fields:
            fdecl = self.program.field_decl(fname)
            st, _ = self.strategy.produce_field(st, r, fdecl, R_ONE, None)
        return st

    def _exec_while(self, st: SState, s: SWhile, k) -> list:
        ctx_entry = ConsumeCtx(ObligationKind.INVARIANT, ObligationKind.INVARIANT,
                               "loop invariant (on entry)")
        ctx_preserve = ConsumeCtx(ObligationKind.INVARIANT, ObligationKind.INVARIANT,
                                  "loop invariant (after an iteration)")

        def after_establish(st1: SState) -> list:
            st2 = self.strategy.havoc_boundary(st1)
            st3 = st2
            for name in _assigned_vars(s.body):
                try:
                    prev = st3.lookup(name)
                except KeyError:
                    continue
                st3 = st3.with_var(name, self.fresh(name, prev.sort))

            # check the body once, from a state holding only the invariant
            self.session.push()
            try:
                body_st = replace(st3, heap=self.strategy.scope_entry())
                self.produce_seq(body_st, s.invariants, lambda st4: self._loop_body(st4, s, ctx_preserve))
            finally:
                self.session.pop()

            # continue after the loop: invariant plus negated condition
            def after_inv(st5: SState) -> list:
                st6, cond_t = self.eval(st5, s.cond)
                if cond_t == TRUE:
                    return []
                if cond_t == FALSE:
                    return k(st6)
                self.session.push()
                try:
                    return k(self.assume(st6, not_(cond_t)))
                finally:
                    self.session.pop()

            return self.produce_seq(st3, s.invariants, after_inv)

        return self.consume_seq(st, s.invariants, st, ctx_entry, after_establish)

    def _loop_body(self, st: SState, s: SWhile, ctx_preserve: ConsumeCtx) -> list:
        st, cond_t = self.eval(st, s.cond)
        if cond_t == FALSE:
            return []
        self.session.push()
        try:
            st2 = self.assume(st, cond_t)
            self.exec_seq(st2, tuple(s.body),
                          lambda st3: self.consume_seq(st3, s.invariants, st3,
                                                       ctx_preserve, lambda st4: []))
        finally:
            self.session.pop()
        return []

    def _exec_call(self, st: SState, s: SCall, k) -> list:
        callee = self.program.method_decl(s.method)
        args = []
        for a in s.args:
            st, t = self.eval(st, a)
            args.append(t)
        param_store = tuple(zip([n for n, _ in callee.params], args))
        pre_frame = replace(st, store=param_store)
        ctx = ConsumeCtx(ObligationKind.PRECONDITION, ObligationKind.PRECONDITION,
                         f"precondition of {s.method}", pos_override=s.pos)

        def after_pre(st1: SState) -> list:
            st2 = self.strategy.havoc_boundary(st1)
            ret_terms = [self.fresh(n, sort_of(t)) for n, t in callee.returns]
            callee_store = param_store + tuple(
                (n, rt) for (n, _), rt in zip(callee.returns, ret_terms))
            old = OldState(param_store, pre_frame.heap)
            post_st = replace(st2, store=callee_store, old=old)

            def back_to_caller(st3: SState) -> list:
                caller = replace(st3, store=st.store, old=st.old)
                for tname, rt in zip(s.targets, ret_terms):
                    caller = caller.with_var(tname, rt)
                return k(caller)

            return self.produce_seq(post_st, callee.postconditions, back_to_caller)

        return self.consume_seq(st, callee.preconditions, pre_frame, ctx, after_pre)

    def _exec_fold(self, st: SState, s: SFold, k) -> list:
        decl = self.program.predicate_decl(s.pred.name)
        args = []
        for a in s.pred.args:
            st, t = self.eval(st, a)
            args.append(t)
        st, q = self._eval_perm(st, s.pred.perm)
        body_frame = replace(st, store=tuple(zip([n for n, _ in decl.params], args)))
        ctx = ConsumeCtx(ObligationKind.ASSERT, ObligationKind.PERMISSION,
                         f"body of {s.pred.name} (fold)", pos_override=s.pos)

        def after_body(st1: SState, tree: Snap) -> list:
            return k(self.strategy.produce_pred(st1, s.pred.name, tuple(args), q, tree))

        return self.consume(st, decl.body, body_frame, ctx, after_body, scale=q)

    def _exec_unfold(self, st: SState, s: SUnfold, k) -> list:
        decl = self.program.predicate_decl(s.pred.name)
        args = []
        for a in s.pred.args:
            st, t = self.eval(st, a)
            args.append(t)
        st, q = self._eval_perm(st, s.pred.perm)
        st2, tree = self.strategy.consume_pred(st, s.pred.name, tuple(args), q)
        if tree is None:
            self.report(ObligationKind.PERMISSION, s.pos,
                        f"insufficient permission to unfold {s.pred.name}")
            tree = OPAQUE
            st2 = st
        tree = self.strategy.expand_pred_tree(s.pred.name, tree)
        body_store = tuple(zip([n for n, _ in decl.params], args))
        body_st = replace(st2, store=body_store)
        return self.produce(
            body_st, decl.body, tree,
            lambda st3: k(self.strategy.after_unfold_produce(replace(st3, store=st.store))),
            scale=q)

    # -- method verification ----------------------------------------------------------------

    def verify_method(self, m: MethodDecl) -> VerificationOutcome:
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 100000))
        start = time.perf_counter()
        queries_before = self.session.query_count
        self.errors = []
        self._error_keys = set()
        self.paths_completed = 0
        base_depth = self.session.depth
        self.session.push()
        try:
            store = tuple(
                (n, self.fresh(n, sort_of(t))) for n, t in m.params + m.returns
            )
            st0 = SState(store=store, heap=self.strategy.method_entry())

            ctx_post = ConsumeCtx(ObligationKind.POSTCONDITION, ObligationKind.POSTCONDITION,
                                  "postcondition")

            def at_exit(st: SState) -> list:
                def done(st2: SState) -> list:
                    self.paths_completed += 1
                    return [st2]
                return self.consume_seq(st, m.postconditions, st, ctx_post, done)

            def run_body(st: SState) -> list:
                st = replace(st, old=OldState(st.store, st.heap))
                return self.exec_seq(st, tuple(m.body), at_exit)

            self.produce_seq(st0, m.preconditions, run_body)
            verdict = Verdict.ERRORS if self.errors else Verdict.VERIFIED
            errors = list(self.errors)
        except (TaskTimeout, SessionDead):
            verdict = Verdict.TIMEOUT
            errors = []
        finally:
            try:
                while self.session.depth > base_depth:
                    self.session.pop()
            except Exception:
                pass
        return VerificationOutcome(
            method=m.name,
            verdict=verdict,
            errors=errors,
            wall_time_s=time.perf_counter() - start,
            query_count=self.session.query_count - queries_before,
        )


def _split(snap: Snap) -> tuple:
    if isinstance(snap, SnapUnit):
        return OPAQUE, OPAQUE
    return snap_split(snap)


def _rmul(a: Term, b: Term) -> Term:
    if a == R_ONE:
        return b
    if b == R_ONE:
        return a
    return mul(a, b)


def _to_real(t: Term) -> Term:
    if isinstance(t, TInt):
        return real(t.value)
    if t.sort == REAL:
        return t
    return App("to_real", (t,), REAL)


def _align_numeric(a: Term, b: Term):
    # permission comparisons against integer literals (p <= 1, p != 0)
    if a.sort == REAL and b.sort != REAL:
        return a, _to_real(b)
    if b.sort == REAL and a.sort != REAL:
        return _to_real(a), b
    return a, b


def _loc(e: FieldRead) -> str:
    from ..lang.pretty import expr_str

    return expr_str(e, 7)


def _loc_write(s: SFieldWrite) -> str:
    from ..lang.pretty import expr_str

    return f"{expr_str(s.recv, 7)}.{s.field_name}"


def _acc_loc(a: AAcc) -> str:
    from ..lang.pretty import expr_str

    return f"{expr_str(a.recv, 7)}.{a.field_name}"


def _assigned_vars(stmts: list) -> list:
    out: list[str] = []

    def add_name(n: str):
        if n not in out:
            out.append(n)

    def walk(ss):
        for s in ss:
            if isinstance(s, SAssign):
                add_name(s.target)
            elif isinstance(s, SVarDecl):
                add_name(s.name)
            elif isinstance(s, SNew):
                add_name(s.target)
            elif isinstance(s, SCall):
                for t in s.targets:
                    add_name(t)
            elif isinstance(s, SIf):
                walk(s.then)
                walk(s.els)
            elif isinstance(s, SWhile):
                walk(s.body)

    walk(stmts)
    return out
