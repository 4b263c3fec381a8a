"""Verification-condition generation: one proof obligation per method.

The encoding is passive: every assignment, heap change, and mask change
introduces a fresh versioned constant with a defining equation, so formula
size stays linear in the program. Path-sensitive assumptions (branch guards,
inhaled facts, assume statements, loop invariants) are folded into a chain
of path-premise booleans; each labeled obligation is guarded by the premise
constant current at its program point, and control-flow joins disjoin the
two arms' premises. The result is a single goal conjunction over labeled
obligations, checked with one solver query.

Two heap encodings exist: one heap/mask array pair per resource (TR), and a
single two-level array pair indexed by receiver and field identifier with
boxed values (TA).
"""

from __future__ import annotations

from dataclasses import dataclass

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
    BOOL,
    FALSE,
    FIELDID,
    NULL,
    REAL,
    REF,
    SNAP,
    TRUE,
    App,
    BoolLit as TBool,
    Const,
    IntLit as TInt,
    RealLit,
    Sort,
    Term,
    add,
    and_,
    const_array,
    eq,
    forall,
    ge,
    gt,
    heap_arr,
    idiv,
    implies,
    ite,
    le,
    lt,
    mul,
    ne,
    neg,
    not_,
    or_,
    real,
    select,
    sort_to_smt,
    store,
    sub,
    to_smt,
    ufapp,
)
from ..se.engine import _assigned_vars, _to_real, _align_numeric
from ..se.state import (
    Obligation,
    ObligationKind,
    TLeaf,
    TUnit,
    sort_of,
    template_of,
)
from ..se.total import snap_ctor, snap_proj

R_ZERO = real(0)
R_ONE = real(1)


def box_fn(tag: TypeTag) -> str:
    return f"box${tag.value}"


def unbox_fn(tag: TypeTag) -> str:
    return f"unbox${tag.value}"


def field_const(fname: str) -> Const:
    return Const(f"fld${fname}", FIELDID)


def pred_field_fn(pname: str) -> str:
    return f"predfld${pname}"


@dataclass(frozen=True)
class LabeledObligation:
    label: str
    guarded: Term  # premise => condition
    obligation: Obligation


@dataclass
class Vc:
    method: str
    declarations: list  # raw SMT-LIB declaration lines
    hypotheses: list  # assumed Terms (definitions, axioms, frame conditions)
    labels: dict  # label -> LabeledObligation

    @property
    def goal(self) -> Term:
        return and_(*[lo.guarded for lo in self.labels.values()])

    def script(self, include_check: bool = True) -> str:
        lines = list(self.declarations)
        for h in self.hypotheses:
            lines.append(f"(assert {to_smt(h)})")
        lines.append(f"(assert (! (not {to_smt(self.goal)}) :named goal))")
        if include_check:
            lines.append("(check-sat)")
        return "\n".join(lines) + "\n"


class _Env:
    """Versioned store and heap/mask terms at one program point."""

    def __init__(self, store: dict, heap: dict):
        self.store = store  # name -> Term
        self.heap = heap  # resource key -> (heap term, mask term)

    def copy(self) -> "_Env":
        return _Env(dict(self.store), dict(self.heap))


class VcgEncoder:
    def __init__(self, program: Program, encoding: str):
        assert encoding in ("tr", "ta")
        self.program = program
        self.encoding = encoding
        self.decls: list[str] = []
        self.hyps: list[Term] = []
        self.labels: dict[str, LabeledObligation] = {}
        self._n = 0
        self.path: Term = TRUE
        self.env: _Env | None = None
        self.old_env: _Env | None = None
        self._resources = self._collect_resources()

    # -- resources -----------------------------------------------------------

    def _collect_resources(self) -> dict:
        res = {}
        for f in self.program.fields:
            res[("field", f.name)] = ([REF], sort_of(f.ty))
        for p in self.program.predicates:
            res[("pred", p.name)] = ([sort_of(t) for _, t in p.params], SNAP)
        return res

    # -- declaration helpers -----------------------------------------------------

    def fresh_const(self, hint: str, sort: Sort) -> Const:
        self._n += 1
        name = f"{hint}${self._n}"
        self.decls.append(f"(declare-const {name} {sort_to_smt(sort)})")
        return Const(name, sort)

    def define(self, hint: str, term: Term) -> Term:
        """Fresh constant with a defining equation (single-assignment form)."""
        if isinstance(term, (Const, TInt, TBool, RealLit)):
            return term
        c = self.fresh_const(hint, term.sort)
        self.hyps.append(eq(c, term))
        return c

    def define_path(self, term: Term) -> Term:
        if isinstance(term, TBool):
            return term
        c = self.fresh_const("g", BOOL)
        self.hyps.append(eq(c, term))
        return c

    def assume_path(self, fact: Term):
        if fact == TRUE:
            return
        self.path = self.define_path(and_(self.path, fact))

    def assume_fact(self, fact: Term, local_guard: Term = TRUE):
        """Path-scoped assumption."""
        self.assume_path(implies(local_guard, fact))

    def axiom(self, fact: Term):
        """Unconditional hypothesis: definitions, mask bounds, frame clauses."""
        if fact != TRUE:
            self.hyps.append(fact)

    def obligation(self, kind: ObligationKind, pos: Pos, desc: str, cond: Term,
                   local_guard: Term = TRUE):
        guard = and_(self.path, local_guard)
        label = f"L{len(self.labels)}"
        self.labels[label] = LabeledObligation(
            label, implies(guard, cond), Obligation(kind, pos, desc))

    def _bound(self, sorts: list) -> list:
        out = []
        for s in sorts:
            self._n += 1
            out.append(Const(f"r${self._n}", s))
        return out

    # -- heap primitives --------------------------------------------------------------

    @staticmethod
    def _sel(m: Term, args: tuple) -> Term:
        t = m
        for a in args:
            t = select(t, a)
        return t

    @classmethod
    def _upd(cls, m: Term, args: tuple, val: Term) -> Term:
        if not args:
            return val
        head, rest = args[0], args[1:]
        if not rest:
            return store(m, head, val)
        return store(m, head, cls._upd(select(m, head), rest, val))

    def _loc(self, key, args: tuple) -> tuple:
        """Map a resource instance to (map key, index tuple) per encoding."""
        if self.encoding == "tr":
            return key, args
        if key[0] == "field":
            return ("ta", "ta"), (args[0], field_const(key[1]))
        return ("ta", "ta"), (NULL, ufapp(pred_field_fn(key[1]), args, FIELDID))

    def _index_sorts(self, map_key) -> list:
        if self.encoding == "ta":
            return [REF, FIELDID]
        return self._resources[map_key][0]

    def _value_sort(self, map_key) -> Sort:
        if self.encoding == "ta":
            return SNAP
        return self._resources[map_key][1]

    def mask_at(self, env: _Env, key, args: tuple) -> Term:
        mk, idx = self._loc(key, args)
        return self._sel(env.heap[mk][1], idx)

    def heap_at(self, env: _Env, key, args: tuple) -> Term:
        mk, idx = self._loc(key, args)
        raw = self._sel(env.heap[mk][0], idx)
        if self.encoding == "ta":
            if key[0] == "field":
                tag = self.program.field_decl(key[1]).ty
                return ufapp(unbox_fn(tag), [raw], sort_of(tag))
            return raw  # predicate snapshots are stored unboxed (Snap)
        return raw

    def _boxed(self, key, value: Term) -> Term:
        if self.encoding == "ta" and key[0] == "field":
            tag = self.program.field_decl(key[1]).ty
            return ufapp(box_fn(tag), [value], SNAP)
        return value

    def change_perm(self, key, args: tuple, delta: Term, local_guard: Term, sign: int):
        mk, idx = self._loc(key, args)
        h, m = self.env.heap[mk]
        amt = ite(local_guard, delta, R_ZERO)
        sel = self._sel(m, idx)
        new_val = add(sel, amt) if sign > 0 else sub(sel, amt)
        m2 = self.define(f"M_{mk[1]}", self._upd(m, idx, new_val))
        self.env.heap[mk] = (h, m2)
        if sign > 0:
            # path-scoped: on a path where a consume's sufficiency failed the
            # mask term can dip below zero, so the bound must not be global
            self.assume_fact(self._mask_bounds(mk, m2), local_guard)

    def write_heap(self, key, args: tuple, value: Term):
        mk, idx = self._loc(key, args)
        h, m = self.env.heap[mk]
        h2 = self.define(f"H_{mk[1]}", self._upd(h, idx, self._boxed(key, value)))
        self.env.heap[mk] = (h2, m)

    def _mask_bounds(self, mk, mask: Term) -> Term:
        bvars = self._bound(self._index_sorts(mk))
        sel = self._sel(mask, tuple(bvars))
        body = and_(ge(sel, R_ZERO), le(sel, R_ONE))
        if not bvars or not isinstance(sel, App):
            return body
        return forall([(v.name, v.sort_) for v in bvars], body, [[sel]])

    def _zero_mask(self, mk) -> Term:
        t: Term = R_ZERO
        for s in reversed(self._index_sorts(mk)):
            t = const_array(s, t)
        return t

    def _heap_sort(self, mk) -> Sort:
        t: Sort = self._value_sort(mk)
        for s in reversed(self._index_sorts(mk)):
            t = heap_arr(s, t)
        return t

    def _map_keys(self) -> list:
        if self.encoding == "ta":
            return [("ta", "ta")]
        return list(self._resources)

    def entry_env(self) -> _Env:
        heap = {}
        for mk in self._map_keys():
            h = self.fresh_const(f"H_{mk[1]}", self._heap_sort(mk))
            heap[mk] = (h, self._zero_mask(mk))
        return _Env({}, heap)

    def _mask_sort(self, mk) -> Sort:
        t: Sort = REAL
        for s in reversed(self._index_sorts(mk)):
            t = heap_arr(s, t)
        return t

    def havoc_heaps(self):
        """Fresh heap versions constrained to agree on positively-owned
        locations (the frame clause at resource-removal boundaries)."""
        for mk in self._map_keys():
            h, m = self.env.heap[mk]
            h2 = self.fresh_const(f"H_{mk[1]}", self._heap_sort(mk))
            bvars = self._bound(self._index_sorts(mk))
            idx = tuple(bvars)
            frame = implies(gt(self._sel(m, idx), R_ZERO),
                            eq(self._sel(h2, idx), self._sel(h, idx)))
            if frame != TRUE:
                if bvars:
                    frame = forall([(v.name, v.sort_) for v in bvars], frame,
                                   [[self._sel(h2, idx)]])
                self.axiom(frame)
            self.env.heap[mk] = (h2, m)

    # -- expressions -------------------------------------------------------------------

    def eval(self, e: Expr, env: _Env, lg: Term, old_mode: bool = False) -> Term:
        if isinstance(e, IntLit):
            return TInt(e.value)
        if isinstance(e, BoolLit):
            return TBool(e.value)
        if isinstance(e, NullLit):
            return NULL
        if isinstance(e, PermLit):
            return RealLit(e.value)
        if isinstance(e, Var):
            if old_mode and self.old_env is not None and e.name in self.old_env.store:
                return self.old_env.store[e.name]
            return env.store[e.name]
        if isinstance(e, Old):
            return self.eval(e.expr, self.old_env or env, lg, old_mode=True)
        if isinstance(e, FieldRead):
            x = self.eval(e.recv, env, lg, old_mode)
            fkey = ("field", e.field_name)
            loc = _expr_str(e)
            self.obligation(ObligationKind.WELL_DEFINEDNESS, e.pos,
                            f"receiver of .{e.field_name} might be null",
                            ne(x, NULL), lg)
            self.obligation(ObligationKind.PERMISSION, e.pos,
                            f"insufficient permission to read {loc}",
                            lt(R_ZERO, self.mask_at(env, fkey, (x,))), lg)
            return self.heap_at(env, fkey, (x,))
        if isinstance(e, Unary):
            v = self.eval(e.operand, env, lg, old_mode)
            return neg(v) if e.op == "-" else not_(v)
        if isinstance(e, Binary):
            return self._eval_binary(e, env, lg, old_mode)
        raise TypeError(f"cannot encode {e!r}")

    def _eval_binary(self, e: Binary, env: _Env, lg: Term, old_mode: bool) -> Term:
        a = self.eval(e.left, env, lg, old_mode)
        b = self.eval(e.right, env, lg, old_mode)
        op = e.op
        if op in ("+", "-", "*") and e.ty == TypeTag.PERM:
            return {"+": add, "-": sub, "*": mul}[op](_to_real(a), _to_real(b))
        if op in ("+", "-", "*"):
            return {"+": add, "-": sub, "*": mul}[op](a, b)
        if op == "/":
            self.obligation(ObligationKind.WELL_DEFINEDNESS, e.pos,
                            "divisor might be zero", ne(b, TInt(0)), lg)
            return idiv(a, b)
        if op in ("<", "<=", ">", ">="):
            a, b = _align_numeric(a, b)
            return {"<": lt, "<=": le, ">": gt, ">=": ge}[op](a, b)
        if op == "==":
            a, b = _align_numeric(a, b)
            return eq(a, b)
        if op == "!=":
            a, b = _align_numeric(a, b)
            return ne(a, b)
        if op == "&&":
            return and_(a, b)
        if op == "||":
            return or_(a, b)
        if op == "==>":
            return implies(a, b)
        raise TypeError(f"unhandled operator {op!r}")

    # -- produce / consume ----------------------------------------------------------------

    def inhale(self, a: Assertion, lg: Term = TRUE, snap=None, scale: Term | None = None):
        if isinstance(a, APure):
            self.assume_fact(self.eval(a.expr, self.env, lg), lg)
            return
        if isinstance(a, AAcc):
            x = self.eval(a.recv, self.env, lg)
            q = self._perm(a.perm, self.env, lg, scale)
            self.assume_fact(ge(q, R_ZERO), lg)
            self.assume_fact(implies(gt(q, R_ZERO), ne(x, NULL)), lg)
            key = ("field", a.field_name)
            leaf = _snap_leaf(snap)
            if leaf is not None:
                cur = self.heap_at(self.env, key, (x,))
                if cur != leaf:
                    self.assume_fact(eq(cur, leaf), lg)
            self.change_perm(key, (x,), q, lg, +1)
            return
        if isinstance(a, APred):
            args = tuple(self.eval(arg, self.env, lg) for arg in a.args)
            q = self._perm(a.perm, self.env, lg, scale)
            self.assume_fact(ge(q, R_ZERO), lg)
            key = ("pred", a.name)
            snap_term = _snap_value(snap)
            if snap_term is not None:
                cur = self.heap_at(self.env, key, args)
                if cur != snap_term:
                    self.assume_fact(eq(cur, snap_term), lg)
            self.change_perm(key, args, q, lg, +1)
            return
        if isinstance(a, ASep):
            l, r = _snap_pair(snap)
            self.inhale(a.left, lg, l, scale)
            self.inhale(a.right, lg, r, scale)
            return
        if isinstance(a, AImplies):
            g = self.eval(a.guard, self.env, lg)
            self.inhale(a.body, and_(lg, g), snap, scale)
            return
        if isinstance(a, ACond):
            g = self.eval(a.guard, self.env, lg)
            l, r = _snap_pair(snap)
            self.inhale(a.then, and_(lg, g), l, scale)
            self.inhale(a.els, and_(lg, not_(g)), r, scale)
            return
        raise TypeError(f"unhandled assertion {a!r}")

    def exhale(self, a: Assertion, frame: _Env, ctx: "VcCtx", lg: Term = TRUE,
               scale: Term | None = None):
        """Returns the snapshot tree of consumed values (leaves are heap
        reads against the frame environment)."""
        if isinstance(a, APure):
            t = self.eval(a.expr, frame, lg)
            self.obligation(ctx.pure_kind, ctx.pos(a.expr.pos),
                            f"{ctx.what} might not hold", t, lg)
            self.assume_fact(t, lg)
            return ("unit",)
        if isinstance(a, AAcc):
            x = self.eval(a.recv, frame, lg)
            q = self._perm(a.perm, frame, lg, scale)
            key = ("field", a.field_name)
            sufficient = le(q, self.mask_at(self.env, key, (x,)))
            self.obligation(ctx.perm_kind, ctx.pos(a.pos),
                            f"insufficient permission for {_expr_str(a.recv)}.{a.field_name}",
                            sufficient, lg)
            self.assume_fact(sufficient, lg)
            leaf = self.heap_at(frame, key, (x,))
            self.change_perm(key, (x,), q, lg, -1)
            return ("leaf", leaf)
        if isinstance(a, APred):
            args = tuple(self.eval(arg, frame, lg) for arg in a.args)
            q = self._perm(a.perm, frame, lg, scale)
            key = ("pred", a.name)
            sufficient = le(q, self.mask_at(self.env, key, args))
            self.obligation(ctx.perm_kind, ctx.pos(a.pos),
                            f"insufficient permission for predicate {a.name}",
                            sufficient, lg)
            self.assume_fact(sufficient, lg)
            snap_term = self.heap_at(frame, key, args)
            self.change_perm(key, args, q, lg, -1)
            return ("snap", a.name, snap_term)
        if isinstance(a, ASep):
            l = self.exhale(a.left, frame, ctx, lg, scale)
            r = self.exhale(a.right, frame, ctx, lg, scale)
            return ("pair", l, r)
        if isinstance(a, AImplies):
            g = self.eval(a.guard, frame, lg)
            body = self.exhale(a.body, frame, ctx, and_(lg, g), scale)
            return body
        if isinstance(a, ACond):
            g = self.eval(a.guard, frame, lg)
            l = self.exhale(a.then, frame, ctx, and_(lg, g), scale)
            r = self.exhale(a.els, frame, ctx, and_(lg, not_(g)), scale)
            return ("pair", l, r)
        raise TypeError(f"unhandled assertion {a!r}")

    def _perm(self, perm: Expr | None, env: _Env, lg: Term,
              scale: Term | None = None) -> Term:
        q = _to_real(self.eval(perm, env, lg)) if perm is not None else R_ONE
        if scale is not None and scale != R_ONE:
            q = mul(scale, q)
        return q

    # -- statements ---------------------------------------------------------------------------

    def encode_stmt(self, s: Stmt):
        if isinstance(s, SVarDecl):
            if s.init is not None:
                self.env.store[s.name] = self.define(s.name, self.eval(s.init, self.env, TRUE))
            else:
                self.env.store[s.name] = self.fresh_const(s.name, sort_of(s.ty))
            return
        if isinstance(s, SAssign):
            self.env.store[s.target] = self.define(s.target, self.eval(s.expr, self.env, TRUE))
            return
        if isinstance(s, SFieldWrite):
            x = self.eval(s.recv, self.env, TRUE)
            v = self.eval(s.expr, self.env, TRUE)
            self.obligation(ObligationKind.WELL_DEFINEDNESS, s.pos,
                            f"receiver of .{s.field_name} might be null", ne(x, NULL))
            key = ("field", s.field_name)
            can_write = le(R_ONE, self.mask_at(self.env, key, (x,)))
            self.obligation(ObligationKind.PERMISSION, s.pos,
                            f"insufficient permission to write {_expr_str(s.recv)}.{s.field_name}",
                            can_write)
            self.assume_fact(can_write)
            self.write_heap(key, (x,), v)
            return
        if isinstance(s, SNew):
            r = self.fresh_const(s.target, REF)
            self.assume_fact(ne(r, NULL))
            seen = set()
            for t in self.env.store.values():
                if t.sort == REF and t != r and t not in seen:
                    seen.add(t)
                    self.assume_fact(ne(r, t))
            self.env.store[s.target] = r
            for fname in s.fields:
                self.change_perm(("field", fname), (r,), R_ONE, TRUE, +1)
            return
        if isinstance(s, SInhale):
            self.inhale(s.assertion)
            return
        if isinstance(s, SExhale):
            self.exhale(s.assertion, self.env.copy(), CTX_VC_EXHALE)
            self.havoc_heaps()
            return
        if isinstance(s, SAssert):
            frame = self.env.copy()
            tree = self.exhale(s.assertion, frame, CTX_VC_ASSERT)
            self.inhale(s.assertion, TRUE, tree)
            return
        if isinstance(s, SAssume):
            self.assume_fact(self.eval(s.expr, self.env, TRUE))
            return
        if isinstance(s, SIf):
            self._encode_if(s)
            return
        if isinstance(s, SWhile):
            self._encode_while(s)
            return
        if isinstance(s, SCall):
            self._encode_call(s)
            return
        if isinstance(s, SFold):
            self._encode_fold(s)
            return
        if isinstance(s, SUnfold):
            self._encode_unfold(s)
            return
        raise TypeError(f"unhandled statement {s!r}")

    def encode_block(self, stmts: list):
        for s in stmts:
            if self.path == FALSE:
                return
            self.encode_stmt(s)

    def _encode_if(self, s: SIf):
        cond = self.eval(s.cond, self.env, TRUE)
        entry_env = self.env.copy()
        entry_path = self.path

        self.assume_path(cond)
        self.encode_block(s.then)
        then_env, then_path = self.env, self.path

        self.env = entry_env.copy()
        self.path = entry_path
        self.assume_path(not_(cond))
        self.encode_block(s.els)
        else_env, else_path = self.env, self.path

        merged = _Env({}, {})
        for name in then_env.store:
            a, b = then_env.store[name], else_env.store.get(name)
            if b is None or a == b:
                merged.store[name] = a
            else:
                merged.store[name] = self.define(name, ite(cond, a, b))
        for mk in then_env.heap:
            (ha, ma), (hb, mb) = then_env.heap[mk], else_env.heap[mk]
            h = ha if ha == hb else self.define(f"H_{mk[1]}", ite(cond, ha, hb))
            m = ma if ma == mb else self.define(f"M_{mk[1]}", ite(cond, ma, mb))
            merged.heap[mk] = (h, m)
        self.env = merged
        self.path = self.define_path(or_(then_path, else_path))

    def _encode_while(self, s: SWhile):
        ctx_entry = VcCtx(ObligationKind.INVARIANT, ObligationKind.INVARIANT,
                          "loop invariant (on entry)")
        ctx_preserve = VcCtx(ObligationKind.INVARIANT, ObligationKind.INVARIANT,
                             "loop invariant (after an iteration)")
        frame = self.env.copy()
        for inv in s.invariants:
            self.exhale(inv, frame, ctx_entry)
        self.havoc_heaps()
        for name in _assigned_vars(s.body):
            if name in self.env.store:
                self.env.store[name] = self.fresh_const(name, self.env.store[name].sort)

        saved_env = self.env.copy()
        saved_path = self.path

        # body path: havoc heap and mask versions, assume the invariant
        body_heap = {}
        for mk in self.env.heap:
            h = self.fresh_const(f"H_{mk[1]}", self._heap_sort(mk))
            m = self.fresh_const(f"M_{mk[1]}", self._mask_sort(mk))
            self.axiom(self._mask_bounds(mk, m))
            body_heap[mk] = (h, m)
        self.env = _Env(dict(saved_env.store), body_heap)
        for inv in s.invariants:
            self.inhale(inv)
        cond_t = self.eval(s.cond, self.env, TRUE)
        self.assume_path(cond_t)
        self.encode_block(s.body)
        if self.path != FALSE:
            body_frame = self.env.copy()
            for inv in s.invariants:
                self.exhale(inv, body_frame, ctx_preserve)

        # exit path: frame preserved, invariant plus negated condition
        self.env = saved_env
        self.path = saved_path
        for inv in s.invariants:
            self.inhale(inv)
        cond_t2 = self.eval(s.cond, self.env, TRUE)
        self.assume_path(not_(cond_t2))

    def _encode_call(self, s: SCall):
        callee = self.program.method_decl(s.method)
        args = [self.eval(a, self.env, TRUE) for a in s.args]
        pre_store = {n: t for (n, _), t in zip(callee.params, args)}
        pre_env = _Env(pre_store, dict(self.env.heap))
        ctx = VcCtx(ObligationKind.PRECONDITION, ObligationKind.PRECONDITION,
                    f"precondition of {s.method}", pos_override=s.pos)
        saved_old = self.old_env
        for pre in callee.preconditions:
            self.exhale(pre, pre_env, ctx)
        self.havoc_heaps()
        rets = {n: self.fresh_const(n, sort_of(t)) for n, t in callee.returns}
        post_store = dict(pre_store)
        post_store.update(rets)
        self.old_env = pre_env
        caller_store = self.env.store
        self.env.store = post_store
        for post in callee.postconditions:
            self.inhale(post)
        self.env.store = caller_store
        self.old_env = saved_old
        for tname, (n, _) in zip(s.targets, callee.returns):
            self.env.store[tname] = rets[n]

    def _encode_fold(self, s: SFold):
        decl = self.program.predicate_decl(s.pred.name)
        args = tuple(self.eval(a, self.env, TRUE) for a in s.pred.args)
        q = self._perm(s.pred.perm, self.env, TRUE)
        body_store = {n: t for (n, _), t in zip(decl.params, args)}
        body_env = _Env(body_store, dict(self.env.heap))
        ctx = VcCtx(ObligationKind.ASSERT, ObligationKind.PERMISSION,
                    f"body of {s.pred.name} (fold)", pos_override=s.pos)
        tree = self.exhale(decl.body, body_env, ctx, TRUE, scale=q)
        leaves = _snap_term_leaves(tree)
        key = ("pred", s.pred.name)
        if leaves is not None:
            snap_term = (ufapp(snap_ctor(s.pred.name), leaves, SNAP)
                         if leaves else Const(snap_ctor(s.pred.name), SNAP))
            self.write_heap(key, args, snap_term)
        self.change_perm(key, args, q, TRUE, +1)

    def _encode_unfold(self, s: SUnfold):
        decl = self.program.predicate_decl(s.pred.name)
        args = tuple(self.eval(a, self.env, TRUE) for a in s.pred.args)
        q = self._perm(s.pred.perm, self.env, TRUE)
        key = ("pred", s.pred.name)
        sufficient = le(q, self.mask_at(self.env, key, args))
        self.obligation(ObligationKind.PERMISSION, s.pos,
                        f"insufficient permission to unfold {s.pred.name}",
                        sufficient)
        self.assume_fact(sufficient)
        snap_term = self.heap_at(self.env, key, args)
        self.change_perm(key, args, q, TRUE, -1)
        tree = _tree_from_snap(self.program, s.pred.name, snap_term)
        body_store = {n: t for (n, _), t in zip(decl.params, args)}
        caller_store = self.env.store
        self.env.store = body_store
        self.inhale(decl.body, TRUE, tree, scale=q)
        self.env.store = caller_store

    # -- method -----------------------------------------------------------------------

    def encode_method(self, m: MethodDecl) -> Vc:
        self._declare_preamble_names()
        self.env = self.entry_env()
        for n, t in m.params + m.returns:
            self.env.store[n] = self.fresh_const(n, sort_of(t))
        for pre in m.preconditions:
            self.inhale(pre)
        self.old_env = self.env.copy()
        self.encode_block(m.body)
        if self.path != FALSE:
            frame = self.env.copy()
            ctx = VcCtx(ObligationKind.POSTCONDITION, ObligationKind.POSTCONDITION,
                        "postcondition")
            for post in m.postconditions:
                self.exhale(post, frame, ctx)
        return Vc(m.name, self.decls, self.hyps, self.labels)

    def _declare_preamble_names(self):
        # session-level names (sorts, null, snapshot and boxing functions) are
        # declared by the task preamble; nothing to do here
        pass


@dataclass
class VcCtx:
    pure_kind: ObligationKind
    perm_kind: ObligationKind
    what: str
    pos_override: Pos | None = None

    def pos(self, node_pos: Pos) -> Pos:
        return self.pos_override or node_pos


CTX_VC_EXHALE = VcCtx(ObligationKind.ASSERT, ObligationKind.PERMISSION, "exhaled assertion")
CTX_VC_ASSERT = VcCtx(ObligationKind.ASSERT, ObligationKind.PERMISSION, "asserted expression")


# snapshot trees for the encoder: plain tuples
#   ("unit",) | ("leaf", Term) | ("pair", l, r) | ("snap", pred, Term) | None


def _expr_str(e) -> str:
    from ..lang.pretty import expr_str

    return expr_str(e, 7)


def _snap_pair(snap):
    if snap is None:
        return None, None
    if snap[0] == "pair":
        return snap[1], snap[2]
    return None, None


def _snap_leaf(snap):
    if snap is None:
        return None
    if snap[0] == "leaf":
        return snap[1]
    return None


def _snap_value(snap):
    """The whole-snapshot term at a predicate-instance position."""
    if snap is None:
        return None
    if snap[0] == "snap":
        return snap[2]
    if snap[0] == "leaf" and snap[1].sort == SNAP:
        return snap[1]
    return None


def _snap_term_leaves(tree):
    if tree is None:
        return None
    if tree[0] == "unit":
        return []
    if tree[0] == "leaf":
        return [tree[1]]
    if tree[0] == "snap":
        return [tree[2]]
    if tree[0] == "pair":
        l = _snap_term_leaves(tree[1])
        r = _snap_term_leaves(tree[2])
        if l is None or r is None:
            return None
        return l + r
    return None


def _tree_from_snap(program: Program, pred: str, snap_term: Term):
    decl = program.predicate_decl(pred)
    template = template_of(decl.body, program)
    counter = [0]

    def walk(tpl):
        if isinstance(tpl, TUnit):
            return ("unit",)
        if isinstance(tpl, TLeaf):
            i = counter[0]
            counter[0] += 1
            return ("leaf", ufapp(snap_proj(pred, i), [snap_term], tpl.sort))
        return ("pair", walk(tpl.left), walk(tpl.right))

    return walk(template)


def encode_method(program: Program, m: MethodDecl, encoding: str) -> Vc:
    return VcgEncoder(program, encoding).encode_method(m)
