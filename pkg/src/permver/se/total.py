"""Total-heap strategy: one heap/mask term pair per resource inside the
symbolic-execution engine.

Reads assert mask positivity and answer with a select term; consumes check
sufficiency and update the mask with a store term. Constructor-level
simplification collapses add-then-subtract chains, so a produce immediately
undone by a consume restores the previous mask term. There is no counterpart
to consolidation: all information about a resource lives in one map, and
non-aliasing comes from the mask-bound axiom assumed for every new mask.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..smt import (
    REAL,
    REF,
    SNAP,
    Const,
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
    implies,
    le,
    lt,
    real,
    select,
    store,
    sub,
    ufapp,
)
from .state import (
    Snap,
    SnapLeaf,
    SnapOpaque,
    SnapPair,
    SnapUnit,
    SState,
    TLeaf,
    TUnit,
    sort_of,
    template_of,
)

R_ZERO = real(0)
R_ONE = real(1)
TRUE_TERM = and_()


def snap_ctor(pred: str) -> str:
    return f"snap${pred}"


def snap_proj(pred: str, i: int) -> str:
    return f"snap${pred}${i}"


@dataclass(frozen=True)
class TotalHS:
    maps: dict  # resource key -> (heap term, mask term)
    versions: dict  # resource key -> int


class TotalStrategy:
    name = "se-tr"

    def __init__(self, engine):
        self.eng = engine
        self.program = engine.program
        self.counters = {"havocs": 0}
        self._bound_counter = 0
        self._seen_masks: set = set()
        self._resources = self._collect_resources()

    def _collect_resources(self) -> dict:
        res = {}
        for f in self.program.fields:
            res[("field", f.name)] = ([REF], sort_of(f.ty))
        for p in self.program.predicates:
            res[("pred", p.name)] = ([sort_of(t) for _, t in p.params], SNAP)
        return res

    # -- term plumbing -------------------------------------------------------

    def _map_sorts(self, key) -> tuple:
        idx, val = self._resources[key]
        hs: Sort = val
        ms: Sort = REAL
        for s in reversed(idx):
            hs = heap_arr(s, hs)
            ms = heap_arr(s, ms)
        return hs, ms

    def _zero_mask(self, key) -> Term:
        idx, _ = self._resources[key]
        t: Term = R_ZERO
        for s in reversed(idx):
            t = const_array(s, t)
        return t

    @staticmethod
    def sel(map_term: Term, args: tuple) -> Term:
        t = map_term
        for a in args:
            t = select(t, a)
        return t

    @staticmethod
    def upd(map_term: Term, args: tuple, val: Term) -> Term:
        if not args:
            return val
        head, rest = args[0], args[1:]
        if not rest:
            return store(map_term, head, val)
        inner = TotalStrategy.upd(select(map_term, head), rest, val)
        return store(map_term, head, inner)

    def _bound_vars(self, key) -> list:
        idx, _ = self._resources[key]
        out = []
        for s in idx:
            self._bound_counter += 1
            out.append(Const(f"r!{self._bound_counter}", s))
        return out

    def _mask_bounds(self, key, mask: Term) -> Term:
        """0 <= M[args] <= 1 for all receivers, with the select as pattern."""
        from ..smt import App

        bvars = self._bound_vars(key)
        sel = self.sel(mask, tuple(bvars))
        body = and_(ge(sel, R_ZERO), le(sel, R_ONE))
        if not bvars or not isinstance(sel, App):
            return body
        return forall([(v.name, v.sort_) for v in bvars], body, [[sel]])

    def _assume_mask_bounds(self, st: SState, key, mask: Term) -> SState:
        if mask in self._seen_masks or isinstance(mask, RealLit):
            return st
        self._seen_masks.add(mask)
        return self.eng.assume(st, self._mask_bounds(key, mask))

    def _update(self, st: SState, key, heap_t: Term, mask_t: Term) -> SState:
        hs = st.heap
        old = hs.maps.get(key)
        if old == (heap_t, mask_t):
            return st
        maps = dict(hs.maps)
        maps[key] = (heap_t, mask_t)
        versions = dict(hs.versions)
        versions[key] = versions.get(key, 0) + 1
        return st.with_heap(TotalHS(maps, versions))

    def maps_for(self, st: SState, key) -> tuple:
        return st.heap.maps[key]

    # -- state handles ---------------------------------------------------------

    def method_entry(self):
        return self._fresh_state()

    def scope_entry(self):
        return self._fresh_state()

    def _fresh_state(self) -> TotalHS:
        maps = {}
        for key in self._resources:
            hsort, _ = self._map_sorts(key)
            h = self.eng.fresh(f"H_{key[1]}", hsort)
            maps[key] = (h, self._zero_mask(key))
        return TotalHS(maps, {k: 0 for k in maps})

    def chunk_count(self, st: SState) -> int:
        # no chunks exist; tests use mask entailments instead
        return 0

    def try_consolidate(self, st: SState):
        # total heaps have no consolidation counterpart
        return None

    def after_unfold_produce(self, st: SState) -> SState:
        return st

    def unknown_tree(self, template) -> Snap:
        if isinstance(template, TUnit):
            return SnapUnit()
        if isinstance(template, TLeaf):
            return SnapLeaf(self.eng.fresh("unk", template.sort))
        return SnapPair(self.unknown_tree(template.left), self.unknown_tree(template.right))

    def _tree_from_snap_term(self, pred: str, snap_term: Term) -> Snap:
        decl = self.program.predicate_decl(pred)
        template = template_of(decl.body, self.program)
        counter = [0]

        def walk(tpl) -> Snap:
            if isinstance(tpl, TUnit):
                return SnapUnit()
            if isinstance(tpl, TLeaf):
                i = counter[0]
                counter[0] += 1
                return SnapLeaf(ufapp(snap_proj(pred, i), [snap_term], tpl.sort))
            return SnapPair(walk(tpl.left), walk(tpl.right))

        return walk(template)

    # -- produce -------------------------------------------------------------------

    def produce_field(self, st: SState, x: Term, fdecl, q: Term, leaf):
        key = ("field", fdecl.name)
        h, m = st.heap.maps[key]
        new_m = self.upd(m, (x,), add(self.sel(m, (x,)), q))
        st = self._update(st, key, h, new_m)
        st = self._assume_mask_bounds(st, key, new_m)
        current = self.sel(h, (x,))
        if leaf is None:
            return st, current
        fact = eq(current, leaf)
        st = self.eng.assume(st, fact)
        return st, leaf

    def produce_pred(self, st: SState, name: str, args: tuple, q: Term, tree: Snap):
        key = ("pred", name)
        h, m = st.heap.maps[key]
        new_m = self.upd(m, args, add(self.sel(m, args), q))
        new_h = h
        if isinstance(tree, SnapLeaf) and tree.value.sort == SNAP:
            # a nested predicate instance: constrain the stored snapshot
            st = self.eng.assume(st, eq(self.sel(h, args), tree.value))
        else:
            leaves = _term_leaves(tree)
            if leaves is not None:
                if leaves:
                    snap_term = ufapp(snap_ctor(name), leaves, SNAP)
                else:
                    snap_term = Const(snap_ctor(name), SNAP)
                new_h = self.upd(h, args, snap_term)
        st = self._update(st, key, new_h, new_m)
        return self._assume_mask_bounds(st, key, new_m)

    # -- reads -----------------------------------------------------------------------

    def read_field(self, st: SState, x: Term, fdecl):
        key = ("field", fdecl.name)
        h, m = st.heap.maps[key]
        sel = self.sel(m, (x,))
        if not self._positive(sel):
            return st, None
        return st, self.sel(h, (x,))

    def _positive(self, sel: Term) -> bool:
        if isinstance(sel, RealLit):
            return sel.value > 0
        return self.eng.entails(lt(R_ZERO, sel))

    def _sufficient(self, q: Term, sel: Term) -> bool:
        if isinstance(sel, RealLit) and isinstance(q, RealLit):
            return q.value <= sel.value
        return self.eng.entails(le(q, sel))

    # -- consume -----------------------------------------------------------------------

    def consume_field(self, st: SState, x: Term, fdecl, q: Term):
        key = ("field", fdecl.name)
        h, m = st.heap.maps[key]
        sel = self.sel(m, (x,))
        leaf = self.sel(h, (x,))
        if isinstance(q, RealLit) and q.value == 0:
            return st, leaf
        if not self._sufficient(q, sel):
            return st, None
        new_m = self.upd(m, (x,), sub(sel, q))
        st = self._update(st, key, h, new_m)
        if self.eng.options.debug_checks:
            remaining = self.sel(new_m, (x,))
            assert self.eng.entails(ge(remaining, R_ZERO)), \
                "mask went negative after a checked consume"
        return st, leaf

    def consume_pred(self, st: SState, name: str, args: tuple, q: Term):
        # the snapshot travels as one Snap-sorted term so it can sit inside
        # an enclosing predicate's snapshot; unfold expands it into leaves
        key = ("pred", name)
        h, m = st.heap.maps[key]
        sel = self.sel(m, args)
        tree = SnapLeaf(self.sel(h, args))
        if isinstance(q, RealLit) and q.value == 0:
            return st, tree
        if not self._sufficient(q, sel):
            return st, None
        new_m = self.upd(m, args, sub(sel, q))
        return self._update(st, key, h, new_m), tree

    def expand_pred_tree(self, name: str, tree: Snap) -> Snap:
        if isinstance(tree, SnapLeaf) and tree.value.sort == SNAP:
            return self._tree_from_snap_term(name, tree.value)
        if isinstance(tree, SnapOpaque):
            decl = self.program.predicate_decl(name)
            return self.unknown_tree(template_of(decl.body, self.program))
        return tree

    def install_field_value(self, st: SState, x: Term, fdecl, value: Term) -> SState:
        key = ("field", fdecl.name)
        h, m = st.heap.maps[key]
        new_h = self.upd(h, (x,), value)
        new_m = self.upd(m, (x,), add(self.sel(m, (x,)), R_ONE))
        st = self._update(st, key, new_h, new_m)
        return self._assume_mask_bounds(st, key, new_m)

    # -- havoc ---------------------------------------------------------------------------

    def havoc_boundary(self, st: SState) -> SState:
        """Fresh heap terms constrained to agree with the old ones on every
        positively-permissioned location."""
        self.counters["havocs"] += 1
        for key in list(st.heap.maps):
            h, m = st.heap.maps[key]
            hsort, _ = self._map_sorts(key)
            h2 = self.eng.fresh(f"H_{key[1]}", hsort)
            bvars = self._bound_vars(key)
            args = tuple(bvars)
            frame = implies(gt(self.sel(m, args), R_ZERO),
                            eq(self.sel(h2, args), self.sel(h, args)))
            if frame != TRUE_TERM:
                if bvars:
                    frame = forall([(v.name, v.sort_) for v in bvars], frame,
                                   [[self.sel(h2, args)]])
                st = self.eng.assume(st, frame)
            st = self._update(st, key, h2, m)
        return st


def _term_leaves(tree: Snap):
    """Leaf terms of a concrete tree, or None when any part is unknown."""
    if isinstance(tree, SnapUnit):
        return []
    if isinstance(tree, SnapLeaf):
        return [tree.value]
    if isinstance(tree, SnapPair):
        left = _term_leaves(tree.left)
        right = _term_leaves(tree.right)
        if left is None or right is None:
            return None
        return left + right
    return None  # opaque
