"""Partial-heap strategies: single-chunk lookup (SE-PS) and chunk-combining
lookup (SE-PC), plus the state consolidation they share.

A heap is an insertion-ordered collection of chunks (receiver, field, value,
permission). SE-PS answers reads and consumes from one chunk; SE-PC combines
all chunks for a field, summing conditional permissions and defining read
results through per-chunk implications. Consolidation merges provably-equal
chunks and derives non-aliasing from permission sums; it runs when a lookup
is about to fail and retries once.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..smt import (
    RealLit,
    Term,
    add,
    and_,
    eq,
    ge,
    gt,
    implies,
    ite,
    le,
    min_term,
    ne,
    real,
    sub,
)
from .state import (
    OPAQUE,
    Snap,
    SnapLeaf,
    SnapOpaque,
    SnapPair,
    SState,
    sort_of,
)

R_ZERO = real(0)
R_ONE = real(1)


def perm_literal(t: Term):
    return t.value if isinstance(t, RealLit) else None


@dataclass(frozen=True)
class Chunk:
    kind: str  # "field" | "pred"
    name: str
    recv: tuple  # receiver terms: (ref,) for fields, argument tuple for predicates
    snap: object  # Term for fields, Snap tree for predicates
    perm: Term

    def describe(self) -> str:
        if self.kind == "field":
            return f"{self.recv[0]}.{self.name}"
        return f"{self.name}({', '.join(map(str, self.recv))})"


@dataclass(frozen=True)
class PartialHeap:
    chunks: tuple = ()
    version: int = 0

    def with_chunks(self, chunks) -> "PartialHeap":
        return PartialHeap(tuple(chunks), self.version + 1)


@dataclass(frozen=True)
class PartialHS:
    heap: PartialHeap
    cache: dict  # (receiver, field, heap version) -> cached read symbol


class PartialStrategy:
    """Heap strategy over chunk collections; `combining=False` is SE-PS,
    `combining=True` is SE-PC."""

    name = "se-ps"
    combining = False

    def __init__(self, engine):
        self.eng = engine
        self.program = engine.program
        self.consolidate_enabled = engine.options.consolidate
        self.counters = {"chunks_read": 0, "chunks_consumed": 0, "consolidations": 0}

    # -- state handles ------------------------------------------------------

    def method_entry(self):
        return PartialHS(PartialHeap(), {})

    def scope_entry(self):
        return PartialHS(PartialHeap(), {})

    def chunk_count(self, st: SState) -> int:
        return len(st.heap.heap.chunks)

    def unknown_tree(self, template) -> Snap:
        return OPAQUE

    # -- produce --------------------------------------------------------------

    def produce_field(self, st: SState, x: Term, fdecl, q: Term, leaf):
        if leaf is None:
            leaf = self.eng.fresh(fdecl.name, sort_of(fdecl.ty))
        if perm_literal(q) == 0:
            return st, leaf
        return self._add_chunk(st, Chunk("field", fdecl.name, (x,), leaf, q)), leaf

    def produce_pred(self, st: SState, name: str, args: tuple, q: Term, tree: Snap):
        if perm_literal(q) == 0:
            return st
        return self._add_chunk(st, Chunk("pred", name, args, tree, q))

    def _add_chunk(self, st: SState, chunk: Chunk) -> SState:
        heap = st.heap.heap
        new_heap = heap.with_chunks(heap.chunks + (chunk,))
        return st.with_heap(PartialHS(new_heap, st.heap.cache))

    # -- reads ---------------------------------------------------------------

    def read_field(self, st: SState, x: Term, fdecl):
        if self.combining:
            return self._pc_read(st, x, fdecl)
        return self._ps_read(st, x, fdecl)

    def _ps_read(self, st: SState, x: Term, fdecl, retried: bool = False):
        found = self._find_chunk(st, "field", fdecl.name, (x,), need=("pos", None))
        if found is not None:
            self.counters["chunks_read"] += 1
            return st, found.snap
        if not retried and self.consolidate_enabled:
            st = self.consolidate(st)
            return self._ps_read(st, x, fdecl, retried=True)
        return st, None

    def _pc_read(self, st: SState, x: Term, fdecl, retried: bool = False):
        key = (x, fdecl.name, st.heap.heap.version)
        cached = st.heap.cache.get(key)
        if cached is not None:
            return st, cached
        relevant = [c for c in st.heap.heap.chunks if c.kind == "field" and c.name == fdecl.name]
        if not self._perm_positive_entailed(st, self.pc_perm(st, x, fdecl.name)):
            if not retried and self.consolidate_enabled:
                st = self.consolidate(st)
                return self._pc_read(st, x, fdecl, retried=True)
            return st, None
        v = self.eng.fresh(fdecl.name, sort_of(fdecl.ty))
        facts = []
        for c in relevant:
            if c.recv[0] == x:
                facts.append(eq(v, c.snap))
            else:
                facts.append(implies(eq(x, c.recv[0]), eq(v, c.snap)))
        st = self.eng.assume(st, and_(*facts))
        cache = dict(st.heap.cache)
        cache[(x, fdecl.name, st.heap.heap.version)] = v
        st = st.with_heap(PartialHS(st.heap.heap, cache))
        return st, v

    def pc_perm(self, st: SState, x: Term, fname: str) -> Term:
        """Effective permission to x.f summed over all chunks."""
        total: Term = R_ZERO
        for c in st.heap.heap.chunks:
            if c.kind == "field" and c.name == fname:
                if c.recv[0] == x:
                    total = add(total, c.perm)
                else:
                    total = add(total, ite(eq(x, c.recv[0]), c.perm, R_ZERO))
        return total

    # -- consume -----------------------------------------------------------------

    def consume_field(self, st: SState, x: Term, fdecl, q: Term):
        if perm_literal(q) == 0:
            return st, self.eng.fresh(fdecl.name, sort_of(fdecl.ty))
        if self.combining:
            return self._pc_consume(st, x, fdecl, q)
        return self._ps_consume(st, x, fdecl, q)

    def _ps_consume(self, st: SState, x: Term, fdecl, q: Term, retried: bool = False):
        found = self._find_chunk(st, "field", fdecl.name, (x,), need=("geq", q))
        if found is not None:
            self.counters["chunks_consumed"] += 1
            st = self._replace_perm(st, found, sub(found.perm, q))
            return st, found.snap
        if not retried and self.consolidate_enabled:
            st = self.consolidate(st)
            return self._ps_consume(st, x, fdecl, q, retried=True)
        if perm_literal(q) is None and self.eng.entails(eq(q, R_ZERO)):
            return st, self.eng.fresh(fdecl.name, sort_of(fdecl.ty))
        return st, None

    def _pc_consume(self, st: SState, x: Term, fdecl, q: Term, retried: bool = False):
        # the combined value is sound to assemble regardless of permissions
        st, leaf = self._pc_read(st, x, fdecl)
        if leaf is None:
            leaf = self.eng.fresh(fdecl.name, sort_of(fdecl.ty))
        if not self.eng.entails(le(q, self.pc_perm(st, x, fdecl.name))):
            if not retried and self.consolidate_enabled:
                st = self.consolidate(st)
                return self._pc_consume(st, x, fdecl, q, retried=True)
            return st, None
        heap = st.heap.heap
        remaining: Term = q
        new_chunks = []
        for c in heap.chunks:
            if not (c.kind == "field" and c.name == fdecl.name):
                new_chunks.append(c)
                continue
            self.counters["chunks_consumed"] += 1
            if c.recv[0] == x:
                take = min_term(c.perm, remaining)
            else:
                take = ite(eq(x, c.recv[0]), min_term(c.perm, remaining), R_ZERO)
            new_perm = sub(c.perm, take)
            remaining = sub(remaining, take)
            if perm_literal(new_perm) != 0:
                new_chunks.append(replace(c, perm=new_perm))
        return st.with_heap(PartialHS(heap.with_chunks(new_chunks), st.heap.cache)), leaf

    def consume_pred(self, st: SState, name: str, args: tuple, q: Term, retried: bool = False):
        if perm_literal(q) == 0:
            return st, OPAQUE
        found = self._find_chunk(st, "pred", name, args, need=("geq", q))
        if found is not None:
            self.counters["chunks_consumed"] += 1
            st = self._replace_perm(st, found, sub(found.perm, q))
            return st, found.snap
        if not retried and self.consolidate_enabled:
            st = self.consolidate(st)
            return self.consume_pred(st, name, args, q, retried=True)
        if perm_literal(q) is None and self.eng.entails(eq(q, R_ZERO)):
            return st, OPAQUE
        return st, None

    def install_field_value(self, st: SState, x: Term, fdecl, value: Term) -> SState:
        return self._add_chunk(st, Chunk("field", fdecl.name, (x,), value, R_ONE))

    def havoc_boundary(self, st: SState) -> SState:
        # consumed chunks are already gone, surviving chunks stay owned
        return st

    # -- chunk search ----------------------------------------------------------

    def _find_chunk(self, st: SState, kind: str, name: str, recv: tuple, need):
        chunks = st.heap.heap.chunks
        mode, q = need
        candidates = [c for c in chunks if c.kind == kind and c.name == name]
        for c in candidates:
            if c.recv == recv and self._perm_ok(st, c.perm, mode, q):
                return c
        for c in candidates:
            if c.recv == recv:
                continue
            if self._receivers_equal(st, recv, c.recv) and self._perm_ok(st, c.perm, mode, q):
                return c
        return None

    def _receivers_equal(self, st: SState, a: tuple, b: tuple) -> bool:
        eqs = [eq(x, y) for x, y in zip(a, b) if x != y]
        if not eqs:
            return True
        return self.eng.entails(and_(*eqs))

    def _perm_ok(self, st: SState, p: Term, mode: str, q: Term | None) -> bool:
        if mode == "pos":
            lit = perm_literal(p)
            if lit is not None:
                return lit > 0
            return self.eng.entails(gt(p, R_ZERO))
        lp, lq = perm_literal(p), perm_literal(q)
        if lp is not None and lq is not None:
            return lq <= lp
        return self.eng.entails(le(q, p))

    def _perm_positive_entailed(self, st: SState, p: Term) -> bool:
        lit = perm_literal(p)
        if lit is not None:
            return lit > 0
        return self.eng.entails(gt(p, R_ZERO))

    def _replace_perm(self, st: SState, chunk: Chunk, new_perm: Term) -> SState:
        heap = st.heap.heap
        new_chunks = []
        replaced = False
        for c in heap.chunks:
            if c is chunk and not replaced:
                replaced = True
                if perm_literal(new_perm) != 0:
                    new_chunks.append(replace(c, perm=new_perm))
            else:
                new_chunks.append(c)
        return st.with_heap(PartialHS(heap.with_chunks(new_chunks), st.heap.cache))

    # -- consolidation ------------------------------------------------------------

    def consolidate(self, st: SState) -> SState:
        """Merge chunks with provably-equal receivers, then derive permission
        bounds and non-aliasing facts from permission sums."""
        self.counters["consolidations"] += 1
        chunks = list(st.heap.heap.chunks)
        changed = True
        while changed:
            changed = False
            for i in range(len(chunks)):
                for j in range(i + 1, len(chunks)):
                    ci, cj = chunks[i], chunks[j]
                    if ci.kind != cj.kind or ci.name != cj.name:
                        continue
                    if ci.kind == "pred":
                        if ci.recv != cj.recv:
                            continue  # predicate chunks merge on syntactic equality only
                    elif not self._receivers_equal(st, ci.recv, cj.recv):
                        continue
                    for fact in _snap_eq_facts(ci.snap, cj.snap):
                        st = self.eng.assume(st, fact)
                    merged = replace(ci, perm=add(ci.perm, cj.perm),
                                     snap=_prefer_concrete(ci.snap, cj.snap))
                    chunks[i] = merged
                    del chunks[j]
                    changed = True
                    break
                if changed:
                    break
        fields = [c for c in chunks if c.kind == "field"]
        for i in range(len(fields)):
            for j in range(i + 1, len(fields)):
                a, b = fields[i], fields[j]
                if a.name != b.name:
                    continue
                st = self._assume_once(st, implies(gt(add(a.perm, b.perm), R_ONE),
                                                   ne(a.recv[0], b.recv[0])))
        for c in chunks:
            st = self._assume_once(st, ge(c.perm, R_ZERO))
            if c.kind == "field":
                st = self._assume_once(st, le(c.perm, R_ONE))
        chunks = [c for c in chunks if perm_literal(c.perm) != 0]
        return st.with_heap(PartialHS(st.heap.heap.with_chunks(chunks), st.heap.cache))

    def _assume_once(self, st: SState, fact: Term) -> SState:
        if fact in st.pcs or fact == TRUE_TERM:
            return st
        return self.eng.assume(st, fact)

    def try_consolidate(self, st: SState):
        if not self.consolidate_enabled:
            return None
        return self.consolidate(st)

    def after_unfold_produce(self, st: SState) -> SState:
        if self.consolidate_enabled:
            return self.consolidate(st)
        return st

    def expand_pred_tree(self, name: str, tree):
        # partial-heap snapshots already nest structurally
        return tree


TRUE_TERM = and_()


class CombiningStrategy(PartialStrategy):
    name = "se-pc"
    combining = True


def _snap_eq_facts(a, b) -> list:
    if isinstance(a, Term) and isinstance(b, Term):
        return [eq(a, b)]
    if isinstance(a, SnapOpaque) or isinstance(b, SnapOpaque):
        return []
    if isinstance(a, SnapLeaf) and isinstance(b, SnapLeaf):
        return [eq(a.value, b.value)]
    if isinstance(a, SnapPair) and isinstance(b, SnapPair):
        return _snap_eq_facts(a.left, b.left) + _snap_eq_facts(a.right, b.right)
    return []


def _prefer_concrete(a, b):
    return b if isinstance(a, SnapOpaque) else a
