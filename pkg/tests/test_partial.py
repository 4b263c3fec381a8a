"""Chunk-level behavior of the two partial-heap strategies, driven against a
live solver through a minimal engine harness."""

from fractions import Fraction

import pytest

from permver.algorithms import AlgorithmId, open_task_session
from permver.lang import parse, typecheck_strict
from permver.se import CombiningStrategy, Engine, EngineOptions, PartialStrategy
from permver.se.partial import Chunk, PartialHeap, PartialHS
from permver.se.state import SState
from permver.smt import Const, REF, and_, eq, ge, le, lt, ne, or_, real

from conftest import make_cfg

PROGRAM = typecheck_strict(parse("field f: Int\nfield g: Int"))
FDECL = PROGRAM.field_decl("f")


@pytest.fixture(params=["ps", "pc"])
def harness(request):
    cfg = make_cfg()
    session = open_task_session(PROGRAM, AlgorithmId.SE_PS, cfg)
    cls = PartialStrategy if request.param == "ps" else CombiningStrategy
    eng = Engine(PROGRAM, cls, session, EngineOptions())
    yield eng
    session.close()


@pytest.fixture
def ps(request):
    cfg = make_cfg()
    session = open_task_session(PROGRAM, AlgorithmId.SE_PS, cfg)
    eng = Engine(PROGRAM, PartialStrategy, session, EngineOptions())
    yield eng
    session.close()


@pytest.fixture
def pc():
    cfg = make_cfg()
    session = open_task_session(PROGRAM, AlgorithmId.SE_PC, cfg)
    eng = Engine(PROGRAM, CombiningStrategy, session, EngineOptions())
    yield eng
    session.close()


def state_with(eng, chunks, store=()):
    return SState(store=tuple(store), heap=PartialHS(PartialHeap(tuple(chunks), 0), {}))


def chunk(recv, perm, value):
    return Chunk("field", "f", (recv,), value, real(Fraction(perm)))


def refs(eng, *names):
    return [eng.fresh(n, REF) for n in names]


def int_const(eng, name):
    from permver.smt import INT

    return eng.fresh(name, INT)


# -- single-chunk reads --------------------------------------------------------


def test_ps_read_syntactic_match_zero_queries(ps):
    x, = refs(ps, "x")
    v = int_const(ps, "v")
    st = state_with(ps, [chunk(x, 1, v)])
    before = ps.session.query_count
    st2, got = ps.strategy.read_field(st, x, FDECL)
    assert got == v
    assert ps.session.query_count == before


def test_ps_read_alias_by_equality(ps):
    x, y = refs(ps, "x", "y")
    v = int_const(ps, "v")
    st = state_with(ps, [chunk(y, 1, v)])
    st = ps.assume(st, eq(x, y))
    before = ps.session.query_count
    st2, got = ps.strategy.read_field(st, x, FDECL)
    assert got == v
    assert ps.session.query_count == before + 1


def test_ps_read_disjunctive_aliasing_fails(ps):
    x, y, z = refs(ps, "x", "y", "z")
    v, w = int_const(ps, "v"), int_const(ps, "w")
    st = state_with(ps, [chunk(y, Fraction(1, 2), v), chunk(z, Fraction(1, 2), w)])
    st = ps.assume(st, or_(eq(x, y), eq(x, z)))
    st2, got = ps.strategy.read_field(st, x, FDECL)
    assert got is None


def test_ps_reads_touch_exactly_one_chunk(ps):
    x, y = refs(ps, "x", "y")
    v, w = int_const(ps, "v"), int_const(ps, "w")
    st = state_with(ps, [chunk(x, 1, v), chunk(y, 1, w)])
    ps.strategy.counters["chunks_read"] = 0
    ps.strategy.read_field(st, x, FDECL)
    ps.strategy.read_field(st, y, FDECL)
    assert ps.strategy.counters["chunks_read"] == 2


# -- single-chunk consume ----------------------------------------------------------


def test_ps_consume_partial_amount(ps):
    x, = refs(ps, "x")
    v = int_const(ps, "v")
    st = state_with(ps, [chunk(x, 1, v)])
    st2, leaf = ps.strategy.consume_field(st, x, FDECL, real(Fraction(1, 2)))
    assert leaf == v
    chunks = st2.heap.heap.chunks
    assert len(chunks) == 1
    assert chunks[0].perm == real(Fraction(1, 2))


def test_ps_consume_split_chunks_needs_consolidation(ps):
    x, = refs(ps, "x")
    v = int_const(ps, "v")
    st = state_with(ps, [chunk(x, Fraction(1, 2), v), chunk(x, Fraction(1, 2), v)])
    st2, leaf = ps.strategy.consume_field(st, x, FDECL, real(1))
    assert leaf is not None  # consolidation merged the halves
    assert len(st2.heap.heap.chunks) == 0

    # and fails outright with consolidation disabled
    ps.strategy.consolidate_enabled = False
    st3 = state_with(ps, [chunk(x, Fraction(1, 2), v), chunk(x, Fraction(1, 2), v)])
    st4, leaf2 = ps.strategy.consume_field(st3, x, FDECL, real(1))
    assert leaf2 is None
    ps.strategy.consolidate_enabled = True


def test_ps_consume_insufficient_always_fails(ps):
    x, = refs(ps, "x")
    v = int_const(ps, "v")
    st = state_with(ps, [chunk(x, Fraction(1, 2), v)])
    st2, leaf = ps.strategy.consume_field(st, x, FDECL, real(1))
    assert leaf is None


# -- consolidation ------------------------------------------------------------------


def test_consolidate_merges_entailed_equal_receivers(ps):
    x, y = refs(ps, "x", "y")
    v, w = int_const(ps, "v"), int_const(ps, "w")
    st = state_with(ps, [chunk(x, Fraction(1, 2), v), chunk(y, Fraction(1, 2), w)])
    st = ps.assume(st, eq(x, y))
    st2 = ps.strategy.consolidate(st)
    chunks = st2.heap.heap.chunks
    assert len(chunks) == 1
    assert chunks[0].perm == real(1)
    # snapshot equality was assumed, not checked
    assert ps.entails(eq(v, w))


def test_consolidate_derives_nonaliasing_from_permission_sums(ps):
    x, y = refs(ps, "x", "y")
    v, w = int_const(ps, "v"), int_const(ps, "w")
    st = state_with(ps, [chunk(x, 1, v), chunk(y, 1, w)])
    assert not ps.entails(ne(x, y))
    st2 = ps.strategy.consolidate(st)
    assert ps.entails(ne(x, y))


def test_consolidate_empty_heap_noop(ps):
    st = state_with(ps, [])
    st2 = ps.strategy.consolidate(st)
    assert st2.heap.heap.chunks == ()


def test_no_zero_permission_chunk_survives(harness):
    eng = harness
    x, = refs(eng, "x")
    v = int_const(eng, "v")
    st = state_with(eng, [chunk(x, Fraction(1, 2), v)])
    st2, _ = eng.strategy.consume_field(st, x, FDECL, real(Fraction(1, 2)))
    assert all(c.perm != real(0) for c in st2.heap.heap.chunks)
    assert len(st2.heap.heap.chunks) == 0


# -- chunk-combining reads -----------------------------------------------------------


def test_pc_read_disjunctive_aliasing_succeeds(pc):
    x, y, z = refs(pc, "x", "y", "z")
    v, w = int_const(pc, "v"), int_const(pc, "w")
    st = state_with(pc, [chunk(y, Fraction(1, 2), v), chunk(z, Fraction(1, 2), w)])
    st = pc.assume(st, or_(eq(x, y), eq(x, z)))
    st2, got = pc.strategy.read_field(st, x, FDECL)
    assert got is not None
    # the combined value is pinned by the per-chunk implications
    assert pc.entails(or_(eq(got, v), eq(got, w)))


def test_pc_read_single_chunk_collapses(pc):
    x, = refs(pc, "x")
    v = int_const(pc, "v")
    st = state_with(pc, [chunk(x, 1, v)])
    st2, got = pc.strategy.read_field(st, x, FDECL)
    assert pc.entails(eq(got, v))


def test_pc_repeated_read_hits_cache(pc):
    x, = refs(pc, "x")
    v = int_const(pc, "v")
    st = state_with(pc, [chunk(x, 1, v)])
    st2, got1 = pc.strategy.read_field(st, x, FDECL)
    before = pc.session.query_count
    st3, got2 = pc.strategy.read_field(st2, x, FDECL)
    assert got1 == got2
    assert pc.session.query_count == before


# -- effective permission -----------------------------------------------------------


def test_pc_perm_empty_sum_is_zero(pc):
    x, = refs(pc, "x")
    st = state_with(pc, [])
    assert pc.strategy.pc_perm(st, x, "f") == real(0)


def test_pc_perm_same_receiver_sums_to_one(pc):
    x, = refs(pc, "x")
    v = int_const(pc, "v")
    st = state_with(pc, [chunk(x, Fraction(1, 2), v), chunk(x, Fraction(1, 2), v)])
    total = pc.strategy.pc_perm(st, x, "f")
    assert pc.entails(ge(total, real(1)))


def test_pc_perm_disjunctive_lower_bound(pc):
    x, y, z = refs(pc, "x", "y", "z")
    v, w = int_const(pc, "v"), int_const(pc, "w")
    st = state_with(pc, [chunk(y, Fraction(1, 2), v), chunk(z, Fraction(1, 2), w)])
    st = pc.assume(st, or_(eq(x, y), eq(x, z)))
    total = pc.strategy.pc_perm(st, x, "f")
    assert pc.entails(ge(total, real(Fraction(1, 2))))


# -- combining consume ----------------------------------------------------------------


def test_pc_consume_full_leaves_provably_nothing(pc):
    x, = refs(pc, "x")
    v = int_const(pc, "v")
    st = state_with(pc, [chunk(x, 1, v)])
    st2, leaf = pc.strategy.consume_field(st, x, FDECL, real(1))
    assert leaf is not None
    total = pc.strategy.pc_perm(st2, x, "f")
    assert pc.entails(le(total, real(0)))


def test_pc_consume_disjunctive_aliasing_succeeds(pc):
    x, y, z = refs(pc, "x", "y", "z")
    v, w = int_const(pc, "v"), int_const(pc, "w")
    st = state_with(pc, [chunk(y, 1, v), chunk(z, 1, w)])
    st = pc.assume(st, or_(eq(x, y), eq(x, z)))
    st2, leaf = pc.strategy.consume_field(st, x, FDECL, real(1))
    assert leaf is not None


def test_pc_consume_half_from_split_chunks(pc):
    x, = refs(pc, "x")
    v = int_const(pc, "v")
    st = state_with(pc, [chunk(x, Fraction(1, 2), v), chunk(x, Fraction(1, 2), v)])
    st2, _ = pc.strategy.consume_field(st, x, FDECL, real(Fraction(1, 2)))
    total = pc.strategy.pc_perm(st2, x, "f")
    assert pc.entails(ge(total, real(Fraction(1, 2))))
    assert pc.entails(le(total, real(Fraction(1, 2))))
