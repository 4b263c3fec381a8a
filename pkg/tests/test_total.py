"""Mask and heap term algebra of the total-heap strategy."""

from fractions import Fraction

import pytest

from permver.algorithms import AlgorithmId, open_task_session
from permver.lang import parse, typecheck_strict
from permver.se import Engine, EngineOptions, TotalStrategy
from permver.se.state import SState
from permver.smt import REF, eq, le, lt, ne, or_, real

from conftest import make_cfg

PROGRAM = typecheck_strict(parse("field f: Int\nfield g: Int"))
FDECL = PROGRAM.field_decl("f")
HALF = real(Fraction(1, 2))
ONE = real(1)


@pytest.fixture
def tr():
    cfg = make_cfg()
    session = open_task_session(PROGRAM, AlgorithmId.SE_TR, cfg)
    eng = Engine(PROGRAM, TotalStrategy, session, EngineOptions())
    yield eng
    session.close()


def fresh_state(eng) -> SState:
    return SState(store=(), heap=eng.strategy.method_entry())


def test_read_after_produce(tr):
    x = tr.fresh("x", REF)
    st = fresh_state(tr)
    st, _ = tr.strategy.produce_field(st, x, FDECL, ONE, None)
    st2, val = tr.strategy.read_field(st, x, FDECL)
    assert val is not None


def test_mask_sums_in_one_map_without_consolidation(tr):
    x = tr.fresh("x", REF)
    st = fresh_state(tr)
    st, _ = tr.strategy.produce_field(st, x, FDECL, HALF, None)
    st, _ = tr.strategy.produce_field(st, x, FDECL, HALF, None)
    st2, val = tr.strategy.read_field(st, x, FDECL)
    assert val is not None
    # full permission available: a consume of 1 succeeds
    st3, leaf = tr.strategy.consume_field(st2, x, FDECL, ONE)
    assert leaf is not None


def test_disjunctive_aliasing_read_succeeds(tr):
    x, y, z = (tr.fresh(n, REF) for n in "xyz")
    st = fresh_state(tr)
    st, _ = tr.strategy.produce_field(st, y, FDECL, ONE, None)
    st, _ = tr.strategy.produce_field(st, z, FDECL, ONE, None)
    st = tr.assume(st, or_(eq(x, y), eq(x, z)))
    st2, val = tr.strategy.read_field(st, x, FDECL)
    assert val is not None
    st3, leaf = tr.strategy.consume_field(st2, x, FDECL, ONE)
    assert leaf is not None


def test_produce_consume_collapses_mask_term(tr):
    x = tr.fresh("x", REF)
    st = fresh_state(tr)
    _, mask_before = st.heap.maps[("field", "f")]
    st, _ = tr.strategy.produce_field(st, x, FDECL, HALF, None)
    st2, _ = tr.strategy.consume_field(st, x, FDECL, HALF)
    _, mask_after = st2.heap.maps[("field", "f")]
    assert mask_after == mask_before


def test_consume_more_than_held_fails(tr):
    x = tr.fresh("x", REF)
    st = fresh_state(tr)
    st, _ = tr.strategy.produce_field(st, x, FDECL, HALF, None)
    st2, leaf = tr.strategy.consume_field(st, x, FDECL, ONE)
    assert leaf is None


def test_unrelated_receiver_mask_unchanged(tr):
    y, z, w = (tr.fresh(n, REF) for n in "yzw")
    st = fresh_state(tr)
    st, _ = tr.strategy.produce_field(st, y, FDECL, ONE, None)
    st, _ = tr.strategy.produce_field(st, z, FDECL, ONE, None)
    st, _ = tr.strategy.consume_field(st, y, FDECL, ONE)
    st, _ = tr.strategy.consume_field(st, z, FDECL, HALF)
    _, mask = st.heap.maps[("field", "f")]
    sel_w = tr.strategy.sel(mask, (w,))
    st = tr.assume(st, ne(w, y))
    st = tr.assume(st, ne(w, z))
    assert tr.entails(eq(sel_w, real(0)))


def test_two_full_produces_entail_nonaliasing(tr):
    x, y = (tr.fresh(n, REF) for n in "xy")
    st = fresh_state(tr)
    st, _ = tr.strategy.produce_field(st, x, FDECL, ONE, None)
    st, _ = tr.strategy.produce_field(st, y, FDECL, ONE, None)
    assert tr.entails(ne(x, y))


def test_produce_zero_changes_nothing_provable(tr):
    x = tr.fresh("x", REF)
    st = fresh_state(tr)
    _, mask0 = st.heap.maps[("field", "f")]
    st, _ = tr.strategy.produce_field(st, x, FDECL, real(0), None)
    _, mask1 = st.heap.maps[("field", "f")]
    sel = tr.strategy.sel(mask1, (x,))
    assert tr.entails(eq(sel, real(0)))


def test_produce_with_value_constraint(tr):
    from permver.smt import IntLit

    x = tr.fresh("x", REF)
    st = fresh_state(tr)
    st, leaf = tr.strategy.produce_field(st, x, FDECL, ONE, IntLit(41))
    st2, val = tr.strategy.read_field(st, x, FDECL)
    assert tr.entails(eq(val, IntLit(41)))


def test_havoc_preserves_owned_values(tr):
    from permver.smt import IntLit

    x = tr.fresh("x", REF)
    st = fresh_state(tr)
    st, _ = tr.strategy.produce_field(st, x, FDECL, ONE, IntLit(7))
    st = tr.strategy.havoc_boundary(st)
    st2, val = tr.strategy.read_field(st, x, FDECL)
    assert tr.entails(eq(val, IntLit(7)))


def test_havoc_forgets_unowned_values(tr):
    from permver.smt import IntLit

    x = tr.fresh("x", REF)
    st = fresh_state(tr)
    st, _ = tr.strategy.produce_field(st, x, FDECL, ONE, IntLit(7))
    st, _ = tr.strategy.consume_field(st, x, FDECL, ONE)
    st = tr.strategy.havoc_boundary(st)
    _, (h, m) = ("_", st.heap.maps[("field", "f")])
    sel = tr.strategy.sel(h, (x,))
    assert not tr.entails(eq(sel, IntLit(7)))


def test_version_increments_exactly_on_term_change(tr):
    x = tr.fresh("x", REF)
    st = fresh_state(tr)
    key = ("field", "f")
    v0 = st.heap.versions[key]
    st, _ = tr.strategy.produce_field(st, x, FDECL, real(0), None)  # no-op
    assert st.heap.versions[key] == v0
    st, _ = tr.strategy.produce_field(st, x, FDECL, HALF, None)
    assert st.heap.versions[key] == v0 + 1


def test_no_consolidation_api_surface(tr):
    assert tr.strategy.try_consolidate(fresh_state(tr)) is None
    assert not hasattr(tr.strategy, "consolidate")


def test_mask_nonnegativity_spot_check(tr):
    x, y = (tr.fresh(n, REF) for n in "xy")
    st = fresh_state(tr)
    st, _ = tr.strategy.produce_field(st, x, FDECL, ONE, None)
    st, _ = tr.strategy.consume_field(st, x, FDECL, HALF)
    _, mask = st.heap.maps[("field", "f")]
    assert tr.entails(le(real(0), tr.strategy.sel(mask, (y,))))
    assert tr.entails(le(real(0), tr.strategy.sel(mask, (x,))))
