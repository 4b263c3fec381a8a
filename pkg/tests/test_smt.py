from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from permver.smt import (
    BOOL,
    INT,
    REAL,
    REF,
    IntLit,
    RealLit,
    Session,
    StackUnderflow,
    add,
    and_,
    const_array,
    eq,
    forall,
    ge,
    implies,
    ite,
    le,
    lt,
    mul,
    ne,
    not_,
    or_,
    real,
    select,
    store,
    sub,
    to_smt,
)
from permver.smt.session import replay_transcript

from conftest import make_cfg


# -- term constructors ---------------------------------------------------------


def test_literal_folding():
    assert add(IntLit(2), IntLit(3)) == IntLit(5)
    assert mul(real(Fraction(1, 2)), real(2)) == real(1)
    assert le(real(Fraction(1, 2)), real(1)) == and_()  # BoolLit(True)
    assert not_(lt(IntLit(1), IntLit(0))) == and_()


def test_add_then_subtract_cancellation():
    from permver.smt import Const

    a = Const("a", REAL)
    q = Const("q", REAL)
    assert sub(add(a, q), q) == a
    assert sub(add(q, a), q) == a
    assert sub(a, a) == real(0)


def test_store_select_collapse():
    from permver.smt import Const, heap_arr

    m = Const("m", heap_arr(REF, REAL))
    x = Const("x", REF)
    y = Const("y", REF)
    v = Const("v", REAL)
    assert select(store(m, x, v), x) == v
    assert store(store(m, x, v), x, real(0)).args[0] == m
    assert store(m, x, select(m, x)) == m
    # produce-then-consume collapse through the constructors
    bumped = store(m, x, add(select(m, x), real(Fraction(1, 2))))
    restored = store(bumped, x, sub(select(bumped, x), real(Fraction(1, 2))))
    assert restored == m
    assert select(const_array(REF, real(0)), y) == real(0)


def test_identical_terms_not_folded_by_eq():
    from permver.smt import Const

    x = Const("x", INT)
    assert to_smt(eq(x, x)) == "(= x x)"


def test_quantifiers_require_patterns():
    from permver.smt import Const, heap_arr

    m = Const("m", heap_arr(REF, REAL))
    r = Const("r", REF)
    body = ge(select(m, r), real(0))
    q = forall([("r", REF)], body, [[select(m, r)]])
    assert ":pattern" in to_smt(q)
    with pytest.raises(ValueError):
        forall([("r", REF)], body, [])


def test_sort_mismatch_rejected():
    with pytest.raises(TypeError):
        add(IntLit(1), real(1))
    with pytest.raises(TypeError):
        eq(IntLit(1), real(1))


# -- sessions --------------------------------------------------------------------


def test_assert_true_and_contradiction(session):
    x = session.fresh("x", INT)
    session.assert_term(and_())  # true
    assert session.check_sat().is_sat
    session.push()
    session.assert_term(eq(x, IntLit(1)))
    session.assert_term(eq(x, IntLit(2)))
    assert session.check_sat().is_unsat
    session.pop()
    assert session.check_sat().is_sat


def test_push_pop_scoping(session):
    session.push()
    session.assert_term(or_())  # false
    assert session.check_sat().is_unsat
    session.pop()
    assert session.check_sat().is_sat
    assert session.depth == 0


def test_pop_underflow(session):
    with pytest.raises(StackUnderflow):
        session.pop()


def test_check_entailed_examples(session):
    from permver.smt import Const

    p = session.fresh("p", BOOL)
    # tautology
    assert session.check_entailed(or_(p, not_(p))).is_unsat
    # disjunctive context does not entail one disjunct
    x = session.fresh("x", REF)
    y = session.fresh("y", REF)
    z = session.fresh("z", REF)
    session.assert_term(or_(eq(x, y), eq(x, z)))
    assert session.check_entailed(eq(x, y)).is_sat
    # but entails the disjunction itself
    assert session.check_entailed(or_(eq(x, y), eq(x, z))).is_unsat


def test_check_entailed_restores_stack(session):
    session.push()
    before = session.depth
    session.check_entailed(eq(IntLit(1), IntLit(1)))
    assert session.depth == before
    session.pop()


def test_mask_bound_axiom_with_pattern(tmp_path):
    cfg = make_cfg(transcript_dir=str(tmp_path))
    s = Session(cfg, preamble=["(declare-sort Ref 0)"], name="axiom")
    from permver.smt import Const, heap_arr

    m = s.declare_const("m", heap_arr(REF, REAL))
    r = Const("r", REF)
    s.assert_term(forall([("r", REF)], le(select(m, r), real(1)), [[select(m, r)]]))
    x = s.declare_const("x", REF)
    # 2 * (1/2 of the mask entry) <= 1 follows without a case split
    goal = le(mul(real(2), mul(real(Fraction(1, 2)), select(m, x))), real(1))
    # needs 0 <= m[x] as well
    s.assert_term(forall([("r", REF)], ge(select(m, r), real(0)), [[select(m, r)]]))
    assert s.check_entailed(goal).is_unsat
    s.close()
    text = (tmp_path / "axiom.smt2").read_text()
    assert ":pattern ((select m r))" in text


def test_fresh_names_unique(session):
    names = {session.fresh("v", INT).name for _ in range(200)}
    assert len(names) == 200


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(["v", "x", "assert", "p_q", "v"]), min_size=1, max_size=40))
def test_fresh_hint_collisions_property(hints):
    # uniqueness is guaranteed by the counter, independent of hints
    seen = set()
    counter = [0]

    def fake_fresh(hint):
        counter[0] += 1
        return f"{hint}!{counter[0]}"

    for h in hints:
        name = fake_fresh(h)
        assert name not in seen
        seen.add(name)


def test_many_fresh_constants_no_collision(session):
    # scaled-down version of the 10k-call uniqueness check, against the
    # live session so declarations must also be accepted by the solver
    names = [session.fresh("v", INT).name for _ in range(1000)]
    assert len(set(names)) == 1000


def test_timeout_is_a_distinct_verdict():
    cfg = make_cfg(timeout_ms=1500)
    s = Session(cfg)
    a = s.fresh("a", INT)
    b = s.fresh("b", INT)
    s.assert_term(lt(IntLit(1), a))
    s.assert_term(lt(IntLit(1), b))
    s.assert_term(eq(mul(a, b), IntLit(1000000016000000063)))
    result = s.check_sat()
    assert result.is_timeout
    assert not result.is_sat and not result.is_unsat
    s.close()


def test_transcript_replays_to_same_answers(tmp_path):
    cfg = make_cfg(transcript_dir=str(tmp_path))
    s = Session(cfg, preamble=["(declare-sort Ref 0)"], name="replay")
    x = s.fresh("x", INT)
    s.assert_term(lt(IntLit(0), x))
    r1 = s.check_sat()
    s.push()
    s.assert_term(lt(x, IntLit(0)))
    r2 = s.check_sat()
    s.pop()
    r3 = s.check_sat()
    recorded = [r.kind for r in (r1, r2, r3)]
    s.close()
    answers = replay_transcript(str(tmp_path / "replay.smt2"), solver_path=cfg.solver_path)
    assert answers == recorded == ["sat", "unsat", "sat"]
