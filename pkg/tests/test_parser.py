from pathlib import Path

import pytest

from permver.lang import ParseError, parse, pretty, typecheck
from permver.lang.ast import (
    AAcc,
    APred,
    ASep,
    FieldDecl,
    PermLit,
    SInhale,
    TypeTag,
)

from conftest import CORPUS


def test_minimal_field_declaration():
    prog = parse("field f: Int")
    assert prog.fields == [FieldDecl("f", TypeTag.INT)]
    assert not prog.methods and not prog.predicates


def test_name_resolution_is_not_the_parsers_job():
    # x is undeclared but parsing succeeds; typecheck rejects later
    prog = parse("method m() { inhale acc(x.f) }")
    assert isinstance(prog.methods[0].body[0], SInhale)
    assert typecheck(prog)  # diagnostics are non-empty


def test_fractional_permission_literal():
    prog = parse("field f: Int\nmethod m(x: Ref) { inhale acc(x.f, 1/2) }")
    diags = typecheck(prog)
    assert not diags
    acc = prog.methods[0].body[0].assertion
    assert isinstance(acc, AAcc)
    assert acc.perm == PermLit(1, 2)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as exc:
        parse("method m() { inhale }")
    assert exc.value.pos.line == 1
    assert exc.value.pos.col > 0


def test_expected_token_message():
    with pytest.raises(ParseError, match="expected"):
        parse("field f Int")


def test_assertion_structures():
    prog = parse(
        """
field f: Int
predicate P(r: Ref) { acc(r.f) }
method m(x: Ref, b: Bool) {
    inhale acc(x.f) && x.f == 1
    inhale b ==> acc(x.f, 1/2)
    inhale (b ? acc(x.f) : x.f == 0)
    inhale P(x) && acc(P(x), 1/2)
}
"""
    )
    body = prog.methods[0].body
    assert isinstance(body[0].assertion, ASep)
    assert body[1].assertion.__class__.__name__ == "AImplies"
    assert body[2].assertion.__class__.__name__ == "ACond"
    both = body[3].assertion
    assert isinstance(both.left, APred) and both.left.perm is None
    assert isinstance(both.right, APred) and both.right.perm is not None


def test_statement_forms_roundtrip():
    src = """field f: Int

predicate P(r: Ref) {
    acc(r.f)
}

method m(x: Ref, b: Bool) returns (r: Int)
    requires acc(x.f)
    ensures r >= 0
{
    var t: Int := 0
    t := t + 1
    x.f := t
    r := x.f
    inhale b
    exhale acc(x.f, 1/2)
    assert acc(x.f, 1/2)
    assume r >= 0
    if (b) {
        r := 1
    } else {
        r := 2
    }
    while (r > 0)
        invariant r >= 0
    {
        r := r - 1
    }
    fold P(x)
    unfold P(x)
    r := helper(r)
    helper(r)
}

method helper(a: Int) returns (out: Int)
{
    out := a
}
"""
    prog = parse(src)
    printed = pretty(prog)
    assert parse(printed) == prog


@pytest.mark.parametrize("name", sorted(p.name for p in CORPUS.glob("*.pv")))
def test_corpus_roundtrip(name):
    text = (CORPUS / name).read_text()
    prog = parse(text)
    assert parse(pretty(prog)) == prog
