"""Canonical pretty printer; parse . pretty . parse is the identity."""

from __future__ import annotations

from .ast import (
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
    NullLit,
    Old,
    PermLit,
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
    Unary,
    Var,
)

_PREC = {
    "==>": 1, "||": 2, "&&": 3,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6, "/": 6,
}


def expr_str(e: Expr, parent_prec: int = 0) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, NullLit):
        return "null"
    if isinstance(e, PermLit):
        if e.spelling:
            return e.spelling
        if (e.num, e.den) == (0, 1):
            return "none"
        if (e.num, e.den) == (1, 1):
            return "write"
        return f"{e.num}/{e.den}"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, FieldRead):
        return f"{expr_str(e.recv, 7)}.{e.field_name}"
    if isinstance(e, Old):
        return f"old({expr_str(e.expr)})"
    if isinstance(e, Unary):
        return f"{e.op}{expr_str(e.operand, 7)}"
    if isinstance(e, Binary):
        prec = _PREC[e.op]
        right_prec = prec if e.op == "==>" else prec + 1
        s = f"{expr_str(e.left, prec)} {e.op} {expr_str(e.right, right_prec)}"
        return f"({s})" if prec < parent_prec else s
    raise TypeError(f"cannot print {e!r}")


def assertion_str(a: Assertion, parent_prec: int = 0) -> str:
    if isinstance(a, APure):
        return expr_str(a.expr, parent_prec)
    if isinstance(a, AAcc):
        loc = f"{expr_str(a.recv, 7)}.{a.field_name}"
        if a.perm is None:
            return f"acc({loc})"
        return f"acc({loc}, {expr_str(a.perm)})"
    if isinstance(a, APred):
        call = f"{a.name}({', '.join(expr_str(x) for x in a.args)})"
        if a.perm is None:
            return call
        return f"acc({call}, {expr_str(a.perm)})"
    if isinstance(a, ASep):
        s = f"{assertion_str(a.left, 3)} && {assertion_str(a.right, 4)}"
        return f"({s})" if parent_prec > 3 else s
    if isinstance(a, AImplies):
        s = f"{expr_str(a.guard, 1)} ==> {assertion_str(a.body, 1)}"
        return f"({s})" if parent_prec > 1 else s
    if isinstance(a, ACond):
        return f"({expr_str(a.guard)} ? {assertion_str(a.then)} : {assertion_str(a.els)})"
    raise TypeError(f"cannot print {a!r}")


def _stmt_lines(s: Stmt, indent: str) -> list:
    if isinstance(s, SVarDecl):
        line = f"{indent}var {s.name}: {s.ty}"
        if s.init is not None:
            line += f" := {expr_str(s.init)}"
        return [line]
    if isinstance(s, SAssign):
        return [f"{indent}{s.target} := {expr_str(s.expr)}"]
    if isinstance(s, SFieldWrite):
        return [f"{indent}{expr_str(s.recv, 7)}.{s.field_name} := {expr_str(s.expr)}"]
    if isinstance(s, SNew):
        return [f"{indent}{s.target} := new({', '.join(s.fields)})"]
    if isinstance(s, SInhale):
        return [f"{indent}inhale {assertion_str(s.assertion)}"]
    if isinstance(s, SExhale):
        return [f"{indent}exhale {assertion_str(s.assertion)}"]
    if isinstance(s, SAssert):
        return [f"{indent}assert {assertion_str(s.assertion)}"]
    if isinstance(s, SAssume):
        return [f"{indent}assume {expr_str(s.expr)}"]
    if isinstance(s, SIf):
        lines = [f"{indent}if ({expr_str(s.cond)}) {{"]
        for sub in s.then:
            lines.extend(_stmt_lines(sub, indent + "    "))
        if s.els:
            lines.append(f"{indent}}} else {{")
            for sub in s.els:
                lines.extend(_stmt_lines(sub, indent + "    "))
        lines.append(f"{indent}}}")
        return lines
    if isinstance(s, SWhile):
        lines = [f"{indent}while ({expr_str(s.cond)})"]
        for inv in s.invariants:
            lines.append(f"{indent}    invariant {assertion_str(inv)}")
        lines.append(f"{indent}{{")
        for sub in s.body:
            lines.extend(_stmt_lines(sub, indent + "    "))
        lines.append(f"{indent}}}")
        return lines
    if isinstance(s, SCall):
        call = f"{s.method}({', '.join(expr_str(a) for a in s.args)})"
        if s.targets:
            return [f"{indent}{', '.join(s.targets)} := {call}"]
        return [f"{indent}{call}"]
    if isinstance(s, SFold):
        return [f"{indent}fold {assertion_str(s.pred)}"]
    if isinstance(s, SUnfold):
        return [f"{indent}unfold {assertion_str(s.pred)}"]
    raise TypeError(f"cannot print {s!r}")


def _params_str(params: list) -> str:
    return ", ".join(f"{n}: {t}" for n, t in params)


def pretty(program: Program) -> str:
    lines: list[str] = []
    for f in program.fields:
        lines.append(f"field {f.name}: {f.ty}")
    if program.fields:
        lines.append("")
    for p in program.predicates:
        lines.append(f"predicate {p.name}({_params_str(p.params)}) {{")
        lines.append(f"    {assertion_str(p.body)}")
        lines.append("}")
        lines.append("")
    for m in program.methods:
        header = f"method {m.name}({_params_str(m.params)})"
        if m.returns:
            header += f" returns ({_params_str(m.returns)})"
        lines.append(header)
        for pre in m.preconditions:
            lines.append(f"    requires {assertion_str(pre)}")
        for post in m.postconditions:
            lines.append(f"    ensures {assertion_str(post)}")
        lines.append("{")
        for s in m.body:
            lines.extend(_stmt_lines(s, "    "))
        lines.append("}")
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"
