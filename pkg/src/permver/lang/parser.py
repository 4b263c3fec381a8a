"""Hand-written lexer and recursive-descent parser.

Assertions are parsed with the same precedence climber as pure expressions
(with `acc` atoms and `? :` conditionals as extra productions) and then
normalized into the assertion tree. Name resolution and purity restrictions
are deliberately left to the type checker.
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
    FieldDecl,
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
    Ternary,
    TypeTag,
    Var,
)

KEYWORDS = {
    "field", "predicate", "method", "returns", "requires", "ensures", "var",
    "new", "inhale", "exhale", "assert", "assume", "if", "else", "while",
    "invariant", "fold", "unfold", "acc", "old", "true", "false", "null",
    "none", "write", "Int", "Bool", "Ref", "Perm",
}

TWO_CHAR = {":=", "==", "!=", "<=", ">=", "&&", "||"}
ONE_CHAR = set("(){},:.?+-*/<>!=")


class ParseError(Exception):
    def __init__(self, pos: Pos, message: str):
        super().__init__(f"{pos}: {message}")
        self.pos = pos
        self.message = message


@dataclass
class Token:
    kind: str  # "id" | "int" | "kw" | "op" | "eof"
    text: str
    pos: Pos


def tokenize(text: str) -> list:
    toks: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        pos = Pos(line, col)
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], pos))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            toks.append(Token("kw" if word in KEYWORDS else "id", word, pos))
            col += j - i
            i = j
            continue
        if text.startswith("==>", i):
            toks.append(Token("op", "==>", pos))
            i += 3
            col += 3
            continue
        if text[i : i + 2] in TWO_CHAR:
            toks.append(Token("op", text[i : i + 2], pos))
            i += 2
            col += 2
            continue
        if c in ONE_CHAR:
            toks.append(Token("op", c, pos))
            i += 1
            col += 1
            continue
        raise ParseError(pos, f"unexpected character {c!r}")
    toks.append(Token("eof", "", Pos(line, col)))
    return toks


# precedence levels for binary operators, loosest first
_BIN_LEVELS = [
    ("==>",),
    ("||",),
    ("&&",),
    ("==", "!=", "<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/"),
]
_RIGHT_ASSOC = {"==>"}


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token plumbing ------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("op", "kw")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.peek()
        if not self.at(text):
            raise ParseError(t.pos, f"expected {text!r}, found {t.text!r}")
        return self.next()

    def expect_id(self) -> Token:
        t = self.peek()
        if t.kind != "id":
            raise ParseError(t.pos, f"expected identifier, found {t.text!r}")
        return self.next()

    # -- program structure ----------------------------------------------------

    def parse_program(self) -> Program:
        prog = Program()
        while self.peek().kind != "eof":
            t = self.peek()
            if self.at("field"):
                prog.fields.append(self.parse_field())
            elif self.at("predicate"):
                prog.predicates.append(self.parse_predicate())
            elif self.at("method"):
                prog.methods.append(self.parse_method())
            else:
                raise ParseError(t.pos, f"expected declaration, found {t.text!r}")
        return prog

    def parse_field(self) -> FieldDecl:
        pos = self.expect("field").pos
        name = self.expect_id().text
        self.expect(":")
        ty = self.parse_type()
        return FieldDecl(name, ty, pos=pos)

    def parse_type(self) -> TypeTag:
        t = self.next()
        for tag in TypeTag:
            if t.text == tag.value:
                return tag
        raise ParseError(t.pos, f"expected type, found {t.text!r}")

    def parse_params(self) -> list:
        params = []
        self.expect("(")
        if not self.at(")"):
            while True:
                name = self.expect_id().text
                self.expect(":")
                params.append((name, self.parse_type()))
                if not self.accept(","):
                    break
        self.expect(")")
        return params

    def parse_predicate(self) -> PredicateDecl:
        pos = self.expect("predicate").pos
        name = self.expect_id().text
        params = self.parse_params()
        self.expect("{")
        body = self.parse_assertion()
        self.expect("}")
        return PredicateDecl(name, params, body, pos=pos)

    def parse_method(self) -> MethodDecl:
        pos = self.expect("method").pos
        name = self.expect_id().text
        params = self.parse_params()
        returns = self.parse_params() if self.accept("returns") else []
        pres, posts = [], []
        while True:
            if self.at("requires"):
                self.next()
                pres.append(self.parse_assertion())
            elif self.at("ensures"):
                self.next()
                posts.append(self.parse_assertion())
            else:
                break
        body = self.parse_block()
        return MethodDecl(name, params, returns, pres, posts, body, pos=pos)

    def parse_block(self) -> list:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            stmts.append(self.parse_stmt())
        self.expect("}")
        return stmts

    # -- statements ------------------------------------------------------------

    def parse_stmt(self):
        t = self.peek()
        if self.at("var"):
            self.next()
            name = self.expect_id().text
            self.expect(":")
            ty = self.parse_type()
            init = None
            if self.accept(":="):
                init = self.parse_expr()
            return SVarDecl(name, ty, init, pos=t.pos)
        if self.at("inhale"):
            self.next()
            return SInhale(self.parse_assertion(), pos=t.pos)
        if self.at("exhale"):
            self.next()
            return SExhale(self.parse_assertion(), pos=t.pos)
        if self.at("assert"):
            self.next()
            return SAssert(self.parse_assertion(), pos=t.pos)
        if self.at("assume"):
            self.next()
            return SAssume(self.parse_expr(), pos=t.pos)
        if self.at("if"):
            self.next()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_block()
            els = self.parse_block() if self.accept("else") else []
            return SIf(cond, then, els, pos=t.pos)
        if self.at("while"):
            self.next()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            invs = []
            while self.accept("invariant"):
                invs.append(self.parse_assertion())
            body = self.parse_block()
            return SWhile(cond, invs, body, pos=t.pos)
        if self.at("fold"):
            self.next()
            return SFold(self.parse_acc_pred(), pos=t.pos)
        if self.at("unfold"):
            self.next()
            return SUnfold(self.parse_acc_pred(), pos=t.pos)
        if t.kind == "id" and self.peek(1).text == "(":
            return self.parse_call_rhs([], t.pos)
        if t.kind == "id" and self.peek(1).text == ",":
            targets = [self.expect_id().text]
            while self.accept(","):
                targets.append(self.expect_id().text)
            self.expect(":=")
            return self.parse_call_rhs(targets, t.pos)
        if t.kind == "id" and self.peek(1).text == ":=":
            name = self.next().text
            self.expect(":=")
            if self.at("new"):
                self.next()
                self.expect("(")
                fields = []
                if not self.at(")"):
                    fields.append(self.expect_id().text)
                    while self.accept(","):
                        fields.append(self.expect_id().text)
                self.expect(")")
                return SNew(name, fields, pos=t.pos)
            if self.peek().kind == "id" and self.peek(1).text == "(":
                return self.parse_call_rhs([name], t.pos)
            return SAssign(name, self.parse_expr(), pos=t.pos)
        # remaining form: a field write `expr.f := expr`
        lhs = self.parse_expr()
        if isinstance(lhs, FieldRead) and self.at(":="):
            self.next()
            return SFieldWrite(lhs.recv, lhs.field_name, self.parse_expr(), pos=t.pos)
        raise ParseError(t.pos, f"expected statement, found {t.text!r}")

    def parse_call_rhs(self, targets: list, pos: Pos) -> SCall:
        mname = self.expect_id().text
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.parse_expr())
            while self.accept(","):
                args.append(self.parse_expr())
        self.expect(")")
        return SCall(targets, mname, args, pos=pos)

    # -- assertions and expressions ---------------------------------------------

    def parse_assertion(self) -> Assertion:
        return normalize_assertion(self.parse_raw(0, allow_assertion=True))

    def parse_acc_pred(self) -> APred:
        t = self.peek()
        if t.kind == "id" and self.peek(1).text == "(":
            pname = self.next().text
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.parse_expr())
                while self.accept(","):
                    args.append(self.parse_expr())
            self.expect(")")
            return APred(pname, args, None, pos=t.pos)
        raw = self.parse_acc_atom()
        if not raw.pred_name:
            raise ParseError(t.pos, "expected a predicate accessibility atom")
        a = normalize_assertion(raw)
        assert isinstance(a, APred)
        return a

    def parse_expr(self) -> Expr:
        return self.parse_raw(0, allow_assertion=False)

    def parse_raw(self, level: int, allow_assertion: bool) -> Expr:
        if level >= len(_BIN_LEVELS):
            return self.parse_unary(allow_assertion)
        ops = _BIN_LEVELS[level]
        left = self.parse_raw(level + 1, allow_assertion)
        while self.peek().kind == "op" and self.peek().text in ops:
            op = self.next()
            right_level = level if op.text in _RIGHT_ASSOC else level + 1
            right = self.parse_raw(right_level, allow_assertion)
            left = Binary(op.text, left, right, pos=op.pos)
            if op.text in _RIGHT_ASSOC:
                break
        return left

    def parse_unary(self, allow_assertion: bool) -> Expr:
        t = self.peek()
        if self.at("!") or self.at("-"):
            from .ast import Unary

            self.next()
            return Unary(t.text, self.parse_unary(allow_assertion), pos=t.pos)
        return self.parse_postfix(allow_assertion)

    def parse_postfix(self, allow_assertion: bool) -> Expr:
        e = self.parse_primary(allow_assertion)
        while self.at("."):
            dot = self.next()
            name = self.expect_id().text
            e = FieldRead(e, name, pos=dot.pos)
        return e

    def parse_primary(self, allow_assertion: bool) -> Expr:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return IntLit(int(t.text), pos=t.pos)
        if self.at("true") or self.at("false"):
            self.next()
            return BoolLit(t.text == "true", pos=t.pos)
        if self.at("null"):
            self.next()
            return NullLit(pos=t.pos)
        if self.at("none"):
            self.next()
            return PermLit(0, 1, "none", pos=t.pos)
        if self.at("write"):
            self.next()
            return PermLit(1, 1, "write", pos=t.pos)
        if self.at("old"):
            self.next()
            self.expect("(")
            inner = self.parse_expr()
            self.expect(")")
            return Old(inner, pos=t.pos)
        if self.at("acc"):
            return self.parse_acc_atom()
        if t.kind == "id" and allow_assertion and self.peek(1).text == "(":
            # bare predicate instance, shorthand for acc(P(args), write)
            pname = self.next().text
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.parse_expr())
                while self.accept(","):
                    args.append(self.parse_expr())
            self.expect(")")
            return AccAtom(None, "", pname, args, None, pos=t.pos)
        if t.kind == "id":
            self.next()
            return Var(t.text, pos=t.pos)
        if self.at("("):
            self.next()
            inner = self.parse_raw(0, allow_assertion)
            if allow_assertion and self.at("?"):
                self.next()
                then = self.parse_raw(0, allow_assertion=True)
                self.expect(":")
                els = self.parse_raw(0, allow_assertion=True)
                self.expect(")")
                return Ternary(inner, then, els, pos=t.pos)
            self.expect(")")
            return inner
        raise ParseError(t.pos, f"expected expression, found {t.text!r}")

    def parse_acc_atom(self) -> AccAtom:
        t = self.expect("acc")
        self.expect("(")
        # a predicate instance looks like ID ( ... )
        if self.peek().kind == "id" and self.peek(1).text == "(":
            pname = self.next().text
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.parse_expr())
                while self.accept(","):
                    args.append(self.parse_expr())
            self.expect(")")
            perm = self.parse_expr() if self.accept(",") else None
            self.expect(")")
            return AccAtom(None, "", pname, args, perm, pos=t.pos)
        recv = self.parse_expr()
        if not isinstance(recv, FieldRead):
            raise ParseError(t.pos, "acc requires a field location or predicate instance")
        perm = self.parse_expr() if self.accept(",") else None
        self.expect(")")
        return AccAtom(recv.recv, recv.field_name, "", [], perm, pos=t.pos)


def normalize_assertion(e: Expr) -> Assertion:
    """Rebuild the raw parse tree into the assertion forms. Resource atoms in
    positions other than &&/==>/conditional bodies are left embedded in pure
    expressions for the type checker to reject."""
    if isinstance(e, AccAtom):
        if e.pred_name:
            return APred(e.pred_name, e.args, e.perm, pos=e.pos)
        return AAcc(e.recv, e.field_name, e.perm, pos=e.pos)
    if isinstance(e, Binary) and e.op == "&&":
        return ASep(normalize_assertion(e.left), normalize_assertion(e.right), pos=e.pos)
    if isinstance(e, Binary) and e.op == "==>":
        return AImplies(e.left, normalize_assertion(e.right), pos=e.pos)
    if isinstance(e, Ternary):
        return ACond(e.cond, normalize_assertion(e.then), normalize_assertion(e.els), pos=e.pos)
    return APure(e, pos=e.pos)


def parse(text: str) -> Program:
    """Parse a source file. Raises ParseError with position information."""
    return Parser(text).parse_program()
