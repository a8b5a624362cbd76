"""Lexer and recursive-descent parser for ``.rsl`` programs."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .ast import (
    ArrayType, Assert, Assign, Assume, BoolLit, Binary, Cast, Decl, Expr, For,
    If, Index, IntLit, Local, LoopDef, Nondet, Pos, Program, Stmt, Ternary,
    Type, Unary, Var, BOOL, bv,
)


class ParseError(Exception):
    def __init__(self, msg: str, pos: Pos, expected: Iterable[str] = (), origin: str = "<stdin>"):
        self.pos = pos
        self.expected = sorted(set(expected))
        self.origin = origin
        text = f"{origin}:{pos}: {msg}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(text)


KEYWORDS = {
    "input", "state", "init", "loop", "if", "else", "assert", "assume", "for",
    "in", "local", "true", "false", "nondet", "as", "bool",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<int>0[xX][0-9a-fA-F_]+|0[bB][01_]+|[0-9][0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\.\.|:=|==|!=|<=|>=|<<|>>|&&|\|\||[-+*/%&|^!~<>?:;,(){}\[\]])
    """,
    re.VERBOSE | re.DOTALL,
)

_TYPE_RE = re.compile(r"([ui])([0-9]+)")


@dataclass
class Token:
    kind: str  # "int" "ident" "kw" "op" "type" "eof"
    text: str
    pos: Pos
    value: object = None


def tokenize(text: str, origin: str = "<stdin>") -> list:
    tokens = []
    i = 0
    line, col = 1, 1
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", Pos(line, col), origin=origin)
        kind = m.lastgroup
        lexeme = m.group()
        pos = Pos(line, col)
        if kind == "int":
            tokens.append(Token("int", lexeme, pos, int(lexeme.replace("_", ""), 0)))
        elif kind == "ident":
            tm = _TYPE_RE.fullmatch(lexeme)
            if tm and 1 <= int(tm.group(2)) <= 64:
                tokens.append(Token("type", lexeme, pos, bv(int(tm.group(2)), tm.group(1) == "i")))
            elif lexeme == "bool":
                tokens.append(Token("type", lexeme, pos, BOOL))
            elif lexeme in KEYWORDS:
                tokens.append(Token("kw", lexeme, pos))
            else:
                tokens.append(Token("ident", lexeme, pos))
        elif kind == "op":
            tokens.append(Token("op", lexeme, pos))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        i = m.end()
    tokens.append(Token("eof", "<EOF>", Pos(line, col)))
    return tokens


# binary precedence levels, loosest first
_LEVELS = [
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("<<", ">>"),
    ("+", "-"),
    ("*", "/", "%"),
]


class Parser:
    def __init__(self, text: str, origin: str = "<stdin>"):
        self.origin = origin
        self.toks = tokenize(text, origin)
        self.i = 0

    # -- token helpers --
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"unexpected {self.tok.text!r}", [text])
        t = self.tok
        self.i += 1
        return t

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            self.fail(f"unexpected {self.tok.text!r}", [what])
        t = self.tok
        self.i += 1
        return t

    def fail(self, msg: str, expected: Iterable[str] = ()):
        raise ParseError(msg, self.tok.pos, expected, self.origin)

    # -- program --
    def program(self) -> Program:
        decls = []
        while self.at("input") or self.at("state"):
            decls.append(self.decl())
        init: list = []
        if self.accept("init"):
            init = self.block()
        loops = []
        while self.at("loop"):
            pos = self.tok.pos
            self.i += 1
            # the loop name is optional; anonymous loops are named by position
            if self.tok.kind == "ident":
                name = self.tok.text
                self.i += 1
            else:
                name = f"loop{len(loops)}"
            loops.append(LoopDef(name, self.block(), pos=pos))
        if not loops:
            self.fail(f"unexpected {self.tok.text!r}", ["loop"] if self.tok.kind == "eof" else
                      ["input", "state", "init", "loop"])
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r}", ["loop", "<EOF>"])
        return Program(decls, init, loops, self.origin)

    def decl(self) -> Decl:
        pos = self.tok.pos
        kind = self.tok.text
        self.i += 1
        ty = self.type_()
        if self.accept("["):
            size = self.expect_kind("int", "array size").value
            self.expect("]")
            ty = ArrayType(ty, size)
        name = self.expect_kind("ident", "identifier").text
        init = self.expr() if self.accept(":=") else None
        self.expect(";")
        return Decl(kind, ty, name, init, pos)

    def type_(self) -> Type:
        t = self.expect_kind("type", "type")
        return t.value

    def block(self) -> list:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.fail("unexpected end of input", ["}", "statement"])
            stmts.append(self.stmt())
        self.expect("}")
        return stmts

    def stmt(self) -> Stmt:
        t = self.tok
        pos = t.pos
        if self.accept("if"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.block()
            els: list = []
            if self.accept("else"):
                els = [self.stmt()] if self.at("if") else self.block()
            return If(cond, then, els, pos=pos)
        if self.accept("assert"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            self.expect(";")
            return Assert(cond, label=str(pos), pos=pos)
        if self.accept("assume"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            self.expect(";")
            return Assume(cond, pos=pos)
        if self.accept("for"):
            var = self.expect_kind("ident", "identifier").text
            self.expect("in")
            lo = self.expr()
            self.expect("..")
            hi = self.expr()
            return For(var, lo, hi, self.block(), pos=pos)
        if self.accept("local"):
            ty = self.type_()
            name = self.expect_kind("ident", "identifier").text
            self.expect(":=")
            value = self.expr()
            self.expect(";")
            return Local(ty, name, value, pos=pos)
        if t.kind == "ident":
            self.i += 1
            index = None
            if self.accept("["):
                index = self.expr()
                self.expect("]")
            self.expect(":=")
            value = self.expr()
            self.expect(";")
            return Assign(t.text, value, index, pos=pos)
        self.fail(f"unexpected {t.text!r}", ["identifier", "if", "assert", "assume", "for", "local", "}"])

    # -- expressions --
    def expr(self) -> Expr:
        cond = self.binary(0)
        if self.at("?"):
            pos = self.tok.pos
            self.i += 1
            then = self.expr()
            self.expect(":")
            els = self.expr()
            return Ternary(cond, then, els, pos=pos)
        return cond

    def binary(self, level: int) -> Expr:
        if level == len(_LEVELS):
            return self.cast()
        left = self.binary(level + 1)
        while self.tok.kind == "op" and self.tok.text in _LEVELS[level]:
            op = self.tok
            self.i += 1
            right = self.binary(level + 1)
            left = Binary(op.text, left, right, pos=op.pos)
        return left

    def cast(self) -> Expr:
        e = self.unary()
        while self.at("as"):
            pos = self.tok.pos
            self.i += 1
            e = Cast(e, self.type_(), pos=pos)
        return e

    def unary(self) -> Expr:
        t = self.tok
        if t.kind == "op" and t.text in ("-", "!", "~"):
            self.i += 1
            return Unary(t.text, self.unary(), pos=t.pos)
        return self.primary()

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return IntLit(t.value, pos=t.pos)
        if self.accept("true"):
            return BoolLit(True, pos=t.pos)
        if self.accept("false"):
            return BoolLit(False, pos=t.pos)
        if self.accept("nondet"):
            self.expect("(")
            self.expect(")")
            return Nondet(pos=t.pos)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.i += 1
            if self.accept("["):
                idx = self.expr()
                self.expect("]")
                return Index(t.text, idx, pos=t.pos)
            return Var(t.text, pos=t.pos)
        self.fail(f"unexpected {t.text!r}", ["expression"])


def parse(text: str, origin: str = "<stdin>") -> Program:
    """Parse source text into an untyped :class:`Program`."""
    if not text.strip():
        raise ParseError("empty program", Pos(1, 1), ["loop"], origin)
    return Parser(text, origin).program()


def parse_expr(text: str) -> Expr:
    p = Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r}", ["<EOF>"])
    return e
