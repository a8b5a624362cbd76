"""Syntax tree and types of the reactive source language (``.rsl``)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Type:
    """Scalar type: ``bool`` or a two's-complement bitvector ``uN`` / ``iN``."""

    kind: str  # "bool" | "bv" | "int" (unsized literal, resolved during typecheck)
    width: int = 1
    signed: bool = False

    @property
    def is_bool(self) -> bool:
        return self.kind == "bool"

    @property
    def is_bv(self) -> bool:
        return self.kind == "bv"

    @property
    def is_int(self) -> bool:
        return self.kind == "int"

    @property
    def mask(self) -> int:
        return (1 << self.width) - 1

    def __str__(self) -> str:
        if self.kind == "bool":
            return "bool"
        if self.kind == "int":
            return "int"
        return f"{'i' if self.signed else 'u'}{self.width}"


@dataclass(frozen=True)
class ArrayType:
    elem: Type
    size: int

    def __str__(self) -> str:
        return f"{self.elem}[{self.size}]"


BOOL = Type("bool", 1, False)
INT = Type("int", 64, True)


def bv(width: int, signed: bool = False) -> Type:
    return Type("bv", width, signed)


AnyType = Union[Type, ArrayType]


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOPOS = Pos(0, 0)


# -- expressions -------------------------------------------------------------

@dataclass(eq=False)
class Expr:
    pos: Pos = field(default=NOPOS, kw_only=True, compare=False)
    ty: Optional[Type] = field(default=None, kw_only=True, compare=False)


@dataclass(eq=False)
class IntLit(Expr):
    value: int


@dataclass(eq=False)
class BoolLit(Expr):
    value: bool


@dataclass(eq=False)
class Var(Expr):
    name: str


@dataclass(eq=False)
class Nondet(Expr):
    site: int = -1


@dataclass(eq=False)
class Unary(Expr):
    op: str  # "-" "!" "~"
    arg: Expr


@dataclass(eq=False)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(eq=False)
class Ternary(Expr):
    cond: Expr
    then: Expr
    els: Expr


@dataclass(eq=False)
class Cast(Expr):
    arg: Expr
    target: Type


@dataclass(eq=False)
class Index(Expr):
    array: str
    index: Expr


# -- statements --------------------------------------------------------------

@dataclass(eq=False)
class Stmt:
    pos: Pos = field(default=NOPOS, kw_only=True, compare=False)


@dataclass(eq=False)
class Assign(Stmt):
    target: str
    value: Expr
    index: Optional[Expr] = None


@dataclass(eq=False)
class If(Stmt):
    cond: Expr
    then: list
    els: list = field(default_factory=list)


@dataclass(eq=False)
class Assert(Stmt):
    cond: Expr
    label: str = ""


@dataclass(eq=False)
class Assume(Stmt):
    cond: Expr


@dataclass(eq=False)
class For(Stmt):
    var: str
    lo: Expr
    hi: Expr
    body: list
    loop_id: str = ""


@dataclass(eq=False)
class Local(Stmt):
    type: Type
    name: str
    value: Expr


@dataclass(eq=False)
class Decl:
    kind: str  # "input" | "state"
    type: AnyType
    name: str
    init: Optional[Expr] = None
    pos: Pos = NOPOS


@dataclass(eq=False)
class LoopDef:
    name: str
    body: list
    loop_id: str = ""
    pos: Pos = NOPOS


@dataclass(eq=False)
class Program:
    decls: list
    init: list
    loops: list
    origin: str = "<stdin>"

    def decl(self, name: str) -> Optional[Decl]:
        for d in self.decls:
            if d.name == name:
                return d
        return None

    @property
    def inputs(self) -> list:
        return [d for d in self.decls if d.kind == "input"]

    @property
    def states(self) -> list:
        return [d for d in self.decls if d.kind == "state"]


BINARY_OPS = (
    "||", "&&", "|", "^", "&", "==", "!=", "<", "<=", ">", ">=",
    "<<", ">>", "+", "-", "*", "/", "%",
)
COMPARISONS = ("==", "!=", "<", "<=", ">", ">=")
