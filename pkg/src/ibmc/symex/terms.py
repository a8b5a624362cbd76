"""Hash-consed SSA terms with on-the-fly constant folding."""

from __future__ import annotations

from typing import NamedTuple, Optional

from .. import semantics as sem
from ..frontend.ast import ArrayType, Type, BOOL


class SsaName(NamedTuple):
    base: str
    step: int
    version: int

    def __str__(self) -> str:
        return f"{self.base}@{self.step}.{self.version}"


class Term:
    """Interned term node; identity equality, so compare with ``is``."""

    __slots__ = ("op", "args", "ty", "val", "id")

    def __init__(self, op: str, args: tuple, ty, val, tid: int):
        self.op = op
        self.args = args
        self.ty = ty
        self.val = val
        self.id = tid

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    @property
    def is_array(self) -> bool:
        return isinstance(self.ty, ArrayType)

    def __repr__(self) -> str:
        return term_str(self)


_INFIX = {
    "add": "+", "sub": "-", "mul": "*", "udiv": "/u", "sdiv": "/s", "urem": "%u",
    "srem": "%s", "and": "&", "or": "|", "xor": "^", "shl": "<<", "lshr": ">>u",
    "ashr": ">>s", "eq": "==", "ult": "<u", "ule": "<=u", "slt": "<s", "sle": "<=s",
}


def term_str(t: Term) -> str:
    if t.op == "const":
        if t.ty.is_bool:
            return "true" if t.val else "false"
        if t.ty.signed and t.val >> (t.ty.width - 1):
            return str(t.val - (1 << t.ty.width))
        return str(t.val)
    if t.op == "name":
        return str(t.val)
    if t.op in _INFIX:
        return f"({term_str(t.args[0])} {_INFIX[t.op]} {term_str(t.args[1])})"
    if t.op == "not":
        return f"!{term_str(t.args[0])}"
    if t.op == "ite":
        c, a, b = t.args
        return f"({term_str(c)} ? {term_str(a)} : {term_str(b)})"
    if t.op in ("zext", "sext", "trunc", "bool2bv", "bv2bool"):
        return f"{t.op}<{t.ty}>({term_str(t.args[0])})"
    if t.op == "neg":
        return f"-{term_str(t.args[0])}"
    if t.op == "bnot":
        return f"~{term_str(t.args[0])}"
    if t.op == "const_array":
        return f"[{term_str(t.args[0])}]*"
    if t.op == "store":
        a, i, v = t.args
        return f"{term_str(a)}{{{term_str(i)} := {term_str(v)}}}"
    if t.op == "select":
        return f"{term_str(t.args[0])}[{term_str(t.args[1])}]"
    return f"{t.op}({', '.join(term_str(a) for a in t.args)})"


REFINABLE = frozenset({"mul", "udiv", "sdiv", "urem", "srem"})


class TermFactory:
    """Builds interned terms; ``fold=False`` disables all simplification."""

    def __init__(self, fold: bool = True):
        self.fold = fold
        self._table: dict = {}
        self._names_cache: dict = {}
        self.true = self.const(True, BOOL)
        self.false = self.const(False, BOOL)

    def _mk(self, op: str, args: tuple, ty, val=None) -> Term:
        key = (op, tuple(a.id for a in args), ty, val)
        t = self._table.get(key)
        if t is None:
            t = Term(op, args, ty, val, len(self._table))
            self._table[key] = t
        return t

    def const(self, val, ty: Type) -> Term:
        if ty.is_bool:
            val = bool(val)
        else:
            val &= ty.mask
        return self._mk("const", (), ty, val)

    def name(self, n: SsaName, ty) -> Term:
        return self._mk("name", (), ty, n)

    # -- boolean --
    def not_(self, a: Term) -> Term:
        if self.fold:
            if a.is_const:
                return self.const(not a.val, BOOL)
            if a.op == "not":
                return a.args[0]
        return self._mk("not", (a,), BOOL)

    def and_(self, a: Term, b: Term) -> Term:
        if self.fold:
            if a.is_const:
                return b if a.val else self.false
            if b.is_const:
                return a if b.val else self.false
            if a is b:
                return a
        return self._mk("and", (a, b), BOOL)

    def or_(self, a: Term, b: Term) -> Term:
        if self.fold:
            if a.is_const:
                return self.true if a.val else b
            if b.is_const:
                return self.true if b.val else a
            if a is b:
                return a
        return self._mk("or", (a, b), BOOL)

    def implies(self, a: Term, b: Term) -> Term:
        return self.or_(self.not_(a), b)

    # -- generic --
    def binary(self, op: str, a: Term, b: Term) -> Term:
        if a.ty.is_bool:
            if op == "and":
                return self.and_(a, b)
            if op == "or":
                return self.or_(a, b)
            if op == "xor":
                if self.fold and a.is_const and b.is_const:
                    return self.const(a.val != b.val, BOOL)
                return self._mk("xor", (a, b), BOOL)
            if op == "eq":
                if self.fold and a.is_const and b.is_const:
                    return self.const(a.val == b.val, BOOL)
                if self.fold and a is b:
                    return self.true
                return self._mk("eq", (a, b), BOOL)
            raise ValueError(op)
        w = a.ty.width
        if op in sem.COMPARE:
            if self.fold:
                if a.is_const and b.is_const:
                    return self.const(sem.COMPARE[op](a.val, b.val, w), BOOL)
                if a is b:
                    return self.const(op in ("eq", "ule", "sle"), BOOL)
            return self._mk(op, (a, b), BOOL)
        if self.fold and a.is_const and b.is_const:
            return self.const(sem.BINARY[op](a.val, b.val, w), a.ty)
        return self._mk(op, (a, b), a.ty)

    def unary(self, op: str, a: Term) -> Term:
        if op == "not":
            return self.not_(a)
        if self.fold and a.is_const:
            w = a.ty.width
            v = sem.neg(a.val, w) if op == "neg" else a.val ^ sem.mask(w)
            return self.const(v, a.ty)
        return self._mk(op, (a,), a.ty)

    def ite(self, c: Term, a: Term, b: Term) -> Term:
        if self.fold:
            if c.is_const:
                return a if c.val else b
            if a is b:
                return a
            if a.ty.is_bool and a.is_const and b.is_const:
                return c if a.val else self.not_(c)
        return self._mk("ite", (c, a, b), a.ty)

    def cast(self, a: Term, dst: Type) -> Term:
        src = a.ty
        if src == dst:
            return a
        if dst.is_bool:
            if self.fold and a.is_const:
                return self.const(a.val != 0, BOOL)
            return self._mk("bv2bool", (a,), BOOL)
        if src.is_bool:
            if self.fold and a.is_const:
                return self.const(int(a.val), dst)
            return self._mk("bool2bv", (a,), dst)
        if dst.width == src.width:
            # signedness change only: same bit pattern
            if self.fold and a.is_const:
                return self.const(a.val, dst)
            return self._mk("zext", (a,), dst)
        if dst.width < src.width:
            op = "trunc"
        else:
            op = "sext" if src.signed else "zext"
        if self.fold and a.is_const:
            v = sem.sext(a.val, src.width, dst.width) if op == "sext" else a.val & dst.mask
            return self.const(v, dst)
        return self._mk(op, (a,), dst)

    # -- arrays --
    def const_array(self, v: Term, ty: ArrayType) -> Term:
        return self._mk("const_array", (v,), ty)

    def store(self, arr: Term, idx: Term, v: Term) -> Term:
        return self._mk("store", (arr, idx, v), arr.ty)

    def select(self, arr: Term, idx: Term) -> Term:
        if self.fold and arr.op == "const_array":
            return arr.args[0]
        if self.fold and arr.op == "store" and idx.is_const and arr.args[1].is_const:
            # read-over-write with both indices known
            if idx.val == arr.args[1].val:
                return arr.args[2]
            return self.select(arr.args[0], idx)
        return self._mk("select", (arr, idx), arr.ty.elem)

    # -- analysis --
    def names(self, t: Term) -> frozenset:
        """SSA names occurring in ``t`` (memoised)."""
        cached = self._names_cache.get(t.id)
        if cached is not None:
            return cached
        if t.op == "name":
            out = frozenset((t.val,))
        elif not t.args:
            out = frozenset()
        elif len(t.args) == 1:
            out = self.names(t.args[0])
        else:
            out = frozenset().union(*(self.names(a) for a in t.args))
        self._names_cache[t.id] = out
        return out


def evaluate(t: Term, value_of, memo: Optional[dict] = None):
    """Evaluate a scalar term given ``value_of(SsaName) -> value``.

    Array terms evaluate to ``(default, {idx: val})`` maps.
    """
    if memo is None:
        memo = {}
    hit = memo.get(t.id)
    if hit is not None:
        return hit
    op = t.op
    if op == "const":
        r = t.val
    elif op == "name":
        r = value_of(t.val)
    else:
        args = [evaluate(a, value_of, memo) for a in t.args]
        if op == "not":
            r = not args[0]
        elif op in ("and", "or", "xor") and t.ty.is_bool:
            a, b = bool(args[0]), bool(args[1])
            r = (a and b) if op == "and" else (a or b) if op == "or" else (a != b)
        elif op == "eq" and t.args[0].ty.is_bool:
            r = bool(args[0]) == bool(args[1])
        elif op in sem.COMPARE:
            r = sem.COMPARE[op](args[0], args[1], t.args[0].ty.width)
        elif op in sem.BINARY:
            r = sem.BINARY[op](args[0], args[1], t.ty.width)
        elif op == "neg":
            r = sem.neg(args[0], t.ty.width)
        elif op == "bnot":
            r = args[0] ^ sem.mask(t.ty.width)
        elif op == "ite":
            r = args[1] if args[0] else args[2]
        elif op == "zext":
            r = args[0] & t.ty.mask
        elif op == "trunc":
            r = args[0] & t.ty.mask
        elif op == "sext":
            r = sem.sext(args[0], t.args[0].ty.width, t.ty.width)
        elif op == "bool2bv":
            r = int(bool(args[0]))
        elif op == "bv2bool":
            r = args[0] != 0
        elif op == "const_array":
            r = (args[0], {})
        elif op == "store":
            default, items = args[0]
            r = (default, {**items, args[1]: args[2]})
        elif op == "select":
            default, items = args[0]
            r = items.get(args[1], default)
        else:
            raise ValueError(op)
    memo[t.id] = r
    return r

