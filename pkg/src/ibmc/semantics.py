"""Bit-pattern semantics of the term operators.

Every bitvector value is an unsigned pattern ``0 <= v < 2**width``. Division
is total: ``x / 0`` is all-ones (for signed operands too) and ``x % 0 == x``.
"""

from __future__ import annotations


def mask(w: int) -> int:
    return (1 << w) - 1


def msb(v: int, w: int) -> int:
    return (v >> (w - 1)) & 1


def neg(v: int, w: int) -> int:
    return (~v + 1) & mask(w)


def udiv(a: int, b: int, w: int) -> int:
    return mask(w) if b == 0 else a // b


def urem(a: int, b: int, w: int) -> int:
    return a if b == 0 else a % b


def sdiv(a: int, b: int, w: int) -> int:
    if b == 0:
        return mask(w)
    na, nb = msb(a, w), msb(b, w)
    q = udiv(neg(a, w) if na else a, neg(b, w) if nb else b, w)
    return neg(q, w) if na != nb else q


def srem(a: int, b: int, w: int) -> int:
    if b == 0:
        return a
    na, nb = msb(a, w), msb(b, w)
    r = urem(neg(a, w) if na else a, neg(b, w) if nb else b, w)
    return neg(r, w) if na else r


def shl(a: int, b: int, w: int) -> int:
    return 0 if b >= w else (a << b) & mask(w)


def lshr(a: int, b: int, w: int) -> int:
    return 0 if b >= w else a >> b


def ashr(a: int, b: int, w: int) -> int:
    fill = mask(w) if msb(a, w) else 0
    if b >= w:
        return fill
    return ((a >> b) | (fill << (w - b))) & mask(w)


def slt(a: int, b: int, w: int) -> bool:
    # flip sign bits to compare as unsigned
    flip = 1 << (w - 1)
    return (a ^ flip) < (b ^ flip)


def sle(a: int, b: int, w: int) -> bool:
    return a == b or slt(a, b, w)


def sext(v: int, w_from: int, w_to: int) -> int:
    if msb(v, w_from):
        return v | (mask(w_to) & ~mask(w_from))
    return v


BINARY = {
    "add": lambda a, b, w: (a + b) & mask(w),
    "sub": lambda a, b, w: (a - b) & mask(w),
    "mul": lambda a, b, w: (a * b) & mask(w),
    "udiv": udiv,
    "urem": urem,
    "sdiv": sdiv,
    "srem": srem,
    "and": lambda a, b, w: a & b,
    "or": lambda a, b, w: a | b,
    "xor": lambda a, b, w: a ^ b,
    "shl": shl,
    "lshr": lshr,
    "ashr": ashr,
}

COMPARE = {
    "eq": lambda a, b, w: a == b,
    "ult": lambda a, b, w: a < b,
    "ule": lambda a, b, w: a <= b,
    "slt": slt,
    "sle": sle,
}
