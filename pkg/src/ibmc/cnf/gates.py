"""Tseitin gates with structural hashing, and bitvector circuits built from them.

Literals are DIMACS-style ints. ``T`` is a reserved variable unit-asserted
true; ``-T`` is the false literal. Bit vectors are lists of literals, LSB first.
"""

from __future__ import annotations

from typing import Callable


class Gates:
    def __init__(self, new_var: Callable[[], int], add_clause: Callable[[list], None]):
        self._new_var = new_var
        self._add = add_clause
        self.T = new_var()
        self.F = -self.T
        add_clause([self.T])
        self._hash: dict = {}

    def const_bits(self, value: int, width: int) -> list:
        return [self.T if (value >> i) & 1 else self.F for i in range(width)]

    def fresh(self, width: int) -> list:
        return [self._new_var() for _ in range(width)]

    def is_const(self, a: int) -> bool:
        return a == self.T or a == self.F

    # -- basic gates --
    def and2(self, a: int, b: int) -> int:
        T, F = self.T, self.F
        if a == F or b == F or a == -b:
            return F
        if a == T or a == b:
            return b
        if b == T:
            return a
        if a > b:
            a, b = b, a
        key = ("and", a, b)
        out = self._hash.get(key)
        if out is None:
            out = self._new_var()
            self._add([-out, a])
            self._add([-out, b])
            self._add([out, -a, -b])
            self._hash[key] = out
        return out

    def or2(self, a: int, b: int) -> int:
        return -self.and2(-a, -b)

    def xor2(self, a: int, b: int) -> int:
        T, F = self.T, self.F
        if a == F:
            return b
        if b == F:
            return a
        if a == T:
            return -b
        if b == T:
            return -a
        if a == b:
            return F
        if a == -b:
            return T
        # normalise polarity so xor(a,b), xor(-a,b) share a gate
        sign = 1
        if a < 0:
            a, sign = -a, -sign
        if b < 0:
            b, sign = -b, -sign
        if a > b:
            a, b = b, a
        key = ("xor", a, b)
        out = self._hash.get(key)
        if out is None:
            out = self._new_var()
            self._add([-out, a, b])
            self._add([-out, -a, -b])
            self._add([out, -a, b])
            self._add([out, a, -b])
            self._hash[key] = out
        return sign * out

    def mux(self, c: int, a: int, b: int) -> int:
        """``c ? a : b``."""
        T, F = self.T, self.F
        if c == T or a == b:
            return a
        if c == F:
            return b
        if a == T and b == F:
            return c
        if a == F and b == T:
            return -c
        if a == T:
            return self.or2(c, b)
        if a == F:
            return self.and2(-c, b)
        if b == T:
            return self.or2(-c, a)
        if b == F:
            return self.and2(c, a)
        if c < 0:
            c, a, b = -c, b, a
        key = ("mux", c, a, b)
        out = self._hash.get(key)
        if out is None:
            out = self._new_var()
            self._add([-c, -a, out])
            self._add([-c, a, -out])
            self._add([c, -b, out])
            self._add([c, b, -out])
            self._add([-a, -b, out])
            self._add([a, b, -out])
            self._hash[key] = out
        return out

    def and_n(self, lits) -> int:
        out = self.T
        for x in lits:
            out = self.and2(out, x)
        return out

    def or_n(self, lits) -> int:
        out = self.F
        for x in lits:
            out = self.or2(out, x)
        return out

    def iff(self, a: int, b: int) -> int:
        return -self.xor2(a, b)

    # -- word-level helpers --
    def bnot(self, a: list) -> list:
        return [-x for x in a]

    def bitwise(self, fn, a: list, b: list) -> list:
        return [fn(x, y) for x, y in zip(a, b)]

    def mux_bits(self, c: int, a: list, b: list) -> list:
        return [self.mux(c, x, y) for x, y in zip(a, b)]

    def full_add(self, a: int, b: int, cin: int):
        axb = self.xor2(a, b)
        s = self.xor2(axb, cin)
        cout = self.or2(self.and2(a, b), self.and2(cin, axb))
        return s, cout

    def add(self, a: list, b: list, cin: int = None):
        """Ripple-carry adder; returns ``(sum, carry_out)``."""
        carry = self.F if cin is None else cin
        out = []
        for x, y in zip(a, b):
            s, carry = self.full_add(x, y, carry)
            out.append(s)
        return out, carry

    def sub(self, a: list, b: list):
        """``a - b``; returns ``(diff, no_borrow)`` where no_borrow means ``a >= b`` unsigned."""
        return self.add(a, self.bnot(b), self.T)

    def neg(self, a: list) -> list:
        return self.sub(self.const_bits(0, len(a)), a)[0]

    def eq(self, a: list, b: list) -> int:
        return self.and_n(self.iff(x, y) for x, y in zip(a, b))

    def ult(self, a: list, b: list) -> int:
        return -self.sub(a, b)[1]

    def ule(self, a: list, b: list) -> int:
        return -self.ult(b, a)

    def slt(self, a: list, b: list) -> int:
        # flip sign bits and compare unsigned
        return self.ult(a[:-1] + [-a[-1]], b[:-1] + [-b[-1]])

    def sle(self, a: list, b: list) -> int:
        return -self.slt(b, a)

    def mul(self, a: list, b: list) -> list:
        """Shift-add multiplier, result truncated to ``len(a)`` bits."""
        w = len(a)
        acc = self.const_bits(0, w)
        for i in range(w):
            if b[i] == self.F:
                continue
            pp = [self.and2(a[j], b[i]) for j in range(w - i)]
            hi, _ = self.add(acc[i:], pp)
            acc = acc[:i] + hi
        return acc

    def udivrem(self, a: list, d: list):
        """Restoring division; ``d == 0`` yields all-ones quotient and remainder ``a``."""
        w = len(a)
        dx = d + [self.F]
        r = self.const_bits(0, w + 1)
        q = [self.F] * w
        for i in range(w - 1, -1, -1):
            r = [a[i]] + r[:w]
            diff, ge = self.sub(r, dx)
            q[i] = ge
            r = self.mux_bits(ge, diff, r)
        return q, r[:w]

    def sdivrem(self, a: list, d: list):
        w = len(a)
        sa, sd = a[-1], d[-1]
        ua = self.mux_bits(sa, self.neg(a), a)
        ud = self.mux_bits(sd, self.neg(d), d)
        uq, ur = self.udivrem(ua, ud)
        q = self.mux_bits(self.xor2(sa, sd), self.neg(uq), uq)
        dz = -self.or_n(d)
        q = self.mux_bits(dz, self.const_bits(-1, w), q)
        r = self.mux_bits(sa, self.neg(ur), ur)
        return q, r

    def _shift_overflow(self, amt: list, w: int) -> int:
        n = len(amt)
        if (1 << n) <= w:
            return self.F
        return -self.ult(amt, self.const_bits(w, n))

    def shift(self, a: list, amt: list, kind: str) -> list:
        """Barrel shifter; ``kind`` in shl/lshr/ashr. Amounts ``>= width`` saturate."""
        w = len(a)
        fill = a[-1] if kind == "ashr" else self.F
        cur = list(a)
        i = 0
        while (1 << i) < w and i < len(amt):
            s = 1 << i
            if kind == "shl":
                shifted = [self.F] * s + cur[: w - s]
            else:
                shifted = cur[s:] + [fill] * s
            cur = self.mux_bits(amt[i], shifted, cur)
            i += 1
        over = self._shift_overflow(amt, w)
        return self.mux_bits(over, [fill] * w, cur)
