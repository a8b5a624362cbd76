"""Incremental bit-blasting of guarded SSA equations.

Every SSA name is encoded at most once; an equation ``lhs = rhs`` aliases the
literals of ``rhs`` to ``lhs`` so it emits no clauses of its own. Array-valued
names are kept symbolic and expanded at ``select`` sites, either eagerly
(read-over-write muxes plus pairwise index consistency on havocked bases) or
lazily (fresh bits per read, consistency instances added on demand).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .. import semantics as sem
from ..frontend.ast import ArrayType
from ..symex.terms import REFINABLE, SsaName, Term, TermFactory, evaluate
from .gates import Gates


class EncodeError(Exception):
    pass


def initial_precision(width: int) -> int:
    return max(4, width // 4)


@dataclass
class ApproxTag:
    term: Term
    mode: str  # "over" | "under"
    b: int
    beta: Optional[int]  # None once exact
    result: list = field(default_factory=list)
    history: list = field(default_factory=list)  # retired betas

    @property
    def width(self) -> int:
        return self.term.ty.width

    @property
    def exact(self) -> bool:
        return self.beta is None


class CnfEncoder:
    def __init__(self, solver, tf: TermFactory, refine: bool = False, lazy_arrays: bool = False,
                 under: bool = False):
        self.solver = solver
        self.tf = tf
        self.refine = refine
        self.lazy_arrays = lazy_arrays
        self.under = under
        self.clauses_added = 0
        self.g = Gates(solver.new_var, self._add)
        self.name_bits: dict = {}
        self.name_ty: dict = {}
        self.array_def: dict = {}
        self._bits: dict = {}
        self.approx: dict = {}  # term id -> ApproxTag
        self.base_selects: dict = {}  # havocked array name -> [select terms]
        self.lazy_selects: list = []
        self._expanded: set = set()
        self._ack_done: set = set()
        self.refinements = 0

    def _add(self, clause: list):
        self.clauses_added += 1
        self.solver.add_clause(clause)

    def new_activation(self) -> int:
        v = self.solver.new_var()
        self.solver.mark_activation(v)
        return v

    # -- equations --
    def encode_equation(self, eq) -> int:
        before = self.clauses_added
        rhs = eq.rhs
        if isinstance(rhs.ty, ArrayType):
            self.array_def[eq.lhs] = rhs
            return 0
        if eq.lhs in self.name_bits:
            raise EncodeError(f"{eq.lhs} encoded twice")
        bits = self.bits(rhs)
        self.name_bits[eq.lhs] = bits
        self.name_ty[eq.lhs] = rhs.ty
        if eq.kind == "constraint":
            self._add([bits[0]])
        return self.clauses_added - before

    def encode_property_selector(self, atoms: list, alpha: int) -> int:
        sel = self.g.or_n(self.name_bits[a.name][0] if a.name in self.name_bits else self.lit(a.term)
                          for a in atoms)
        self._add([sel, alpha])
        return sel

    # -- terms --
    def lit(self, t: Term) -> int:
        return self.bits(t)[0]

    def name_lits(self, n: SsaName, ty) -> list:
        bits = self.name_bits.get(n)
        if bits is None:
            bits = self.g.fresh(1 if ty.is_bool else ty.width)
            self.name_bits[n] = bits
            self.name_ty[n] = ty
        return bits

    def bits(self, t: Term) -> list:
        hit = self._bits.get(t.id)
        if hit is not None:
            return hit
        # iterative post-order to avoid deep recursion on long chains
        stack = [(t, False)]
        while stack:
            u, ready = stack.pop()
            if u.id in self._bits:
                continue
            if not ready:
                stack.append((u, True))
                if u.op != "select":
                    for a in u.args:
                        if a.id not in self._bits and not isinstance(a.ty, ArrayType):
                            stack.append((a, False))
                else:
                    idx = u.args[1]
                    if idx.id not in self._bits:
                        stack.append((idx, False))
                continue
            self._bits[u.id] = self._encode(u)
        return self._bits[t.id]

    def _encode(self, t: Term) -> list:
        g = self.g
        op = t.op
        ty = t.ty
        if op == "const":
            return [g.T if t.val else g.F] if ty.is_bool else g.const_bits(t.val, ty.width)
        if op == "name":
            return self.name_lits(t.val, ty)
        if op == "select":
            return self._select(t)
        A = [self._bits[a.id] for a in t.args]
        if op == "not":
            return [-A[0][0]]
        if ty.is_bool and op in ("and", "or", "xor"):
            fn = {"and": g.and2, "or": g.or2, "xor": g.xor2}[op]
            return [fn(A[0][0], A[1][0])]
        if op == "eq":
            return [g.eq(A[0], A[1])]
        if op in ("ult", "ule", "slt", "sle"):
            return [getattr(g, op)(A[0], A[1])]
        if op == "ite":
            return g.mux_bits(A[0][0], A[1], A[2])
        if op == "add":
            return g.add(A[0], A[1])[0]
        if op == "sub":
            return g.sub(A[0], A[1])[0]
        if op in ("and", "or", "xor"):
            fn = {"and": g.and2, "or": g.or2, "xor": g.xor2}[op]
            return g.bitwise(fn, A[0], A[1])
        if op in ("shl", "lshr", "ashr"):
            return g.shift(A[0], A[1], op)
        if op == "neg":
            return g.neg(A[0])
        if op == "bnot":
            return g.bnot(A[0])
        if op == "zext":
            return A[0] + [g.F] * (ty.width - len(A[0]))
        if op == "sext":
            return A[0] + [A[0][-1]] * (ty.width - len(A[0]))
        if op == "trunc":
            return A[0][: ty.width]
        if op == "bool2bv":
            return [A[0][0]] + [g.F] * (ty.width - 1)
        if op == "bv2bool":
            return [g.or_n(A[0])]
        if op in REFINABLE:
            if self.refine and ty.width > initial_precision(ty.width) and not self._const_operands(A):
                return self._approx(t, A)
            return self.exact_op(op, A[0], A[1])
        raise EncodeError(f"cannot encode operator {op}")

    def _const_operands(self, A) -> bool:
        return all(self.g.is_const(x) for bits in A for x in bits)

    def exact_op(self, op: str, a: list, b: list) -> list:
        g = self.g
        if op == "mul":
            return g.mul(a, b)
        if op in ("udiv", "urem"):
            q, r = g.udivrem(a, b)
            return q if op == "udiv" else r
        q, r = g.sdivrem(a, b)
        return q if op == "sdiv" else r

    # -- approximations --
    def _approx(self, t: Term, A: list) -> list:
        w = t.ty.width
        tag = ApproxTag(t, "under" if self.under else "over", initial_precision(w), None,
                        self.g.fresh(w))
        self.approx[t.id] = tag
        self._encode_tag(tag)
        return tag.result

    def _operands(self, t: Term):
        return self._bits[t.args[0].id], self._bits[t.args[1].id]

    def _link(self, xs: list, ys: list, beta: Optional[int]):
        esc = [] if beta is None else [beta]
        for x, y in zip(xs, ys):
            if x == y:
                continue
            self._add([-x, y] + esc)
            self._add([x, -y] + esc)

    def _encode_tag(self, tag: ApproxTag):
        g = self.g
        a, c = self._operands(tag.term)
        op, w, b = tag.term.op, tag.width, tag.b
        if b >= w:
            tag.b = w
            tag.beta = None
            self._link(tag.result, self.exact_op(op, a, c), None)
            return
        tag.beta = self.new_activation()
        if tag.mode == "over":
            if op == "mul":
                self._link(tag.result[:b], g.mul(a[:b], c[:b]), tag.beta)
            # division and remainder: no sound low-bit circuit, result stays free
            return
        signed = op in ("sdiv", "srem") or (op == "mul" and tag.term.ty.signed)
        m = min(2 * b, w) if op == "mul" else min(b + 1, w)

        def clamp(x):
            ext = x[b - 1] if signed else g.F
            for bit in x[b:]:
                self._link([bit], [ext], tag.beta)
            return x[:b] + [ext] * (m - b)

        ca, cc = clamp(a), clamp(c)
        if op != "mul":
            self._add([g.or_n(c[:b]), tag.beta])
        small = self.exact_op(op, ca, cc)
        ext = small[-1] if signed else g.F
        self._link(tag.result, small + [ext] * (w - m), tag.beta)

    def live_betas(self) -> list:
        return [tag.beta for tag in self.approx.values() if tag.beta is not None]

    def approx_consistent(self, tag: ApproxTag) -> bool:
        a = self.model_bits(self._bits[tag.term.args[0].id])
        c = self.model_bits(self._bits[tag.term.args[1].id])
        return sem.BINARY[tag.term.op](a, c, tag.width) == self.model_bits(tag.result)

    def refine_tag(self, tag: ApproxTag):
        """Double the precision of ``tag`` under a fresh activation; retires the old one."""
        old = tag.beta
        tag.b = min(2 * tag.b, tag.width)
        self.refinements += 1
        self._encode_tag(tag)
        if old is not None:
            tag.history.append(old)
            self._add([old])

    # -- arrays --
    def _resolve(self, arr: Term) -> Term:
        while arr.op == "name" and arr.val in self.array_def:
            arr = self.array_def[arr.val]
        return arr

    def _select(self, t: Term) -> list:
        if self.lazy_arrays:
            bits = self.g.fresh(1 if t.ty.is_bool else t.ty.width)
            self.lazy_selects.append(t)
            arr = self._resolve(t.args[0])
            if arr.op == "name":
                self.base_selects.setdefault(arr.val, []).append(t)
            return bits
        return self._select_eager(t.args[0], t.args[1], t)

    def _sub_select(self, arr: Term, idx: Term) -> list:
        return self.bits(self.tf.select(arr, idx))

    def _select_eager(self, arr: Term, idx: Term, t: Term) -> list:
        g = self.g
        arr = self._resolve(arr)
        if arr.op == "const_array":
            return self.bits(arr.args[0])
        if arr.op == "store":
            base, j, v = arr.args
            c = g.eq(self.bits(idx), self.bits(j))
            return g.mux_bits(c, self.bits(v), self._sub_select(base, idx))
        if arr.op == "ite":
            c, x, y = arr.args
            return g.mux_bits(self.lit(c), self._sub_select(x, idx), self._sub_select(y, idx))
        if arr.op == "name":
            bits = self.g.fresh(1 if t.ty.is_bool else t.ty.width)
            others = self.base_selects.setdefault(arr.val, [])
            for o in others:
                self._ackermann(self.bits(idx), bits, self.bits(o.args[1]), self.bits(o))
            others.append(t)
            return bits
        raise EncodeError(f"unexpected array term {arr.op}")

    def _ackermann(self, i1, v1, i2, v2):
        e = self.g.eq(i1, i2)
        for x, y in zip(v1, v2):
            self._add([-e, -x, y])
            self._add([-e, x, -y])

    def check_arrays(self) -> int:
        """Lazy mode: add consistency instances violated by the current model."""
        added = 0
        memo: dict = {}
        for t in list(self.lazy_selects):
            if t.id in self._expanded:
                continue
            got = self.model_term(t)
            want = self.concrete(t, memo)
            if got != want:
                self._expand(t)
                added += 1
        for base, sels in self.base_selects.items():
            vals = {}
            for s in sels:
                i = self.model_term(s.args[1])
                v = self.model_term(s)
                prev = vals.get(i)
                if prev is None:
                    vals[i] = (s, v)
                elif prev[1] != v:
                    key = (prev[0].id, s.id)
                    if key not in self._ack_done:
                        self._ack_done.add(key)
                        self._ackermann(self.bits(prev[0].args[1]), self.bits(prev[0]),
                                        self.bits(s.args[1]), self.bits(s))
                        added += 1
        return added

    def _expand(self, t: Term):
        """One read-over-write instance for lazy select ``t``."""
        g = self.g
        self._expanded.add(t.id)
        mine = self.bits(t)
        idx = t.args[1]
        arr = t.args[0]
        if arr.op == "name" and arr.val in self.array_def:
            self._link(mine, self._sub_select(self.array_def[arr.val], idx), None)
        elif arr.op == "const_array":
            self._link(mine, self.bits(arr.args[0]), None)
        elif arr.op == "store":
            base, j, v = arr.args
            c = g.eq(self.bits(idx), self.bits(j))
            for x, y in zip(mine, self.bits(v)):
                self._add([-c, -x, y])
                self._add([-c, x, -y])
            for x, y in zip(mine, self._sub_select(base, idx)):
                self._add([c, -x, y])
                self._add([c, x, -y])
        elif arr.op == "ite":
            c = self.lit(arr.args[0])
            for cl, sub in ((c, arr.args[1]), (-c, arr.args[2])):
                for x, y in zip(mine, self._sub_select(sub, idx)):
                    self._add([-cl, -x, y])
                    self._add([-cl, x, -y])

    # -- model access --
    def model_bits(self, bits: list) -> int:
        v = 0
        value = self.solver.value
        for i, x in enumerate(bits):
            if value(x):
                v |= 1 << i
        return v

    def model_term(self, t: Term):
        bits = self.bits(t)
        if t.ty.is_bool:
            return self.solver.value(bits[0])
        return self.model_bits(bits)

    def model_name(self, n: SsaName, ty):
        """Model value of an SSA name; names never encoded read as 0/false."""
        if isinstance(ty, ArrayType):
            if n in self.array_def:
                return self.concrete(self.array_def[n], {})
            return self._base_value(n)
        bits = self.name_bits.get(n)
        if bits is None:
            return False if ty.is_bool else 0
        if ty.is_bool:
            return self.solver.value(bits[0])
        return self.model_bits(bits)

    def _base_value(self, n: SsaName):
        items = {}
        for s in self.base_selects.get(n, []):
            items.setdefault(self.model_term(s.args[1]), self.model_term(s))
        return (0, items)

    def concrete(self, t: Term, memo: dict):
        """Evaluate ``t`` under the model, interpreting arrays exactly."""

        def value_of(n: SsaName):
            if n in self.array_def:
                return self.concrete(self.array_def[n], memo)
            if n in self.name_bits:
                return self.model_name(n, self.name_ty[n])
            if n in self.base_selects:
                return self._base_value(n)
            return 0

        return evaluate(t, value_of, memo)
