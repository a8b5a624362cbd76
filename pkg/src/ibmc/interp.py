"""Concrete interpreter for expanded programs.

Used for trace replay and as the transition function of the explicit-state
oracle. Operator semantics are implemented here on plain Python integers,
independently of :mod:`ibmc.semantics` and of the bit-level circuits.

Values are stored as unsigned bit patterns (``0 <= v < 2**w``) or ``bool``.
Arrays are total maps from 32-bit indices: ``(default, ((idx, val), ...))``.
"""

from __future__ import annotations

from typing import Optional

from .frontend.ast import (
    ArrayType, Assert, Assign, Assume, Binary, BoolLit, Cast, Expr, For, If, Index,
    IntLit, Local, Nondet, Ternary, Type, Unary, Var,
)
from .frontend.typecheck import INDEX_TYPE, TypedProgram


class AssumeFailed(Exception):
    pass


def _signed(v: int, w: int) -> int:
    return v - (1 << w) if v >> (w - 1) & 1 else v


def _cast(v, src: Type, dst: Type):
    if dst.is_bool:
        return bool(v)
    if src.is_bool:
        return int(bool(v))
    if src.signed:
        v = _signed(v, src.width)
    return v % (1 << dst.width)


def nondet_name(site: int) -> str:
    return f"nondet${site}"


def array_read(arr, idx: int):
    default, items = arr
    for k, v in items:
        if k == idx:
            return v
    return default


def array_write(arr, idx: int, val):
    default, items = arr
    kept = tuple((k, v) for k, v in items if k != idx)
    return (default, tuple(sorted(kept + ((idx, val),))))


class Interpreter:
    def __init__(self, tp: TypedProgram):
        self.tp = tp
        self.loop_vars: dict = {}
        self.state_names = [d.name for d in tp.states]

    # -- expressions --
    def eval(self, e: Expr, env: dict, inputs: dict):
        if isinstance(e, IntLit):
            return e.value % (1 << e.ty.width)
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, Var):
            if e.name in self.loop_vars:
                return self.loop_vars[e.name] % (1 << e.ty.width)
            if e.name in env:
                return env[e.name]
            return inputs[e.name]
        if isinstance(e, Nondet):
            v = inputs.get(nondet_name(e.site), 0)
            return bool(v) if e.ty.is_bool else v % (1 << e.ty.width)
        if isinstance(e, Index):
            i = _cast(self.eval(e.index, env, inputs), e.index.ty, INDEX_TYPE)
            return array_read(env[e.array], i)
        if isinstance(e, Unary):
            a = self.eval(e.arg, env, inputs)
            if e.op == "!":
                return not a
            w = e.ty.width
            return (-a) % (1 << w) if e.op == "-" else a ^ ((1 << w) - 1)
        if isinstance(e, Ternary):
            c = self.eval(e.cond, env, inputs)
            return self.eval(e.then if c else e.els, env, inputs)
        if isinstance(e, Cast):
            return _cast(self.eval(e.arg, env, inputs), e.arg.ty, e.target)
        if isinstance(e, Binary):
            if e.op == "&&":
                return bool(self.eval(e.left, env, inputs)) and bool(self.eval(e.right, env, inputs))
            if e.op == "||":
                return bool(self.eval(e.left, env, inputs)) or bool(self.eval(e.right, env, inputs))
            a = self.eval(e.left, env, inputs)
            b = self.eval(e.right, env, inputs)
            return self.binary(e.op, a, b, e.left.ty, e.right.ty)
        raise TypeError(e)

    @staticmethod
    def binary(op: str, a, b, ta: Type, tb: Type):
        if ta.is_bool:
            a, b = bool(a), bool(b)
            if op == "&":
                return a and b
            if op == "|":
                return a or b
            if op == "^":
                return a != b
            if op == "==":
                return a == b
            if op == "!=":
                return a != b
            raise ValueError(op)
        w = ta.width
        m = (1 << w) - 1
        sa, sb = (_signed(a, w), _signed(b, w)) if ta.signed else (a, b)
        if op == "+":
            return (a + b) & m
        if op == "-":
            return (a - b) & m
        if op == "*":
            return (a * b) & m
        if op == "/":
            if b == 0:
                return m
            q = abs(sa) // abs(sb)
            return (-q if (sa < 0) != (sb < 0) else q) & m
        if op == "%":
            if b == 0:
                return a
            r = abs(sa) % abs(sb)
            return (-r if sa < 0 else r) & m
        if op == "&":
            return a & b
        if op == "|":
            return a | b
        if op == "^":
            return a ^ b
        if op in ("<<", ">>"):
            amount = b  # shift amounts are read as unsigned bit patterns
            if op == "<<":
                return 0 if amount >= w else (a << amount) & m
            if ta.signed:
                return (sa >> min(amount, w)) & m
            return 0 if amount >= w else a >> amount
        if op == "==":
            return a == b
        if op == "!=":
            return a != b
        if op == "<":
            return sa < sb
        if op == "<=":
            return sa <= sb
        if op == ">":
            return sa > sb
        if op == ">=":
            return sa >= sb
        raise ValueError(op)

    # -- statements --
    def exec(self, stmts: list, env: dict, inputs: dict, violations: list):
        for s in stmts:
            if isinstance(s, (Assign, Local)):
                name = s.target if isinstance(s, Assign) else s.name
                v = self.eval(s.value, env, inputs)
                if isinstance(s, Assign) and s.index is not None:
                    i = _cast(self.eval(s.index, env, inputs), s.index.ty, INDEX_TYPE)
                    env[name] = array_write(env[name], i, v)
                else:
                    env[name] = v
            elif isinstance(s, If):
                branch = s.then if self.eval(s.cond, env, inputs) else s.els
                self.exec(branch, env, inputs, violations)
            elif isinstance(s, Assert):
                if not self.eval(s.cond, env, inputs):
                    violations.append(s.label)
            elif isinstance(s, Assume):
                if not self.eval(s.cond, env, inputs):
                    raise AssumeFailed()
            elif isinstance(s, For):
                # unexpanded bounded loop (reference semantics for the expander)
                saved = self.loop_vars.get(s.var)
                lo = self.eval(s.lo, env, inputs)
                hi = self.eval(s.hi, env, inputs)
                lo, hi = (_signed(v, x.ty.width) if x.ty.signed else v for v, x in ((lo, s.lo), (hi, s.hi)))
                for v in range(lo, hi):
                    self.loop_vars[s.var] = v
                    self.exec(s.body, env, inputs, violations)
                if saved is None:
                    self.loop_vars.pop(s.var, None)
                else:
                    self.loop_vars[s.var] = saved
            else:
                raise TypeError(s)

    def initial(self, inputs: dict):
        """Run declarations and the init block.

        Returns ``(state, violations)``; ``state`` is ``None`` when an assume fails.
        """
        env: dict = {}
        violations: list = []
        try:
            for d in self.tp.states:
                if d.init is None:
                    continue
                v = self.eval(d.init, env, inputs)
                env[d.name] = (v, ()) if isinstance(d.type, ArrayType) else v
            self.exec(self.tp.init, env, inputs, violations)
        except AssumeFailed:
            return None, violations
        return self.pack(env), violations

    def step(self, state: tuple, loop_id: str, inputs: dict):
        """One iteration of the loop body; same return shape as :meth:`initial`."""
        env = dict(zip(self.state_names, state))
        violations: list = []
        try:
            self.exec(self.tp.loop_def(loop_id).body, env, inputs, violations)
        except AssumeFailed:
            return None, violations
        return self.pack(env), violations

    def pack(self, env: dict) -> tuple:
        return tuple(env[n] for n in self.state_names)

    def unpack(self, state: tuple) -> dict:
        return dict(zip(self.state_names, state))


def replay(tp: TypedProgram, trace) -> Optional[tuple]:
    """Re-execute a trace; returns ``(step, assert_label)`` of the first violation.

    Row ``j`` of the trace carries the inputs consumed by iteration ``j + 1``;
    nondet values of the initialisation are carried by row 0 as well.
    """
    it = Interpreter(tp)
    rows = trace.steps
    state, viol = it.initial(rows[0].inputs if rows else {})
    if viol:
        return 0, viol[0]
    if state is None:
        return None
    for j, (loop_id, _k) in enumerate(trace.schedule, start=1):
        state, viol = it.step(state, loop_id, rows[j - 1].inputs)
        if viol:
            return j, viol[0]
        if state is None:
            return None
    return None
