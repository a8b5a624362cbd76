"""Loop table construction and full unwinding of statically bounded loops."""

from __future__ import annotations

import copy
from dataclasses import replace

from .ast import (
    Assert, Assign, Assume, Binary, BoolLit, Cast, Expr, For, If, Index, IntLit,
    Local, Nondet, Ternary, Unary, Var, BOOL,
)
from .typecheck import (
    INT_DEFAULT, LoopInfo, TypeCheckError, TypedProgram, assigned_vars,
)


def index_loops(tp: TypedProgram) -> list:
    """Assign ``main.<n>`` ids in source (pre-)order and return the loop table."""
    table: list = []

    def walk(stmts, parent):
        for s in stmts:
            if isinstance(s, If):
                walk(s.then, parent)
                walk(s.els, parent)
            elif isinstance(s, For):
                s.loop_id = f"main.{len(table)}"
                info = LoopInfo(s.loop_id, "bounded", _static_bound(s), s.body,
                                assigned_vars(s.body), parent)
                table.append(info)
                walk(s.body, s.loop_id)

    walk(tp.init, None)
    for ld in tp.loops:
        ld.loop_id = f"main.{len(table)}"
        table.append(LoopInfo(ld.loop_id, "unbounded", None, ld.body,
                              assigned_vars(ld.body), None, ld.name))
        walk(ld.body, ld.loop_id)
    return table


class _NotStatic(Exception):
    pass


def _eval_static(e: Expr) -> int:
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, Unary) and e.op in ("-", "~"):
        v = _eval_static(e.arg)
        return -v if e.op == "-" else ~v
    if isinstance(e, Binary) and e.op in ("+", "-", "*"):
        a, b = _eval_static(e.left), _eval_static(e.right)
        return a + b if e.op == "+" else a - b if e.op == "-" else a * b
    if isinstance(e, Cast):
        return _eval_static(e.arg)
    raise _NotStatic()


def _static_bound(f: For):
    try:
        return max(0, _eval_static(f.hi) - _eval_static(f.lo))
    except _NotStatic:
        return None


class _Expander:
    def __init__(self, tp: TypedProgram, unwinding_assertions: bool):
        self.tp = tp
        self.sites = tp.nondet_sites
        self.unwinding_assertions = unwinding_assertions

    def expr(self, e: Expr, env: dict, fresh_sites: bool) -> Expr:
        if isinstance(e, Var) and e.name in env:
            return IntLit(env[e.name], pos=e.pos, ty=e.ty)
        if isinstance(e, (Var, IntLit, BoolLit)):
            return copy.copy(e)
        if isinstance(e, Nondet):
            n = copy.copy(e)
            if fresh_sites:
                n.site = self.sites
                self.sites += 1
            return n
        if isinstance(e, Unary):
            return replace(e, arg=self.expr(e.arg, env, fresh_sites))
        if isinstance(e, Binary):
            return replace(e, left=self.expr(e.left, env, fresh_sites),
                           right=self.expr(e.right, env, fresh_sites))
        if isinstance(e, Ternary):
            return replace(e, cond=self.expr(e.cond, env, fresh_sites),
                           then=self.expr(e.then, env, fresh_sites),
                           els=self.expr(e.els, env, fresh_sites))
        if isinstance(e, Cast):
            return replace(e, arg=self.expr(e.arg, env, fresh_sites))
        if isinstance(e, Index):
            return replace(e, index=self.expr(e.index, env, fresh_sites))
        raise TypeError(e)

    def block(self, stmts: list, env: dict, fresh_sites: bool) -> list:
        out: list = []
        for s in stmts:
            out.extend(self.stmt(s, env, fresh_sites))
        return out

    def stmt(self, s, env: dict, fresh_sites: bool) -> list:
        x = lambda e: self.expr(e, env, fresh_sites)  # noqa: E731
        if isinstance(s, Assign):
            return [replace(s, value=x(s.value), index=None if s.index is None else x(s.index))]
        if isinstance(s, Local):
            return [replace(s, value=x(s.value))]
        if isinstance(s, If):
            return [replace(s, cond=x(s.cond), then=self.block(s.then, env, fresh_sites),
                            els=self.block(s.els, env, fresh_sites))]
        if isinstance(s, Assert):
            return [replace(s, cond=x(s.cond))]
        if isinstance(s, Assume):
            return [replace(s, cond=x(s.cond))]
        if isinstance(s, For):
            try:
                lo = _eval_static(x(s.lo))
                hi = _eval_static(x(s.hi))
            except _NotStatic:
                raise TypeCheckError(f"loop {s.loop_id}: bound must be static", s.pos, self.tp.origin)
            out: list = []
            for i, v in enumerate(range(lo, hi)):
                inner = {**env, s.var: v}
                out.extend(self.block(s.body, inner, fresh_sites or i > 0))
            if self.unwinding_assertions and hi > lo:
                # loop-continuation condition after the last copy; statically false
                cont = Binary("<", IntLit(hi, ty=INT_DEFAULT), IntLit(hi, ty=INT_DEFAULT),
                              pos=s.pos, ty=BOOL)
                out.append(If(cont, [Assert(BoolLit(False, ty=BOOL), label=f"unwind:{s.loop_id}",
                                            pos=s.pos)], [], pos=s.pos))
            return out
        raise TypeError(s)


def expand_bounded_loops(tp: TypedProgram, unwinding_assertions: bool = True) -> TypedProgram:
    """Replace every bounded ``for`` by sequential copies of its body."""
    ex = _Expander(tp, unwinding_assertions)
    init = ex.block(tp.init, {}, False)
    loops = [replace(ld, body=ex.block(ld.body, {}, False)) for ld in tp.loops]
    table = [info for info in tp.loop_table if info.kind == "unbounded"]
    by_id = {ld.loop_id: ld for ld in loops}
    table = [replace(info, body=by_id[info.id].body) for info in table]
    return replace(tp, init=init, loops=loops, loop_table=table, nondet_sites=ex.sites,
                   unwinding_assertions=unwinding_assertions)
