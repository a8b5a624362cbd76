"""Explicit-state breadth-first model checker.

Independent of the SAT path: it shares only the front end and runs the
concrete interpreter over every input valuation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .frontend.ast import (
    Assert, Assign, Assume, Binary, Cast, Expr, If, Index, Local, Nondet,
    Ternary, Unary, Type,
)
from .frontend.typecheck import TypedProgram
from .interp import Interpreter, nondet_name


class StateSpaceTooLarge(Exception):
    pass


@dataclass
class OracleResult:
    verdict: str  # "sat" | "safe" | "proved"
    depth: int
    loop_id: Optional[str] = None
    states: int = 0


def _sites_expr(e: Expr, out: list):
    if isinstance(e, Nondet):
        out.append(e)
    elif isinstance(e, Unary):
        _sites_expr(e.arg, out)
    elif isinstance(e, Binary):
        _sites_expr(e.left, out)
        _sites_expr(e.right, out)
    elif isinstance(e, Ternary):
        for x in (e.cond, e.then, e.els):
            _sites_expr(x, out)
    elif isinstance(e, Cast):
        _sites_expr(e.arg, out)
    elif isinstance(e, Index):
        _sites_expr(e.index, out)


def _sites(stmts: list, out: list):
    for s in stmts:
        if isinstance(s, (Assign, Local)):
            _sites_expr(s.value, out)
            if isinstance(s, Assign) and s.index is not None:
                _sites_expr(s.index, out)
        elif isinstance(s, If):
            _sites_expr(s.cond, out)
            _sites(s.then, out)
            _sites(s.els, out)
        elif isinstance(s, (Assert, Assume)):
            _sites_expr(s.cond, out)


def _domain(ty: Type) -> range:
    return range(2) if ty.is_bool else range(1 << ty.width)


def _valuations(named: list, limit: int) -> list:
    size = 1
    for _, ty in named:
        size *= len(_domain(ty))
    if size > limit:
        raise StateSpaceTooLarge(f"{size} input valuations")
    names = [n for n, _ in named]
    out = []
    for combo in itertools.product(*(_domain(t) for _, t in named)):
        out.append({n: (bool(v) if t.is_bool else v) for n, v, (_, t) in zip(names, combo, named)})
    return out


class ExplicitStateChecker:
    def __init__(self, tp: TypedProgram, max_states: int = 1 << 20, max_inputs: int = 1 << 12,
                 max_work: Optional[int] = None):
        self.tp = tp
        self.it = Interpreter(tp)
        self.max_states = max_states
        self.max_work = max_work  # cap on interpreter steps per layer
        init_sites: list = []
        for d in tp.states:
            if d.init is not None:
                _sites_expr(d.init, init_sites)
        _sites(tp.init, init_sites)
        self.init_inputs = _valuations([(nondet_name(n.site), n.ty) for n in init_sites], max_inputs)
        self.step_inputs = {}
        for ld in tp.loops:
            sites: list = []
            _sites(ld.body, sites)
            named = [(d.name, d.type) for d in tp.inputs] + [(nondet_name(n.site), n.ty) for n in sites]
            self.step_inputs[ld.loop_id] = _valuations(named, max_inputs)

    def initial_states(self):
        """Returns ``(states, violated)``."""
        states = set()
        violated = False
        for inp in self.init_inputs:
            s, viol = self.it.initial(inp)
            violated |= bool(viol)
            if s is not None:
                states.add(s)
        return states, violated

    def post(self, states: set, loop_id: str):
        nxt = set()
        violated = False
        work = len(states) * len(self.step_inputs[loop_id])
        if self.max_work is not None and work > self.max_work:
            raise StateSpaceTooLarge(f"{work} transitions in one layer")
        for s in states:
            for inp in self.step_inputs[loop_id]:
                t, viol = self.it.step(s, loop_id, inp)
                violated |= bool(viol)
                if t is not None:
                    nxt.add(t)
        if len(nxt) > self.max_states:
            raise StateSpaceTooLarge(f"{len(nxt)} states")
        return nxt, violated

    def bounded(self, kmax: int, loops: Optional[list] = None) -> OracleResult:
        """Bounded check with the sequential multi-loop schedule.

        Each loop in ``loops`` runs exactly ``kmax`` iterations before the next
        one starts; reports the first violating (loop, depth).
        """
        loops = loops or self.tp.unbounded_ids
        layer, violated = self.initial_states()
        seen = len(layer)
        if violated:
            return OracleResult("sat", 0, loops[0], seen)
        for loop_id in loops:
            for k in range(1, kmax + 1):
                layer, violated = self.post(layer, loop_id)
                seen += len(layer)
                if violated:
                    return OracleResult("sat", k, loop_id, seen)
        return OracleResult("safe", kmax, loops[-1], seen)

    def unbounded(self, loop_id: Optional[str] = None) -> OracleResult:
        """Full reachability for a single loop; ``proved`` when no violation is reachable."""
        loop_id = loop_id or self.tp.unbounded_ids[0]
        frontier, violated = self.initial_states()
        if violated:
            return OracleResult("sat", 0, loop_id, len(frontier))
        visited = set(frontier)
        depth = 0
        while frontier:
            depth += 1
            nxt, violated = self.post(frontier, loop_id)
            if violated:
                return OracleResult("sat", depth, loop_id, len(visited))
            frontier = nxt - visited
            visited |= frontier
            if len(visited) > self.max_states:
                raise StateSpaceTooLarge(f"{len(visited)} states")
        return OracleResult("proved", depth, loop_id, len(visited))
