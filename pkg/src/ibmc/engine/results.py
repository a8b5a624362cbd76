"""Verdicts, traces, options and run statistics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from ..frontend.ast import ArrayType


@dataclass
class TraceStep:
    step: int
    inputs: dict
    state: dict


@dataclass
class Trace:
    """Counterexample rows ``0..k``.

    Row ``j`` holds the state at the boundary of frame ``j`` and the inputs
    consumed by iteration ``j + 1`` (row 0 also carries the init nondet values).
    """

    steps: list
    assert_id: str
    violated_step: int
    schedule: list = field(default_factory=list)  # (loop_id, local k) for frames 1..k

    def rows(self, tp) -> list:
        types = {d.name: d.type for d in tp.decls}
        out = []
        for s in self.steps:
            out.append({
                "step": s.step,
                "inputs": {k: _show(v, types.get(k)) for k, v in s.inputs.items()},
                "state": {k: _show(v, types.get(k)) for k, v in s.state.items()},
            })
        return out

    def to_json(self, tp) -> str:
        data = self.rows(tp) + [{"violated": {"assert_id": self.assert_id, "step": self.violated_step}}]
        return json.dumps(data, indent=1)

    def format(self, tp) -> str:
        lines = []
        for row in self.rows(tp):
            parts = [f"{k}={v}" for k, v in {**row["inputs"], **row["state"]}.items()]
            lines.append(f"step {row['step']}: " + " ".join(parts))
        lines.append(f"violated: assert {self.assert_id} at step {self.violated_step}")
        return "\n".join(lines)


def _show(v, ty):
    if isinstance(v, bool) or ty is None:
        return v
    if isinstance(ty, ArrayType):
        default, items = v
        return {"default": _show(default, ty.elem), "items": {str(i): _show(x, ty.elem) for i, x in sorted(items.items())}}
    if ty.is_bool:
        return bool(v)
    if ty.signed and v >> (ty.width - 1):
        return v - (1 << ty.width)
    return v


class Verdict:
    kind = ""
    exit_code = 0


@dataclass
class CounterexampleFound(Verdict):
    depth: int
    trace: Optional[Trace] = None
    loop_id: Optional[str] = None
    kind = "counterexample"
    exit_code = 10

    def __str__(self):
        where = f" in {self.loop_id}" if self.loop_id else ""
        return f"COUNTEREXAMPLE at k={self.depth}{where}"


@dataclass
class BoundedSafe(Verdict):
    depth: int
    kind = "safe"
    exit_code = 0

    def __str__(self):
        return f"SAFE up to k={self.depth}"


@dataclass
class Proved(Verdict):
    depth: int
    kind = "proved"
    exit_code = 0

    def __str__(self):
        return f"PROVED by {self.depth}-induction"


@dataclass
class StepCaseHolds(Verdict):
    """Standalone ``--stop-when-unsat`` run: the induction step case is UNSAT at ``depth``."""

    depth: int
    kind = "step-unsat"
    exit_code = 0

    def __str__(self):
        return f"STEP CASE UNSAT at k={self.depth}"


@dataclass
class ResourceLimit(Verdict):
    what: str
    depth: int = 0
    kind = "resource"
    exit_code = 2

    def __str__(self):
        return f"RESOURCE LIMIT ({self.what}) at k={self.depth}"


@dataclass
class EngineOptions:
    incremental: bool = True
    slice: bool = False
    refine: bool = False
    under: bool = False
    preprocess: bool = True
    constprop: bool = True
    unwinding_assertions: bool = True
    seed: Optional[int] = None
    timeout: Optional[float] = None
    dump_dimacs: Optional[str] = None

    @property
    def mode(self) -> str:
        parts = ["i" if self.incremental else "ni"]
        if self.slice:
            parts.append("s")
        if self.preprocess:
            parts.append("p")
        if self.refine:
            parts.append("r")
        return "+".join(parts)


@dataclass
class Stats:
    solves: int = 0
    property_solves: int = 0
    solve_ms: float = 0.0
    clauses_per_solve: list = field(default_factory=list)
    clauses: int = 0
    vars: int = 0
    refinement_rounds: int = 0
    short_circuits: int = 0
    array_lemmas: int = 0
    generated_equations: int = 0
    kept_equations: int = 0

    @property
    def mean_clauses_per_solve(self) -> float:
        c = self.clauses_per_solve
        return sum(c) / len(c) if c else 0.0

    def as_dict(self) -> dict:
        return {
            "solves": self.solves,
            "property_solves": self.property_solves,
            "solve_ms": round(self.solve_ms, 3),
            "mean_clauses_per_solve": self.mean_clauses_per_solve,
            "clauses": self.clauses,
            "vars": self.vars,
            "refinement_rounds": self.refinement_rounds,
            "short_circuits": self.short_circuits,
            "array_lemmas": self.array_lemmas,
            "generated_equations": self.generated_equations,
            "kept_equations": self.kept_equations,
        }


class ActivationLedger:
    """Tracks activation literals: live ones are assumed false, retired ones unit-asserted."""

    def __init__(self, solver):
        self.solver = solver
        self.alpha: dict = {}  # k -> (var, status)
        self.beta: dict = {}  # (group, round) -> (var, status)

    def new_alpha(self, k: int) -> int:
        live = [v for v, st in self.alpha.values() if st == "live"]
        assert not live, "previous alpha must be retired first"
        v = self.solver.new_var()
        self.solver.mark_activation(v)
        self.alpha[k] = (v, "live")
        return v

    def retire_alpha(self, k: int):
        v, st = self.alpha[k]
        if st == "live":
            self.solver.add_clause([v])
            self.alpha[k] = (v, "retired")

    def live_alpha(self) -> Optional[int]:
        for v, st in self.alpha.values():
            if st == "live":
                return v
        return None

    def record_beta(self, group, rnd: int, var: int):
        self.beta[(group, rnd)] = (var, "live")

    def retire_beta(self, group, rnd: int):
        v, _ = self.beta[(group, rnd)]
        self.beta[(group, rnd)] = (v, "retired")

    def assumptions(self, live_betas: list) -> list:
        a = self.live_alpha()
        return ([-a] if a is not None else []) + [-b for b in live_betas]
