"""Split-case k-induction: an incremental base case and a havocked step case run in lockstep."""

from __future__ import annotations

from typing import Optional

from ..frontend import load_program
from ..frontend.ast import Assert
from ..frontend.typecheck import TypedProgram, expr_reads
from .bmc import EngineError, Timeout, Unroller, _cex, _deadline
from .results import BoundedSafe, EngineOptions, Proved, ResourceLimit, Stats, StepCaseHolds


def entry_invariant(tp: TypedProgram, loop_id: str) -> list:
    """Conditions of the trailing top-level asserts of the body that read only state."""
    states = {d.name for d in tp.states}
    out = []
    for s in reversed(tp.loop_def(loop_id).body):
        if not isinstance(s, Assert):
            break
        if not expr_reads(s.cond) <= states:
            break
        out.append(s.cond)
    out.reverse()
    return out


class StepCase:
    """Havocked unwinding: property assumed on entry, earlier bodies safe, last body checked."""

    def __init__(self, tp: TypedProgram, opts: EngineOptions, stats: Stats, deadline):
        loop_id = tp.unbounded_ids[0]
        self.u = Unroller(tp, opts, stats, loop_id, deadline)
        sess = self.u.session
        sess.havoc_state()
        sess.add_entry_constraint(entry_invariant(tp, loop_id))
        self.last: list = []

    def check(self, k: int) -> bool:
        """SAT iff ``k`` bodies from an arbitrary entry state can violate in the last one."""
        u = self.u
        while u.session.depth < k:
            if self.last:
                u.encode_frames()
                u.block_atoms(self.last)
            self.last = u.session.unwind_step().property_atoms
        return u.check(self.last, k)


def _single_loop(tp: TypedProgram):
    if len(tp.unbounded_ids) != 1:
        raise EngineError("k-induction requires exactly one unbounded loop")


def kinduction(tp: TypedProgram, kmax: Optional[int], opts: EngineOptions,
               stats: Optional[Stats] = None):
    """Lockstep base/step cases; incremental or from scratch per ``opts.incremental``."""
    _single_loop(tp)
    stats = stats if stats is not None else Stats()
    deadline = _deadline(opts)
    k = 0
    try:
        if opts.incremental:
            base = Unroller(tp, opts, stats, None, deadline)
            step = StepCase(tp, opts, stats, deadline)
        while kmax is None or k <= kmax:
            if not opts.incremental:
                fresh = load_program(tp.source, tp.origin, tp.unwinding_assertions) if tp.source else tp
                base = Unroller(fresh, opts, stats, None, deadline)
                for _ in range(k):
                    base.session.unwind_step()
                atoms = base.session.property_disjunction(k)
            else:
                atoms = (base.session.unwind_step() if k else base.session.frames[0]).property_atoms
            if base.check(atoms, k):
                return _cex(base, atoms, k)
            if opts.incremental:
                base.block_atoms(atoms)
            if k >= 1:
                if not opts.incremental:
                    fresh = load_program(tp.source, tp.origin, tp.unwinding_assertions) if tp.source else tp
                    step = StepCase(fresh, opts, stats, deadline)
                if not step.check(k):
                    return Proved(k)
            k += 1
    except Timeout:
        return ResourceLimit("timeout", k)
    return BoundedSafe(kmax)


def step_case_only(tp: TypedProgram, kmax: Optional[int], opts: EngineOptions,
                   stats: Optional[Stats] = None):
    """Stop-when-unsat driver for the step case alone: unwind while SAT, stop at first UNSAT."""
    _single_loop(tp)
    stats = stats if stats is not None else Stats()
    step = StepCase(tp, opts, stats, _deadline(opts))
    k = 1
    try:
        while kmax is None or k <= kmax:
            if not step.check(k):
                return StepCaseHolds(k)
            k += 1
    except Timeout:
        return ResourceLimit("timeout", k)
    return ResourceLimit("stop-when-unsat reached unwind-max", kmax)
