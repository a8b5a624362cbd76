"""Verification drivers built on the unwinding session, encoder and solver."""

from .bmc import EngineError, Timeout, Unroller, bmc_incremental, bmc_nonincremental, multi_loop_schedule
from .kind import entry_invariant, kinduction, step_case_only
from .results import (
    ActivationLedger, BoundedSafe, CounterexampleFound, EngineOptions, Proved, ResourceLimit,
    Stats, StepCaseHolds, Trace, TraceStep, Verdict,
)


def run(tp, kmax, opts: EngineOptions, stats=None, upto=None, k_induction=False,
        stop_when_unsat=False):
    """Dispatch to the driver selected by the flags."""
    if k_induction:
        return kinduction(tp, kmax, opts, stats)
    if stop_when_unsat:
        return step_case_only(tp, kmax, opts, stats)
    if opts.incremental:
        return bmc_incremental(tp, kmax, opts, stats, upto)
    return bmc_nonincremental(tp, kmax, opts, stats, upto)


__all__ = [
    "ActivationLedger", "BoundedSafe", "CounterexampleFound", "EngineError", "EngineOptions",
    "Proved", "ResourceLimit", "Stats", "StepCaseHolds", "Timeout", "Trace", "TraceStep",
    "Unroller", "Verdict", "bmc_incremental", "bmc_nonincremental", "entry_invariant",
    "kinduction", "multi_loop_schedule", "run", "step_case_only",
]
