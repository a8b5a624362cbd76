"""Incremental symbolic execution into guarded SSA equations."""

from .session import (
    GuardedEquation, PropertyAtom, SymexError, TimeframeFormula, UnwindingSession,
)
from .terms import SsaName, Term, TermFactory, evaluate, term_str


def init_unwinding(tp, loop_id=None, constprop: bool = True) -> UnwindingSession:
    return UnwindingSession(tp, loop_id, constprop)


__all__ = [
    "GuardedEquation", "PropertyAtom", "SsaName", "SymexError", "Term", "TermFactory",
    "TimeframeFormula", "UnwindingSession", "evaluate", "init_unwinding", "term_str",
]
