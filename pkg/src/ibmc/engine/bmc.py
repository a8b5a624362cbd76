"""Bounded model checking drivers: incremental, non-incremental and multi-loop."""

from __future__ import annotations

import time
from typing import Optional

from ..cnf import CnfEncoder
from ..frontend import load_program
from ..frontend.typecheck import TypedProgram
from ..sat import Solver, write_dimacs
from ..slicer import SliceState
from ..symex import UnwindingSession
from .results import (
    ActivationLedger, BoundedSafe, CounterexampleFound, EngineOptions, ResourceLimit,
    Stats, Trace, TraceStep,
)


class Timeout(Exception):
    pass


class EngineError(Exception):
    pass


class Unroller:
    """One session, one slicer, one solver and one encoder kept across depths."""

    def __init__(self, tp: TypedProgram, opts: EngineOptions, stats: Stats,
                 loop_id: Optional[str] = None, deadline: Optional[float] = None):
        self.tp = tp
        self.opts = opts
        self.stats = stats
        self.deadline = deadline
        self.session = UnwindingSession(tp, loop_id, opts.constprop)
        self.slicer = SliceState(enabled=opts.slice)
        self.solver = Solver(preprocess=opts.preprocess, seed=opts.seed)
        self.encoder = CnfEncoder(self.solver, self.session.tf, refine=opts.refine,
                                  lazy_arrays=opts.refine, under=opts.under)
        self.ledger = ActivationLedger(self.solver)
        self._encoded_frames = 0
        self.ell = 0

    # -- encoding --
    def encode_frames(self):
        """Slice and encode every frame produced since the last call."""
        frames = self.session.frames
        while self._encoded_frames < len(frames):
            self._encode_equations(frames[self._encoded_frames].equations)
            self._encoded_frames += 1

    def _encode_equations(self, equations: list):
        kept = self.slicer.slice_increment(equations)
        self.stats.generated_equations = self.slicer.generated
        self.stats.kept_equations = len(self.slicer.kept)
        for eq in kept:
            self.encoder.encode_equation(eq)

    def atom_lit(self, atom) -> int:
        return self.encoder.name_bits[atom.name][0]

    def block_atoms(self, atoms: list):
        """Assert atoms false permanently (their depth is known safe)."""
        for a in atoms:
            self.solver.add_clause([-self.atom_lit(a)])

    # -- solving --
    def check(self, atoms: list, k: int) -> bool:
        """Retire the previous alpha and solve ``atoms`` under a fresh one."""
        self.encode_frames()
        prev = self.ledger.live_alpha()
        if prev is not None:
            for kk, (v, st) in self.ledger.alpha.items():
                if st == "live":
                    self.ledger.retire_alpha(kk)
        alpha = self.ledger.new_alpha(k)
        self.encoder.encode_property_selector(atoms, alpha)
        if self.solver.retired_fraction() > 0.25:
            self.solver.restart_and_compact()
        self.stats.property_solves += 1
        return self.solve_refined(k)

    def solve_refined(self, k: int) -> bool:
        enc = self.encoder
        self.ell = 0
        while True:
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise Timeout()
            live = enc.live_betas()
            for tag in enc.approx.values():
                if tag.beta is not None and (tag.term.id, len(tag.history)) not in self.ledger.beta:
                    self.ledger.record_beta(tag.term.id, len(tag.history), tag.beta)
            sat = self._solve(self.ledger.assumptions(live), k)
            if sat:
                bad = [t for t in enc.approx.values() if not t.exact and not enc.approx_consistent(t)]
                if bad:
                    for t in bad:
                        self.ledger.retire_beta(t.term.id, len(t.history))
                        enc.refine_tag(t)
                    self.stats.refinement_rounds += 1
                    self.ell += 1
                    continue
                if enc.lazy_arrays:
                    added = enc.check_arrays()
                    if added:
                        self.stats.array_lemmas += added
                        self.ell += 1
                        continue
                return True
            if enc.under:
                core = set(self.solver.core)
                hit = [t for t in enc.approx.values() if t.beta is not None and -t.beta in core]
                if hit:
                    for t in hit:
                        self.ledger.retire_beta(t.term.id, len(t.history))
                        enc.refine_tag(t)
                    self.stats.refinement_rounds += 1
                    self.ell += 1
                    continue
            elif live:
                self.stats.short_circuits += 1
            return False

    def _solve(self, assumptions: list, k: int) -> bool:
        s = self.solver
        self.stats.clauses_per_solve.append(s.added_since_solve)
        t0 = time.perf_counter()
        sat = s.solve(assumptions)
        self.stats.solve_ms += (time.perf_counter() - t0) * 1000.0
        self.stats.solves += 1
        self.stats.clauses = len(s.original)
        self.stats.vars = s.nvars
        if self.opts.dump_dimacs:
            self.dump(self.opts.dump_dimacs, k)
        return sat

    def dump(self, path: str, k: int):
        path = path.replace("{k}", str(k)).replace("{ell}", str(self.ell))
        with open(path, "w") as fh:
            write_dimacs(fh, self.solver.nvars, self.solver.original, [f"step k={k} ell={self.ell}"])

    # -- counterexamples --
    def extract_trace(self, atoms: list) -> Trace:
        enc = self.encoder
        sess = self.session
        tp = self.tp
        violated = next((a for a in atoms if self.solver.value(self.atom_lit(a))), None)
        if violated is None:
            raise EngineError("model satisfies no property atom")
        k = violated.frame
        memo: dict = {}
        steps = []
        for j in range(k + 1):
            frame = sess.frames[j]
            state = {}
            for d in tp.states:
                t = frame.boundary.get(d.name)
                state[d.name] = enc.concrete(t, memo) if t is not None else 0
            inputs = {d.name: (False if d.type.is_bool else 0) for d in tp.inputs}
            sources = [sess.frames[j + 1]] if j + 1 < len(sess.frames) and j + 1 <= k else []
            if j == 0:
                sources.append(frame)
            for src in sources:
                for base, term in src.inputs.items():
                    inputs[base] = enc.model_name(term.val, term.ty)
            steps.append(TraceStep(j, inputs, state))
        return Trace(steps, violated.label, k, list(sess.schedule[:k]))


def _deadline(opts: EngineOptions) -> Optional[float]:
    return time.monotonic() + opts.timeout if opts.timeout else None


def _loop_ids(tp: TypedProgram, upto: Optional[str]) -> list:
    ids = tp.unbounded_ids
    if upto is None:
        return ids
    if upto not in ids:
        raise EngineError(f"unknown loop id '{upto}' (unbounded loops: {', '.join(ids) or 'none'})")
    return ids[: ids.index(upto) + 1]


def _cex(u: Unroller, atoms: list, k: int) -> CounterexampleFound:
    trace = u.extract_trace(atoms)
    if trace.violated_step > 0:
        loop_id, local = u.session.schedule[trace.violated_step - 1]
    else:
        loop_id, local = u.session.loop_id, 0
    return CounterexampleFound(local, trace, loop_id)


def bmc_incremental(tp: TypedProgram, kmax: Optional[int], opts: EngineOptions,
                    stats: Optional[Stats] = None, upto: Optional[str] = None):
    """Incremental BMC; loops up to ``upto`` are unwound in source order, ``kmax`` each."""
    stats = stats if stats is not None else Stats()
    loops = _loop_ids(tp, upto)
    if len(loops) > 1 and kmax is None:
        raise EngineError("multi-loop unwinding needs --unwind-max")
    u = Unroller(tp, opts, stats, loops[0] if loops else None, _deadline(opts))
    k = 0
    try:
        atoms = u.session.frames[0].property_atoms
        if u.check(atoms, 0):
            return _cex(u, atoms, 0)
        u.block_atoms(atoms)
        for n, loop_id in enumerate(loops):
            if n:
                u.session.switch_loop(loop_id)
            local = 0
            while kmax is None or local < kmax:
                frame = u.session.unwind_step()
                local += 1
                k += 1
                if u.check(frame.property_atoms, k):
                    return _cex(u, frame.property_atoms, k)
                u.block_atoms(frame.property_atoms)
    except Timeout:
        return ResourceLimit("timeout", k)
    return BoundedSafe(kmax if loops else 0)


def bmc_nonincremental(tp: TypedProgram, kmax: Optional[int], opts: EngineOptions,
                       stats: Optional[Stats] = None, upto: Optional[str] = None):
    """From-scratch BMC per depth: re-parse, fresh session, fresh solver."""
    stats = stats if stats is not None else Stats()
    loops = _loop_ids(tp, upto)
    if len(loops) > 1 and kmax is None:
        raise EngineError("multi-loop unwinding needs --unwind-max")
    schedule = [(lid, j) for lid in loops for j in range(1, (kmax or 0) + 1)]
    deadline = _deadline(opts)
    total = len(schedule) if kmax is not None else None
    k = 0
    try:
        while total is None or k <= total:
            fresh = load_program(tp.source, tp.origin, tp.unwinding_assertions) if tp.source else tp
            u = Unroller(fresh, opts, stats, loops[0] if loops else None, deadline)
            cur = loops[0] if loops else None
            for j in range(k):
                lid = schedule[j][0] if total is not None else loops[0]
                if lid != cur:
                    u.session.switch_loop(lid)
                    cur = lid
                u.session.unwind_step()
            atoms = u.session.property_disjunction(k)
            if u.check(atoms, k):
                return _cex(u, atoms, k)
            k += 1
    except Timeout:
        return ResourceLimit("timeout", k)
    return BoundedSafe(kmax if loops else 0)


def multi_loop_schedule(tp: TypedProgram, kmax: int, opts: EngineOptions,
                        stats: Optional[Stats] = None, upto: Optional[str] = None):
    if opts.incremental:
        return bmc_incremental(tp, kmax, opts, stats, upto)
    return bmc_nonincremental(tp, kmax, opts, stats, upto)


__all__ = [
    "EngineError", "Timeout", "Unroller", "bmc_incremental", "bmc_nonincremental",
    "multi_loop_schedule",
]
