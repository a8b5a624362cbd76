"""Incremental CDCL SAT solver with solving under assumptions.

Two-watched-literal propagation, VSIDS branching with phase saving, first-UIP
learning with basic clause minimisation, Luby restarts and activity-based
learnt-clause reduction. Assumptions are the first decisions of every search,
so a learnt clause that depends on an assumption contains its negation and
stays valid when later calls use different assumptions.

External literals follow DIMACS: variable ``v >= 1`` or its negation ``-v``.
Internally literal ``2*v`` is ``v`` and ``2*v + 1`` is ``-v``.
"""

from __future__ import annotations

import heapq
import random
from typing import Iterable, Optional


class SolverError(Exception):
    pass


def luby(y: float, x: int) -> float:
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return y ** seq


def _lit(e: int) -> int:
    return 2 * e if e > 0 else -2 * e + 1


def _ext(lit: int) -> int:
    return -(lit >> 1) if lit & 1 else lit >> 1


class Solver:
    def __init__(self, preprocess: bool = True, seed: Optional[int] = None):
        self.preprocess = preprocess
        self.nvars = 0
        self.ok = True
        self.val: list = [0, 0]  # per literal: 1 true, -1 false, 0 unassigned
        self.level: list = [0]
        self.reason: list = [None]
        self.activity: list = [0.0]
        self.phase: list = [False]
        self.seen: list = [0]
        self.watches: list = [[], []]
        self.heap: list = []
        self.in_heap: list = [False]
        self.trail: list = []
        self.trail_lim: list = []
        self.qhead = 0
        self.clauses: list = []  # stored problem clauses (internal literals)
        self.original: list = []  # clauses as passed in, for DIMACS output
        self.learnts: list = []
        self.clause_act: dict = {}
        self.var_inc = 1.0
        self.cla_inc = 1.0
        self.var_decay = 0.95
        self.cla_decay = 0.999
        self.max_learnts = 0.0
        self.restart_unit = 100
        self.solves = 0
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.added_since_solve = 0
        self.model: list = []
        self.core: list = []
        self._act_flag: list = [False]
        self._act_occ: dict = {}
        self._rng = random.Random(seed) if seed else None

    # -- variables & clauses --
    def new_var(self) -> int:
        self.nvars += 1
        v = self.nvars
        self.val.extend((0, 0))
        self.level.append(0)
        self.reason.append(None)
        self.activity.append(self._rng.random() * 1e-5 if self._rng else 0.0)
        self.phase.append(False)
        self.seen.append(0)
        self.watches.extend(([], []))
        self.in_heap.append(False)
        self._act_flag.append(False)
        self._heap_insert(v)
        return v

    def set_preprocess(self, on: bool):
        if self.solves:
            raise SolverError("preprocessing can only be toggled before the first solve")
        self.preprocess = on

    def mark_activation(self, var: int):
        """Track clauses mentioning ``var`` so retired activations can be measured."""
        self._act_flag[var] = True
        self._act_occ.setdefault(var, 0)

    def add_clause(self, lits: Iterable[int]) -> bool:
        if not isinstance(lits, list):
            lits = list(lits)
        self.added_since_solve += 1
        self.original.append(lits)
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        val = self.val
        internal = [e + e if e > 0 else 1 - e - e for e in lits]
        if internal and (min(internal) < 2 or max(internal) > 2 * self.nvars + 1):
            bad = next(e for e in lits if e == 0 or abs(e) > self.nvars)
            raise SolverError(f"literal {bad} references an unknown variable")
        if len(internal) > 1:
            uniq = set(internal)
            if len(uniq) != len(internal):
                internal = list(dict.fromkeys(internal))
            if self.preprocess and not uniq.isdisjoint([p ^ 1 for p in internal]):
                return True  # tautology
        if any([val[p] for p in internal]):
            if self.preprocess:
                if any([val[p] == 1 for p in internal]):
                    return True  # satisfied by a level-0 unit
                internal = [p for p in internal if val[p] != -1]
            # watch non-false literals first
            internal.sort(key=lambda p: 0 if val[p] == 1 else 1 if val[p] == 0 else 2)
        if self._act_occ:
            flag = self._act_flag
            for p in internal:
                if flag[p >> 1]:
                    self._act_occ[p >> 1] += 1
        if not internal or val[internal[0]] == -1:
            self.ok = False
            return False
        if len(internal) == 1 or val[internal[1]] == -1:
            if val[internal[0]] == 0:
                self._enqueue(internal[0], None)
                if self._propagate() is not None:
                    self.ok = False
                    return False
            if len(internal) == 1:
                self.clauses.append(internal)
                return True
        self.clauses.append(internal)
        self.watches[internal[0]].append(internal)
        self.watches[internal[1]].append(internal)
        return True

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    # -- lazy max-activity heap: stale entries are skipped on pop --
    def _heap_insert(self, v: int):
        if not self.in_heap[v]:
            self.in_heap[v] = True
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _heap_pop(self) -> int:
        heap, act, in_heap = self.heap, self.activity, self.in_heap
        pop = heapq.heappop
        while heap:
            a, v = pop(heap)
            if in_heap[v] and -a == act[v]:
                in_heap[v] = False
                return v
        return 0

    def _rebuild_heap(self):
        act = self.activity
        self.heap = [(-act[v], v) for v in range(1, self.nvars + 1) if self.in_heap[v]]
        heapq.heapify(self.heap)

    def _bump(self, v: int):
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, self.nvars + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self._rebuild_heap()
        elif self.in_heap[v]:
            heapq.heappush(self.heap, (-act[v], v))

    def _bump_clause(self, c: list):
        key = id(c)
        a = self.clause_act.get(key, 0.0) + self.cla_inc
        self.clause_act[key] = a
        if a > 1e20:
            for k in self.clause_act:
                self.clause_act[k] *= 1e-20
            self.cla_inc *= 1e-20

    # -- trail --
    def _enqueue(self, p: int, reason):
        v = p >> 1
        self.val[p] = 1
        self.val[p ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(p)

    def _cancel_until(self, lvl: int):
        if len(self.trail_lim) <= lvl:
            return
        val, reason, phase = self.val, self.reason, self.phase
        stop = self.trail_lim[lvl]
        trail = self.trail
        for i in range(len(trail) - 1, stop - 1, -1):
            p = trail[i]
            v = p >> 1
            val[p] = 0
            val[p ^ 1] = 0
            reason[v] = None
            phase[v] = not (p & 1)
            if not self.in_heap[v]:
                self.in_heap[v] = True
                heapq.heappush(self.heap, (-self.activity[v], v))
        del trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(trail)

    def _propagate(self):
        val, watches, trail = self.val, self.watches, self.trail
        conflict = None
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            n = len(ws)
            i = j = 0
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == -1:
                        conflict = c
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        self.qhead = len(trail)
                    else:
                        v = first >> 1
                        val[first] = 1
                        val[first ^ 1] = -1
                        self.level[v] = len(self.trail_lim)
                        self.reason[v] = c
                        trail.append(first)
            del ws[j:]
            self.propagations += 1
            if conflict is not None:
                return conflict
        return None

    # -- conflict analysis --
    def _analyze(self, confl: list):
        seen, level, reason = self.seen, self.level, self.reason
        dl = len(self.trail_lim)
        learnt = [0]
        path = 0
        p = -1
        idx = len(self.trail) - 1
        to_clear = []
        while True:
            if id(confl) in self.clause_act:
                self._bump_clause(confl)
            for q in (confl if p == -1 else confl[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    to_clear.append(v)
                    self._bump(v)
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = 0
            path -= 1
            if path <= 0:
                break
        learnt[0] = p ^ 1
        # basic minimisation: drop literals implied by other learnt literals
        out = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None:
                out.append(q)
                continue
            for x in r[1:]:
                vx = x >> 1
                if not seen[vx] and level[vx] > 0:
                    out.append(q)
                    break
        for v in to_clear:
            seen[v] = 0
        if len(out) == 1:
            return out, 0
        best = 1
        for i in range(2, len(out)):
            if level[out[i] >> 1] > level[out[best] >> 1]:
                best = i
        out[1], out[best] = out[best], out[1]
        return out, level[out[1] >> 1]

    def _analyze_final(self, failed: int) -> list:
        """Assumption literals (internal) responsible for ``failed`` being false."""
        seen, reason, level = self.seen, self.reason, self.level
        core = [failed]
        if not self.trail_lim:
            return core
        seen[failed >> 1] = 1
        for i in range(len(self.trail) - 1, self.trail_lim[0] - 1, -1):
            x = self.trail[i]
            v = x >> 1
            if not seen[v]:
                continue
            r = reason[v]
            if r is None:
                if level[v] > 0:
                    core.append(x)
            else:
                for q in r[1:]:
                    if level[q >> 1] > 0:
                        seen[q >> 1] = 1
            seen[v] = 0
        seen[failed >> 1] = 0
        return core

    # -- learnt database --
    def _reduce_db(self):
        reason = self.reason
        acts = self.clause_act

        def locked(c):
            r = reason[c[0] >> 1]
            return r is c and self.val[c[0]] == 1

        ls = sorted(self.learnts, key=lambda c: acts.get(id(c), 0.0))
        half = len(ls) // 2
        keep, drop = [], []
        for i, c in enumerate(ls):
            if i < half and len(c) > 2 and not locked(c):
                drop.append(c)
            else:
                keep.append(c)
        for c in drop:
            acts.pop(id(c), None)
            self._count_act(c, -1)
        self.learnts = keep
        self._rebuild_watches()

    def _rebuild_watches(self):
        watches = [[] for _ in range(2 * self.nvars + 2)]
        for c in self.clauses:
            if len(c) >= 2:
                watches[c[0]].append(c)
                watches[c[1]].append(c)
        for c in self.learnts:
            watches[c[0]].append(c)
            watches[c[1]].append(c)
        self.watches = watches

    def _count_act(self, c: list, delta: int):
        flag = self._act_flag
        for p in c:
            if flag[p >> 1]:
                self._act_occ[p >> 1] += delta

    def retired_fraction(self) -> float:
        """Share of stored clauses that mention a retired (level-0 true) activation."""
        total = len(self.clauses) + len(self.learnts)
        if not total:
            return 0.0
        dead = 0
        for v, n in self._act_occ.items():
            if self.val[2 * v] == 1 and self.level[v] == 0:
                dead += n
        return dead / total

    def restart_and_compact(self):
        """Drop clauses satisfied at level 0 (e.g. by retired activation literals)."""
        if not self.ok:
            return
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return
        val = self.val

        def clean(cs, learnt):
            out = []
            for c in cs:
                if any(val[p] == 1 for p in c):
                    if learnt:
                        self.clause_act.pop(id(c), None)
                    self._count_act(c, -1)
                    continue
                if len(c) >= 2:
                    kept = [p for p in c if val[p] != -1]
                    if len(kept) != len(c):
                        self._count_act(c, -1)
                        if learnt:
                            self.clause_act.pop(id(c), None)
                        c = kept
                        self._count_act(c, 1)
                        if learnt:
                            self.clause_act[id(c)] = 0.0
                out.append(c)
            return out

        self.clauses = clean(self.clauses, False)
        self.learnts = clean(self.learnts, True)
        for i in range(self.nvars, 0, -1):
            if val[2 * i] != 0 and self.level[i] == 0:
                self.reason[i] = None
        self._rebuild_watches()

    # -- search --
    def _pick_branch(self) -> int:
        val = self.val
        if len(self.heap) > 4 * self.nvars + 64:
            self._rebuild_heap()
        while True:
            v = self._heap_pop()
            if v == 0:
                return -1
            if val[2 * v] == 0:
                return 2 * v + (0 if self.phase[v] else 1)

    def _search(self, nof_conflicts: int, assumps: list):
        val = self.val
        conflicts = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                conflicts += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self.clause_act[id(learnt)] = 0.0
                    self._bump_clause(learnt)
                    self._count_act(learnt, 1)
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc /= self.var_decay
                self.cla_inc /= self.cla_decay
                continue
            if conflicts >= nof_conflicts:
                self._cancel_until(0)
                return None
            if len(self.learnts) - len(self.trail) >= self.max_learnts:
                self._reduce_db()
                self.max_learnts *= 1.1
            nxt = -1
            while len(self.trail_lim) < len(assumps):
                p = assumps[len(self.trail_lim)]
                if val[p] == 1:
                    self.trail_lim.append(len(self.trail))
                elif val[p] == -1:
                    self.core = self._analyze_final(p)
                    return False
                else:
                    nxt = p
                    break
            if nxt == -1:
                nxt = self._pick_branch()
                if nxt == -1:
                    return True
                self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(nxt, None)

    def solve(self, assumptions: Iterable[int] = ()) -> bool:
        """Solve under ``assumptions``; sets :attr:`model` or :attr:`core`."""
        self.solves += 1
        self.added_since_solve = 0
        self.model = []
        self.core = []
        if not self.ok:
            return False
        assumps = []
        for e in assumptions:
            if e == 0 or abs(e) > self.nvars:
                raise SolverError(f"assumption {e} references an unknown variable")
            assumps.append(_lit(e))
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        self.max_learnts = max(len(self.clauses) / 3.0, 1000.0, self.max_learnts)
        restarts = 0
        status = None
        while status is None:
            status = self._search(int(luby(2, restarts) * self.restart_unit), assumps)
            restarts += 1
        if status:
            val = self.val
            self.model = [False] + [val[2 * v] == 1 for v in range(1, self.nvars + 1)]
        else:
            self.core = [_ext(p) for p in self.core]
        self._cancel_until(0)
        return status

    def value(self, e: int) -> bool:
        v = self.model[abs(e)]
        return v if e > 0 else not v

    # -- inspection --
    def check_model(self) -> bool:
        """Every original clause is satisfied by :attr:`model`."""
        return all(any(self.value(e) for e in c) for c in self.original)
