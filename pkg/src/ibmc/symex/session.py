"""Incremental symbolic execution of one unbounded loop at a time.

Frame 0 holds the initial-state equations (declarations and the ``init``
block); frame ``j >= 1`` is the ``j``-th iteration of the loop body. Each
``assert`` reached on a feasible path yields a property atom that is true
exactly when the assertion is violated on that path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..frontend.ast import (
    ArrayType, Assert, Assign, Assume, Binary, BoolLit, Cast, Expr, If, Index,
    IntLit, Local, Nondet, Ternary, Type, Unary, Var, BOOL,
)
from ..frontend.typecheck import INDEX_TYPE, TypedProgram
from ..interp import nondet_name
from .terms import SsaName, Term, TermFactory


class SymexError(Exception):
    pass


@dataclass
class GuardedEquation:
    id: int
    frame: int
    guard: Term
    lhs: SsaName
    rhs: Term
    kind: str = "def"  # "def" | "prop" | "assume" | "constraint"
    reads: frozenset = frozenset()
    label: str = ""

    @property
    def writes(self) -> SsaName:
        return self.lhs

    def __str__(self) -> str:
        return f"{self.frame}: [{self.guard!r}] {self.lhs} = {self.rhs!r}"


@dataclass
class PropertyAtom:
    eq_id: int
    name: SsaName
    term: Term
    label: str
    frame: int


@dataclass
class TimeframeFormula:
    step: int
    loop_id: Optional[str]
    equations: list = field(default_factory=list)
    property_atoms: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    boundary: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)  # input/nondet base -> name term read in this frame


_ARITH = {"+": "add", "-": "sub", "*": "mul", "&": "and", "|": "or", "^": "xor", "<<": "shl"}


class UnwindingSession:
    def __init__(self, tp: TypedProgram, loop_id: Optional[str] = None, constprop: bool = True):
        if loop_id is None and tp.unbounded_ids:
            loop_id = tp.unbounded_ids[0]
        if loop_id is not None and loop_id not in tp.unbounded_ids:
            raise SymexError(f"unknown loop id '{loop_id}' (unbounded loops: {', '.join(tp.unbounded_ids)})")
        self.tp = tp
        self.loop_id = loop_id
        self.tf = TermFactory(fold=constprop)
        self.constprop = constprop
        self.depth = 0
        self.frames: list = []
        self.equations: list = []
        self.schedule: list = []  # (loop_id, local k) for frames 1..depth
        self.local_depth = 0
        self.env: dict = {}
        self.assumption: Term = self.tf.true
        self._versions: dict = {}
        self._frame: Optional[TimeframeFormula] = None
        self._init_frame()

    # -- names & equations --
    def fresh(self, base: str, ty) -> SsaName:
        key = (base, self._frame.step)
        v = self._versions.get(key, 0)
        self._versions[key] = v + 1
        return SsaName(base, self._frame.step, v)

    def emit(self, lhs: SsaName, rhs: Term, guard: Term, kind: str = "def", label: str = "") -> GuardedEquation:
        eq = GuardedEquation(len(self.equations), self._frame.step, guard, lhs, rhs, kind,
                             self.tf.names(rhs), label)
        self.equations.append(eq)
        self._frame.equations.append(eq)
        return eq

    def assign(self, base: str, value: Term, guard: Term):
        name = self.fresh(base, value.ty)
        self.emit(name, value, guard)
        if self.constprop and value.is_const:
            self.env[base] = value
        else:
            self.env[base] = self.tf.name(name, value.ty)

    # -- frames --
    def _open(self, loop_id: Optional[str]) -> TimeframeFormula:
        frame = TimeframeFormula(len(self.frames), loop_id)
        self.frames.append(frame)
        self._frame = frame
        return frame

    def _close(self):
        frame = self._frame
        frame.boundary = {d.name: self.env[d.name] for d in self.tp.states}
        self._frame = None
        return frame

    def _init_frame(self):
        self._open(None)
        tf = self.tf
        for d in self.tp.states:
            if d.init is None:
                continue
            v = self.expr(d.init)
            if isinstance(d.type, ArrayType):
                v = tf.const_array(v, d.type)
            self.assign(d.name, v, tf.true)
        self.exec(self.tp.init, tf.true)
        self._close()

    def unwind_step(self) -> TimeframeFormula:
        """Execute one more iteration of the current loop symbolically."""
        if self.loop_id is None:
            raise SymexError("program has no unbounded loop to unwind")
        self._open(self.loop_id)
        self.depth += 1
        self.local_depth += 1
        self.schedule.append((self.loop_id, self.local_depth))
        self.exec(self.tp.loop_def(self.loop_id).body, self.tf.true)
        return self._close()

    def switch_loop(self, loop_id: str):
        """Continue with the next loop from the current boundary (sequential composition)."""
        if loop_id not in self.tp.unbounded_ids:
            raise SymexError(f"unknown loop id '{loop_id}'")
        self.loop_id = loop_id
        self.local_depth = 0

    def havoc_state(self):
        """Rebind every state variable modified in the loop to a fresh unconstrained name.

        Frame-0 property atoms are dropped; the initial-state predicate is
        thereby weakened to ``true`` for the havocked variables.
        """
        if self.depth != 0:
            raise SymexError("havoc_state must be called before the first unwinding")
        frame = self.frames[0]
        self._frame = frame
        modified = self.tp.loop(self.loop_id).modified_vars if self.loop_id else set()
        for d in self.tp.states:
            if d.name in modified:
                name = SsaName(d.name, 0, -1)
                self.env[d.name] = self.tf.name(name, d.type)
        frame.property_atoms = []
        self.assumption = self.tf.true
        frame.boundary = {d.name: self.env[d.name] for d in self.tp.states}
        self._frame = None

    def add_entry_constraint(self, conds: list):
        """Assume boolean source expressions over the current (frame-0) state."""
        frame = self.frames[-1]
        self._frame = frame
        for e in conds:
            t = self.expr(e)
            if t.is_const and t.val:
                continue
            eq = self.emit(self.fresh("constraint$", BOOL), t, self.tf.true, "constraint")
            frame.constraints.append(eq)
        self._frame = None

    # -- statements --
    def exec(self, stmts: list, guard: Term):
        tf = self.tf
        for s in stmts:
            if guard.is_const and not guard.val:
                return
            if isinstance(s, Assign):
                v = self.expr(s.value)
                if s.index is not None:
                    idx = tf.cast(self.expr(s.index), INDEX_TYPE)
                    v = tf.store(self.env[s.target], idx, v)
                self.assign(s.target, v, guard)
            elif isinstance(s, Local):
                self.assign(s.name, self.expr(s.value), guard)
            elif isinstance(s, If):
                self.branch(s, guard)
            elif isinstance(s, Assert):
                c = self.expr(s.cond)
                atom = tf.and_(tf.and_(self.assumption, guard), tf.not_(c))
                name = self.fresh("prop$", BOOL)
                eq = self.emit(name, atom, guard, "prop", s.label)
                self._frame.property_atoms.append(PropertyAtom(eq.id, name, atom, s.label, self._frame.step))
            elif isinstance(s, Assume):
                c = self.expr(s.cond)
                a = tf.and_(self.assumption, tf.implies(guard, c))
                if a.is_const:
                    self.assumption = a
                else:
                    name = self.fresh("assume$", BOOL)
                    self.emit(name, a, guard, "assume")
                    self.assumption = tf.name(name, BOOL)
            else:
                raise SymexError(f"unexpected statement {type(s).__name__}")

    def branch(self, s: If, guard: Term):
        tf = self.tf
        c = self.expr(s.cond)
        if c.is_const:
            self.exec(s.then if c.val else s.els, guard)
            return
        before = dict(self.env)
        self.exec(s.then, tf.and_(guard, c))
        after_then = self.env
        self.env = dict(before)
        self.exec(s.els, tf.and_(guard, tf.not_(c)))
        after_else = self.env
        merged = dict(before)
        for var in before:
            a, b = after_then[var], after_else[var]
            if a is b:
                merged[var] = a
                continue
            self.env = merged
            self.assign(var, tf.ite(c, a, b), guard)
        self.env = merged

    # -- expressions --
    def read(self, name: str, ty) -> Term:
        if name in self.env:
            return self.env[name]
        sym = self.tp.symbols.get(name)
        if sym is not None and sym.kind == "input":
            return self._input(name, ty)
        raise SymexError(f"read of unbound variable '{name}'")

    def _input(self, base: str, ty) -> Term:
        frame = self._frame
        t = frame.inputs.get(base)
        if t is None:
            t = self.tf.name(SsaName(base, frame.step, 0), ty)
            frame.inputs[base] = t
        return t

    def expr(self, e: Expr) -> Term:
        tf = self.tf
        if isinstance(e, IntLit):
            return tf.const(e.value, e.ty)
        if isinstance(e, BoolLit):
            return tf.const(e.value, BOOL)
        if isinstance(e, Var):
            return self.read(e.name, e.ty)
        if isinstance(e, Nondet):
            return self._input(nondet_name(e.site), e.ty)
        if isinstance(e, Index):
            idx = tf.cast(self.expr(e.index), INDEX_TYPE)
            return tf.select(self.env[e.array], idx)
        if isinstance(e, Unary):
            a = self.expr(e.arg)
            return tf.unary({"-": "neg", "~": "bnot", "!": "not"}[e.op], a)
        if isinstance(e, Ternary):
            c = self.expr(e.cond)
            if c.is_const:
                return self.expr(e.then if c.val else e.els)
            return tf.ite(c, self.expr(e.then), self.expr(e.els))
        if isinstance(e, Cast):
            return tf.cast(self.expr(e.arg), e.target)
        if isinstance(e, Binary):
            return self.binary(e)
        raise SymexError(f"unexpected expression {type(e).__name__}")

    def binary(self, e: Binary) -> Term:
        tf = self.tf
        op = e.op
        if op in ("&&", "||"):
            a = self.expr(e.left)
            if a.is_const and self.constprop:
                if op == "&&" and not a.val:
                    return tf.false
                if op == "||" and a.val:
                    return tf.true
            b = self.expr(e.right)
            return tf.and_(a, b) if op == "&&" else tf.or_(a, b)
        a = self.expr(e.left)
        b = self.expr(e.right)
        ty: Type = e.left.ty
        if op in _ARITH:
            return tf.binary(_ARITH[op], a, b)
        if op == ">>":
            return tf.binary("ashr" if ty.signed else "lshr", a, b)
        if op == "/":
            return tf.binary("sdiv" if ty.signed else "udiv", a, b)
        if op == "%":
            return tf.binary("srem" if ty.signed else "urem", a, b)
        if op == "==":
            return tf.binary("eq", a, b)
        if op == "!=":
            return tf.not_(tf.binary("eq", a, b))
        lt, le = ("slt", "sle") if ty.signed else ("ult", "ule")
        if op == "<":
            return tf.binary(lt, a, b)
        if op == "<=":
            return tf.binary(le, a, b)
        if op == ">":
            return tf.binary(lt, b, a)
        if op == ">=":
            return tf.binary(le, b, a)
        raise SymexError(f"unknown operator {op}")

    # -- queries --
    def property_disjunction(self, k: int) -> list:
        """All property atoms of frames ``0..k`` in generation order."""
        if k > self.depth:
            raise SymexError(f"k={k} exceeds unwinding depth {self.depth}")
        return [a for f in self.frames[: k + 1] for a in f.property_atoms]

    def show_ssa(self) -> str:
        return "\n".join(str(eq) for eq in self.equations)
