"""Type checking and name resolution.

Integer literals, ``for`` induction variables and ``nondet()`` start out with
the pending ``int`` type and are settled by their context; there is no implicit
promotion between bitvector types.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ast import (
    ArrayType, Assert, Assign, Assume, Binary, BoolLit, Cast, Decl, Expr, For,
    If, Index, IntLit, Local, LoopDef, Nondet, Pos, Program, Ternary, Type,
    Unary, Var, BOOL, INT, bv, COMPARISONS,
)

INDEX_TYPE = bv(32)


class TypeCheckError(Exception):
    def __init__(self, msg: str, pos: Pos, origin: str = "<stdin>"):
        self.pos = pos
        super().__init__(f"{origin}:{pos}: {msg}")


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str  # "input" | "state" | "local" | "for"
    type: object


@dataclass
class LoopInfo:
    id: str
    kind: str  # "unbounded" | "bounded"
    bound: Optional[int]
    body: list
    modified_vars: frozenset
    parent: Optional[str] = None
    name: str = ""

    def describe(self) -> str:
        kind = "unbounded" if self.kind == "unbounded" else f"bounded({self.bound})"
        nest = f" in {self.parent}" if self.parent else ""
        return f"{self.id} {kind}{nest}"


@dataclass
class TypedProgram:
    decls: list
    init: list
    loops: list  # LoopDef, unbounded, source order
    loop_table: list  # LoopInfo, every loop in source order
    symbols: dict
    origin: str = "<stdin>"
    nondet_sites: int = 0
    unwinding_assertions: bool = True
    source: str = ""

    @property
    def inputs(self) -> list:
        return [d for d in self.decls if d.kind == "input"]

    @property
    def states(self) -> list:
        return [d for d in self.decls if d.kind == "state"]

    def loop(self, loop_id: str) -> LoopInfo:
        for info in self.loop_table:
            if info.id == loop_id:
                return info
        raise KeyError(loop_id)

    def loop_def(self, loop_id: str) -> LoopDef:
        for ld in self.loops:
            if ld.loop_id == loop_id:
                return ld
        raise KeyError(loop_id)

    @property
    def unbounded_ids(self) -> list:
        return [ld.loop_id for ld in self.loops]


def _bounded_for(ty: Type, value: int) -> bool:
    if ty.is_bool:
        return False
    lo = -(1 << (ty.width - 1)) if ty.signed else 0
    return lo <= value <= ty.mask


class Checker:
    def __init__(self, origin: str):
        self.origin = origin
        self.globals: dict = {}
        self.scopes: list = []
        self.all_names: set = set()
        self.nondet_sites = 0
        self.in_init = False

    def error(self, msg: str, pos: Pos):
        raise TypeCheckError(msg, pos, self.origin)

    # -- symbols --
    def declare(self, sym: Symbol, pos: Pos):
        if sym.name in self.all_names:
            self.error(f"duplicate declaration of '{sym.name}'", pos)
        self.all_names.add(sym.name)
        if self.scopes:
            self.scopes[-1][sym.name] = sym
        else:
            self.globals[sym.name] = sym

    def lookup(self, name: str, pos: Pos) -> Symbol:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        if name in self.globals:
            return self.globals[name]
        self.error(f"undeclared identifier '{name}'", pos)

    # -- expressions --
    def infer(self, e: Expr, expected: Optional[Type] = None) -> Type:
        t = self._infer(e, expected)
        e.ty = t
        if expected is not None and t.is_int:
            self.resolve(e, expected)
            return expected
        if expected is not None and t != expected:
            self.error(f"type mismatch: expected {expected}, got {t}", e.pos)
        return t

    def _infer(self, e: Expr, expected: Optional[Type]) -> Type:
        if isinstance(e, IntLit):
            if expected is not None and expected.is_bool:
                self.error(f"type mismatch: expected bool, got integer literal", e.pos)
            return INT
        if isinstance(e, BoolLit):
            return BOOL
        if isinstance(e, Nondet):
            if e.site < 0:
                e.site = self.nondet_sites
                self.nondet_sites += 1
            return INT
        if isinstance(e, Var):
            sym = self.lookup(e.name, e.pos)
            if isinstance(sym.type, ArrayType):
                self.error(f"array '{e.name}' used without index", e.pos)
            if sym.kind == "input" and self.in_init:
                self.error(f"input '{e.name}' cannot be read before the first step", e.pos)
            if sym.kind == "for":
                return INT
            return sym.type
        if isinstance(e, Index):
            sym = self.lookup(e.array, e.pos)
            if not isinstance(sym.type, ArrayType):
                self.error(f"'{e.array}' is not an array", e.pos)
            self.index(e.index, sym.type)
            return sym.type.elem
        if isinstance(e, Unary):
            if e.op == "!":
                self.infer(e.arg, BOOL)
                return BOOL
            t = self.infer(e.arg, expected if expected is not None and expected.is_bv else None)
            if t.is_bool:
                self.error(f"operator '{e.op}' needs a bitvector operand", e.pos)
            return t
        if isinstance(e, Binary):
            return self.binary(e, expected)
        if isinstance(e, Ternary):
            self.infer(e.cond, BOOL)
            a = self.infer(e.then, expected)
            b = self.infer(e.els, expected if not a.is_int else None)
            return self.unify(e.then, a, e.els, b, e.pos)
        if isinstance(e, Cast):
            t = self.infer(e.arg)
            if t.is_int:
                if isinstance(e.arg, Nondet) or e.target.is_bv:
                    self.resolve(e.arg, e.target if e.target.is_bv else BOOL)
                else:
                    self.resolve(e.arg, INT_DEFAULT)
            return e.target
        self.error(f"unknown expression {type(e).__name__}", e.pos)

    def index(self, idx: Expr, arr: ArrayType):
        t = self.infer(idx)
        if t.is_int:
            self.resolve(idx, INDEX_TYPE)
        elif t.is_bool:
            self.error("array index must be a bitvector", idx.pos)
        if isinstance(idx, IntLit) and not 0 <= idx.value < arr.size:
            self.error(f"constant index {idx.value} out of bounds for size {arr.size}", idx.pos)

    def unify(self, a: Expr, ta: Type, b: Expr, tb: Type, pos: Pos) -> Type:
        if ta.is_int and tb.is_int:
            return INT
        if ta.is_int:
            self.resolve(a, tb)
            return tb
        if tb.is_int:
            self.resolve(b, ta)
            return ta
        if ta != tb:
            self.error(f"type mismatch: {ta} vs {tb}", pos)
        return ta

    def binary(self, e: Binary, expected: Optional[Type]) -> Type:
        op = e.op
        if op in ("&&", "||"):
            self.infer(e.left, BOOL)
            self.infer(e.right, BOOL)
            return BOOL
        if op in COMPARISONS:
            ta = self.infer(e.left)
            tb = self.infer(e.right, None if ta.is_int else ta)
            t = self.unify(e.left, ta, e.right, tb, e.pos)
            if t.is_int:
                self.resolve(e.left, INT_DEFAULT)
                self.resolve(e.right, INT_DEFAULT)
                t = INT_DEFAULT
            if t.is_bool and op not in ("==", "!="):
                self.error(f"operator '{op}' needs bitvector operands", e.pos)
            return BOOL
        if op in ("<<", ">>"):
            ta = self.infer(e.left, expected if expected is not None and expected.is_bv else None)
            tb = self.infer(e.right)
            if ta.is_bool or tb.is_bool:
                self.error(f"operator '{op}' needs bitvector operands", e.pos)
            if tb.is_int and not ta.is_int:
                self.resolve(e.right, ta)
            return ta
        hint = expected if expected is not None and not expected.is_int else None
        ta = self.infer(e.left, hint) if hint is not None and hint.is_bv else self.infer(e.left)
        tb = self.infer(e.right, None if ta.is_int else ta)
        t = self.unify(e.left, ta, e.right, tb, e.pos)
        if t.is_bool and op not in ("&", "|", "^"):
            self.error(f"operator '{op}' needs bitvector operands", e.pos)
        return t

    def resolve(self, e: Expr, t: Type):
        """Settle every pending-int node under ``e`` to type ``t``."""
        if e.ty is not None and not e.ty.is_int:
            if e.ty != t:
                self.error(f"type mismatch: expected {t}, got {e.ty}", e.pos)
            return
        if isinstance(e, Nondet):
            e.ty = t
            return
        if t.is_bool:
            self.error("type mismatch: expected bool, got integer", e.pos)
        e.ty = t
        if isinstance(e, IntLit):
            if not _bounded_for(t, e.value):
                self.error(f"literal {e.value} does not fit {t}", e.pos)
        elif isinstance(e, Unary):
            self.resolve(e.arg, t)
        elif isinstance(e, Binary):
            self.resolve(e.left, t)
            if e.right.ty is not None and e.right.ty.is_int:
                self.resolve(e.right, t)
        elif isinstance(e, Ternary):
            self.resolve(e.then, t)
            self.resolve(e.els, t)

    # -- statements --
    def block(self, stmts: list, scoped: bool = True):
        if scoped:
            self.scopes.append({})
        for s in stmts:
            self.stmt(s)
        if scoped:
            self.scopes.pop()

    def stmt(self, s):
        if isinstance(s, Assign):
            sym = self.lookup(s.target, s.pos)
            if sym.kind == "input":
                self.error(f"cannot assign to input '{s.target}': inputs are read-only per step", s.pos)
            if sym.kind == "for":
                self.error(f"cannot assign to loop variable '{s.target}'", s.pos)
            if isinstance(sym.type, ArrayType):
                if s.index is None:
                    self.error(f"whole-array assignment to '{s.target}' is not supported", s.pos)
                self.index(s.index, sym.type)
                self.infer(s.value, sym.type.elem)
            else:
                if s.index is not None:
                    self.error(f"'{s.target}' is not an array", s.pos)
                self.infer(s.value, sym.type)
        elif isinstance(s, Local):
            self.infer(s.value, s.type)
            self.declare(Symbol(s.name, "local", s.type), s.pos)
        elif isinstance(s, If):
            self.infer(s.cond, BOOL)
            self.block(s.then)
            self.block(s.els)
        elif isinstance(s, (Assert, Assume)):
            self.infer(s.cond, BOOL)
        elif isinstance(s, For):
            for bound in (s.lo, s.hi):
                t = self.infer(bound)
                if t.is_int:
                    self.resolve(bound, INT_DEFAULT)
            self.scopes.append({})
            self.declare(Symbol(s.var, "for", INT), s.pos)
            self.block(s.body, scoped=False)
            self.scopes.pop()
        else:
            self.error(f"unknown statement {type(s).__name__}", s.pos)


INT_DEFAULT = bv(64, True)


def _assigned(stmts: list, out: set):
    for s in stmts:
        if isinstance(s, Assign):
            out.add(s.target)
        elif isinstance(s, Local):
            out.add(s.name)
        elif isinstance(s, If):
            _assigned(s.then, out)
            _assigned(s.els, out)
        elif isinstance(s, For):
            _assigned(s.body, out)


def assigned_vars(stmts: list) -> frozenset:
    """Assignment targets syntactically reachable in ``stmts``."""
    out: set = set()
    _assigned(stmts, out)
    return frozenset(out)


def _reads(e: Expr, out: set):
    if isinstance(e, Var):
        out.add(e.name)
    elif isinstance(e, Index):
        out.add(e.array)
        _reads(e.index, out)
    elif isinstance(e, Unary):
        _reads(e.arg, out)
    elif isinstance(e, Binary):
        _reads(e.left, out)
        _reads(e.right, out)
    elif isinstance(e, Ternary):
        _reads(e.cond, out)
        _reads(e.then, out)
        _reads(e.els, out)
    elif isinstance(e, Cast):
        _reads(e.arg, out)


def expr_reads(e: Expr) -> set:
    out: set = set()
    _reads(e, out)
    return out


def _check_definite_init(chk: Checker, stmts: list, ready: set, uninit: set) -> set:
    """Reject reads of state variables before the init block assigns them."""
    def check(e: Expr, pos: Pos):
        bad = expr_reads(e) & (uninit - ready)
        if bad:
            chk.error(f"state variable '{sorted(bad)[0]}' read before initialization", pos)

    ready = set(ready)
    for s in stmts:
        if isinstance(s, Assign):
            check(s.value, s.pos)
            if s.index is not None:
                check(s.index, s.pos)
                if s.target in uninit and s.target not in ready:
                    chk.error(f"array '{s.target}' read before initialization", s.pos)
            ready.add(s.target)
        elif isinstance(s, Local):
            check(s.value, s.pos)
        elif isinstance(s, If):
            check(s.cond, s.pos)
            a = _check_definite_init(chk, s.then, ready, uninit)
            b = _check_definite_init(chk, s.els, ready, uninit)
            ready |= a & b
        elif isinstance(s, (Assert, Assume)):
            check(s.cond, s.pos)
        elif isinstance(s, For):
            check(s.lo, s.pos)
            check(s.hi, s.pos)
            _check_definite_init(chk, s.body, ready, uninit)
    return ready


def typecheck(prog: Program) -> TypedProgram:
    """Resolve names and types; returns a :class:`TypedProgram` with its loop table."""
    from .loops import index_loops

    chk = Checker(prog.origin)
    for d in prog.decls:
        if d.kind == "input":
            if d.init is not None:
                chk.error(f"input '{d.name}' cannot have an initializer", d.pos)
            if isinstance(d.type, ArrayType):
                chk.error(f"input '{d.name}' cannot be an array", d.pos)
        else:
            if d.init is not None:
                chk.in_init = True
                elem = d.type.elem if isinstance(d.type, ArrayType) else d.type
                reads = expr_reads(d.init)
                later = {x.name for x in prog.decls[prog.decls.index(d):] if x.kind == "state"}
                if reads & later:
                    chk.error(f"initializer of '{d.name}' reads a state variable declared later", d.pos)
                chk.infer(d.init, elem)
                chk.in_init = False
        chk.declare(Symbol(d.name, d.kind, d.type), d.pos)

    chk.in_init = True
    chk.block(prog.init)
    chk.in_init = False
    uninit = {d.name for d in prog.decls if d.kind == "state" and d.init is None}
    ready = _check_definite_init(chk, prog.init, set(), uninit)
    missing = uninit - ready
    if missing:
        name = sorted(missing)[0]
        chk.error(f"state variable '{name}' has no initializer and is not assigned in init",
                  prog.decl(name).pos)

    for ld in prog.loops:
        chk.block(ld.body)

    tp = TypedProgram(
        decls=prog.decls,
        init=prog.init,
        loops=prog.loops,
        loop_table=[],
        symbols={**chk.globals},
        origin=prog.origin,
        nondet_sites=chk.nondet_sites,
    )
    _collect_scoped_symbols(chk, tp)
    tp.loop_table = index_loops(tp)
    return tp


def _collect_scoped_symbols(chk: Checker, tp: TypedProgram):
    """Record local and loop-variable symbols (names are globally unique)."""
    def walk(stmts):
        for s in stmts:
            if isinstance(s, Local):
                tp.symbols[s.name] = Symbol(s.name, "local", s.type)
            elif isinstance(s, If):
                walk(s.then)
                walk(s.els)
            elif isinstance(s, For):
                tp.symbols[s.var] = Symbol(s.var, "for", INT)
                walk(s.body)

    walk(tp.init)
    for ld in tp.loops:
        walk(ld.body)
