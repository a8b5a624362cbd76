"""Source pretty-printer; output re-parses to a structurally identical tree."""

from __future__ import annotations

from .ast import (
    ArrayType, Assert, Assign, Assume, Binary, BoolLit, Cast, Expr, For, If,
    Index, IntLit, Local, Nondet, Ternary, Unary, Var,
)


def expr_str(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value) if e.value >= 0 else f"(-{-e.value})"
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Nondet):
        return "nondet()"
    if isinstance(e, Unary):
        return f"{e.op}{_atom(e.arg)}"
    if isinstance(e, Binary):
        return f"{_atom(e.left)} {e.op} {_atom(e.right)}"
    if isinstance(e, Ternary):
        return f"{_atom(e.cond)} ? {_atom(e.then)} : {_atom(e.els)}"
    if isinstance(e, Cast):
        return f"{_atom(e.arg)} as {e.target}"
    if isinstance(e, Index):
        return f"{e.array}[{expr_str(e.index)}]"
    raise TypeError(e)


def _atom(e: Expr) -> str:
    if isinstance(e, (IntLit, BoolLit, Var, Nondet, Index)):
        return expr_str(e)
    return f"({expr_str(e)})"


def _stmts(stmts: list, indent: int, out: list):
    pad = "    " * indent
    for s in stmts:
        if isinstance(s, Assign):
            target = s.target if s.index is None else f"{s.target}[{expr_str(s.index)}]"
            out.append(f"{pad}{target} := {expr_str(s.value)};")
        elif isinstance(s, Local):
            out.append(f"{pad}local {s.type} {s.name} := {expr_str(s.value)};")
        elif isinstance(s, If):
            out.append(f"{pad}if ({expr_str(s.cond)}) {{")
            _stmts(s.then, indent + 1, out)
            if s.els:
                out.append(f"{pad}}} else {{")
                _stmts(s.els, indent + 1, out)
            out.append(f"{pad}}}")
        elif isinstance(s, Assert):
            out.append(f"{pad}assert({expr_str(s.cond)});")
        elif isinstance(s, Assume):
            out.append(f"{pad}assume({expr_str(s.cond)});")
        elif isinstance(s, For):
            out.append(f"{pad}for {s.var} in {_atom(s.lo)}..{_atom(s.hi)} {{")
            _stmts(s.body, indent + 1, out)
            out.append(f"{pad}}}")
        else:
            raise TypeError(s)


def program_str(prog) -> str:
    out: list = []
    for d in prog.decls:
        ty = d.type
        tstr = f"{ty.elem}[{ty.size}]" if isinstance(ty, ArrayType) else str(ty)
        init = f" := {expr_str(d.init)}" if d.init is not None else ""
        out.append(f"{d.kind} {tstr} {d.name}{init};")
    if prog.init:
        out.append("init {")
        _stmts(prog.init, 1, out)
        out.append("}")
    for ld in prog.loops:
        out.append(f"loop {ld.name} {{")
        _stmts(ld.body, 1, out)
        out.append("}")
    return "\n".join(out) + "\n"


def dump(node) -> object:
    """Position-free structural form of a syntax tree, for equality checks."""
    if isinstance(node, list):
        return tuple(dump(x) for x in node)
    if node is None or isinstance(node, (int, str, bool)):
        return node
    if hasattr(node, "__dataclass_fields__"):
        skip = {"pos", "ty", "label", "loop_id", "site", "origin"}
        return (type(node).__name__,) + tuple(
            (k, dump(getattr(node, k))) for k in node.__dataclass_fields__ if k not in skip
        )
    return node
