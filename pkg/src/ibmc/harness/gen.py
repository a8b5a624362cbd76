"""Synthetic benchmark families with ``key=value`` expectation sidecars."""

from __future__ import annotations

import os
import random
from typing import Optional

FAMILIES = ("counter", "deadvars", "mul_guard", "array_chain", "multiloop", "kind_reset", "random")


class GenError(Exception):
    pass


def counter(d: int):
    if not 1 <= d <= 255:
        raise GenError("counter: d must be in 1..255")
    src = f"state u8 c := 0; loop main {{ c := c + 1; assert(c != {d}); }}\n"
    return src, {"verdict": "sat", "depth": d, "loop": "main.0", "unwind_max": d}


def deadvars(d: int, n_dead: int):
    """A guarded counter that is safe up to ``d`` plus ``n_dead`` variables it never reads."""
    if d < 1 or d > 250 or n_dead < 0:
        raise GenError("deadvars: need 1 <= d <= 250 and n_dead >= 0")
    lines = ["input bool en;", "input u8 t;", "state u8 c := 0;"]
    lines += [f"state u8 v{i} := {i % 256};" for i in range(n_dead)]
    lines.append("loop main {")
    lines.append("  if (en) { c := c + 1; }")
    for i in range(n_dead):
        lines.append(f"  v{i} := (v{i} ^ t) + {(7 * i + 1) % 256};")
    lines.append(f"  assert(c != {d + 1});")
    lines.append("}")
    return "\n".join(lines) + "\n", {"verdict": "safe", "depth": d, "unwind_max": d}


_FACTORS = {8: (11, 13), 16: (251, 241), 32: (65521, 65519)}


def mul_guard(w: int, bug: int = 0):
    """Multiplication properties: odd products stay odd (safe), or a factorisation target (bug)."""
    if w not in _FACTORS:
        raise GenError(f"mul_guard: width must be one of {sorted(_FACTORS)}")
    if bug:
        p, q = _FACTORS[w]
        src = (f"input u{w} a; input u{w} b;\n"
               f"loop main {{ assert(a * b != {p * q}); }}\n")
        return src, {"verdict": "sat", "depth": 1, "loop": "main.0", "unwind_max": 3}
    src = (f"input u{w} a;\nstate u{w} acc := 1;\n"
           f"loop main {{ acc := acc * (a | 1); assert((acc & 1) == 1); }}\n")
    return src, {"verdict": "safe", "depth": 4, "unwind_max": 4}


def array_chain(n: int):
    """``n`` writes to consecutive indices, then a read of the first one."""
    if not 1 <= n <= 64:
        raise GenError("array_chain: n must be in 1..64")
    lines = ["input u8 i;", "input u8 v;", "state u8[16] a := 0;", "loop main {"]
    for j in range(n):
        lines.append(f"  a[i + {j}] := v + {j};")
    lines.append("  assert(a[i] == v);")
    lines.append("}")
    return "\n".join(lines) + "\n", {"verdict": "safe", "depth": 3, "unwind_max": 3}


def multiloop(n_loops: int, d: int):
    """``n_loops`` sequential loops; the last one fails at its local depth ``d``."""
    if n_loops < 1 or not 1 <= d <= 100:
        raise GenError("multiloop: need n_loops >= 1 and 1 <= d <= 100")
    kmax = max(d, 3)
    lines = ["input bool t;"]
    lines += [f"state u8 s{i} := 0;" for i in range(n_loops)]
    for i in range(n_loops - 1):
        lines.append(f"loop l{i} {{ s{i} := s{i} + (t as u8); assert(s{i} <= {kmax}); }}")
    last = n_loops - 1
    lines.append(f"loop l{last} {{ s{last} := s{last} + 1; assert(s{last} != {d}); }}")
    return "\n".join(lines) + "\n", {"verdict": "sat", "depth": d, "loop": f"main.{last}",
                                     "unwind_max": kmax}


def kind_reset(r: int, pad: int = 0):
    """A counter reset at 4 whose assertion needs ``r``-induction; ``pad`` adds inductive side variables."""
    if not 1 <= r <= 200:
        raise GenError("kind_reset: r must be in 1..200")
    lines = [f"input u8 t{i};" for i in range(pad)]
    lines.append("state u8 x := 0;")
    lines += [f"state u8 y{i} := 1;" for i in range(pad)]
    lines.append("loop main {")
    lines.append("  x := x + 1;")
    lines.append("  if (x == 4) { x := 0; }")
    for i in range(pad):
        lines.append(f"  y{i} := (y{i} * 3 + t{i}) | 1;")
        lines.append(f"  assert((y{i} & 1) == 1);")
    lines.append(f"  assert(x != {3 + r});")
    lines.append("}")
    return "\n".join(lines) + "\n", {"verdict": "proved", "depth": r, "unwind_max": r + 2,
                                     "k_induction": 1}


# -- random small programs --

class _RandomProgram:
    TYPES = ("bool", "u2", "u3", "u4")

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.states: list = []
        self.inputs: list = []
        self.nondets = 0

    def lit(self, ty: str) -> str:
        if ty == "bool":
            return self.rng.choice(["true", "false"])
        return str(self.rng.randrange(1 << int(ty[1:])))

    def expr(self, ty: str, depth: int = 0, allow_inputs: bool = True) -> str:
        rng = self.rng
        pool = [n for n, t in self.states if t == ty]
        if allow_inputs:
            pool += [n for n, t in self.inputs if t == ty]
        if depth >= 2 or rng.random() < 0.3:
            r = rng.random()
            if pool and r < 0.7:
                return rng.choice(pool)
            if allow_inputs and r < 0.8 and self.nondets < 2:
                self.nondets += 1
                return "nondet()" if ty == "bool" else f"(nondet() as {ty})"
            return self.lit(ty)
        if ty == "bool":
            k = rng.random()
            if k < 0.5:
                t = rng.choice(self.TYPES[1:])
                op = rng.choice(["==", "!=", "<", "<=", ">", ">="])
                return f"({self.expr(t, depth + 1, allow_inputs)} {op} {self.expr(t, depth + 1, allow_inputs)})"
            if k < 0.8:
                op = rng.choice(["&&", "||"])
                return f"({self.expr('bool', depth + 1, allow_inputs)} {op} {self.expr('bool', depth + 1, allow_inputs)})"
            return f"!{self.expr('bool', depth + 1, allow_inputs)}"
        op = rng.choice(["+", "-", "*", "&", "|", "^", "/", "%", "<<", ">>"])
        if rng.random() < 0.15:
            c = self.expr("bool", depth + 1, allow_inputs)
            return f"({c} ? {self.expr(ty, depth + 1, allow_inputs)} : {self.expr(ty, depth + 1, allow_inputs)})"
        return f"({self.expr(ty, depth + 1, allow_inputs)} {op} {self.expr(ty, depth + 1, allow_inputs)})"

    def block(self, n: int, depth: int = 0) -> list:
        rng = self.rng
        out = []
        for _ in range(n):
            k = rng.random()
            if k < 0.5 and self.states:
                name, ty = rng.choice(self.states)
                out.append(f"{name} := {self.expr(ty)};")
            elif k < 0.7 and depth < 2:
                c = self.expr("bool")
                then = " ".join(self.block(rng.randint(1, 2), depth + 1))
                els = " ".join(self.block(rng.randint(0, 2), depth + 1))
                out.append(f"if ({c}) {{ {then} }}" + (f" else {{ {els} }}" if els else ""))
            elif k < 0.78:
                out.append(f"assume({self.expr('bool')});")
            else:
                out.append(f"assert({self.expr('bool')});")
        return out

    def program(self) -> str:
        rng = self.rng
        for i in range(rng.randint(1, 3)):
            self.states.append((f"s{i}", rng.choice(self.TYPES)))
        for i in range(rng.randint(0, 1)):
            self.inputs.append((f"in{i}", rng.choice(self.TYPES)))
        lines = [f"input {t} {n};" for n, t in self.inputs]
        for n, t in self.states:
            lines.append(f"state {t} {n} := {self.lit(t)};")
        body = self.block(rng.randint(2, 5))
        if not any(s.startswith("assert") or "assert(" in s for s in body):
            body.append(f"assert({self.expr('bool')});")
        lines.append("loop main {")
        lines += ["  " + s for s in body]
        lines.append("}")
        return "\n".join(lines) + "\n"


def random_program(seed: int, kmax: int = 6):
    """A random small program; the expectation comes from the explicit-state checker."""
    from ..frontend import load_program
    from ..oracle import ExplicitStateChecker

    from ..oracle import StateSpaceTooLarge

    for attempt in range(100):
        src = _RandomProgram(random.Random(seed * 1000 + attempt)).program()
        tp = load_program(src, f"random{seed}")
        try:
            res = ExplicitStateChecker(tp).bounded(kmax)
            break
        except StateSpaceTooLarge:
            continue
    else:
        raise GenError(f"random: no enumerable program for seed {seed}")
    meta = {"verdict": res.verdict, "depth": res.depth, "unwind_max": kmax}
    if res.verdict == "sat":
        meta["loop"] = res.loop_id
    return src, meta


_BUILDERS = {
    "counter": (counter, ("d",)),
    "deadvars": (deadvars, ("d", "n_dead")),
    "mul_guard": (mul_guard, ("w", "bug")),
    "array_chain": (array_chain, ("n",)),
    "multiloop": (multiloop, ("n_loops", "d")),
    "kind_reset": (kind_reset, ("r", "pad")),
    "random": (random_program, ("seed", "kmax")),
}


def parse_params(text: Optional[str]) -> dict:
    out = {}
    if not text:
        return out
    for part in text.replace(" ", ",").split(","):
        if not part:
            continue
        if "=" not in part:
            raise GenError(f"parameter '{part}' is not key=value")
        k, v = part.split("=", 1)
        try:
            out[k.strip()] = int(v)
        except ValueError:
            raise GenError(f"parameter '{k}' must be an integer") from None
    return out


def gen_family(name: str, params: dict):
    """Returns ``(file stem, source, expectation)``."""
    if name not in _BUILDERS:
        raise GenError(f"unknown family '{name}' (choose from {', '.join(FAMILIES)})")
    fn, allowed = _BUILDERS[name]
    unknown = set(params) - set(allowed)
    if unknown:
        raise GenError(f"{name}: unknown parameter(s) {', '.join(sorted(unknown))}")
    src, meta = fn(**params)
    stem = name + "".join(f"_{k}{params[k]}" for k in allowed if k in params)
    meta = {"family": name, **{k: params[k] for k in allowed if k in params}, **meta}
    return stem, src, meta


def write_sidecar(path: str, meta: dict):
    with open(path, "w") as fh:
        for k, v in meta.items():
            fh.write(f"{k}={v}\n")


def read_sidecar(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            k, _, v = line.partition("=")
            v = v.strip()
            out[k.strip()] = int(v) if v.lstrip("-").isdigit() else v
    return out


def write_benchmark(out_dir: str, name: str, params: dict) -> str:
    stem, src, meta = gen_family(name, params)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, stem + ".rsl")
    with open(path, "w") as fh:
        fh.write(src)
    write_sidecar(os.path.join(out_dir, stem + ".expect"), meta)
    return path


def standard_corpus(n_random: int = 60) -> list:
    """``(family, params)`` list covering every family plus ``n_random`` random programs."""
    specs = [("counter", {"d": d}) for d in (1, 2, 3, 5, 8)]
    specs += [("deadvars", {"d": d, "n_dead": n}) for d in (2, 4) for n in (0, 3, 10)]
    specs += [("mul_guard", {"w": 8, "bug": b}) for b in (0, 1)]
    specs += [("array_chain", {"n": n}) for n in (1, 2, 4)]
    specs += [("multiloop", {"n_loops": n, "d": d}) for n in (2, 3) for d in (1, 2, 3)]
    specs += [("kind_reset", {"r": r}) for r in (1, 2, 3)]
    specs += [("random", {"seed": s}) for s in range(n_random)]
    return specs
