"""DIMACS CNF reading and writing."""

from __future__ import annotations

from typing import Iterable, TextIO


class DimacsError(Exception):
    pass


def parse_dimacs(text: str):
    """Returns ``(nvars, clauses, comments)``."""
    nvars = None
    nclauses = None
    clauses: list = []
    comments: list = []
    cur: list = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[1:].strip())
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf" or not all(x.isdigit() for x in parts[2:]):
                raise DimacsError(f"line {lineno}: malformed header '{line}'")
            nvars, nclauses = int(parts[2]), int(parts[3])
            continue
        if line.startswith("%"):
            break
        if nvars is None:
            raise DimacsError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal '{tok}'") from None
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                if abs(lit) > nvars:
                    raise DimacsError(f"line {lineno}: literal {lit} exceeds {nvars} variables")
                cur.append(lit)
    if cur:
        clauses.append(cur)
    if nvars is None:
        raise DimacsError("missing 'p cnf' header")
    if nclauses is not None and nclauses != len(clauses):
        raise DimacsError(f"header declares {nclauses} clauses, found {len(clauses)}")
    return nvars, clauses, comments


def write_dimacs(out: TextIO, nvars: int, clauses: Iterable, comments: Iterable[str] = ()):
    clauses = list(clauses)
    for c in comments:
        out.write(f"c {c}\n")
    out.write(f"p cnf {nvars} {len(clauses)}\n")
    for cl in clauses:
        out.write(" ".join(map(str, cl)) + " 0\n")


def load_solver(text: str, preprocess: bool = True):
    from .solver import Solver

    nvars, clauses, _ = parse_dimacs(text)
    s = Solver(preprocess=preprocess)
    for _ in range(nvars):
        s.new_var()
    for c in clauses:
        s.add_clause(c)
    return s
