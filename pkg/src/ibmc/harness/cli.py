"""Command line front end: ``check``, ``sat``, ``bench`` and ``gen``."""

from __future__ import annotations

import argparse
import json
import os
import resource
import sys
import time
from typing import Optional

from ..engine import EngineError, EngineOptions, Stats, run
from ..frontend import FrontendError, load_program, parse, typecheck
from ..sat import DimacsError, load_solver
from ..symex import SymexError, UnwindingSession

EXIT_USAGE = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ibmc", description="Incremental bounded model checker and k-induction prover.")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("check", help="verify a program")
    c.add_argument("file")
    c.add_argument("--incremental", action="store_true", help="keep one solver across depths")
    c.add_argument("--incremental-check", metavar="LOOP_ID",
                   help="incremental unwinding of loops up to LOOP_ID")
    c.add_argument("--unwind-max", type=int, metavar="K")
    c.add_argument("--slice-formula", action="store_true")
    c.add_argument("--refine", action="store_true", help="bit-width and array refinement")
    c.add_argument("--refine-under", action="store_true",
                   help="start refinement from under-approximations")
    c.add_argument("--no-sat-preprocessor", action="store_true")
    c.add_argument("--no-constprop", action="store_true")
    c.add_argument("--no-unwinding-assertions", action="store_true")
    c.add_argument("--stop-when-unsat", action="store_true", help="run the induction step case alone")
    c.add_argument("--k-induction", action="store_true")
    c.add_argument("--show-loops", action="store_true")
    c.add_argument("--show-ssa", action="store_true")
    c.add_argument("--dump-dimacs", metavar="PATH")
    c.add_argument("--trace-json", metavar="PATH")
    c.add_argument("--stats-json", metavar="PATH", help="write run statistics ('-' for stdout)")
    c.add_argument("--seed", type=int)
    c.add_argument("--timeout", type=float, metavar="SECONDS")

    s = sub.add_parser("sat", help="solve a DIMACS CNF file")
    s.add_argument("file")
    s.add_argument("--no-sat-preprocessor", action="store_true")

    b = sub.add_parser("bench", help="run a benchmark directory in several modes")
    b.add_argument("dir")
    b.add_argument("--modes", default="ni+s+p,i+s+p")
    b.add_argument("--out", default="bench.csv")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--timeout", type=float, default=300.0)

    g = sub.add_parser("gen", help="generate a synthetic benchmark")
    g.add_argument("family")
    g.add_argument("--params", default="")
    g.add_argument("--out", default=".", help="output directory")
    return p


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _show_loops(text: str, origin: str):
    tp = typecheck(parse(text, origin))
    for info in tp.loop_table:
        extra = f" bound={info.bound}" if info.kind == "bounded" else f" name={info.name}"
        parent = f" in {info.parent}" if info.parent else ""
        print(f"{info.id} {info.kind}{extra}{parent}")


def _show_ssa(tp, depth: int, loops: list, per_loop: Optional[int], constprop: bool):
    sess = UnwindingSession(tp, loops[0] if loops else None, constprop)
    cur = loops[0] if loops else None
    for j in range(depth):
        lid = loops[j // per_loop] if per_loop else cur
        if lid != cur:
            sess.switch_loop(lid)
            cur = lid
        sess.unwind_step()
    print(sess.show_ssa())


def _write_stats(path: str, verdict, stats: Stats, wall_ms: float):
    data = {"verdict": verdict.kind, "depth": getattr(verdict, "depth", 0),
            "loop": getattr(verdict, "loop_id", None), "wall_ms": round(wall_ms, 3),
            "peak_mem_kb": resource.getrusage(resource.RUSAGE_SELF).ru_maxrss,
            **stats.as_dict()}
    text = json.dumps(data)
    if path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def cmd_check(a) -> int:
    if a.k_induction and a.stop_when_unsat:
        raise UsageError("--stop-when-unsat is implied by --k-induction; give only one")
    if (a.k_induction or a.stop_when_unsat) and a.incremental_check:
        raise UsageError("--incremental-check applies to BMC only")
    if a.unwind_max is not None and a.unwind_max < 0:
        raise UsageError("--unwind-max must be non-negative")
    text = _read(a.file)
    if a.show_loops:
        _show_loops(text, a.file)
        return 0
    t0 = time.perf_counter()
    tp = load_program(text, a.file, not a.no_unwinding_assertions)
    opts = EngineOptions(
        incremental=a.incremental or a.incremental_check is not None,
        slice=a.slice_formula, refine=a.refine or a.refine_under, under=a.refine_under,
        preprocess=not a.no_sat_preprocessor, constprop=not a.no_constprop,
        unwinding_assertions=not a.no_unwinding_assertions, seed=a.seed,
        timeout=a.timeout, dump_dimacs=a.dump_dimacs,
    )
    stats = Stats()
    verdict = run(tp, a.unwind_max, opts, stats, upto=a.incremental_check,
                  k_induction=a.k_induction, stop_when_unsat=a.stop_when_unsat)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    if a.show_ssa:
        loops = tp.unbounded_ids
        if a.incremental_check:
            loops = loops[: loops.index(a.incremental_check) + 1]
        depth = getattr(verdict, "depth", 0) or 0
        if verdict.kind == "counterexample" and verdict.trace is not None:
            depth = verdict.trace.violated_step
        elif len(loops) > 1 and a.unwind_max is not None:
            depth = a.unwind_max * len(loops)
        _show_ssa(tp, depth, loops, a.unwind_max if len(loops) > 1 else None, opts.constprop)
    print(verdict)
    trace = getattr(verdict, "trace", None)
    if trace is not None:
        print(trace.format(tp))
        if a.trace_json:
            with open(a.trace_json, "w") as fh:
                fh.write(trace.to_json(tp) + "\n")
    if a.stats_json:
        _write_stats(a.stats_json, verdict, stats, wall_ms)
    return verdict.exit_code


def cmd_sat(a) -> int:
    solver = load_solver(_read(a.file), preprocess=not a.no_sat_preprocessor)
    if solver.solve():
        print("s SATISFIABLE")
        lits = [v if solver.model[v] else -v for v in range(1, solver.nvars + 1)]
        print("v " + " ".join(map(str, lits + [0])))
        return 10
    print("s UNSATISFIABLE")
    return 20


def cmd_bench(a) -> int:
    from .bench import bench_compare

    if not os.path.isdir(a.dir):
        raise UsageError(f"{a.dir} is not a directory")
    report = bench_compare(a.dir, [m for m in a.modes.split(",") if m], a.out,
                           jobs=a.jobs, timeout=a.timeout)
    print(report.format())
    return 1 if report.mismatches else 0


def cmd_gen(a) -> int:
    from .gen import write_benchmark, parse_params

    path = write_benchmark(a.out, a.family, parse_params(a.params))
    print(path)
    return 0


def main(argv: Optional[list] = None) -> int:
    from .gen import GenError

    try:
        a = build_parser().parse_args(argv)
        return {"check": cmd_check, "sat": cmd_sat, "bench": cmd_bench, "gen": cmd_gen}[a.cmd](a)
    except UsageError as e:
        print(f"ibmc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FrontendError as e:
        print(f"ibmc: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DimacsError, EngineError, GenError, SymexError) as e:
        print(f"ibmc: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
