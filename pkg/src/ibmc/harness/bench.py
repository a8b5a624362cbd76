"""Benchmark runner: every benchmark x mode in its own process, CSV out, speedup report."""

from __future__ import annotations

import csv
import glob
import json
import math
import os
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .gen import read_sidecar

CSV_COLUMNS = ("benchmark", "mode", "verdict", "depth", "wall_ms", "solve_ms",
               "clauses", "vars", "solves", "peak_mem_kb")

_VERDICT_OF = {"sat": "counterexample", "safe": "safe", "proved": "proved"}


class BenchError(Exception):
    pass


@dataclass
class RunRecord:
    benchmark: str
    mode: str
    verdict: str
    depth: int = 0
    wall_ms: float = 0.0
    solve_ms: float = 0.0
    clauses: int = 0
    vars: int = 0
    solves: int = 0
    peak_mem_kb: int = 0
    loop: Optional[str] = None
    error: str = ""

    @property
    def solved(self) -> bool:
        return self.verdict in ("counterexample", "safe", "proved")

    def row(self) -> list:
        return [self.benchmark, self.mode, self.verdict, self.depth, round(self.wall_ms, 3),
                round(self.solve_ms, 3), self.clauses, self.vars, self.solves, self.peak_mem_kb]


def mode_flags(mode: str) -> list:
    """Translate ``i+s+p+r`` style tokens into ``check`` flags."""
    tokens = mode.split("+")
    if not tokens or tokens[0] not in ("i", "ni"):
        raise BenchError(f"mode '{mode}' must start with i or ni")
    flags = ["--incremental"] if tokens[0] == "i" else []
    seen = set()
    for t in tokens[1:]:
        if t in seen:
            raise BenchError(f"mode '{mode}' repeats '{t}'")
        seen.add(t)
        if t == "s":
            flags.append("--slice-formula")
        elif t == "r":
            flags.append("--refine")
        elif t == "u":
            flags.append("--refine-under")
        elif t == "k":
            flags.append("--k-induction")
        elif t != "p":
            raise BenchError(f"unknown mode token '{t}' in '{mode}'")
    if "p" not in seen:
        flags.append("--no-sat-preprocessor")
    return flags


def _benchmarks(directory: str) -> list:
    out = []
    for path in sorted(glob.glob(os.path.join(directory, "*.rsl"))):
        side = path[:-4] + ".expect"
        out.append((path, read_sidecar(side) if os.path.exists(side) else {}))
    return out


def run_one(path: str, meta: dict, mode: str, timeout: float) -> RunRecord:
    name = os.path.splitext(os.path.basename(path))[0]
    cmd = [sys.executable, "-m", "ibmc", "check", path, "--stats-json", "-",
           "--timeout", str(timeout)] + mode_flags(mode)
    if "unwind_max" in meta:
        cmd += ["--unwind-max", str(meta["unwind_max"])]
    if meta.get("k_induction") and "--k-induction" not in cmd:
        cmd.append("--k-induction")
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout + 30)
    except subprocess.TimeoutExpired:
        return RunRecord(name, mode, "timeout", wall_ms=timeout * 1000.0)
    lines = proc.stdout.strip().splitlines()
    try:
        data = json.loads(lines[-1])
    except (IndexError, ValueError):
        return RunRecord(name, mode, "error", error=proc.stderr.strip()[-200:])
    verdict = data["verdict"]
    if verdict == "resource":
        verdict = "timeout"
    return RunRecord(name, mode, verdict, data.get("depth") or 0, data["wall_ms"],
                     data["solve_ms"], data["clauses"], data["vars"], data["solves"],
                     data.get("peak_mem_kb", 0), data.get("loop"))


def check_expectation(rec: RunRecord, meta: dict) -> Optional[str]:
    """A description of how ``rec`` disagrees with the sidecar, or None."""
    if not rec.solved or "verdict" not in meta:
        return None
    want = _VERDICT_OF.get(meta["verdict"], meta["verdict"])
    if rec.verdict != want:
        return f"{rec.benchmark} [{rec.mode}]: verdict {rec.verdict}, expected {want}"
    if "depth" in meta and rec.depth != meta["depth"]:
        return f"{rec.benchmark} [{rec.mode}]: depth {rec.depth}, expected {meta['depth']}"
    if want == "counterexample" and "loop" in meta and rec.loop != meta["loop"]:
        return f"{rec.benchmark} [{rec.mode}]: loop {rec.loop}, expected {meta['loop']}"
    return None


def geomean(xs: list) -> float:
    return math.exp(sum(math.log(x) for x in xs) / len(xs)) if xs else float("nan")


@dataclass
class Comparison:
    base: str
    other: str
    speedups: dict = field(default_factory=dict)  # benchmark -> base/other wall time
    excluded: list = field(default_factory=list)  # benchmarks unsolved in one of the modes

    @property
    def geometric(self) -> float:
        return geomean(list(self.speedups.values()))

    @property
    def arithmetic(self) -> float:
        v = list(self.speedups.values())
        return sum(v) / len(v) if v else float("nan")


@dataclass
class BenchReport:
    records: list
    comparisons: list
    mismatches: list

    def format(self) -> str:
        by = {(r.benchmark, r.mode): r for r in self.records}
        lines = []
        for c in self.comparisons:
            lines.append(f"{c.base} vs {c.other}")
            lines.append(f"  {'benchmark':<32} {c.base + ' ms':>12} {c.other + ' ms':>12} {'speedup':>8}")
            for name, sp in sorted(c.speedups.items()):
                lines.append(f"  {name:<32} {by[name, c.base].wall_ms:>12.1f} "
                             f"{by[name, c.other].wall_ms:>12.1f} {sp:>8.2f}")
            lines.append(f"  geometric mean {c.geometric:.2f}, arithmetic mean {c.arithmetic:.2f} "
                         f"over {len(c.speedups)} commonly solved")
            if c.excluded:
                lines.append("  unsolved in one mode: " + ", ".join(sorted(c.excluded)))
        if self.mismatches:
            lines.append("expectation mismatches:")
            lines += ["  " + m for m in self.mismatches]
        return "\n".join(lines)


def compare(records: list, base: str, other: str) -> Comparison:
    by = {(r.benchmark, r.mode): r for r in records}
    names = sorted({r.benchmark for r in records})
    c = Comparison(base, other)
    for n in names:
        a, b = by.get((n, base)), by.get((n, other))
        if a is None or b is None:
            continue
        if a.solved and b.solved:
            c.speedups[n] = max(a.wall_ms, 1e-3) / max(b.wall_ms, 1e-3)
        else:
            c.excluded.append(n)
    return c


def _pairs(modes: list) -> list:
    """Pair each ``ni`` mode with its ``i`` twin; otherwise compare against the first mode."""
    pairs = []
    for m in modes:
        if m.startswith("ni"):
            twin = "i" + m[2:]
            if twin in modes:
                pairs.append((m, twin))
    if not pairs:
        pairs = [(modes[0], m) for m in modes[1:]]
    return pairs


def bench_compare(directory: str, modes: list, out: str, jobs: int = 1,
                  timeout: float = 300.0) -> BenchReport:
    if not modes:
        raise BenchError("no modes given")
    for m in modes:
        mode_flags(m)
    benches = _benchmarks(directory)
    if not benches:
        raise BenchError(f"no .rsl files in {directory}")
    tasks = [(p, meta, m) for p, meta in benches for m in modes]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        records = list(pool.map(lambda t: run_one(t[0], t[1], t[2], timeout), tasks))
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(r.row())
    mismatches = []
    for (path, meta, _), rec in zip(tasks, records):
        msg = check_expectation(rec, meta)
        if msg:
            mismatches.append(msg)
        elif rec.verdict == "error":
            mismatches.append(f"{rec.benchmark} [{rec.mode}]: run failed: {rec.error}")
    comparisons = [compare(records, a, b) for a, b in _pairs(modes)]
    return BenchReport(records, comparisons, mismatches)
