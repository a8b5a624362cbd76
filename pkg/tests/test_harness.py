import csv
import json
import os

import pytest

from ibmc.frontend import load_program
from ibmc.harness.bench import (
    CSV_COLUMNS, BenchError, RunRecord, bench_compare, check_expectation, compare, geomean,
    mode_flags, run_one,
)
from ibmc.harness.cli import main
from ibmc.harness.gen import (
    GenError, gen_family, parse_params, read_sidecar, standard_corpus, write_benchmark,
)
from ibmc.oracle import ExplicitStateChecker

COUNTER3 = "state u8 c := 0; loop main { c := c + 1; assert(c != 3); }\n"


@pytest.fixture
def rsl(tmp_path):
    def make(text, name="p.rsl"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return make


def test_check_counter_exit_10(rsl, capsys):
    assert main(["check", rsl(COUNTER3), "--incremental", "--unwind-max", "10"]) == 10
    out = capsys.readouterr().out
    assert "step 3:" in out and "c=3" in out


def test_check_safe_nonincremental(rsl):
    path = rsl("state u8 c := 0; loop main { c := c + 1; assert(true); }")
    assert main(["check", path, "--unwind-max", "5"]) == 0


def test_show_loops(rsl, capsys):
    path = rsl("state u8 a := 0; loop l0 { a := a + 1; } loop l1 { a := a - 1; }")
    assert main(["check", path, "--show-loops"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert [l.split()[0] for l in out] == ["main.0", "main.1"]


def test_show_ssa(rsl, capsys):
    assert main(["check", rsl(COUNTER3), "--incremental", "--unwind-max", "5", "--show-ssa"]) == 10
    assert "c@3." in capsys.readouterr().out


def test_k_induction_flag(rsl):
    path = rsl("state u8 x := 0; loop main { x := x + 1; if (x == 4) { x := 0; } assert(x != 5); }")
    assert main(["check", path, "--k-induction", "--unwind-max", "10"]) == 0
    assert main(["check", path, "--stop-when-unsat", "--unwind-max", "10"]) == 0


@pytest.mark.parametrize("argv", [
    ["check", "{p}", "--k-induction", "--stop-when-unsat"],
    ["check", "{p}", "--bogus"],
    ["check", "/nonexistent/file.rsl"],
    ["check", "{p}", "--unwind-max", "-1"],
    ["check", "{p}", "--incremental-check", "main.9"],
    ["bench", "/nonexistent", "--modes", "i", "--out", "x.csv"],
    ["gen", "nosuch"],
    ["gen", "counter", "--params", "d=0"],
    [],
])
def test_usage_errors(argv, rsl):
    p = rsl(COUNTER3)
    assert main([a.replace("{p}", p) for a in argv]) == 1


def test_parse_error_exit_1(rsl, capsys):
    assert main(["check", rsl("state u8 c := ; loop main { }")]) == 1
    assert capsys.readouterr().err


def test_trace_json(rsl, tmp_path):
    out = tmp_path / "t.json"
    path = rsl("input u8 t; state u8 n := 0; loop main { if (n == 1) { assert(t != 5); } n := n + 1; }")
    assert main(["check", path, "--incremental", "--unwind-max", "4", "--trace-json", str(out)]) == 10
    rows = json.loads(out.read_text())
    assert rows[-1] == {"violated": {"assert_id": rows[-1]["violated"]["assert_id"], "step": 2}}
    assert rows[1]["inputs"]["t"] == 5
    assert [r["step"] for r in rows[:-1]] == [0, 1, 2]


def test_stats_json(rsl, tmp_path):
    out = tmp_path / "s.json"
    assert main(["check", rsl(COUNTER3), "--incremental", "--stats-json", str(out)]) == 10
    data = json.loads(out.read_text())
    assert data["verdict"] == "counterexample" and data["depth"] == 3
    assert data["solves"] == 4 and data["solve_ms"] <= data["wall_ms"]


def test_timeout_exit_2(rsl):
    path = rsl("input u32 a; input u32 b; loop main { assert(a * b != 4294836225); }")
    assert main(["check", path, "--incremental", "--timeout", "0.001"]) == 2


def test_sat_subcommand(tmp_path, capsys):
    sat = tmp_path / "s.cnf"
    sat.write_text("p cnf 2 2\n1 2 0\n-1 0\n")
    assert main(["sat", str(sat)]) == 10
    out = capsys.readouterr().out.splitlines()
    assert out == ["s SATISFIABLE", "v -1 2 0"]
    unsat = tmp_path / "u.cnf"
    unsat.write_text("p cnf 1 2\n1 0\n-1 0\n")
    assert main(["sat", str(unsat), "--no-sat-preprocessor"]) == 20
    bad = tmp_path / "b.cnf"
    bad.write_text("p cnf 1 1\n3 0\n")
    assert main(["sat", str(bad)]) == 1


def test_dump_dimacs_cli(rsl, tmp_path):
    pattern = str(tmp_path / "d{k}.cnf")
    assert main(["check", rsl(COUNTER3), "--incremental", "--dump-dimacs", pattern]) == 10
    assert (tmp_path / "d3.cnf").exists()
    assert main(["sat", str(tmp_path / "d3.cnf")]) in (10, 20)


# -- generator --

def test_gen_counter_is_counter_to_three():
    stem, src, meta = gen_family("counter", {"d": 3})
    assert stem == "counter_d3"
    assert src == COUNTER3
    assert (meta["verdict"], meta["depth"]) == ("sat", 3)


def test_gen_deadvars():
    _, src, meta = gen_family("deadvars", {"d": 10, "n_dead": 50})
    assert (meta["verdict"], meta["depth"]) == ("safe", 10)
    assert len(load_program(src).states) == 51


def test_gen_multiloop_oracle_checked():
    _, src, meta = gen_family("multiloop", {"n_loops": 2, "d": 2})
    tp = load_program(src)
    res = ExplicitStateChecker(tp).bounded(meta["unwind_max"])
    assert (res.verdict, res.depth, res.loop_id) == ("sat", 2, "main.1") == \
        (meta["verdict"], meta["depth"], meta["loop"])


# families with two wide inputs exceed the oracle's input enumeration limit
ORACLE_CORPUS = [(f, p) for f, p in standard_corpus(n_random=3)
                 if p.get("n_dead", 0) == 0 and not p.get("bug") and f != "array_chain"]


@pytest.mark.parametrize("family,params", ORACLE_CORPUS)
def test_gen_sidecars_match_oracle(family, params, tmp_path):
    path = write_benchmark(str(tmp_path), family, params)
    meta = read_sidecar(path[:-4] + ".expect")
    tp = load_program(open(path).read())
    if meta["verdict"] == "proved":
        res = ExplicitStateChecker(tp).unbounded()
        assert res.verdict == "proved"
        return
    res = ExplicitStateChecker(tp).bounded(meta["unwind_max"])
    assert (res.verdict, res.depth) == (meta["verdict"], meta["depth"])


def test_gen_mul_guard_bug_is_reachable():
    for w in (8, 16, 32):
        _, src, meta = gen_family("mul_guard", {"w": w, "bug": 1})
        target = int(src.split("!= ")[1].split(")")[0])
        assert target < 1 << w and any(target % a == 0 and target // a < 1 << w for a in range(2, 1 << 16))
        assert (meta["verdict"], meta["depth"]) == ("sat", 1)


@pytest.mark.parametrize("n", [1, 4, 64])
def test_gen_array_chain_safe_on_random_runs(n):
    import random
    from ibmc.interp import Interpreter
    _, src, meta = gen_family("array_chain", {"n": n})
    tp = load_program(src)
    it = Interpreter(tp)
    rng = random.Random(n)
    for _ in range(50):
        state, viol = it.initial({})
        for _ in range(meta["unwind_max"]):
            state, viol = it.step(state, "main.0", {"i": rng.randrange(256), "v": rng.randrange(256)})
            assert not viol


def test_gen_deterministic(tmp_path):
    a = write_benchmark(str(tmp_path / "a"), "random", {"seed": 4})
    b = write_benchmark(str(tmp_path / "b"), "random", {"seed": 4})
    assert open(a).read() == open(b).read()


@pytest.mark.parametrize("family,params", [
    ("counter", {"d": 0}), ("counter", {"x": 1}), ("mul_guard", {"w": 12}),
    ("multiloop", {"n_loops": 0, "d": 1}), ("nosuch", {}),
])
def test_gen_invalid(family, params):
    with pytest.raises(GenError):
        gen_family(family, params)


def test_parse_params():
    assert parse_params("d=3,n_dead=5") == {"d": 3, "n_dead": 5}
    with pytest.raises(GenError):
        parse_params("d")
    with pytest.raises(GenError):
        parse_params("d=x")


def test_gen_cli(tmp_path, capsys):
    assert main(["gen", "counter", "--params", "d=4", "--out", str(tmp_path)]) == 0
    assert read_sidecar(str(tmp_path / "counter_d4.expect"))["depth"] == 4


# -- bench --

def test_mode_flags():
    assert mode_flags("i+s+p") == ["--incremental", "--slice-formula"]
    assert mode_flags("ni+s") == ["--slice-formula", "--no-sat-preprocessor"]
    assert mode_flags("i+r+k+p") == ["--incremental", "--refine", "--k-induction"]
    for bad in ("x", "i+q", "i+s+s", ""):
        with pytest.raises(BenchError):
            mode_flags(bad)


def test_geomean_and_compare():
    assert geomean([2.0, 8.0]) == pytest.approx(4.0)
    recs = [RunRecord("a", "ni", "safe", wall_ms=40), RunRecord("a", "i", "safe", wall_ms=10),
            RunRecord("b", "ni", "timeout", wall_ms=999), RunRecord("b", "i", "safe", wall_ms=5)]
    c = compare(recs, "ni", "i")
    assert c.speedups == {"a": 4.0} and c.excluded == ["b"]


def test_expectation_checks():
    rec = RunRecord("x", "i", "counterexample", depth=3, loop="main.0")
    assert check_expectation(rec, {"verdict": "sat", "depth": 3, "loop": "main.0"}) is None
    assert "depth" in check_expectation(rec, {"verdict": "sat", "depth": 4})
    assert "verdict" in check_expectation(rec, {"verdict": "safe", "depth": 3})
    assert check_expectation(RunRecord("x", "i", "timeout"), {"verdict": "safe"}) is None


def test_bench_end_to_end(tmp_path, capsys):
    d = tmp_path / "b"
    write_benchmark(str(d), "counter", {"d": 3})
    write_benchmark(str(d), "multiloop", {"n_loops": 2, "d": 1})
    out = tmp_path / "r.csv"
    report = bench_compare(str(d), ["ni+s+p", "i+s+p"], str(out), jobs=2, timeout=60)
    assert report.mismatches == []
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 5
    for r in report.records:
        assert r.solve_ms <= r.wall_ms
    assert len(report.comparisons) == 1 and len(report.comparisons[0].speedups) == 2
    assert "geometric mean" in report.format()


def test_bench_identical_modes_near_one(tmp_path):
    d = tmp_path / "b"
    write_benchmark(str(d), "deadvars", {"d": 6, "n_dead": 6})
    report = bench_compare(str(d), ["i+s+p", "i+s+p"], str(tmp_path / "r.csv"), timeout=60)
    assert 0.5 < report.comparisons[0].geometric < 2.0


def test_bench_timeout_isolated(tmp_path):
    d = tmp_path / "b"
    os.makedirs(d)
    (d / "hard.rsl").write_text("input u32 a; input u32 b; loop main { assert(a * b != 4294836225); }\n")
    write_benchmark(str(d), "counter", {"d": 2})
    rec = run_one(str(d / "hard.rsl"), {}, "i", 0.01)
    assert rec.verdict == "timeout"
    report = bench_compare(str(d), ["ni", "i"], str(tmp_path / "r.csv"), timeout=0.5)
    c = report.comparisons[0]
    assert "counter_d2" in c.speedups
    assert "hard" in c.excluded or "hard" in c.speedups


def test_bench_cli_reports_mismatch(tmp_path, capsys):
    d = tmp_path / "b"
    path = write_benchmark(str(d), "counter", {"d": 3})
    with open(path[:-4] + ".expect", "a") as fh:
        fh.write("depth=4\n")
    assert main(["bench", str(d), "--modes", "i", "--out", str(tmp_path / "r.csv")]) == 1
    assert "expected 4" in capsys.readouterr().out


def test_bench_k_induction_sidecar(tmp_path):
    d = tmp_path / "b"
    write_benchmark(str(d), "kind_reset", {"r": 2})
    report = bench_compare(str(d), ["i+s+p"], str(tmp_path / "r.csv"), timeout=60)
    assert report.records[0].verdict == "proved" and report.mismatches == []


def test_counterexample_cli_trace_replays(rsl, tmp_path):
    out = tmp_path / "t.json"
    path = rsl(COUNTER3)
    main(["check", path, "--unwind-max", "5", "--trace-json", str(out)])
    rows = json.loads(out.read_text())
    assert [r["state"]["c"] for r in rows[:-1]] == [0, 1, 2, 3]
