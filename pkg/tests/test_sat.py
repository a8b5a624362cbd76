import io
import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from ibmc.sat import DimacsError, Solver, SolverError, luby, parse_dimacs, write_dimacs
from ibmc.sat.dimacs import load_solver


def solver_with(n, clauses=(), preprocess=True):
    s = Solver(preprocess=preprocess)
    for _ in range(n):
        s.new_var()
    for c in clauses:
        s.add_clause(c)
    return s


def brute_force(n, clauses, assumptions=()):
    for bits in itertools.product((False, True), repeat=n):
        def val(lit):
            return bits[abs(lit) - 1] == (lit > 0)
        if all(val(a) for a in assumptions) and all(any(val(x) for x in c) for c in clauses):
            return True
    return False


def php(pigeons, holes):
    var = lambda p, h: p * holes + h + 1  # noqa: E731
    cls = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p, q in itertools.combinations(range(pigeons), 2):
            cls.append([-var(p, h), -var(q, h)])
    return pigeons * holes, cls


def random_cnf(rng, n, ratio):
    m = max(1, int(round(ratio * n)))
    return [[rng.choice((-1, 1)) * v for v in rng.sample(range(1, n + 1), min(3, n))] for _ in range(m)]


def test_contradicting_units():
    s = solver_with(1, [[1], [-1]])
    assert not s.solve()


def test_tautology_accepted_and_dropped():
    s = solver_with(1)
    assert s.add_clause([1, -1])
    assert s.clauses == []
    assert s.solve()


def test_empty_clause_poisons():
    s = solver_with(2)
    s.add_clause([])
    assert not s.solve()
    s.add_clause([1, 2])
    assert not s.solve([1])


def test_unit_under_assumption():
    s = solver_with(2, [[1, 2]])  # x=1, a=2
    assert s.solve([-2])
    assert s.value(1) is True


def test_core_is_subset_of_assumptions():
    s = solver_with(3, [[1, 2], [-1, 2]])
    assert not s.solve([-2, 3])
    assert set(s.core) <= {-2, 3}
    assert -2 in s.core
    assert s.solve([2])


def test_php_4_3_unsat():
    n, cls = php(4, 3)
    assert not solver_with(n, cls).solve()
    assert not brute_force(n, cls)


def test_php_3_3_sat():
    n, cls = php(3, 3)
    s = solver_with(n, cls)
    assert s.solve() and s.check_model()


def test_preprocess_subsumes_by_unit():
    s = solver_with(2, [[1], [1, 2]])
    assert len(s.clauses) == 1
    off = solver_with(2, [[1], [1, 2]], preprocess=False)
    assert len(off.clauses) == 2


def test_preprocess_toggle_after_solve_rejected():
    s = solver_with(1)
    s.set_preprocess(False)
    s.solve()
    with pytest.raises(SolverError):
        s.set_preprocess(True)


def test_unknown_variable_rejected():
    s = solver_with(1)
    with pytest.raises(SolverError):
        s.add_clause([2])
    with pytest.raises(SolverError):
        s.solve([3])


def test_luby_prefix():
    assert [luby(2, i) for i in range(15)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_compaction_noop_without_retired():
    s = solver_with(3, [[1, 2], [-1, 3]])
    s.restart_and_compact()
    assert len(s.clauses) == 2 and s.solve()


def test_compaction_drops_retired():
    s = solver_with(2)
    acts = []
    for k in range(10):
        a = s.new_var()
        s.mark_activation(a)
        s.add_clause([1, a])
        s.add_clause([-1, 2, a])
        assert s.solve([-a])
        s.add_clause([a])
        acts.append(a)
    assert s.retired_fraction() > 0.25
    s.restart_and_compact()
    assert all(not any(abs(x) in acts for x in c) for c in s.clauses + s.learnts)
    assert s.retired_fraction() == 0.0


@pytest.mark.parametrize("seed", range(20))
def test_compaction_differential(seed):
    """Forcing compaction after every step never changes verdicts."""
    rng = random.Random(seed)
    n = 8
    a, b = solver_with(n), solver_with(n)
    for _ in range(8):
        act = [s.new_var() for s in (a, b)]
        for s, v in zip((a, b), act):
            s.mark_activation(v)
        batch = random_cnf(rng, n, 1.0)
        for c in batch:
            a.add_clause(c + [act[0]])
            b.add_clause(c + [act[1]])
        assert a.solve([-act[0]]) == b.solve([-act[1]])
        a.add_clause([act[0]])
        b.add_clause([act[1]])
        b.restart_and_compact()
        perm = [rng.choice((-1, 1)) * rng.randint(1, n) for _ in range(rng.randint(1, 3))]
        for c in random_cnf(rng, n, 0.5):
            a.add_clause(c)
            b.add_clause(c)
        assert a.solve(perm) == b.solve(perm)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 12), st.floats(1.0, 6.0), st.booleans())
def test_fuzz_against_brute_force(seed, n, ratio, pre):
    rng = random.Random(seed)
    cls = random_cnf(rng, n, ratio)
    s = solver_with(n, cls, preprocess=pre)
    assumptions = [rng.choice((-1, 1)) * rng.randint(1, n) for _ in range(rng.randint(0, 3))]
    got = s.solve(assumptions)
    assert got == brute_force(n, cls, assumptions)
    if got:
        assert s.check_model()
        assert all(s.value(a) for a in assumptions)
    else:
        assert set(s.core) <= set(assumptions)
        assert not brute_force(n, cls, s.core)
    # assumptions behave exactly like extra unit clauses in a fresh solver
    units = solver_with(n, cls + [[a] for a in assumptions], preprocess=pre)
    assert units.solve() == got


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 10))
def test_incremental_matches_batch(seed, n):
    rng = random.Random(seed)
    cls = random_cnf(rng, n, 4.0)
    inc = solver_with(n)
    cut = sorted(rng.sample(range(len(cls) + 1), min(3, len(cls) + 1)))
    prev = 0
    for c in cut + [len(cls)]:
        for cl in cls[prev:c]:
            inc.add_clause(cl)
        prev = c
        inc.solve()
    assert inc.solve() == solver_with(n, cls).solve() == brute_force(n, cls)


def test_seed_determinism():
    rng = random.Random(5)
    cls = random_cnf(rng, 60, 4.26)
    runs = []
    for _ in range(2):
        s = solver_with(60, cls)
        r = s.solve()
        runs.append((r, s.conflicts, s.decisions, list(s.model) if r else None))
    assert runs[0] == runs[1]


clause_lists = st.integers(1, 15).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.lists(st.integers(1, n).flatmap(lambda v: st.sampled_from((v, -v))),
                      min_size=0, max_size=5), max_size=25)))


@settings(max_examples=200, deadline=None)
@given(clause_lists)
def test_dimacs_round_trip(data):
    n, cls = data
    buf = io.StringIO()
    write_dimacs(buf, n, cls, ["roundtrip"])
    n2, cls2, comments = parse_dimacs(buf.getvalue())
    assert (n2, cls2) == (n, cls)
    assert comments == ["roundtrip"]


@pytest.mark.parametrize("text", [
    "p cnf x 1\n1 0\n",
    "p cnf 1 1\n2 0\n",
    "p cnf 2 2\n1 0\n",
    "1 0\n",
    "p cnf 1 1\n1 a 0\n",
])
def test_dimacs_errors(text):
    with pytest.raises(DimacsError):
        parse_dimacs(text)


def test_load_solver():
    s = load_solver("c hi\np cnf 2 2\n1 2 0\n-1 0\n")
    assert s.solve() and s.value(2)
