import random

import pytest
from hypothesis import given, settings, strategies as st

from ibmc.frontend import load_program
from ibmc.harness.gen import _RandomProgram
from ibmc.interp import Interpreter, nondet_name
from ibmc.oracle import _domain, _sites
from ibmc.symex import SsaName, SymexError, UnwindingSession
from ibmc.symex.terms import evaluate


def session(src, constprop=True):
    return UnwindingSession(load_program(src), constprop=constprop)


def test_literal_initializer_is_constant():
    s = session("state u8 c := 0; loop main { }")
    eqs = s.frames[0].equations
    assert len(eqs) == 1
    assert eqs[0].lhs == SsaName("c", 0, 0)
    assert eqs[0].rhs.is_const and eqs[0].rhs.val == 0
    assert s.env["c"].is_const


def test_nondet_initializer_is_unconstrained():
    s = session("state u8 c := (nondet() as u8); loop main { }")
    assert not s.env["c"].is_const
    assert s.frames[0].inputs


def test_unknown_loop_id():
    with pytest.raises(SymexError, match="unknown loop id"):
        UnwindingSession(load_program("loop main { }"), "main.7")


def test_counter_first_step_folds():
    s = session("state u8 c := 0; loop main { c := c + 1; assert(c != 3); }")
    f = s.unwind_step()
    defs = [e for e in f.equations if e.kind == "def"]
    assert defs[0].rhs.is_const and defs[0].rhs.val == 1
    atom = f.property_atoms[0]
    assert atom.term.is_const and atom.term.val is False


def test_pruned_branch_emits_nothing():
    s = session("state u8 x := 0; loop main { if (false) { x := 1; } }")
    assert s.unwind_step().equations == []


def test_phi_merge():
    s = session("state u8 x := 0; state u8 y := 0;"
                "loop main { x := (nondet() as u8); if (x > 0) { y := 1; } else { y := 2; } assert(y <= 2); }")
    f = s.unwind_step()
    merge = [e for e in f.equations if e.lhs.base == "y"][-1]
    assert merge.rhs.op == "ite"
    assert merge.guard is s.tf.true
    assert str(s.env["y"]) == str(merge.lhs)
    assert len(f.property_atoms) == 1


def test_havoc_modified_only():
    s = session("state u8 c := 0; state u8 k := 7; loop main { c := c + k; assert(c != 1); }")
    s.havoc_state()
    assert not s.env["c"].is_const
    assert s.env["k"].is_const and s.env["k"].val == 7


def test_havoc_after_unwind_rejected():
    s = session("state u8 c := 0; loop main { c := c + 1; }")
    s.unwind_step()
    with pytest.raises(SymexError):
        s.havoc_state()


def test_havoc_shares_equation_shape():
    src = "input u8 t; state u8 c := 0; loop main { c := c + t; assert(c != 200); }"
    base = session(src, constprop=False)
    step = session(src, constprop=False)
    step.havoc_state()
    for _ in range(3):
        fb, fs = base.unwind_step(), step.unwind_step()
        assert [(e.kind, e.lhs, e.rhs.op) for e in fb.equations] == \
               [(e.kind, e.lhs, e.rhs.op) for e in fs.equations]


def test_property_disjunction_counts():
    s = session("input bool t; state bool b := false; loop main { b := t; assert(!b); }")
    s.unwind_step()
    s.unwind_step()
    assert len(s.property_disjunction(2)) == 2  # the init frame has no assert
    assert len(s.property_disjunction(1)) == 1
    assert s.property_disjunction(0) == []
    with pytest.raises(SymexError):
        s.property_disjunction(3)


def test_pruned_assert_absent():
    s = session("input bool t; state u8 x := 0; loop main { if (x == 1) { assert(t); } }")
    s.unwind_step()
    assert s.property_disjunction(1) == []


def _program(seed):
    return load_program(_RandomProgram(random.Random(seed)).program())


def _symbolic_violation(tp, k, inputs, constprop=True):
    """Step of the first property atom made true by ``inputs`` (substitution only)."""
    s = UnwindingSession(tp, constprop=constprop)
    for _ in range(k):
        s.unwind_step()

    def value_of(name):
        if name in env:
            return env[name]
        raise KeyError(name)

    env = {}
    for j, frame in enumerate(s.frames):
        row = inputs[max(j - 1, 0)]
        for base, term in frame.inputs.items():
            env[term.val] = row.get(base, False if term.ty.is_bool else 0)
        memo = {}
        for eq in frame.equations:
            env[eq.lhs] = evaluate(eq.rhs, value_of, memo)
        for a in frame.property_atoms:
            if env[a.name]:
                return j
    return None


def _concrete_violation(tp, k, inputs):
    it = Interpreter(tp)
    state, viol = it.initial(inputs[0])
    if viol:
        return 0
    if state is None:
        return None
    for j in range(1, k + 1):
        state, viol = it.step(state, tp.unbounded_ids[0], inputs[j - 1])
        if viol:
            return j
        if state is None:
            return None
    return None


def _random_inputs(tp, k, rng):
    names = {d.name: d.type for d in tp.inputs}
    sites = []
    _sites(tp.init, sites)
    _sites(tp.loop_def(tp.unbounded_ids[0]).body, sites)
    for n in sites:
        names[nondet_name(n.site)] = n.ty
    rows = []
    for _ in range(max(k, 1)):
        rows.append({n: rng.choice(list(_domain(t))) for n, t in names.items()})
    return rows


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 5000), st.integers(0, 5), st.integers(0, 2**31))
def test_differential_soundness(seed, k, iseed):
    tp = _program(seed)
    inputs = _random_inputs(tp, k, random.Random(iseed))
    assert _symbolic_violation(tp, k, inputs) == _concrete_violation(tp, k, inputs)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5000), st.integers(0, 2**31))
def test_constprop_is_conservative(seed, iseed):
    tp = _program(seed)
    inputs = _random_inputs(tp, 4, random.Random(iseed))
    assert _symbolic_violation(tp, 4, inputs, True) == _symbolic_violation(tp, 4, inputs, False)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5000))
def test_ssa_define_before_use_and_monotone_ids(seed):
    tp = _program(seed)
    s = UnwindingSession(tp)
    seen_ids = []
    for _ in range(4):
        s.unwind_step()
        ids = [e.id for e in s.equations]
        assert ids == sorted(ids) and len(set(ids)) == len(ids)
        assert set(seen_ids) < set(ids) or not s.frames[-1].equations
        seen_ids = ids
    defined = set()
    inputs = {t.val for f in s.frames for t in f.inputs.values()}
    for eq in s.equations:
        assert eq.lhs not in eq.reads
        assert eq.reads <= defined | inputs
        defined.add(eq.lhs)


def test_show_ssa_format():
    s = session("input u8 t; state u8 c := 0; loop main { c := c + t; }")
    s.unwind_step()
    lines = s.show_ssa().splitlines()
    assert lines[0].startswith("0: [true] c@0.0 = 0")
    assert lines[1].startswith("1: [true] c@1.0 = ")
