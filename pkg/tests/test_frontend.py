import random

import pytest
from hypothesis import given, settings, strategies as st

from ibmc.frontend import (
    ParseError, TypeCheckError, dump, expand_bounded_loops, load_program, parse,
    program_str, typecheck,
)
from ibmc.frontend.ast import Assign, For, If
from ibmc.harness.gen import _RandomProgram
from ibmc.interp import Interpreter

COUNTER = "state u8 c := 0; loop main { c := c + 1; assert(c != 3); }"


def test_parse_minimal_program():
    prog = parse(COUNTER)
    assert len(prog.decls) == 1
    assert len(prog.loops) == 1
    assert prog.loops[0].name == "main"


def test_empty_loop_body_is_legal():
    prog = parse("loop main { }")
    assert prog.decls == [] and prog.loops[0].body == []


def test_unterminated_loop_reports_eof():
    with pytest.raises(ParseError) as ei:
        parse("loop main {")
    assert ei.value.pos.line == 1
    assert "end of input" in str(ei.value) or "EOF" in str(ei.value)


def test_parse_error_carries_position_and_expected():
    with pytest.raises(ParseError) as ei:
        parse("state u8 c := 0;\nloop main { c := ; }")
    assert ei.value.pos.line == 2
    assert ei.value.expected


def test_type_mismatch():
    with pytest.raises(TypeCheckError, match="type mismatch"):
        typecheck(parse("state u8 x := 0; state bool b := x; loop main { }"))


def test_signed_input_arithmetic_is_well_typed():
    typecheck(parse("input i16 t; state i16 s := 0; loop main { s := s + t; }"))


def test_assignment_to_input_rejected():
    with pytest.raises(TypeCheckError, match="inputs are read-only per step"):
        typecheck(parse("input u8 t; loop main { t := 1; }"))


@pytest.mark.parametrize("src, msg", [
    ("state u8 x := 0; state u8 x := 1; loop main { }", "duplicate"),
    ("loop main { y := 1; }", "undeclared"),
    ("state u8 x; loop main { }", "no initializer"),
    ("state u8 x := 0; loop main { assert(x); }", "type mismatch"),
    ("state u8 x := 0; state u16 y := 0; loop main { x := x + y; }", "type mismatch"),
])
def test_typecheck_errors(src, msg):
    with pytest.raises(TypeCheckError, match=msg):
        typecheck(parse(src))


def test_index_loops_single():
    tp = typecheck(parse("loop main { }"))
    assert [(i.id, i.kind) for i in tp.loop_table] == [("main.0", "unbounded")]


def test_index_loops_source_order():
    tp = typecheck(parse("loop a { } loop b { }"))
    assert [(i.id, i.kind) for i in tp.loop_table] == [("main.0", "unbounded"), ("main.1", "unbounded")]


def test_index_loops_nested_bounded():
    tp = typecheck(parse("state u8 s := 0; loop main { for i in 0..4 { s := s + 1; } }"))
    assert [(i.id, i.kind, i.bound) for i in tp.loop_table] == [
        ("main.0", "unbounded", None), ("main.1", "bounded", 4)]
    assert tp.loop_table[1].parent == "main.0"


def test_modified_vars_are_assignment_targets():
    tp = typecheck(parse("state u8 a := 0; state u8 b := 0; state u8 c := 0;"
                         "loop main { if (a == 0) { b := 1; } c := a; }"))
    assert tp.loop_table[0].modified_vars == {"b", "c"}


def test_expand_textual_unrolling():
    tp = load_program("state u8 s := 0; loop main { for i in 0..2 { s := s + (i as u8); } }",
                      unwinding_assertions=False)
    body = tp.loop_def("main.0").body
    assert len(body) == 2 and all(isinstance(s, Assign) for s in body)
    assert [s.value.right.arg.value for s in body] == [0, 1]


def test_expand_adds_unwinding_assertion():
    tp = load_program("state u8 s := 0; loop main { for i in 0..2 { s := s + 1; } }")
    body = tp.loop_def("main.0").body
    assert isinstance(body[-1], If)
    assert [i.kind for i in tp.loop_table] == ["unbounded"]


def test_expand_zero_bound_removed():
    tp = load_program("state u8 s := 0; loop main { for i in 3..3 { s := s + 1; } }")
    assert tp.loop_def("main.0").body == []


def test_expand_dynamic_bound_rejected():
    src = "input u8 n; state u8 s := 0; loop main { for i in 0..n { s := s + 1; } }"
    with pytest.raises((TypeCheckError, ParseError), match="static|expected"):
        load_program(src)


def test_expanded_program_has_no_for():
    tp = load_program("state u8 s := 0; loop main { for i in 0..3 { for j in 0..2 { s := s + 1; } } }")

    def walk(stmts):
        for s in stmts:
            assert not isinstance(s, For)
            if isinstance(s, If):
                walk(s.then)
                walk(s.els)
    walk(tp.loop_def("main.0").body)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_pretty_print_round_trip(seed):
    src = _RandomProgram(random.Random(seed)).program()
    a = typecheck(parse(src))
    b = typecheck(parse(program_str(a)))
    assert dump(a.decls) == dump(b.decls)
    assert dump(a.loops) == dump(b.loops)


_FOR_TEMPLATE = """input u4 t;
state u4 s := {s0};
state u4 acc := 0;
loop main {{
  for i in {lo}..{hi} {{
    acc := acc + (s ^ (i as u4));
    if (t > (i as u4)) {{ s := s + t; }}
  }}
  assert(acc != {bad});
}}
"""


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 15), st.integers(0, 3), st.integers(0, 4), st.integers(0, 15),
       st.lists(st.integers(0, 15), min_size=1, max_size=6))
def test_expansion_preserves_semantics(s0, lo, n, bad, inputs):
    src = _FOR_TEMPLATE.format(s0=s0, lo=lo, hi=lo + n, bad=bad)
    raw = typecheck(parse(src))
    exp = expand_bounded_loops(typecheck(parse(src)), unwinding_assertions=False)
    ia, ib = Interpreter(raw), Interpreter(exp)
    sa, va = ia.initial({})
    sb, vb = ib.initial({})
    assert (sa, va) == (sb, vb)
    for t in inputs:
        sa, va = ia.step(sa, "main.0", {"t": t})
        sb, vb = ib.step(sb, "main.0", {"t": t})
        assert sa == sb
        assert bool(va) == bool(vb)


def test_loop_ids_independent_of_analysis():
    src = "loop a { } loop b { for i in 0..2 { } } loop c { }"
    ids1 = [i.id for i in typecheck(parse(src)).loop_table]
    load_program(src)  # an unrelated expansion must not disturb numbering
    ids2 = [i.id for i in typecheck(parse(src)).loop_table]
    assert ids1 == ids2 == ["main.0", "main.1", "main.2", "main.3"]
