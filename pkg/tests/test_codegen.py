from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsynth.codegen import CodegenError, c_filename, emit_c, merge_partition, rewrite_design, synthesize
from bsynth.designio import parse_design, serialize_design
from bsynth.netlist import Edge, inner_blocks, validate_design
from bsynth.partition import ProgIface, paredown
from bsynth.partition.core import make_result
from bsynth.program import ProgramRunner, validate_program
from bsynth.randgen import GenParams, generate_design, generate_stimulus
from bsynth.simulator import output_trace, run_simulation

from builders import chain

IFACE = ProgIface(2, 2)


def test_merge_reference(data_design):
    prog = merge_partition(data_design("reference"), {"b", "c"})
    assert prog.input_sources == (("a", 0), ("s3", 0))
    assert prog.outputs == ("b", "c")
    assert [(s.member, s.tag, s.args) for s in prog.statements] == [
        ("b", "not", ("x0",)),
        ("c", "or2", ("x0", "x1")),
    ]
    assert validate_program(prog) == []


def test_internal_edge_becomes_variable():
    prog = merge_partition(chain(2), {"b0", "b1"})
    assert [s.args for s in prog.statements] == [("x0",), ("v_b0",)]
    assert prog.outputs == ("b1",)


def test_merge_refuses_non_convex():
    with pytest.raises(CodegenError, match="not convex"):
        merge_partition(chain(3), {"b0", "b2"})


def test_merge_refuses_oversized(data_design):
    with pytest.raises(CodegenError, match="does not fit"):
        merge_partition(data_design("reference"), {"a", "b", "c"}, iface=IFACE)


def test_rewrite_reference(data_design):
    d = data_design("reference")
    res = make_result("manual", IFACE, [{"b", "c"}], inner_blocks(d))
    new = rewrite_design(d, res)
    assert set(new.blocks) == {"s1", "s2", "s3", "a", "P1", "o1", "o2"}
    p1 = new.blocks["P1"]
    assert (p1.n_inputs, p1.n_outputs) == (2, 2)
    assert new.edges == frozenset({
        Edge("s1", 0, "a", 0), Edge("s2", 0, "a", 1),
        Edge("a", 0, "P1", 0), Edge("s3", 0, "P1", 1),
        Edge("P1", 0, "o1", 0), Edge("P1", 1, "o2", 0),
    })
    assert validate_design(new).ok


def test_rewrite_empty_result_is_identity(data_design):
    d = data_design("reference")
    assert rewrite_design(d, make_result("manual", IFACE, [], inner_blocks(d))) == d


def test_rewrite_podium(data_design):
    d = data_design("podium_timer_3")
    new, programs = synthesize(d, paredown(d, IFACE))
    assert sorted(inner_blocks(new)) == ["7", "P1", "P2"]
    assert len(programs) == 2


def test_rewrite_refuses_partitions_in_a_loop():
    d = parse_design(
        "design loop\nblock s sensor.button\nblock t sensor.button\n"
        "block a compute.not\nblock b compute.not\nblock c compute.not\nblock e compute.and2\n"
        "block y output.led\nblock z output.led\n"
        "connect s.out0 -> a.in0\nconnect a.out0 -> b.in0\nconnect t.out0 -> c.in0\n"
        "connect b.out0 -> y.in0\nconnect c.out0 -> e.in0\nconnect a.out0 -> e.in1\nconnect e.out0 -> z.in0"
    )
    res = make_result("manual", IFACE, [{"a", "e"}, {"b", "c"}], inner_blocks(d))
    with pytest.raises(CodegenError, match="loop"):
        rewrite_design(d, res)


def test_fresh_ids_avoid_collisions():
    d = parse_design(
        "design x\nblock s sensor.button\nblock P1 compute.not\nblock b compute.not\nblock z output.led\n"
        "connect s.out0 -> P1.in0\nconnect P1.out0 -> b.in0\nconnect b.out0 -> z.in0"
    )
    new, programs = synthesize(d, paredown(d, IFACE))
    assert [p.id for p in programs] == ["P1_"]
    assert validate_design(new).ok


def test_emit_c_reference(data_design):
    prog = merge_partition(data_design("reference"), {"b", "c"})
    text = emit_c(prog, "reference")
    lines = [ln.strip() for ln in text.splitlines()]
    i = lines.index("v_b = !input[0];")
    assert lines.index("v_c = input[0] || input[1];") > i
    assert "output[1] = v_c;" in lines
    assert c_filename("reference", prog) == "reference_P1.c"


def test_emit_c_toggle_state():
    prog = merge_partition(chain(2, "toggle"), {"b0", "b1"})
    text = emit_c(prog)
    assert "static unsigned char s_b0 = 0;" in text
    assert "static unsigned char l_b0_0 = 0;" in text
    assert "if (input[0] && !l_b0_0) s_b0 = !s_b0;" in text


def test_emit_c_timers():
    d = parse_design(
        "design x\nblock s sensor.button\nblock p compute.pulse:3\nblock q compute.delay:2\nblock z output.led\n"
        "connect s.out0 -> p.in0\nconnect p.out0 -> q.in0\nconnect q.out0 -> z.in0"
    )
    text = emit_c(merge_partition(d, {"p", "q"}))
    assert "set_timer(0, 3);" in text and "set_timer(v_p ? 2 : 1, 2);" in text
    assert "case 2: s_q = 1; break;" in text


def test_emit_c_is_deterministic(data_design):
    d = data_design("podium_timer_3")
    a = [emit_c(p) for p in synthesize(d, paredown(d, IFACE))[1]]
    b = [emit_c(p) for p in synthesize(d, paredown(d, IFACE))[1]]
    assert a == b


def test_program_runner_matches_blocks(data_design):
    prog = merge_partition(data_design("reference"), {"b", "c"})
    run = ProgramRunner(prog)
    assert run.init([False, False]) == (True, False)
    outs, timers = run.step([True, False], 1)
    assert outs == (False, True) and timers == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 12))
def test_synthesis_preserves_output_traces(seed, n):
    d = generate_design(GenParams(seed, n))
    res = paredown(d, IFACE, convex_required=True)
    new, programs = synthesize(d, res)
    assert validate_design(new).ok
    assert all(validate_program(p) == [] for p in programs)
    assert len(inner_blocks(new)) == res.total_inner_after
    assert parse_design(serialize_design(new)) == new
    for k in range(3):
        s = generate_stimulus(d, seed * 7 + k)
        assert output_trace(d, run_simulation(d, s)) == output_trace(new, run_simulation(new, s))
