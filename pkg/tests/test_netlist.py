from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsynth.netlist import (
    BlockKind,
    CycleError,
    Design,
    Edge,
    compute_levels,
    inner_blocks,
    validate_design,
)
from bsynth.randgen import GenParams, generate_design

from oracles import longest_path_levels

S, O = BlockKind.sensor(), BlockKind.output()


def mk(blocks, edges, name="t"):
    return Design(name, blocks, frozenset(Edge(*e) for e in edges))


def rules(d):
    return {v.rule for v in validate_design(d).violations}


def test_well_formed_chain_is_ok():
    d = mk({"s": S, "t": S, "a": BlockKind.compute("and2"), "z": O},
           [("s", 0, "a", 0), ("t", 0, "a", 1), ("a", 0, "z", 0)])
    assert validate_design(d).ok


def test_two_block_cycle():
    n = BlockKind.compute("not")
    d = mk({"a": n, "b": n}, [("a", 0, "b", 0), ("b", 0, "a", 0)])
    assert "cycle" in rules(d)


def test_multiply_driven_input():
    d = mk({"s": S, "t": S, "z": O}, [("s", 0, "z", 0), ("t", 0, "z", 0)])
    assert "multiply driven input" in rules(d)


def test_undriven_and_out_of_range():
    d = mk({"s": S, "a": BlockKind.compute("and2")}, [("s", 0, "a", 0), ("s", 0, "a", 5)])
    assert rules(d) >= {"undriven input", "port out of range"}


def test_unknown_block():
    d = mk({"s": S}, [("s", 0, "ghost", 0)])
    assert "unknown block" in rules(d)


def test_levels_of_chain():
    n = BlockKind.compute("not")
    d = mk({"s": S, "a": n, "b": n}, [("s", 0, "a", 0), ("a", 0, "b", 0)])
    lv = compute_levels(d)
    assert (lv["s"], lv["a"], lv["b"]) == (0, 1, 2)


def test_levels_longest_path_wins():
    n = BlockKind.compute("not")
    d = mk(
        {"s": S, "a": n, "b": n, "d": n, "c": BlockKind.compute("lut3", 0x80)},
        [("s", 0, "a", 0), ("s", 0, "b", 0), ("a", 0, "c", 0), ("b", 0, "c", 1),
         ("a", 0, "d", 0), ("d", 0, "c", 2)],
    )
    assert compute_levels(d)["c"] == 3
    assert longest_path_levels(d)["c"] == 3


def test_levels_reject_cycles():
    n = BlockKind.compute("not")
    with pytest.raises(CycleError):
        compute_levels(mk({"a": n, "b": n}, [("a", 0, "b", 0), ("b", 0, "a", 0)]))


def test_inner_blocks(data_design):
    assert set(inner_blocks(data_design("garage"))) == {"a"}
    assert inner_blocks(mk({"s": S, "z": O}, [("s", 0, "z", 0)])) == set()


def test_podium_inner_blocks(data_design):
    assert sorted(inner_blocks(data_design("podium_timer_3")), key=int) == [str(k) for k in range(1, 10)]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 14))
def test_level_monotonicity(seed, n):
    d = generate_design(GenParams(seed, n))
    lv = compute_levels(d)
    for e in d.edges:
        assert lv[e.dst] >= lv[e.src] + 1
    assert lv == longest_path_levels(d)
