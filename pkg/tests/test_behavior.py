from __future__ import annotations

import itertools

import pytest

from bsynth.behavior import (
    BehaviorError,
    behavior_catalog,
    eval_combinational,
    fire_timer,
    init_state,
    step_sequential,
)

from oracles import lut_truth


def test_catalog():
    assert behavior_catalog("and2").n_inputs == 2
    assert behavior_catalog("toggle").sequential
    assert behavior_catalog("lut3", 0x80).n_inputs == 3
    for bad in [("lut2", 16), ("lut3", None), ("pulse", -1), ("and2", 1), ("nand", None)]:
        with pytest.raises(BehaviorError):
            behavior_catalog(*bad)


@pytest.mark.parametrize(
    "tag,param,inputs,expected",
    [
        ("and2", None, (1, 1), True),
        ("and2", None, (1, 0), False),
        ("or2", None, (0, 1), True),
        ("not", None, (0,), True),
        ("lut2", 0x6, (1, 0), True),
        ("lut2", 0xB, (0, 1), False),
        ("lut2", 0xB, (0, 0), True),
        ("lut2", 0xB, (1, 0), True),
        ("lut2", 0xB, (1, 1), True),
        ("lut3", 0x80, (1, 1, 1), True),
        ("lut3", 0x80, (1, 1, 0), False),
    ],
)
def test_combinational_examples(tag, param, inputs, expected):
    assert eval_combinational(behavior_catalog(tag, param), inputs) == (expected,)


def test_lut2_0xb_pattern_set():
    # mask 0xB is 1011: high for in1in0 = 00, 01, 11
    b = behavior_catalog("lut2", 0xB)
    high = {(i1, i0) for i0, i1 in itertools.product((0, 1), repeat=2) if eval_combinational(b, (i0, i1))[0]}
    assert high == {(0, 0), (0, 1), (1, 1)}


def test_lut_truth_tables_exhaustive():
    for tag, width in (("lut2", 2), ("lut3", 3)):
        for mask in range(1 << (1 << width)):
            b = behavior_catalog(tag, mask)
            for pattern in itertools.product((False, True), repeat=width):
                assert eval_combinational(b, pattern)[0] == lut_truth(mask, pattern), (tag, mask, pattern)


def run_seq(tag, param, changes, horizon, init=(0,)):
    """Drive one sequential block; returns {time: output} wherever the output changed."""
    b = behavior_catalog(tag, param)
    st = init_state(b, [bool(v) for v in init])
    out = {0: st.outputs[0]}
    cur = list(init)
    timers = []
    for t in range(1, horizon + 1):
        for timer in sorted(x for x in timers if x.expiry == t):
            st = fire_timer(b, st, timer)
        timers = [x for x in timers if x.expiry > t]
        if t in changes:
            cur = list(changes[t])
            st, _, new = step_sequential(b, st, [bool(v) for v in cur], t)
            timers += new
        if st.outputs[0] != list(out.values())[-1]:
            out[t] = st.outputs[0]
    return out


def test_toggle_flips_on_rising_edges():
    out = run_seq("toggle", None, {1: (1,), 2: (0,), 3: (1,)}, 5)
    assert out == {0: False, 1: True, 3: False}


def test_pulse():
    out = run_seq("pulse", 3, {2: (1,)}, 8)
    assert out == {0: False, 2: True, 5: False}


def test_pulse_retrigger_extends():
    out = run_seq("pulse", 3, {2: (1,), 3: (0,), 4: (1,)}, 10)
    assert out == {0: False, 2: True, 7: False}


def test_trip_reset_priority():
    out = run_seq("trip", None, {1: (1, 1)}, 3, init=(0, 0))
    assert out == {0: False}
    out = run_seq("trip", None, {1: (1, 0), 2: (0, 1)}, 3, init=(0, 0))
    assert out == {0: False, 1: True, 2: False}


def test_delay():
    out = run_seq("delay", 3, {2: (1,), 4: (0,)}, 10)
    assert out == {0: False, 5: True, 7: False}


def test_zero_durations_are_immediate():
    assert run_seq("delay", 0, {2: (1,)}, 4) == {0: False, 2: True}
    assert run_seq("pulse", 0, {2: (1,)}, 4) == {0: False}


def test_no_edge_at_initialization():
    assert run_seq("toggle", None, {}, 3, init=(1,)) == {0: False}


def test_uninitialized_state_raises():
    with pytest.raises(BehaviorError):
        step_sequential(behavior_catalog("toggle"), None, [True], 1)
