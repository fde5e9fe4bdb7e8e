"""Pre-defined block behaviors.

Combinational functions (and2, or2, not, lut2, lut3) are pure truth functions.
Sequential functions (toggle, trip, pulse, delay) keep a small state record:
the inputs seen at the previous evaluation (for edge detection), the stored
output, and any timers still pending.

All values are booleans; durations are integer simulation ticks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

COMBINATIONAL = {"and2": 2, "or2": 2, "not": 1, "lut2": 2, "lut3": 3}
SEQUENTIAL = {"toggle": 1, "trip": 2, "pulse": 1, "delay": 1}

# tags that require an integer parameter, and its admissible range
_PARAM_RANGE = {
    "lut2": (0, 0xF),
    "lut3": (0, 0xFF),
    "pulse": (0, None),
    "delay": (0, None),
}


class BehaviorError(ValueError):
    pass


@dataclass(frozen=True)
class BehaviorDef:
    tag: str
    param: int | None
    n_inputs: int
    n_outputs: int
    sequential: bool

    @property
    def label(self) -> str:
        return self.tag if self.param is None else f"{self.tag}:{self.param}"


def behavior_catalog(tag: str, param: int | None = None) -> BehaviorDef:
    """Look up the definition for a compute function tag."""
    if tag in COMBINATIONAL:
        arity, seq = COMBINATIONAL[tag], False
    elif tag in SEQUENTIAL:
        arity, seq = SEQUENTIAL[tag], True
    else:
        raise BehaviorError(f"unknown function tag {tag!r}")
    if tag in _PARAM_RANGE:
        if param is None:
            raise BehaviorError(f"{tag} requires a parameter")
        lo, hi = _PARAM_RANGE[tag]
        if param < lo or (hi is not None and param > hi):
            raise BehaviorError(f"{tag} parameter {param} out of range")
    elif param is not None:
        raise BehaviorError(f"{tag} takes no parameter")
    return BehaviorDef(tag, param, arity, 1, seq)


def _check_arity(bdef: BehaviorDef, inputs: Sequence[bool]) -> None:
    if len(inputs) != bdef.n_inputs:
        raise BehaviorError(
            f"{bdef.label} expects {bdef.n_inputs} inputs, got {len(inputs)}"
        )


def lut_index(inputs: Sequence[bool]) -> int:
    """in0 is the least significant bit of the table index."""
    idx = 0
    for k, v in enumerate(inputs):
        if v:
            idx |= 1 << k
    return idx


def eval_combinational(bdef: BehaviorDef, inputs: Sequence[bool]) -> tuple[bool, ...]:
    if bdef.sequential:
        raise BehaviorError(f"{bdef.label} is sequential")
    _check_arity(bdef, inputs)
    tag = bdef.tag
    if tag == "and2":
        out = bool(inputs[0]) and bool(inputs[1])
    elif tag == "or2":
        out = bool(inputs[0]) or bool(inputs[1])
    elif tag == "not":
        out = not inputs[0]
    else:
        out = bool((bdef.param >> lut_index(inputs)) & 1)
    return (out,)


# ---------------------------------------------------------------------------
# sequential behaviors
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Timer:
    """A request to set the block's stored output to ``value`` at ``expiry``."""

    expiry: int
    timer_id: int
    value: bool


@dataclass(frozen=True)
class SeqState:
    latched: tuple[bool, ...]
    stored: tuple[bool, ...]
    pending: tuple[Timer, ...] = ()
    next_timer: int = 0

    @property
    def outputs(self) -> tuple[bool, ...]:
        return self.stored


def init_state(bdef: BehaviorDef, inputs: Sequence[bool]) -> SeqState:
    """Latch the current inputs so that no edge is seen at time zero."""
    if not bdef.sequential:
        raise BehaviorError(f"{bdef.label} is combinational")
    _check_arity(bdef, inputs)
    return SeqState(tuple(bool(v) for v in inputs), (False,) * bdef.n_outputs)


def step_sequential(
    bdef: BehaviorDef, state: SeqState | None, inputs: Sequence[bool], now: int
) -> tuple[SeqState, tuple[bool, ...], list[Timer]]:
    """Advance one evaluation; returns (state, outputs, newly requested timers).

    Timers with zero duration take effect inside this step and are not returned.
    """
    if not bdef.sequential:
        raise BehaviorError(f"{bdef.label} is combinational")
    if state is None:
        raise BehaviorError(f"{bdef.label}: state not initialized")
    _check_arity(bdef, inputs)
    cur = tuple(bool(v) for v in inputs)
    rising = [c and not p for c, p in zip(cur, state.latched)]
    out = state.stored[0]
    pending = state.pending
    next_id = state.next_timer
    new: list[Timer] = []
    tag = bdef.tag

    if tag == "toggle":
        if rising[0]:
            out = not out
    elif tag == "trip":
        if rising[1]:
            out = False
        elif rising[0]:
            out = True
    elif tag == "pulse":
        if rising[0]:
            out = True
            if bdef.param == 0:
                out = False
                pending = ()
            else:
                t = Timer(now + bdef.param, next_id, False)
                next_id += 1
                # a retrigger supersedes whatever expiry was pending
                pending = (t,)
                new.append(t)
    elif tag == "delay":
        if cur[0] != state.latched[0]:
            if bdef.param == 0:
                out = cur[0]
            else:
                t = Timer(now + bdef.param, next_id, cur[0])
                next_id += 1
                pending = pending + (t,)
                new.append(t)

    st = SeqState(cur, (out,), pending, next_id)
    return st, st.stored, new


def fire_timer(bdef: BehaviorDef, state: SeqState, timer: Timer) -> SeqState:
    """Apply an expired timer; superseded timers are ignored."""
    if timer not in state.pending:
        return state
    pending = tuple(t for t in state.pending if t != timer)
    return replace(state, stored=(timer.value,), pending=pending)
