"""Merged programs for programmable blocks.

A program is a flat list of statements, one per absorbed block, in
non-decreasing level order.  Each statement assigns ``v_<member>`` from a
function applied to program inputs (``x<k>``) or to variables assigned by
earlier statements.  Sequential members own a state slot ``s_<member>``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .behavior import (
    BehaviorDef,
    SeqState,
    Timer,
    behavior_catalog,
    eval_combinational,
    fire_timer,
    init_state,
    step_sequential,
)

_INPUT_RE = re.compile(r"x(\d+)\Z")
_VAR_RE = re.compile(r"v_(\w+)\Z")


class ProgramError(ValueError):
    pass


def var_name(member: str) -> str:
    return f"v_{member}"


def state_name(member: str) -> str:
    return f"s_{member}"


@dataclass(frozen=True)
class Statement:
    member: str
    level: int
    tag: str
    param: int | None
    args: tuple[str, ...]

    @property
    def target(self) -> str:
        return var_name(self.member)

    @property
    def behavior(self) -> BehaviorDef:
        return behavior_catalog(self.tag, self.param)

    @property
    def state_slot(self) -> str | None:
        return state_name(self.member) if self.behavior.sequential else None

    @property
    def uses_timer(self) -> bool:
        return self.tag in ("pulse", "delay")


@dataclass(frozen=True)
class MergedProgram:
    id: str
    input_sources: tuple[tuple[str, int], ...]
    outputs: tuple[str, ...]
    statements: tuple[Statement, ...]

    @property
    def n_inputs(self) -> int:
        return len(self.input_sources)

    @property
    def n_outputs(self) -> int:
        return len(self.outputs)

    @property
    def members(self) -> tuple[str, ...]:
        return tuple(s.member for s in self.statements)

    @property
    def state_slots(self) -> tuple[tuple[str, int], ...]:
        """(slot name, initial value) for each sequential member."""
        return tuple((s.state_slot, 0) for s in self.statements if s.state_slot)


def parse_arg(arg: str) -> tuple[str, int | str]:
    m = _INPUT_RE.match(arg)
    if m:
        return "input", int(m.group(1))
    m = _VAR_RE.match(arg)
    if m:
        return "var", m.group(1)
    raise ProgramError(f"bad statement argument {arg!r}")


def validate_program(prog: MergedProgram) -> list[str]:
    """Return a list of problems; empty when the program is well formed."""
    problems = []
    seen: set[str] = set()
    last_level = None
    for st in prog.statements:
        try:
            bdef = st.behavior
        except ValueError as exc:
            problems.append(f"{st.member}: {exc}")
            continue
        if st.member in seen:
            problems.append(f"{st.member}: assigned twice")
        if last_level is not None and st.level < last_level:
            problems.append(f"{st.member}: statements out of level order")
        last_level = st.level
        if len(st.args) != bdef.n_inputs:
            problems.append(f"{st.member}: {bdef.label} takes {bdef.n_inputs} arguments")
        for arg in st.args:
            try:
                kind, ref = parse_arg(arg)
            except ProgramError as exc:
                problems.append(f"{st.member}: {exc}")
                continue
            if kind == "input" and ref >= prog.n_inputs:
                problems.append(f"{st.member}: input {arg} out of range")
            if kind == "var" and ref not in seen:
                problems.append(f"{st.member}: reads {arg} before it is assigned")
        seen.add(st.member)
    for out in prog.outputs:
        if out not in seen:
            problems.append(f"output reads unknown member {out!r}")
    return problems


class ProgramRunner:
    """Executes a merged program the way the simulator executes plain blocks.

    Timers are keyed by (member, timer) so that the enclosing simulator can
    treat them like any other block timer.
    """

    def __init__(self, prog: MergedProgram):
        self.prog = prog
        self._defs = [st.behavior for st in prog.statements]
        self._args = [[parse_arg(a) for a in st.args] for st in prog.statements]
        self.states: dict[str, SeqState] = {}
        self.values: dict[str, bool] = {}

    def _arg_values(self, k: int, inputs: Sequence[bool]) -> list[bool]:
        vals = []
        for kind, ref in self._args[k]:
            vals.append(inputs[ref] if kind == "input" else self.values[ref])
        return vals

    def _outputs(self) -> tuple[bool, ...]:
        return tuple(self.values[m] for m in self.prog.outputs)

    def init(self, inputs: Sequence[bool]) -> tuple[bool, ...]:
        self.states.clear()
        self.values.clear()
        for k, st in enumerate(self.prog.statements):
            bdef = self._defs[k]
            args = self._arg_values(k, inputs)
            if bdef.sequential:
                state = init_state(bdef, args)
                self.states[st.member] = state
                self.values[st.member] = state.outputs[0]
            else:
                self.values[st.member] = eval_combinational(bdef, args)[0]
        return self._outputs()

    def step(
        self, inputs: Sequence[bool], now: int
    ) -> tuple[tuple[bool, ...], list[tuple[str, Timer]]]:
        timers: list[tuple[str, Timer]] = []
        for k, st in enumerate(self.prog.statements):
            bdef = self._defs[k]
            args = self._arg_values(k, inputs)
            if bdef.sequential:
                state, outs, new = step_sequential(bdef, self.states[st.member], args, now)
                self.states[st.member] = state
                self.values[st.member] = outs[0]
                timers.extend((st.member, t) for t in new)
            else:
                self.values[st.member] = eval_combinational(bdef, args)[0]
        return self._outputs(), timers

    def fire(self, member: str, timer: Timer) -> None:
        k = self.prog.members.index(member)
        state = fire_timer(self._defs[k], self.states[member], timer)
        self.states[member] = state
        self.values[member] = state.outputs[0]
