"""Wave-based discrete-event simulation.

At every event time the simulator applies sensor changes, then timer expiries,
then evaluates each affected block once in (level, id) order.  A block's
outputs are final for the wave once it has been evaluated, so propagation is
glitch-free.  Only net changes over a wave are recorded.
"""

from __future__ import annotations

import csv
import heapq
import io
from collections import defaultdict
from dataclasses import dataclass

from .behavior import Timer, eval_combinational, fire_timer, init_state, step_sequential
from .designio import StimulusScript, check_stimulus
from .netlist import OUTPUT, PROGRAMMABLE, SENSOR, Design, compute_levels
from .program import ProgramRunner

_SENSOR_EVENT = 0
_TIMER_EVENT = 1


class SimulationError(RuntimeError):
    pass


class ExpectationError(SimulationError):
    pass


@dataclass(frozen=True, order=True)
class TraceRecord:
    time: int
    block: str
    port: int
    value: bool


@dataclass
class SimTrace:
    initial: dict[tuple[str, int], bool]
    records: list[TraceRecord]
    horizon: int
    final: dict[str, bool]
    # largest number of evaluations any block received within one wave
    max_evals_per_wave: int = 0
    waves: int = 0

    def restrict(self, blocks) -> list[TraceRecord]:
        blocks = set(blocks)
        return [r for r in self.records if r.block in blocks]

    def value_at(self, block: str, port: int, t: int) -> bool:
        val = self.initial[(block, port)]
        for r in self.records:
            if r.time > t:
                break
            if r.block == block and r.port == port:
                val = r.value
        return val

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "block", "port", "value"])
        for r in self.records:
            w.writerow([r.time, r.block, r.port, int(r.value)])
        for blk in sorted(self.final):
            w.writerow([self.horizon, blk, 0, int(self.final[blk])])
        return buf.getvalue()


class _Simulator:
    def __init__(self, d: Design):
        self.d = d
        self.levels = compute_levels(d)
        self.values: dict[tuple[str, int], bool] = {}
        self.seq_states = {}
        self.runners: dict[str, ProgramRunner] = {}
        self.queue: list = []
        self.consumers: dict[str, set[str]] = defaultdict(set)
        for e in d.edges:
            self.consumers[e.src].add(e.dst)

    def _inputs(self, b: str) -> list[bool]:
        return [self.values[(e.src, e.src_port)] for e in self.d.fanin.get(b, ())]

    def _set_outputs(self, b: str, outs) -> bool:
        changed = False
        for k, v in enumerate(outs):
            if self.values.get((b, k)) != v:
                self.values[(b, k)] = v
                changed = True
        return changed

    def _push_timer(self, b: str, key, timer: Timer) -> None:
        heapq.heappush(self.queue, (timer.expiry, _TIMER_EVENT, b, key, timer))

    def initialize(self, inits: dict[str, bool]) -> None:
        for b in sorted(self.d.blocks, key=lambda b: (self.levels[b], b)):
            kind = self.d.blocks[b]
            if kind.cls == SENSOR:
                self.values[(b, 0)] = bool(inits.get(b, False))
                continue
            ins = self._inputs(b)
            if kind.cls == OUTPUT:
                self.values[(b, 0)] = ins[0]
            elif kind.cls == PROGRAMMABLE:
                runner = ProgramRunner(kind.program)
                self.runners[b] = runner
                self._set_outputs(b, runner.init(ins))
            else:
                bdef = kind.behavior
                if bdef.sequential:
                    st = init_state(bdef, ins)
                    self.seq_states[b] = st
                    self._set_outputs(b, st.outputs)
                else:
                    self._set_outputs(b, eval_combinational(bdef, ins))

    def evaluate(self, b: str, now: int) -> bool:
        kind = self.d.blocks[b]
        ins = self._inputs(b)
        if kind.cls == OUTPUT:
            return self._set_outputs(b, ins)
        if kind.cls == PROGRAMMABLE:
            outs, timers = self.runners[b].step(ins, now)
            for member, t in timers:
                self._push_timer(b, (member, t.timer_id), t)
            return self._set_outputs(b, outs)
        bdef = kind.behavior
        if bdef.sequential:
            st, outs, timers = step_sequential(bdef, self.seq_states[b], ins, now)
            self.seq_states[b] = st
            for t in timers:
                self._push_timer(b, t.timer_id, t)
            return self._set_outputs(b, outs)
        return self._set_outputs(b, eval_combinational(bdef, ins))

    def fire(self, b: str, key, timer: Timer) -> bool:
        """Apply a timer effect; returns True when ``b`` must be re-evaluated."""
        kind = self.d.blocks[b]
        if kind.cls == PROGRAMMABLE:
            runner = self.runners[b]
            before = runner.states[key[0]]
            runner.fire(key[0], timer)
            return runner.states[key[0]] != before
        before = self.seq_states[b]
        st = fire_timer(kind.behavior, before, timer)
        self.seq_states[b] = st
        return self._set_outputs(b, st.outputs)

    def run(self, script: StimulusScript) -> SimTrace:
        inits = script.inits
        for s in inits:
            if self.d.blocks.get(s) is None or self.d.blocks[s].cls != SENSOR:
                raise SimulationError(f"init of unknown sensor {s!r}")
        for seq, ev in enumerate(script.events):
            if self.d.blocks.get(ev.sensor) is None or self.d.blocks[ev.sensor].cls != SENSOR:
                raise SimulationError(f"event on unknown sensor {ev.sensor!r}")
            # seq keeps same-time events for one sensor in script order
            heapq.heappush(self.queue, (ev.time, _SENSOR_EVENT, ev.sensor, seq, ev.value))
        self.initialize(inits)
        trace = SimTrace(dict(self.values), [], script.horizon, {})
        horizon = script.horizon

        while self.queue and self.queue[0][0] <= horizon:
            now = self.queue[0][0]
            trace.waves += 1
            before = dict(self.values)
            dirty: list[tuple[int, str]] = []
            marked: set[str] = set()

            def mark(blocks):
                for c in blocks:
                    if c not in marked:
                        marked.add(c)
                        heapq.heappush(dirty, (self.levels[c], c))

            while self.queue and self.queue[0][0] == now:
                _, kind, b, key, payload = heapq.heappop(self.queue)
                if kind == _SENSOR_EVENT:
                    if self.values[(b, 0)] != payload:
                        self.values[(b, 0)] = payload
                        mark(self.consumers[b])
                elif self.fire(b, key, payload):
                    if self.d.blocks[b].cls == PROGRAMMABLE:
                        mark([b])
                    else:
                        mark(self.consumers[b])

            evals: dict[str, int] = defaultdict(int)
            while dirty:
                _, b = heapq.heappop(dirty)
                evals[b] += 1
                if self.evaluate(b, now):
                    mark(self.consumers[b])
            if evals:
                trace.max_evals_per_wave = max(trace.max_evals_per_wave, max(evals.values()))

            for port in sorted(p for p, v in self.values.items() if before[p] != v):
                trace.records.append(TraceRecord(now, port[0], port[1], self.values[port]))

        trace.final = {b: self.values[(b, 0)] for b in self.d.outputs}
        return trace


def run_simulation(d: Design, script: StimulusScript, *, check_expects: bool = False) -> SimTrace:
    """Simulate ``d`` under ``script`` up to its ``run until`` horizon."""
    try:
        check_stimulus(script)
    except ValueError as exc:
        raise SimulationError(str(exc)) from None
    for x in script.expects:
        kind = d.blocks.get(x.block)
        n = 1 if kind is not None and kind.cls == OUTPUT else (kind.n_outputs if kind else 0)
        if x.port >= n:
            raise SimulationError(f"{x}: no such port {x.block}.out{x.port}")
    trace = _Simulator(d).run(script)
    if check_expects:
        failed = [r for r in check_expectations(trace, script) if not r.passed]
        if failed:
            raise ExpectationError("; ".join(str(r) for r in failed))
    return trace


@dataclass(frozen=True)
class ExpectResult:
    expect: object
    actual: bool

    @property
    def passed(self) -> bool:
        return self.actual == self.expect.value

    def __str__(self) -> str:
        status = "pass" if self.passed else f"FAIL (got {int(self.actual)})"
        return f"{self.expect}: {status}"


def check_expectations(trace: SimTrace, script: StimulusScript) -> list[ExpectResult]:
    return [
        ExpectResult(x, trace.value_at(x.block, x.port, x.time)) for x in script.expects
    ]


def output_trace(d: Design, trace: SimTrace) -> tuple[dict, list[TraceRecord]]:
    """The part of a trace visible at primary outputs."""
    outs = set(d.outputs)
    init = {k: v for k, v in trace.initial.items() if k[0] in outs}
    return init, trace.restrict(outs)
