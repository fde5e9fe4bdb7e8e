"""Block-network model.

A design is a DAG of blocks.  Sensors are primary inputs, output blocks are
primary outputs, and compute/programmable blocks are the *inner* blocks that
partitioning works on.  Edges run from an output port to an input port; an
output port may fan out, an input port has exactly one driver.
"""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

from .behavior import BehaviorDef, behavior_catalog
from .program import MergedProgram

SENSOR = "sensor"
OUTPUT = "output"
COMPUTE = "compute"
PROGRAMMABLE = "programmable"
INNER_CLASSES = (COMPUTE, PROGRAMMABLE)


class CycleError(ValueError):
    pass


@dataclass(frozen=True)
class BlockKind:
    cls: str
    tag: str = ""
    param: int | None = None
    program: MergedProgram | None = None

    @classmethod
    def sensor(cls, tag: str = "button") -> BlockKind:
        return cls(SENSOR, tag)

    @classmethod
    def output(cls, tag: str = "led") -> BlockKind:
        return cls(OUTPUT, tag)

    @classmethod
    def compute(cls, tag: str, param: int | None = None) -> BlockKind:
        behavior_catalog(tag, param)
        return cls(COMPUTE, tag, param)

    @classmethod
    def programmable(cls, program: MergedProgram) -> BlockKind:
        return cls(PROGRAMMABLE, program.id, program=program)

    @property
    def behavior(self) -> BehaviorDef:
        if self.cls != COMPUTE:
            raise TypeError(f"{self.cls} blocks have no pre-defined behavior")
        return behavior_catalog(self.tag, self.param)

    @property
    def n_inputs(self) -> int:
        if self.cls == SENSOR:
            return 0
        if self.cls == OUTPUT:
            return 1
        if self.cls == PROGRAMMABLE:
            return self.program.n_inputs
        return self.behavior.n_inputs

    @property
    def n_outputs(self) -> int:
        if self.cls == SENSOR:
            return 1
        if self.cls == OUTPUT:
            return 0
        if self.cls == PROGRAMMABLE:
            return self.program.n_outputs
        return self.behavior.n_outputs

    @property
    def is_inner(self) -> bool:
        return self.cls in INNER_CLASSES


class Edge(NamedTuple):
    src: str
    src_port: int
    dst: str
    dst_port: int

    def __str__(self) -> str:
        return f"{self.src}.out{self.src_port} -> {self.dst}.in{self.dst_port}"


@dataclass(frozen=True)
class Design:
    name: str
    blocks: dict[str, BlockKind] = field(default_factory=dict)
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(Edge(*e) for e in self.edges))

    @cached_property
    def fanin(self) -> dict[str, list[Edge]]:
        """Incoming edges per block, sorted by destination port."""
        fi: dict[str, list[Edge]] = defaultdict(list)
        for e in sorted(self.edges, key=lambda e: (e.dst_port, e)):
            fi[e.dst].append(e)
        return fi

    @cached_property
    def fanout(self) -> dict[str, list[Edge]]:
        fo: dict[str, list[Edge]] = defaultdict(list)
        for e in sorted(self.edges):
            fo[e.src].append(e)
        return fo

    def driver(self, block: str, port: int) -> tuple[str, int]:
        for e in self.fanin.get(block, ()):
            if e.dst_port == port:
                return e.src, e.src_port
        raise KeyError(f"{block}.in{port} is not driven")

    def predecessors(self, block: str) -> set[str]:
        return {e.src for e in self.fanin.get(block, ())}

    def successors(self, block: str) -> set[str]:
        return {e.dst for e in self.fanout.get(block, ())}

    def of_class(self, cls: str) -> list[str]:
        return sorted(b for b, k in self.blocks.items() if k.cls == cls)

    @property
    def sensors(self) -> list[str]:
        return self.of_class(SENSOR)

    @property
    def outputs(self) -> list[str]:
        return self.of_class(OUTPUT)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule: str
    where: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.rule}: {self.where}" + (f" ({self.detail})" if self.detail else "")


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        return "ok" if self.ok else "\n".join(str(v) for v in self.violations)


def _cyclic_blocks(blocks: Iterable[str], edges: Iterable[Edge]) -> list[str]:
    indeg = {b: 0 for b in blocks}
    succ: dict[str, list[str]] = defaultdict(list)
    for e in edges:
        if e.src in indeg and e.dst in indeg:
            indeg[e.dst] += 1
            succ[e.src].append(e.dst)
    ready = [b for b, n in indeg.items() if n == 0]
    while ready:
        b = ready.pop()
        for s in succ[b]:
            indeg[s] -= 1
            if indeg[s] == 0:
                ready.append(s)
    return sorted(b for b, n in indeg.items() if n > 0)


def validate_design(d: Design) -> ValidationReport:
    out: list[Violation] = []
    driven: dict[tuple[str, int], list[Edge]] = defaultdict(list)
    for e in sorted(d.edges):
        src_kind = d.blocks.get(e.src)
        dst_kind = d.blocks.get(e.dst)
        if src_kind is None or dst_kind is None:
            missing = e.src if src_kind is None else e.dst
            out.append(Violation("unknown block", str(e), f"no block {missing!r}"))
            continue
        if not 0 <= e.src_port < src_kind.n_outputs:
            out.append(Violation("port out of range", str(e), f"{e.src} has {src_kind.n_outputs} outputs"))
        if not 0 <= e.dst_port < dst_kind.n_inputs:
            out.append(Violation("port out of range", str(e), f"{e.dst} has {dst_kind.n_inputs} inputs"))
        driven[(e.dst, e.dst_port)].append(e)
    for (blk, port), es in sorted(driven.items()):
        if len(es) > 1:
            out.append(Violation("multiply driven input", f"{blk}.in{port}", ", ".join(map(str, es))))
    for b in sorted(d.blocks):
        for port in range(d.blocks[b].n_inputs):
            if (b, port) not in driven:
                out.append(Violation("undriven input", f"{b}.in{port}"))
    cyc = _cyclic_blocks(d.blocks, d.edges)
    if cyc:
        out.append(Violation("cycle", ", ".join(cyc)))
    return ValidationReport(out)


# ---------------------------------------------------------------------------
# levels
# ---------------------------------------------------------------------------

def compute_levels(d: Design) -> dict[str, int]:
    """Longest-path distance from any sensor; sensors sit at level 0."""
    indeg = {b: 0 for b in d.blocks}
    for e in d.edges:
        indeg[e.dst] += 1
    level = {b: 0 for b in d.blocks}
    ready = sorted(b for b, n in indeg.items() if n == 0)
    heapq.heapify(ready)
    done = 0
    while ready:
        b = heapq.heappop(ready)
        done += 1
        for e in d.fanout.get(b, ()):
            level[e.dst] = max(level[e.dst], level[b] + 1)
            indeg[e.dst] -= 1
            if indeg[e.dst] == 0:
                heapq.heappush(ready, e.dst)
    if done != len(d.blocks):
        raise CycleError(f"design {d.name!r} contains a cycle")
    return level


def level_order(d: Design, levels: dict[str, int] | None = None) -> list[str]:
    """All blocks sorted by (level, id); a topological order."""
    levels = levels if levels is not None else compute_levels(d)
    return sorted(d.blocks, key=lambda b: (levels[b], b))


def inner_blocks(d: Design) -> set[str]:
    return {b for b, k in d.blocks.items() if k.is_inner}
