"""PareDown decomposition.

Start from every remaining inner block as one candidate and peel off the
lowest-ranked border block until the candidate fits the programmable block.
A fitting candidate of two or more blocks becomes a partition; a fitting
singleton stays a pre-defined block.  Repeat on what is left.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

from ..netlist import Design
from .core import Candidate, NetIndex, PartitionResult, ProgIface, RankValue, contracts_acyclic, make_result

STRICT = "strict"
RESILIENT = "resilient"


@dataclass(frozen=True)
class PareStep:
    """One inner-loop iteration, recorded when tracing is requested."""

    pass_no: int
    members: frozenset[str]
    indegree: int
    outdegree: int
    fits: bool
    ranks: tuple[RankValue, ...] = ()
    removed: str | None = None


class _RankQueue:
    """Border blocks ordered by removal priority, with lazy invalidation."""

    def __init__(self, cand: Candidate):
        self.cand = cand
        self.heap: list = []
        self.version: dict[str, int] = {}

    def push(self, b: str) -> None:
        v = self.version.get(b, 0) + 1
        self.version[b] = v
        if self.cand.is_border(b):
            heapq.heappush(self.heap, (self.cand.rank(b).sort_key, v, b))

    def pop(self) -> str:
        while True:
            # a non-empty acyclic candidate always has a border block
            assert self.heap, "candidate without border block"
            _, v, b = heapq.heappop(self.heap)
            if b in self.cand.members and self.version[b] == v:
                return b


def paredown(
    d: Design,
    iface: ProgIface = ProgIface(),
    mode: str = RESILIENT,
    *,
    convex_required: bool = False,
    trace: list | None = None,
) -> PartitionResult:
    if mode not in (STRICT, RESILIENT):
        raise ValueError(f"unknown mode {mode!r}")
    t0 = time.perf_counter()
    idx = NetIndex(d)
    remaining = list(idx.inner)
    partitions = []
    unpartitionable = []
    fit_tests = 0
    pass_no = 0
    stopped_early = False

    while remaining:
        pass_no += 1
        cand = Candidate(idx, remaining)
        queue = _RankQueue(cand)
        for b in cand.members:
            queue.push(b)
        last_removed = None
        while cand.members:
            fit_tests += 1
            fits = cand.fits(iface)
            if fits and convex_required and len(cand.members) > 1:
                # convex, and no cycle through the partitions accepted so far
                fits = contracts_acyclic(d, partitions + [cand.members])
            if fits:
                if trace is not None:
                    trace.append(PareStep(pass_no, frozenset(cand.members), cand.indegree, cand.outdegree, True))
                if len(cand.members) > 1:
                    partitions.append(set(cand.members))
                members = cand.members
                remaining = [b for b in remaining if b not in members]
                break
            b = queue.pop()
            if trace is not None:
                ranks = tuple(sorted((cand.rank(x) for x in cand.border()), key=lambda r: r.sort_key))
                trace.append(
                    PareStep(pass_no, frozenset(cand.members), cand.indegree, cand.outdegree, False, ranks, b)
                )
            cand.remove(b)
            last_removed = b
            for x in idx.touching[b]:
                if x in cand.members:
                    queue.push(x)
        else:
            # pared down to nothing: the last block cannot fit even alone
            if mode == STRICT:
                stopped_early = True
                break
            unpartitionable.append(last_removed)
            remaining = [b for b in remaining if b != last_removed]

    res = make_result(
        f"paredown-{mode}" if mode == STRICT else "paredown",
        iface,
        partitions,
        idx.inner,
        elapsed_ms=(time.perf_counter() - t0) * 1000,
    )
    res.stats.update(
        fit_tests=fit_tests,
        passes=pass_no,
        unpartitionable=sorted(unpartitionable),
        stopped_early=stopped_early,
    )
    return res

