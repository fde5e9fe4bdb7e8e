"""Greedy aggregation baseline.

Grow one cluster at a time from a seed next to the primary inputs, adding
neighbouring blocks (successors before predecessors, ids in order) as long
as the cluster still fits.  Used only for comparison with PareDown.
"""

from __future__ import annotations

import time

from ..netlist import SENSOR, Design
from .core import NetIndex, PartitionResult, ProgIface, contracts_acyclic, make_result, partition_fits


def aggregate(d: Design, iface: ProgIface = ProgIface(), *, convex_required: bool = False) -> PartitionResult:
    t0 = time.perf_counter()
    idx = NetIndex(d)
    inner = set(idx.inner)
    visited: set[str] = set()
    partitions = []
    near_inputs = {
        e.dst for e in d.edges if d.blocks[e.src].cls == SENSOR and e.dst in inner
    }

    def ok(cluster: set[str]) -> bool:
        if not partition_fits(d, cluster, iface):
            return False
        return not convex_required or contracts_acyclic(d, partitions + [cluster])

    def seed() -> str | None:
        order = [b for b in idx.inner if b not in visited]  # (level, id) order
        for b in order:
            if b in near_inputs:
                return b
        return order[0] if order else None

    while (s := seed()) is not None:
        cluster = {s}
        visited.add(s)
        while True:
            succ = sorted({x for m in cluster for x in d.successors(m)} & inner - visited)
            pred = sorted({x for m in cluster for x in d.predecessors(m)} & inner - visited)
            for x in succ + pred:
                if ok(cluster | {x}):
                    cluster.add(x)
                    visited.add(x)
                    break
            else:
                break
        if len(cluster) > 1 and ok(cluster):
            partitions.append(cluster)

    return make_result(
        "aggregate", iface, partitions, idx.inner, elapsed_ms=(time.perf_counter() - t0) * 1000
    )
