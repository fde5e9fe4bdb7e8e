"""Exhaustive optimal partitioning.

Every inner block is assigned to "unassigned" or to one of up to n bins.  Bins
are interchangeable while empty, so a block may only open bin k+1 when bins
1..k are already in use.  The objective is lexicographic: fewest inner blocks
after replacement (unassigned blocks plus one per bin), then the most covered
blocks.  Among equally good solutions the first one met in search order wins,
i.e. the lexicographically least assignment vector over blocks in (level, id)
order, with 0 meaning unassigned.

Blocks are visited in topological order, which makes two feasibility bounds
safe:

* a bin's input count can only grow, since all drivers of its members are
  already decided;
* a bin's output count is at least the number of member nets already seen by
  a decided outsider.

With ``prune_objective`` set, subtrees that cannot beat the incumbent are
skipped as well.  It is off by default so that the search cost reflects plain
enumeration.  None of this changes which solution is returned.
"""

from __future__ import annotations

import time

from ..netlist import Design
from .core import NetIndex, PartitionResult, ProgIface, contracts_acyclic, is_convex, make_result


class _Timeout(Exception):
    pass


class _Search:
    def __init__(self, d: Design, iface: ProgIface, convex_required: bool, budget_s: float | None,
                 seed, prune_objective: bool):
        self.d = d
        self.iface = iface
        self.convex_required = convex_required
        idx = NetIndex(d)
        self.blocks = idx.inner
        self.n = len(self.blocks)
        pos = {b: k for k, b in enumerate(self.blocks)}
        self.net_src = [pos.get(s, -1) for s in idx.net_src]
        self.net_cons = [sum(1 << pos[c] for c in cs) for cs in idx.net_inner_consumers]
        self.net_ext = list(idx.net_ext)
        self.driver_mask = [0] * self.n
        self.nets_of = [0] * self.n  # bitmask of nets touching each block
        for n, src in enumerate(self.net_src):
            for k in range(self.n):
                if (self.net_cons[n] >> k) & 1:
                    self.nets_of[k] |= 1 << n
                    if src >= 0:
                        self.driver_mask[k] |= 1 << src
            if src >= 0:
                self.nets_of[src] |= 1 << n
        self._lb_cache: dict[tuple[int, int], bool] = {}
        self._convex_cache: dict[int, bool] = {}
        self.deadline = None if budget_s is None else time.perf_counter() + budget_s
        self.nodes = 0
        self.best = None  # (covered - bins, covered), i.e. fewest blocks left, then most covered
        self.best_bins: list[int] = []
        self.seed = seed  # achievable objective value; prunes strictly worse subtrees
        self.prune_objective = prune_objective

    def _bound_ok(self, mask: int, decided: int) -> bool:
        """Whether the lower bounds on the bin's in/out counts still fit."""
        key = (mask, decided)
        hit = self._lb_cache.get(key)
        if hit is not None:
            return hit
        dmask = (1 << decided) - 1
        nin = nout = 0
        nets = 0
        m = mask
        while m:
            low = m & -m
            nets |= self.nets_of[low.bit_length() - 1]
            m ^= low
        while nets:
            low = nets & -nets
            n = low.bit_length() - 1
            nets ^= low
            src = self.net_src[n]
            if src >= 0 and (mask >> src) & 1:
                if self.net_ext[n] or self.net_cons[n] & dmask & ~mask:
                    nout += 1
            elif self.net_cons[n] & mask:
                nin += 1
        ok = nin <= self.iface.i and nout <= self.iface.o
        self._lb_cache[key] = ok
        return ok

    def _convex(self, mask: int) -> bool:
        hit = self._convex_cache.get(mask)
        if hit is None:
            members = [self.blocks[k] for k in range(self.n) if (mask >> k) & 1]
            hit = self._convex_cache[mask] = is_convex(self.d, members)
        return hit

    def _parts(self, bins: list[int]) -> list[list[str]]:
        return [[self.blocks[k] for k in range(self.n) if (m >> k) & 1] for m in bins]

    def run(self) -> None:
        self._dfs(0, [], 0)

    def _dfs(self, k: int, bins: list[int], covered: int) -> None:
        self.nodes += 1
        if self.deadline is not None and not self.nodes & 0xFFF and time.perf_counter() > self.deadline:
            raise _Timeout
        nb = len(bins)
        if self.prune_objective:
            rest = self.n - k
            bound = (covered - nb + rest, covered + rest)
            if self.best is not None and bound <= self.best:
                return
            if self.seed is not None and bound < self.seed:
                return
        if k == self.n:
            for m in bins:
                if m & (m - 1) == 0:  # singleton bin
                    return
                if self.convex_required and not self._convex(m):
                    return
            if self.convex_required and len(bins) > 1 and not contracts_acyclic(self.d, self._parts(bins)):
                return
            if self.best is None or (covered - nb, covered) > self.best:
                self.best = (covered - nb, covered)
                self.best_bins = list(bins)
            return
        bit = 1 << k
        drivers = self.driver_mask[k]
        # choice 0: leave block k unassigned
        if self._others_ok(bins, -1, drivers, k + 1):
            self._dfs(k + 1, bins, covered)
        for j in range(nb + 1):
            if j == nb:
                bins.append(bit)
            else:
                bins[j] |= bit
            if self._bound_ok(bins[j], k + 1) and self._others_ok(bins, j, drivers, k + 1):
                self._dfs(k + 1, bins, covered + 1)
            if j == nb:
                bins.pop()
            else:
                bins[j] ^= bit

    def _others_ok(self, bins: list[int], skip: int, drivers: int, decided: int) -> bool:
        # bins feeding the block just placed elsewhere gain a definite output
        for j, m in enumerate(bins):
            if j != skip and m & drivers and not self._bound_ok(m, decided):
                return False
        return True


def exhaustive(
    d: Design,
    iface: ProgIface = ProgIface(),
    budget_s: float | None = 60.0,
    *,
    convex_required: bool = False,
    seed_result: PartitionResult | None = None,
    prune_objective: bool = False,
) -> PartitionResult:
    """Optimal partitioning; on timeout the best found so far is flagged non-optimal.

    ``seed_result`` (any valid result, e.g. from PareDown) tightens pruning when
    ``prune_objective`` is set, and is returned instead of a worse incumbent on
    timeout.
    """
    t0 = time.perf_counter()
    seed = None
    if seed_result is not None:
        seed = (seed_result.covered - seed_result.programmable, seed_result.covered)
    search = _Search(d, iface, convex_required, budget_s, seed, prune_objective)
    optimal = True
    try:
        search.run()
    except _Timeout:
        optimal = False
    parts = search._parts(search.best_bins)
    if not optimal and seed_result is not None and (search.best is None or search.best < seed):
        parts = [list(p) for p in seed_result.partitions]
    res = make_result(
        "exhaustive", iface, parts, search.blocks, elapsed_ms=(time.perf_counter() - t0) * 1000,
        optimal=optimal,
    )
    res.stats["nodes"] = search.nodes
    return res
