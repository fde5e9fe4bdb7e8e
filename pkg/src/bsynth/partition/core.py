"""Partition bookkeeping shared by all partitioning algorithms.

Partition in/out counts are taken over nets (distinct driving output ports),
not edges: one external port feeding two members is one input pin, and one
member port feeding two outside consumers is one output pin.

The module-level functions count directly from the design and serve as the
reference.  ``NetIndex``/``Candidate`` maintain the same quantities
incrementally for the algorithms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from ..netlist import Design, compute_levels, inner_blocks


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class ProgIface:
    i: int = 2
    o: int = 2

    def __post_init__(self):
        if self.i < 1 or self.o < 1:
            raise ValueError(f"programmable block needs i >= 1 and o >= 1, got {self.i}/{self.o}")


@dataclass(frozen=True)
class PartitionIO:
    indegree: int
    outdegree: int

    @property
    def total(self) -> int:
        return self.indegree + self.outdegree

    def fits(self, iface: ProgIface) -> bool:
        return self.indegree <= iface.i and self.outdegree <= iface.o


def _check_members(d: Design, p: Iterable[str]) -> frozenset[str]:
    p = frozenset(p)
    for b in p:
        kind = d.blocks.get(b)
        if kind is None:
            raise PartitionError(f"block {b!r} not in design {d.name!r}")
        if not kind.is_inner:
            raise PartitionError(f"block {b!r} is a {kind.cls} block, not an inner block")
    return p


def partition_io(d: Design, p: Iterable[str]) -> PartitionIO:
    p = _check_members(d, p)
    ins = set()
    outs = set()
    for e in d.edges:
        if e.dst in p and e.src not in p:
            ins.add((e.src, e.src_port))
        elif e.src in p and e.dst not in p:
            outs.add((e.src, e.src_port))
    return PartitionIO(len(ins), len(outs))


def is_convex(d: Design, p: Iterable[str]) -> bool:
    """False when some path leaves the partition and comes back into it."""
    p = _check_members(d, p)
    # blocks reachable from p through at least one non-member
    frontier = [e.dst for b in p for e in d.fanout.get(b, ()) if e.dst not in p]
    seen = set(frontier)
    while frontier:
        b = frontier.pop()
        for e in d.fanout.get(b, ()):
            if e.dst in p:
                return False
            if e.dst not in seen:
                seen.add(e.dst)
                frontier.append(e.dst)
    return True


def contracts_acyclic(d: Design, partitions: Iterable[Iterable[str]]) -> bool:
    """Whether replacing every partition by one block leaves the design acyclic.

    For a single partition this is exactly convexity; for several it also
    rules out two individually convex partitions feeding each other.
    """
    owner: dict[str, int] = {}
    for k, part in enumerate(partitions):
        for b in part:
            owner[b] = k
    node = lambda b: ("p", owner[b]) if b in owner else ("b", b)
    succ: dict[tuple, set] = {}
    indeg: dict[tuple, int] = {node(b): 0 for b in d.blocks}
    for e in d.edges:
        u, v = node(e.src), node(e.dst)
        if u != v and v not in succ.setdefault(u, set()):
            succ[u].add(v)
            indeg[v] += 1
    ready = [x for x, n in indeg.items() if n == 0]
    done = 0
    while ready:
        x = ready.pop()
        done += 1
        for y in succ.get(x, ()):
            indeg[y] -= 1
            if indeg[y] == 0:
                ready.append(y)
    return done == len(indeg)


def partition_fits(
    d: Design, p: Iterable[str], iface: ProgIface, convex_required: bool = False
) -> bool:
    p = frozenset(p)
    if not partition_io(d, p).fits(iface):
        return False
    return is_convex(d, p) if convex_required else True


def border_blocks(d: Design, p: Iterable[str]) -> set[str]:
    p = _check_members(d, p)
    out = set()
    for b in p:
        all_out = all(e.dst not in p for e in d.fanout.get(b, ()))
        all_in = all(e.src not in p for e in d.fanin.get(b, ()))
        if all_out or all_in:
            out.add(b)
    return out


@dataclass(frozen=True)
class RankValue:
    rank: int
    indegree: int
    outdegree: int
    level: int
    block: str

    @property
    def sort_key(self) -> tuple:
        """Smallest key is removed first."""
        return (self.rank, -self.indegree, -self.outdegree, -self.level, self.block)


def rank_block(d: Design, p: Iterable[str], b: str, levels: dict[str, int] | None = None) -> RankValue:
    """Change in combined in+out count of ``p`` when ``b`` is removed.

    The tie-break degrees are the block's own edge counts in the design.
    """
    p = frozenset(p)
    if b not in border_blocks(d, p):
        raise PartitionError(f"{b!r} is not a border block of the partition")
    levels = levels if levels is not None else compute_levels(d)
    rank = partition_io(d, p - {b}).total - partition_io(d, p).total
    return RankValue(rank, len(d.fanin.get(b, ())), len(d.fanout.get(b, ())), levels[b], b)


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass
class PartitionResult:
    algorithm: str
    iface: ProgIface
    partitions: list[tuple[str, ...]]
    unassigned: tuple[str, ...]
    elapsed_ms: float = 0.0
    optimal: bool = True
    stats: dict = field(default_factory=dict)

    @property
    def covered(self) -> int:
        return sum(len(p) for p in self.partitions)

    @property
    def programmable(self) -> int:
        return len(self.partitions)

    @property
    def total_inner_after(self) -> int:
        return len(self.unassigned) + len(self.partitions)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "iface": {"i": self.iface.i, "o": self.iface.o},
            "partitions": [list(p) for p in self.partitions],
            "unassigned": list(self.unassigned),
            "covered": self.covered,
            "programmable": self.programmable,
            "total_inner_after": self.total_inner_after,
            "elapsed_ms": self.elapsed_ms,
            "optimal": self.optimal,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> PartitionResult:
        return cls(
            data["algorithm"],
            ProgIface(data["iface"]["i"], data["iface"]["o"]),
            [tuple(p) for p in data["partitions"]],
            tuple(data["unassigned"]),
            data["elapsed_ms"],
            data["optimal"],
        )


def make_result(algorithm, iface, partitions, inner, **kw) -> PartitionResult:
    parts = [tuple(sorted(p)) for p in partitions]
    covered = {b for p in parts for b in p}
    return PartitionResult(
        algorithm, iface, parts, tuple(sorted(set(inner) - covered)), **kw
    )


def check_result(d: Design, res: PartitionResult, convex_required: bool = False) -> list[str]:
    """Problems with a result; empty when every result invariant holds."""
    problems = []
    inner = inner_blocks(d)
    seen: set[str] = set()
    for part in res.partitions:
        if len(part) < 2:
            problems.append(f"partition {part} has fewer than 2 members")
        if seen & set(part):
            problems.append(f"partition {part} overlaps another")
        seen |= set(part)
        if not set(part) <= inner:
            problems.append(f"partition {part} contains non-inner blocks")
        elif not partition_fits(d, part, res.iface, convex_required):
            problems.append(f"partition {part} does not fit {res.iface}")
    if convex_required and not contracts_acyclic(d, res.partitions):
        problems.append("replacing the partitions would create a cycle")
    if seen & set(res.unassigned):
        problems.append("unassigned blocks also appear in partitions")
    if seen | set(res.unassigned) != inner:
        problems.append("partitions and unassigned do not cover the inner blocks exactly")
    return problems


# ---------------------------------------------------------------------------
# incremental machinery
# ---------------------------------------------------------------------------

class NetIndex:
    """Per-net view of a design restricted to what partitioning needs."""

    def __init__(self, d: Design, levels: dict[str, int] | None = None):
        self.design = d
        self.levels = levels if levels is not None else compute_levels(d)
        self.inner = sorted(inner_blocks(d), key=lambda b: (self.levels[b], b))
        inner = set(self.inner)
        self.net_src: list[str] = []
        self.net_inner_consumers: list[tuple[str, ...]] = []
        self.net_ext: list[bool] = []  # consumed by some non-inner block
        ids: dict[tuple[str, int], int] = {}
        cons: dict[int, set[str]] = {}
        for e in sorted(d.edges):
            if e.src not in inner and e.dst not in inner:
                continue
            key = (e.src, e.src_port)
            if key not in ids:
                ids[key] = len(self.net_src)
                self.net_src.append(e.src)
                self.net_ext.append(False)
                cons[ids[key]] = set()
            n = ids[key]
            if e.dst in inner:
                cons[n].add(e.dst)
            else:
                self.net_ext[n] = True
        self.net_inner_consumers = [tuple(sorted(cons[n])) for n in range(len(self.net_src))]
        self.in_nets: dict[str, list[int]] = {b: [] for b in self.inner}
        self.out_nets: dict[str, list[int]] = {b: [] for b in self.inner}
        for n, src in enumerate(self.net_src):
            if src in inner:
                self.out_nets[src].append(n)
            for c in self.net_inner_consumers[n]:
                self.in_nets[c].append(n)
        self.own_in = {b: len(d.fanin.get(b, ())) for b in self.inner}
        self.own_out = {b: len(d.fanout.get(b, ())) for b in self.inner}
        # blocks whose rank may change when a given block changes membership
        self.touching: dict[str, set[str]] = {}
        for b in self.inner:
            t = set()
            for n in self.in_nets[b] + self.out_nets[b]:
                t.add(self.net_src[n])
                t.update(self.net_inner_consumers[n])
            self.touching[b] = t & inner


class Candidate:
    """A mutable candidate partition with incrementally maintained counts."""

    def __init__(self, idx: NetIndex, members: Iterable[str]):
        self.idx = idx
        self.members = set(members)
        self.member_cons = [
            sum(1 for c in cs if c in self.members) for cs in idx.net_inner_consumers
        ]
        self.indegree = 0
        self.outdegree = 0
        for n in range(len(idx.net_src)):
            cin, cout = self._status(n, self.idx.net_src[n] in self.members, self.member_cons[n])
            self.indegree += cin
            self.outdegree += cout
        # members among a block's consumers / drivers, for the border test
        self.inside_cons = {b: 0 for b in self.members}
        self.inside_drv = {b: 0 for b in self.members}
        for b in self.members:
            for n in idx.out_nets[b]:
                self.inside_cons[b] += sum(1 for c in idx.net_inner_consumers[n] if c in self.members)
            for n in idx.in_nets[b]:
                if idx.net_src[n] in self.members:
                    self.inside_drv[b] += 1

    def _status(self, n: int, src_member: bool, mc: int) -> tuple[int, int]:
        if src_member:
            outside = self.idx.net_ext[n] or mc < len(self.idx.net_inner_consumers[n])
            return 0, int(outside)
        return int(mc > 0), 0

    def io(self) -> PartitionIO:
        return PartitionIO(self.indegree, self.outdegree)

    def fits(self, iface: ProgIface) -> bool:
        return self.indegree <= iface.i and self.outdegree <= iface.o

    def is_border(self, b: str) -> bool:
        return self.inside_cons[b] == 0 or self.inside_drv[b] == 0

    def border(self) -> list[str]:
        return sorted(b for b in self.members if self.is_border(b))

    def removal_delta(self, b: str) -> tuple[int, int]:
        """(d_in, d_out) if ``b`` were removed."""
        idx = self.idx
        d_in = d_out = 0
        for n in idx.in_nets[b]:
            src_m = idx.net_src[n] in self.members
            mc = self.member_cons[n]
            o_in, o_out = self._status(n, src_m, mc)
            n_in, n_out = self._status(n, src_m, mc - 1)
            d_in += n_in - o_in
            d_out += n_out - o_out
        for n in idx.out_nets[b]:
            mc = self.member_cons[n]
            o_in, o_out = self._status(n, True, mc)
            n_in, n_out = self._status(n, False, mc)
            d_in += n_in - o_in
            d_out += n_out - o_out
        return d_in, d_out

    def rank(self, b: str) -> RankValue:
        d_in, d_out = self.removal_delta(b)
        idx = self.idx
        return RankValue(d_in + d_out, idx.own_in[b], idx.own_out[b], idx.levels[b], b)

    def remove(self, b: str) -> None:
        idx = self.idx
        d_in, d_out = self.removal_delta(b)
        self.indegree += d_in
        self.outdegree += d_out
        self.members.discard(b)
        for n in idx.in_nets[b]:
            self.member_cons[n] -= 1
            src = idx.net_src[n]
            if src in self.members:
                self.inside_cons[src] -= 1
        for n in idx.out_nets[b]:
            for c in idx.net_inner_consumers[n]:
                if c in self.members:
                    self.inside_drv[c] -= 1
        del self.inside_cons[b]
        del self.inside_drv[b]
