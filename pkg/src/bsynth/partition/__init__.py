"""Partitioning inner blocks onto i/o-limited programmable blocks."""

from .aggregate import aggregate
from .core import (
    PartitionError,
    PartitionIO,
    PartitionResult,
    ProgIface,
    RankValue,
    border_blocks,
    check_result,
    contracts_acyclic,
    is_convex,
    partition_fits,
    partition_io,
    rank_block,
)
from .exhaustive import exhaustive
from .paredown import STRICT, RESILIENT, PareStep, paredown

ALGORITHMS = ("paredown", "exhaustive", "aggregate")


def run_algorithm(name, d, iface, *, convex_required=False, mode=RESILIENT, budget_s=60.0):
    if name == "paredown":
        return paredown(d, iface, mode, convex_required=convex_required)
    if name == "exhaustive":
        return exhaustive(d, iface, budget_s, convex_required=convex_required)
    if name == "aggregate":
        return aggregate(d, iface, convex_required=convex_required)
    raise ValueError(f"unknown algorithm {name!r}")
