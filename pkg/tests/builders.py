"""Small hand-shaped designs shared by several test modules."""

from __future__ import annotations

from bsynth.designio import parse_design
from bsynth.netlist import BlockKind, Design, Edge

# s1 fans out to b0 and b2, which reconverge at b1; b3 is unrelated
CONVERGENT = """\
design convergent
block b0 compute.not
block b1 compute.or2
block b2 compute.and2
block b3 compute.not
block o0 output.relay
block o1 output.beeper
block s0 sensor.light
block s1 sensor.sound
connect b0.out0 -> b1.in0
connect b1.out0 -> o1.in0
connect b2.out0 -> b1.in1
connect b3.out0 -> o0.in0
connect s0.out0 -> b3.in0
connect s1.out0 -> b0.in0
connect s1.out0 -> b2.in0
connect s1.out0 -> b2.in1
"""


def convergent() -> Design:
    return parse_design(CONVERGENT)


def chain(n: int, tag: str = "not") -> Design:
    """s -> b0 -> b1 -> ... -> z"""
    blocks = {"s": BlockKind.sensor(), "z": BlockKind.output()}
    edges = []
    prev = "s"
    for k in range(n):
        b = f"b{k}"
        blocks[b] = BlockKind.compute(tag)
        edges.append(Edge(prev, 0, b, 0))
        prev = b
    edges.append(Edge(prev, 0, "z", 0))
    return Design(f"chain{n}", blocks, frozenset(edges))


def parallel_lut3(n: int) -> Design:
    """n independent lut3 blocks, each reading two private sensors (one twice).

    Every block fits alone (2 in, 1 out) but no two fit together, so every
    PareDown candidate is pared all the way down to a single block.
    """
    blocks: dict[str, BlockKind] = {}
    edges = []
    w = len(str(n))
    for k in range(n):
        b, p, q, z = f"b{k:0{w}d}", f"p{k:0{w}d}", f"q{k:0{w}d}", f"z{k:0{w}d}"
        blocks.update({b: BlockKind.compute("lut3", 0x96), p: BlockKind.sensor(), q: BlockKind.sensor(),
                       z: BlockKind.output()})
        edges += [Edge(p, 0, b, 0), Edge(q, 0, b, 1), Edge(p, 0, b, 2), Edge(b, 0, z, 0)]
    return Design(f"parallel_lut3_{n}", blocks, frozenset(edges))
