"""Seeded random designs and stimulus scripts for benchmarks and fuzzing."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .behavior import COMBINATIONAL, SEQUENTIAL, behavior_catalog
from .designio import Init, RunUntil, SetEvent, StimulusScript
from .netlist import BlockKind, Design, Edge

DEFAULT_TAGS = ("and2", "or2", "not", "lut2", "lut3", "toggle", "trip", "pulse", "delay")
SENSOR_TAGS = ("button", "motion", "light", "contact", "sound")
OUTPUT_TAGS = ("led", "beeper", "relay")
MAX_DURATION = 5


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class GenParams:
    seed: int
    n_inner: int
    n_sensors: int | None = None
    n_outputs: int | None = None
    weights: tuple[tuple[str, float], ...] | None = None
    name: str | None = None

    @property
    def sensors(self) -> int:
        return self.n_sensors if self.n_sensors is not None else max(2, self.n_inner // 3)

    @property
    def outputs(self) -> int:
        return self.n_outputs if self.n_outputs is not None else max(2, self.n_inner // 3)

    @property
    def kind_weights(self) -> dict[str, float]:
        if self.weights is None:
            return {t: 1.0 for t in DEFAULT_TAGS}
        return dict(self.weights)


def _random_param(rng: random.Random, tag: str) -> int | None:
    if tag == "lut2":
        return rng.randrange(16)
    if tag == "lut3":
        return rng.randrange(256)
    if tag in ("pulse", "delay"):
        return rng.randint(1, MAX_DURATION)
    return None


def generate_design(params: GenParams) -> Design:
    """Random valid design with exactly ``n_inner`` compute blocks.

    Inner blocks get a random order; every input picks uniformly among the
    sensors and the earlier inner blocks, so the result is acyclic by
    construction.  Inner outputs nobody reads are routed to output blocks.
    """
    if params.n_inner < 1:
        raise GeneratorError("n_inner must be at least 1")
    weights = params.kind_weights
    for tag, w in weights.items():
        if tag not in COMBINATIONAL and tag not in SEQUENTIAL:
            raise GeneratorError(f"unknown function tag {tag!r}")
        if w < 0:
            raise GeneratorError("weights must be non-negative")
    tags = sorted(t for t, w in weights.items() if w > 0)
    if not tags:
        raise GeneratorError("all kind weights are zero")
    if params.sensors < 1:
        raise GeneratorError("at least one sensor is needed to drive the first inner block")
    if params.outputs < 0:
        raise GeneratorError("n_outputs must be non-negative")

    rng = random.Random(params.seed)
    width = len(str(params.n_inner - 1))
    sw = len(str(params.sensors - 1))
    sensors = [f"s{k:0{sw}d}" for k in range(params.sensors)]
    inner = [f"b{k:0{width}d}" for k in range(params.n_inner)]
    rng.shuffle(inner)  # random strict order, decoupled from the ids

    blocks: dict[str, BlockKind] = {s: BlockKind.sensor(rng.choice(SENSOR_TAGS)) for s in sensors}
    edges: set[Edge] = set()
    consumed: set[str] = set()
    tag_weights = [weights[t] for t in tags]
    for pos, b in enumerate(inner):
        tag = rng.choices(tags, tag_weights)[0]
        kind = BlockKind.compute(tag, _random_param(rng, tag))
        blocks[b] = kind
        pool = sensors + inner[:pos]
        for port in range(behavior_catalog(kind.tag, kind.param).n_inputs):
            src = rng.choice(pool)
            consumed.add(src)
            edges.add(Edge(src, 0, b, port))

    dangling = [b for b in inner if b not in consumed]
    n_out = max(params.outputs, len(dangling))
    ow = len(str(max(n_out - 1, 0)))
    drivers = dangling + [rng.choice(inner) for _ in range(n_out - len(dangling))]
    for k, src in enumerate(drivers):
        o = f"o{k:0{ow}d}"
        blocks[o] = BlockKind.output(rng.choice(OUTPUT_TAGS))
        edges.add(Edge(src, 0, o, 0))

    name = params.name or f"rand_n{params.n_inner}_s{params.seed}"
    return Design(name, blocks, frozenset(edges))


def generate_stimulus(
    d: Design, seed: int, n_events: int = 12, horizon: int = 40
) -> StimulusScript:
    """Random sensor activity: random initial values, then random sets in time order."""
    rng = random.Random(seed)
    sensors = d.sensors
    directives: list = [Init(s, rng.random() < 0.5) for s in sensors]
    if sensors:
        times = sorted(rng.randint(1, horizon - MAX_DURATION) for _ in range(n_events))
        for t in times:
            directives.append(SetEvent(t, rng.choice(sensors), rng.random() < 0.5))
    directives.append(RunUntil(horizon))
    return StimulusScript(tuple(directives))
