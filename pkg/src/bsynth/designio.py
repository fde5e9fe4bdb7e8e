"""Text formats: ``.ebk`` designs and ``.stim`` stimulus scripts.

Design grammar (one directive per line, ``#`` starts a comment)::

    design <name>
    progdef <id>
      input <k> <block>.out<j>
      stmt <member> <level> <func>[:<param>] <arg>...
      output <k> v_<member>
    end
    block <id> sensor.<tag> | output.<tag> | compute.<func>[:<param>] | prog:<progdef-id>
    connect <block>.out<j> -> <block>.in<k>

LUT masks are hexadecimal (``lut2:b`` and ``lut2:0xB`` are the same mask);
pulse/delay durations are decimal or ``0x``-prefixed hex.

Stimulus grammar::

    init <sensor> <0|1>
    at <t> set <sensor> <0|1>
    run until <t>
    expect <t> <block>.out<k> == <0|1>
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .behavior import COMBINATIONAL, SEQUENTIAL, BehaviorError, behavior_catalog
from .netlist import (
    COMPUTE,
    OUTPUT,
    PROGRAMMABLE,
    SENSOR,
    BlockKind,
    Design,
    Edge,
    validate_design,
)
from .program import MergedProgram, Statement, validate_program

_ID = r"[A-Za-z0-9_]+"
_ID_RE = re.compile(_ID + r"\Z")
_NAME_RE = re.compile(r"[A-Za-z0-9_\-]+\Z")
_OUT_PORT_RE = re.compile(rf"({_ID})\.out(\d+)\Z")
_IN_PORT_RE = re.compile(rf"({_ID})\.in(\d+)\Z")
_LUT_TAGS = ("lut2", "lut3")


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.line = line
        self.col = col


class DesignValidationError(ValueError):
    def __init__(self, report):
        super().__init__("invalid design:\n" + str(report))
        self.report = report


def _tokens(line: str) -> list[tuple[str, int]]:
    """Split into (token, 1-based column), dropping comments."""
    out = []
    for m in re.finditer(r"\S+", line.split("#", 1)[0]):
        out.append((m.group(), m.start() + 1))
    return out


def _parse_int(text: str, lineno: int, col: int, *, hex_default: bool = False) -> int:
    try:
        if text.lower().startswith("0x"):
            return int(text, 16)
        return int(text, 16 if hex_default else 10)
    except ValueError:
        raise ParseError(f"bad integer {text!r}", lineno, col) from None


def _parse_func(text: str, lineno: int, col: int) -> tuple[str, int | None]:
    tag, _, param_text = text.partition(":")
    if tag not in COMBINATIONAL and tag not in SEQUENTIAL:
        raise ParseError(f"unknown block kind {tag!r}", lineno, col)
    param = None
    if param_text:
        param = _parse_int(param_text, lineno, col, hex_default=tag in _LUT_TAGS)
    try:
        behavior_catalog(tag, param)
    except BehaviorError as exc:
        raise ParseError(str(exc), lineno, col) from None
    return tag, param


def _format_func(tag: str, param: int | None) -> str:
    if param is None:
        return tag
    if tag in _LUT_TAGS:
        return f"{tag}:0x{param:X}"
    return f"{tag}:{param}"


def _expect_arity(toks, n: int, lineno: int, what: str) -> None:
    if len(toks) != n:
        col = toks[min(len(toks), n) - 1][1] if toks else 1
        raise ParseError(f"{what} takes {n - 1} operands, got {len(toks) - 1}", lineno, col)


def _ident(tok: tuple[str, int], lineno: int, regex=_ID_RE) -> str:
    if not regex.match(tok[0]):
        raise ParseError(f"bad identifier {tok[0]!r}", lineno, tok[1])
    return tok[0]


@dataclass
class _ProgBuilder:
    id: str
    line: int
    inputs: dict[int, tuple[str, int]] = field(default_factory=dict)
    outputs: dict[int, str] = field(default_factory=dict)
    statements: list[Statement] = field(default_factory=list)

    def build(self) -> MergedProgram:
        for what, table in (("input", self.inputs), ("output", self.outputs)):
            if sorted(table) != list(range(len(table))):
                raise ParseError(f"progdef {self.id}: {what} indices must be 0..n-1", self.line, 1)
        prog = MergedProgram(
            self.id,
            tuple(self.inputs[k] for k in range(len(self.inputs))),
            tuple(self.outputs[k] for k in range(len(self.outputs))),
            tuple(self.statements),
        )
        problems = validate_program(prog)
        if problems:
            raise ParseError(f"progdef {self.id}: " + "; ".join(problems), self.line, 1)
        return prog


def parse_design(text: str) -> Design:
    name = None
    blocks: dict[str, tuple[str, int, int]] = {}  # id -> (kind text, line, col)
    edges: list[tuple[Edge, int, int]] = []
    progs: dict[str, MergedProgram] = {}
    cur: _ProgBuilder | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        head, col = toks[0]
        if cur is not None:
            if head == "end":
                _expect_arity(toks, 1, lineno, "end")
                progs[cur.id] = cur.build()
                cur = None
            elif head == "input":
                _expect_arity(toks, 3, lineno, "input")
                k = _parse_int(toks[1][0], lineno, toks[1][1])
                m = _OUT_PORT_RE.match(toks[2][0])
                if not m:
                    raise ParseError(f"expected <block>.out<k>, got {toks[2][0]!r}", lineno, toks[2][1])
                if k in cur.inputs:
                    raise ParseError(f"duplicate input {k}", lineno, toks[1][1])
                cur.inputs[k] = (m.group(1), int(m.group(2)))
            elif head == "output":
                _expect_arity(toks, 3, lineno, "output")
                k = _parse_int(toks[1][0], lineno, toks[1][1])
                if not toks[2][0].startswith("v_"):
                    raise ParseError(f"expected v_<member>, got {toks[2][0]!r}", lineno, toks[2][1])
                if k in cur.outputs:
                    raise ParseError(f"duplicate output {k}", lineno, toks[1][1])
                cur.outputs[k] = toks[2][0][2:]
            elif head == "stmt":
                if len(toks) < 4:
                    raise ParseError("stmt needs member, level and function", lineno, col)
                member = _ident(toks[1], lineno)
                level = _parse_int(toks[2][0], lineno, toks[2][1])
                tag, param = _parse_func(toks[3][0], lineno, toks[3][1])
                args = tuple(t for t, _ in toks[4:])
                cur.statements.append(Statement(member, level, tag, param, args))
            else:
                raise ParseError(f"unexpected {head!r} inside progdef", lineno, col)
            continue

        if head == "design":
            _expect_arity(toks, 2, lineno, "design")
            if name is not None:
                raise ParseError("duplicate design header", lineno, col)
            name = _ident(toks[1], lineno, _NAME_RE)
            continue
        if name is None:
            raise ParseError("expected 'design <name>' header", lineno, col)
        if head == "block":
            _expect_arity(toks, 3, lineno, "block")
            bid = _ident(toks[1], lineno)
            if bid in blocks:
                raise ParseError(f"duplicate block id {bid!r}", lineno, toks[1][1])
            blocks[bid] = (toks[2][0], lineno, toks[2][1])
        elif head == "connect":
            _expect_arity(toks, 4, lineno, "connect")
            src = _OUT_PORT_RE.match(toks[1][0])
            if not src:
                raise ParseError(f"expected <block>.out<k>, got {toks[1][0]!r}", lineno, toks[1][1])
            if toks[2][0] != "->":
                raise ParseError(f"expected '->', got {toks[2][0]!r}", lineno, toks[2][1])
            dst = _IN_PORT_RE.match(toks[3][0])
            if not dst:
                raise ParseError(f"expected <block>.in<k>, got {toks[3][0]!r}", lineno, toks[3][1])
            e = Edge(src.group(1), int(src.group(2)), dst.group(1), int(dst.group(2)))
            edges.append((e, lineno, col))
        elif head == "progdef":
            _expect_arity(toks, 2, lineno, "progdef")
            pid = _ident(toks[1], lineno)
            if pid in progs:
                raise ParseError(f"duplicate progdef {pid!r}", lineno, toks[1][1])
            cur = _ProgBuilder(pid, lineno)
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, col)

    if cur is not None:
        raise ParseError(f"progdef {cur.id} not closed with 'end'", cur.line, 1)
    if name is None:
        raise ParseError("missing 'design <name>' header", 1, 1)

    kinds = {bid: _parse_kind(text_, ln, c, progs) for bid, (text_, ln, c) in blocks.items()}
    for e, ln, c in edges:
        for blk, port, side in ((e.src, e.src_port, "out"), (e.dst, e.dst_port, "in")):
            if blk not in kinds:
                raise ParseError(f"unknown block {blk!r}", ln, c)
            n = kinds[blk].n_outputs if side == "out" else kinds[blk].n_inputs
            if port >= n:
                raise ParseError(f"bad port index {blk}.{side}{port} ({blk} has {n})", ln, c)
    design = Design(name, kinds, frozenset(e for e, _, _ in edges))
    report = validate_design(design)
    if not report.ok:
        raise DesignValidationError(report)
    return design


def _parse_kind(text: str, lineno: int, col: int, progs: dict[str, MergedProgram]) -> BlockKind:
    if text.startswith("prog:"):
        pid = text[5:]
        if pid not in progs:
            raise ParseError(f"unknown progdef {pid!r}", lineno, col)
        return BlockKind.programmable(progs[pid])
    cls, dot, rest = text.partition(".")
    if not dot or not rest:
        raise ParseError(f"unknown block kind {text!r}", lineno, col)
    if cls == SENSOR:
        return BlockKind.sensor(rest)
    if cls == OUTPUT:
        return BlockKind.output(rest)
    if cls == COMPUTE:
        tag, param = _parse_func(rest, lineno, col)
        return BlockKind(COMPUTE, tag, param)
    raise ParseError(f"unknown block kind {text!r}", lineno, col)


def _format_kind(kind: BlockKind) -> str:
    if kind.cls == PROGRAMMABLE:
        return f"prog:{kind.program.id}"
    if kind.cls == COMPUTE:
        return "compute." + _format_func(kind.tag, kind.param)
    return f"{kind.cls}.{kind.tag}"


def serialize_program(prog: MergedProgram) -> list[str]:
    lines = [f"progdef {prog.id}"]
    for k, (blk, port) in enumerate(prog.input_sources):
        lines.append(f"  input {k} {blk}.out{port}")
    for st in prog.statements:
        args = " ".join(st.args)
        lines.append(f"  stmt {st.member} {st.level} {_format_func(st.tag, st.param)} {args}".rstrip())
    for k, member in enumerate(prog.outputs):
        lines.append(f"  output {k} v_{member}")
    lines.append("end")
    return lines


def serialize_design(d: Design) -> str:
    lines = [f"design {d.name}"]
    progs = {k.program.id: k.program for k in d.blocks.values() if k.cls == PROGRAMMABLE}
    for pid in sorted(progs):
        lines.extend(serialize_program(progs[pid]))
    for bid in sorted(d.blocks):
        lines.append(f"block {bid} {_format_kind(d.blocks[bid])}")
    for e in sorted(d.edges, key=lambda e: (e.src, e.dst, e.src_port, e.dst_port)):
        lines.append(f"connect {e}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# stimulus scripts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Init:
    sensor: str
    value: bool


@dataclass(frozen=True)
class SetEvent:
    time: int
    sensor: str
    value: bool


@dataclass(frozen=True)
class RunUntil:
    time: int


@dataclass(frozen=True)
class Expect:
    time: int
    block: str
    port: int
    value: bool

    def __str__(self) -> str:
        return f"expect {self.time} {self.block}.out{self.port} == {int(self.value)}"


@dataclass(frozen=True)
class StimulusScript:
    directives: tuple = ()

    @property
    def inits(self) -> dict[str, bool]:
        return {d.sensor: d.value for d in self.directives if isinstance(d, Init)}

    @property
    def events(self) -> list[SetEvent]:
        return [d for d in self.directives if isinstance(d, SetEvent)]

    @property
    def expects(self) -> list[Expect]:
        return [d for d in self.directives if isinstance(d, Expect)]

    @property
    def horizon(self) -> int:
        runs = [d.time for d in self.directives if isinstance(d, RunUntil)]
        if runs:
            return runs[-1]
        return max([e.time for e in self.events] + [x.time for x in self.expects] + [0])


class StimulusError(ValueError):
    pass


def check_stimulus(script: StimulusScript) -> None:
    last: dict[str, int] = {}
    for ev in script.events:
        if ev.time < 0:
            raise StimulusError(f"negative time {ev.time}")
        if ev.time < last.get(ev.sensor, 0):
            raise StimulusError(
                f"decreasing time for sensor {ev.sensor}: {ev.time} after {last[ev.sensor]}"
            )
        last[ev.sensor] = ev.time
    if script.events and script.horizon < max(e.time for e in script.events):
        raise StimulusError(f"horizon {script.horizon} before last event")


def _bit(tok: tuple[str, int], lineno: int) -> bool:
    if tok[0] not in ("0", "1"):
        raise ParseError(f"expected 0 or 1, got {tok[0]!r}", lineno, tok[1])
    return tok[0] == "1"


def _time(tok: tuple[str, int], lineno: int) -> int:
    if not tok[0].isdigit():
        raise ParseError(f"expected non-negative integer time, got {tok[0]!r}", lineno, tok[1])
    return int(tok[0])


def parse_stimulus(text: str) -> StimulusScript:
    out = []
    last: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        head, col = toks[0]
        if head == "init":
            _expect_arity(toks, 3, lineno, "init")
            out.append(Init(_ident(toks[1], lineno), _bit(toks[2], lineno)))
        elif head == "at":
            _expect_arity(toks, 5, lineno, "at")
            if toks[2][0] != "set":
                raise ParseError(f"expected 'set', got {toks[2][0]!r}", lineno, toks[2][1])
            t = _time(toks[1], lineno)
            sensor = _ident(toks[3], lineno)
            if t < last.get(sensor, 0):
                raise ParseError(f"decreasing time for sensor {sensor}", lineno, toks[1][1])
            last[sensor] = t
            out.append(SetEvent(t, sensor, _bit(toks[4], lineno)))
        elif head == "run":
            _expect_arity(toks, 3, lineno, "run")
            if toks[1][0] != "until":
                raise ParseError(f"expected 'until', got {toks[1][0]!r}", lineno, toks[1][1])
            out.append(RunUntil(_time(toks[2], lineno)))
        elif head == "expect":
            _expect_arity(toks, 5, lineno, "expect")
            m = _OUT_PORT_RE.match(toks[2][0])
            if not m:
                raise ParseError(f"expected <block>.out<k>, got {toks[2][0]!r}", lineno, toks[2][1])
            if toks[3][0] != "==":
                raise ParseError(f"expected '==', got {toks[3][0]!r}", lineno, toks[3][1])
            out.append(Expect(_time(toks[1], lineno), m.group(1), int(m.group(2)), _bit(toks[4], lineno)))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, col)
    script = StimulusScript(tuple(out))
    try:
        check_stimulus(script)
    except StimulusError as exc:
        raise ParseError(str(exc), 1, 1) from None
    return script


def serialize_stimulus(script: StimulusScript) -> str:
    lines = []
    for d in script.directives:
        if isinstance(d, Init):
            lines.append(f"init {d.sensor} {int(d.value)}")
        elif isinstance(d, SetEvent):
            lines.append(f"at {d.time} set {d.sensor} {int(d.value)}")
        elif isinstance(d, RunUntil):
            lines.append(f"run until {d.time}")
        else:
            lines.append(str(d))
    return "\n".join(lines) + "\n"


def load_design(path) -> Design:
    with open(path, encoding="utf-8") as f:
        return parse_design(f.read())


def load_stimulus(path) -> StimulusScript:
    with open(path, encoding="utf-8") as f:
        return parse_stimulus(f.read())
