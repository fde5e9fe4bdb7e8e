"""Merging partitions into programs, rewriting designs, and emitting C.

A partition's member behaviors are concatenated in (level, id) order.  Reads
of a member's input become either a program input ``x<k>`` (the driver is
outside the partition) or the variable ``v_<driver>`` assigned by an earlier
statement.  Input indices follow the sorted external driver ports; output
indices follow the sorted exported member ids.

The emitted C targets this ABI:

    extern unsigned char input[], output[];
    void set_timer(unsigned id, unsigned ticks);   /* queue a timer */
    void cancel_timer(unsigned id);                /* drop pending timers */
    void on_init(void);                            /* once, at power-up */
    void on_wake(void);                            /* on any input change */
    void on_timer(unsigned id);                    /* on timer expiry */
"""

from __future__ import annotations

from .netlist import COMPUTE, BlockKind, Design, Edge, compute_levels, inner_blocks
from .partition.core import PartitionResult, ProgIface, contracts_acyclic, is_convex, partition_io
from .program import MergedProgram, Statement, parse_arg, state_name, var_name


class CodegenError(ValueError):
    pass


def merge_partition(
    d: Design,
    p,
    levels: dict[str, int] | None = None,
    *,
    prog_id: str = "P1",
    iface: ProgIface | None = None,
) -> MergedProgram:
    members = frozenset(p)
    levels = levels if levels is not None else compute_levels(d)
    for m in sorted(members):
        kind = d.blocks.get(m)
        if kind is None or kind.cls != COMPUTE:
            raise CodegenError(f"{m!r} is not a pre-defined compute block")
    if not is_convex(d, members):
        raise CodegenError(
            "partition " + ",".join(sorted(members)) + " is not convex: a path leaves and "
            "re-enters it, so merged code would read stale values"
        )
    if iface is not None and not partition_io(d, members).fits(iface):
        raise CodegenError(f"partition {sorted(members)} does not fit {iface}")

    sources = sorted(
        {(e.src, e.src_port) for m in members for e in d.fanin.get(m, ()) if e.src not in members}
    )
    in_index = {src: k for k, src in enumerate(sources)}
    exported = sorted(
        {m for m in members for e in d.fanout.get(m, ()) if e.dst not in members}
    )
    statements = []
    for m in sorted(members, key=lambda b: (levels[b], b)):
        kind = d.blocks[m]
        args = []
        for e in d.fanin.get(m, ()):
            if e.src in members:
                args.append(var_name(e.src))
            else:
                args.append(f"x{in_index[(e.src, e.src_port)]}")
        statements.append(Statement(m, levels[m], kind.tag, kind.param, tuple(args)))
    return MergedProgram(prog_id, tuple(sources), tuple(exported), tuple(statements))


def _fresh_ids(d: Design, count: int) -> list[str]:
    out = []
    k = 1
    while len(out) < count:
        name = f"P{k}"
        while name in d.blocks:
            name += "_"
        out.append(name)
        k += 1
    return out


def rewrite_design(
    d: Design, result: PartitionResult, programs: list[MergedProgram] | None = None
) -> Design:
    """Replace every partition with one programmable block."""
    if not result.partitions:
        return d
    levels = compute_levels(d)
    if programs is None:
        ids = _fresh_ids(d, len(result.partitions))
        programs = [
            merge_partition(d, part, levels, prog_id=pid)
            for part, pid in zip(result.partitions, ids)
        ]
    if len(programs) != len(result.partitions):
        raise CodegenError("need exactly one program per partition")
    owner: dict[str, int] = {}
    for k, part in enumerate(result.partitions):
        if not is_convex(d, part):
            raise CodegenError(f"partition {list(part)} is not convex; rewriting would create a cycle")
        for m in part:
            owner[m] = k
    if not contracts_acyclic(d, result.partitions):
        raise CodegenError("partitions feed each other in a loop; rewriting would create a cycle")
    # original member output port -> new programmable output port
    remap: dict[tuple[str, int], tuple[str, int]] = {}
    for k, prog in enumerate(programs):
        for j, m in enumerate(prog.outputs):
            remap[(m, 0)] = (prog.id, j)

    blocks = {b: kind for b, kind in d.blocks.items() if b not in owner}
    for prog in programs:
        if prog.id in blocks:
            raise CodegenError(f"block id {prog.id!r} already in use")
        blocks[prog.id] = BlockKind.programmable(prog)
    edges = set()
    for e in d.edges:
        if e.src in owner and e.dst in owner and owner[e.src] == owner[e.dst]:
            continue  # internal to a partition
        if e.dst in owner:
            continue  # re-added below from the program's input map
        src, sport = remap.get((e.src, e.src_port), (e.src, e.src_port))
        edges.add(Edge(src, sport, e.dst, e.dst_port))
    for prog in programs:
        for j, (src, sport) in enumerate(prog.input_sources):
            src, sport = remap.get((src, sport), (src, sport))
            edges.add(Edge(src, sport, prog.id, j))
    return Design(d.name, blocks, frozenset(edges))


def synthesize(d: Design, result: PartitionResult) -> tuple[Design, list[MergedProgram]]:
    rewritten = rewrite_design(d, result)
    programs = [rewritten.blocks[b].program for b in sorted(inner_blocks(rewritten))
                if rewritten.blocks[b].program is not None]
    return rewritten, programs


# ---------------------------------------------------------------------------
# C emission
# ---------------------------------------------------------------------------

def _c_arg(arg: str) -> str:
    kind, ref = parse_arg(arg)
    return f"input[{ref}]" if kind == "input" else var_name(ref)


def _comb_expr(st: Statement, a: list[str]) -> str:
    if st.tag == "and2":
        return f"{a[0]} && {a[1]}"
    if st.tag == "or2":
        return f"{a[0]} || {a[1]}"
    if st.tag == "not":
        return f"!{a[0]}"
    index = " | ".join(x if k == 0 else f"({x} << {k})" for k, x in enumerate(a))
    return f"(0x{st.param:X} >> ({index})) & 1"


def _latch(st: Statement, k: int) -> str:
    return f"l_{st.member}_{k}"


def _timer_ids(prog: MergedProgram) -> dict[str, list[int]]:
    ids: dict[str, list[int]] = {}
    nxt = 0
    for st in prog.statements:
        if st.tag == "pulse":
            ids[st.member] = [nxt]
            nxt += 1
        elif st.tag == "delay":
            ids[st.member] = [nxt, nxt + 1]  # effect "set 0", effect "set 1"
            nxt += 2
    return ids


def _seq_body(st: Statement, a: list[str], timers: list[int]) -> list[str]:
    s = state_name(st.member)
    l0 = _latch(st, 0)
    rise0 = f"{a[0]} && !{l0}"
    if st.tag == "toggle":
        lines = [f"if ({rise0}) {s} = !{s};"]
    elif st.tag == "trip":
        l1 = _latch(st, 1)
        lines = [f"if ({a[1]} && !{l1}) {s} = 0;", f"else if ({rise0}) {s} = 1;"]
    elif st.tag == "pulse":
        t = timers[0]
        if st.param == 0:
            lines = [f"if ({rise0}) {{ {s} = 0; cancel_timer({t}); }}"]
        else:
            lines = [f"if ({rise0}) {{ {s} = 1; cancel_timer({t}); set_timer({t}, {st.param}); }}"]
    else:  # delay
        if st.param == 0:
            lines = [f"if ({a[0]} != {l0}) {s} = {a[0]};"]
        else:
            lines = [f"if ({a[0]} != {l0}) set_timer({a[0]} ? {timers[1]} : {timers[0]}, {st.param});"]
    lines += [f"{_latch(st, k)} = {x};" for k, x in enumerate(a)]
    lines.append(f"{var_name(st.member)} = {s};")
    return lines


def emit_c(prog: MergedProgram, design_name: str | None = None) -> str:
    timers = _timer_ids(prog)
    title = f"{design_name}/{prog.id}" if design_name else prog.id
    out = [
        f"/* program {title}: {prog.n_inputs} inputs, {prog.n_outputs} outputs */",
    ]
    for k, (src, port) in enumerate(prog.input_sources):
        out.append(f"/* input[{k}] <- {src}.out{port} */")
    for k, m in enumerate(prog.outputs):
        out.append(f"/* output[{k}] <- {m} */")
    out += [
        "",
        f"extern unsigned char input[{max(prog.n_inputs, 1)}];",
        f"extern unsigned char output[{max(prog.n_outputs, 1)}];",
        "extern void set_timer(unsigned id, unsigned ticks);",
        "extern void cancel_timer(unsigned id);",
        "",
    ]
    for st in prog.statements:
        out.append(f"static unsigned char {st.target};")
    for st in prog.statements:
        if st.state_slot:
            out.append(f"static unsigned char {st.state_slot} = 0;")
            for k in range(len(st.args)):
                out.append(f"static unsigned char {_latch(st, k)} = 0;")

    def body(init: bool) -> list[str]:
        lines = []
        for st in prog.statements:
            a = [_c_arg(x) for x in st.args]
            if not st.state_slot:
                lines.append(f"{st.target} = {_comb_expr(st, a)};")
            elif init:
                lines += [f"{_latch(st, k)} = {x};" for k, x in enumerate(a)]
                lines.append(f"{st.target} = {st.state_slot};")
            else:
                lines += _seq_body(st, a, timers.get(st.member, []))
        lines += [f"output[{k}] = {var_name(m)};" for k, m in enumerate(prog.outputs)]
        return ["    " + x for x in lines]

    out += ["", "void on_init(void)", "{"] + body(True) + ["}"]
    out += ["", "void on_wake(void)", "{"] + body(False) + ["}"]
    out += ["", "void on_timer(unsigned id)", "{", "    switch (id) {"]
    for st in prog.statements:
        ids = timers.get(st.member)
        if not ids:
            continue
        if st.tag == "pulse":
            out.append(f"    case {ids[0]}: {st.state_slot} = 0; break;")
        else:
            out.append(f"    case {ids[0]}: {st.state_slot} = 0; break;")
            out.append(f"    case {ids[1]}: {st.state_slot} = 1; break;")
    out += ["    default: return;", "    }", "    on_wake();", "}"]
    return "\n".join(out) + "\n"


def c_filename(design_name: str, prog: MergedProgram) -> str:
    return f"{design_name}_{prog.id}.c"
