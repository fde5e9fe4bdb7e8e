"""Command-line entry point: ``bsynth <command> ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench
from .codegen import CodegenError, c_filename, emit_c, synthesize
from .designio import (
    DesignValidationError,
    ParseError,
    StimulusError,
    load_design,
    load_stimulus,
    serialize_design,
)
from .netlist import inner_blocks, validate_design
from .partition import ALGORITHMS, STRICT, RESILIENT, PartitionError, ProgIface, run_algorithm
from .partition.core import check_result
from .randgen import GeneratorError, GenParams, generate_design
from .simulator import SimulationError, check_expectations, output_trace, run_simulation


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _iface(args) -> ProgIface:
    return ProgIface(args.inputs, args.outputs)


def _partition_opts(p: argparse.ArgumentParser, algo_default: str = "paredown") -> None:
    p.add_argument("--algo", choices=ALGORITHMS, default=algo_default)
    p.add_argument("--inputs", "-i", type=int, default=2, help="programmable block inputs (default 2)")
    p.add_argument("--outputs", "-o", type=int, default=2, help="programmable block outputs (default 2)")
    p.add_argument("--convex", action="store_true", help="only accept convex partitions")
    p.add_argument("--mode", choices=(RESILIENT, STRICT), default=RESILIENT,
                   help="PareDown behavior when a candidate pares down to nothing")
    p.add_argument("--budget", type=float, default=60.0, help="exhaustive time budget in seconds")


def _partition(args, d):
    res = run_algorithm(args.algo, d, _iface(args), convex_required=args.convex, mode=args.mode,
                        budget_s=args.budget)
    problems = check_result(d, res, args.convex)
    if problems:  # would be a bug in the partitioner
        raise PartitionError("; ".join(problems))
    return res


def cmd_validate(args) -> int:
    d = load_design(args.design)  # parse errors and validation failures raise
    report = validate_design(d)
    print(f"{args.design}: ok ({len(inner_blocks(d))} inner blocks, {len(d.edges)} connections)"
          if report.ok else report)
    return 0 if report.ok else 1


def cmd_simulate(args) -> int:
    d = load_design(args.design)
    script = load_stimulus(args.stimulus)
    trace = run_simulation(d, script)
    _write(trace.to_csv(), args.out)
    failed = [r for r in check_expectations(trace, script) if not r.passed]
    for r in failed:
        print(r, file=sys.stderr)
    return 1 if failed else 0


def cmd_partition(args) -> int:
    d = load_design(args.design)
    res = _partition(args, d)
    _write(res.to_json() + "\n", args.out)
    return 0


def cmd_synth(args) -> int:
    d = load_design(args.design)
    res = _partition(args, d)
    rewritten, programs = synthesize(d, res)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{d.name}.partition.json").write_text(res.to_json() + "\n")
    (out / f"{d.name}.synth.ebk").write_text(serialize_design(rewritten))
    for prog in programs:
        (out / c_filename(d.name, prog)).write_text(emit_c(prog, d.name))
    print(f"{d.name}: {len(inner_blocks(d))} -> {res.total_inner_after} inner blocks "
          f"({res.programmable} programmable), written to {out}")
    return 0


def cmd_gen(args) -> int:
    d = generate_design(GenParams(args.seed, args.n_inner, args.sensors, args.n_outputs, name=args.name))
    _write(serialize_design(d), args.out)
    return 0


def cmd_equiv(args) -> int:
    d = load_design(args.design)
    script = load_stimulus(args.stimulus)
    res = _partition(args, d)
    rewritten, _ = synthesize(d, res)
    a = output_trace(d, run_simulation(d, script))
    b = output_trace(rewritten, run_simulation(rewritten, script))
    if a == b:
        print("traces identical")
        return 0
    print("traces differ")
    if a[0] != b[0]:
        print(f"  initial: {sorted(a[0].items())} vs {sorted(b[0].items())}")
    ra, rb = set(a[1]), set(b[1])
    for r in sorted(ra - rb):
        print(f"  only in original:    t={r.time} {r.block}={int(r.value)}")
    for r in sorted(rb - ra):
        print(f"  only in synthesized: t={r.time} {r.block}={int(r.value)}")
    return 1


def _parse_sizes(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def cmd_bench(args) -> int:
    algos = tuple(a.strip() for a in args.algos.split(","))
    for a in algos:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    kw = dict(convex_required=args.convex, mode=args.mode)
    if args.suite:
        paths = sorted(Path(args.suite).glob("*.ebk"))
        if not paths:
            raise ValueError(f"no .ebk designs in {args.suite}")
        jobs = [bench.BenchJob(algos, _iface(args), args.budget, design=load_design(p), **kw) for p in paths]
    else:
        jobs = bench.sweep_jobs(_parse_sizes(args.sizes), args.count, algos, _iface(args), args.budget,
                                args.seed_base, **kw)
    records = bench.run_bench(jobs, args.jobs)
    if args.csv:
        Path(args.csv).write_text(bench.records_csv(records))
    rows = bench.summarize(records)
    if args.summary:
        Path(args.summary).write_text(bench.summary_csv(rows))
    sys.stdout.write(bench.summary_table(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bsynth", description="Synthesize block networks onto programmable blocks.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a design file")
    p.add_argument("design")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="simulate a design under a stimulus script")
    p.add_argument("design")
    p.add_argument("--stimulus", "-s", required=True)
    p.add_argument("--out", help="trace CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("partition", help="partition a design and print the result as JSON")
    p.add_argument("design")
    _partition_opts(p)
    p.add_argument("--out", help="JSON path (default stdout)")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("synth", help="partition, merge and emit C plus the rewritten design")
    p.add_argument("design")
    _partition_opts(p)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("gen", help="generate a random design")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n-inner", type=int, required=True)
    p.add_argument("--sensors", type=int)
    p.add_argument("--n-outputs", type=int)
    p.add_argument("--name")
    p.add_argument("--out", help="design path (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("equiv", help="check that synthesis preserves primary-output traces")
    p.add_argument("design")
    p.add_argument("--stimulus", "-s", required=True)
    _partition_opts(p)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("bench", help="compare partitioners over a suite of designs")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--suite", help="directory of .ebk designs")
    src.add_argument("--sizes", default="3..11", help="generated sizes, 'lo..hi' or 'a,b,c' (default 3..11)")
    p.add_argument("--count", type=int, default=200, help="generated designs per size")
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--algos", default="exhaustive,paredown")
    p.add_argument("--inputs", "-i", type=int, default=2)
    p.add_argument("--outputs", "-o", type=int, default=2)
    p.add_argument("--budget", type=float, default=60.0, help="exhaustive budget per design, seconds")
    p.add_argument("--jobs", "-j", type=int, default=1, help="worker processes")
    p.add_argument("--convex", action="store_true")
    p.add_argument("--mode", choices=(RESILIENT, STRICT), default=RESILIENT)
    p.add_argument("--csv", help="per-design CSV path")
    p.add_argument("--summary", help="per-size summary CSV path")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, DesignValidationError, StimulusError, SimulationError, PartitionError,
            CodegenError, GeneratorError, ValueError, OSError) as exc:
        print(f"bsynth: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
