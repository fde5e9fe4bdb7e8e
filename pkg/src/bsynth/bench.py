"""Benchmark harness: run partitioners over a design suite and summarize.

Per-design rows go to CSV with the columns in ``CSV_COLUMNS``.  The summary
groups designs by original inner-block count and reports means the same way
the published result tables do, including block overhead of PareDown over the
exhaustive optimum.  Percent overhead is mean overhead divided by the mean
exhaustive total of the group.
"""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .netlist import Design, inner_blocks
from .partition import RESILIENT, PartitionResult, ProgIface, run_algorithm
from .randgen import GenParams, generate_design

CSV_COLUMNS = ["name", "inner_original", "algo", "total_after", "prog_count", "elapsed_ms", "optimal"]
SUMMARY_COLUMNS = [
    "inner_original",
    "num_designs",
    "exh_total",
    "exh_prog",
    "exh_time_ms",
    "pd_total",
    "pd_prog",
    "pd_time_ms",
    "block_overhead",
    "pct_overhead",
]


@dataclass
class BenchRecord:
    name: str
    inner_original: int
    results: dict[str, PartitionResult] = field(default_factory=dict)

    @property
    def exhaustive_done(self) -> bool:
        r = self.results.get("exhaustive")
        return r is not None and r.optimal

    @property
    def overhead(self) -> int | None:
        if not self.exhaustive_done or "paredown" not in self.results:
            return None
        return self.results["paredown"].total_inner_after - self.results["exhaustive"].total_inner_after

    @property
    def pct_overhead(self) -> float | None:
        ov = self.overhead
        if ov is None:
            return None
        total = self.results["exhaustive"].total_inner_after
        return 100.0 * ov / total if total else 0.0


@dataclass(frozen=True)
class BenchJob:
    algos: tuple[str, ...]
    iface: ProgIface
    budget_s: float | None
    design: Design | None = None
    params: GenParams | None = None
    convex_required: bool = False
    mode: str = RESILIENT


def run_job(job: BenchJob) -> BenchRecord:
    d = job.design if job.design is not None else generate_design(job.params)
    rec = BenchRecord(d.name, len(inner_blocks(d)))
    for algo in job.algos:
        rec.results[algo] = run_algorithm(
            algo, d, job.iface, convex_required=job.convex_required, mode=job.mode,
            budget_s=job.budget_s,
        )
    return rec


def run_bench(jobs: list[BenchJob], n_jobs: int = 1) -> list[BenchRecord]:
    """Records come back in job order regardless of ``n_jobs``."""
    if not jobs:
        raise ValueError("empty benchmark suite")
    if n_jobs <= 1:
        return [run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(run_job, jobs, chunksize=4))


def sweep_jobs(
    sizes, count: int, algos, iface: ProgIface, budget_s: float | None, seed_base: int = 0, **kw
) -> list[BenchJob]:
    """Generated designs; design ``s`` of size ``n`` uses seed ``seed_base + 1000*n + s``."""
    return [
        BenchJob(tuple(algos), iface, budget_s, params=GenParams(seed_base + 1000 * n + s, n), **kw)
        for n in sizes
        for s in range(count)
    ]


def records_csv(records: list[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        for algo, r in rec.results.items():
            w.writerow([
                rec.name, rec.inner_original, algo, r.total_inner_after, r.programmable,
                f"{r.elapsed_ms:.3f}", int(r.optimal),
            ])
    return buf.getvalue()


def _mean(xs):
    return float(statistics.mean(xs)) if xs else None


def summarize(records: list[BenchRecord]) -> list[dict]:
    groups: dict[int, list[BenchRecord]] = {}
    for rec in records:
        groups.setdefault(rec.inner_original, []).append(rec)
    rows = []
    for n in sorted(groups):
        recs = groups[n]
        done = [r for r in recs if r.exhaustive_done]
        pd = [r.results["paredown"] for r in recs if "paredown" in r.results]
        ex = [r.results["exhaustive"] for r in done]
        overheads = [r.overhead for r in done if r.overhead is not None]
        exh_total = _mean([e.total_inner_after for e in ex])
        block_ov = _mean(overheads)
        pct = None
        if block_ov is not None and exh_total:
            pct = 100.0 * block_ov / exh_total
        elif block_ov is not None:
            pct = 0.0
        rows.append({
            "inner_original": n,
            "num_designs": len(recs),
            "exh_total": exh_total,
            "exh_prog": _mean([e.programmable for e in ex]),
            "exh_time_ms": _mean([e.elapsed_ms for e in ex]),
            "pd_total": _mean([p.total_inner_after for p in pd]),
            "pd_prog": _mean([p.programmable for p in pd]),
            "pd_time_ms": _mean([p.elapsed_ms for p in pd]),
            "block_overhead": block_ov,
            "pct_overhead": pct,
        })
    return rows


def _fmt(v, digits=2) -> str:
    if v is None:
        return "--"
    if isinstance(v, int):
        return str(v)
    return f"{v:.{digits}f}"


def summary_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[c], 4) for c in SUMMARY_COLUMNS])
    return buf.getvalue()


def summary_table(rows: list[dict]) -> str:
    header = ["inner", "designs", "exh total", "exh prog", "exh time", "pd total", "pd prog",
              "pd time", "overhead", "% overhead"]
    lines = []
    for row in rows:
        pct = row["pct_overhead"]
        lines.append([
            str(row["inner_original"]), str(row["num_designs"]),
            _fmt(row["exh_total"]), _fmt(row["exh_prog"]), _fmt_time(row["exh_time_ms"]),
            _fmt(row["pd_total"]), _fmt(row["pd_prog"]), _fmt_time(row["pd_time_ms"]),
            _fmt(row["block_overhead"]), "--" if pct is None else f"{pct:.0f} %",
        ])
    widths = [max(len(h), *(len(l[k]) for l in lines)) if lines else len(h) for k, h in enumerate(header)]
    out = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    out += ["  ".join(c.rjust(w) for c, w in zip(l, widths)) for l in lines]
    return "\n".join(out) + "\n"


def _fmt_time(ms) -> str:
    if ms is None:
        return "--"
    if ms < 1:
        return "<1ms"
    if ms < 1000:
        return f"{ms:.2f}ms"
    return f"{ms / 1000:.2f}s"
