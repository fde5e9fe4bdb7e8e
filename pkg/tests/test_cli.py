from __future__ import annotations

import json

from bsynth.cli import main
from bsynth.designio import load_design, serialize_design
from bsynth.randgen import GenParams, generate_design

from conftest import DATA

REF = str(DATA / "reference.ebk")
GARAGE = str(DATA / "garage.ebk")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", REF)
    assert code == 0 and "ok" in out


def test_validate_reports_errors(tmp_path, capsys):
    bad = tmp_path / "bad.ebk"
    bad.write_text("design x\nblock a compute.not\nconnect a.out0 -> a.in0\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2 and "cycle" in err


def test_partition_json(capsys):
    code, out, _ = run(capsys, "partition", REF, "--algo", "paredown", "--inputs", "2", "--outputs", "2")
    data = json.loads(out)
    assert code == 0 and data["partitions"] == [["b", "c"]] and data["unassigned"] == ["a"]


def test_equiv(tmp_path, capsys):
    stim = tmp_path / "s.stim"
    stim.write_text("init s1 0\ninit s2 0\ninit s3 0\nat 1 set s1 1\nat 2 set s2 1\nat 4 set s3 1\n"
                    "at 6 set s1 0\nrun until 10\n")
    code, out, _ = run(capsys, "equiv", REF, "--stimulus", str(stim), "--inputs", "2", "--outputs", "2",
                       "--convex")
    assert code == 0 and out.strip() == "traces identical"


def test_simulate_garage(tmp_path, capsys):
    stim = tmp_path / "night.stim"
    stim.write_text("init c 0\ninit l 0\nat 1 set c 1\nat 2 set l 1\nexpect 6 z.out0 == 1\nrun until 10\n")
    code, out, _ = run(capsys, "simulate", GARAGE, "--stimulus", str(stim))
    assert code == 0
    assert out.splitlines()[0] == "time,block,port,value"
    assert out.splitlines()[-1] == "10,z,0,1"


def test_simulate_failed_expectation(tmp_path, capsys):
    stim = tmp_path / "s.stim"
    stim.write_text("init c 0\ninit l 0\nexpect 0 z.out0 == 1\nrun until 2\n")
    code, _, err = run(capsys, "simulate", GARAGE, "--stimulus", str(stim))
    assert code == 1 and "FAIL" in err


def test_synth_writes_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "synth", str(DATA / "podium_timer_3.ebk"), "--out-dir", str(tmp_path))
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["podium_timer_3.partition.json", "podium_timer_3.synth.ebk",
                     "podium_timer_3_P1.c", "podium_timer_3_P2.c"]
    assert len(load_design(tmp_path / "podium_timer_3.synth.ebk").blocks) < len(load_design(DATA / "podium_timer_3.ebk").blocks)


def test_synth_refuses_non_convex(tmp_path, capsys):
    # {b0, b1} fits (in s, x; out b0, b1) but the path b0 -> x -> b1 leaves and re-enters it
    d = tmp_path / "nc.ebk"
    d.write_text(
        "design nc\nblock s sensor.button\nblock t sensor.button\nblock u sensor.button\n"
        "block b0 compute.not\nblock x compute.lut3:0x80\nblock b1 compute.and2\n"
        "block z output.led\nblock z2 output.led\n"
        "connect s.out0 -> b0.in0\nconnect b0.out0 -> x.in0\nconnect t.out0 -> x.in1\n"
        "connect u.out0 -> x.in2\nconnect b0.out0 -> b1.in0\nconnect x.out0 -> b1.in1\n"
        "connect b1.out0 -> z.in0\nconnect x.out0 -> z2.in0\n"
    )
    code, out, _ = run(capsys, "partition", str(d), "--algo", "exhaustive")
    assert code == 0 and json.loads(out)["partitions"] == [["b0", "b1"]]
    code, _, err = run(capsys, "synth", str(d), "--algo", "exhaustive", "--out-dir", str(tmp_path / "a"))
    assert code == 2 and "not convex" in err
    code, _, _ = run(capsys, "synth", str(d), "--algo", "exhaustive", "--convex", "--out-dir", str(tmp_path / "b"))
    assert code == 0


def test_gen(tmp_path, capsys):
    out = tmp_path / "g.ebk"
    assert main(["gen", "--seed", "42", "--n-inner", "10", "--out", str(out)]) == 0
    assert out.read_text() == serialize_design(generate_design(GenParams(42, 10)))


def test_bench_suite(tmp_path, capsys):
    csv_path = tmp_path / "rows.csv"
    code, out, _ = run(capsys, "bench", "--suite", str(DATA), "--csv", str(csv_path))
    assert code == 0
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "name,inner_original,algo,total_after,prog_count,elapsed_ms,optimal"
    totals: dict[str, dict[str, int]] = {}
    for row in rows[1:]:
        name, _, algo, total, *_ = row.split(",")
        totals.setdefault(name, {})[algo] = int(total)
    assert len(totals) == 5
    assert all(t["paredown"] == t["exhaustive"] for t in totals.values())
    assert "% overhead" in out


def test_bench_sweep_parallel(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["bench", "--sizes", "3..5", "--count", "4", "--summary", str(a)])
    main(["bench", "--sizes", "3..5", "--count", "4", "--summary", str(b), "--jobs", "2"])
    capsys.readouterr()
    strip = lambda p: [",".join(r.split(",")[:4] + r.split(",")[5:7] + r.split(",")[8:]) for r in p.read_text().splitlines()]
    assert strip(a) == strip(b)


def test_bench_timeout_shows_dashes(capsys):
    code, out, _ = run(capsys, "bench", "--sizes", "14", "--count", "1", "--budget", "0")
    assert code == 0
    assert out.splitlines()[1].split()[2] == "--"
