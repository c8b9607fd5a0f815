import filecmp
import json

import numpy as np
import pytest

from blisswalk import io
from blisswalk.bliss import bliss_run
from blisswalk.cli import main
from blisswalk.core import Pattern, Sample, demo_sample, nk_generate
from blisswalk.pipeline import ConfigError, ResourceRefusal, RunConfig, cmd_bench, cmd_pipeline, role_seed
from blisswalk.sampler import rand_sample
from blisswalk.walks import all_walks


def test_sample_roundtrip(tmp_path):
    f = nk_generate(70, 2, 0)
    s = rand_sample(f, 70, 50, 1)
    io.write_sample(tmp_path / "s.txt", s)
    back = io.read_sample(tmp_path / "s.txt")
    assert np.array_equal(back.words, s.words) and np.array_equal(back.fitness, s.fitness)
    (tmp_path / "bad.txt").write_text("N=4\n010,1.0\n")
    with pytest.raises(ValueError):
        io.read_sample(tmp_path / "bad.txt")


@pytest.mark.parametrize("explicit", [False, True])
def test_landscape_roundtrip(tmp_path, explicit):
    f = nk_generate(9, 3, 17)
    io.write_landscape(tmp_path / "l.txt", f, explicit=explicit)
    assert io.read_landscape(tmp_path / "l.txt") == f


def test_vsets_walks_plops_roundtrip(tmp_path):
    s = demo_sample()
    v, tr = bliss_run(s, Pattern.from_string("1100"), trace=True)
    io.write_vsets(tmp_path / "v.txt", v)
    assert (tmp_path / "v.txt").read_text() == "0,1,3\n1,1,4\n2,1,4;5\n3,2,5\n4,2,5\n5,,\n"
    assert io.read_vsets(tmp_path / "v.txt") == v
    io.write_trace(tmp_path / "t.csv", tr)
    assert "C,1 2 4 5,1-2:2;1-4:1;1-5:3;2-4:1;2-5:1;4-5:2" in (tmp_path / "t.csv").read_text()
    ws = all_walks(v, 0, s.fitness)
    io.write_walks(tmp_path / "w.txt", ws)
    back = io.read_walks(tmp_path / "w.txt")
    assert [(list(w.nodes), list(w.steps)) for w in ws] == back
    assert (tmp_path / "w.txt").read_text().splitlines()[0] == "0:0>3>5;steps=1,2"
    io.write_plops(tmp_path / "p.txt", {4, 3})
    assert io.read_plops(tmp_path / "p.txt") == {3, 4}


def test_config_roundtrip(tmp_path):
    cfg = RunConfig(n=12, k=3, instances=2, presort_fitness=False, out=str(tmp_path / "o"))
    cfg.save(tmp_path / "c.txt")
    assert RunConfig.load(tmp_path / "c.txt") == cfg
    with pytest.raises(ConfigError):
        RunConfig.from_mapping({"bogus": "1"})
    with pytest.raises(ConfigError):
        RunConfig.from_mapping({"presort_fitness": "maybe"})


def test_role_seeds_are_independent():
    seeds = {role_seed(0, i, r) for i in range(3) for r in ("landscape", "sampler", "patterns", "walks")}
    assert len(seeds) == 12
    assert role_seed(5, 1, "walks") == role_seed(5, 1, "walks")


def test_pipeline_demo_config(tmp_path):
    cfg = RunConfig(problem="demo", pattern="1100", instances=1, out=str(tmp_path / "d"))
    summary = cmd_pipeline(cfg)
    text = (tmp_path / "d" / "instance_000" / "vsets.txt").read_text()
    assert text == "0,1,3\n1,1,4\n2,1,4;5\n3,2,5\n4,2,5\n5,,\n"
    assert summary["mean_b_min_hd"]["mean"] == pytest.approx(1.4)


def test_pipeline_rerun_is_identical(tmp_path):
    cfg = RunConfig(n=10, k=4, instances=2, sample="awl", max_sample=300, patterns=2,
                    out=str(tmp_path / "a"))
    first = cmd_pipeline(cfg)
    again = RunConfig.load(tmp_path / "a" / "config.txt")
    again.out = str(tmp_path / "b")
    cmd_pipeline(again)
    for i in range(2):
        d = f"instance_{i:03d}"
        for name in ("sample.txt", "landscape.txt", "vsets.txt", "walks.txt", "plops.txt", "wl.json"):
            assert filecmp.cmp(tmp_path / "a" / d / name, tmp_path / "b" / d / name, shallow=False)
    assert filecmp.cmp(tmp_path / "a" / "stats.csv", tmp_path / "b" / "stats.csv", shallow=False)
    assert first["eval_ratio"]["mean"] >= 1
    rows = io.read_stats_csv(tmp_path / "a" / "stats.csv")
    assert [r["statistic"] for r in rows] == ["cr1", "cr2", "adaptlen", "avg_step", "variation", "range"]


def test_pipeline_stage_timings_cover_wall_time(tmp_path):
    cfg = RunConfig(n=14, k=4, instances=2, out=str(tmp_path / "t"))
    cmd_pipeline(cfg)  # warm caches
    s = cmd_pipeline(cfg)
    assert sum(s["timings"].values()) == pytest.approx(s["total_wall"], rel=0.05)
    assert s["overlap"]["mean"] > 0.5


def test_pipeline_validation_and_refusal(tmp_path):
    with pytest.raises(ConfigError):
        cmd_pipeline(RunConfig(instances=0, out=str(tmp_path)))
    with pytest.raises(ConfigError):
        cmd_pipeline(RunConfig(n=10, windows=3, out=str(tmp_path)))
    with pytest.raises(ResourceRefusal, match="2\\^30"):
        cmd_pipeline(RunConfig(n=30, sample="enum", out=str(tmp_path)))
    with pytest.raises(ResourceRefusal, match="h per instance"):
        cmd_pipeline(RunConfig(n=40, sample="rand", max_sample=2**25, windows=2, method="all-pairs",
                               out=str(tmp_path)))


def test_bench_rows():
    rows = cmd_bench(n=32, sizes=(2, 512), repeats=2, seed=1)
    assert [(r["size"], r["method"]) for r in rows][:3] == [(2, "bliss-m2"), (2, "bliss-m4"), (2, "all-pairs")]
    tiny = [r for r in rows if r["size"] == 2]
    assert len({r["mean_b_min_hd"] for r in tiny}) == 1
    big = {r["method"]: r for r in rows if r["size"] == 512}
    assert big["all-pairs"]["mean_b_min_hd"] <= big["bliss-m2"]["mean_b_min_hd"]


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["demo"]) == 0
    assert "records 24, clusters 20, pairs 23" in capsys.readouterr().out
    assert main(["pipeline", "--instances", "0", "--out", str(tmp_path / "x")]) == 2
    assert main(["pipeline", "--n", "30", "--out", str(tmp_path / "x")]) == 3
    with pytest.raises(SystemExit) as exc:
        main(["pipeline", "--sample", "bogus"])
    assert exc.value.code == 2


def test_cli_stage_commands(tmp_path, capsys):
    p = lambda name: str(tmp_path / name)
    assert main(["gen", "--n", "12", "--k", "3", "--seed", "4", "--out", p("l.txt")]) == 0
    assert main(["sample", "--landscape", p("l.txt"), "--sample", "enum", "--out", p("s.txt")]) == 0
    assert main(["bliss", "--input", p("s.txt"), "--windows", "2", "--patterns", "3",
                 "--out", p("v.txt")]) == 0
    assert main(["bliss", "--input", p("s.txt"), "--method", "all-pairs", "--out", p("va.txt")]) == 0
    assert main(["walks", "--vsets", p("v.txt"), "--input", p("s.txt"), "--out", p("w.txt")]) == 0
    assert main(["stats", "--walks", p("w.txt"), "--out", p("st.csv")]) == 0
    assert main(["pleftest", "--landscape", p("l.txt"), "--input", p("s.txt"), "--vsets", p("v.txt"),
                 "--out", p("plops.txt")]) == 0
    out = capsys.readouterr().out
    assert "capability C" in out and "overlap" in out
    assert main(["bliss", "--input", p("missing.txt"), "--out", p("v2.txt")]) == 2
    assert main(["sample", "--n", "30", "--k", "2", "--out", p("x.txt")]) == 3
