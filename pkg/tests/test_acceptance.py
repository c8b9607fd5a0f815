"""Acceptance checks.  Each test prints one ``criterion N: PASS|FAIL`` line.

Criterion 5 enumerates 180 landscapes of 2^16 strings and takes several minutes.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from blisswalk import stats
from blisswalk.bliss import VSets, bliss_run, mean_b_min_hd
from blisswalk.core import Pattern, Sample, demo_sample, nk_generate, random_pattern
from blisswalk.oracle import all_pairs_neighbor_sets
from blisswalk.pipeline import _bench_sample, role_seed
from blisswalk.sampler import WlConfig, enum_sample, rand_sample, wang_landau
from blisswalk.walks import all_walks, plef_test

IDEAL = {0: (1, [3]), 1: (1, [4]), 2: (1, [4, 5]), 3: (2, [4, 5]), 4: (2, [5])}
NEAR_IDEAL = {0: (1, [3]), 1: (1, [4]), 2: (1, [4, 5]), 3: (2, [5]), 4: (2, [5])}
SINGLETON = {0: (2, [1]), 1: (3, [5]), 2: (1, [5]), 3: (2, [5]), 4: (2, [5])}


def _steps(v, sample, seed):
    return [w.tolist() for w in all_walks(v, seed, sample.fitness).step_lists()]


def test_criterion_1_worked_traces(report):
    s = demo_sample()
    checks = {}
    v, tr = bliss_run(s, Pattern.from_string("1100"), trace=True)
    checks["1100"] = (v == VSets.from_dict(6, NEAR_IDEAL) and tr.pair_count == 15
                      and tr.cluster_count == 8 and mean_b_min_hd(v) == Fraction(7, 5))
    v, tr = bliss_run(s, Pattern.from_string("0110"), trace=True)
    checks["0110"] = v == VSets.from_dict(6, IDEAL) and tr.cluster_count == 6
    v, tr = bliss_run(s, Pattern.from_string("0101"), trace=True)
    checks["0101"] = v == VSets.from_dict(6, NEAR_IDEAL) and tr.pair_count == 13
    v, tr = bliss_run(s, mode="all-pairs", trace=True)
    checks["all-pairs"] = (tr.cluster_count == 1 and tr.clusters[0].working_set == tuple(range(6))
                           and v == VSets.from_dict(6, IDEAL))
    v, tr = bliss_run(s, mode="singleton-clusters", trace=True)
    d = v.b_min_hd[v.b_min_hd > 0]
    checks["singleton"] = v == VSets.from_dict(6, SINGLETON) and (int(d.sum()), d.size) == (10, 5)
    v, tr = bliss_run(s, Pattern.from_string("3021"), trace=True)
    checks["3021"] = v == VSets.from_dict(6, NEAR_IDEAL) and tr.cluster_count == 20
    failed = [k for k, ok in checks.items() if not ok]
    assert report(1, not failed, f"cases checked {sorted(checks)}; failed {failed}")


def test_criterion_2_step_statistics(report):
    st = stats.step_stats([1, 1, 2, 3, 2, 2, 2, 5])
    got = (st.cr1, st.cr2, st.adaptlen, st.variation, st.range)
    want = (Fraction(5, 8), Fraction(13, 18), 3, 4, 4)
    assert report(2, got == want, f"cr1={st.cr1} cr2={st.cr2} adaptlen={st.adaptlen} "
                                  f"variation={st.variation} range={st.range}")


def test_criterion_3_capability_strings(report):
    rows = {6: (0.5450, 2.1703, 3.5983, 8.9763), 10: (0.6863, 2.9090, 4.0293, 10.2887),
            14: (0.7570, 3.4697, 4.2870, 10.8423), 18: (0.7943, 3.6497, 4.4307, 10.773)}
    want_codes = [(5, 2, 4, 9), (7, 3, 4, 10), (8, 3, 4, 11), (8, 4, 4, 11)]
    codes = [stats.discretize(rows[k]) for k in (6, 10, 14, 18)]
    gaps = [d.gap_count for d in stats.describe_set(codes)]
    pair = stats.describe((5, 2, 4, 9), (7, 3, 4, 10)).gap_count
    ok = codes == want_codes and gaps == [7, 3, 1, 0] and pair == 4
    assert report(3, ok, f"codes {codes}, gaps {gaps}, C5S2V4R9 vs C7S3V4R10 gaps {pair}")


def test_criterion_4_oracle_equivalence(report):
    rng = np.random.default_rng(2024)
    equal = dominated = 0
    for _ in range(100):
        n = int(rng.integers(2, 17))
        size = int(rng.integers(2, min(2**10, 2**n) + 1))
        ints = rng.choice(2**n, size=size, replace=False)
        fit = rng.random(size) if rng.random() < 0.7 else rng.integers(0, 5, size).astype(float)
        s = Sample.from_strings([format(int(x), f"0{n}b") for x in ints], fitness=fit)
        exact = all_pairs_neighbor_sets(s)
        equal += bliss_run(s, mode="all-pairs")[0] == exact
        m = max(d for d in (1, 2, 4) if n % d == 0 and d < n) if n > 1 else 1
        v = bliss_run(s, random_pattern(n, m, rng))[0]
        has = v.has_set()
        dominated += bool(np.all(v.b_min_hd[has] >= exact.b_min_hd[has]) and np.all(exact.has_set()[has]))
    assert report(4, equal == 100 and dominated == 100,
                  f"all-pairs mode equal on {equal}/100, standard mode >= oracle on {dominated}/100")


TARGET_BLISS = {4: 0.9540, 8: 0.9816, 12: 0.9692}
TARGET_ALL_PAIRS = {4: 0.9788, 8: 0.9788, 12: 0.9700}


@pytest.mark.slow
def test_criterion_5_nk_overlap(report):
    runs = 30
    means = {"bliss": {}, "all-pairs": {}}
    t0 = time.perf_counter()
    for k in (4, 8, 12):
        ov = {"bliss": [], "all-pairs": []}
        for i in range(runs):
            f = nk_generate(16, k, role_seed(5, 100 * k + i, "landscape"))
            s = enum_sample(f)
            pat = random_pattern(16, 2, role_seed(5, 100 * k + i, "patterns"))
            walk_seed = role_seed(5, 100 * k + i, "walks")
            ov["bliss"].append(plef_test(f, s, bliss_run(s, pat)[0], rng=walk_seed))
            ov["all-pairs"].append(plef_test(f, s, all_pairs_neighbor_sets(s), rng=walk_seed))
        for key in ov:
            means[key][k] = float(np.mean(ov[key]))
    ok_b = all(abs(means["bliss"][k] - TARGET_BLISS[k]) <= 0.05 for k in TARGET_BLISS)
    ok_a = all(abs(means["all-pairs"][k] - TARGET_ALL_PAIRS[k]) <= 0.03 for k in TARGET_ALL_PAIRS)
    fmt = lambda d: "/".join(f"{d[k]:.4f}" for k in (4, 8, 12))
    assert report(5, ok_b and ok_a,
                  f"bliss {fmt(means['bliss'])} (target 0.9540/0.9816/0.9692 +-0.05), "
                  f"all-pairs {fmt(means['all-pairs'])} (target 0.9788/0.9788/0.9700 +-0.03), "
                  f"{time.perf_counter() - t0:.0f}s")


def test_criterion_6_wang_landau_ratio(report):
    ratios = []
    for i in range(30):
        f = nk_generate(16, 8, role_seed(6, i, "landscape"))
        run = wang_landau(f, 16, WlConfig(max_sample=2**12), role_seed(6, i, "sampler"))
        assert len(run.sample) == 2**12
        ratios.append(run.ratio)
    mean = float(np.mean(ratios))
    inside = sum(2 <= r <= 8 for r in ratios)
    assert report(6, 2 <= mean <= 8, f"mean evaluations/sample {mean:.2f} "
                                      f"(runs {min(ratios):.2f}-{max(ratios):.2f}, {inside}/30 in [2, 8])")


def _problem_means(k, instances=10):
    inst = []
    for i in range(instances):
        f = nk_generate(14, k, role_seed(7, 100 * k + i, "landscape"))
        s = enum_sample(f)
        v = bliss_run(s, random_pattern(14, 2, role_seed(7, 100 * k + i, "patterns")))[0]
        inst.append(_steps(v, s, role_seed(7, 100 * k + i, "walks")))
    return stats.aggregate(inst).mean


def test_criterion_7_trends(report):
    means = {k: _problem_means(k) for k in (2, 6, 10)}
    up = ("cr1", "cr2", "avg_step", "variation", "range")
    bad = [s for s in up if not means[2][s] < means[6][s] < means[10][s]]
    if not means[2]["adaptlen"] > means[6]["adaptlen"] > means[10]["adaptlen"]:
        bad.append("adaptlen")
    table = "; ".join(f"{s} " + "/".join(f"{means[k][s]:.3f}" for k in (2, 6, 10))
                      for s in up + ("adaptlen",))
    assert report(7, not bad, f"K=2/6/10: {table}; wrong direction {bad}")


def _cr1(sample, seed):
    v = bliss_run(sample, random_pattern(sample.n_bits, 2, seed))[0]
    return stats.aggregate([_steps(v, sample, seed + 1)]).mean["cr1"]


def test_criterion_9_awl_closer_than_rand(report):
    wins, per_k = 0, 3
    details = []
    for rep in range(10):
        curves = {"enum": [], "awl": [], "rand": []}
        for k in (2, 6, 10):
            vals = {key: [] for key in curves}
            for i in range(per_k):
                seed = role_seed(9, 1000 * rep + 10 * k + i, "landscape")
                f = nk_generate(14, k, seed)
                awl = wang_landau(f, 14, WlConfig(max_sample=2**10), seed + 1).sample
                samples = {"enum": enum_sample(f), "awl": awl, "rand": rand_sample(f, 14, len(awl), seed + 2)}
                for key, s in samples.items():
                    vals[key].append(_cr1(s, seed + 3))
            for key in curves:
                curves[key].append(np.mean(vals[key]))
        enum = np.array(curves["enum"])
        d_awl = float(np.mean(np.abs(np.array(curves["awl"]) - enum)))
        d_rand = float(np.mean(np.abs(np.array(curves["rand"]) - enum)))
        wins += d_awl <= d_rand
        details.append(f"{d_awl:.3f}<={d_rand:.3f}")
    assert report(9, wins >= 7, f"AWL closer in {wins}/10 repetitions (MAD awl<=rand: {' '.join(details)})")


def test_criterion_8_speedup(report):
    sample = _bench_sample(2**16, 32, np.random.default_rng(8))
    warm = _bench_sample(64, 32, np.random.default_rng(0))
    bliss_run(warm, random_pattern(32, 2, 0))
    all_pairs_neighbor_sets(warm)
    t = time.perf_counter()
    bliss_run(sample, random_pattern(32, 2, 1))
    t_bliss = time.perf_counter() - t
    t = time.perf_counter()
    all_pairs_neighbor_sets(sample)
    t_all = time.perf_counter() - t
    assert report(8, t_bliss < t_all / 10,
                  f"|S|=2^16 N=32: bliss m=2 {t_bliss:.3f}s, all-pairs {t_all:.3f}s "
                  f"(ratio {t_all / t_bliss:.1f}x)")
