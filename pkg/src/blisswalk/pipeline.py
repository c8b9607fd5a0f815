"""End-to-end runs: landscape -> sample -> V sets -> walks -> PLOPs and step statistics."""

from __future__ import annotations

import csv
import dataclasses
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _bits, io, stats
from .bliss import bliss_run, combine, mean_b_min_hd
from .core import Pattern, Sample, demo_sample, good_pattern, make_rng, nk_generate, random_pattern
from .oracle import all_pairs_neighbor_sets
from .sampler import ENUM_CAP, WlConfig, _random_ints, enum_sample, rand_sample, wang_landau
from .walks import all_walks, detect_plops, local_optima, overlap

SAMPLE_KINDS = ("enum", "rand", "awl")
PATTERN_SOURCES = ("random", "identity")
METHODS = ("bliss", "all-pairs")
ROLES = ("landscape", "sampler", "patterns", "walks")

# refuse work whose record table alone would exceed this
MEMORY_LIMIT = 8 * 2**30
# all-pairs scans beyond this many pairs are refused (~hours at 1e9 pairs/s)
PAIR_LIMIT = 2**44


class ConfigError(ValueError):
    pass


class ResourceRefusal(RuntimeError):
    pass


@dataclass
class RunConfig:
    problem: str = "nk"  # "nk" or "demo"
    n: int = 16
    k: int = 4
    seed: int = 0
    instances: int = 30
    sample: str = "enum"
    max_sample: int = 2**12  # sample size for rand and awl
    windows: int = 2
    patterns: int = 1
    pattern_source: str = "random"
    pattern: str = ""  # explicit pattern, overrides pattern_source
    presort_fitness: bool = True
    method: str = "bliss"
    out: str = "out"
    workers: int = 1

    def validate(self) -> "RunConfig":
        if self.problem not in ("nk", "demo"):
            raise ConfigError(f"problem must be 'nk' or 'demo', got {self.problem!r}")
        if self.instances < 1:
            raise ConfigError("instances must be at least 1")
        if self.sample not in SAMPLE_KINDS:
            raise ConfigError(f"sample must be one of {SAMPLE_KINDS}")
        if self.pattern_source not in PATTERN_SOURCES:
            raise ConfigError(f"pattern_source must be one of {PATTERN_SOURCES}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}")
        if self.patterns < 1 or self.workers < 1 or self.max_sample < 2:
            raise ConfigError("patterns and workers must be >= 1, max_sample >= 2")
        n = 4 if self.problem == "demo" else self.n
        if self.problem == "nk" and not 0 <= self.k < self.n:
            raise ConfigError(f"need 0 <= k < n, got n={self.n}, k={self.k}")
        if self.pattern:
            try:
                p = Pattern.from_string(self.pattern)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            if p.n != n:
                raise ConfigError(f"pattern length {p.n} != N={n}")
        elif self.windows < 1 or n % self.windows:
            raise ConfigError(f"windows={self.windows} does not divide N={n}")
        return self

    def sample_size(self) -> int:
        if self.problem == "demo":
            return 6
        return 2**self.n if self.sample == "enum" else self.max_sample

    def check_resources(self):
        """Raise ResourceRefusal with a size estimate if a run is out of reach."""
        if self.problem == "demo":
            return
        size = self.sample_size()
        if self.sample == "enum" and self.n > ENUM_CAP:
            raise ResourceRefusal(f"enumerating 2^{self.n} strings exceeds the cap of 2^{ENUM_CAP}")
        if self.sample == "rand" and size > 2**self.n:
            raise ResourceRefusal(f"{size} distinct strings requested from a space of 2^{self.n}")
        words = -(-self.n // 64)
        est = size * self.windows * self.patterns * (8 * words + 16) + size * 8 * (words + 4)
        if est > MEMORY_LIMIT:
            raise ResourceRefusal(f"estimated {est / 2**30:.1f} GiB of records per instance "
                                  f"(limit {MEMORY_LIMIT / 2**30:.0f} GiB)")
        if self.method == "all-pairs" and size * (size - 1) // 2 > PAIR_LIMIT:
            hours = size * (size - 1) / 2 / 1e9 / 3600
            raise ResourceRefusal(f"all-pairs scan of {size} strings is ~{hours:.0f} h per instance")

    def to_mapping(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        fields = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            key = key.replace("-", "_")
            if key not in fields:
                raise ConfigError(f"unknown config key {key!r}")
            kind = type(getattr(cls(), key))
            try:
                if kind is bool and isinstance(raw, str):
                    if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                        raise ValueError(raw)
                    kwargs[key] = raw.lower() in ("true", "1", "yes")
                else:
                    kwargs[key] = kind(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_mapping(io.read_config(path))

    def save(self, path):
        io.write_config(path, self.to_mapping())


def role_seed(seed: int, instance: int, role: str) -> int:
    """Independent 63-bit seed per (run seed, instance, role)."""
    ss = np.random.SeedSequence([seed, instance, ROLES.index(role)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _problem_label(cfg: RunConfig) -> str:
    return "demo" if cfg.problem == "demo" else f"NK{cfg.n}_K{cfg.k}"


def _make_sample(cfg: RunConfig, instance: int):
    """Returns (fitness function or None, sample, evaluations)."""
    if cfg.problem == "demo":
        return None, demo_sample(), 6
    f = nk_generate(cfg.n, cfg.k, role_seed(cfg.seed, instance, "landscape"))
    rng = make_rng(role_seed(cfg.seed, instance, "sampler"))
    if cfg.sample == "enum":
        s = enum_sample(f)
        return f, s, len(s)
    if cfg.sample == "rand":
        s = rand_sample(f, cfg.n, cfg.max_sample, rng)
        return f, s, len(s)
    run = wang_landau(f, cfg.n, WlConfig(max_sample=cfg.max_sample), rng)
    return f, run.sample, run.evaluations


def _neighbor_sets(cfg: RunConfig, sample: Sample, instance: int):
    if cfg.method == "all-pairs":
        return all_pairs_neighbor_sets(sample), []
    if cfg.pattern:
        pats = [Pattern.from_string(cfg.pattern)]
    elif cfg.pattern_source == "identity":
        pats = [good_pattern(sample, cfg.windows)]
    else:
        rng = make_rng(role_seed(cfg.seed, instance, "patterns"))
        pats = [random_pattern(sample.n_bits, cfg.windows, rng) for _ in range(cfg.patterns)]
    runs = [bliss_run(sample, p, presort=cfg.presort_fitness)[0] for p in pats]
    return (combine(runs) if len(runs) > 1 else runs[0]), [str(p) for p in pats]


def run_instance(cfg: RunConfig, instance: int) -> dict:
    """Run one instance and write its files under ``<out>/instance_<i>/``."""
    t_start = time.perf_counter()
    timings = {}
    t = time.perf_counter()
    f, sample, evaluations = _make_sample(cfg, instance)
    timings["sample_generation"] = time.perf_counter() - t

    t = time.perf_counter()
    v, patterns = _neighbor_sets(cfg, sample, instance)
    timings["bliss"] = time.perf_counter() - t

    t = time.perf_counter()
    walks = all_walks(v, role_seed(cfg.seed, instance, "walks"), sample.fitness)
    steps = [s.tolist() for s in walks.step_lists()]
    report = detect_plops(v, walks)
    summary = stats.instance_summary(steps) if steps else None
    timings["walks_and_steps"] = time.perf_counter() - t

    t = time.perf_counter()
    ov = None
    if f is not None:
        ov = overlap(local_optima(f, sample), report.plops)
    timings["plef_test"] = time.perf_counter() - t

    t = time.perf_counter()
    d = Path(cfg.out) / f"instance_{instance:03d}"
    io.write_sample(d / "sample.txt", sample)
    if f is not None:
        io.write_landscape(d / "landscape.txt", f)
    io.write_vsets(d / "vsets.txt", v)
    io.write_walks(d / "walks.txt", walks)
    io.write_plops(d / "plops.txt", report.plops)
    if cfg.sample == "awl" and cfg.problem == "nk":
        io.write_json(d / "wl.json", {
            "evaluations": evaluations, "max_sample": cfg.max_sample,
            "seed": role_seed(cfg.seed, instance, "sampler"), "sample_size": len(sample),
        })
    timings["io"] = time.perf_counter() - t

    result = {
        "instance": instance,
        "sample_size": len(sample),
        "evaluations": evaluations,
        "eval_ratio": evaluations / len(sample),
        "mean_b_min_hd": float(mean_b_min_hd(v)) if v.has_set().any() else None,
        "overlap": ov,
        "plops": len(report.plops),
        "patterns": patterns,
        "walk_stats": summary,
        "timings": timings,
        "wall": time.perf_counter() - t_start,
    }
    io.write_json(d / "instance.json", result)
    result["steps"] = steps
    return result


def _mean_ci(values):
    values = [x for x in values if x is not None]
    if not values:
        return None, None
    return float(np.mean(values)), stats._ci(values)


def cmd_pipeline(cfg: RunConfig) -> dict:
    """Run every instance, then write stats.csv, summary.json and the resolved config."""
    cfg.validate()
    cfg.check_resources()
    t0 = time.perf_counter()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg.save(out / "config.txt")
    ids = range(cfg.instances)
    if cfg.workers > 1 and cfg.instances > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run_instance, [cfg] * cfg.instances, ids))
    else:
        results = [run_instance(cfg, i) for i in ids]

    t = time.perf_counter()
    label = _problem_label(cfg)
    instances = [r.pop("steps") for r in results]
    instances = [w for w in instances if w]
    rows = []
    capability = None
    if instances:
        agg = stats.aggregate(instances)
        rows = [(label, cfg.sample, s, agg.mean[s], agg.ci[s]) for s in stats.STATS]
        capability = stats.describe_set([stats.discretize(agg)])[0].aligned_string
    io.write_stats_csv(out / "stats.csv", rows)
    stage_names = ("sample_generation", "bliss", "walks_and_steps", "plef_test", "io")
    stages = {k: sum(r["timings"][k] for r in results) for k in stage_names}
    ov_mean, ov_ci = _mean_ci([r["overlap"] for r in results])
    hd_mean, hd_ci = _mean_ci([r["mean_b_min_hd"] for r in results])
    ratio_mean, ratio_ci = _mean_ci([r["eval_ratio"] for r in results])
    stages["aggregate"] = time.perf_counter() - t
    summary = {
        "problem": label,
        "config": cfg.to_mapping(),
        "overlap": {"mean": ov_mean, "ci": ov_ci},
        "mean_b_min_hd": {"mean": hd_mean, "ci": hd_ci},
        "eval_ratio": {"mean": ratio_mean, "ci": ratio_ci},
        "capability": capability,
        "timings": stages,
        "total_wall": time.perf_counter() - t0,
        "instances": results,
    }
    io.write_json(out / "summary.json", summary)
    return summary


def _bench_sample(size: int, n: int, rng) -> Sample:
    words = _bits.ints_to_words(_random_ints(n, size, rng), n)
    return Sample(words, rng.random(size), n, "RAND", check=False)


def cmd_bench(n: int = 32, sizes=(2**10, 2**12, 2**14), repeats: int = 3,
              methods=("bliss-m2", "bliss-m4", "all-pairs"), seed: int = 0, out=None) -> list[dict]:
    """Wall time and mean b-min HD per (|S|, method) on random strings with random fitness.

    Each repeat draws a fresh sample shared by all methods; bliss also draws a fresh pattern.
    """
    known = {"bliss-m2", "bliss-m4", "all-pairs"}
    if set(methods) - known:
        raise ConfigError(f"methods must be among {sorted(known)}")
    if repeats < 1:
        raise ConfigError("repeats must be at least 1")
    for size in sizes:
        if size < 2 or size > 2**n:
            raise ConfigError(f"cannot draw {size} distinct {n}-bit strings")
        if "all-pairs" in methods and size * (size - 1) // 2 > PAIR_LIMIT:
            raise ResourceRefusal(f"all-pairs at |S|={size} is beyond the pair limit")
    # warm the compiled kernels so the first timing is not compile time
    warm = _bench_sample(8, n, make_rng(0))
    all_pairs_neighbor_sets(warm)
    bliss_run(warm, random_pattern(n, 2, make_rng(0)))
    rows = []
    rng = make_rng(seed)
    for size in sizes:
        times = {m: [] for m in methods}
        hds = {m: [] for m in methods}
        for _ in range(repeats):
            sample = _bench_sample(size, n, rng)
            for method in methods:
                pat = None if method == "all-pairs" else random_pattern(n, int(method[-1]), rng)
                t = time.perf_counter()
                if pat is None:
                    v = all_pairs_neighbor_sets(sample)
                else:
                    v = bliss_run(sample, pat)[0]
                times[method].append(time.perf_counter() - t)
                hds[method].append(float(mean_b_min_hd(v)))
        for method in methods:
            rows.append({
                "size": size, "n": n, "method": method,
                "seconds": float(np.mean(times[method])),
                "seconds_sd": float(np.std(times[method], ddof=1)) if repeats > 1 else 0.0,
                "mean_b_min_hd": float(np.mean(hds[method])),
            })
    if out is not None:
        with io.atomic_open(out) as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return rows
