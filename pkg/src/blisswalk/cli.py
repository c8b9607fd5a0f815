"""Command-line entry point.

Exit status: 0 on success, 2 on invalid input, 3 when a run is refused as too large.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io, stats
from .bliss import MODES, bliss_run, combine, mean_b_min_hd
from .core import Pattern, good_pattern, make_rng, nk_generate, random_pattern
from .demo import cmd_demo
from .oracle import all_pairs_neighbor_sets
from .pipeline import ConfigError, ResourceRefusal, RunConfig, cmd_bench, cmd_pipeline
from .sampler import ENUM_CAP, WlConfig, enum_sample, rand_sample, wang_landau
from .walks import all_walks, detect_plops, local_optima, overlap


def _landscape(args):
    if args.landscape:
        return io.read_landscape(args.landscape)
    if args.n is None or args.k is None:
        raise ConfigError("give --landscape FILE or both --n and --k")
    return nk_generate(args.n, args.k, args.landscape_seed)


def run_gen(args):
    f = nk_generate(args.n, args.k, args.seed)
    io.write_landscape(args.out, f, explicit=args.explicit)
    print(f"wrote {args.out}")


def run_sample(args):
    f = _landscape(args)
    rng = make_rng(args.seed)
    if args.sample == "enum":
        if f.n > ENUM_CAP:
            raise ResourceRefusal(f"enumerating 2^{f.n} strings exceeds the cap of 2^{ENUM_CAP}")
        s = enum_sample(f)
    elif args.sample == "rand":
        s = rand_sample(f, f.n, args.max_sample, rng)
    else:
        run = wang_landau(f, f.n, WlConfig(max_sample=args.max_sample), rng)
        s = run.sample
        io.write_json(args.out + ".wl.json", {
            "evaluations": run.evaluations, "final_ln_f": run.final_ln_f,
            "seed": args.seed, "max_sample": args.max_sample, "sample_size": len(s),
        })
    io.write_sample(args.out, s)
    print(f"wrote {len(s)} strings to {args.out}")


def run_bliss(args):
    sample = io.read_sample(args.input)
    if args.method == "all-pairs":
        v = all_pairs_neighbor_sets(sample)
    elif args.mode != "standard":
        v, tr = bliss_run(sample, mode=args.mode, presort=args.presort_fitness, trace=bool(args.trace))
        if args.trace:
            io.write_trace(args.trace, tr)
    else:
        if args.pattern:
            pats = [Pattern.from_string(args.pattern)]
        elif args.identity:
            pats = [good_pattern(sample, args.windows)]
        else:
            rng = make_rng(args.seed)
            pats = [random_pattern(sample.n_bits, args.windows, rng) for _ in range(args.patterns)]
        runs = []
        for i, p in enumerate(pats):
            v, tr = bliss_run(sample, p, presort=args.presort_fitness, trace=bool(args.trace))
            if args.trace:
                io.write_trace(args.trace if len(pats) == 1 else f"{args.trace}.{i}", tr)
            runs.append(v)
        v = combine(runs) if len(runs) > 1 else runs[0]
    io.write_vsets(args.out, v)
    mean = mean_b_min_hd(v) if v.has_set().any() else None
    print(f"mean b-min HD = {mean}" + (f" ({float(mean):.4f})" if mean is not None else ""))


def run_walks(args):
    v = io.read_vsets(args.vsets)
    fitness = io.read_sample(args.input).fitness if args.input else None
    walks = all_walks(v, args.seed, fitness)
    io.write_walks(args.out, walks)
    print(f"wrote {len(walks)} walks to {args.out}")


def run_stats(args):
    instances = [[steps for _, steps in io.read_walks(p) if steps] for p in args.walks]
    agg = stats.aggregate(instances)
    rows = [(args.problem, args.sample_kind, s, agg.mean[s], agg.ci[s]) for s in stats.STATS]
    if args.out:
        io.write_stats_csv(args.out, rows)
    for _, _, s, m, ci in rows:
        print(f"{s:<10} {m:.4f} +/- {ci:.4f}")
    print("capability", stats.describe_set([stats.discretize(agg)])[0].aligned_string)


def run_pleftest(args):
    f = _landscape(args)
    sample = io.read_sample(args.input)
    v = io.read_vsets(args.vsets)
    walks = all_walks(v, args.seed, sample.fitness) if args.source == "walks" else None
    report = detect_plops(v, walks)
    if args.out:
        io.write_plops(args.out, report.plops)
    optima = local_optima(f, sample)
    print(f"local optima {len(optima)}, PLOPs {len(report.plops)}, "
          f"overlap {overlap(optima, report.plops):.4f}")


def run_bench(args):
    rows = cmd_bench(args.n, args.sizes, args.repeats, args.methods, args.seed, args.out)
    for r in rows:
        print(f"|S|={r['size']:<8} N={r['n']:<3} {r['method']:<9} "
              f"{r['seconds']:.4f}s (sd {r['seconds_sd']:.4f})  mean b-min HD {r['mean_b_min_hd']:.4f}")


PIPELINE_FLAGS = ("problem", "n", "k", "seed", "instances", "sample", "max_sample", "windows",
                  "patterns", "pattern_source", "pattern", "presort_fitness", "method", "out", "workers")


def run_pipeline(args):
    values = io.read_config(args.config) if args.config else {}
    cfg = RunConfig.from_mapping(values)
    for key in PIPELINE_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    summary = cmd_pipeline(cfg)
    brief = {k: summary[k] for k in ("problem", "overlap", "mean_b_min_hd", "eval_ratio",
                                     "capability", "timings", "total_wall")}
    print(json.dumps(brief, indent=2))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blisswalk", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("demo", help="worked examples on the six-string sample").set_defaults(
        func=lambda a: print(cmd_demo(), end=""))

    g = sub.add_parser("gen", help="generate an NK landscape file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--explicit", action="store_true", help="write full contribution tables")
    g.add_argument("--out", required=True)
    g.set_defaults(func=run_gen)

    def landscape_args(q):
        q.add_argument("--landscape", help="landscape file")
        q.add_argument("--n", type=int)
        q.add_argument("--k", type=int)
        q.add_argument("--landscape-seed", type=int, default=0)

    s = sub.add_parser("sample", help="draw an ENUM, RAND or AWL sample")
    landscape_args(s)
    s.add_argument("--sample", choices=("enum", "rand", "awl"), default="enum")
    s.add_argument("--max-sample", type=int, default=2**12)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=run_sample)

    b = sub.add_parser("bliss", help="approximate nearest fitter neighbour sets")
    b.add_argument("--input", required=True, help="sample file")
    b.add_argument("--windows", type=int, default=2)
    b.add_argument("--patterns", type=int, default=1)
    b.add_argument("--pattern", help="explicit pattern, e.g. 1100")
    b.add_argument("--identity", action="store_true", help="use the identity-level pattern")
    b.add_argument("--mode", choices=MODES, default="standard")
    b.add_argument("--method", choices=("bliss", "all-pairs"), default="bliss")
    b.add_argument("--presort-fitness", action=argparse.BooleanOptionalAction, default=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--trace", help="write the cluster trace here")
    b.add_argument("--out", required=True)
    b.set_defaults(func=run_bliss)

    w = sub.add_parser("walks", help="one b-walk from every sid with a fitter neighbour")
    w.add_argument("--vsets", required=True)
    w.add_argument("--input", help="sample file (fitness gives the walk order)")
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--out", required=True)
    w.set_defaults(func=run_walks)

    st = sub.add_parser("stats", help="step statistics over walk files, one file per instance")
    st.add_argument("--walks", nargs="+", required=True)
    st.add_argument("--problem", default="problem")
    st.add_argument("--sample-kind", default="enum")
    st.add_argument("--out")
    st.set_defaults(func=run_stats)

    pt = sub.add_parser("pleftest", help="overlap of local optima with detected PLOPs")
    landscape_args(pt)
    pt.add_argument("--input", required=True)
    pt.add_argument("--vsets", required=True)
    pt.add_argument("--source", choices=("walks", "vsets"), default="walks")
    pt.add_argument("--seed", type=int, default=0)
    pt.add_argument("--out", help="write PLOP sids here")
    pt.set_defaults(func=run_pleftest)

    be = sub.add_parser("bench", help="bliss vs all-pairs timing")
    be.add_argument("--n", type=int, default=32)
    be.add_argument("--sizes", type=int, nargs="+", default=[2**10, 2**12, 2**14])
    be.add_argument("--repeats", type=int, default=3)
    be.add_argument("--methods", nargs="+", default=["bliss-m2", "bliss-m4", "all-pairs"])
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--out", help="timing CSV")
    be.set_defaults(func=run_bench)

    pl = sub.add_parser("pipeline", help="full run from a config file and/or flags")
    pl.add_argument("--config", help="key = value config file")
    pl.add_argument("--problem", choices=("nk", "demo"))
    pl.add_argument("--n", type=int)
    pl.add_argument("--k", type=int)
    pl.add_argument("--seed", type=int)
    pl.add_argument("--instances", type=int)
    pl.add_argument("--sample", choices=("enum", "rand", "awl"))
    pl.add_argument("--max-sample", type=int)
    pl.add_argument("--windows", type=int)
    pl.add_argument("--patterns", type=int)
    pl.add_argument("--pattern-source", choices=("random", "identity"))
    pl.add_argument("--pattern")
    pl.add_argument("--presort-fitness", action=argparse.BooleanOptionalAction, default=None)
    pl.add_argument("--method", choices=("bliss", "all-pairs"))
    pl.add_argument("--out")
    pl.add_argument("--workers", type=int)
    pl.set_defaults(func=run_pipeline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ResourceRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
