"""Printable walk-through of bliss on the six-string demo sample."""

from __future__ import annotations

from .bliss import bliss_run, build_records, cluster_label, radix_sort, resolve_pattern
from .core import Pattern, demo_sample, identity_level
from .oracle import all_pairs_neighbor_sets, hd_table

DEMO_CASES = (
    ("1100", "standard"),
    ("0110", "standard"),
    ("0101", "standard"),
    (None, "all-pairs"),
    (None, "singleton-clusters"),
    ("3021", "standard"),
)
RECORD_WIDTH = 8


def _vset_lines(v) -> list[str]:
    lines = ["sid  b_min_hd  V"]
    for sid in range(len(v)):
        d = v.hd(sid)
        members = "{" + ", ".join(map(str, v.members(sid).tolist())) + "}"
        lines.append(f"{sid:>3}  {'-' if d is None else d:>8}  {members}")
    return lines


def _mean_text(v) -> str:
    # unreduced, so the count of sids with a fitter neighbour stays visible
    d = v.b_min_hd[v.b_min_hd > 0]
    return f"{int(d.sum())}/{d.size}"


def case_transcript(pattern: str | None, mode: str = "standard") -> list[str]:
    sample = demo_sample()
    pat = resolve_pattern(sample.n_bits, Pattern.from_string(pattern) if pattern else None, mode)
    title = f"pattern {pat} (m={pat.m})" if mode == "standard" else f"{mode} mode"
    lines = [f"== {title} =="]

    records = build_records(sample, pat)
    ordered = radix_sort(records)
    starts, ends = ordered.cluster_bounds()
    labels = [""] * len(ordered)
    for ci, (lo, hi) in enumerate(zip(starts, ends)):
        for r in range(lo, hi):
            labels[r] = cluster_label(ci)
    if records.y_len:
        width = max(RECORD_WIDTH, records.record_bits)
        pre, post = records.rendered(width), ordered.rendered(width)
    else:
        # an empty subsequence is shown as N zeros
        pad = "0" * sample.n_bits
        width = records.record_bits + sample.n_bits
        pre = [r + pad for r in records.rendered()]
        post = [r + pad for r in ordered.rendered()]
    lines.append(f"{'pre-sorted':<{width}}  {'post-sorted':<{width}}  cluster")
    for a, b, c in zip(pre, post, labels):
        lines.append(f"{a:<{width}}  {b:<{width}}  {c}")

    v, trace = bliss_run(sample, pat, mode=mode, trace=True)
    lines.append("cluster  working set  pairs (a-b:hd)")
    for c in trace.clusters:
        ws = " ".join(map(str, c.working_set))
        pairs = " ".join(f"{a}-{b}:{d}" for a, b, d in c.pairs)
        lines.append(f"{c.label:<7}  {ws:<11}  {pairs}")
    lines.append(f"records {len(records)}, clusters {trace.cluster_count}, pairs {trace.pair_count}")
    lines.extend(_vset_lines(v))
    lines.append(f"mean b-min HD = {_mean_text(v)}")
    return lines


def cmd_demo() -> str:
    sample = demo_sample()
    lines = ["sid  string  fitness"]
    lines += [f"{sid:>3}  {s}    {fit:g}" for sid, s, fit in sample.entries()]
    lines.append("")
    lines.append("Hamming distances")
    table = hd_table(sample)
    lines.append("     " + " ".join(f"{j:>2}" for j in range(len(sample))))
    for i, row in enumerate(table):
        lines.append(f"{i:>3}  " + " ".join(f"{x:>2}" for x in row))
    lines.append("identity level per column: " + " ".join(f"{x:.2f}" for x in identity_level(sample)))
    lines.append("")
    lines.append("== exact neighbour sets (all pairs) ==")
    exact = all_pairs_neighbor_sets(sample)
    lines.extend(_vset_lines(exact))
    lines.append(f"mean b-min HD = {_mean_text(exact)}")
    for pattern, mode in DEMO_CASES:
        lines.append("")
        lines.extend(case_transcript(pattern, mode))
    return "\n".join(lines) + "\n"
