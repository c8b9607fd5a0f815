"""Plain-text file formats.

sample      ``N=<n>`` header, then ``<bitstring>,<fitness>`` per line
landscape   ``NK <n> <k> <seed>`` (regenerated on load) or ``NK-TABLE <n> <k>``
            followed by ``<i>:<neighbours comma list>:<contributions comma list>``
V sets      ``sid,b_min_hd,member;member;...`` (distance and members empty for the fittest)
trace       ``cluster,working_set,pairs`` with pairs written ``a-b:hd`` separated by ``;``
walks       ``start:sid>sid>...;steps=s1,s2,...``
PLOPs       one sid per line
stats CSV   ``problem,sample_kind,statistic,mean,ci_halfwidth``
config      ``key = value`` lines, ``#`` starts a comment
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import _bits
from .bliss import ScanTrace, VSets
from .core import NkLandscape, Sample, nk_generate
from .walks import WalkSet


@contextmanager
def atomic_open(path, mode="w"):
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode, newline="" if "b" not in mode else None) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_sample(path, sample: Sample):
    with atomic_open(path) as fh:
        fh.write(f"N={sample.n_bits}\n")
        for s, value in zip(sample.strings(), sample.fitness.tolist()):
            fh.write(f"{s},{value!r}\n")


def read_sample(path, origin="EXTERNAL") -> Sample:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("N="):
            raise ValueError(f"{path}: expected 'N=<n>' header, got {header!r}")
        n = int(header[2:])
        strings, values = [], []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            bits, _, value = line.partition(",")
            if len(bits) != n:
                raise ValueError(f"{path}:{lineno}: string length {len(bits)} != {n}")
            strings.append(bits)
            values.append(float(value))
    words = _bits.pack_strings(strings, n)
    return Sample(words, np.array(values), n, origin)


def write_landscape(path, f: NkLandscape, explicit: bool = False):
    with atomic_open(path) as fh:
        if not explicit and f.seed is not None:
            fh.write(f"NK {f.n} {f.k} {f.seed}\n")
            return
        fh.write(f"NK-TABLE {f.n} {f.k}\n")
        for i in range(f.n):
            nbrs = ",".join(map(str, f.neighbors[i].tolist()))
            vals = ",".join(repr(x) for x in f.tables[i].tolist())
            fh.write(f"{i}:{nbrs}:{vals}\n")


def read_landscape(path) -> NkLandscape:
    with open(path) as fh:
        head = fh.readline().split()
        if head[0] == "NK":
            n, k, seed = int(head[1]), int(head[2]), int(head[3])
            return nk_generate(n, k, seed)
        if head[0] != "NK-TABLE":
            raise ValueError(f"{path}: unknown landscape header {head!r}")
        n, k = int(head[1]), int(head[2])
        neighbors = np.zeros((n, k), dtype=np.int64)
        tables = np.zeros((n, 2 ** (k + 1)))
        for line in fh:
            if not line.strip():
                continue
            i, nbrs, vals = line.strip().split(":")
            i = int(i)
            if k:
                neighbors[i] = [int(x) for x in nbrs.split(",")]
            tables[i] = [float(x) for x in vals.split(",")]
    return NkLandscape(n, k, neighbors, tables)


def write_vsets(path, v: VSets):
    with atomic_open(path) as fh:
        for sid in range(len(v)):
            d = v.hd(sid)
            members = ";".join(map(str, v.members(sid).tolist()))
            fh.write(f"{sid},{'' if d is None else d},{members}\n")


def read_vsets(path) -> VSets:
    sets, n = {}, 0
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            sid, d, members = line.rstrip("\n").split(",")
            n = max(n, int(sid) + 1)
            if d:
                sets[int(sid)] = (int(d), [int(x) for x in members.split(";")])
    return VSets.from_dict(n, sets)


def write_trace(path, trace: ScanTrace):
    with atomic_open(path) as fh:
        w = csv.writer(fh)
        w.writerow(["cluster", "working_set", "pairs"])
        for c in trace.clusters or []:
            pairs = ";".join(f"{a}-{b}:{d}" for a, b, d in c.pairs)
            w.writerow([c.label, " ".join(map(str, c.working_set)), pairs])
        w.writerow(["total", "", trace.pair_count])


def write_walks(path, walks: WalkSet):
    with atomic_open(path) as fh:
        for walk in walks:
            steps = ",".join(map(str, walk.steps))
            fh.write(f"{walk.nodes[0]}:{'>'.join(map(str, walk.nodes))};steps={steps}\n")


def read_walks(path) -> list[tuple[list[int], list[int]]]:
    out = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            head, _, steps = line.strip().partition(";steps=")
            _, _, nodes = head.partition(":")
            out.append(([int(x) for x in nodes.split(">")], [int(x) for x in steps.split(",")]))
    return out


def write_plops(path, plops):
    with atomic_open(path) as fh:
        for sid in sorted(plops):
            fh.write(f"{sid}\n")


def read_plops(path) -> set:
    with open(path) as fh:
        return {int(line) for line in fh if line.strip()}


STATS_HEADER = ["problem", "sample_kind", "statistic", "mean", "ci_halfwidth"]


def write_stats_csv(path, rows):
    """``rows``: iterable of (problem, sample_kind, statistic, mean, ci_halfwidth)."""
    with atomic_open(path) as fh:
        w = csv.writer(fh)
        w.writerow(STATS_HEADER)
        for row in rows:
            w.writerow(row)


def read_stats_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_json(path, payload: dict):
    with atomic_open(path) as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def read_config(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def write_config(path, values: dict):
    with atomic_open(path) as fh:
        for key in sorted(values):
            value = values[key]
            if isinstance(value, (list, tuple)):
                value = ",".join(map(str, value))
            fh.write(f"{key} = {value}\n")
