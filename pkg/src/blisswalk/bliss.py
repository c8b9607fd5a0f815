"""Cluster strings by shared exclusion subsequences and derive nearest-fitter sets.

For every string and every window of a pattern, the window's positions are
deleted and the remaining bits ``y`` are tagged with the window id and sid.
Sorting the records on ``(wid, y)`` groups strings that agree everywhere
outside one window; Hamming distances are then computed only inside the
resulting clusters (plus the fittest strings carried over from earlier
clusters).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from numba import njit

from . import _bits
from .core import Pattern, Sample, make_rng, random_pattern, sort_by_fitness

MODES = ("standard", "all-pairs", "singleton-clusters")
_NONE = np.iinfo(np.int64).max


def _width(count: int) -> int:
    return max(1, math.ceil(math.log2(count))) if count > 1 else 1


@dataclass(frozen=True)
class BlissRecord:
    y: str
    wid: int
    sid: int

    def packed(self, wid_bits: int, sid_bits: int) -> int:
        y = int(self.y, 2) if self.y else 0
        return (self.sid << (wid_bits + len(self.y))) | (self.wid << len(self.y)) | y

    def render(self, wid_bits: int, sid_bits: int, width: int | None = None) -> str:
        width = width or sid_bits + wid_bits + len(self.y)
        return format(self.packed(wid_bits, sid_bits), f"0{width}b")


class RecordTable:
    """Column store of bliss records: ``y`` rows, window ids and sids."""

    def __init__(self, y_words, wid, sid, y_len, m, n_strings):
        self.y_words = y_words
        self.wid = wid
        self.sid = sid
        self.y_len = y_len
        self.m = m
        self.wid_bits = _width(m)
        self.sid_bits = _width(n_strings)

    def __len__(self):
        return self.sid.shape[0]

    def __getitem__(self, i) -> BlissRecord:
        y = _bits.unpack_row(self.y_words[i], self.y_len) if self.y_len else ""
        return BlissRecord(y, int(self.wid[i]), int(self.sid[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def record_bits(self) -> int:
        return self.y_len + self.wid_bits + self.sid_bits

    def keys(self) -> tuple[np.ndarray, np.ndarray]:
        """Sort key matrix (wid column, then y words) and each column's bit width."""
        keys = np.concatenate([self.wid.astype(np.uint64).reshape(-1, 1), self.y_words], axis=1)
        widths = [self.wid_bits] + [
            max(0, _bits.chunk_len(self.y_len, j)) for j in range(self.y_words.shape[1])
        ]
        return np.ascontiguousarray(keys), np.array(widths, dtype=np.int64)

    def take(self, perm) -> "RecordTable":
        out = RecordTable.__new__(RecordTable)
        out.__dict__.update(self.__dict__)
        out.y_words = self.y_words[perm]
        out.wid = self.wid[perm]
        out.sid = self.sid[perm]
        return out

    def rendered(self, width=None) -> list[str]:
        return [r.render(self.wid_bits, self.sid_bits, width) for r in self]

    def cluster_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        keys, _ = self.keys()
        if len(self) == 0:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        change = np.any(keys[1:] != keys[:-1], axis=1)
        starts = np.concatenate([[0], np.flatnonzero(change) + 1]).astype(np.int64)
        ends = np.concatenate([starts[1:], [len(self)]]).astype(np.int64)
        return starts, ends


def resolve_pattern(n_bits: int, pattern: Pattern | None, mode: str) -> Pattern:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode == "all-pairs":
        return Pattern.all_pairs(n_bits)
    if mode == "singleton-clusters":
        return Pattern.singleton_clusters(n_bits)
    if pattern is None:
        raise ValueError("standard mode needs a pattern")
    if not pattern.is_balanced():
        raise ValueError(f"pattern {pattern} does not split positions into equal windows")
    return pattern


def build_records(sample: Sample, pattern: Pattern) -> RecordTable:
    """One record per (string, window), ordered by sid then ascending wid."""
    if pattern.n != sample.n_bits:
        raise ValueError(f"pattern length {pattern.n} != string length {sample.n_bits}")
    m, count = pattern.m, len(sample)
    lengths = {len(pattern.included(w)) for w in range(m)}
    if len(lengths) != 1:
        raise ValueError("every window must leave the same number of included positions")
    y_len = lengths.pop()
    nwy = _bits.n_words(y_len)
    y_words = np.zeros((count * m, nwy), dtype=np.uint64)
    for wid in range(m):
        if y_len:
            y_words[wid::m] = _bits.gather_bits(sample.words, sample.n_bits, pattern.included(wid))
    wid_col = np.tile(np.arange(m, dtype=np.int64), count)
    sid_col = np.repeat(np.arange(count, dtype=np.int64), m)
    return RecordTable(y_words, wid_col, sid_col, y_len, m, count)


@njit(cache=True)
def _lsd_radix_perm(keys, widths):
    rows, cols = keys.shape
    perm = np.arange(rows)
    tmp = np.empty(rows, dtype=np.int64)
    counts = np.zeros(257, dtype=np.int64)
    for col in range(cols - 1, -1, -1):
        for b in range((widths[col] + 7) // 8):
            shift = np.uint64(8 * b)
            counts[:] = 0
            for i in range(rows):
                d = np.int64((keys[perm[i], col] >> shift) & np.uint64(255))
                counts[d + 1] += 1
            if counts.max() == rows:
                continue
            for d in range(256):
                counts[d + 1] += counts[d]
            for i in range(rows):
                d = np.int64((keys[perm[i], col] >> shift) & np.uint64(255))
                tmp[counts[d]] = perm[i]
                counts[d] += 1
            perm, tmp = tmp, perm
    return perm


def radix_sort(table: RecordTable) -> RecordTable:
    """Stable LSD radix sort on (wid, y), both ascending, 8-bit digits."""
    keys, widths = table.keys()
    return table.take(_lsd_radix_perm(keys, widths))


class VSets:
    """Per-sid smallest discovered distance to a strictly fitter string, plus who attains it.

    Stored CSR style: members of sid ``s`` are ``indices[indptr[s]:indptr[s+1]]``
    (sorted); ``b_min_hd[s] == 0`` marks an empty set.
    """

    def __init__(self, b_min_hd, indptr, indices):
        self.b_min_hd = np.asarray(b_min_hd, dtype=np.int64)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)

    @classmethod
    def from_edges(cls, n, src, dst, dist):
        """Build from candidate edges, keeping per source only those at the minimum distance."""
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        dist = np.asarray(dist, dtype=np.int64)
        best = np.full(n, _NONE, dtype=np.int64)
        np.minimum.at(best, src, dist)
        keep = dist == best[src]
        src, dst = src[keep], dst[keep]
        if src.size:
            key = np.unique(src * np.int64(n) + dst)
            src, dst = key // n, key % n
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        best[best == _NONE] = 0
        return cls(best, indptr, dst)

    @classmethod
    def from_dict(cls, n, sets: dict):
        """``sets`` maps sid -> (distance, iterable of members); missing sids are empty."""
        src, dst, dist = [], [], []
        for s, (d, members) in sets.items():
            for v in members:
                src.append(s)
                dst.append(v)
                dist.append(d)
        return cls.from_edges(n, src, dst, dist)

    def __len__(self):
        return self.b_min_hd.shape[0]

    def members(self, sid: int) -> np.ndarray:
        return self.indices[self.indptr[sid] : self.indptr[sid + 1]]

    def hd(self, sid: int):
        d = int(self.b_min_hd[sid])
        return d if d else None

    def has_set(self) -> np.ndarray:
        return self.b_min_hd > 0

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        src = np.repeat(np.arange(len(self)), np.diff(self.indptr))
        return src, self.indices

    def to_dict(self) -> dict:
        return {s: (self.hd(s), set(self.members(s).tolist())) for s in range(len(self))}

    def remap(self, old_of_new: np.ndarray) -> "VSets":
        """Translate sids of a sorted sample back to the original numbering."""
        src, dst = self.edges()
        n = len(self)
        out = VSets.from_edges(n, old_of_new[src], old_of_new[dst], self.b_min_hd[src])
        return out

    def __eq__(self, other):
        return (
            isinstance(other, VSets)
            and np.array_equal(self.b_min_hd, other.b_min_hd)
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __repr__(self):
        return f"VSets(n={len(self)}, mean_b_min_hd={float(mean_b_min_hd(self)) if self.has_set().any() else None})"


@dataclass
class ClusterTrace:
    label: str
    working_set: tuple
    pairs: list  # (a, b, hd) with F(b) > F(a)


@dataclass
class ScanTrace:
    pair_count: int
    cluster_count: int
    clusters: list | None = None


def cluster_label(i: int) -> str:
    label = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        label = chr(65 + r) + label
    return label


def _scan_python(order, starts, ends, sample: Sample, dedupe: bool):
    fit, words = sample.fitness, sample.words
    best: dict[int, int] = {}
    sets: dict[int, set] = {}
    seen = set()
    clusters = []
    pairs_total = 0
    carried: list[int] = []
    for ci, (lo, hi) in enumerate(zip(starts, ends)):
        work = list(carried)
        for s in order[lo:hi].tolist():
            if s not in work:
                work.append(s)
        trace = ClusterTrace(cluster_label(ci), tuple(work), [])
        clusters.append(trace)
        if len(work) == 1:
            carried = work
            continue
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                a, b = work[i], work[j]
                if fit[a] == fit[b]:
                    continue
                if fit[a] > fit[b]:
                    a, b = b, a
                if dedupe:
                    if (a, b) in seen:
                        continue
                    seen.add((a, b))
                d = sum(int(x ^ y).bit_count() for x, y in zip(words[a], words[b]))
                trace.pairs.append((a, b, d))
                if a not in best or d < best[a]:
                    best[a], sets[a] = d, {b}
                elif d == best[a]:
                    sets[a].add(b)
        trace.pairs.sort()
        pairs_total += len(trace.pairs)
        top = max(fit[s] for s in work)
        carried = [s for s in work if fit[s] == top]
    v = VSets.from_dict(len(sample), {s: (best[s], sets[s]) for s in best})
    return v, ScanTrace(pairs_total, len(starts), clusters)


@njit(cache=True)
def _scan_kernel(order, starts, ends, words, fitness, dedupe, src, dst, dist):
    # edges beyond the buffer capacity are counted but not stored
    cap = src.shape[0]
    n, nw = words.shape
    best = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    stamp = np.zeros(n, dtype=np.int64)
    work = np.empty(n, dtype=np.int64)
    wwords = np.empty((n, nw), dtype=np.uint64)
    wfit = np.empty(n, dtype=np.float64)
    wbest = np.empty(n, dtype=np.int64)
    carried = np.empty(n, dtype=np.int64)
    nc = 0
    ne = 0
    pairs = 0
    seen = {np.int64(0): True}
    seen.clear()
    for ci in range(starts.shape[0]):
        mark = ci + 1
        m = 0
        for t in range(nc):
            s = carried[t]
            stamp[s] = mark
            work[m] = s
            m += 1
        for r in range(starts[ci], ends[ci]):
            s = order[r]
            if stamp[s] != mark:
                stamp[s] = mark
                work[m] = s
                m += 1
        if m == 1:
            carried[0] = work[0]
            nc = 1
            continue
        # local contiguous copies keep the quadratic loop cache friendly
        for i in range(m):
            wfit[i] = fitness[work[i]]
            wbest[i] = best[work[i]]
            for w in range(nw):
                wwords[i, w] = words[work[i], w]
        for i in range(m):
            fi = wfit[i]
            for j in range(i + 1, m):
                fj = wfit[j]
                if fi < fj:
                    ia, ib = i, j
                elif fj < fi:
                    ia, ib = j, i
                else:
                    continue
                a = work[ia]
                if dedupe:
                    key = a * n + work[ib]
                    if key in seen:
                        continue
                    seen[key] = True
                pairs += 1
                d = 0
                for w in range(nw):
                    d += np.int64(_bits.popcount(wwords[ia, w] ^ wwords[ib, w]))
                if d <= wbest[ia]:
                    wbest[ia] = d
                    if ne < cap:
                        src[ne] = a
                        dst[ne] = work[ib]
                        dist[ne] = d
                    ne += 1
        for i in range(m):
            best[work[i]] = wbest[i]
        top = wfit[0]
        for i in range(1, m):
            if wfit[i] > top:
                top = wfit[i]
        nc = 0
        for i in range(m):
            if wfit[i] == top:
                carried[nc] = work[i]
                nc += 1
    return ne, pairs


def scan_clusters(table: RecordTable, sample: Sample, *, trace: bool = False,
                  dedupe: bool = False, engine: str | None = None):
    """Walk the sorted table cluster by cluster and build V sets.

    The working set is the carried sids plus the current cluster.  A lone
    sid is carried on unpaired; otherwise every pair with different fitness
    is scored and the fittest members are carried to the next cluster.
    With ``trace=True`` (or ``engine="python"``) per-cluster details are kept.
    """
    starts, ends = table.cluster_bounds()
    engine = engine or ("python" if trace else "numba")
    if engine == "python":
        v, tr = _scan_python(table.sid, starts, ends, sample, dedupe)
        if not trace:
            tr.clusters = None
        return v, tr
    order = np.ascontiguousarray(table.sid)
    cap = 16 * len(sample) + 64
    while True:
        src, dst, dist = (np.empty(cap, dtype=np.int64) for _ in range(3))
        ne, pairs = _scan_kernel(order, starts, ends, sample.words, sample.fitness, dedupe,
                                 src, dst, dist)
        if ne <= cap:
            break
        cap = ne
    v = VSets.from_edges(len(sample), src[:ne], dst[:ne], dist[:ne])
    return v, ScanTrace(int(pairs), len(starts))


def bliss_run(sample: Sample, pattern: Pattern | None = None, *, mode: str = "standard",
              presort: bool = True, trace: bool = False, dedupe: bool = False,
              engine: str | None = None):
    """Records -> radix sort -> cluster scan.  Returns (VSets, ScanTrace) in the caller's sids."""
    pattern = resolve_pattern(sample.n_bits, pattern, mode)
    old_of_new = None
    if presort and np.any(np.diff(sample.fitness) < 0):
        sample, old_of_new = sort_by_fitness(sample)
    table = radix_sort(build_records(sample, pattern))
    v, tr = scan_clusters(table, sample, trace=trace, dedupe=dedupe, engine=engine)
    if old_of_new is not None:
        v = v.remap(old_of_new)
        if tr.clusters:
            for c in tr.clusters:
                c.working_set = tuple(int(old_of_new[s]) for s in c.working_set)
                c.pairs = sorted((int(old_of_new[a]), int(old_of_new[b]), d) for a, b, d in c.pairs)
    return v, tr


def combine(runs: Sequence[VSets]) -> VSets:
    """Per sid keep the smallest distance over runs; union members that attain it."""
    if not runs:
        raise ValueError("nothing to combine")
    n = len(runs[0])
    if any(len(r) != n for r in runs):
        raise ValueError("V sets cover different sid universes")
    src, dst, dist = [], [], []
    for r in runs:
        s, d = r.edges()
        src.append(s)
        dst.append(d)
        dist.append(r.b_min_hd[s])
    return VSets.from_edges(n, np.concatenate(src), np.concatenate(dst), np.concatenate(dist))


def mean_b_min_hd(v: VSets) -> Fraction:
    d = v.b_min_hd[v.b_min_hd > 0]
    if d.size == 0:
        raise ValueError("no sid has a fitter neighbour")
    return Fraction(int(d.sum()), int(d.size))


def bliss_multi(sample: Sample, m: int, patterns: int, rng, *, presort: bool = True) -> VSets:
    """Combine runs over ``patterns`` independently drawn random balanced patterns."""
    rng = make_rng(rng)
    runs = [bliss_run(sample, random_pattern(sample.n_bits, m, rng), presort=presort)[0]
            for _ in range(patterns)]
    return combine(runs) if len(runs) > 1 else runs[0]
