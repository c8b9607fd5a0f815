"""Exact nearest-fitter neighbour sets by brute-force XOR/popcount over all pairs."""

import time

import numpy as np
from numba import njit

from . import _bits
from .bliss import VSets
from .core import Sample

# Same structure and invariants as the bliss output, but exact.
NeighborSets = VSets


@njit(cache=True)
def _all_pairs_kernel(words, fitness):
    # rows are in non-decreasing fitness order; every strictly fitter row lies after ``a``
    n, nw = words.shape
    best = np.zeros(n, dtype=np.int64)
    buf = np.empty(n, dtype=np.int64)
    cap = 4 * n + 16
    src = np.empty(cap, dtype=np.int64)
    dst = np.empty(cap, dtype=np.int64)
    ne = 0
    first = 0
    for a in range(n):
        fa = fitness[a]
        if first <= a:
            first = a + 1
        while first < n and fitness[first] <= fa:
            first += 1
        dmin = np.iinfo(np.int64).max
        k = 0
        for b in range(first, n):
            d = 0
            for w in range(nw):
                d += np.int64(_bits.popcount(words[a, w] ^ words[b, w]))
            if d <= dmin:
                if d < dmin:
                    dmin = d
                    k = 0
                buf[k] = b
                k += 1
        if k:
            best[a] = dmin
            if ne + k > cap:
                cap = 2 * (ne + k)
                s2 = np.empty(cap, dtype=np.int64)
                d2 = np.empty(cap, dtype=np.int64)
                s2[:ne] = src[:ne]
                d2[:ne] = dst[:ne]
                src, dst = s2, d2
            for t in range(k):
                src[ne] = a
                dst[ne] = buf[t]
                ne += 1
    return best, src[:ne], dst[:ne]


@njit(cache=True)
def _count_pairs_kernel(words):
    n = words.shape[0]
    total = 0
    for a in range(n):
        for b in range(a + 1, n):
            d = 0
            for w in range(words.shape[1]):
                d += np.int64(_bits.popcount(words[a, w] ^ words[b, w]))
            total += d
    return total


def all_pairs_neighbor_sets(sample: Sample) -> VSets:
    """For each sid, every strictly fitter string at minimum Hamming distance."""
    order = np.argsort(sample.fitness, kind="stable")
    words = np.ascontiguousarray(sample.words[order])
    best, src, dst = _all_pairs_kernel(words, np.ascontiguousarray(sample.fitness[order]))
    return VSets.from_edges(len(sample), order[src], order[dst], best[src])


def all_pairs_timing(sample: Sample) -> tuple[float, int]:
    """Wall-clock seconds for a full XOR/popcount sweep over all C(|S|, 2) pairs."""
    _count_pairs_kernel(sample.words[:2])
    t0 = time.perf_counter()
    _count_pairs_kernel(sample.words)
    elapsed = time.perf_counter() - t0
    n = len(sample)
    return elapsed, n * (n - 1) // 2


def hd_table(sample: Sample) -> np.ndarray:
    """Full symmetric Hamming distance matrix (small samples only)."""
    n = len(sample)
    out = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            out[a, b] = out[b, a] = sum(
                int(x ^ y).bit_count() for x, y in zip(sample.words[a], sample.words[b])
            )
    return out
