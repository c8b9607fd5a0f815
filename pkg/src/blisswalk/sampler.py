"""ENUM, RAND and Wang-Landau (AWL) samples of a fitness landscape."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _bits
from .core import FitnessFunction, Sample, make_rng

ENUM_CAP = 26


def enum_sample(f: FitnessFunction, n: int | None = None, cap: int = ENUM_CAP) -> Sample:
    """All 2^n strings in lexicographic order; sid == binary value of the string."""
    n = f.n if n is None else n
    if n != f.n:
        raise ValueError(f"fitness function expects n={f.n}")
    if n > cap:
        raise ValueError(f"refusing to enumerate 2^{n} strings (cap is 2^{cap})")
    words = _bits.ints_to_words(np.arange(2**n, dtype=np.uint64), n)
    return Sample(words, f.evaluate_words(words), n, "ENUM", check=False)


def _random_ints(n, size, rng):
    space = 2**n
    if size > space:
        raise ValueError(f"cannot draw {size} distinct strings from 2^{n}")
    if n <= 24 or size > space // 4:
        return rng.choice(space, size=size, replace=False).astype(np.uint64)
    # sparse draw from a huge space: oversample then drop duplicates, keeping draw order
    out = np.empty(0, dtype=np.uint64)
    while out.size < size:
        extra = rng.integers(0, space, size=2 * (size - out.size) + 16, dtype=np.uint64)
        merged = np.concatenate([out, extra])
        _, first = np.unique(merged, return_index=True)
        out = merged[np.sort(first)]
    return out[:size]


def rand_sample(f: FitnessFunction, n: int | None, size: int, rng) -> Sample:
    """``size`` distinct strings drawn uniformly without replacement."""
    n = f.n if n is None else n
    rng = make_rng(rng)
    if n <= 64:
        words = _bits.ints_to_words(_random_ints(n, size, rng), n)
    else:
        if size > 2**n:
            raise ValueError(f"cannot draw {size} distinct strings from 2^{n}")
        words = np.empty((0, _bits.n_words(n)), dtype=np.uint64)
        while words.shape[0] < size:
            bits = rng.integers(0, 2, size=(size - words.shape[0], n))
            strings = ["".join(map(str, row)) for row in bits]
            words = np.concatenate([words, _bits.pack_strings(strings, n)])
            _, first = np.unique(words, axis=0, return_index=True)
            words = words[np.sort(first)]
    return Sample(words, f.evaluate_words(words), n, "RAND", check=False)


@dataclass
class WlConfig:
    max_sample: int
    bin_width: float = 0.1
    flatness: float = 0.90
    f_init: float = math.e
    epsilon: float = 1e-9
    max_evaluations: int | None = None
    check_every: int = 1000
    reachable_bins: np.ndarray | None = None

    def __post_init__(self):
        if not 0 < self.flatness <= 1:
            raise ValueError("flatness must lie in (0, 1]")
        if self.max_sample < 1:
            raise ValueError("max_sample must be positive")
        if self.f_init <= 1:
            raise ValueError("initial modification factor must exceed 1")

    def n_bins(self, lo: float, hi: float) -> int:
        span = (hi - lo) / self.bin_width
        bins = round(span)
        if bins < 1 or abs(span - bins) > 1e-9:
            raise ValueError(f"bin width {self.bin_width} does not tile [{lo}, {hi}]")
        return bins


@dataclass
class WlRun:
    sample: Sample
    evaluations: int
    final_ln_f: float
    flat_events: int = 0
    ln_g: np.ndarray = field(default=None, repr=False)
    seed: object = None

    @property
    def ratio(self) -> float:
        return self.evaluations / len(self.sample)


def wang_landau(f: FitnessFunction, n: int | None, cfg: WlConfig, rng) -> WlRun:
    """Wang-Landau random walk over fitness bins with single bit-flip moves.

    A proposal from bin ``i`` to bin ``j`` is accepted with probability
    ``min(1, g_i / g_j)``.  After every step the current bin receives
    ``ln g += ln f`` and one histogram count.  Flatness is judged over the
    bins in ``cfg.reachable_bins`` when given, otherwise over the bins visited
    so far in the run; when flat the histogram is cleared and ``ln f`` halved.
    The run stops once ``ln f < epsilon``, the number of distinct visited
    strings reaches ``max_sample``, or the evaluation cap is hit.
    """
    n = f.n if n is None else n
    seed = rng
    rng = make_rng(rng)
    n_bins = cfg.n_bins(f.lo, f.hi)
    ln_g = np.zeros(n_bins)
    hist = np.zeros(n_bins, dtype=np.int64)
    ever = np.zeros(n_bins, dtype=bool)
    mask = None if cfg.reachable_bins is None else np.asarray(cfg.reachable_bins, dtype=bool)
    ln_f = math.log(cfg.f_init)
    nw = _bits.n_words(n)

    def bin_of(value):
        return min(n_bins - 1, max(0, int((value - f.lo) / cfg.bin_width)))

    current = np.zeros((1, nw), dtype=np.uint64)
    for pos in np.flatnonzero(rng.integers(0, 2, size=n)):
        j, shift = _bits.locate(n, int(pos))
        current[0, j] |= np.uint64(1) << np.uint64(shift)
    fit = float(f.evaluate_words(current)[0])
    evaluations = 1
    cur_bin = bin_of(fit)
    visited = {tuple(current[0].tolist()): fit}
    flat_events = 0
    steps = 0
    locs = [_bits.locate(n, p) for p in range(n)]
    flips = [np.uint64(1) << np.uint64(s) for _, s in locs]

    while ln_f >= cfg.epsilon and len(visited) < cfg.max_sample:
        if cfg.max_evaluations is not None and evaluations >= cfg.max_evaluations:
            break
        pos = int(rng.integers(n))
        j = locs[pos][0]
        proposal = current.copy()
        proposal[0, j] ^= flips[pos]
        new_fit = float(f.evaluate_words(proposal)[0])
        evaluations += 1
        new_bin = bin_of(new_fit)
        delta = ln_g[cur_bin] - ln_g[new_bin]
        if delta >= 0 or rng.random() < math.exp(delta):
            current, fit, cur_bin = proposal, new_fit, new_bin
            visited.setdefault(tuple(current[0].tolist()), fit)
        ln_g[cur_bin] += ln_f
        hist[cur_bin] += 1
        ever[cur_bin] = True
        steps += 1
        if steps % cfg.check_every == 0:
            active = mask if mask is not None else ever
            h = hist[active]
            if h.size and h.min() >= cfg.flatness * h.mean():
                hist[:] = 0
                ln_f /= 2
                flat_events += 1

    keys = list(visited)
    words = np.array(keys, dtype=np.uint64).reshape(len(keys), nw)
    fitness = np.fromiter(visited.values(), dtype=float, count=len(keys))
    sample = Sample(words, fitness, n, "AWL", check=False)
    return WlRun(sample, evaluations, ln_f, flat_events, ln_g, seed)
