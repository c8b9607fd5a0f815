"""Bit strings, fitness functions, NK landscapes, samples and window patterns."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from numba import njit

from . import _bits

ORIGINS = ("ENUM", "RAND", "AWL", "EXTERNAL")


def make_rng(seed=None) -> np.random.Generator:
    """PCG64-backed generator; the same seed always yields the same stream."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class BitString:
    bits: str

    def __post_init__(self):
        if not self.bits or set(self.bits) - {"0", "1"}:
            raise ValueError(f"not a binary string: {self.bits!r}")

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitString":
        return cls(format(value, f"0{n}b"))

    def __len__(self):
        return len(self.bits)

    def __getitem__(self, i):
        return int(self.bits[i])

    def __str__(self):
        return self.bits

    def words(self) -> np.ndarray:
        return _bits.pack_strings([self.bits])


def _as_bits(s) -> str:
    return s.bits if isinstance(s, BitString) else str(s)


def hamming(a, b) -> int:
    """Number of positions at which two equal-length strings differ."""
    a, b = _as_bits(a), _as_bits(b)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a, b))


class FitnessFunction:
    """Deterministic map from N-bit strings to reals within ``[lo, hi]``.

    Subclasses implement :meth:`evaluate_words`, which scores packed rows
    (see ``_bits``) in bulk.
    """

    n: int
    lo: float = 0.0
    hi: float = 1.0

    def evaluate_words(self, words: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, s) -> float:
        bits = _as_bits(s)
        if len(bits) != self.n:
            raise ValueError(f"expected a string of length {self.n}, got {len(bits)}")
        return float(self.evaluate_words(_bits.pack_strings([bits]))[0])


def evaluate(f: FitnessFunction, s) -> float:
    return f.evaluate(s)


class TableFitness(FitnessFunction):
    """Fitness given by an explicit string -> value table (unknown strings raise KeyError)."""

    def __init__(self, table: Mapping[str, float], lo=None, hi=None):
        self.table = {_as_bits(k): float(v) for k, v in table.items()}
        lengths = {len(k) for k in self.table}
        if len(lengths) != 1:
            raise ValueError("table strings must share one length")
        self.n = lengths.pop()
        values = list(self.table.values())
        self.lo = min(values) if lo is None else lo
        self.hi = max(values) if hi is None else hi

    def evaluate_words(self, words):
        return np.array([self.table[_bits.unpack_row(r, self.n)] for r in words])


class ConstantFitness(FitnessFunction):
    def __init__(self, n: int, value: float = 0.5, lo=0.0, hi=1.0):
        self.n, self.value, self.lo, self.hi = n, value, lo, hi

    def evaluate_words(self, words):
        return np.full(words.shape[0], self.value)


@njit(cache=True)
def _nk_kernel(words, word_idx, shifts, tables):
    rows = words.shape[0]
    n, k1 = word_idx.shape
    out = np.empty(rows)
    for r in range(rows):
        total = 0.0
        for i in range(n):
            ctx = np.int64(0)
            for t in range(k1):
                ctx = (ctx << 1) | np.int64((words[r, word_idx[i, t]] >> shifts[i, t]) & np.uint64(1))
            total += tables[i, ctx]
        out[r] = total / n
    return out


class NkLandscape(FitnessFunction):
    """Kauffman NK landscape with random neighbourhoods.

    Position ``i`` contributes ``tables[i, ctx]`` where ``ctx`` reads bit ``i``
    as the most significant digit followed by the bits of ``neighbors[i]`` in
    stored order.  Fitness is the mean contribution, so it lies in [0, 1).
    """

    def __init__(self, n: int, k: int, neighbors: np.ndarray, tables: np.ndarray, seed=None):
        if not 0 <= k < n:
            raise ValueError(f"need 0 <= k < n, got n={n}, k={k}")
        neighbors = np.asarray(neighbors, dtype=np.int64).reshape(n, k)
        tables = np.asarray(tables, dtype=np.float64)
        if tables.shape != (n, 2 ** (k + 1)):
            raise ValueError(f"tables must have shape {(n, 2 ** (k + 1))}")
        for i, row in enumerate(neighbors):
            if i in row or len(set(row.tolist())) != k or (row < 0).any() or (row >= n).any():
                raise ValueError(f"bad neighbourhood for position {i}: {row.tolist()}")
        self.n, self.k, self.seed = n, k, seed
        self.neighbors = neighbors
        self.tables = tables
        self.lo, self.hi = 0.0, 1.0
        positions = np.concatenate([np.arange(n).reshape(n, 1), neighbors], axis=1)
        loc = [[_bits.locate(n, int(p)) for p in row] for row in positions]
        self._word_idx = np.array([[j for j, _ in row] for row in loc], dtype=np.int64)
        self._shifts = np.array([[s for _, s in row] for row in loc], dtype=np.uint64)

    def evaluate_words(self, words):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        return _nk_kernel(words, self._word_idx, self._shifts, self.tables)

    def contribution(self, i: int, ctx: int) -> float:
        return float(self.tables[i, ctx])

    def __eq__(self, other):
        return (
            isinstance(other, NkLandscape)
            and (self.n, self.k) == (other.n, other.k)
            and np.array_equal(self.neighbors, other.neighbors)
            and np.array_equal(self.tables, other.tables)
        )

    def __repr__(self):
        return f"NkLandscape(n={self.n}, k={self.k}, seed={self.seed})"


def nk_generate(n: int, k: int, seed) -> NkLandscape:
    if not 0 <= k < n:
        raise ValueError(f"need 0 <= k < n, got n={n}, k={k}")
    rng = make_rng(seed)
    neighbors = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        others = np.delete(np.arange(n), i)
        neighbors[i] = rng.choice(others, size=k, replace=False)
    tables = rng.random((n, 2 ** (k + 1)))
    return NkLandscape(n, k, neighbors, tables, seed=seed)


@dataclass
class Sample:
    """Distinct strings with fitness values; the sid of a row is its index."""

    words: np.ndarray
    fitness: np.ndarray
    n_bits: int
    origin: str = "EXTERNAL"
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.words = np.ascontiguousarray(self.words, dtype=np.uint64)
        self.fitness = np.ascontiguousarray(self.fitness, dtype=np.float64)
        if self.words.ndim != 2 or self.words.shape[1] != _bits.n_words(self.n_bits):
            raise ValueError("words must be (count, ceil(n_bits/64))")
        if self.words.shape[0] != self.fitness.shape[0]:
            raise ValueError("one fitness value per string required")
        if self.origin not in ORIGINS:
            raise ValueError(f"origin must be one of {ORIGINS}")
        if self.n_bits < 2:
            raise ValueError("strings need at least two positions")
        if self.check and len(self) > 1:
            if np.unique(self.words, axis=0).shape[0] != len(self):
                raise ValueError("sample strings must be distinct")
        self.words.flags.writeable = False
        self.fitness.flags.writeable = False

    @classmethod
    def from_strings(cls, strings: Sequence, fitness=None, f: FitnessFunction | None = None,
                     origin="EXTERNAL") -> "Sample":
        strings = [_as_bits(s) for s in strings]
        words = _bits.pack_strings(strings)
        if fitness is None:
            if f is None:
                raise ValueError("need fitness values or a fitness function")
            fitness = f.evaluate_words(words)
        return cls(words, np.asarray(fitness, dtype=float), len(strings[0]), origin)

    def __len__(self):
        return self.words.shape[0]

    def string(self, sid: int) -> BitString:
        return BitString(_bits.unpack_row(self.words[sid], self.n_bits))

    def strings(self) -> list[str]:
        return [_bits.unpack_row(r, self.n_bits) for r in self.words]

    def entries(self) -> Iterable[tuple[int, BitString, float]]:
        for sid in range(len(self)):
            yield sid, self.string(sid), float(self.fitness[sid])

    def bit_matrix(self) -> np.ndarray:
        return _bits.unpack_bits(self.words, self.n_bits)


def demo_sample() -> Sample:
    """The six 4-bit strings used throughout the worked examples; fitness equals sid."""
    strings = ["0101", "0011", "1010", "1101", "1011", "1000"]
    return Sample.from_strings(strings, fitness=np.arange(6.0))


def demo_fitness() -> TableFitness:
    return TableFitness({s: i for i, s in enumerate(demo_sample().strings())})


def identity_level(sample: Sample) -> np.ndarray:
    """Proportion of 1s in each column."""
    if len(sample) == 0:
        raise ValueError("empty sample")
    ones = np.array([_bits.bit_column(sample.words, sample.n_bits, p).sum(dtype=np.int64)
                     for p in range(sample.n_bits)])
    return ones / len(sample)


@dataclass(frozen=True)
class Pattern:
    """Assignment of string positions to windows ``0..m-1``.

    A record for window ``wid`` drops every position assigned to ``wid``.
    Position value ``-1`` means "never dropped"; it only appears in the
    singleton-cluster degenerate mode.
    """

    assignment: tuple
    m: int

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))
        if self.m < 1:
            raise ValueError("need at least one window")
        if any(a < -1 or a >= self.m for a in self.assignment):
            raise ValueError(f"window ids must be < m={self.m}")

    @classmethod
    def from_string(cls, text: str, m: int | None = None) -> "Pattern":
        ids = [int(c) for c in text]
        return cls(tuple(ids), m if m is not None else max(ids) + 1)

    @classmethod
    def all_pairs(cls, n: int) -> "Pattern":
        return cls((0,) * n, 1)

    @classmethod
    def singleton_clusters(cls, n: int) -> "Pattern":
        return cls((-1,) * n, 1)

    @property
    def n(self):
        return len(self.assignment)

    def window(self, wid: int) -> list[int]:
        return [p for p, a in enumerate(self.assignment) if a == wid]

    def included(self, wid: int) -> list[int]:
        return [p for p, a in enumerate(self.assignment) if a != wid]

    def is_balanced(self) -> bool:
        sizes = {len(self.window(w)) for w in range(self.m)}
        return len(sizes) == 1 and -1 not in self.assignment

    def __str__(self):
        if -1 in self.assignment or self.m > 10:
            return ",".join(map(str, self.assignment))
        return "".join(map(str, self.assignment))


def good_pattern(sample: Sample, m: int) -> Pattern:
    """Group the highest-identity columns together.

    Columns are ranked by descending identity level (lower index wins ties)
    and consecutive blocks of ``N/m`` ranked columns share a window; the top
    block gets window ``m-1``.
    """
    n = sample.n_bits
    if m < 1 or n % m:
        raise ValueError(f"window count {m} does not divide N={n}")
    ones = np.round(identity_level(sample) * len(sample)).astype(np.int64)
    ranked = sorted(range(n), key=lambda c: (-ones[c], c))
    w = n // m
    assignment = [0] * n
    for rank, col in enumerate(ranked):
        assignment[col] = m - 1 - rank // w
    return Pattern(tuple(assignment), m)


def random_pattern(n: int, m: int, rng) -> Pattern:
    """Uniformly random balanced assignment of ``n`` positions to ``m`` windows."""
    if m < 1 or n % m:
        raise ValueError(f"window count {m} does not divide n={n}")
    rng = make_rng(rng)
    perm = rng.permutation(n)
    assignment = np.empty(n, dtype=np.int64)
    assignment[perm] = np.arange(n) // (n // m)
    return Pattern(tuple(assignment.tolist()), m)


def sort_by_fitness(sample: Sample) -> tuple[Sample, np.ndarray]:
    """Stable non-decreasing fitness order; returns (sorted sample, old sid of each new sid)."""
    order = np.argsort(sample.fitness, kind="stable")
    out = Sample(sample.words[order], sample.fitness[order], sample.n_bits, sample.origin,
                 check=False)
    return out, order
