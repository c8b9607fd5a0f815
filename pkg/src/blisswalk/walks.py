"""b-walks over V sets, points with local-optimum potential, and the plef overlap test."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from . import _bits
from .bliss import VSets
from .core import FitnessFunction, Sample, _as_bits, make_rng


@dataclass(frozen=True)
class Walk:
    nodes: tuple
    steps: tuple

    def __len__(self):
        return len(self.steps)

    def __str__(self):
        return " -> ".join(map(str, self.nodes))


def _next(v: VSets, cur: int, u: float) -> int:
    lo, hi = v.indptr[cur], v.indptr[cur + 1]
    return int(v.indices[lo + min(int(u * (hi - lo)), hi - lo - 1)])


def build_walk(v: VSets, start: int, rng) -> Walk:
    """Follow uniformly drawn V-set members from ``start`` until a sid with an empty set.

    One uniform variate is consumed per step.
    """
    if not v.b_min_hd[start]:
        raise ValueError(f"sid {start} has an empty V set; no walk starts there")
    rng = make_rng(rng)
    nodes, steps = [int(start)], []
    cur = int(start)
    while v.b_min_hd[cur]:
        steps.append(int(v.b_min_hd[cur]))
        cur = _next(v, cur, rng.random())
        nodes.append(cur)
    return Walk(tuple(nodes), tuple(steps))


class WalkSet:
    """Flat storage for many walks: walk ``i`` visits ``nodes[node_ptr[i]:node_ptr[i+1]]``."""

    def __init__(self, nodes, node_ptr):
        self.nodes = np.asarray(nodes, dtype=np.int64)
        self.node_ptr = np.asarray(node_ptr, dtype=np.int64)

    def __len__(self):
        return self.node_ptr.shape[0] - 1

    def __getitem__(self, i) -> Walk:
        nodes = self.nodes[self.node_ptr[i] : self.node_ptr[i + 1]]
        return Walk(tuple(nodes.tolist()), tuple(self._steps(i).tolist()))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def attach(self, v: VSets) -> "WalkSet":
        self._hd = v.b_min_hd
        return self

    def _steps(self, i):
        nodes = self.nodes[self.node_ptr[i] : self.node_ptr[i + 1] - 1]
        return self._hd[nodes]

    def step_lists(self) -> list[np.ndarray]:
        return [self._steps(i) for i in range(len(self))]

    def transitions(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Every step taken as (from sid, to sid, size)."""
        is_last = np.zeros(self.nodes.shape[0], dtype=bool)
        is_last[self.node_ptr[1:] - 1] = True
        src_idx = np.flatnonzero(~is_last)
        src = self.nodes[src_idx]
        dst = self.nodes[src_idx + 1]
        return src, dst, self._hd[src]


@njit(cache=True)
def _walk_kernel(hd, indptr, indices, starts, first, uniforms, nodes, nn, node_ptr, longest):
    used = 0
    w = first
    while w < starts.shape[0]:
        if uniforms.shape[0] - used < longest:
            break
        cur = starts[w]
        nodes[nn] = cur
        nn += 1
        while hd[cur] > 0:
            lo = indptr[cur]
            size = indptr[cur + 1] - lo
            k = int(uniforms[used] * size)
            if k >= size:
                k = size - 1
            used += 1
            cur = indices[lo + k]
            nodes[nn] = cur
            nn += 1
        w += 1
        node_ptr[w] = nn
    return w, nn, used


@njit(cache=True)
def _longest_chain(hd, indptr, indices, fitness_order):
    # fitness_order lists sids fittest first, so successors are finalised before predecessors
    depth = np.zeros(hd.shape[0], dtype=np.int64)
    for s in fitness_order:
        best = 0
        for t in range(indptr[s], indptr[s + 1]):
            if depth[indices[t]] + 1 > best:
                best = depth[indices[t]] + 1
        depth[s] = best
    return depth


def all_walks(v: VSets, rng, fitness=None) -> WalkSet:
    """One walk from every sid with a non-empty V set, in sid order.

    Draws the same uniform stream, in the same order, as calling
    :func:`build_walk` for each start in turn with one shared generator.
    """
    rng = make_rng(rng)
    starts = np.flatnonzero(v.has_set()).astype(np.int64)
    if fitness is None:
        fitness = _topological_proxy(v)
    order = np.argsort(-np.asarray(fitness), kind="stable").astype(np.int64)
    depth = _longest_chain(v.b_min_hd, v.indptr, v.indices, order)
    longest = int(depth.max()) if depth.size else 0
    total_nodes = int(depth[starts].sum()) + starts.shape[0]
    nodes = np.empty(total_nodes, dtype=np.int64)
    node_ptr = np.zeros(starts.shape[0] + 1, dtype=np.int64)
    w, nn = 0, 0
    pending = np.empty(0)
    chunk = max(4 * longest, min(1 << 22, 4 * total_nodes + 16))
    while w < starts.shape[0]:
        uniforms = np.concatenate([pending, rng.random(chunk)])
        w, nn, used = _walk_kernel(v.b_min_hd, v.indptr, v.indices, starts, w, uniforms,
                                   nodes, nn, node_ptr, max(longest, 1))
        pending = uniforms[used:]
    # walks may be shorter than the longest chain; trim the reserved space
    return WalkSet(nodes[:nn], node_ptr).attach(v)


def _topological_proxy(v: VSets) -> np.ndarray:
    """A fitness-consistent ordering key recovered from the V-set DAG alone."""
    n = len(v)
    indeg = np.zeros(n, dtype=np.int64)
    src, dst = v.edges()
    np.add.at(indeg, dst, 1)
    # Kahn's algorithm: earlier rank = less fit
    rank = np.zeros(n)
    frontier = list(np.flatnonzero(indeg == 0))
    r = 0
    while frontier:
        nxt = []
        for s in frontier:
            rank[s] = r
            r += 1
            for t in v.members(s):
                indeg[t] -= 1
                if indeg[t] == 0:
                    nxt.append(int(t))
        frontier = nxt
    return rank


@dataclass
class PlopReport:
    plops: frozenset
    out_step: np.ndarray  # 0 where the V set is empty
    in_src: np.ndarray  # step u -> s observed, stored as (u, s, size)
    in_dst: np.ndarray
    in_size: np.ndarray

    def in_steps(self, sid: int) -> list[int]:
        return sorted(self.in_size[self.in_dst == sid].tolist())


def exceeds_mean(out_step: int, in_steps) -> bool:
    """Outgoing step larger than the average incoming step."""
    return len(in_steps) > 0 and out_step * len(in_steps) > sum(in_steps)


def dominance(out_step: int, in_steps) -> bool:
    """Outgoing step larger than every incoming step."""
    return len(in_steps) > 0 and out_step > max(in_steps)


def detect_plops(v: VSets, walks: WalkSet | None = None, rule: Callable = exceeds_mean) -> PlopReport:
    """Mark sids whose outgoing step is large relative to their incoming steps.

    The outgoing step of ``s`` is its b-minimal distance.  Incoming steps are
    the steps walks actually took into ``s`` when ``walks`` is given;
    otherwise every ``u`` with ``s`` in ``V(u)`` contributes ``b_min_hd(u)``
    and the result depends on the V sets alone.
    """
    out = v.b_min_hd
    if walks is None:
        src, dst = v.edges()
        size = out[src]
    else:
        src, dst, size = walks.transitions()
    n = len(v)
    if rule is exceeds_mean or rule is dominance:
        cnt = np.bincount(dst, minlength=n)
        if rule is exceeds_mean:
            total = np.bincount(dst, weights=size, minlength=n).astype(np.int64)
            hit = (out > 0) & (cnt > 0) & (out * cnt > total)
        else:
            top = np.zeros(n, dtype=np.int64)
            np.maximum.at(top, dst, size)
            hit = (out > 0) & (cnt > 0) & (out > top)
        plops = np.flatnonzero(hit)
    else:
        order = np.argsort(dst, kind="stable")
        ds, zs = dst[order], size[order]
        bounds = np.searchsorted(ds, np.arange(n + 1))
        plops = [s for s in np.flatnonzero(out > 0)
                 if rule(int(out[s]), zs[bounds[s]:bounds[s + 1]].tolist())]
    return PlopReport(frozenset(int(s) for s in plops), out, src, dst, size)


def plef(f: FitnessFunction, s) -> float:
    """Fraction of the N one-bit-flip neighbours that are no fitter than ``s``."""
    bits = _as_bits(s)
    fs = f.evaluate(bits)
    flipped = [bits[:i] + ("1" if bits[i] == "0" else "0") + bits[i + 1:] for i in range(len(bits))]
    vals = f.evaluate_words(_bits.pack_strings(flipped))
    return float(np.mean(vals <= fs))


def _is_full_enumeration(sample: Sample) -> bool:
    n = sample.n_bits
    return (n <= 30 and len(sample) == 2**n and sample.words.shape[1] == 1
            and np.array_equal(sample.words[:, 0], np.arange(2**n, dtype=np.uint64)))


def plef_many(f: FitnessFunction | None, sample: Sample) -> np.ndarray:
    """plef of every sample point.  Neighbours outside the sample are scored with ``f``."""
    n = sample.n_bits
    not_fitter = np.zeros(len(sample), dtype=np.int64)
    if _is_full_enumeration(sample):
        ids = np.arange(len(sample))
        for pos in range(n):
            not_fitter += sample.fitness[ids ^ (1 << (n - 1 - pos))] <= sample.fitness
    else:
        if f is None:
            raise ValueError("a fitness function is needed for a partial sample")
        for pos in range(n):
            vals = f.evaluate_words(_bits.flip_bit(sample.words, n, pos))
            not_fitter += vals <= sample.fitness
    return not_fitter / n


def overlap(a, p) -> float:
    """Jaccard index |A & P| / |A | P|."""
    a, p = set(a), set(p)
    if not a and not p:
        raise ValueError("overlap of two empty sets is undefined")
    return len(a & p) / len(a | p)


def local_optima(f: FitnessFunction | None, sample: Sample) -> set:
    """Sample points with plef == 1."""
    return set(np.flatnonzero(plef_many(f, sample) == 1.0).tolist())


def plef_test(f: FitnessFunction | None, sample: Sample, v: VSets, *, walks: WalkSet | None = None,
              rng=None, rule: Callable = exceeds_mean, source: str = "walks") -> float:
    """Overlap between actual 1-bit-flip local optima (plef == 1) and detected PLOPs.

    With ``source="walks"`` incoming steps come from ``walks`` (built from
    ``rng`` if not supplied); ``source="vsets"`` uses V-set membership.
    """
    if source not in ("walks", "vsets"):
        raise ValueError("source must be 'walks' or 'vsets'")
    if source == "walks" and walks is None:
        walks = all_walks(v, rng, sample.fitness)
    report = detect_plops(v, walks if source == "walks" else None, rule)
    return overlap(local_optima(f, sample), report.plops)
