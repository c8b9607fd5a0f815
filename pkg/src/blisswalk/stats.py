"""Step statistics of adaptive walks and the capability strings built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby
from typing import Mapping, Sequence

import numpy as np

STATS = ("cr1", "cr2", "adaptlen", "avg_step", "variation", "range")
Z95 = 1.959963984540054


def compress(steps: Sequence[int]) -> list[int]:
    """Collapse each run of equal consecutive steps to a single step."""
    if len(steps) == 0:
        raise ValueError("empty walk")
    return [k for k, _ in groupby(steps)]


@dataclass(frozen=True)
class StepStats:
    wlen: int
    cwlen: int
    wdist: int
    cwdist: int
    adaptlen: int
    variation: int
    range: int

    @property
    def cr1(self) -> Fraction:
        return Fraction(self.cwlen, self.wlen)

    @property
    def cr2(self) -> Fraction:
        return Fraction(self.cwdist, self.wdist)


def step_stats(steps: Sequence[int]) -> StepStats:
    steps = [int(s) for s in steps]
    short = compress(steps)
    return StepStats(
        wlen=len(steps),
        cwlen=len(short),
        wdist=sum(steps),
        cwdist=sum(short),
        adaptlen=max(len(list(g)) for _, g in groupby(steps)),
        variation=len(set(steps)),
        range=max(steps) - min(steps),
    )


def _ci(values) -> float:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    return Z95 * values.std(ddof=1) / math.sqrt(values.size)


def instance_summary(walk_steps: Sequence[Sequence[int]]) -> dict:
    """Per-walk statistics averaged over walks; avg_step pools every step of the instance."""
    if not walk_steps:
        raise ValueError("instance has no walks")
    per = [step_stats(w) for w in walk_steps]
    total_steps = sum(s.wlen for s in per)
    return {
        "cr1": float(np.mean([float(s.cr1) for s in per])),
        "cr2": float(np.mean([float(s.cr2) for s in per])),
        "adaptlen": float(np.mean([s.adaptlen for s in per])),
        "avg_step": sum(s.wdist for s in per) / total_steps,
        "variation": float(np.mean([s.variation for s in per])),
        "range": float(np.mean([s.range for s in per])),
        "walks": len(per),
    }


@dataclass
class AggregateStats:
    """Two-stage summary: walks -> instance means -> problem mean with 95% CI half-width."""

    instances: list
    mean: dict = field(default_factory=dict)
    ci: dict = field(default_factory=dict)

    def __getitem__(self, stat):
        return self.mean[stat]

    def sum4(self) -> float:
        return self.mean["cr1"] + self.mean["avg_step"] + self.mean["variation"] + self.mean["range"]


def aggregate(instances: Sequence[Sequence[Sequence[int]]]) -> AggregateStats:
    """``instances`` is a list of instances, each a list of walks given as step sequences."""
    if not instances:
        raise ValueError("need at least one instance")
    summaries = [instance_summary(walks) for walks in instances]
    agg = AggregateStats(summaries)
    for stat in STATS:
        vals = [s[stat] for s in summaries]
        agg.mean[stat] = float(np.mean(vals))
        agg.ci[stat] = _ci(vals)
    return agg


def _round_half_away(x: float) -> int:
    # guard against 10 * 0.55 = 5.499999... style representation error
    x = round(x, 9)
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def discretize(agg) -> tuple[int, int, int, int]:
    """(C, S, V, R) = rounded (10 * cr1, avg step, variation, range)."""
    get = agg.__getitem__ if isinstance(agg, (Mapping, AggregateStats)) else None
    if get is None:
        cr1, avg, var, rng = agg
    else:
        cr1, avg, var, rng = get("cr1"), get("avg_step"), get("variation"), get("range")
    return (_round_half_away(10 * cr1), _round_half_away(avg),
            _round_half_away(var), _round_half_away(rng))


@dataclass(frozen=True)
class CapabilityDescription:
    codes: tuple
    aligned_string: str
    gap_count: int

    @property
    def compact(self) -> str:
        letters = [c for c in self.aligned_string if c.isalpha()]
        return "".join(f"{l}{c}" for l, c in zip(letters, self.codes))


def _render(codes, widths, letters, gap) -> CapabilityDescription:
    parts, gaps = [], 0
    for letter, code, width in zip(letters, codes, widths):
        parts.append(letter + "1" * code + gap * (width - code))
        gaps += width - code
    return CapabilityDescription(tuple(codes), "".join(parts), gaps)


def describe(codes, reference_codes, letters: str = "CSVR", gap: str = "0") -> CapabilityDescription:
    """Unary description of ``codes`` padded with gaps to align against ``reference_codes``."""
    widths = [max(a, b) for a, b in zip(codes, reference_codes)]
    return _render(codes, widths, letters, gap)


def describe_set(all_codes, letters: str = "CSVR", gap: str = "0") -> list[CapabilityDescription]:
    """Align several descriptions to the component-wise maximum code."""
    widths = [max(col) for col in zip(*all_codes)]
    return [_render(c, widths, letters, gap) for c in all_codes]


def walk_steps_from(walks) -> list[list[int]]:
    return [list(w.steps) for w in walks]
