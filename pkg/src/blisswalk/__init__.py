"""Approximate nearest-fitter neighbour search on bit-string samples and adaptive-walk statistics."""

from .bliss import (BlissRecord, RecordTable, ScanTrace, VSets, bliss_multi, bliss_run,
                    build_records, combine, mean_b_min_hd, radix_sort, scan_clusters)
from .core import (BitString, ConstantFitness, FitnessFunction, NkLandscape, Pattern, Sample,
                   TableFitness, demo_fitness, demo_sample, evaluate, good_pattern, hamming,
                   identity_level, make_rng, nk_generate, random_pattern, sort_by_fitness)
from .oracle import NeighborSets, all_pairs_neighbor_sets, all_pairs_timing
from .sampler import WlConfig, WlRun, enum_sample, rand_sample, wang_landau
from .stats import (AggregateStats, CapabilityDescription, StepStats, aggregate, compress,
                    describe, describe_set, discretize, step_stats)
from .walks import (PlopReport, Walk, WalkSet, all_walks, build_walk, detect_plops,
                    local_optima, overlap, plef, plef_many, plef_test)

__version__ = "0.1.0"
