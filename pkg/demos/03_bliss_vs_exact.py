"""How close bliss gets to the exact neighbour sets, and what it costs."""
# %%
import time

import numpy as np

from blisswalk import (all_pairs_neighbor_sets, bliss_multi, bliss_run, enum_sample, good_pattern,
                       mean_b_min_hd, nk_generate, random_pattern)

f = nk_generate(16, 4, seed=0)
S = enum_sample(f)

t = time.perf_counter()
exact = all_pairs_neighbor_sets(S)
t_exact = time.perf_counter() - t
print(f"exact    mean b-min HD {float(mean_b_min_hd(exact)):.4f}  {t_exact:.2f}s")

# %% one random pattern per window count; more windows means shorter subsequences
for m in (2, 4, 8):
    t = time.perf_counter()
    v, tr = bliss_run(S, random_pattern(16, m, rng=m))
    print(f"m={m}      mean b-min HD {float(mean_b_min_hd(v)):.4f}  {time.perf_counter() - t:.2f}s"
          f"  {tr.cluster_count} clusters  {tr.pair_count} pairs")

# %% combining several patterns keeps the best distance seen for each sid
for k in (1, 4, 16):
    print(k, "patterns", float(mean_b_min_hd(bliss_multi(S, 2, k, rng=7))))

# %% identity-level pattern (groups the most-shared columns)
print(good_pattern(S, 2), float(mean_b_min_hd(bliss_run(S, good_pattern(S, 2))[0])))

# %% bliss never beats the exact distance
v = bliss_run(S, random_pattern(16, 2, 1))[0]
has = v.has_set()
print(np.all(v.b_min_hd[has] >= exact.b_min_hd[has]))
