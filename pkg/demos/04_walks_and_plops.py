"""b-walks, step statistics, and how well large outgoing steps flag local optima."""
# %%
import numpy as np

from blisswalk import (all_walks, bliss_run, detect_plops, enum_sample, local_optima, nk_generate,
                       overlap, plef_many, random_pattern, step_stats)
from blisswalk.stats import instance_summary

f = nk_generate(16, 8, seed=2)
S = enum_sample(f)
v, _ = bliss_run(S, random_pattern(16, 2, rng=0))

# %% one walk from every string that has a fitter neighbour
walks = all_walks(v, rng=0, fitness=S.fitness)
w = walks[0]
print(len(walks), "walks;", w)
print("steps", w.steps, step_stats(w.steps))

# %% the worked step sequence
st = step_stats([1, 1, 2, 3, 2, 2, 2, 5])
print(st.cr1, st.cr2, st.adaptlen, st.variation, st.range)

# %% per-instance means
print(instance_summary([s.tolist() for s in walks.step_lists()]))

# %% a point whose outgoing step is larger than the steps that reached it
# is a candidate local optimum; compare with plef == 1
report = detect_plops(v, walks)
optima = local_optima(f, S)
print(len(optima), "local optima,", len(report.plops), "candidates,",
      "overlap", round(overlap(optima, report.plops), 4))
plef = plef_many(f, S)
print("plef of candidates", np.round(plef[sorted(report.plops)][:10], 3))
