"""Step statistics across ruggedness levels, turned into aligned capability strings."""
# %%
from blisswalk import aggregate, all_walks, bliss_run, describe, describe_set, discretize
from blisswalk import enum_sample, nk_generate, random_pattern

rows = {}
for k in (2, 6, 10):
    instances = []
    for i in range(5):
        f = nk_generate(14, k, seed=100 * k + i)
        S = enum_sample(f)
        v = bliss_run(S, random_pattern(14, 2, rng=i))[0]
        instances.append([s.tolist() for s in all_walks(v, i, S.fitness).step_lists()])
    agg = aggregate(instances)
    rows[k] = agg
    print(k, {s: f"{agg.mean[s]:.3f}+-{agg.ci[s]:.3f}" for s in agg.mean})

# %% rounded (10*cr1, avg step, variation, range), padded to the longest per component
codes = [discretize(rows[k]) for k in rows]
for k, d in zip(rows, describe_set(codes)):
    print(k, d.compact, d.aligned_string, d.gap_count)

# %% two-way comparison
print(describe((5, 2, 4, 9), (7, 3, 4, 10)).gap_count)
