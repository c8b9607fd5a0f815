"""NK landscapes and the three sample kinds: full enumeration, uniform draw, Wang-Landau walk."""
# %%
import numpy as np

from blisswalk import WlConfig, enum_sample, nk_generate, rand_sample, wang_landau

f = nk_generate(14, 6, seed=3)
print(f, f.evaluate("01" * 7))

# %% enumeration: sid is the integer value of the string
enum = enum_sample(f)
print(len(enum), enum.string(9), enum.fitness.max())

# %% uniform sample without replacement
rand = rand_sample(f, 14, 1024, rng=1)
print(len(rand), np.round(rand.fitness.mean(), 4))

# %% Wang-Landau flattens the walk over fitness bins, so it spends more time
# in the sparse high and low tails than a uniform draw does
run = wang_landau(f, 14, WlConfig(max_sample=1024), rng=1)
print(len(run.sample), run.evaluations, round(run.ratio, 2), run.flat_events)
bins = np.linspace(0, 1, 11)
print("rand", np.histogram(rand.fitness, bins)[0])
print("awl ", np.histogram(run.sample.fitness, bins)[0])
print("enum", np.histogram(enum.fitness, bins)[0])
