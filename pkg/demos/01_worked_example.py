"""bliss step by step on six 4-bit strings whose fitness equals their index."""
# %%
from blisswalk import Pattern, bliss_run, build_records, demo_sample, radix_sort
from blisswalk.demo import cmd_demo
from blisswalk.oracle import all_pairs_neighbor_sets, hd_table

S = demo_sample()
for sid, s, fit in S.entries():
    print(sid, s, fit)

# %% every pairwise Hamming distance, and the exact nearest-fitter sets
print(hd_table(S))
print(all_pairs_neighbor_sets(S).to_dict())

# %% one record per (string, window): sid | wid | excluded-window subsequence
p = Pattern.from_string("1100")
records = build_records(S, p)
ordered = radix_sort(records)
for a, b in zip(records.rendered(8), ordered.rendered(8)):
    print(a, b)

# %% scan clusters top to bottom; carried sids join the next cluster
v, trace = bliss_run(S, p, trace=True)
for c in trace.clusters:
    print(c.label, c.working_set, c.pairs)
print(trace.pair_count, "pairs scored")
print(v.to_dict())

# %% pattern 0110 keeps the two most-shared columns together and recovers the exact sets
print(bliss_run(S, Pattern.from_string("0110"))[0] == all_pairs_neighbor_sets(S))

# %% the whole transcript, including the degenerate modes and a four-window pattern
print(cmd_demo())
