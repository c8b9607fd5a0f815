"""Config-driven runs and the timing benchmark.  Same thing as the `blisswalk` CLI."""
# %%
import json
import tempfile
from pathlib import Path

from blisswalk.pipeline import RunConfig, cmd_bench, cmd_pipeline

out = Path(tempfile.mkdtemp())
cfg = RunConfig(n=14, k=6, instances=3, sample="awl", max_sample=1024, out=str(out / "awl"))
summary = cmd_pipeline(cfg)
print(json.dumps({k: summary[k] for k in ("overlap", "mean_b_min_hd", "eval_ratio", "capability")}, indent=1))
print(sorted(p.name for p in (out / "awl").iterdir()))
print((out / "awl" / "config.txt").read_text())

# %% re-running the stored config reproduces every file
again = RunConfig.load(out / "awl" / "config.txt")
again.out = str(out / "again")
cmd_pipeline(again)
print((out / "awl/instance_000/vsets.txt").read_bytes() == (out / "again/instance_000/vsets.txt").read_bytes())

# %% bliss vs exact as the sample grows
for row in cmd_bench(n=32, sizes=(2**10, 2**12, 2**14), repeats=3):
    print(row)
