"""
Comparing ego, hubs and disparity backbones
===========================================

Ten seeded runs on Les Miserables, then the aggregated comparison. The
disparity filter is tuned per run to the size of the ego backbone.
"""

# %%
import json

from overlap_backbone.datasets import dataset_path
from overlap_backbone.harness import RunConfig, cmd_compare, format_table

config = RunConfig(input=str(dataset_path("lesmis")), runs=10, seed=0)
report = cmd_compare(config)
print(format_table(report))

# %%
# JSON keeps full precision and the spread across runs
ego_hubs = report["pairs"]["ego-hubs"]
print(json.dumps({k: ego_hubs[k] for k in ("A_n", "rbo_0.9", "kendall")}, indent=1))
print("failed runs:", report["failed_runs"])

# %%
# Per-run sizes: the disparity backbone may overshoot the target by a node or two
for row in report["per_run"]:
    sizes = {m: row["methods"][m]["nodes"] for m in row["methods"]}
    print(row["seed"], sizes)
