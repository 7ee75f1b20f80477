# %% [markdown]
# # A small sweep and its decision tables
#
# The full study is 3 densities x 5 pause or speed values x 2 protocols x
# 2 traffic types x 5 seeds. Here we shrink it to 30 nodes, the two
# extremes of each axis, 2 seeds and 60 s runs so it finishes in about a
# minute.

# %%
import csv

from vanetsim.sweep import parse_grid, sweep

grid = parse_grid("""
nodes = 30
pause_values = 50, 250
speed_values = 5, 25
seeds = 2
sim_time = 60
""")
print(grid.run_count(), "runs")
res = sweep(grid, "demo-sweep", progress=lambda i, n, cfg: print(f"{i}/{n} {cfg.scenario_id}"))

# %% [markdown]
# One row per run plus a per-cell median row. Medians drive the tables.

# %%
with open("demo-sweep/results.csv") as fh:
    for row in csv.DictReader(fh):
        if row["seed"] == "median":
            print(row["scenario_id"], row["pdr"][:6], row["avg_e2e_ms"][:6])

# %%
for table in res.tables:
    print(table.render())
    print()
