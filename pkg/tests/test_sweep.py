import gzip
import os

import pytest

from vanetsim.config import ConfigError, ScenarioConfig
from vanetsim.sweep import (MEDIAN, SweepGrid, build_tables, parse_grid, read_results,
                            rows_to_csv, sweep)
from vanetsim.trace import read_trace
from vanetsim.analysis import compute_metrics

GRID = """
nodes = 20
pause_values = 0, 30
speed_values = 5, 20
protocols = aodv, dsr
traffics = cbr, tcp
seeds = 2
sim_time = 20
"""


def test_grid_parsing():
    g = parse_grid(GRID)
    assert g.nodes == (20,) and g.seeds == (0, 1) and g.base.sim_time == 20
    assert len(g.cells()) == 16
    cfg = g.config_for(g.cells()[0], 1)
    assert (cfg.pause, cfg.v_max, cfg.seed) == (0.0, 15.0, 1)
    assert parse_grid("seed_list = 4, 9").seeds == (4, 9)
    with pytest.raises(ConfigError):
        parse_grid("axes = density")
    with pytest.raises(ConfigError):
        parse_grid("nodes = 1")


def test_default_grid_is_table_one():
    g = SweepGrid()
    assert len(g.cells()) == 2 * 3 * 5 * 4 and g.run_count() == 600
    assert g.base == ScenarioConfig()


@pytest.fixture(scope="module")
def small_sweep(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    return sweep(parse_grid(GRID), str(out))


def test_sweep_outputs(small_sweep):
    res = small_sweep
    assert res.ok
    rows = read_results(os.path.join(res.out_dir, "results.csv"))
    assert len(rows) == 16 * 3
    medians = [r for r in rows if r["seed"] == MEDIAN]
    assert len(medians) == 16
    for m in medians:
        assert m["pdr"] + m["lpr"] == 100.0
    # the low-mobility pause and speed regimes are all buildable
    assert [t.number for t in res.tables] == [2, 3, 4, 5]


def test_every_trace_reanalyses_to_its_row(small_sweep):
    rows = read_results(os.path.join(small_sweep.out_dir, "results.csv"))
    for r in rows:
        if r["seed"] == MEDIAN:
            continue
        path = os.path.join(small_sweep.out_dir, "traces", r["scenario_id"] + ".tr.gz")
        rep = compute_metrics(read_trace(path), r["traffic"])
        assert (rep.n_sent, rep.n_received, rep.pdr) == (r["n_sent"], r["n_received"], r["pdr"])


def test_sweep_is_byte_reproducible(small_sweep, tmp_path):
    again = sweep(parse_grid(GRID), str(tmp_path))
    for name in ("results.csv", "tables.txt", "tables.csv"):
        with open(os.path.join(small_sweep.out_dir, name), "rb") as a, \
                open(os.path.join(again.out_dir, name), "rb") as b:
            assert a.read() == b.read(), name
    t = "aodv-cbr-n20-p0-v15-s0.tr.gz"
    with open(os.path.join(small_sweep.out_dir, "traces", t), "rb") as a, \
            open(os.path.join(again.out_dir, "traces", t), "rb") as b:
        assert a.read() == b.read()


def test_tables_rebuild_from_csv(small_sweep):
    rows = read_results(os.path.join(small_sweep.out_dir, "results.csv"))
    tables, skipped = build_tables(rows, 15.0, 50.0)
    assert [t.render() for t in tables] == [t.render() for t in small_sweep.tables]
    assert rows_to_csv(rows).splitlines()[0].startswith("scenario_id,")


def test_failed_cell_is_reported_and_sweep_continues(tmp_path, monkeypatch):
    import vanetsim.sweep as sw

    real = sw.Network

    def flaky(cfg):
        if cfg.protocol == "dsr":
            raise RuntimeError("boom")
        return real(cfg)

    monkeypatch.setattr(sw, "Network", flaky)
    g = parse_grid("nodes = 10\npause_values = 0, 30\naxes = pause\ntraffics = cbr\n"
                   "seeds = 1\nsim_time = 10\nflow_start_max = 2")
    res = sweep(g, str(tmp_path))
    assert not res.ok and len(res.failures) == 2
    assert all("boom" in f for f in res.failures)
    assert (tmp_path / "failures.txt").exists()
    assert len(res.rows) == 4  # aodv rows plus their medians
