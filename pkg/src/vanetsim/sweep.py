"""Parameter sweeps over the node-density / pause / speed grid."""

import csv
import dataclasses
import gzip
import io
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .analysis import (REGIMES, DecisionCell, IncompleteTableError, band_for,
                       build_decision_table, compute_metrics, mobility_label,
                       render_tables, tables_csv)
from .config import (PROTOCOLS, TABLE1_NODES, TABLE1_PAUSES, TABLE1_SPEEDS,
                     TRAFFIC_TYPES, ConfigError, ScenarioConfig, parse_config)
from .scenario import Network

CSV_COLUMNS = ("scenario_id", "protocol", "traffic", "nodes", "pause", "speed", "seed",
               "n_sent", "n_received", "pdr", "lpr", "avg_e2e_ms")
MEDIAN = "median"


@dataclass(frozen=True)
class Cell:
    axis: str
    nodes: int
    value: float
    protocol: str
    traffic: str


@dataclass(frozen=True)
class SweepGrid:
    """Which cells to run. Sweeping pause pins the speed and vice versa."""

    axes: tuple = ("pause", "speed")
    nodes: tuple = TABLE1_NODES
    protocols: tuple = PROTOCOLS
    traffics: tuple = TRAFFIC_TYPES
    pause_values: tuple = TABLE1_PAUSES
    speed_values: tuple = TABLE1_SPEEDS
    pinned_speed: float = 15.0
    pinned_pause: float = 50.0
    seeds: tuple = (0, 1, 2, 3, 4)
    base: ScenarioConfig = field(default_factory=ScenarioConfig)

    def __post_init__(self):
        for ax in self.axes:
            if ax not in ("pause", "speed"):
                raise ConfigError("axes", f"unknown axis {ax!r}")
        if not self.seeds:
            raise ConfigError("seeds", "need at least one seed")
        # every cell must expand to a valid config
        for cell in self.cells():
            self.config_for(cell, self.seeds[0])

    def cells(self):
        out = []
        for axis in self.axes:
            values = self.pause_values if axis == "pause" else self.speed_values
            for n in self.nodes:
                for v in values:
                    for proto in self.protocols:
                        for traffic in self.traffics:
                            out.append(Cell(axis, n, float(v), proto, traffic))
        return out

    def config_for(self, cell, seed):
        if cell.axis == "pause":
            pause, speed = cell.value, self.pinned_speed
        else:
            pause, speed = self.pinned_pause, cell.value
        return dataclasses.replace(self.base, protocol=cell.protocol, traffic=cell.traffic,
                                   nodes=cell.nodes, pause=float(pause), v_max=float(speed),
                                   seed=seed)

    def run_count(self):
        return len(self.cells()) * len(self.seeds)


_LIST_KEYS = {"axes": str, "nodes": int, "protocols": str, "traffics": str,
              "pause_values": float, "speed_values": float}


def parse_grid(text):
    """Grid file: ``key = value`` lines. Grid keys take comma-separated lists;
    any scenario key (``sim_time``, ``range`` ...) sets the base scenario."""
    grid_kw = {}
    base_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key in _LIST_KEYS:
                conv = _LIST_KEYS[key]
                grid_kw[key] = tuple(conv(v.strip()) for v in value.split(",") if v.strip())
            elif key in ("pinned_speed", "pinned_pause"):
                grid_kw[key] = float(value)
            elif key == "seeds":
                grid_kw[key] = tuple(range(int(value)))
            elif key == "seed_list":
                grid_kw["seeds"] = tuple(int(v) for v in value.split(","))
            else:
                base_lines.append(line)
        except ValueError:
            raise ConfigError(key, f"cannot parse {value!r}") from None
    grid_kw["base"] = parse_config("\n".join(base_lines))
    return SweepGrid(**grid_kw)


def load_grid(path):
    with open(path, encoding="utf-8") as fh:
        return parse_grid(fh.read())


def trace_name(cfg, compress=True):
    return f"{cfg.scenario_id}.tr" + (".gz" if compress else "")


def _run_one(cfg, trace_dir, compress):
    """Worker: run one scenario, save its trace, return the report or an error string."""
    try:
        net = Network(cfg)
        net.run()
        path = os.path.join(trace_dir, trace_name(cfg, compress))
        data = net.trace.text().encode("utf-8")
        if compress:
            with open(path, "wb") as raw, gzip.GzipFile(fileobj=raw, mode="wb",
                                                        compresslevel=1, mtime=0,
                                                        filename="") as fh:
                fh.write(data)
        else:
            with open(path, "wb") as fh:
                fh.write(data)
        return compute_metrics(net.trace.records("AGT"), cfg.traffic)
    except Exception as exc:  # recorded per cell; the sweep keeps going
        return f"{type(exc).__name__}: {exc}"


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _row(cfg, seed, n_sent, n_received, pdr, lpr, e2e, scenario_id=None):
    return {
        "scenario_id": scenario_id or cfg.scenario_id,
        "protocol": cfg.protocol, "traffic": cfg.traffic, "nodes": cfg.nodes,
        "pause": cfg.pause, "speed": cfg.v_max, "seed": seed,
        "n_sent": n_sent, "n_received": n_received, "pdr": pdr, "lpr": lpr,
        "avg_e2e_ms": e2e,
    }


def median_row(cfg, reports):
    pdr = statistics.median(r.pdr for r in reports)
    delays = [r.avg_e2e_ms for r in reports if not math.isnan(r.avg_e2e_ms)]
    sid = cfg.scenario_id.rsplit("-s", 1)[0] + "-median"
    return _row(cfg, MEDIAN,
                statistics.median(r.n_sent for r in reports),
                statistics.median(r.n_received for r in reports),
                pdr, 100.0 - pdr,
                statistics.median(delays) if delays else math.nan, scenario_id=sid)


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_results(path):
    """Rows of a results CSV, numbers converted back to int/float."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        rows = []
        for r in reader:
            r = dict(r)
            r["nodes"] = int(r["nodes"])
            for k in ("pause", "speed", "pdr", "lpr", "avg_e2e_ms"):
                r[k] = float(r[k])
            if r["seed"] != MEDIAN:
                r["seed"] = int(r["seed"])
            for k in ("n_sent", "n_received"):
                r[k] = float(r[k]) if "." in r[k] else int(r[k])
            rows.append(r)
    return rows


def build_tables(rows, pinned_speed=15.0, pinned_pause=50.0):
    """Decision tables for every regime the median rows fully cover.

    Returns ``(tables, skipped)`` where ``skipped`` explains regimes that
    could not be built.
    """
    medians = [r for r in rows if r["seed"] == MEDIAN]
    tables = []
    skipped = []
    for regime in REGIMES:
        densities = sorted({r["nodes"] for r in medians
                            if mobility_label(r["nodes"]) == regime.mobility})
        if not densities:
            continue
        n = densities[0]
        if regime.axis == "pause":
            pool = [r for r in medians if r["nodes"] == n and r["speed"] == pinned_speed]
            key = "pause"
        else:
            pool = [r for r in medians if r["nodes"] == n and r["pause"] == pinned_pause]
            key = "speed"
        values = sorted({r[key] for r in pool})
        if len(values) < 2:
            skipped.append(f"{regime.key}: fewer than two {key} values")
            continue
        target = values[0] if regime.level == "low" else values[-1]
        cells = []
        try:
            for r in pool:
                if r[key] != target:
                    continue
                proto = r["protocol"].upper()
                traffic = r["traffic"].upper()
                for metric, value in (("PDR", r["pdr"]), ("E2E", r["avg_e2e_ms"]),
                                      ("LPR", r["lpr"])):
                    cells.append(DecisionCell(proto, traffic, metric,
                                              band_for(metric, regime.axis, value)))
            tables.append(build_decision_table(cells, regime))
        except (IncompleteTableError, ValueError) as exc:
            skipped.append(f"{regime.key}: {exc}")
    return tables, skipped


@dataclass
class SweepResult:
    rows: list
    tables: list
    skipped: list
    failures: list
    out_dir: str
    runs: int

    @property
    def ok(self):
        return not self.failures


def sweep(grid, out_dir, workers=1, compress_traces=True, progress=None):
    """Run every cell x seed, write ``results.csv``, ``tables.txt`` and ``tables.csv``.

    Configurations that coincide across the two axes are simulated once.
    Per-cell failures are collected in ``failures`` (and ``failures.txt``);
    the rest of the sweep still runs.
    """
    trace_dir = os.path.join(out_dir, "traces")
    os.makedirs(trace_dir, exist_ok=True)
    plan = [(cell, [grid.config_for(cell, s) for s in grid.seeds]) for cell in grid.cells()]
    unique = list(dict.fromkeys(cfg for _, cfgs in plan for cfg in cfgs))
    results = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futures = [ex.submit(_run_one, cfg, trace_dir, compress_traces) for cfg in unique]
            for i, (cfg, fut) in enumerate(zip(unique, futures)):
                results[cfg] = fut.result()
                if progress:
                    progress(i + 1, len(unique), cfg)
    else:
        for i, cfg in enumerate(unique):
            results[cfg] = _run_one(cfg, trace_dir, compress_traces)
            if progress:
                progress(i + 1, len(unique), cfg)

    rows = []
    failures = []
    for cell, cfgs in plan:
        reports = []
        for cfg in cfgs:
            res = results[cfg]
            if isinstance(res, str):
                failures.append(f"{cfg.scenario_id}: {res}")
                continue
            reports.append(res)
            rows.append(_row(cfg, cfg.seed, res.n_sent, res.n_received, res.pdr, res.lpr,
                             res.avg_e2e_ms))
        if reports:
            rows.append(median_row(cfgs[0], reports))

    tables, skipped = build_tables(rows, grid.pinned_speed, grid.pinned_pause)
    with open(os.path.join(out_dir, "results.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))
    with open(os.path.join(out_dir, "tables.txt"), "w", encoding="utf-8", newline="") as fh:
        fh.write(render_tables(tables) if tables else "")
    with open(os.path.join(out_dir, "tables.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(tables_csv(tables))
    fail_path = os.path.join(out_dir, "failures.txt")
    if failures:
        with open(fail_path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(failures) + "\n")
    elif os.path.exists(fail_path):
        os.remove(fail_path)
    return SweepResult(rows, tables, skipped, failures, out_dir, len(unique))
