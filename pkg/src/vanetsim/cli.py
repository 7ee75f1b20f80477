"""Command-line entry point: ``vanetsim {run,analyze,sweep,table}``."""

import argparse
import math
import os
import sys

from .analysis import compute_metrics, compute_metrics_script_compat, render_tables, tables_csv
from .config import load_config
from .scenario import run_scenario
from .sweep import build_tables, load_grid, read_results, sweep
from .trace import read_trace


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="override the scenario seed (sweep: first seed)")
    p.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    p.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                   help="print nothing but errors")
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="vanetsim", parents=[common],
                                     description="AODV/DSR ad-hoc network simulator")
    sub = parser.add_subparsers(dest="command", metavar="{run,analyze,sweep,table}")
    sub.required = True

    p = sub.add_parser("run", parents=[common], help="simulate one scenario")
    p.add_argument("config", help="scenario file (key = value lines)")
    p.add_argument("--schedule", help="also write the motion schedule to this file")

    p = sub.add_parser("analyze", parents=[common], help="metrics from an existing trace")
    p.add_argument("trace")
    p.add_argument("--type", choices=("cbr", "tcp"), required=True, dest="data_type")
    p.add_argument("--script-compat", action="store_true",
                   help="reproduce the classic awk scripts, quirks included")

    p = sub.add_parser("sweep", parents=[common], help="run a full parameter grid")
    p.add_argument("grid", help="grid file (key = value lines)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plain-traces", action="store_true",
                   help="write uncompressed .tr files")

    p = sub.add_parser("table", parents=[common], help="decision tables from a results CSV")
    p.add_argument("csv")
    p.add_argument("--pinned-speed", type=float, default=15.0)
    p.add_argument("--pinned-pause", type=float, default=50.0)
    return parser


def _print_report(report, out):
    e2e = "nan" if math.isnan(report.avg_e2e_ms) else repr(report.avg_e2e_ms)
    print(f"n_sent {report.n_sent}", file=out)
    print(f"n_received {report.n_received}", file=out)
    print(f"pdr {report.pdr!r}", file=out)
    print(f"lpr {report.lpr!r}", file=out)
    print(f"avg_e2e_ms {e2e}", file=out)


def main(argv=None):
    args = build_parser().parse_args(argv)
    quiet = getattr(args, "quiet", False)
    out = open(os.devnull, "w") if quiet else sys.stdout
    try:
        return _dispatch(args, out)
    except (OSError, ValueError) as exc:
        print(f"vanetsim: error: {exc}", file=sys.stderr)
        return 2
    finally:
        if quiet:
            out.close()


def _dispatch(args, out):
    seed = getattr(args, "seed", None)
    out_dir = getattr(args, "out", None)
    if args.command == "run":
        cfg = load_config(args.config)
        if seed is not None:
            cfg = cfg.replace(seed=seed)
        res = run_scenario(cfg, out_dir=out_dir or ".")
        if args.schedule:
            with open(args.schedule, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(res.network.mobility.export_schedule())
        print(f"trace {res.trace_path}", file=out)
        _print_report(res.report, out)
        return 0

    if args.command == "analyze":
        records = read_trace(args.trace)
        fn = compute_metrics_script_compat if args.script_compat else compute_metrics
        _print_report(fn(records, args.data_type), out)
        return 0

    if args.command == "sweep":
        grid = load_grid(args.grid)
        if seed is not None:
            n = len(grid.seeds)
            grid = type(grid)(**{**grid.__dict__, "seeds": tuple(range(seed, seed + n))})
        res = sweep(grid, out_dir or "sweep-out", workers=args.workers,
                    compress_traces=not args.plain_traces)
        if res.tables:
            print(render_tables(res.tables), end="", file=out)
        for note in res.skipped:
            print(f"skipped {note}", file=out)
        for f in res.failures:
            print(f"failed {f}", file=sys.stderr)
        return 0 if res.ok else 1

    if args.command == "table":
        rows = read_results(args.csv)
        tables, skipped = build_tables(rows, args.pinned_speed, args.pinned_pause)
        text = render_tables(tables) if tables else ""
        print(text, end="", file=out)
        for note in skipped:
            print(f"skipped {note}", file=out)
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
            with open(os.path.join(out_dir, "tables.txt"), "w", encoding="utf-8") as fh:
                fh.write(text)
            with open(os.path.join(out_dir, "tables.csv"), "w", encoding="utf-8") as fh:
                fh.write(tables_csv(tables))
        return 0 if tables else 1
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
