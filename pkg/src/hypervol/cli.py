"""Command-line driver for the experiment commands.

Usage: hypervol <command> --config run.json [--seed N] [--out path.csv]
[--workers N].  The summary is printed as JSON on stdout, per-row
assertion failures go to stderr, and the exit code is 0 only when every
assertion passed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import experiments

COMMANDS = {
    "theorem1-sweep": experiments.cmd_theorem1_sweep,
    "theorem2-check": experiments.cmd_theorem2_check,
    "cone-table": experiments.cmd_cone_table,
    "extremal-search": experiments.cmd_extremal_search,
    "mass-near-vertices": experiments.cmd_mass_near_vertices,
    "hull-volume": experiments.cmd_hull_volume,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypervol",
        description="hyperbolic hull-volume experiments (Klein model)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON RunConfig file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="override the CSV/JSON output path")
        p.add_argument("--workers", type=int, help="override worker count")
    return parser


def load_config(args) -> experiments.RunConfig:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = experiments.RunConfig.from_json(fh.read())
    else:
        cfg = experiments.RunConfig()
    cfg = replace(cfg, command=args.command)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    if args.workers is not None:
        cfg = replace(cfg, workers=args.workers)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = load_config(args)
    header, rows, failures, summary = COMMANDS[args.command](cfg)
    if cfg.out:
        if args.command == "hull-volume":
            with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(summary, sort_keys=True, indent=2) + "\n")
        else:
            experiments.write_csv(cfg.out, header, rows)
    for line in failures:
        print(f"FAIL: {line}", file=sys.stderr)
    print(json.dumps({"command": args.command, "rows": len(rows),
                      "failures": len(failures), "summary": summary},
                     sort_keys=True))
    return 0 if not failures else 1


if __name__ == "__main__":
    sys.exit(main())
