"""Command-line entry point: ``confbraid <subcommand> [options]``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage or
configuration errors (nothing is written in that case).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .campaigns import CAMPAIGNS, CampaignReport
from .scenarios import ConfigError, get_scenario, load_config

log = logging.getLogger("confbraid")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def write_report(report: CampaignReport, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w") as fh:
        json.dump(_jsonable(report.to_dict()), fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, rows in report.tables.items():
        if not rows:
            continue
        cols = list(dict.fromkeys(k for r in rows for k in r))
        with open(out / f"{name}.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=cols)
            w.writeheader()
            for r in rows:
                w.writerow({k: _jsonable(v) for k, v in r.items()})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="confbraid", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=sorted(CAMPAIGNS))
    p.add_argument("--config", type=Path, help="INI file with [scenario] [surface] [flow] [gg] [budgets]")
    p.add_argument("--scenario", help="registry scenario (default depends on the subcommand)")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, help="override the main Monte Carlo budget")
    p.add_argument("--trace", action="store_true", help="write per-sample rows where supported")
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_scenario(args) -> object:
    fn, default = CAMPAIGNS[args.subcommand]
    name = args.scenario or default
    sc = load_config(args.config, name) if args.config else get_scenario(name)
    kw = {}
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.samples is not None:
        kw["samples"] = args.samples
    return replace(sc, **kw) if kw else sc


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        sc = resolve_scenario(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fn, _ = CAMPAIGNS[args.subcommand]
    t0 = time.perf_counter()
    report = fn(sc, workers=args.workers, trace=args.trace)
    elapsed = time.perf_counter() - t0
    write_report(report, args.out)
    with open(args.out / "runtime.json", "w") as fh:
        json.dump({"seconds": round(elapsed, 3), "workers": args.workers}, fh)
        fh.write("\n")
    for c in report.checks:
        print(c.line())
    if not report.passed:
        print("failing checks: " + "; ".join(report.failing_tables()), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
