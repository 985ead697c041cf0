"""Run every campaign at its default budget and print a one-line summary each.

    python scripts/run_all_campaigns.py --out results --workers 1
"""
import argparse
import json
import sys
import time
from pathlib import Path

from confbraid.campaigns import CAMPAIGNS
from confbraid.cli import main as cli_main


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="results")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--only", nargs="*", choices=sorted(CAMPAIGNS), help="subset of campaigns")
    args = p.parse_args(argv)

    worst = 0
    for name in args.only or list(CAMPAIGNS):
        out = Path(args.out) / name
        t0 = time.perf_counter()
        code = cli_main([name, "--out", str(out), "--workers", str(args.workers)])
        elapsed = time.perf_counter() - t0
        worst = max(worst, code)
        checks = json.loads((out / "report.json").read_text())["checks"] if code < 2 else []
        passed = sum(c["passed"] for c in checks)
        print(f"{name:22s} exit {code}  {passed}/{len(checks)} checks  {elapsed:7.1f} s")
    return worst


if __name__ == "__main__":
    sys.exit(main())
