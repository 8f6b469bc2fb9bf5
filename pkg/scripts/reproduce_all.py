"""Run every registered scenario and write its CSV files and manifest.

Usage: python3 scripts/reproduce_all.py [OUT_DIR] [--skip NAME ...]
"""

import argparse
import time

from electrap.scenarios import SCENARIOS, run_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", nargs="?", default="results")
    ap.add_argument("--skip", nargs="*", default=[], help="scenario names to leave out")
    args = ap.parse_args()
    for name in sorted(SCENARIOS):
        if name in args.skip:
            continue
        start = time.perf_counter()
        res = run_scenario(name, out=f"{args.out}/{name}")
        print(f"{name:22s} {time.perf_counter() - start:7.1f} s")
        for metric, value, unit in res.outcome.summary:
            v = f"{value:.6g}" if isinstance(value, float) else str(value)
            print(f"    {metric:34s} {v:>14s} {unit}")


if __name__ == "__main__":
    main()
