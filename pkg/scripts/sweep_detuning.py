"""Swap fidelity of the electron-transmon chain against bus detuning around delta_1.

Usage: python3 scripts/sweep_detuning.py [OUT_DIR] [--points N] [--span F]
"""

import argparse

import numpy as np

from electrap.coupling import magic_detuning
from electrap.scenarios import sweep

TWO_PI = 2 * np.pi


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", nargs="?", default="results/sweeps")
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--span", type=float, default=0.2, help="relative half-width of the sweep")
    ap.add_argument("--levels", type=int, default=5, help="Fock truncation of electron and bus")
    args = ap.parse_args()
    d1 = magic_detuning(1, TWO_PI * 1.1e6)[0]
    values = list(d1 * np.linspace(1 - args.span, 1 + args.span, args.points))
    table = sweep("fig3-swap", "delta", values,
                  {"n": 1, "n_motion": args.levels, "n_bus": args.levels},
                  {"sample_stride": 100}, out=args.out)
    head = [h.split(" ")[0] for h in table.header()]
    i_f, i_b = head.index("swap_fidelity"), head.index("bus_population_final")
    print(f"{'delta/delta_1':>14s} {'swap_fidelity':>14s} {'bus_population':>15s}")
    for row in table.rows:
        print(f"{row[0] / d1:14.4f} {row[i_f]:14.6f} {row[i_b]:15.3e}")


if __name__ == "__main__":
    main()
