"""Chain and spin-map fidelities against the electron heating rate.

Usage: python3 scripts/heating_scan.py [OUT_DIR] [--rates R1,R2,...]
"""

import argparse

from electrap.scenarios import sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", nargs="?", default="results/sweeps")
    ap.add_argument("--rates", default="0,2000,4000,8100,16000")
    ap.add_argument("--model", default="raising", choices=("raising", "symmetric"))
    args = ap.parse_args()
    rates = [float(r) for r in args.rates.split(",")]
    for name, metric in (("fig3-swap-n1", "swap_fidelity"), ("spin-motion-map", "map_fidelity")):
        table = sweep(name, "heating", rates, {"heating_model": args.model}, out=args.out)
        col = [h.split(" ")[0] for h in table.header()].index(metric)
        print(f"# {name} ({args.model} heating)")
        for row in table.rows:
            print(f"{row[0]:10.0f} 1/s  {metric} = {row[col]:.6f}")


if __name__ == "__main__":
    main()
