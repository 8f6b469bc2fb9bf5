"""Command-line front end.

Exit codes: 0 success, 2 validation or configuration failure, 3 numerical failure.
"""

import argparse
import sys

from . import __version__
from .config import parse_value
from .errors import NumericalError, ValidationError
from .scenarios import SCENARIOS, get_scenario, run_scenario, sweep

GROUPS = {
    "design": ("rates", "impedance", "appendixE-reduction", "appendixC-pickup",
               "appendixD-coupling"),
    "noise": ("noise-tip-factor", "noise-ring-factor", "heating-rates"),
    "trap": ("trap-stability", "sidebands"),
}


def _overrides(name, items):
    """Parse ``key=value`` pairs against the scenario schema (``solver.`` prefix for solver keys)."""
    sc = get_scenario(name)
    params, solver = {}, {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"override {item!r} is not key=value")
        key = key.strip()
        section, _, short = key.rpartition(".")
        schema, target = (sc.solver, solver) if section == "solver" else (sc.params, params)
        if short not in schema:
            raise ValidationError(f"{name}: unknown field {key!r}")
        target[short] = parse_value(value, schema[short], key)
    return params, solver


def _print_summary(res):
    print(f"# {res.name}")
    for metric, value, unit in res.outcome.summary:
        v = f"{value:.6g}" if isinstance(value, float) else str(value)
        print(f"{metric:32s} {v:>16s} {unit}")
    for path in res.paths:
        print(f"wrote {path}")


def _run_one(name, args):
    params, solver = _overrides(name, args.set) if name else ({}, {})
    out = args.out
    if out is not None and getattr(args, "nest", False):
        out = f"{out}/{name}"
    res = run_scenario(name, params, solver, out=out, config=args.config,
                       manifest=getattr(args, "manifest", None))
    _print_summary(res)


def cmd_simulate(args):
    if args.scenario is None and args.config is None and args.manifest is None:
        raise ValidationError("give a scenario name, --config or --manifest")
    _run_one(args.scenario, args)


def cmd_group(args):
    names = GROUPS[args.command]
    chosen = [args.which] if args.which else list(names)
    for name in chosen:
        if name not in names:
            raise ValidationError(f"{args.command}: choose one of {', '.join(names)}")
        args.nest = args.which is None
        _run_one(name, args)


def cmd_sweep(args):
    params, solver = _overrides(args.scenario, args.set)
    values = [v for v in args.values.split(",") if v.strip()]
    table = sweep(args.scenario, args.param, values, params, solver, out=args.out)
    print(",".join(table.header()))
    for row in table.rows:
        print(",".join(f"{x:.6g}" if isinstance(x, float) else str(x) for x in row))


def cmd_scenarios(args):
    for name in sorted(SCENARIOS):
        print(f"{name:22s} {SCENARIOS[name].description}")


def build_parser():
    parser = argparse.ArgumentParser(prog="electrap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config with [scenario], [params], [solver]")
    common.add_argument("--out", help="output directory for CSV files and manifest")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a parameter (units allowed, e.g. g_p='1.1 MHz')")
    common.add_argument("--seedless", action="store_true",
                        help="assert deterministic execution (always true: no RNG is used)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="run a named scenario")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--manifest", help="rerun a previous manifest.json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="sweep one parameter of a scenario")
    p.add_argument("scenario")
    p.add_argument("--param", required=True, help="parameter path, e.g. n or solver.step")
    p.add_argument("--values", required=True, help="comma-separated values (units allowed)")
    p.set_defaults(func=cmd_sweep)

    for group, names in GROUPS.items():
        p = sub.add_parser(group, parents=[common], help=f"run {', '.join(names)}")
        p.add_argument("which", nargs="?", help="run only this scenario")
        p.set_defaults(func=cmd_group)

    p = sub.add_parser("scenarios", help="list scenarios")
    p.set_defaults(func=cmd_scenarios)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
