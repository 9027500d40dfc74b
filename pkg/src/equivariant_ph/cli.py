"""Command line: ``eqph run|index-table|whyte|stokes <config>``, ``eqph list-scenarios``.

Exit codes: 0 all checks pass, 1 a check failed, 2 input or config error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, InputError
from .harness import Scenario, run_scenario

# checks each subcommand restricts a scenario to
_SUBSETS = {
    "index-table": ("index_table", "winding", "thom", "fixed_points", "class"),
    "whyte": ("whyte", "whyte_certify", "whyte_refute_ones"),
    "stokes": ("stokes",),
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eqph", description="Equivariant index checks on periodic covers.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, hlp in (("run", "run every check of a scenario"),
                      ("index-table", "compute the index table only"),
                      ("whyte", "Whyte certification/refutation only"),
                      ("stokes", "Stokes check of the scenario's form only")):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("config", help="built-in scenario name or path to a JSON config")
        sp.add_argument("--radius", type=int, default=None, help="override the window radius")
        sp.add_argument("--quad", type=int, default=None, help="override panels per unit length")
        sp.add_argument("--out-dir", default=".", help="directory for CSV/JSON reports (default: .)")
        sp.add_argument("--seed", type=int, default=None, help="seed for sampled checks")
        sp.add_argument("-q", "--quiet", action="store_true", help="only print the overall verdict")
    sub.add_parser("list-scenarios", help="list built-in scenarios")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list-scenarios":
        from .scenarios import BUILTIN

        width = max(map(len, BUILTIN))
        for name, rec in BUILTIN.items():
            print(f"{name:<{width}}  {rec['kind']:<12}  {rec.get('description', '')}")
        return 0
    try:
        sc = Scenario.load(args.config)
        only = _SUBSETS.get(args.command)
        if only is not None and not any(c in only for c in sc.checks):
            raise ConfigError(f"scenario {sc.name} has no checks for '{args.command}'")
        rep = run_scenario(sc, args.out_dir, args.radius, args.quad, args.seed, only)
    except (ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        for c in rep.checks:
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: expected {c.expected}; got {c.computed}")
    print(f"{rep.scenario}: {'PASS' if rep.passed else 'FAIL'}")
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
