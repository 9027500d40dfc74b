"""Run every built-in scenario and write reports under results/<name>/."""

import argparse
import time
from pathlib import Path

from equivariant_ph.harness import run_scenario
from equivariant_ph.scenarios import BUILTIN


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("names", nargs="*", help="subset of scenarios (default: all)")
    args = ap.parse_args()
    status = 0
    for name in args.names or BUILTIN:
        t0 = time.perf_counter()
        rep = run_scenario(name, Path(args.out) / name)
        dt = time.perf_counter() - t0
        print(f"{name:<20} {'PASS' if rep.passed else 'FAIL'}  {len(rep.checks):2d} checks  {dt:6.2f}s")
        for c in rep.checks:
            if not c.passed:
                print(f"    {c.name}: expected {c.expected}; got {c.computed}")
        status |= rep.exit_code
    return status


if __name__ == "__main__":
    raise SystemExit(main())
