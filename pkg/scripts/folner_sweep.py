"""Følner means of the perturbed ladder index table.

The table is -2 on every copy except a few overridden ones, so the mean over
F_N = [-N, N] is -2 + (sum of deviations)/(2N+1). Prints exact fractions.
"""

import argparse
from fractions import Fraction

from equivariant_ph.coinvariants import folner_mean
from equivariant_ph.complexes import build_window, library_complex
from equivariant_ph.groups import folner_set
from equivariant_ph.discrete import DiscreteField, critical_index_table
from equivariant_ph.scenarios import LADDER_OVERRIDES

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--N", type=int, nargs="+", default=[0, 1, 2, 5, 10, 20, 50, 100])
ap.add_argument("--core", default="tree-cotree", choices=["tree-cotree", "empty"])
args = ap.parse_args()

base = library_complex("genus2_ladder_Z")
field = DiscreteField.from_record(base, {"core": args.core, "overrides": LADDER_OVERRIDES})
table, rep = critical_index_table(field, build_window(base, R=6))
print("copy  index")
for g, v in table.items():
    print(f"{str(g):>4}  {v:5d}")
total = sum(rep.deviation.values())
print(f"\nsum of deviations: {total}")
print(f"{'N':>4}  {'mean':>12}  {'predicted':>12}")
for N in args.N:
    m = folner_mean(rep, N)
    F = set(folner_set(rep.group, N))
    pred = rep.constant + Fraction(sum(v for g, v in rep.deviation.items() if g in F), 2 * N + 1)
    print(f"{N:4d}  {str(m):>12}  {str(pred):>12}")
