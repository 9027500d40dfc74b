"""Rounding gap of Thom-quadrature index tables against panel count and eps."""

import argparse

from equivariant_ph.analytic import AnalyticField, winding_index_table
from equivariant_ph.integral import default_thom_eps, index_via_thom

FIELDS = {
    "circle": (AnalyticField("sin(2*pi*x) + 0.4*cos(4*pi*x)"), 0.1),
    "torus": (AnalyticField(["sin(2*pi*x)", "sin(2*pi*y)"]), (0.25, 0.25)),
}

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("field", choices=sorted(FIELDS), nargs="?", default="torus")
ap.add_argument("--quad", type=int, nargs="+", default=[8, 16, 32, 64])
ap.add_argument("--R", type=int, default=2)
args = ap.parse_args()

v, off = FIELDS[args.field]
w = winding_index_table(v, args.R, off)
eps0 = default_thom_eps(v, args.R, off)
print(f"{'quad':>5}  {'eps':>8}  {'max gap':>10}  agrees")
for q in args.quad:
    for eps in (eps0, eps0 / 2, eps0 / 4):
        try:
            t = index_via_thom(v, args.R, eps, q, off, max_gap=0.5)
            print(f"{q:5d}  {eps:8.4f}  {t.max_gap:10.2e}  {t.same_entries(w)}")
        except Exception as exc:
            print(f"{q:5d}  {eps:8.4f}  {'-':>10}  {exc}")
