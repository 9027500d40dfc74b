"""Built-in scenarios, one per verified statement."""

from __future__ import annotations

from .harness import SCHEMA


def _sc(name, kind, description, **kw):
    return {"schema": SCHEMA, "name": name, "kind": kind, "description": description, **kw}


_DISCRETE_ALL = ["validate", "acyclic", "index_table", "folner", "whyte", "equivariance"]

# override copies for the perturbed ladder; the pair (P, a1.h) crosses into copy g+1
LADDER_OVERRIDES = [
    {"copy": "-2", "pairs": []},
    {"copy": "0", "pairs": [["P", "a1.h"]]},
    {"copy": "3", "pairs": [["P", "a1.t"]]},
]

BUILTIN = {
    "ladder-periodic": _sc(
        "ladder-periodic", "discrete",
        "Jacob's ladder, empty matching: every copy has index chi = -2",
        base="genus2_ladder_Z", radius=6, field={"core": "empty"},
        checks=_DISCRETE_ALL + ["infinitude"], folner={"N": [5, 10, 20]}),
    "ladder-perturbed": _sc(
        "ladder-perturbed", "discrete",
        "Jacob's ladder, tree-cotree core patched in three copies",
        base="genus2_ladder_Z", radius=6,
        field={"core": "tree-cotree", "overrides": LADDER_OVERRIDES},
        checks=_DISCRETE_ALL, folner={"N": [5, 10, 20]}),
    "ladder-structure": _sc(
        "ladder-structure", "discrete", "facets and orientations of the ladder window",
        base="genus2_ladder_Z", radius=3, checks=["facets", "orientation", "equivariance"],
        expect={"S": ["1", "-1"]}),
    "torus-infinitude": _sc(
        "torus-infinitude", "discrete", "chi = 0: the infinitude statement does not apply",
        base="torus_Z2", radius=3, checks=["index_table", "infinitude", "facets", "orientation"],
        expect={"infinitude": "not applicable"}),
    "f2-cover": _sc(
        "f2-cover", "discrete",
        "genus-2 surface with a free deck group: table -2 but class 0",
        base="genus2_F2", radius=4, field={"core": "empty"},
        checks=["validate", "index_table", "infinitude", "ponzi", "orientation"],
        expect={"infinitude": "no contradiction"}, ponzi={"R": 6}),
    "z5-cover": _sc(
        "z5-cover", "discrete", "finite cyclic cover: total index is chi of the finite cover",
        base="genus2_Z5", radius=3, field={"core": "empty"},
        checks=["validate", "index_table", "finite_sum", "orientation"]),
    "torus-analytic": _sc(
        "torus-analytic", "analytic", "(sin 2 pi x, sin 2 pi y): winding and Thom tables agree",
        radius=2, field={"expression": ["sin(2*pi*x)", "sin(2*pi*y)"], "offset": [0.25, 0.25]},
        checks=["tameness", "winding", "thom"], expect={"local_indices": [1, -1, -1, 1]}),
    "circle-analytic": _sc(
        "circle-analytic", "analytic", "sin 2 pi x on the line with offset 0.25",
        radius=2, field={"expression": "sin(2*pi*x)", "offset": 0.25,
                         "compare": {"expression": "2*sin(2*pi*x)"}},
        checks=["tameness", "winding", "thom", "homotopy"], expect={"local_indices": [1, -1]}),
    "circle-diffeo": _sc(
        "circle-diffeo", "diffeo", "x + 0.1 sin 2 pi x has two fixed points per domain",
        radius=3, field={"map": "x + 0.1*sin(2*pi*x)", "offset": 0.25},
        checks=["fixed_points", "class"], expect={"per_domain": 2, "local_indices": [1, -1]}),
    "circle-shift": _sc(
        "circle-shift", "diffeo", "x + 0.3 has no fixed points",
        radius=3, field={"map": "x + 0.3"}, checks=["fixed_points", "class"], expect={"per_domain": 0}),
    "torus-diffeo": _sc(
        "torus-diffeo", "diffeo", "fixed points of (x + 0.1 sin 2 pi x, y + 0.1 sin 2 pi y)",
        radius=2, field={"map": ["x + 0.1*sin(2*pi*x)", "y + 0.1*sin(2*pi*y)"], "offset": [0.25, 0.25]},
        checks=["fixed_points", "class"], expect={"per_domain": 4, "local_indices": [1, -1, -1, 1]}),
    "stokes-line": _sc(
        "stokes-line", "forms", "Stokes on unit intervals for a periodic 0-form",
        radius=3, quad=64, form={"dimension": 1, "degree": 0, "coefficients": "sin(2*pi*x) + 0.3*cos(4*pi*x)",
                                 "offset": 0.1},
        checks=["stokes"]),
    "stokes-plane": _sc(
        "stokes-plane", "forms", "Stokes on unit squares for a periodic 1-form",
        radius=3, quad=32,
        form={"dimension": 2, "degree": 1,
              "coefficients": ["exp(2*sin(2*pi*x)*cos(2*pi*y))", "sin(6*pi*x)*exp(cos(4*pi*y))"],
              "offset": [0.1, 0.2]},
        checks=["stokes"]),
    "antiderivative-cos": _sc(
        "antiderivative-cos", "forms", "cos 2 pi x has a bounded antiderivative",
        antiderivative={"f": "cos(2*pi*x)", "expect": "class zero evidence", "sup": 0.15915494309189535},
        checks=["antiderivative"]),
    "antiderivative-one": _sc(
        "antiderivative-one", "forms", "1 has a linearly growing antiderivative",
        antiderivative={"f": "1", "expect": "class nonzero evidence", "slope": 1.0},
        checks=["antiderivative"]),
    "whyte-z": _sc(
        "whyte-z", "coinvariants", "delta_0 passes Whyte on Z; the ones function fails on Z and Z^2",
        phi={"group": {"family": "CyclicZ"}, "constant": "0", "deviations": [["0", "1"]]},
        whyte={"C": 1, "r": 1, "N_max": 50},
        refute_ones={"groups": [{"family": "CyclicZ"}, {"family": "FreeAbelian", "rank": 2}],
                     "C": [1, 2, 4, 8], "r": [1, 2, 3]},
        checks=["whyte_certify", "whyte_refute_ones"]),
    "ponzi-f2": _sc(
        "ponzi-f2", "coinvariants", "explicit Ponzi flow trivializing the ones function on F_2",
        ponzi={"k": 2, "R": 8}, checks=["ponzi"]),
}
