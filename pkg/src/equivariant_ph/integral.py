"""Integration of bounded forms over fundamental domains of the flat models.

The integral of a top form lands in bounded functions on the deck group:
``g -> integral of omega over gD``. Quadrature is composite 4-point
Gauss-Legendre on equal panels (64 per unit length in dimension 1, 32 x 32 per
unit square in dimension 2), summed with ``math.fsum`` in a fixed order so
results are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy as sp
from numpy.polynomial.legendre import leggauss
from scipy.optimize import minimize_scalar

from .analytic import (
    AnalyticField,
    _box,
    _offset,
    certify_tameness,
    copy_of,
    domain_box,
    model_group,
    window_copies,
    _bounding_box,
    _far_copy,
)
from .coinvariants import CoinvariantRep, class_equal, class_reduce, exact
from .errors import InputError, QuadratureError
from .expressions import COORDS, compile_exprs, parse
from .groups import GroupElement
from .tables import IndexTable

GL_ORDER = 4
DEFAULT_PANELS = {1: 64, 2: 32}
DEFAULT_REFINE = {1: 128, 2: 16}


def gl_nodes(a: float, b: float, panels: int, order: int = GL_ORDER):
    """Nodes and weights of the composite Gauss-Legendre rule on [a, b]."""
    x, w = leggauss(order)
    edges = a + (b - a) * np.arange(panels + 1) / panels
    edges[-1] = b
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = (lo + hi) / 2 + (hi - lo) / 2 * x
    weights = (hi - lo) / 2 * w
    return nodes.ravel(), weights.ravel()


def quad_1d(fn, a: float, b: float, panels: int) -> float:
    x, w = gl_nodes(a, b, panels)
    return math.fsum(w * fn(x))


def quad_2d(fn, box, panels: int) -> float:
    (a, b), (c, d) = box
    x, wx = gl_nodes(a, b, panels)
    y, wy = gl_nodes(c, d, panels)
    X, Y = np.meshgrid(x, y, indexing="ij")
    return math.fsum((np.outer(wx, wy) * fn(X, Y)).ravel())


# -- forms ------------------------------------------------------------------------------


class DifferentialForm:
    """A p-form on R^n with expression coefficients.

    Coefficient layout: a 0-form is ``[h]``; a 1-form on R is ``[f]`` for
    ``f dx``; a 1-form on R^2 is ``[P, Q]`` for ``P dx + Q dy``; a 2-form is
    ``[f]`` for ``f dx^dy``.
    """

    def __init__(self, dimension: int, degree: int, coefficients, deviation_box=None):
        if dimension not in (1, 2) or not 0 <= degree <= dimension:
            raise InputError("need dimension 1 or 2 and 0 <= degree <= dimension")
        if isinstance(coefficients, (str, sp.Basic, int, float)):
            coefficients = [coefficients]
        expected = 2 if (dimension == 2 and degree == 1) else 1
        if len(coefficients) != expected:
            raise InputError(f"a {degree}-form on R^{dimension} has {expected} coefficient(s)")
        self.dimension = dimension
        self.degree = degree
        self.coefficients = tuple(parse(c, dimension) for c in coefficients)
        self.deviation_box = None if deviation_box is None else _box(deviation_box, dimension)
        self._f = compile_exprs(self.coefficients, dimension)

    @property
    def is_top(self) -> bool:
        return self.degree == self.dimension

    def coeffs(self, *coords):
        return self._f(*coords)

    def d(self) -> DifferentialForm | None:
        """Exterior derivative, computed symbolically (None for top forms)."""
        n, p = self.dimension, self.degree
        x, y = COORDS
        if p == n:
            return None
        if n == 1:
            return DifferentialForm(1, 1, [sp.diff(self.coefficients[0], x)], self.deviation_box)
        if p == 0:
            h = self.coefficients[0]
            return DifferentialForm(2, 1, [sp.diff(h, x), sp.diff(h, y)], self.deviation_box)
        P, Q = self.coefficients
        return DifferentialForm(2, 2, [sp.diff(Q, x) - sp.diff(P, y)], self.deviation_box)

    def to_record(self) -> dict:
        return {"dimension": self.dimension, "degree": self.degree,
                "coefficients": [str(c) for c in self.coefficients]}

    @classmethod
    def from_record(cls, rec) -> DifferentialForm:
        return cls(int(rec["dimension"]), int(rec["degree"]), rec["coefficients"], rec.get("deviation_box"))

    def __repr__(self):
        return f"DifferentialForm(n={self.dimension}, p={self.degree}, {list(map(str, self.coefficients))})"


@dataclass
class BoundednessReport:
    sup_omega: float
    sup_domega: float
    sup_coefficient_gradient: float
    periodicity_violations: list

    @property
    def periodic(self) -> bool:
        return not self.periodicity_violations


def _grid_points(bx, per_unit):
    axes = [np.linspace(a, b, max(2, int(math.ceil(per_unit * (b - a)))) + 1) for a, b in bx]
    return np.meshgrid(*axes, indexing="ij")


def boundedness_estimate(omega: DifferentialForm, box, grid: int = 200, h: float = 1e-5,
                         seed: int = 0) -> BoundednessReport:
    """Sampled sup|omega| and sup|d omega|, with d by central differences.

    Advisory only. Also reports the sup of the coefficient gradients and any
    sampled failures of lattice periodicity outside the deviation box.
    """
    n = omega.dimension
    bx = _box(box, n)
    C = _grid_points(bx, grid)
    vals = np.stack(omega.coeffs(*C), axis=-1)
    sup_w = float(np.linalg.norm(vals, axis=-1).max())
    grads = []  # grads[k][i] = d coefficient_k / d x_i
    for k in range(len(omega.coefficients)):
        row = []
        for i in range(n):
            up = [c + (h if j == i else 0.0) for j, c in enumerate(C)]
            dn = [c - (h if j == i else 0.0) for j, c in enumerate(C)]
            row.append((omega.coeffs(*up)[k] - omega.coeffs(*dn)[k]) / (2 * h))
        grads.append(row)
    sup_grad = float(max(np.abs(g).max() for row in grads for g in row))
    p = omega.degree
    if p == n:
        dw = 0.0
    elif n == 1:
        dw = float(np.abs(grads[0][0]).max())
    elif p == 0:
        dw = float(np.hypot(grads[0][0], grads[0][1]).max())
    else:
        dw = float(np.abs(grads[1][0] - grads[0][1]).max())
    viol = _form_periodicity(omega, bx, seed)
    return BoundednessReport(sup_w, dw, sup_grad, viol)


def _form_periodicity(omega: DifferentialForm, bx, seed: int, samples: int = 400, tol: float = 1e-9):
    n = omega.dimension
    rng = np.random.default_rng(seed)
    lo = np.array([a for a, _ in bx])
    hi = np.array([b for _, b in bx])
    pts = lo + (hi - lo) * rng.random((samples, n))

    def inside(p):
        if omega.deviation_box is None:
            return np.zeros(len(p), dtype=bool)
        m = np.ones(len(p), dtype=bool)
        for i, (a, b) in enumerate(omega.deviation_box):
            m &= (p[:, i] >= a) & (p[:, i] <= b)
        return m

    bad = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        ok = ~inside(pts) & ~inside(pts + e)
        f0 = np.stack(omega.coeffs(*pts.T), axis=-1)
        f1 = np.stack(omega.coeffs(*(pts + e).T), axis=-1)
        diff = np.abs(f1 - f0).max(axis=-1)
        for k in np.nonzero(ok & (diff > tol))[0]:
            bad.append((tuple(pts[k]), i, float(diff[k])))
    return bad


def _as_copy(g, n: int) -> GroupElement:
    return model_group(n).element(g)


def integrate_over_domain(omega: DifferentialForm, g, quad: int | None = None, offset=None) -> float:
    """Integral of a top form over the domain copy gD."""
    if not omega.is_top:
        raise InputError("only top-degree forms integrate over domains")
    n = omega.dimension
    panels = quad or DEFAULT_PANELS[n]
    bx = domain_box(_as_copy(g, n), offset)
    if n == 1:
        return quad_1d(lambda x: omega.coeffs(x)[0], *bx[0], panels)
    return quad_2d(lambda X, Y: omega.coeffs(X, Y)[0], bx, panels)


def integral_table(omega: DifferentialForm, R: int = 2, quad: int | None = None, offset=None):
    """g -> integral over gD on ball(R - 1)."""
    return {g: integrate_over_domain(omega, g, quad, offset) for g in window_copies(omega.dimension, R)}


# -- Stokes -------------------------------------------------------------------------------


@dataclass
class FacetTerm:
    g: GroupElement
    s: GroupElement  # the facet is gD meet gsD
    value: float


@dataclass
class StokesReport:
    panels: int
    residuals: dict
    facet_terms: list[FacetTerm]
    pair_residual: float
    pairs: int
    telescoping_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def _facet_terms(omega: DifferentialForm, g: GroupElement, panels: int, offset) -> list[FacetTerm]:
    n = omega.dimension
    spec = model_group(n)
    bx = domain_box(g, offset)
    if n == 1:
        (a, b), = bx
        h = lambda t: float(omega.coeffs(np.array([t]))[0][0])
        return [FacetTerm(g, spec.element(1), h(b)), FacetTerm(g, spec.element(-1), -h(a))]
    (x0, x1), (y0, y1) = bx
    P = lambda X, Y: omega.coeffs(X, Y)[0]
    Q = lambda X, Y: omega.coeffs(X, Y)[1]
    bottom = quad_1d(lambda x: P(x, np.full_like(x, y0)), x0, x1, panels)
    top = quad_1d(lambda x: P(x, np.full_like(x, y1)), x0, x1, panels)
    right = quad_1d(lambda y: Q(np.full_like(y, x1), y), y0, y1, panels)
    left = quad_1d(lambda y: Q(np.full_like(y, x0), y), y0, y1, panels)
    return [FacetTerm(g, spec.element((0, -1)), bottom), FacetTerm(g, spec.element((1, 0)), right),
            FacetTerm(g, spec.element((0, 1)), -top), FacetTerm(g, spec.element((-1, 0)), -left)]


def stokes_check(omega: DifferentialForm, R: int = 3, quad: int | None = None, offset=None) -> StokesReport:
    """Compare the integral of d(omega) over each gD with its facet terms.

    Also pairs every facet term (g, s) with (gs, s^-1), which must cancel,
    and checks that the window total reduces to the facets on the window's
    outer boundary.
    """
    n = omega.dimension
    if omega.degree != n - 1:
        raise InputError("Stokes check needs an (n-1)-form")
    panels = quad or DEFAULT_PANELS[n]
    dw = omega.d()
    copies = window_copies(n, R)
    inner = set(copies)
    residuals = {}
    terms = []
    lhs_total = []
    for g in copies:
        lhs = integrate_over_domain(dw, g, panels, offset)
        ft = _facet_terms(omega, g, panels, offset)
        residuals[g] = abs(lhs - math.fsum(t.value for t in ft))
        terms.extend(ft)
        lhs_total.append(lhs)
    by_key = {(t.g, t.s): t.value for t in terms}
    pair_res = 0.0
    pairs = 0
    outer = []
    for t in terms:
        partner = (t.g * t.s, t.s.inverse())
        if partner in by_key:
            pairs += 1
            pair_res = max(pair_res, abs(t.value + by_key[partner]))
        if t.g * t.s not in inner:
            outer.append(t.value)
    tele = abs(math.fsum(lhs_total) - math.fsum(outer))
    return StokesReport(panels, residuals, terms, pair_res, pairs // 2, tele)


def stokes_convergence(omega: DifferentialForm, panels=(1, 2, 4, 8), offset=None, R: int = 2):
    """Max per-domain Stokes residual for each panel count."""
    return [stokes_check(omega, R, p, offset).max_residual for p in panels]


def convergence_ratios(residuals, floor: float = 1e-13) -> list[float]:
    """Successive improvement factors, ignoring pairs already at the noise floor."""
    out = []
    for a, b in zip(residuals, residuals[1:]):
        if a > floor and b > floor:
            out.append(a / b)
    return out


# -- the M = R antiderivative test ---------------------------------------------------------------


@dataclass
class AntiderivativeReport:
    X: int
    sup_abs_h: float
    argsup: float
    left_slope: float
    right_slope: float
    growth_ratio: float
    folner_mean: float
    verdict: str
    consistent_with_class: bool | None = None

    @property
    def slope(self) -> float:
        return 0.5 * (self.left_slope + self.right_slope)


def antiderivative_bounded(f, X: int = 50, quad: int = 64, phi: CoinvariantRep | None = None,
                           slope_tol: float = 1e-6, phi_tol: float = 1e-4) -> AntiderivativeReport:
    """Study h(x) = integral_0^x f on [-X, X].

    Bounded h (vanishing tail slope and a sup that does not grow from
    [-X/2, X/2] to [-X, X]) is evidence that the per-domain integrals of f
    are zero in the coinvariants; linear growth with slope c matches the class
    c * [1]. With ``phi`` the slope is compared to its class coefficient.
    """
    X = int(math.ceil(X))
    if X < 4:
        raise InputError("X must be at least 4")
    expr = parse(f, 1)
    fn = compile_exprs([expr], 1)
    F = lambda x: fn(x)[0]
    ks = np.arange(-X, X)
    # per-panel integrals, panel boundaries at k + j / quad
    x, w = gl_nodes(-X, X, 2 * X * quad)
    contrib = (w * F(x)).reshape(2 * X * quad, GL_ORDER).sum(axis=1)
    bounds = -X + np.arange(2 * X * quad + 1) / quad
    zero_idx = X * quad
    H = np.empty(len(bounds))
    H[zero_idx] = 0.0
    H[zero_idx + 1:] = np.cumsum(contrib[zero_idx:])
    H[:zero_idx] = -np.cumsum(contrib[:zero_idx][::-1])[::-1]
    per_domain = contrib.reshape(2 * X, quad).sum(axis=1)

    def h_at(t: float) -> float:
        i = int(np.clip(np.floor((t + X) * quad), 0, len(bounds) - 2))
        a = bounds[i]
        if t == a:
            return float(H[i])
        xs, ws = gl_nodes(a, t, 1, 8)
        return float(H[i] + math.fsum(ws * F(xs)))

    absH = np.abs(H)
    best_i = int(np.argmax(absH))
    sup, arg = float(absH[best_i]), float(bounds[best_i])
    for i in {max(best_i - 1, 0), best_i, min(best_i + 1, len(bounds) - 1)}:
        lo = bounds[max(i - 1, 0)]
        hi = bounds[min(i + 1, len(bounds) - 1)]
        res = minimize_scalar(lambda t: -abs(h_at(t)), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        if -res.fun > sup:
            sup, arg = float(-res.fun), float(res.x)
    half = np.abs(bounds) <= X / 2
    sup_half = float(absH[half].max())
    growth = float(absH.max() / sup_half) if sup_half > 0 else (1.0 if absH.max() == 0 else math.inf)
    Hk = H[::quad]  # h at the integers -X..X
    kk = np.arange(-X, X + 1)
    right = kk >= X // 2
    left = kk <= -(X // 2)
    rs = float(np.polyfit(kk[right], Hk[right], 1)[0])
    ls = float(np.polyfit(kk[left], Hk[left], 1)[0])
    N = X - 1
    mask = (ks >= -N) & (ks <= N)
    fmean = float(math.fsum(per_domain[mask]) / mask.sum())
    slope = 0.5 * (ls + rs)
    if abs(slope) > slope_tol:
        verdict = "class nonzero evidence"
    elif growth <= 1 + 1e-6 or sup <= 1e-12:
        verdict = "class zero evidence"
    else:
        verdict = "inconclusive"
    consistent = None
    if phi is not None:
        cls = class_reduce(phi)
        if cls.kind != "ones":
            raise InputError("comparison needs a class over an infinite amenable group")
        consistent = abs(slope - float(cls.value)) < phi_tol
    return AntiderivativeReport(X, sup, arg, ls, rs, growth, fmean, verdict, consistent)


# -- Thom bump and the index as an integral -------------------------------------------------------


def smoothstep(s):
    """Quintic smoothstep 6s^5 - 15s^4 + 10s^3, clamped to [0, 1]."""
    s = np.clip(s, 0.0, 1.0)
    return s**3 * (10 - 15 * s + 6 * s * s)


def smoothstep_prime(s):
    s = np.asarray(s, dtype=float)
    return np.where((s > 0) & (s < 1), 30 * s**2 * (1 - s) ** 2, 0.0)


@dataclass(frozen=True)
class ThomBump:
    """Radial fiber density of unit mass supported in the ball of radius eps/2.

    n = 1: w(u) = S'(|u|/b) / (2b); n = 2: w(u) = S'(|u|^2/b^2) / (pi b^2),
    with b = eps/2 and S the quintic smoothstep. The radial profile
    rho = S(|u|/b) (resp. S(|u|^2/b^2)) is 0 at the zero section and 1 beyond
    b, and w is the fiber part of d(rho) wedge the angular form.
    """

    eps: float
    n: int

    def __post_init__(self):
        if self.eps <= 0 or self.n not in (1, 2):
            raise InputError("ThomBump needs eps > 0 and n in {1, 2}")

    @property
    def support_radius(self) -> float:
        return self.eps / 2

    def density(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        b = self.support_radius
        if self.n == 1:
            r = np.abs(u[..., 0] if u.ndim and u.shape[-1] == 1 else u)
            return smoothstep_prime(r / b) / (2 * b)
        r2 = (u**2).sum(axis=-1)
        return smoothstep_prime(r2 / b**2) / (np.pi * b * b)

    def profile(self, r) -> np.ndarray:
        b = self.support_radius
        r = np.asarray(r, dtype=float)
        return smoothstep(r / b) if self.n == 1 else smoothstep(r**2 / b**2)

    def fiber_mass(self) -> float:
        """Integral of the density over the fiber; the integrand is a
        polynomial of degree <= 9 in r, integrated exactly by 5-point Gauss-Legendre."""
        b = self.support_radius
        x, w = gl_nodes(0.0, b, 1, 5)
        if self.n == 1:
            return 2 * math.fsum(w * smoothstep_prime(x / b) / (2 * b))
        return math.fsum(w * smoothstep_prime(x**2 / b**2) / (np.pi * b * b) * 2 * np.pi * x)


def _thom_domain(v: AnalyticField, bump: ThomBump, g: GroupElement, panels: int, offset, refine: int) -> float:
    n = v.dimension
    b = bump.support_radius
    bx = domain_box(g, offset)
    xw = [gl_nodes(a, c, panels) for a, c in bx]

    def integrand(P):
        return bump.density(v(P)) * v.jacobian_det(P)

    if n == 1:
        x, w = xw[0]
        P = x[:, None]
        vals = integrand(P)
        mags = v.norm(P).reshape(panels, GL_ORDER)
        lip = np.abs(v.jacobian(P)).reshape(panels, GL_ORDER).max(axis=1)
        width = (bx[0][1] - bx[0][0]) / panels
        contrib = (w * vals).reshape(panels, GL_ORDER).sum(axis=1)
        hot = mags.min(axis=1) - 1.25 * lip * width < b
        edges = bx[0][0] + (bx[0][1] - bx[0][0]) * np.arange(panels + 1) / panels
        edges[-1] = bx[0][1]
        for i in np.nonzero(hot)[0]:
            xs, ws = gl_nodes(edges[i], edges[i + 1], refine)
            contrib[i] = math.fsum(ws * integrand(xs[:, None]))
        return math.fsum(contrib)
    (x, wx), (y, wy) = xw
    X, Y = np.meshgrid(x, y, indexing="ij")
    P = np.stack([X, Y], axis=-1)
    vals = integrand(P) * np.outer(wx, wy)
    shape4 = (panels, GL_ORDER, panels, GL_ORDER)
    contrib = vals.reshape(shape4).sum(axis=(1, 3))
    mags = v.norm(P).reshape(shape4).min(axis=(1, 3))
    lip = np.linalg.norm(v.jacobian(P), axis=(-2, -1)).reshape(shape4).max(axis=(1, 3))
    diam = math.hypot(bx[0][1] - bx[0][0], bx[1][1] - bx[1][0]) / panels
    hot = mags - 1.25 * lip * diam < b
    ex = [a + (c - a) * np.arange(panels + 1) / panels for a, c in bx]
    for e_, (a, c) in zip(ex, bx):
        e_[-1] = c
    for i, j in zip(*np.nonzero(hot)):
        contrib[i, j] = quad_2d(lambda XX, YY: integrand(np.stack([XX, YY], axis=-1)),
                                [(ex[0][i], ex[0][i + 1]), (ex[1][j], ex[1][j + 1])], refine)
    return math.fsum(contrib.ravel())


def default_thom_eps(v: AnalyticField, R: int, offset=None) -> float:
    """Half the certified tameness eps on the window, which keeps the bump
    support inside the delta-balls."""
    copies = window_copies(v.dimension, R)
    far = _far_copy(v, offset)
    verdict = certify_tameness(v, _bounding_box(list(copies) + [far], offset, v.dimension), offset)
    if not verdict.strongly_tame:
        raise InputError(f"field is not strongly tame ({verdict.status}: {verdict.reason})")
    return 0.5 * verdict.eps


def index_via_thom(v: AnalyticField, R: int = 2, eps: float | None = None, quad: int | None = None,
                   offset=None, refine: int | None = None, max_gap: float = 0.1) -> IndexTable:
    """Per-copy integral of w(v(x)) det Dv(x), rounded to integers.

    Panels where the bump can be nonzero are refined ``refine``-fold
    (default 128 on the line, 16 in the plane). A rounding gap above
    ``max_gap`` raises :class:`QuadratureError`.
    """
    n = v.dimension
    panels = quad or DEFAULT_PANELS[n]
    if refine is None:
        # the bump profile is only C^2 at its edges, so GL converges algebraically there
        refine = DEFAULT_REFINE[n]
    if eps is None:
        eps = default_thom_eps(v, R, offset)
    bump = ThomBump(eps, n)
    copies = window_copies(n, R)
    far = _far_copy(v, offset)
    raw, vals, gaps = {}, {}, {}
    for g in list(copies) + ([] if far in copies else [far]):
        r = _thom_domain(v, bump, g, panels, offset, refine)
        k = round(r)
        gap = abs(r - k)
        if gap > max_gap:
            raise QuadratureError(f"copy {g}: value {r:.6g} is {gap:.3g} away from an integer")
        raw[g], vals[g], gaps[g] = r, int(k), gap
    periodic = vals[far]
    keep = set(copies)
    return IndexTable(model_group(n), {g: vals[g] for g in copies}, "thom-quadrature", periodic,
                      {g: raw[g] for g in keep}, {g: gaps[g] for g in keep})


@dataclass
class HomotopyVerdict:
    status: str  # "equal" | "different" | "not comparable"
    reason: str = ""
    table_v: IndexTable | None = None
    table_w: IndexTable | None = None

    @property
    def equal(self) -> bool:
        return self.status == "equal"


def homotopy_invariance_check(v: AnalyticField, w: AnalyticField, R: int = 2, eps: float | None = None,
                              quad: int | None = None, offset=None, seed: int = 0) -> HomotopyVerdict:
    """Compare the Thom index classes of v and w along t v + (1 - t) w.

    The straight-line homotopy stays periodic outside a finite box, with
    bounded derivative, exactly when both ends do.
    """
    if v.dimension != w.dimension:
        return HomotopyVerdict("not comparable", "dimensions differ")
    n = v.dimension
    probe = _bounding_box(window_copies(n, R + 2), offset, n)
    for f, name in ((v, "v"), (w, "w")):
        if f.periodicity_violations(probe, seed=seed):
            return HomotopyVerdict("not comparable", f"{name} is not periodic outside its deviation box")
    try:
        tv = index_via_thom(v, R, eps, quad, offset)
        tw = index_via_thom(w, R, eps, quad, offset)
    except InputError as exc:
        return HomotopyVerdict("not comparable", str(exc))
    same = class_equal(tv.to_coinvariant(), tw.to_coinvariant())
    return HomotopyVerdict("equal" if same else "different", "", tv, tw)
