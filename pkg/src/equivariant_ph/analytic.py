"""Smooth vector fields on the flat models R and R^2.

Fields are closed-form expressions, periodic under the unit lattice outside an
optional finite deviation box. Fundamental domains are unit intervals or
squares shifted by an offset, so copy g of the domain is
``[g + offset, g + 1 + offset)`` coordinatewise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import sympy as sp
from scipy.optimize import brentq, minimize_scalar

from .errors import ContourError, InputError
from .expressions import COORDS, compile_exprs, parse
from .groups import GroupElement, GroupSpec, ball, cyclic_z, free_abelian
from .tables import IndexTable

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
MIN_SAMPLES = 64
MAX_SAMPLES = 8192


def _box(box, n: int) -> list[tuple[float, float]]:
    if n == 1 and len(box) == 2 and np.isscalar(box[0]):
        box = [box]
    out = [(float(a), float(b)) for a, b in box]
    if len(out) != n or any(b <= a for a, b in out):
        raise InputError(f"bad box {box!r} for dimension {n}")
    return out


def _offset(offset, n: int) -> np.ndarray:
    if offset is None:
        return np.zeros(n)
    off = np.atleast_1d(np.asarray(offset, dtype=float))
    if off.shape != (n,):
        raise InputError(f"offset must have {n} entries")
    return off


class AnalyticField:
    """v: R^n -> R^n from expression strings, n in {1, 2}."""

    def __init__(self, components, deviation_box=None, name: str | None = None):
        if isinstance(components, (str, sp.Basic, int, float)):
            components = [components]
        n = len(components)
        if n not in (1, 2):
            raise InputError("fields must have 1 or 2 components")
        self.dimension = n
        self.exprs = tuple(parse(c, n) for c in components)
        self.deviation_box = None if deviation_box is None else _box(deviation_box, n)
        self.name = name or ", ".join(map(str, self.exprs))
        self._f = compile_exprs(self.exprs, n)
        jac = [sp.diff(e, v) for e in self.exprs for v in COORDS[:n]]
        self._jac = compile_exprs(jac, n)

    def _coords(self, p):
        p = np.asarray(p, dtype=float)
        if self.dimension == 1 and (p.ndim == 0 or p.shape[-1] != 1):
            p = p[..., None]
        if p.shape[-1] != self.dimension:
            raise InputError(f"points must have {self.dimension} coordinates")
        return p, [p[..., i] for i in range(self.dimension)]

    def __call__(self, p) -> np.ndarray:
        _, cs = self._coords(p)
        return np.stack(self._f(*cs), axis=-1)

    def norm(self, p) -> np.ndarray:
        return np.linalg.norm(self(p), axis=-1)

    def jacobian(self, p) -> np.ndarray:
        """Exact (symbolic) Jacobian, shape (..., n, n)."""
        p, cs = self._coords(p)
        n = self.dimension
        return np.stack(self._jac(*cs), axis=-1).reshape(p.shape[:-1] + (n, n))

    def jacobian_fd(self, p, h: float = 1e-5) -> np.ndarray:
        """Central finite-difference Jacobian."""
        p, _ = self._coords(p)
        cols = []
        for i in range(self.dimension):
            e = np.zeros(self.dimension)
            e[i] = h
            cols.append((self(p + e) - self(p - e)) / (2 * h))
        return np.stack(cols, axis=-1)

    def jacobian_det(self, p) -> np.ndarray:
        return np.linalg.det(self.jacobian(p))

    @property
    def is_identically_zero(self) -> bool:
        return all(sp.simplify(e) == 0 for e in self.exprs)

    def in_deviation_box(self, p) -> np.ndarray:
        p, _ = self._coords(p)
        if self.deviation_box is None:
            return np.zeros(p.shape[:-1], dtype=bool)
        inside = np.ones(p.shape[:-1], dtype=bool)
        for i, (a, b) in enumerate(self.deviation_box):
            inside &= (p[..., i] >= a) & (p[..., i] <= b)
        return inside

    def periodicity_violations(self, box, samples: int = 400, seed: int = 0, tol: float = 1e-9):
        """Sampled points x (with x and x + e_i off the deviation box) where v(x) != v(x + e_i)."""
        n = self.dimension
        bx = _box(box, n)
        rng = np.random.default_rng(seed)
        lo = np.array([a for a, _ in bx])
        hi = np.array([b for _, b in bx])
        pts = lo + (hi - lo) * rng.random((samples, n))
        bad = []
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            ok = ~self.in_deviation_box(pts) & ~self.in_deviation_box(pts + e)
            diff = np.abs(self(pts + e) - self(pts)).max(axis=-1)
            for k in np.nonzero(ok & (diff > tol))[0]:
                bad.append((tuple(pts[k]), i, float(diff[k])))
        return bad

    def to_record(self) -> dict:
        rec = {"dimension": self.dimension, "expression": [str(e) for e in self.exprs]}
        if self.deviation_box is not None:
            rec["deviation_box"] = [list(b) for b in self.deviation_box]
        return rec

    def __repr__(self):
        return f"AnalyticField([{self.name}])"


def model_group(n: int) -> GroupSpec:
    return cyclic_z() if n == 1 else free_abelian(2)


def domain_box(g: GroupElement, offset=None) -> list[tuple[float, float]]:
    """Copy g of the unit domain. The upper end is computed as the lower end of
    the next copy so that shared walls are bitwise identical."""
    c = np.atleast_1d(np.asarray(g.nf, dtype=float))
    off = _offset(offset, len(c))
    return [(c[i] + off[i], (c[i] + 1) + off[i]) for i in range(len(c))]


def copy_of(point, offset, spec: GroupSpec) -> GroupElement:
    p = np.atleast_1d(np.asarray(point, dtype=float))
    k = np.floor(p - _offset(offset, len(p))).astype(int)
    return spec.element(int(k[0]) if len(k) == 1 else tuple(int(a) for a in k))


# -- zeros ---------------------------------------------------------------------------


@dataclass
class Zero:
    point: np.ndarray
    residual: float
    jac_det: float
    degenerate: bool = False

    @property
    def x(self) -> float:
        return float(self.point[0])


@dataclass
class ZeroSet:
    zeros: list[Zero]
    box: list[tuple[float, float]]
    diagnostics: list[str] = field(default_factory=list)

    @property
    def points(self) -> np.ndarray:
        n = len(self.box)
        return np.array([z.point for z in self.zeros]).reshape(-1, n)

    @property
    def delta(self) -> float:
        """Half the minimum pairwise distance (inf for fewer than two zeros)."""
        P = self.points
        if len(P) < 2:
            return math.inf
        d = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1)
        d[np.diag_indices(len(P))] = np.inf
        return float(d.min() / 2)

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def __len__(self):
        return len(self.zeros)


def _inside(p, box) -> bool:
    return all(a <= p[i] < b for i, (a, b) in enumerate(box))


def _newton(v: AnalyticField, x0: np.ndarray):
    x = np.array(x0, dtype=float)
    fx = v(x)
    nf = float(np.linalg.norm(fx))
    for _ in range(NEWTON_MAX_ITER):
        if nf <= 1e-15:
            break
        J = v.jacobian(x)
        try:
            step = np.linalg.solve(J, fx)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, fx, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            break
        lam = 1.0
        while lam > 1e-4:
            xn = x - lam * step
            fn = v(xn)
            nn = float(np.linalg.norm(fn))
            if nn < nf:
                break
            lam /= 2
        else:
            break
        x, fx, nf = xn, fn, nn
        if np.linalg.norm(lam * step) < 1e-16:
            break
    return x, nf


def _dedup_add(found: list[Zero], z: Zero, tol: float = 1e-6) -> bool:
    for w in found:
        if np.linalg.norm(w.point - z.point) < tol:
            return False
    found.append(z)
    return True


def find_zeros(v: AnalyticField, box, grid=None, tol: float = NEWTON_TOL) -> ZeroSet:
    """Zeros of v in the half-open box, from sign changes on a grid.

    Bisection (brentq) in dimension 1, damped Newton from sign-change cells in
    dimension 2. Degenerate or clustered zeros produce a "refinement needed"
    diagnostic; such zeros are flagged and never given a Jacobian-sign index.
    """
    n = v.dimension
    bx = _box(box, n)
    if grid is None:
        grid = [max(8, int(math.ceil((64 if n == 1 else 32) * (b - a)))) for a, b in bx]
    elif np.isscalar(grid):
        grid = [int(grid)] * n
    out = ZeroSet([], bx)
    if v.is_identically_zero:
        out.diagnostics.append("field vanishes identically: no isolated zeros")
        return out
    axes = [np.linspace(a, b, k + 1) for (a, b), k in zip(bx, grid)]
    if n == 1:
        xs = axes[0]
        vals = v(xs)[:, 0]
        scale = float(np.abs(v.jacobian(xs)).max()) or 1.0
        found: list[Zero] = []
        for i in range(len(xs) - 1):
            a, b = vals[i], vals[i + 1]
            if a == 0.0:
                r = xs[i]
            elif a * b < 0:
                r = brentq(lambda t: v(t)[0], xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
            else:
                continue
            d = float(v.jacobian(r)[0, 0])
            z = Zero(np.array([r]), abs(float(v(r)[0])), d, abs(d) < 1e-8 * scale)
            if _inside(z.point, bx):
                _dedup_add(found, z)
        # touching zeros have no sign change: look for small local minima of |v|
        mags = np.abs(vals)
        top = float(mags.max()) or 1.0
        for i in range(1, len(xs) - 1):
            if mags[i] <= mags[i - 1] and mags[i] <= mags[i + 1] and vals[i - 1] * vals[i + 1] > 0:
                res = minimize_scalar(lambda t: abs(v(t)[0]), bounds=(xs[i - 1], xs[i + 1]),
                                      method="bounded", options={"xatol": 1e-12})
                if res.fun < 1e-6 * top and _inside([res.x], bx):
                    z = Zero(np.array([res.x]), float(res.fun), float(v.jacobian(res.x)[0, 0]), True)
                    if _dedup_add(found, z, 1e-4):
                        out.diagnostics.append(
                            f"possible touching zero near x={res.x:.6g}: refinement needed")
    else:
        X, Y = np.meshgrid(*axes, indexing="ij")
        P = np.stack([X, Y], axis=-1)
        V = v(P)
        scale = float(np.linalg.norm(v.jacobian(P), axis=(-2, -1)).max()) or 1.0
        corners = [V[:-1, :-1], V[1:, :-1], V[:-1, 1:], V[1:, 1:]]
        lo = np.minimum.reduce(corners)
        hi = np.maximum.reduce(corners)
        cand = np.all((lo <= 0) & (hi >= 0), axis=-1)
        found = []
        hx = (bx[0][1] - bx[0][0]) / grid[0]
        hy = (bx[1][1] - bx[1][0]) / grid[1]
        for i, j in zip(*np.nonzero(cand)):
            cell = [(axes[0][i], axes[0][i + 1]), (axes[1][j], axes[1][j + 1])]
            starts = [np.array([(cell[0][0] + cell[0][1]) / 2, (cell[1][0] + cell[1][1]) / 2])]
            starts += [np.array([cell[0][0] + fx * hx, cell[1][0] + fy * hy])
                       for fx in (0.25, 0.75) for fy in (0.25, 0.75)]
            in_cell = []
            for s in starts:
                x, res = _newton(v, s)
                if res >= tol or not _inside(x, bx):
                    continue
                d = float(np.linalg.det(v.jacobian(x)))
                z = Zero(x, res, d, abs(d) < 1e-8 * scale * scale)
                _dedup_add(found, z)
                if (cell[0][0] - hx <= x[0] <= cell[0][1] + hx and cell[1][0] - hy <= x[1] <= cell[1][1] + hy):
                    _dedup_add(in_cell, z)
                if len(in_cell) == 1 and s is starts[0]:
                    break
            if len(in_cell) > 1:
                out.diagnostics.append(f"several zeros near cell {cell}: refinement needed")
    found.sort(key=lambda z: tuple(z.point))
    out.zeros = found
    for z in found:
        if z.degenerate:
            out.diagnostics.append(f"degenerate zero at {np.round(z.point, 10).tolist()}: "
                                   "Jacobian singular, refinement needed")
    return out


# -- local indices --------------------------------------------------------------------


def winding_index(v: AnalyticField, zero, radius: float, samples: int = MIN_SAMPLES) -> int:
    """Degree of v/|v| on the sphere of the given radius around ``zero``."""
    c = np.atleast_1d(np.asarray(zero.point if isinstance(zero, Zero) else zero, dtype=float))
    if radius <= 0:
        raise InputError("radius must be positive")
    if v.dimension == 1:
        a = float(v(c[0] - radius)[0])
        b = float(v(c[0] + radius)[0])
        if min(abs(a), abs(b)) < 1e-12:
            raise ContourError(f"field vanishes at the contour x = {c[0]} +- {radius}")
        return int((np.sign(b) - np.sign(a)) // 2)
    N = max(samples, MIN_SAMPLES)
    while N <= MAX_SAMPLES:
        th = 2 * np.pi * np.arange(N) / N
        pts = c + radius * np.stack([np.cos(th), np.sin(th)], axis=-1)
        vals = v(pts)
        mags = np.linalg.norm(vals, axis=-1)
        if mags.min() < 1e-9 * max(1.0, float(mags.max())):
            raise ContourError(f"field (nearly) vanishes on the contour of radius {radius}")
        ang = np.arctan2(vals[:, 1], vals[:, 0])
        d = np.diff(np.append(ang, ang[0]))
        d = (d + np.pi) % (2 * np.pi) - np.pi
        if np.abs(d).max() < np.pi / 2:
            total = d.sum() / (2 * np.pi)
            w = round(total)
            if abs(total - w) > 1e-6:
                raise ContourError("winding number is not an integer")
            return int(w)
        N *= 2
    raise ContourError(f"angle increments stay >= pi/2 at {MAX_SAMPLES} samples; reduce the radius")


# -- tameness ------------------------------------------------------------------------------


@dataclass
class TamenessVerdict:
    status: str  # "strongly tame" | "tame" | "fail"
    reason: str
    delta: float
    eps: float
    min_norm_outside: float
    zeros: ZeroSet

    @property
    def tame(self) -> bool:
        return self.status in ("tame", "strongly tame")

    @property
    def strongly_tame(self) -> bool:
        return self.status == "strongly tame"


def _sample_grid(bx, per_unit: int) -> np.ndarray:
    axes = [np.linspace(a, b, max(2, int(math.ceil(per_unit * (b - a)))) + 1) for a, b in bx]
    if len(bx) == 1:
        return axes[0][:, None]
    X, Y = np.meshgrid(*axes, indexing="ij")
    return np.stack([X.ravel(), Y.ravel()], axis=-1)


def _wall_distance(p: np.ndarray, offset) -> float:
    """Distance from p to the nearest wall of the domain grid (sup over axes)."""
    t = (p - _offset(offset, len(p))) % 1.0
    return float(np.minimum(t, 1 - t).min())


def tameness_check(v: AnalyticField, delta: float, eps: float, box, grid: int | None = None,
                   offset=None, zeros: ZeroSet | None = None) -> TamenessVerdict:
    """Grid check of |v| >= eps off the delta-balls around zeros.

    Strong tameness additionally needs each delta-ball inside one domain copy,
    which requires an ``offset``.
    """
    n = v.dimension
    bx = _box(box, n)
    if zeros is None:
        zeros = find_zeros(v, [(a - delta, b + delta) for a, b in bx])
    if not zeros.ok:
        return TamenessVerdict("fail", "; ".join(zeros.diagnostics), delta, eps, 0.0, zeros)
    if len(zeros) > 1 and 2 * zeros.delta <= 2 * delta:
        return TamenessVerdict("fail", "delta-balls around zeros overlap", delta, eps, 0.0, zeros)
    pts = _sample_grid(bx, grid or (400 if n == 1 else 64))
    if len(zeros):
        dist = np.linalg.norm(pts[:, None, :] - zeros.points[None, :, :], axis=-1).min(axis=1)
        pts = pts[dist >= delta]
    m = float(v.norm(pts).min()) if len(pts) else math.inf
    if m < eps:
        return TamenessVerdict("fail", f"|v| = {m:.3g} < eps outside the delta-balls", delta, eps, m, zeros)
    if offset is None:
        return TamenessVerdict("tame", "no domain offset given", delta, eps, m, zeros)
    for z in zeros.zeros:
        if _wall_distance(z.point, offset) < delta:
            return TamenessVerdict("tame", f"delta-ball at {np.round(z.point, 6).tolist()} meets a domain wall",
                                   delta, eps, m, zeros)
    return TamenessVerdict("strongly tame", "", delta, eps, m, zeros)


def certify_tameness(v: AnalyticField, box, offset=None, grid: int | None = None) -> TamenessVerdict:
    """Choose delta and eps automatically and run :func:`tameness_check`.

    delta is 0.8 of the smaller of half the zero separation and the distance
    from zeros to domain walls; eps is 0.9 of the sampled minimum of |v| off
    the delta-balls.
    """
    n = v.dimension
    bx = _box(box, n)
    zs = find_zeros(v, [(a - 0.5, b + 0.5) for a, b in bx])
    if not zs.ok:
        return TamenessVerdict("fail", "; ".join(zs.diagnostics), 0.0, 0.0, 0.0, zs)
    cands = [zs.delta, 0.5]
    if offset is not None and len(zs):
        cands.append(min(_wall_distance(z.point, offset) for z in zs.zeros))
    delta = 0.8 * min(cands)
    if delta <= 0:
        return TamenessVerdict("tame" if offset is not None else "fail", "a zero sits on a domain wall",
                               0.0, 0.0, 0.0, zs)
    pts = _sample_grid(bx, grid or (400 if n == 1 else 64))
    if len(zs):
        dist = np.linalg.norm(pts[:, None, :] - zs.points[None, :, :], axis=-1).min(axis=1)
        pts = pts[dist >= delta]
    m = float(v.norm(pts).min()) if len(pts) else 1.0
    return tameness_check(v, delta, 0.9 * m, bx, grid, offset, zs)


# -- tables -----------------------------------------------------------------------------------


def window_copies(n: int, R: int) -> list[GroupElement]:
    """Copies in ball(R - 1) of the model lattice."""
    return ball(model_group(n), None, R).within(R - 1)


def _bounding_box(copies, offset, n):
    boxes = [domain_box(g, offset) for g in copies]
    return [(min(b[i][0] for b in boxes), max(b[i][1] for b in boxes)) for i in range(n)]


def _far_copy(v: AnalyticField, offset) -> GroupElement:
    spec = model_group(v.dimension)
    if v.deviation_box is None:
        return spec.identity
    off = _offset(offset, v.dimension)
    k = [int(math.ceil(b - off[i])) + 1 for i, (_, b) in enumerate(v.deviation_box)]
    return spec.element(k[0] if v.dimension == 1 else tuple(k))


def default_contour_radius(zs: ZeroSet, offset=None) -> float:
    r = 0.1
    if len(zs) > 1:
        r = min(r, 0.5 * zs.delta)
    return r


def winding_index_table(v: AnalyticField, R: int = 2, offset=None, radius: float | None = None) -> IndexTable:
    """Per-copy sums of winding indices over ball(R - 1)."""
    n = v.dimension
    spec = model_group(n)
    copies = window_copies(n, R)
    far = _far_copy(v, offset)
    extra = [] if far in copies else [far]
    sums = {}
    for group_ in (copies, extra):
        if not group_:
            continue
        zs = find_zeros(v, _bounding_box(group_, offset, n))
        if any(z.degenerate for z in zs.zeros) and radius is None:
            raise ContourError("degenerate zeros need an explicit contour radius")
        r = radius or default_contour_radius(zs, offset)
        for g in group_:
            sums[g] = 0
        for z in zs.zeros:
            g = copy_of(z.point, offset, spec)
            if g in sums:
                sums[g] += winding_index(v, z, r)
    values = {g: sums[g] for g in copies}
    return IndexTable(spec, values, "winding", sums[far])


def diffeo_to_field(f, box=None, samples: int = 64, deviation_box=None) -> AnalyticField:
    """v = f - id for a map f that is C^1-close to the identity on ``box``."""
    if isinstance(f, (str, sp.Basic)):
        f = [f]
    n = len(f)
    comps = [parse(fi, n) - COORDS[i] for i, fi in enumerate(f)]
    v = AnalyticField(comps, deviation_box=deviation_box, name="f - id")
    bx = _box(box if box is not None else [(0.0, 1.0)] * n, n)
    pts = _sample_grid(bx, samples)
    J = v.jacobian(pts)
    dist = float(np.linalg.norm(J, ord=2, axis=(-2, -1)).max())
    if dist >= 1:
        raise InputError(f"not C1-close to the identity: max |Df - I| = {dist:.3g} >= 1")
    return v
