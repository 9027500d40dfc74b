"""Arithmetic in the coinvariants of bounded functions on a group.

Bounded functions are represented on the slice "constant multiple of the
all-ones function plus a finitely supported deviation". The slice is closed
under the right-translation action and under boundary terms phi - g.phi, and
its classes are decidable:

* finite G: the sum over G is a complete invariant;
* infinite amenable G: finitely supported functions vanish, the ones function
  does not, so the class is ``c * [1]``;
* infinite non-amenable G: everything vanishes.

Scalars are kept as :class:`fractions.Fraction` whenever the input is exact.
"""

from __future__ import annotations

import csv
import io
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Collection, Iterable, Mapping, Sequence

from .errors import InputError, NonAmenableError, WindowError
from .groups import (
    GroupElement,
    GroupSpec,
    ball,
    folner_set,
    free_group,
    outer_boundary_count,
)


def exact(x):
    """Promote ints and rational strings to Fraction; leave floats alone."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, numbers.Real):
        return float(x)
    raise InputError(f"not a real scalar: {x!r}")


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(float(x))


class CoinvariantRep:
    """phi(g) = constant + deviation(g), with finitely supported deviation."""

    __slots__ = ("group", "constant", "deviation")

    def __init__(self, group: GroupSpec, constant=0, deviation: Mapping | None = None):
        self.group = group
        self.constant = exact(constant)
        dev = {}
        for g, v in (deviation or {}).items():
            g = group.element(g)
            v = exact(v)
            if v != 0:
                dev[g] = dev.get(g, 0) + v
                if dev[g] == 0:
                    del dev[g]
        self.deviation = dev

    def __call__(self, g) -> Fraction | float:
        return self.constant + self.deviation.get(self.group.element(g), 0)

    def __eq__(self, other):
        if not isinstance(other, CoinvariantRep):
            return NotImplemented
        return (self.group == other.group and self.constant == other.constant
                and self.deviation == other.deviation)

    def __repr__(self):
        dev = ", ".join(f"{g}: {_fmt(v)}" for g, v in self.sorted_deviation())
        return f"CoinvariantRep({_fmt(self.constant)}*1 + {{{dev}}})"

    def _same(self, other):
        if self.group != other.group:
            raise InputError("coinvariant representatives over different groups")

    def __add__(self, other):
        self._same(other)
        dev = dict(self.deviation)
        for g, v in other.deviation.items():
            dev[g] = dev.get(g, 0) + v
        return CoinvariantRep(self.group, self.constant + other.constant, dev)

    def __neg__(self):
        return CoinvariantRep(self.group, -self.constant, {g: -v for g, v in self.deviation.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = exact(c)
        return CoinvariantRep(self.group, c * self.constant, {g: c * v for g, v in self.deviation.items()})

    __rmul__ = __mul__

    @property
    def support(self) -> set[GroupElement]:
        return set(self.deviation)

    def deviation_sum(self):
        return sum(self.deviation.values(), Fraction(0))

    def deviation_l1(self):
        return sum((abs(v) for v in self.deviation.values()), Fraction(0))

    def sorted_deviation(self):
        return sorted(self.deviation.items(), key=lambda kv: kv[0].sort_key())

    def to_record(self) -> dict:
        return {
            "group": self.group.describe(),
            "constant": _fmt(self.constant),
            "deviations": [[str(g), _fmt(v)] for g, v in self.sorted_deviation()],
        }

    @classmethod
    def from_record(cls, rec: Mapping, group: GroupSpec | None = None) -> CoinvariantRep:
        from .groups import group_from_record

        spec = group or group_from_record(rec["group"])
        dev = {}
        for s, v in rec.get("deviations", []):
            dev[spec.parse(s)] = _parse_scalar(v)
        return cls(spec, _parse_scalar(rec.get("constant", 0)), dev)


def _parse_scalar(v):
    if isinstance(v, str) and any(c in v for c in ".eE") and "/" not in v:
        return float(v)
    return exact(v)


def ones(spec: GroupSpec, c=1) -> CoinvariantRep:
    return CoinvariantRep(spec, c)


def zero(spec: GroupSpec) -> CoinvariantRep:
    return CoinvariantRep(spec, 0)


def delta(g: GroupElement, c=1) -> CoinvariantRep:
    return CoinvariantRep(g.spec, 0, {g: c})


def act(g: GroupElement, phi: CoinvariantRep) -> CoinvariantRep:
    """(g.phi)(h) = phi(h g): the support moves by h -> h g^-1."""
    g = phi.group.element(g)
    ginv = g.inverse()
    return CoinvariantRep(phi.group, phi.constant, {k * ginv: v for k, v in phi.deviation.items()})


def boundary_term(g: GroupElement, phi: CoinvariantRep) -> CoinvariantRep:
    """phi - g.phi, a generator of the subspace killed in the coinvariants."""
    return phi - act(g, phi)


@dataclass(frozen=True)
class CoinvariantClass:
    """Canonical descriptor of a class.

    ``kind`` is ``"ones"`` (value is c in c*[1], infinite amenable groups),
    ``"zero"`` (infinite non-amenable groups) or ``"sum"`` (finite groups,
    value is the sum over G).
    """

    kind: str
    value: Fraction | float

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    def __str__(self):
        if self.kind == "ones":
            return "0" if self.value == 0 else f"{_fmt(self.value)}*[1]"
        return _fmt(self.value)


def class_reduce(phi: CoinvariantRep) -> CoinvariantClass:
    spec = phi.group
    if spec.is_finite:
        return CoinvariantClass("sum", phi.constant * spec.order + phi.deviation_sum())
    if spec.amenable:
        return CoinvariantClass("ones", phi.constant)
    return CoinvariantClass("zero", Fraction(0))


def class_equal(phi: CoinvariantRep, psi: CoinvariantRep) -> bool:
    phi._same(psi)
    return class_reduce(phi) == class_reduce(psi)


def ones_class(spec: GroupSpec, c=1) -> CoinvariantClass:
    return class_reduce(ones(spec, c))


# -- Whyte's criterion ---------------------------------------------------------


@dataclass
class WhyteRow:
    label: str
    size: int
    lhs: Fraction | float
    rhs: Fraction | float
    passed: bool


@dataclass
class WhyteReport:
    """Evaluation of |sum_S phi| <= C * #{g : 0 < d(g, S) <= r} on test sets.

    ``certify`` means every tested set passed; that is evidence for triviality
    of the class, not a proof, since the criterion quantifies over all finite
    sets. ``refute`` means some set failed for this particular (C, r).
    """

    mode: str
    C: Fraction | float
    r: int
    rows: list[WhyteRow] = field(default_factory=list)
    counterexample: str | None = None

    @property
    def note(self) -> str:
        return "evidence, not proof" if self.mode == "certify" else f"fails for C={_fmt(self.C)}, r={self.r}"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["set", "size", "lhs", "rhs", "C", "r", "pass"])
        for row in self.rows:
            w.writerow([row.label, row.size, _fmt(row.lhs), _fmt(row.rhs), _fmt(self.C), self.r,
                        int(row.passed)])
        return buf.getvalue()


def whyte_check(phi: CoinvariantRep, C, r: int,
                test_sets: Mapping[str, Collection[GroupElement]] | Sequence[Collection[GroupElement]],
                gens: Sequence[GroupElement] | None = None, window=None) -> WhyteReport:
    """Evaluate the Whyte inequality on each test set.

    ``window`` (a :class:`~equivariant_ph.groups.Ball`) is optional; when
    given, every set must sit deep enough inside it that its r-annulus is
    enumerable within the window.
    """
    C = exact(C)
    if C <= 0 or r < 1:
        raise InputError("need C > 0 and r >= 1")
    if not isinstance(test_sets, Mapping):
        test_sets = {f"S{i}": s for i, s in enumerate(test_sets)}
    report = WhyteReport("certify", C, r)
    for label, S in test_sets.items():
        S = {phi.group.element(g) for g in S}
        if window is not None:
            depth = max((window.distance.get(g, window.radius + 1) for g in S), default=0)
            if depth + r > window.radius:
                raise WindowError(f"set {label} needs a window of radius {depth + r}, "
                                  f"have {window.radius}")
        lhs = abs(sum((phi(g) for g in S), Fraction(0)))
        rhs = C * outer_boundary_count(S, r, phi.group, gens) if S else Fraction(0)
        ok = lhs <= rhs
        report.rows.append(WhyteRow(label, len(S), lhs, rhs, ok))
        if not ok and report.counterexample is None:
            report.mode = "refute"
            report.counterexample = label
    return report


@dataclass
class FolnerRefutation:
    found: bool
    N: int | None = None
    size: int | None = None
    boundary: int | None = None
    reason: str = ""


def whyte_refute_ones(spec: GroupSpec, C, r: int, gens=None, max_N: int = 2000) -> FolnerRefutation:
    """First Følner set F_N with |F_N| > C * #annulus_r(F_N).

    Such a set shows the ones function fails Whyte's inequality for this
    (C, r); it exists for every (C, r) when G is infinite and amenable.
    """
    C = exact(C)
    if spec.is_finite:
        return FolnerRefutation(False, reason="no counterexample; finite group")
    if not spec.amenable:
        raise NonAmenableError(f"non-amenable family: {spec}")
    for N in range(max_N + 1):
        F = folner_set(spec, N)
        b = outer_boundary_count(F, r, spec, gens)
        if len(F) > C * b:
            return FolnerRefutation(True, N, len(F), b)
    return FolnerRefutation(False, reason=f"no counterexample up to N={max_N}")


def folner_mean(phi, N: int):
    """Average of phi over the N-th Følner set."""
    if hasattr(phi, "to_coinvariant"):
        phi = phi.to_coinvariant()
    F = folner_set(phi.group, N)
    return sum((phi(g) for g in F), Fraction(0)) / len(F)


# -- explicit trivialization of the ones function on free groups ---------------


@dataclass
class PonziFlow:
    """Outward unit-mass flow on the Cayley tree of a free group.

    ``flows[s][g]`` is the flow along the edge g -> g s for each positive
    generator s. On ball(R-1) the identity
    ``sum_s (psi_s - s^-1 . psi_s) == 1`` holds, writing the ones function as
    a sum of boundary terms.
    """

    rank: int
    radius: int
    depth_flows: list[Fraction]
    flows: dict[str, CoinvariantRep]
    divergence: dict[GroupElement, Fraction]
    bound: Fraction

    @property
    def max_flow(self) -> Fraction:
        return max(self.depth_flows)

    @property
    def divergence_is_one(self) -> bool:
        return all(v == 1 for v in self.divergence.values())

    @property
    def verified(self) -> bool:
        return self.divergence_is_one and self.max_flow < self.bound


def ponzi_flow_free_group(k: int, R: int) -> PonziFlow:
    if k < 2:
        raise InputError("rank 1 free group is Z, which is amenable: no Ponzi flow exists")
    if R < 2:
        raise InputError("radius must be >= 2")
    spec = free_group(k)
    B = ball(spec, None, R)
    depth = [Fraction(0), Fraction(1, 2 * k)]
    for _ in range(2, R + 1):
        depth.append((depth[-1] + 1) / (2 * k - 1))
    flows = {}
    for sym in spec.symbols:
        s = spec.word([sym])
        vals = {}
        for g in B.elements:
            h = g * s
            if h not in B.distance:
                continue
            dg, dh = B.distance[g], B.distance[h]
            vals[g] = depth[dh] if dh > dg else -depth[dg]
        flows[sym] = CoinvariantRep(spec, 0, vals)
    total = zero(spec)
    for sym, psi in flows.items():
        total = total + boundary_term(spec.word([sym]).inverse(), psi)
    inner = B.within(R - 1)
    div = {g: total(g) for g in inner}
    return PonziFlow(k, R, depth[1:], flows, div, Fraction(1, 2 * k - 2))
