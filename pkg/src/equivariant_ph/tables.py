"""Index tables: g -> sum of local indices of zeros in gD."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from .coinvariants import CoinvariantRep, _fmt
from .groups import GroupElement, GroupSpec

PROVENANCES = ("combinatorial", "winding", "thom-quadrature")


@dataclass
class IndexTable:
    """Per-copy index sums on a window.

    ``periodic_value`` is the value taken on every copy outside the window
    (the periodic part); ``to_coinvariant`` turns the table into
    ``periodic_value * 1 + (finite deviation)``. ``raw`` and ``gaps`` are set
    for quadrature tables only.
    """

    group: GroupSpec
    values: dict[GroupElement, int]
    provenance: str
    periodic_value: int | Fraction = 0
    raw: dict[GroupElement, float] = field(default_factory=dict)
    gaps: dict[GroupElement, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def __getitem__(self, g) -> int:
        return self.values[self.group.element(g)]

    def __len__(self):
        return len(self.values)

    def items(self):
        return sorted(self.values.items(), key=lambda kv: kv[0].sort_key())

    @property
    def max_gap(self) -> float:
        return max(self.gaps.values(), default=0.0)

    def is_constant(self, value=None) -> bool:
        vals = set(self.values.values())
        return len(vals) <= 1 and (value is None or vals <= {value})

    def to_coinvariant(self) -> CoinvariantRep:
        c = self.periodic_value
        return CoinvariantRep(self.group, c, {g: v - c for g, v in self.values.items()})

    def same_entries(self, other: IndexTable) -> bool:
        return self.values == other.values

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.raw:
            w.writerow(["g", "value", "provenance", "raw", "gap"])
            for g, v in self.items():
                w.writerow([str(g), v, self.provenance, f"{self.raw[g]:.12g}", f"{self.gaps[g]:.3e}"])
        else:
            w.writerow(["g", "value", "provenance"])
            for g, v in self.items():
                w.writerow([str(g), _fmt(Fraction(v)), self.provenance])
        return buf.getvalue()
