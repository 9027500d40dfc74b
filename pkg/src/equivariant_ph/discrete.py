"""Combinatorial vector fields: acyclic matchings on covers.

A :class:`DiscreteField` is a matching on the base complex (the periodic
core), lifted to every copy, patched on finitely many copies by overrides.
Unmatched (critical) cells play the role of zeros, with index (-1)^dim.

Ownership: a pair (face, coface) belongs to the copy of its coface, and a
cell counts towards the copy of its own label. An override at copy g replaces
every core pair owned by g.
"""

from __future__ import annotations

import graphlib
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .complexes import BaseComplex, CoverWindow
from .errors import MatchingError, WindowError
from .groups import GroupElement
from .tables import IndexTable

Pair = tuple[str, str]  # (face, coface) by base cell names


@dataclass(frozen=True)
class Override:
    copy: GroupElement
    pairs: tuple[Pair, ...]


def _pair_offset(base: BaseComplex, face: str, coface: str) -> GroupElement:
    offs = {off for f, off, _ in base.faces(coface) if f == face} if coface in base.dim_of else set()
    if not offs:
        raise MatchingError(f"{face} is not a face of {coface}")
    if len(offs) > 1:
        raise MatchingError(f"{face} is a face of {coface} at several offsets; pair is ambiguous")
    return next(iter(offs))


def _check_pairs(base: BaseComplex, pairs: Sequence[Pair]) -> None:
    seen = set()
    for f, t in pairs:
        _pair_offset(base, f, t)
        for c in (f, t):
            if c in seen:
                raise MatchingError(f"cell {c} is matched twice")
            seen.add(c)


class DiscreteField:
    def __init__(self, base: BaseComplex, core: Sequence[Pair] = (),
                 overrides: Sequence[Override] | Mapping = ()):
        self.base = base
        self.core = tuple((str(f), str(t)) for f, t in core)
        _check_pairs(base, self.core)
        if isinstance(overrides, Mapping):
            overrides = [Override(base.group.element(g), tuple(p)) for g, p in overrides.items()]
        self.overrides: dict[GroupElement, tuple[Pair, ...]] = {}
        for ov in overrides:
            g = base.group.element(ov.copy)
            if g in self.overrides:
                raise MatchingError(f"two overrides for copy {g}")
            pairs = tuple((str(f), str(t)) for f, t in ov.pairs)
            _check_pairs(base, pairs)
            self.overrides[g] = pairs
        self._offset = {p: _pair_offset(base, *p) for p in self.core}
        for pairs in self.overrides.values():
            for p in pairs:
                self._offset[p] = _pair_offset(base, *p)

    def owned_pairs(self, g: GroupElement) -> tuple[Pair, ...]:
        return self.overrides.get(g, self.core)

    def lifted_pairs(self, g: GroupElement):
        """Pairs owned by copy g as ((face, copy), (coface, g))."""
        return [((f, g * self._offset[(f, t)]), (t, g)) for f, t in self.owned_pairs(g)]

    def mate(self, cell) -> tuple | None:
        """Partner of a cover cell, or None if critical. Raises on double matching."""
        c, g = cell
        found = []
        for f, t in self.owned_pairs(g):
            if t == c:
                found.append((f, g * self._offset[(f, t)]))
        for t, off, _ in self.base.cofaces[c]:
            h = g * off.inverse()
            for f2, t2 in self.owned_pairs(h):
                if f2 == c and t2 == t and self._offset[(f2, t2)] == off:
                    found.append((t, h))
        if len(found) > 1:
            raise MatchingError(f"cell {c} in copy {g} is matched twice")
        return found[0] if found else None

    def is_critical(self, cell) -> bool:
        return self.mate(cell) is None

    def critical_cells(self, g: GroupElement) -> list[str]:
        return [c for c in self.base.dim_of if self.mate((c, g)) is None]

    def copy_index(self, g: GroupElement) -> int:
        return sum((-1) ** self.base.dim_of[c] for c in self.critical_cells(g))

    @property
    def periodic_value(self) -> int:
        matched = {c for p in self.core for c in p}
        return sum((-1) ** d for c, d in self.base.dim_of.items() if c not in matched)

    def translate(self, h: GroupElement) -> DiscreteField:
        """Deck translate: overrides move from copy g to h*g."""
        return DiscreteField(self.base, self.core,
                             [Override(h * g, p) for g, p in self.overrides.items()])

    def to_record(self) -> dict:
        return {
            "core": [list(p) for p in self.core],
            "overrides": [{"copy": str(g), "pairs": [list(p) for p in ps]}
                          for g, ps in sorted(self.overrides.items(), key=lambda kv: kv[0].sort_key())],
        }

    @classmethod
    def from_record(cls, base: BaseComplex, rec: Mapping) -> DiscreteField:
        core = rec.get("core", "empty")
        if core == "empty":
            core = ()
        elif core == "tree-cotree":
            core = tree_cotree_matching(base)
        ovs = [Override(base.group.parse(str(o["copy"])), tuple(tuple(p) for p in o.get("pairs", [])))
               for o in rec.get("overrides", [])]
        return cls(base, core, ovs)


# -- acyclicity ----------------------------------------------------------------------


def _has_cycle(edges) -> list | None:
    ts = graphlib.TopologicalSorter()
    for a, b in edges:
        ts.add(b, a)
    try:
        ts.prepare()
    except graphlib.CycleError as exc:
        return list(exc.args[1])
    return None


def base_vpath_cycle(base: BaseComplex, pairs: Sequence[Pair]) -> list | None:
    """A closed V-path of the matching on the base complex itself, if any."""
    matched = set(pairs)
    edges = []
    for t, faces in base._faces.items():
        for f, _, _ in faces:
            edges.append((f, t) if (f, t) in matched else (t, f))
    return _has_cycle(edges)


def window_vpath_cycle(field: DiscreteField, window: CoverWindow) -> list | None:
    """A closed V-path of the patched matching among cells of the window, if any."""
    _check_override_copies(field, window)
    mates = {}
    for g in window.copies:
        for face, cof in field.lifted_pairs(g):
            for c in (face, cof):
                if c in mates:
                    raise MatchingError(f"cell {c[0]} in copy {c[1]} is matched twice")
            mates[face] = cof
            mates[cof] = face
    edges = []
    for cell in window.cells():
        for face, _ in window.boundary(cell):
            if face not in window:
                continue
            edges.append((face, cell) if mates.get(face) == cell else (cell, face))
    return _has_cycle(edges)


def _check_override_copies(field: DiscreteField, window: CoverWindow) -> None:
    spec = window.group
    if spec.is_finite and len(window.ball.within(window.radius - 1)) == spec.order:
        return  # the window already holds the whole finite cover
    limit = window.radius - 1 - window.margin
    for g in field.overrides:
        d = window.ball.distance.get(g)
        if d is None or d > limit:
            raise WindowError(f"override at copy {g} is outside the usable window (radius {limit})")


def acyclic_matching_check(field: DiscreteField, window: CoverWindow | None = None) -> bool:
    """The core must be acyclic on the base; the patched matching on the window."""
    if base_vpath_cycle(field.base, field.core) is not None:
        return False
    if window is None:
        return True
    return window_vpath_cycle(field, window) is None


def critical_index_table(field: DiscreteField, window: CoverWindow):
    """Index table on the inner window and its coinvariant representative."""
    if not acyclic_matching_check(field, window):
        raise MatchingError("matching has a closed V-path")
    values = {g: field.copy_index(g) for g in window.inner}
    table = IndexTable(window.group, values, "combinatorial", field.periodic_value)
    return table, table.to_coinvariant()


# -- constructions ------------------------------------------------------------------------


def tree_cotree_matching(base: BaseComplex) -> list[Pair]:
    """Acyclic matching with one critical vertex, one critical top cell and 1 - chi + 1 critical edges.

    A breadth-first spanning tree pairs each non-root vertex with the edge to
    its parent; for surfaces, a spanning tree of the dual graph avoiding the
    primal tree pairs each non-root triangle with the edge to its parent.
    """
    adj = {v: [] for v in base.vertices}
    for e in base.edges.values():
        adj[e.tail].append((e.head, e.name))
        adj[e.head].append((e.tail, e.name))
    root = base.vertices[0]
    seen = {root}
    pairs = []
    tree = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w, e in adj[v]:
            if w not in seen:
                seen.add(w)
                tree.add(e)
                pairs.append((w, e))
                queue.append(w)
    if base.dimension == 1:
        return pairs
    sides = {}
    for t in base.triangles.values():
        for e, _ in t.edges:
            sides.setdefault(e, []).append(t.name)
    troot = next(iter(base.triangles))
    seen_t = {troot}
    queue = deque([troot])
    while queue:
        t = queue.popleft()
        for e, _ in base.triangles[t].edges:
            if e in tree:
                continue
            for u in sides[e]:
                if u not in seen_t:
                    seen_t.add(u)
                    pairs.append((e, u))
                    queue.append(u)
    return pairs


def empty_field(base: BaseComplex) -> DiscreteField:
    return DiscreteField(base, ())
