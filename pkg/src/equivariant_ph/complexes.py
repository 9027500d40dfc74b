"""Voltage-labelled closed 1- and 2-manifolds and their covers on finite windows.

A :class:`BaseComplex` is a Delta-complex: vertices, oriented edges carrying a
group-valued voltage, and triangles given as closed loops of oriented edges.
Conventions:

* the lift of an edge ``e`` (tail u, head w, voltage s) in copy g runs from
  ``(u, g)`` to ``(w, g*s)``;
* a triangle is labelled by the copy of its start vertex; its faces sit at
  offsets given by prefix products of voltages along its boundary loop;
* the deck group acts on the left, ``h.(cell, g) = (cell, h*g)``.

So every base cell has a list of faces ``(face, offset, sign)``, and the lift
``(cell, g)`` has faces ``(face, g*offset)`` with the same incidence signs.
The fundamental domain D is the closure of the identity-labelled top cells.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

from .errors import InputError, ValidationError
from .groups import (
    Ball,
    GroupElement,
    GroupSpec,
    ball,
    cyclic_group,
    cyclic_z,
    free_abelian,
    free_group,
    group_from_record,
)

SCHEMA = "equivariant-ph/complex/1"


@dataclass(frozen=True)
class Edge:
    name: str
    tail: str
    head: str
    voltage: GroupElement


@dataclass(frozen=True)
class Triangle:
    name: str
    edges: tuple[tuple[str, int], ...]  # three (edge, +-1) steps forming a loop


@dataclass(frozen=True)
class Violation:
    kind: str  # "non-manifold" | "flatness violation" | "incoherent orientation" | "malformed"
    cell: str
    detail: str

    def __str__(self):
        return f"{self.kind} at {self.cell}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __bool__(self):
        return self.valid


class BaseComplex:
    """An oriented Delta-complex of dimension 1 or 2 with a G-voltage labelling."""

    def __init__(self, name: str, group: GroupSpec, vertices: Sequence[str],
                 edges: Sequence[Edge], triangles: Sequence[Triangle] = (), dimension: int | None = None):
        self.name = name
        self.group = group
        self.vertices = tuple(vertices)
        self.edges = {e.name: e for e in edges}
        self.triangles = {t.name: t for t in triangles}
        self.dimension = dimension if dimension is not None else (2 if triangles else 1)
        if self.dimension not in (1, 2):
            raise InputError("only dimensions 1 and 2 are supported")
        if self.dimension == 1 and self.triangles:
            raise InputError("a 1-dimensional complex cannot have triangles")
        names = list(self.vertices) + list(self.edges) + list(self.triangles)
        if len(set(names)) != len(names) or len(self.edges) != len(edges) or len(self.triangles) != len(triangles):
            raise InputError("cell names must be unique")
        for e in edges:
            if e.tail not in self.vertices or e.head not in self.vertices:
                raise InputError(f"edge {e.name} references an unknown vertex")
            if e.voltage.spec != group:
                raise InputError(f"edge {e.name} has a voltage in the wrong group")
        for t in triangles:
            if len(t.edges) != 3 or any(e not in self.edges or s not in (1, -1) for e, s in t.edges):
                raise InputError(f"triangle {t.name} must be three (edge, +-1) steps")

    # -- cells ---------------------------------------------------------------

    @cached_property
    def cells(self) -> dict[int, tuple[str, ...]]:
        out = {0: self.vertices, 1: tuple(self.edges)}
        if self.dimension == 2:
            out[2] = tuple(self.triangles)
        return out

    @cached_property
    def dim_of(self) -> dict[str, int]:
        return {c: d for d, cs in self.cells.items() for c in cs}

    @property
    def top_cells(self) -> tuple[str, ...]:
        return self.cells[self.dimension]

    @property
    def ncells(self) -> int:
        return sum(len(c) for c in self.cells.values())

    def _endpoints(self, e: str, sign: int) -> tuple[str, str]:
        ed = self.edges[e]
        return (ed.tail, ed.head) if sign > 0 else (ed.head, ed.tail)

    def start_vertex(self, t: str) -> str:
        e, s = self.triangles[t].edges[0]
        return self._endpoints(e, s)[0]

    @cached_property
    def _faces(self) -> dict[str, tuple[tuple[str, GroupElement, int], ...]]:
        G = self.group
        out: dict[str, tuple] = {v: () for v in self.vertices}
        for e in self.edges.values():
            out[e.name] = ((e.tail, G.identity, -1), (e.head, e.voltage, 1))
        for t in self.triangles.values():
            h = G.identity
            faces = []
            for e, s in t.edges:
                volt = self.edges[e].voltage
                faces.append((e, h if s > 0 else h * volt.inverse(), s))
                h = h * volt if s > 0 else h * volt.inverse()
            out[t.name] = tuple(faces)
        return out

    def faces(self, cell: str) -> tuple[tuple[str, GroupElement, int], ...]:
        """Faces of ``cell`` as (face, offset, incidence sign)."""
        return self._faces[cell]

    @cached_property
    def cofaces(self) -> dict[str, list[tuple[str, GroupElement, int]]]:
        """For each cell, the (coface, offset, sign) with the cell as face at that offset."""
        out = defaultdict(list)
        for c, fs in self._faces.items():
            for f, off, s in fs:
                out[f].append((c, off, s))
        return {c: out.get(c, []) for c in self.dim_of}

    @cached_property
    def offsets(self) -> tuple[GroupElement, ...]:
        return tuple(dict.fromkeys(off for fs in self._faces.values() for _, off, _ in fs))

    def euler_char(self) -> int:
        return sum((-1) ** d * len(cs) for d, cs in self.cells.items())

    # -- serialization ---------------------------------------------------------

    def to_record(self) -> dict:
        rec = {
            "schema": SCHEMA,
            "name": self.name,
            "dimension": self.dimension,
            "group": self.group.describe(),
            "vertices": list(self.vertices),
            "edges": [{"name": e.name, "tail": e.tail, "head": e.head, "voltage": str(e.voltage)}
                      for e in self.edges.values()],
        }
        if self.dimension == 2:
            rec["triangles"] = [{"name": t.name, "edges": [[e, s] for e, s in t.edges]}
                                for t in self.triangles.values()]
        return rec

    @classmethod
    def from_record(cls, rec: Mapping) -> BaseComplex:
        if rec.get("schema", SCHEMA) != SCHEMA:
            raise InputError(f"unsupported complex schema {rec.get('schema')!r}")
        try:
            G = group_from_record(rec["group"])
            edges = [Edge(e["name"], e["tail"], e["head"], G.parse(str(e.get("voltage", "e"))))
                     for e in rec["edges"]]
            tris = [Triangle(t["name"], tuple((str(a), int(b)) for a, b in t["edges"]))
                    for t in rec.get("triangles", [])]
            return cls(rec.get("name", "complex"), G, rec["vertices"], edges, tris, rec.get("dimension"))
        except KeyError as exc:
            raise InputError(f"complex record is missing {exc}") from None

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_record(), indent=1))

    @classmethod
    def load(cls, path) -> BaseComplex:
        return cls.from_record(json.loads(Path(path).read_text()))

    def __repr__(self):
        return (f"BaseComplex({self.name!r}, dim={self.dimension}, group={self.group}, "
                f"cells={[len(c) for c in self.cells.values()]})")


def euler_char(base: BaseComplex) -> int:
    return base.euler_char()


# -- validation -----------------------------------------------------------------


def _cycle_components(adj: Mapping[object, list]) -> int:
    seen = set()
    comps = 0
    for start in adj:
        if start in seen:
            continue
        comps += 1
        stack = [start]
        seen.add(start)
        while stack:
            a = stack.pop()
            for b in adj[a]:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
    return comps


def validate_base(base: BaseComplex) -> ValidationReport:
    """Check the closed-manifold, flatness and coherent-orientation conditions."""
    rep = ValidationReport()
    bad = rep.violations.append
    if base.dimension == 1:
        ins = defaultdict(int)
        outs = defaultdict(int)
        for e in base.edges.values():
            outs[e.tail] += 1
            ins[e.head] += 1
        for v in base.vertices:
            deg = ins[v] + outs[v]
            if deg != 2:
                bad(Violation("non-manifold", v, f"vertex has {deg} incident edge ends, expected 2"))
            elif ins[v] != 1:
                bad(Violation("incoherent orientation", v, "both incident edges point the same way"))
        return rep

    G = base.group
    uses = defaultdict(list)
    for t in base.triangles.values():
        loop_ok = True
        for i, (e, s) in enumerate(t.edges):
            _, end = base._endpoints(e, s)
            nxt_start, _ = base._endpoints(*t.edges[(i + 1) % 3])
            if end != nxt_start:
                loop_ok = False
            uses[e].append((t.name, s))
        if not loop_ok:
            bad(Violation("malformed", t.name, "edge steps do not form a closed loop"))
            continue
        prod = G.identity
        for e, s in t.edges:
            v = base.edges[e].voltage
            prod = prod * (v if s > 0 else v.inverse())
        if not prod.is_identity:
            bad(Violation("flatness violation", t.name, f"voltage product around boundary is {prod}"))
    for e in base.edges:
        us = uses.get(e, [])
        if len(us) != 2:
            bad(Violation("non-manifold", e, f"edge lies in {len(us)} triangle sides, expected 2"))
        elif us[0][1] == us[1][1]:
            bad(Violation("incoherent orientation", e,
                          f"triangles {us[0][0]} and {us[1][0]} induce the same orientation"))
    # vertex links: link vertices are edge ends, link edges are triangle corners
    links: dict[str, dict] = {v: defaultdict(list) for v in base.vertices}
    for e in base.edges.values():
        links[e.tail][(e.name, 0)]
        links[e.head][(e.name, 1)]
    for t in base.triangles.values():
        steps = t.edges
        for i in range(3):
            e_in, s_in = steps[i - 1]
            e_out, s_out = steps[i]
            a = (e_in, 1 if s_in > 0 else 0)
            b = (e_out, 0 if s_out > 0 else 1)
            corner = base._endpoints(e_out, s_out)[0]
            links[corner][a].append(b)
            links[corner][b].append(a)
    for v, adj in links.items():
        if not adj:
            bad(Violation("non-manifold", v, "isolated vertex"))
            continue
        degs = {len(n) for n in adj.values()}
        if degs != {2} or _cycle_components(adj) != 1:
            bad(Violation("non-manifold", v, "vertex link is not a single circle"))
    return rep


def require_valid(base: BaseComplex) -> None:
    rep = validate_base(base)
    if not rep.valid:
        raise ValidationError(rep.violations)


# -- covers on windows --------------------------------------------------------------

Cell = tuple  # (base cell name, GroupElement)


class CoverWindow:
    """The G-cover of ``base`` restricted to copies g in ball(R).

    Cells over the outer sphere may have faces or cofaces outside the window;
    ``core`` lists the copies whose closed stars lie entirely inside.
    """

    def __init__(self, base: BaseComplex, spec: GroupSpec, gens, R: int):
        self.base = base
        self.group = spec
        self.radius = R
        self.ball: Ball = ball(spec, gens, R)
        self.generating_set = self.ball.generating_set
        # word length of the longest face offset, measured in this generating set
        lengths = []
        for off in base.offsets:
            if off not in self.ball.distance:
                raise InputError(f"face offset {off} is longer than the window radius")
            lengths.append(self.ball.distance[off])
        self.margin = max(lengths, default=0)

    @property
    def copies(self) -> tuple[GroupElement, ...]:
        return self.ball.elements

    @property
    def inner(self) -> list[GroupElement]:
        """Copies at distance <= R - 1, where all reported tables live."""
        return self.ball.within(self.radius - 1)

    @property
    def core(self) -> list[GroupElement]:
        """Copies whose faces and cofaces (two levels) all lie in the window."""
        return self.ball.within(max(self.radius - 2 * self.margin, 0))

    def __contains__(self, cell) -> bool:
        return cell[0] in self.base.dim_of and cell[1] in self.ball.distance

    def cells(self, dim: int | None = None) -> list[Cell]:
        dims = [dim] if dim is not None else sorted(self.base.cells)
        return [(c, g) for d in dims for g in self.copies for c in self.base.cells[d]]

    @property
    def ncells(self) -> int:
        return len(self.copies) * self.base.ncells

    def boundary(self, cell: Cell) -> list[tuple[Cell, int]]:
        c, g = cell
        return [((f, g * off), s) for f, off, s in self.base.faces(c)]

    def coboundary(self, cell: Cell) -> list[tuple[Cell, int]]:
        c, g = cell
        return [((t, g * off.inverse()), s) for t, off, s in self.base.cofaces[c]]

    def act(self, h: GroupElement, cell: Cell) -> Cell:
        return (cell[0], h * cell[1])

    def equivariance_check(self) -> bool:
        """boundary(h.c) == h.boundary(c) for deck generators h on the core."""
        core = set(self.core)
        for g in core:
            for h in self.generating_set:
                if h * g not in self.ball.distance:
                    continue
                for c in self.base.dim_of:
                    lhs = self.boundary((c, h * g))
                    rhs = [(self.act(h, f), s) for f, s in self.boundary((c, g))]
                    if lhs != rhs:
                        return False
        return True

    def covering_check(self) -> bool:
        """Projection is a local isomorphism on the core: faces and cofaces match the base."""
        for g in self.core:
            for c in self.base.dim_of:
                for f, _ in self.boundary((c, g)) + self.coboundary((c, g)):
                    if f not in self:
                        return False
                proj_co = sorted((t, s) for (t, _), s in self.coboundary((c, g)))
                base_co = sorted((t, s) for t, _, s in self.base.cofaces[c])
                if proj_co != base_co:
                    return False
        return True


def build_window(base: BaseComplex, spec: GroupSpec | None = None, gens=None, R: int = 3,
                 validate: bool = True) -> CoverWindow:
    spec = spec or base.group
    if spec != base.group:
        raise InputError("window group differs from the voltage group")
    if R < 2:
        raise InputError("window radius must be >= 2")
    if validate:
        require_valid(base)
    return CoverWindow(base, spec, gens, R)


# -- fundamental domain ---------------------------------------------------------------


@dataclass
class FundamentalDomain:
    """Closure of the identity-labelled top cells.

    ``facets[s]`` lists the codimension-1 cells (name, offset) of D that are
    also in sD; ``interior`` lists those glued to D itself.
    """

    base: BaseComplex
    top_cells: tuple[str, ...]
    facets: dict[GroupElement, list[tuple[str, GroupElement, int]]]
    interior: list[tuple[str, GroupElement]]

    @property
    def boundary_cells(self) -> set[tuple[str, GroupElement]]:
        return {(c, off) for fs in self.facets.values() for c, off, _ in fs}

    def facet_pairing_ok(self) -> bool:
        """D meets s^-1 D in the s^-1-translate of D meet sD."""
        for s, fs in self.facets.items():
            partner = self.facets.get(s.inverse())
            if partner is None:
                return False
            moved = sorted(((c, s.inverse() * off) for c, off, _ in fs), key=lambda x: (x[0], x[1].sort_key()))
            other = sorted(((c, off) for c, off, _ in partner), key=lambda x: (x[0], x[1].sort_key()))
            if moved != other:
                return False
        return True


def fundamental_domain(base: BaseComplex) -> FundamentalDomain:
    n = base.dimension
    facets: dict[GroupElement, list] = defaultdict(list)
    interior = []
    for f in base.cells[n - 1]:
        inc = [(t, off, s) for t, off, s in base.cofaces[f] if base.dim_of[t] == n]
        if len(inc) != 2:
            raise ValidationError([Violation("non-manifold", f, "codimension-1 cell not in two top cells")])
        (ta, oa, sa), (tb, ob, sb) = inc
        g = oa * ob.inverse()  # (f, oa) in D is also the face of (tb, g)
        if g.is_identity:
            interior.append((f, oa))
        else:
            facets[g].append((f, oa, sa))
            facets[g.inverse()].append((f, ob, sb))
    return FundamentalDomain(base, base.top_cells, dict(facets), interior)


def _positive(g: GroupElement) -> bool:
    """Pick one element of each pair {g, g^-1} deterministically."""
    a, b = g.nf, g.inverse().nf
    if isinstance(a, int):
        return a > 0 if g.spec.family == "CyclicZ" else a < b
    ka = (next((x > 0 for x in a if x != 0), False), a)
    kb = (next((x > 0 for x in b if x != 0), False), b)
    return ka > kb


@dataclass
class FacetGenerators:
    S: list[GroupElement]
    S_plus: list[GroupElement]
    S_minus: list[GroupElement]
    S_zero: list[GroupElement]
    symmetric: bool
    generates_window: bool

    @property
    def partition_ok(self) -> bool:
        inv_plus = {g.inverse() for g in self.S_plus}
        return (inv_plus == set(self.S_minus)
                and all((g * g).is_identity for g in self.S_zero)
                and len(self.S_plus) + len(self.S_minus) + len(self.S_zero) == len(self.S))


def facet_generators(window: CoverWindow) -> FacetGenerators:
    """S = {g != e : D meets gD in codimension 1}, split as S+ u S- u S0."""
    dom = fundamental_domain(window.base)
    S = sorted(dom.facets, key=lambda g: g.sort_key())
    Sset = set(S)
    symmetric = all(g.inverse() in Sset for g in S)
    zero = [g for g in S if (g * g).is_identity]
    plus = [g for g in S if g not in zero and _positive(g)]
    minus = [g for g in S if g not in zero and not _positive(g)]
    # generation evidence: S-steps connect the inner window
    inner = set(window.inner)
    e = window.group.identity
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for g in frontier:
            for s in S:
                h = g * s
                if h in inner and h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return FacetGenerators(S, plus, minus, zero, symmetric, seen == inner)


def orientation_opposition_check(window: CoverWindow) -> bool:
    """Every shared codimension-1 cell gets opposite orientations from its two sides."""
    return not orientation_conflicts(window)


def orientation_conflicts(window: CoverWindow) -> list[Cell]:
    n = window.base.dimension
    bad = []
    for g in window.core:
        for f in window.base.cells[n - 1]:
            cob = [(t, s) for t, s in window.coboundary((f, g)) if window.base.dim_of[t[0]] == n]
            if len(cob) != 2 or cob[0][1] == cob[1][1]:
                bad.append((f, g))
    return bad


# -- constructions ----------------------------------------------------------------------


def flip_triangle(base: BaseComplex, name: str) -> BaseComplex:
    """Copy of ``base`` with one triangle's orientation reversed (a negative fixture)."""
    tris = []
    for t in base.triangles.values():
        if t.name == name:
            t = Triangle(t.name, tuple((e, -s) for e, s in reversed(t.edges)))
        tris.append(t)
    if name not in base.triangles:
        raise InputError(f"no triangle named {name}")
    return BaseComplex(base.name + "-flipped", base.group, base.vertices, list(base.edges.values()), tris)


def polygon_surface(name: str, word: Sequence[str], phi: Mapping[str, GroupElement],
                    spec: GroupSpec) -> BaseComplex:
    """Coned polygon with side pairing ``word`` (e.g. a b A B), voltages from ``phi``.

    Upper-case letters traverse a side backwards. Vertices: the polygon vertex
    class P and the cone point c; spoke k runs from c to polygon corner k and
    carries the prefix product of the side voltages, which makes every cone
    triangle flat. Requires all polygon corners to be identified to one point.
    """
    m = len(word)
    sides = {}
    for w in word:
        sides.setdefault(w.lower(), None)
    volt = []
    prefix = [spec.identity]
    for w in word:
        s = phi[w.lower()]
        v = s if w == w.lower() else s.inverse()
        volt.append(v)
        prefix.append(prefix[-1] * v)
    if not prefix[-1].is_identity:
        raise InputError("voltages do not kill the polygon relator")
    edges = [Edge(s, "P", "P", phi[s]) for s in sides]
    edges += [Edge(f"k{k}", "c", "P", prefix[k]) for k in range(m)]
    tris = []
    for k, w in enumerate(word):
        side = (w.lower(), 1 if w == w.lower() else -1)
        tris.append(Triangle(f"T{k}", ((f"k{k}", 1), side, (f"k{(k + 1) % m}", -1))))
    return BaseComplex(name, spec, ["P", "c"], edges, tris)


def barycentric_subdivision(base: BaseComplex, name: str | None = None) -> BaseComplex:
    """One barycentric subdivision of a 2-dimensional voltage complex.

    New vertices ``m.<edge>`` and ``b.<triangle>``. Each edge splits into two
    half-edges pointing away from its midpoint; each triangle into six, all
    keeping the parent's copy label and orientation.
    """
    if base.dimension != 2:
        raise InputError("subdivision is implemented for surfaces only")
    G = base.group
    verts = list(base.vertices) + [f"m.{e}" for e in base.edges] + [f"b.{t}" for t in base.triangles]
    edges = []
    for e in base.edges.values():
        edges.append(Edge(f"{e.name}.t", f"m.{e.name}", e.tail, G.identity))
        edges.append(Edge(f"{e.name}.h", f"m.{e.name}", e.head, e.voltage))
    tris = []
    for t in base.triangles.values():
        faces = base.faces(t.name)
        h = G.identity
        corners = []
        for e, s in t.edges:
            corners.append(h)
            v = base.edges[e].voltage
            h = h * (v if s > 0 else v.inverse())
        for i, ((e, s), (_, off, _)) in enumerate(zip(t.edges, faces)):
            p = base._endpoints(e, s)[0]
            edges.append(Edge(f"{t.name}.c{i}", f"b.{t.name}", p, corners[i]))
            edges.append(Edge(f"{t.name}.s{i}", f"b.{t.name}", f"m.{e}", off))
        for i, (e, s) in enumerate(t.edges):
            near, far = (f"{e}.t", f"{e}.h") if s > 0 else (f"{e}.h", f"{e}.t")
            tris.append(Triangle(f"{t.name}.{i}a", ((f"{t.name}.c{i}", 1), (near, -1), (f"{t.name}.s{i}", -1))))
            tris.append(Triangle(f"{t.name}.{i}b", ((f"{t.name}.s{i}", 1), (far, 1), (f"{t.name}.c{(i + 1) % 3}", -1))))
    return BaseComplex(name or base.name, G, verts, edges, tris)


TORUS_WORD = ("a", "b", "A", "B")
GENUS2_WORD = ("a1", "b1", "A1", "B1", "a2", "b2", "A2", "B2")

LIBRARY = ("circle_Z", "torus_Z2", "genus2_ladder_Z", "genus2_F2", "genus2_Z5", "torus_Zmod2")


def _genus2(name: str, spec: GroupSpec, images: Mapping[str, GroupElement]) -> BaseComplex:
    return barycentric_subdivision(polygon_surface(name, GENUS2_WORD, images, spec), name)


def library_complex(name: str) -> BaseComplex:
    if name == "circle_Z":
        Z = cyclic_z()
        edges = [Edge("e0", "v0", "v1", Z.element(1)), Edge("e1", "v1", "v2", Z.identity),
                 Edge("e2", "v2", "v0", Z.identity)]
        base = BaseComplex(name, Z, ["v0", "v1", "v2"], edges)
    elif name == "torus_Z2":
        Z2 = free_abelian(2)
        poly = polygon_surface(name, TORUS_WORD, {"a": Z2.element((1, 0)), "b": Z2.element((0, 1))}, Z2)
        base = barycentric_subdivision(poly, name)
    elif name == "torus_Zmod2":
        C2 = cyclic_group(2)
        poly = polygon_surface(name, TORUS_WORD, {"a": C2.element(1), "b": C2.identity}, C2)
        base = barycentric_subdivision(poly, name)
    elif name == "genus2_ladder_Z":
        # voltage = intersection number with the loop b1
        Z = cyclic_z()
        base = _genus2(name, Z, {"a1": Z.element(1), "b1": Z.identity, "a2": Z.identity, "b2": Z.identity})
    elif name == "genus2_F2":
        F2 = free_group(2)
        base = _genus2(name, F2, {"a1": F2.word("x"), "b1": F2.identity, "a2": F2.word("y"),
                                  "b2": F2.identity})
    elif name == "genus2_Z5":
        C5 = cyclic_group(5)
        base = _genus2(name, C5, {"a1": C5.element(1), "b1": C5.identity, "a2": C5.identity,
                                  "b2": C5.identity})
    else:
        raise InputError(f"unknown library complex {name!r}; choose from {', '.join(LIBRARY)}")
    require_valid(base)
    return base


def finite_cover_euler_char(base: BaseComplex) -> int:
    """Euler characteristic of the full cover when the voltage group is finite."""
    if not base.group.is_finite:
        raise InputError("the cover is infinite")
    return base.group.order * base.euler_char()


def load_complex(ref) -> BaseComplex:
    """A library name, a path to a complex file, or an inline record."""
    if isinstance(ref, BaseComplex):
        return ref
    if isinstance(ref, Mapping):
        if "file" in ref:
            return BaseComplex.load(ref["file"])
        if "library" in ref:
            return library_complex(ref["library"])
        return BaseComplex.from_record(ref)
    if isinstance(ref, str) and ref in LIBRARY:
        return library_complex(ref)
    path = Path(str(ref))
    if path.exists():
        return BaseComplex.load(path)
    raise InputError(f"cannot resolve complex {ref!r}")
