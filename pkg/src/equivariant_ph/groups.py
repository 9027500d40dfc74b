"""Finitely generated groups with a solvable word problem.

Five families are supported: the integers, free abelian groups, free groups,
closed orientable surface groups (genus >= 2, standard one-relator
presentation, Dehn's algorithm) and finite groups given by a multiplication
table. Elements are :class:`GroupElement` values carrying a family-specific
normal form; every metric question is answered by breadth-first search in the
Cayley graph, never by the length of a normal form.
"""

from __future__ import annotations

import functools
import itertools
import re
import warnings
from collections import deque
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import InputError, NonAmenableError

FAMILIES = ("CyclicZ", "FreeAbelian", "Free", "SurfaceGroup", "FiniteTable")

_TOKEN = re.compile(r"([A-Za-z][0-9]*)\s*(\^\s*\(?\s*-1\s*\)?|⁻¹)?")

# SL(2, Z/p) images used to hash surface-group elements.
_HASH_PRIME = 10007
_HASH_A = (1, 2, 3, 7)
_HASH_B = (2, 1, 7, 4)


def _free_reduce(letters: Iterable[int]) -> list[int]:
    out: list[int] = []
    for a in letters:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return out


def _invert_word(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(-a for a in reversed(letters))


def _mat_mul(m, n, p=_HASH_PRIME):
    a, b, c, d = m
    e, f, g, h = n
    return ((a * e + b * g) % p, (a * f + b * h) % p,
            (c * e + d * g) % p, (c * f + d * h) % p)


def _mat_inv(m, p=_HASH_PRIME):
    a, b, c, d = m  # determinant is 1
    return (d % p, (-b) % p, (-c) % p, a % p)


@dataclass(frozen=True)
class GroupSpec:
    """A group family together with its abstract generator symbols.

    ``rank`` is the rank for ``FreeAbelian``/``Free`` and the genus for
    ``SurfaceGroup``. ``FiniteTable`` groups carry a multiplication table on
    ``0..n-1``, the identity id and the ids of the generators.
    """

    family: str
    rank: int = 1
    table: tuple[tuple[int, ...], ...] | None = None
    identity_id: int = 0
    table_generators: tuple[int, ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown group family {self.family!r}")
        if self.family in ("FreeAbelian", "Free") and self.rank < 1:
            raise InputError("rank must be a positive integer")
        if self.family == "SurfaceGroup" and self.rank < 2:
            raise InputError("surface groups need genus >= 2")
        if self.family == "FiniteTable":
            self._check_table()

    # -- construction checks -------------------------------------------------

    def _check_table(self):
        t = self.table
        if not t:
            raise InputError("FiniteTable needs a nonempty multiplication table")
        n = len(t)
        if any(len(row) != n or any(not 0 <= x < n for x in row) for row in t):
            raise InputError("multiplication table must be n x n with entries in 0..n-1")
        e = self.identity_id
        if not 0 <= e < n:
            raise InputError("identity id out of range")
        if any(t[e][a] != a or t[a][e] != a for a in range(n)):
            raise InputError("identity axiom fails")
        for a in range(n):
            if not any(t[a][b] == e and t[b][a] == e for b in range(n)):
                raise InputError(f"element {a} has no inverse")
        for a, b, c in itertools.product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise InputError(f"associativity fails at ({a},{b},{c})")
        if not self.table_generators:
            raise InputError("FiniteTable needs a nonempty generator list")
        if any(not 0 <= g < n for g in self.table_generators):
            raise InputError("generator id out of range")
        seen = {e}
        frontier = [e]
        while frontier:
            nxt = []
            for a in frontier:
                for g in self.table_generators:
                    for h in (t[a][g], t[a][self._table_inverse(g)]):
                        if h not in seen:
                            seen.add(h)
                            nxt.append(h)
            frontier = nxt
        if len(seen) != n:
            raise InputError("declared generators do not generate the table group")

    def _table_inverse(self, a: int) -> int:
        t, e = self.table, self.identity_id
        return next(b for b in range(len(t)) if t[a][b] == e)

    # -- basic properties ----------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.family == "FiniteTable"

    @property
    def order(self) -> int | None:
        return len(self.table) if self.is_finite else None

    @property
    def amenable(self) -> bool:
        if self.family == "Free":
            return self.rank == 1
        return self.family != "SurfaceGroup"

    @functools.cached_property
    def symbols(self) -> tuple[str, ...]:
        """Positive generator symbols; the formal inverse of ``x`` is ``X``."""
        f = self.family
        if f == "CyclicZ":
            return ("t",)
        if f in ("FreeAbelian", "Free"):
            if self.rank <= 3:
                return tuple("xyz"[: self.rank])
            return tuple(f"x{i}" for i in range(1, self.rank + 1))
        if f == "SurfaceGroup":
            return tuple(s for i in range(1, self.rank + 1) for s in (f"a{i}", f"b{i}"))
        return tuple(f"g{g}" for g in self.table_generators)

    @functools.cached_property
    def _symbol_index(self) -> dict[str, int]:
        return {s: i + 1 for i, s in enumerate(self.symbols)}

    @functools.cached_property
    def _relators(self) -> dict[int, list[tuple[int, ...]]]:
        # symmetrized relator set of the surface presentation, indexed by first letter
        r: list[int] = []
        for i in range(self.rank):
            a, b = 2 * i + 1, 2 * i + 2
            r += [a, b, -a, -b]
        cyc = []
        for word in (r, list(_invert_word(r))):
            for k in range(len(word)):
                cyc.append(tuple(word[k:] + word[:k]))
        out: dict[int, list[tuple[int, ...]]] = {}
        for w in cyc:
            out.setdefault(w[0], []).append(w)
        return out

    @functools.cached_property
    def _hash_images(self):
        # a_1 -> A, b_1 -> B, a_2 -> B, b_2 -> A, others trivial; relator maps to I
        ident = (1, 0, 0, 1)
        images = {}
        for i in range(self.rank):
            if i == 0:
                ma, mb = _HASH_A, _HASH_B
            elif i == 1:
                ma, mb = _HASH_B, _HASH_A
            else:
                ma, mb = ident, ident
            images[2 * i + 1], images[2 * i + 2] = ma, mb
            images[-(2 * i + 1)], images[-(2 * i + 2)] = _mat_inv(ma), _mat_inv(mb)
        return images

    # -- words and normal forms ---------------------------------------------

    def letters(self, word: str | Sequence[str]) -> list[int]:
        """Translate a word into signed generator indices (1-based)."""
        if isinstance(word, str):
            tokens = []
            pos = 0
            text = word.strip()
            while pos < len(text):
                if text[pos] in " *.·":
                    pos += 1
                    continue
                m = _TOKEN.match(text, pos)
                if not m:
                    raise InputError(f"cannot parse word {word!r} at position {pos}")
                tokens.append(m.group(1) + ("^-1" if m.group(2) else ""))
                pos = m.end()
        else:
            tokens = list(word)
        out = []
        for tok in tokens:
            inv = tok.endswith("^-1") or tok.endswith("⁻¹")
            sym = tok.replace("^-1", "").replace("⁻¹", "")
            if sym in ("e", "1"):
                continue
            if sym and sym[0].isupper():
                sym = sym[0].lower() + sym[1:]
                inv = not inv
            idx = self._symbol_index.get(sym)
            if idx is None:
                raise InputError(f"unknown generator symbol {tok!r} for {self.family}")
            out.append(-idx if inv else idx)
        return out

    def _nf_from_letters(self, letters: Sequence[int]):
        f = self.family
        if f == "CyclicZ":
            return sum(1 if a > 0 else -1 for a in letters)
        if f == "FreeAbelian":
            v = [0] * self.rank
            for a in letters:
                v[abs(a) - 1] += 1 if a > 0 else -1
            return tuple(v)
        if f == "Free":
            return tuple(_free_reduce(letters))
        if f == "SurfaceGroup":
            return self._dehn_reduce(letters)
        x = self.identity_id
        for a in letters:
            g = self.table_generators[abs(a) - 1]
            x = self.table[x][g if a > 0 else self._table_inverse(g)]
        return x

    def _dehn_reduce(self, letters: Sequence[int]) -> tuple[int, ...]:
        w = _free_reduce(letters)
        half = 2 * self.rank  # half the relator length 4g
        rels = self._relators
        changed = True
        while changed:
            changed = False
            for i in range(len(w)):
                for rel in rels.get(w[i], ()):
                    n = 0
                    lim = min(len(rel), len(w) - i)
                    while n < lim and w[i + n] == rel[n]:
                        n += 1
                    if n > half:
                        w = _free_reduce(w[:i] + list(_invert_word(rel[n:])) + w[i + n:])
                        changed = True
                        break
                if changed:
                    break
        return tuple(w)

    def _mul(self, x, y):
        f = self.family
        if f == "CyclicZ":
            return x + y
        if f == "FreeAbelian":
            return tuple(a + b for a, b in zip(x, y))
        if f == "Free":
            return tuple(_free_reduce(x + y))
        if f == "SurfaceGroup":
            return self._dehn_reduce(x + y)
        return self.table[x][y]

    def _inv(self, x):
        f = self.family
        if f == "CyclicZ":
            return -x
        if f == "FreeAbelian":
            return tuple(-a for a in x)
        if f in ("Free", "SurfaceGroup"):
            return _invert_word(x)
        return self._table_inverse(x)

    def _identity_nf(self):
        f = self.family
        if f == "CyclicZ":
            return 0
        if f == "FreeAbelian":
            return (0,) * self.rank
        if f in ("Free", "SurfaceGroup"):
            return ()
        return self.identity_id

    def _hash_key(self, x):
        if self.family != "SurfaceGroup":
            return x
        ab = [0] * (2 * self.rank)
        m = (1, 0, 0, 1)
        images = self._hash_images
        for a in x:
            ab[abs(a) - 1] += 1 if a > 0 else -1
            m = _mat_mul(m, images[a])
        return tuple(ab), m

    def _equal(self, x, y) -> bool:
        if x == y:
            return True
        if self.family != "SurfaceGroup":
            return False
        return self._dehn_reduce(tuple(x) + _invert_word(y)) == ()

    # -- public element constructors -----------------------------------------

    @property
    def identity(self) -> GroupElement:
        return GroupElement(self, self._identity_nf())

    def word(self, word: str | Sequence[str]) -> GroupElement:
        return GroupElement(self, self._nf_from_letters(self.letters(word)))

    def element(self, value) -> GroupElement:
        """Build an element from a literal normal form or a word."""
        f = self.family
        if isinstance(value, GroupElement):
            if value.spec != self:
                raise InputError("element belongs to a different group")
            return value
        if f == "CyclicZ" and isinstance(value, int):
            return GroupElement(self, value)
        if f == "FreeAbelian" and isinstance(value, (tuple, list)) and all(
            isinstance(a, int) for a in value
        ):
            if len(value) != self.rank:
                raise InputError(f"expected a vector of length {self.rank}")
            return GroupElement(self, tuple(value))
        if f == "FiniteTable" and isinstance(value, int):
            if not 0 <= value < len(self.table):
                raise InputError(f"no element with id {value}")
            return GroupElement(self, value)
        if isinstance(value, str):
            return self.parse(value)
        return self.word(value)

    @functools.cached_property
    def generators(self) -> tuple[GroupElement, ...]:
        """Standard symmetric generating set: each symbol and its inverse."""
        out = []
        for s in self.symbols:
            out.append(self.word([s]))
            out.append(self.word([s + "^-1"]))
        return tuple(dict.fromkeys(out))

    def elements(self) -> list[GroupElement]:
        if not self.is_finite:
            raise InputError("only finite groups can enumerate their elements")
        return [GroupElement(self, i) for i in range(len(self.table))]

    # -- text form -----------------------------------------------------------

    def _symbol(self, a: int) -> str:
        s = self.symbols[abs(a) - 1]
        return s if a > 0 else s[0].upper() + s[1:]

    def format(self, g: GroupElement) -> str:
        x = g.nf
        f = self.family
        if f == "CyclicZ":
            return str(x)
        if f == "FreeAbelian":
            return "(" + ",".join(str(a) for a in x) + ")"
        if f == "FiniteTable":
            return f"[{x}]"
        return "*".join(self._symbol(a) for a in x) if x else "e"

    def parse(self, text: str) -> GroupElement:
        s = text.strip()
        f = self.family
        if f == "CyclicZ" and re.fullmatch(r"[+-]?\d+", s):
            return GroupElement(self, int(s))
        if f == "FreeAbelian" and s.startswith("("):
            parts = [p for p in s.strip("()").split(",") if p.strip()]
            return self.element([int(p) for p in parts])
        if f == "FiniteTable" and s.startswith("["):
            return self.element(int(s.strip("[]")))
        return self.word(s)

    def describe(self) -> dict:
        """JSON-ready descriptor, inverse of :func:`group_from_record`."""
        if self.family == "CyclicZ":
            return {"family": "CyclicZ"}
        if self.family in ("FreeAbelian", "Free"):
            return {"family": self.family, "rank": self.rank}
        if self.family == "SurfaceGroup":
            return {"family": "SurfaceGroup", "genus": self.rank}
        return {
            "family": "FiniteTable",
            "table": [list(r) for r in self.table],
            "identity": self.identity_id,
            "generators": list(self.table_generators),
        }

    def __str__(self):
        f = self.family
        if f == "CyclicZ":
            return "Z"
        if f == "FreeAbelian":
            return f"Z^{self.rank}"
        if f == "Free":
            return f"F{self.rank}"
        if f == "SurfaceGroup":
            return f"pi1(S_{self.rank})"
        return f"FiniteTable(order {len(self.table)})"


class GroupElement:
    """An element of a :class:`GroupSpec`, stored by its normal form.

    Equality is exact for every family. For surface groups the stored word is
    only Dehn-reduced, so equality falls back to reducing ``a * b^-1``.
    """

    __slots__ = ("spec", "nf", "_h")

    def __init__(self, spec: GroupSpec, nf):
        self.spec = spec
        self.nf = nf
        self._h = None

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        if self.spec is not other.spec and self.spec != other.spec:
            return False
        return self.spec._equal(self.nf, other.nf)

    def __hash__(self):
        if self._h is None:
            self._h = hash(self.spec._hash_key(self.nf))
        return self._h

    def __mul__(self, other):
        return multiply(self, other)

    def inverse(self) -> GroupElement:
        return invert(self)

    @property
    def is_identity(self) -> bool:
        return self == self.spec.identity

    def sort_key(self):
        x = self.nf
        if isinstance(x, tuple):
            return (sum(abs(a) for a in x), len(x), tuple(abs(a) for a in x), x)
        return (abs(x), x < 0, x)

    def __str__(self):
        return self.spec.format(self)

    def __repr__(self):
        return f"GroupElement({self.spec}, {self})"


def group_from_record(rec: Mapping) -> GroupSpec:
    """Build a group from a JSON descriptor (see :meth:`GroupSpec.describe`)."""
    fam = rec.get("family")
    if fam == "CyclicZ":
        return cyclic_z()
    if fam == "FreeAbelian":
        return free_abelian(int(rec.get("rank", 1)))
    if fam == "Free":
        return free_group(int(rec.get("rank", 2)))
    if fam == "SurfaceGroup":
        return surface_group(int(rec.get("genus", 2)))
    if fam == "Cyclic":
        return cyclic_group(int(rec["order"]))
    if fam == "FiniteTable":
        return finite_table(rec["table"], rec.get("identity", 0), rec.get("generators"))
    raise InputError(f"unknown group family {fam!r}")


def cyclic_z() -> GroupSpec:
    return GroupSpec("CyclicZ")


def free_abelian(d: int) -> GroupSpec:
    return GroupSpec("FreeAbelian", rank=d)


def free_group(k: int) -> GroupSpec:
    return GroupSpec("Free", rank=k)


def surface_group(genus: int) -> GroupSpec:
    return GroupSpec("SurfaceGroup", rank=genus)


def finite_table(table, identity: int = 0, generators=None) -> GroupSpec:
    t = tuple(tuple(int(x) for x in row) for row in table)
    gens = tuple(generators) if generators else tuple(i for i in range(len(t)) if i != identity)
    return GroupSpec("FiniteTable", table=t, identity_id=identity, table_generators=gens)


def cyclic_group(n: int) -> GroupSpec:
    """Z/n as a multiplication table, generated by 1."""
    if n < 1:
        raise InputError("order must be positive")
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return finite_table(table, 0, (1,) if n > 1 else (0,))


# -- operations ---------------------------------------------------------------


def normal_form(word: str | Sequence[str], spec: GroupSpec) -> GroupElement:
    return spec.word(word)


def multiply(a: GroupElement, b: GroupElement, spec: GroupSpec | None = None) -> GroupElement:
    if a.spec != b.spec or (spec is not None and a.spec != spec):
        raise InputError("family mismatch in multiply")
    return GroupElement(a.spec, a.spec._mul(a.nf, b.nf))


def invert(a: GroupElement) -> GroupElement:
    return GroupElement(a.spec, a.spec._inv(a.nf))


@dataclass(frozen=True)
class Ball:
    """Elements at word distance <= radius, in breadth-first order."""

    spec: GroupSpec
    generating_set: tuple[GroupElement, ...]
    radius: int
    elements: tuple[GroupElement, ...]
    distance: Mapping[GroupElement, int]
    parent: Mapping[GroupElement, GroupElement | None]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g):
        return g in self.distance

    def sphere(self, k: int) -> list[GroupElement]:
        return [g for g in self.elements if self.distance[g] == k]

    def within(self, k: int) -> list[GroupElement]:
        return [g for g in self.elements if self.distance[g] <= k]


def _check_generating_set(spec: GroupSpec, gens: Sequence[GroupElement]) -> tuple:
    gens = tuple(spec.element(g) for g in gens)
    if not gens:
        raise InputError("generating set is empty")
    gs = set(gens)
    for g in gens:
        if g.inverse() not in gs:
            raise InputError(f"generating set is not symmetric: {g}^-1 missing")
    return gens


@functools.lru_cache(maxsize=256)
def _ball_cached(spec: GroupSpec, gens: tuple, r: int) -> Ball:
    e = spec.identity
    dist = {e: 0}
    parent = {e: None}
    order = [e]
    frontier = [e]
    for k in range(1, r + 1):
        nxt = []
        for g in frontier:
            for s in gens:
                h = g * s
                if h not in dist:
                    dist[h] = k
                    parent[h] = g
                    nxt.append(h)
                    order.append(h)
        frontier = nxt
        if not frontier:
            break
    return Ball(spec, gens, r, tuple(order), MappingProxyType(dist), MappingProxyType(parent))


def ball(spec: GroupSpec, generating_set: Sequence[GroupElement] | None, r: int) -> Ball:
    """Exact word-metric ball of radius ``r`` (memoized per spec, gens, r)."""
    if r < 0:
        raise InputError("radius must be nonnegative")
    gens = spec.generators if generating_set is None else _check_generating_set(spec, generating_set)
    return _ball_cached(spec, gens, int(r))


def word_distance(a: GroupElement, b: GroupElement, generating_set=None, limit: int = 64) -> int:
    """d(a, b) = |a^-1 b| by BFS, searching up to ``limit``."""
    target = a.inverse() * b
    spec = a.spec
    gens = spec.generators if generating_set is None else _check_generating_set(spec, generating_set)
    if target.is_identity:
        return 0
    seen = {spec.identity}
    frontier = [spec.identity]
    for k in range(1, limit + 1):
        nxt = []
        for g in frontier:
            for s in gens:
                h = g * s
                if h == target:
                    return k
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    raise InputError(f"distance exceeds search limit {limit}")


def outer_boundary_count(S: Iterable[GroupElement], r: int, spec: GroupSpec | None = None,
                         gens: Sequence[GroupElement] | None = None) -> int:
    """#{g : 0 < d(g, S) <= r}, by multi-source BFS from S."""
    S = set(S)
    if not S:
        warnings.warn("outer_boundary_count called with an empty set; returning 0", stacklevel=2)
        return 0
    if spec is None:
        spec = next(iter(S)).spec
    if r < 1:
        raise InputError("r must be >= 1")
    gens = spec.generators if gens is None else _check_generating_set(spec, gens)
    seen = set(S)
    frontier = list(S)
    count = 0
    for _ in range(r):
        nxt = []
        for g in frontier:
            for s in gens:
                h = g * s
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        count += len(nxt)
        frontier = nxt
    return count


def folner_set(spec: GroupSpec, N: int) -> list[GroupElement]:
    """Standard Følner sets: intervals, boxes, or the whole finite group."""
    if N < 0:
        raise InputError("N must be nonnegative")
    f = spec.family
    if f == "CyclicZ":
        return [GroupElement(spec, i) for i in range(-N, N + 1)]
    if f == "FreeAbelian":
        return [GroupElement(spec, v) for v in itertools.product(range(-N, N + 1), repeat=spec.rank)]
    if f == "Free" and spec.rank == 1:
        return [GroupElement(spec, (1,) * i if i >= 0 else (-1,) * (-i)) for i in range(-N, N + 1)]
    if f == "FiniteTable":
        return spec.elements()
    raise NonAmenableError(f"non-amenable family: {spec}")
