import itertools
import warnings

import pytest
from hypothesis import given, strategies as st

from equivariant_ph.errors import InputError, NonAmenableError
from equivariant_ph.groups import (
    ball,
    cyclic_group,
    cyclic_z,
    finite_table,
    folner_set,
    free_abelian,
    free_group,
    group_from_record,
    invert,
    multiply,
    normal_form,
    outer_boundary_count,
    surface_group,
    word_distance,
)

Z, Z2, F2, S2, Z5 = cyclic_z(), free_abelian(2), free_group(2), surface_group(2), cyclic_group(5)


# -- normal forms -------------------------------------------------------------


def test_free_abelian_commutes():
    assert normal_form("x y X", Z2) == Z2.element((0, 1))


def test_free_reduction():
    g = normal_form("x y Y x", F2)
    assert g.nf == (1, 1)
    assert str(g) == "x*x"


def test_surface_relator_is_trivial():
    assert normal_form("a1 b1 A1 B1 a2 b2 A2 B2", S2).is_identity
    # cyclic rotations and the inverse of the relator too
    assert normal_form("b1 A1 B1 a2 b2 A2 B2 a1", S2).is_identity
    assert normal_form("b2 a2 B2 A2 b1 a1 B1 A1", S2).is_identity


def test_surface_dehn_equality():
    # a1 b1 A1 B1 a2 = b2 a2 B2 via the relator
    assert normal_form("a1 b1 A1 B1 a2", S2) == normal_form("b2 a2 B2", S2)
    assert normal_form("a1 b1", S2) != normal_form("b1 a1", S2)


def test_unknown_symbol():
    with pytest.raises(InputError):
        normal_form("x q", F2)


def test_multiply_examples():
    Z1 = free_abelian(1)
    assert multiply(Z1.element((3,)), Z1.element((4,))) == Z1.element((7,))
    assert str(invert(F2.word("xy"))) == "Y*X"
    assert multiply(Z5.element(3), Z5.element(4)) == Z5.element(2)


def test_family_mismatch():
    with pytest.raises(InputError):
        multiply(Z.element(1), Z2.element((1, 0)))


def test_finite_table_axioms_checked():
    bad = [[0, 1], [1, 1]]
    with pytest.raises(InputError):
        finite_table(bad, 0, [1])
    nonassoc = [[0, 1, 2], [1, 0, 0], [2, 0, 0]]
    with pytest.raises(InputError):
        finite_table(nonassoc, 0, [1])


def test_record_roundtrip():
    for spec in (Z, Z2, F2, S2, Z5):
        assert group_from_record(spec.describe()) == spec


@pytest.mark.parametrize("spec", [Z2, F2, S2, Z5], ids=str)
def test_parse_format_roundtrip(spec):
    for g in ball(spec, None, 2):
        assert spec.parse(str(g)) == g


# -- homomorphism property ----------------------------------------------------


def _words(spec):
    syms = list(spec.symbols) + [s[0].upper() + s[1:] for s in spec.symbols]
    return st.lists(st.sampled_from(syms), max_size=12)


@pytest.mark.parametrize("spec", [Z, Z2, F2, S2, Z5], ids=str)
def test_homomorphism(spec):
    @given(_words(spec), _words(spec))
    def check(w1, w2):
        assert normal_form(w1 + w2, spec) == multiply(normal_form(w1, spec), normal_form(w2, spec))

    check()


@pytest.mark.parametrize("spec", [Z, Z2, F2, S2, Z5], ids=str)
def test_group_axioms(spec):
    @given(_words(spec), _words(spec), _words(spec))
    def check(a, b, c):
        x, y, z = (normal_form(w, spec) for w in (a, b, c))
        assert (x * y) * z == x * (y * z)
        assert (x * x.inverse()).is_identity
        assert invert(invert(x)) == x
        assert spec.parse(str(x)) == x

    check()


# -- balls and metrics ---------------------------------------------------------


def test_ball_examples():
    b = ball(Z, None, 2)
    assert sorted(g.nf for g in b) == [-2, -1, 0, 1, 2]
    assert len(ball(F2, None, 2)) == 17
    assert len(ball(Z5, None, 2)) == 5
    assert b.distance[Z.identity] == 0


@pytest.mark.parametrize("k", [2, 3])
def test_free_sphere_sizes(k):
    spec = free_group(k)
    b = ball(spec, None, 6 if k == 2 else 4)
    for r in range(1, b.radius + 1):
        assert len(b.sphere(r)) == 2 * k * (2 * k - 1) ** (r - 1)


def test_ball_growth_and_parents():
    for spec in (Z2, F2, S2):
        sizes = [len(ball(spec, None, r)) for r in range(4)]
        assert sizes == sorted(sizes)
        b = ball(spec, None, 3)
        for g in b:
            p = b.parent[g]
            if p is not None:
                assert p in b and b.distance[p] == b.distance[g] - 1


def test_surface_ball_sizes():
    # growth series of the genus-2 surface group (octagon tiling): 1, 8, 56, 392
    assert [len(ball(S2, None, r)) for r in range(4)] == [1, 9, 65, 457]


def test_nonsymmetric_generating_set():
    with pytest.raises(InputError):
        ball(Z, [Z.element(1)], 2)


def test_alternative_generating_set():
    gens = [Z.element(a) for a in (2, -2, 3, -3)]
    b = ball(Z, gens, 1)
    assert sorted(g.nf for g in b) == [-3, -2, 0, 2, 3]
    assert word_distance(Z.identity, Z.element(1), gens) == 2


def test_word_metric_axioms():
    b = ball(F2, None, 2)
    els = list(b)[:12]
    for x, y, z in itertools.product(els, repeat=3):
        dxy = word_distance(x, y)
        assert dxy == word_distance(y, x)
        assert word_distance(x, z) <= dxy + word_distance(y, z)


# -- boundaries and Følner sets ---------------------------------------------------


def test_outer_boundary_examples():
    assert outer_boundary_count([Z.element(i) for i in range(-10, 11)], 2) == 4
    assert outer_boundary_count([Z2.identity], 1) == 4
    assert outer_boundary_count(ball(F2, None, 1).elements, 1) == 12


def test_outer_boundary_empty():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert outer_boundary_count([], 1, Z) == 0
    assert w


def test_folner_examples():
    assert sorted(g.nf for g in folner_set(Z, 3)) == list(range(-3, 4))
    assert len(folner_set(Z2, 1)) == 9
    assert len(folner_set(Z5, 7)) == 5
    with pytest.raises(NonAmenableError, match="non-amenable family"):
        folner_set(F2, 1)
    with pytest.raises(NonAmenableError):
        folner_set(S2, 1)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_folner_ratio_bound(d):
    spec = free_abelian(d)
    for N in range(0, 6 if d < 3 else 3):
        F = folner_set(spec, N)
        assert outer_boundary_count(F, 1) / len(F) <= 2 * d / (N + 1)
