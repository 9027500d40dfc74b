import json

import pytest

from equivariant_ph.complexes import (
    LIBRARY,
    BaseComplex,
    Edge,
    build_window,
    euler_char,
    facet_generators,
    finite_cover_euler_char,
    flip_triangle,
    fundamental_domain,
    library_complex,
    load_complex,
    orientation_conflicts,
    orientation_opposition_check,
    validate_base,
)
from equivariant_ph.errors import InputError, ValidationError
from equivariant_ph.groups import ball, cyclic_z

Z = cyclic_z()

# (vertices, edges, triangles, chi) of the library complexes
CELL_COUNTS = {
    "circle_Z": (3, 3, 0, 0),
    "torus_Z2": (12, 36, 24, 0),
    "torus_Zmod2": (12, 36, 24, 0),
    "genus2_ladder_Z": (22, 72, 48, -2),
    "genus2_F2": (22, 72, 48, -2),
    "genus2_Z5": (22, 72, 48, -2),
}


@pytest.fixture(scope="module", params=LIBRARY)
def lib(request):
    return library_complex(request.param)


def test_library_valid_and_counted(lib):
    assert validate_base(lib).valid
    v, e, t, chi = CELL_COUNTS[lib.name]
    assert (len(lib.vertices), len(lib.edges), len(lib.triangles)) == (v, e, t)
    assert euler_char(lib) == chi == v - e + t


def test_unknown_library_name():
    with pytest.raises(InputError):
        library_complex("klein_bottle")


def test_circle_three_edges_valid():
    base = BaseComplex("c", Z, ["a", "b", "c"], [Edge("x", "a", "b", Z.element(1)),
                                                 Edge("y", "b", "c", Z.identity),
                                                 Edge("z", "c", "a", Z.identity)])
    assert validate_base(base).valid and euler_char(base) == 0


def _record(name):
    return library_complex(name).to_record()


def test_flatness_violation():
    rec = _record("torus_Z2")
    e = next(e for e in rec["edges"] if e["voltage"] == "(0,0)")
    e["voltage"] = "(1,0)"
    rep = validate_base(BaseComplex.from_record(rec))
    assert rep.kinds() == {"flatness violation"}
    assert len(rep.violations) == 2  # the two triangles on that edge


def test_non_manifold():
    rec = _record("torus_Z2")
    rec["triangles"] = rec["triangles"][1:]
    rep = validate_base(BaseComplex.from_record(rec))
    assert "non-manifold" in rep.kinds()


def test_incoherent_orientation():
    base = library_complex("genus2_ladder_Z")
    rep = validate_base(flip_triangle(base, base.top_cells[0]))
    assert rep.kinds() == {"incoherent orientation"}
    assert len(rep.violations) == 3


def test_circle_orientation_and_degree():
    bad = BaseComplex("c", Z, ["a", "b", "c"], [Edge("x", "a", "b", Z.element(1)),
                                                Edge("y", "c", "b", Z.identity),
                                                Edge("z", "c", "a", Z.identity)])
    assert validate_base(bad).kinds() == {"incoherent orientation"}
    loose = BaseComplex("p", Z, ["a", "b"], [Edge("x", "a", "b", Z.element(1))])
    assert validate_base(loose).kinds() == {"non-manifold"}


def test_record_roundtrip(tmp_path, lib):
    path = tmp_path / "c.json"
    lib.dump(path)
    again = load_complex(str(path))
    assert again.to_record() == lib.to_record()
    assert json.loads(path.read_text())["schema"] == "equivariant-ph/complex/1"
    assert load_complex({"library": lib.name}).to_record() == lib.to_record()


def test_unresolvable_complex():
    with pytest.raises(InputError):
        load_complex("/nonexistent/complex.json")


# -- windows -----------------------------------------------------------------------------


def test_window_copy_counts():
    assert len(build_window(library_complex("circle_Z"), R=3).copies) == 7
    assert len(build_window(library_complex("genus2_ladder_Z"), R=2).copies) == 5
    w = build_window(library_complex("genus2_F2"), R=2)
    assert len(w.copies) == 17
    assert w.ncells == 17 * 142


def test_window_radius_too_small():
    with pytest.raises(InputError):
        build_window(library_complex("circle_Z"), R=1)


def test_window_rejects_invalid_base():
    base = library_complex("torus_Z2")
    with pytest.raises(ValidationError):
        build_window(flip_triangle(base, base.top_cells[3]), R=3)


@pytest.mark.parametrize("name", LIBRARY)
def test_window_equivariance_and_covering(name):
    w = build_window(library_complex(name), R=3)
    assert w.equivariance_check()
    assert w.covering_check()


def test_deck_action_permutes_cells():
    w = build_window(library_complex("genus2_ladder_Z"), R=4)
    h = Z.element(1)
    inner = [c for c in w.cells() if c[1] in set(w.ball.within(2))]
    moved = {w.act(h, c) for c in inner}
    assert len(moved) == len(inner) and all(c in w for c in moved)


@pytest.mark.parametrize("name", LIBRARY)
def test_domain_translates_tile(name):
    """Top cells lie in exactly one translate; codimension-1 cells of the core are shared by two."""
    base = library_complex(name)
    w = build_window(base, R=3)
    n = base.dimension
    core = set(w.core)
    count = {}
    for g in w.copies:
        for t in base.cells[n]:
            for f, _ in w.boundary((t, g)):
                count.setdefault(f, []).append(g)
    for f, owners in count.items():
        if f[1] in core:
            assert len(owners) == 2
    dom = fundamental_domain(base)
    # boundary of D is the union of the facets D meet sD
    boundary = {(c, off) for c, off, _ in
                [x for fs in dom.facets.values() for x in fs]}
    shared = {f for f, owners in count.items() if w.group.identity in owners and len(set(owners)) == 2}
    assert boundary == {(c, g) for c, g in shared}
    assert dom.facet_pairing_ok()


# -- facets and orientations --------------------------------------------------------------


def _S(name, R=3):
    return facet_generators(build_window(library_complex(name), R=R))


def test_facets_circle_and_ladder():
    for name in ("circle_Z", "genus2_ladder_Z"):
        fg = _S(name)
        assert sorted(g.nf for g in fg.S) == [-1, 1]
        assert [g.nf for g in fg.S_plus] == [1] and [g.nf for g in fg.S_minus] == [-1]
        assert fg.S_zero == [] and fg.partition_ok and fg.symmetric and fg.generates_window


def test_facets_torus():
    fg = _S("torus_Z2")
    assert {g.nf for g in fg.S} >= {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert fg.partition_ok and fg.generates_window


def test_facets_order_two():
    fg = _S("torus_Zmod2")
    assert [str(g) for g in fg.S_zero] == ["[1]"] and fg.S_plus == fg.S_minus == []


def test_facets_free_group():
    fg = _S("genus2_F2")
    assert sorted(map(str, fg.S)) == ["X", "Y", "x", "y"]
    assert fg.partition_ok and fg.generates_window


def test_facet_set_reproduces_ball():
    """BFS over S agrees with BFS over the declared generators on the window."""
    w = build_window(library_complex("genus2_F2"), R=3)
    fg = facet_generators(w)
    assert dict(ball(w.group, fg.S, 2).distance) == dict(ball(w.group, None, 2).distance)


def test_facet_count_matches_generators():
    for name in ("genus2_ladder_Z", "genus2_F2", "torus_Z2"):
        dom = fundamental_domain(library_complex(name))
        assert len(dom.facets) == len(_S(name).S)
        assert all(dom.facets[s] for s in dom.facets)


@pytest.mark.parametrize("name", LIBRARY)
def test_orientation_opposition(name):
    assert orientation_opposition_check(build_window(library_complex(name), R=3))


def test_orientation_flipped_fixture():
    base = library_complex("genus2_ladder_Z")
    bad = flip_triangle(base, "T0.0a")
    w = build_window(bad, R=3, validate=False)
    assert not orientation_opposition_check(w)
    assert {c for c, _ in orientation_conflicts(w)} == {e for e, _ in bad.triangles["T0.0a"].edges}


def test_finite_cover_euler():
    assert finite_cover_euler_char(library_complex("genus2_Z5")) == -10
    assert finite_cover_euler_char(library_complex("torus_Zmod2")) == 0
    with pytest.raises(InputError):
        finite_cover_euler_char(library_complex("genus2_ladder_Z"))
