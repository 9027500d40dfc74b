from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from equivariant_ph.coinvariants import (
    CoinvariantRep,
    act,
    boundary_term,
    class_equal,
    class_reduce,
    delta,
    folner_mean,
    ones,
    ponzi_flow_free_group,
    whyte_check,
    whyte_refute_ones,
    zero,
)
from equivariant_ph.errors import InputError, NonAmenableError, WindowError
from equivariant_ph.groups import ball, cyclic_group, cyclic_z, folner_set, free_abelian, free_group

Z, Z2, F2, Z5 = cyclic_z(), free_abelian(2), free_group(2), cyclic_group(5)


def rep(spec, c, dev):
    return CoinvariantRep(spec, c, {spec.element(k): v for k, v in dev.items()})


# -- action and boundary terms ------------------------------------------------------


def test_act_examples():
    assert act(Z.element(1), delta(Z.element(0))) == delta(Z.element(-1))
    assert act(Z.element(5), ones(Z)) == ones(Z)
    phi = ones(F2, 2) + delta(F2.identity)
    assert act(F2.word("x"), phi) == ones(F2, 2) + delta(F2.word("X"))


def test_act_definition():
    phi = rep(Z, 3, {2: 1, -4: Fraction(1, 3)})
    g = Z.element(6)
    moved = act(g, phi)
    for h in range(-12, 12):
        assert moved(Z.element(h)) == phi(Z.element(h) * g)


def test_boundary_examples():
    d0 = delta(Z.element(0))
    assert boundary_term(Z.element(1), d0) == d0 - delta(Z.element(-1))
    assert boundary_term(Z.element(1), ones(Z)) == zero(Z)


def test_telescoping():
    phi = rep(Z, 1, {0: 2, 3: -1})
    g = Z.element(1)
    n = 7
    total = zero(Z)
    cur = phi
    for _ in range(n):
        total = total + boundary_term(g, cur)
        cur = act(g, cur)
    assert total == phi - act(Z.element(n), phi)


def test_deviation_has_no_zeros():
    phi = rep(Z, 0, {1: 1}) - rep(Z, 0, {1: 1})
    assert phi.deviation == {}


# -- classes ------------------------------------------------------------------------------


def test_class_examples():
    phi = rep(Z, -2, {3: 1, 7: -5})
    assert str(class_reduce(phi)) == "-2*[1]"
    assert class_reduce(ones(F2, -2)).is_zero
    assert class_reduce(ones(Z5, -2)).value == -10
    assert class_equal(delta(Z.element(0)), zero(Z))
    assert not class_equal(ones(Z), zero(Z))
    assert class_equal(ones(F2), zero(F2))
    # a finite group keeps finitely supported mass
    assert not class_equal(delta(Z5.element(0)), zero(Z5))


_SPECS = [Z, Z2, F2, Z5]


@st.composite
def reps(draw, spec):
    pool = list(ball(spec, None, 2))
    c = draw(st.fractions(min_value=-5, max_value=5, max_denominator=6))
    keys = draw(st.lists(st.sampled_from(pool), max_size=5, unique=True))
    vals = draw(st.lists(st.integers(-4, 4), min_size=len(keys), max_size=len(keys)))
    return CoinvariantRep(spec, c, dict(zip(keys, vals)))


@pytest.mark.parametrize("spec", _SPECS, ids=str)
def test_class_invariant_under_action(spec):
    pool = list(ball(spec, None, 4))

    @given(reps(spec), st.sampled_from(pool))
    def check(phi, g):
        assert class_equal(phi, act(g, phi))
        assert class_reduce(boundary_term(g, phi)).is_zero
        assert boundary_term(g, phi).constant == 0

    check()


@pytest.mark.parametrize("spec", _SPECS, ids=str)
def test_class_equal_is_congruence(spec):
    pool = list(ball(spec, None, 3))

    @given(reps(spec), reps(spec), reps(spec), st.sampled_from(pool))
    def check(a, b, psi, g):
        assert class_equal(a, a)
        assert class_equal(a, b) == class_equal(b, a)
        if class_equal(a, b):
            assert class_equal(a + boundary_term(g, psi), b)
        assert class_reduce(a + b).value == class_reduce(a).value + class_reduce(b).value

    check()


def test_verdicts_independent_of_generating_set():
    phi = rep(Z, -2, {0: 1})
    alt = [Z.element(a) for a in (2, -2, 3, -3)]
    sets = {f"F{N}": folner_set(Z, N) for N in range(0, 30)}
    # delta_0 passes with either metric; the ones function fails with either
    for gens in (None, alt):
        assert whyte_check(delta(Z.element(0)), 1, 1, sets, gens).mode == "certify"
        assert whyte_refute_ones(Z, 2, 2, gens).found
    assert class_reduce(phi) == class_reduce(act(Z.element(4), phi))


def test_record_roundtrip():
    phi = rep(Z2, Fraction(-3, 2), {(1, 0): 2, (0, -1): Fraction(1, 3)})
    assert CoinvariantRep.from_record(phi.to_record()) == phi


def test_group_mismatch():
    with pytest.raises(InputError):
        ones(Z) + ones(Z2)


# -- Følner means -------------------------------------------------------------------------


def test_folner_mean_examples():
    assert folner_mean(ones(Z, -2) + delta(Z.element(0)), 10) == Fraction(-2) + Fraction(1, 21)
    assert folner_mean(ones(Z), 17) == 1
    assert folner_mean(delta(Z2.identity, 5), 2) == Fraction(1, 5)
    with pytest.raises(NonAmenableError):
        folner_mean(ones(F2), 2)


@given(reps(Z), st.integers(0, 40))
def test_folner_mean_error_bound(phi, N):
    err = abs(folner_mean(phi, N) - phi.constant)
    assert err <= phi.deviation_l1() / len(folner_set(Z, N))


# -- Whyte criterion ------------------------------------------------------------------------


def test_whyte_certify_delta():
    sets = {f"[-{N},{N}]": folner_set(Z, N) for N in range(21)}
    r = whyte_check(delta(Z.element(0)), 1, 1, sets)
    assert r.mode == "certify" and r.note == "evidence, not proof"
    assert all(row.lhs <= 1 and row.rhs == 2 for row in r.rows)


def test_whyte_refute_arithmetic():
    r = whyte_check(ones(Z), 3, 2, {"[-10,10]": folner_set(Z, 10)})
    assert r.mode == "refute" and r.counterexample == "[-10,10]"
    assert (r.rows[0].lhs, r.rows[0].rhs) == (21, 12)


def test_whyte_free_group_balls_pass():
    sets = {f"B{k}": ball(F2, None, k).elements for k in range(6)}
    r = whyte_check(ones(F2), 1, 1, sets)
    assert r.mode == "certify"
    assert all(row.size <= row.rhs for row in r.rows)


def test_whyte_window_too_small():
    win = ball(Z, None, 5)
    with pytest.raises(WindowError):
        whyte_check(ones(Z), 1, 2, {"F4": folner_set(Z, 4)}, window=win)
    assert whyte_check(ones(Z), 1, 1, {"F4": folner_set(Z, 4)}, window=win).rows


def test_whyte_csv():
    r = whyte_check(delta(Z.element(0)), 1, 1, [folner_set(Z, 1)])
    assert r.to_csv().splitlines() == ["set,size,lhs,rhs,C,r,pass", "S0,3,1,2,1,1,1"]


def test_refute_ones_examples():
    r = whyte_refute_ones(Z, 3, 2)
    assert (r.N, r.size, r.boundary) == (6, 13, 4)
    # in Z^2 with the standard generators the box [-N,N]^2 has a 4(2N+1) annulus
    r2 = whyte_refute_ones(Z2, 1, 1)
    assert (r2.N, r2.size, r2.boundary) == (2, 25, 20)
    F3 = folner_set(Z2, 3)
    assert len(F3) == 49 and len(F3) > 28 == whyte_check(ones(Z2), 1, 1, [F3]).rows[0].rhs
    r5 = whyte_refute_ones(Z5, 1, 1)
    assert not r5.found and "finite group" in r5.reason


@pytest.mark.parametrize("spec", [Z, Z2], ids=str)
def test_refute_ones_sweep(spec):
    for C in (1, 2, 4, 8):
        for r in (1, 2, 3):
            res = whyte_refute_ones(spec, C, r)
            assert res.found and res.size > C * res.boundary


# -- Ponzi flow ------------------------------------------------------------------------------


def test_ponzi_rank_two():
    p = ponzi_flow_free_group(2, 8)
    assert p.depth_flows[:3] == [Fraction(1, 4), Fraction(5, 12), Fraction(17, 36)]
    assert p.divergence_is_one and len(p.divergence) == len(ball(F2, None, 7))
    assert p.max_flow <= Fraction(1, 2) and p.verified


def test_ponzi_recursion_and_limit():
    p = ponzi_flow_free_group(3, 6)
    assert p.bound == Fraction(1, 4)
    for a, b in zip(p.depth_flows, p.depth_flows[1:]):
        assert b == (a + 1) / 5
        assert a < b < p.bound
    assert p.verified


def test_ponzi_flow_is_sum_of_boundary_terms():
    p = ponzi_flow_free_group(2, 5)
    total = zero(F2)
    for sym, psi in p.flows.items():
        total = total + boundary_term(F2.word([sym]).inverse(), psi)
    for g in ball(F2, None, 4):
        assert total(g) == 1


def test_ponzi_rejects_rank_one():
    with pytest.raises(InputError):
        ponzi_flow_free_group(1, 4)
