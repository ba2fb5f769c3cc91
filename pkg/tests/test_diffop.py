"""Operators with odd coefficients: products, powers, projections, stats."""

import pytest
from hypothesis import given, settings

from ncommute.diffop import (SuperDiffOp, bullet, bullet_power, circ,
                             circ_power, compose, d_power, odd_derivation,
                             pdeg_json, power, stats_json)
from ncommute.grassmann import NEG_INF, eta
from util import operators


@given(operators(2), operators(2))
def test_compose_splits_into_circ_and_bullet(X, Y):
    assert compose(X, Y) == circ(X, Y) + bullet(X, Y)


@given(operators(2), operators(2), operators(2))
@settings(max_examples=40)
def test_compose_associative(X, Y, Z):
    assert (X * Y) * Z == X * (Y * Z)


@given(operators(2), operators(2), operators(2))
@settings(max_examples=40)
def test_bullet_associative(X, Y, Z):
    assert bullet(bullet(X, Y), Z) == bullet(X, bullet(Y, Z))


@given(operators(2, parity=1), operators(2, parity=1))
def test_bullet_anticommutes_on_odd(X, Y):
    assert bullet(X, Y) == -bullet(Y, X)


@given(operators(2, max_order=1, parity=0), operators(2, parity=0),
       operators(2))
@settings(max_examples=40)
def test_circ_derives_bullet(X, Y, Z):
    """First-order X acts on a bullet product by the Leibniz rule."""
    lhs = circ(X, bullet(Y, Z))
    rhs = bullet(circ(X, Y), Z) + bullet(Y, circ(X, Z))
    assert lhs == rhs


@given(operators(2, max_order=1, parity=1), operators(2, parity=1),
       operators(2))
@settings(max_examples=40)
def test_circ_derives_bullet_signed(X, Y, Z):
    """Odd past odd picks up a sign in the Leibniz rule."""
    lhs = circ(X, bullet(Y, Z))
    rhs = bullet(circ(X, Y), Z) - bullet(Y, circ(X, Z))
    assert lhs == rhs


def test_single_and_scalars():
    n = 2
    X = SuperDiffOp.single(n, (eta(n, 1),), (1, 0), 3)
    assert 2 * X == X + X
    assert (X - X).is_zero()
    assert not X.is_zero()
    assert bool(X)
    Y = 3 * SuperDiffOp.single(n, (eta(n, 1),), (1, 0))
    assert X == Y
    assert hash(X) == hash(Y)


def test_d_squared_has_no_bullet_part():
    n = 3
    D = odd_derivation(n)
    assert bullet(D, D).is_zero()
    assert D * D == circ(D, D)


def test_pdeg_and_parity():
    n = 2
    D = odd_derivation(n)
    assert D.pdeg() == 1
    assert D.parity() == 1
    F = D * D
    assert F.parity() == 0
    assert SuperDiffOp.zero(n).pdeg() == NEG_INF
    with pytest.raises(ValueError):
        (D + F).parity()


def test_power_matches_repeated_compose():
    n = 2
    D = odd_derivation(n)
    assert power(D, 1) == D
    assert power(D, 3) == (D * D) * D
    F = D * D
    assert circ_power(F, 2) == circ(F, F)
    assert bullet_power(F, 3) == bullet(bullet(F, F), F)


def test_d_power_cache_and_divfree():
    a = d_power(2, 4)
    b = d_power(2, 4)
    assert a is b
    assert d_power(2, 4) == power(odd_derivation(2), 4)
    dv = d_power(2, 4, divfree=True)
    assert dv == d_power(2, 4).divfree_normalize()


def test_tau_splits_by_order():
    X = d_power(2, 4)
    total = SuperDiffOp.zero(2)
    for d in range(5):
        part = X.tau(d)
        for (_, b) in part.terms:
            assert sum(b) == d
        total = total + part
    assert total == X


def test_tau_type_picks_signature():
    X = d_power(2, 4)
    stats = X.term_stats()
    for (sig, d), count in stats.items():
        assert len(X.tau_type(sig, d).terms) == count
        assert len(X.tau_type(sig).terms) >= count


def test_eta_projection():
    n = 2
    D = odd_derivation(n)
    p = D.eta_projection([1], (1, 0))
    assert p == SuperDiffOp.single(n, (eta(n, 1),), (1, 0))
    assert D.eta_projection([2], (1, 0)).is_zero()


def test_divergence_of_odd_derivation():
    n = 2
    D = odd_derivation(n)
    dv = D.divergence()
    # div D = d1 h1 + d2 h2
    assert len(dv.terms) == 2
    with pytest.raises(ValueError):
        d_power(n, 4).divergence()


def test_divfree_normalize_kills_divergence():
    red = odd_derivation(3).divfree_normalize().divergence()
    assert red.divfree_normalize().is_zero()


def test_coefficient_of_handles_sign_and_repeats():
    n = 2
    e1 = eta(n, 1)
    e2 = eta(n, 2)
    X = SuperDiffOp(n, {((e1, e2), (1, 0)): 5})
    assert X.coefficient_of([e1, e2], (1, 0)) == 5
    assert X.coefficient_of([e2, e1], (1, 0)) == -5
    assert X.coefficient_of([e1, e1], (1, 0)) == 0
    assert X.coefficient_of([e1, e2], (0, 1)) == 0


def test_gln_action_annihilates_d():
    for n in (2, 3):
        D = odd_derivation(n)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                assert D.gln_action(i, j).is_zero()


@given(operators(3, max_terms=3), operators(3, max_terms=3))
@settings(max_examples=25)
def test_gln_action_is_a_derivation_of_compose(X, Y):
    act = lambda Z: Z.gln_action(1, 2)
    assert act(X * Y) == act(X) * Y + X * act(Y)


def test_stats_json_shape():
    got = stats_json(d_power(2, 4), 4)
    assert list(got) == ["n", "k", "pdeg", "terms_total", "by_type"]
    assert got["n"] == 2 and got["k"] == 4
    assert got["terms_total"] == sum(got["by_type"].values())
    assert pdeg_json(NEG_INF) == "-inf"
    assert pdeg_json(2) == 2


def test_render_mentions_generators():
    n = 2
    D = odd_derivation(n)
    text = D.render()
    assert "h1*d1" in text and "h2*d2" in text
    assert SuperDiffOp.zero(n).render() == "0"
