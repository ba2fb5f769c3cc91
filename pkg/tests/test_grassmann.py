"""Packed generators, sign-tracking monomial kernels, classification."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncommute.grassmann import (canonical_order, classify, derive_generator,
                                eta, gen_degree, gen_index, gen_weight,
                                merge_mul, mul_gen_left, multi_partial_mono,
                                pack_generator, partial_mono, render_generator,
                                render_monomial, render_signature,
                                unpack_generator, validate_monomial,
                                weight_count_bound)
from util import generators, monomials


@given(st.integers(1, 4).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(0, n),
                        st.lists(st.integers(0, 3), min_size=n, max_size=n))))
def test_pack_unpack_roundtrip(args):
    n, index, alpha = args
    g = pack_generator(n, index, tuple(alpha))
    assert unpack_generator(n, g) == (tuple(alpha), index)
    assert gen_index(n, g) == index
    assert gen_degree(n, g) == sum(alpha)


def test_pack_rejects_bad_input():
    with pytest.raises(ValueError):
        pack_generator(2, 3, (0, 0))
    with pytest.raises(ValueError):
        pack_generator(2, 1, (0,))
    with pytest.raises(ValueError):
        pack_generator(2, 1, (-1, 0))


def test_canonical_order_is_index_major():
    n = 3
    assert canonical_order(eta(n, 1), eta(n, 2)) == -1
    # within one index: smaller degree first
    assert pack_generator(n, 1, (1, 0, 0)) < pack_generator(n, 1, (1, 1, 0))
    # same degree: larger leading component ranks earlier
    assert pack_generator(n, 1, (2, 0, 0)) < pack_generator(n, 1, (1, 1, 0))
    assert pack_generator(n, 1, (1, 1, 0)) < pack_generator(n, 1, (0, 2, 0))
    # every derivative of h_1 still precedes h_2
    assert pack_generator(n, 1, (0, 0, 3)) < eta(n, 2)


def test_gen_weight_scalar_slot():
    n = 2
    assert gen_weight(n, eta(n, 1)) == -1
    assert gen_weight(n, pack_generator(n, 1, (1, 1))) == 1
    assert gen_weight(n, pack_generator(n, 0, (0, 0))) == 0
    assert gen_weight(n, pack_generator(n, 0, (1, 0))) == 1


@given(monomials(3), monomials(3))
def test_merge_mul_sign_is_supercommutative(m1, m2):
    r12 = merge_mul(m1, m2)
    r21 = merge_mul(m2, m1)
    if r12 is None:
        assert r21 is None
        return
    mono, sign = r12
    mono2, sign2 = r21
    assert mono == mono2 == tuple(sorted(m1 + m2))
    assert sign * sign2 == (-1) ** (len(m1) * len(m2))


def _signed_mul(a, b):
    if a is None or b is None:
        return None
    r = merge_mul(a[0], b[0])
    if r is None:
        return None
    return r[0], a[1] * b[1] * r[1]


@given(monomials(3), monomials(3), monomials(3))
def test_merge_mul_associative(m1, m2, m3):
    left = _signed_mul(_signed_mul((m1, 1), (m2, 1)), (m3, 1))
    right = _signed_mul((m1, 1), _signed_mul((m2, 1), (m3, 1)))
    assert left == right


def test_merge_mul_repeated_generator_dies():
    g = eta(2, 1)
    assert merge_mul((g,), (g,)) is None


@given(generators(3), monomials(3))
def test_mul_gen_left_matches_merge(g, mono):
    got = mul_gen_left(g, mono)
    assert got == merge_mul((g,), mono)


def test_derive_generator_shifts_alpha():
    n = 3
    g = pack_generator(n, 2, (0, 1, 0))
    assert unpack_generator(n, derive_generator(n, g, 1)) == ((1, 1, 0), 2)
    with pytest.raises(ValueError):
        derive_generator(n, g, 4)


def test_partial_mono_leibniz_on_a_pair():
    n = 2
    h1, h2 = eta(n, 1), eta(n, 2)
    out = dict(partial_mono(n, (h1, h2), 1))
    d1h1 = pack_generator(n, 1, (1, 0))
    d1h2 = pack_generator(n, 2, (1, 0))
    assert out == {tuple(sorted((d1h1, h2))): 1,
                   tuple(sorted((h1, d1h2))): 1}


@given(monomials(2, max_len=2))
def test_multi_partial_composes(mono):
    n = 2
    one_then_two = {}
    for m, s in multi_partial_mono(n, mono, (1, 0)):
        for m2, s2 in multi_partial_mono(n, m, (0, 1)):
            c = one_then_two.get(m2, 0) + s * s2
            if c:
                one_then_two[m2] = c
            else:
                one_then_two.pop(m2, None)
    assert dict(multi_partial_mono(n, mono, (1, 1))) == one_then_two


def test_classify_example():
    n = 3
    mono = tuple(sorted((eta(n, 1), eta(n, 2),
                         pack_generator(n, 1, (1, 0, 0)),
                         pack_generator(n, 3, (0, 2, 0)))))
    length, weight, parity, sig = classify(n, mono)
    assert (length, weight, parity) == (4, -1, 0)
    assert sig == (2, 1, 1)
    assert render_signature(sig) == "(2,1,1)"


def test_weight_count_bound_values():
    # n * C(n+w, w+1) for weights -1, 0, 1, 2
    assert [weight_count_bound(3, w) for w in (-1, 0, 1, 2)] == [3, 9, 18, 30]
    assert [weight_count_bound(2, w) for w in (-1, 0, 1)] == [2, 4, 6]


def test_validate_monomial_order_and_bounds():
    n = 2
    etas = (eta(n, 1), eta(n, 2))
    validate_monomial(n, etas)
    with pytest.raises(ValueError):
        validate_monomial(n, (etas[1], etas[0]))
    with pytest.raises(ValueError):
        validate_monomial(n, (etas[0], etas[0]))
    # a saturated-but-legal monomial: both etas, all four weight-0
    # generators, one weight-1 generator
    full = tuple(sorted(
        [eta(n, 1), eta(n, 2)]
        + [pack_generator(n, i, a) for i in (1, 2)
           for a in ((1, 0), (0, 1))]
        + [pack_generator(n, 1, (2, 0))]))
    validate_monomial(n, full)


def test_render_helpers():
    n = 2
    assert render_generator(n, eta(n, 2)) == "h2"
    assert render_generator(n, pack_generator(n, 1, (2, 1))) == "d1d1d2(h1)"
    mono = tuple(sorted((eta(n, 1), pack_generator(n, 2, (1, 0)))))
    assert render_monomial(n, mono) == "h1*d1(h2)"
