"""Closed-form escort invariants and their identification plumbing."""

import random

import pytest

from ncommute import escort_forms as forms
from ncommute.diffop import d_power
from ncommute.envelope import escort_extract, s_k_brute
from ncommute.witt import (OneForm, Polynomial, VectorField, circ_field, d,
                           div, g_field)


def _hom_field(rng, n, degree):
    comps = []
    for _ in range(n):
        store = {}
        for _ in range(2):
            while True:
                alpha = tuple(rng.randint(0, degree) for _ in range(n))
                if sum(alpha) == degree:
                    break
            store[alpha] = store.get(alpha, 0) + rng.choice([-2, -1, 1, 2])
        comps.append(Polynomial(n, store))
    return VectorField(n, comps)


def test_escort382_antisymmetric_in_quadratic_slots():
    rng = random.Random(5)
    a = _hom_field(rng, 3, 1)
    X = _hom_field(rng, 3, 2)
    Y = _hom_field(rng, 3, 2)
    assert forms.escort382(a, X, Y) == -forms.escort382(a, Y, X)
    assert forms.escort382(a, X, X).is_zero()


def test_escort382_rejects_bad_grades():
    rng = random.Random(6)
    a = _hom_field(rng, 3, 1)
    X = _hom_field(rng, 3, 2)
    with pytest.raises(ValueError):
        forms.escort382(X, X, X)
    with pytest.raises(ValueError):
        forms.escort382(a, a, X)
    with pytest.raises(ValueError):
        forms.escort382(_hom_field(rng, 2, 1), _hom_field(rng, 2, 2),
                        _hom_field(rng, 2, 2))


def test_escort271_antisymmetric_in_linear_fields():
    rng = random.Random(7)
    u = Polynomial.variable(3, 2)
    a = _hom_field(rng, 3, 1)
    b = _hom_field(rng, 3, 1)
    X = _hom_field(rng, 3, 2)
    assert forms.escort271(u, a, b, X) == -forms.escort271(u, b, a, X)
    with pytest.raises(ValueError):
        forms.escort271(a, a, b, X)
    with pytest.raises(ValueError):
        forms.escort271(Polynomial.monomial(3, (2, 0, 0)), a, b, X)


def test_escort271_differs_from_legacy():
    rng = random.Random(8)
    u = Polynomial.variable(3, 1)
    a = _hom_field(rng, 3, 1)
    b = _hom_field(rng, 3, 1)
    X = _hom_field(rng, 3, 2)
    fitted = forms.escort271(u, a, b, X)
    legacy = forms.escort271_legacy(u, a, b, X)
    block = forms._escort271_terms(u, a, b, X)[3]
    assert fitted - legacy == 64 * block


def test_escort3601_cyclic():
    rng = random.Random(9)
    a = _hom_field(rng, 3, 1)
    b = _hom_field(rng, 3, 1)
    c = _hom_field(rng, 3, 1)
    X = _hom_field(rng, 3, 3)
    base = forms.escort3601(a, b, c, X)
    assert forms.escort3601(b, c, a, X) == base
    assert forms.escort3601(c, a, b, X) == base


def test_escort3601_divfree_residual_is_the_bracket_block():
    rng = random.Random(10)
    quads = [Polynomial.monomial(3, (1, 1, 0)), Polynomial.monomial(3, (0, 1, 1)),
             Polynomial.monomial(3, (2, 0, 0))]
    a = g_field(1, 2, quads[0])
    b = g_field(2, 3, quads[1])
    c = g_field(1, 3, quads[2])
    X = g_field(1, 2, Polynomial.monomial(3, (2, 1, 1)))
    full = forms.escort3601(a, b, c, X)
    printed = forms.escort3601_divfree(a, b, c, X)
    block = forms.escort3601_bracket_block(a, b, c, X)
    assert full == printed - block
    with pytest.raises(ValueError):
        forms.escort3601_divfree(_hom_field(rng, 3, 1), b, c, X)


def test_one_form_to_field_orientation():
    one = Polynomial.one(2)
    w = forms.one_form_to_field
    assert w(OneForm(2, [one, Polynomial.zero(2)])) == \
        -VectorField.coordinate(2, 2)
    assert w(OneForm(2, [Polynomial.zero(2), one])) == \
        VectorField.coordinate(2, 1)
    with pytest.raises(ValueError):
        w(OneForm(3, [one, one, one]))


def test_escort221_is_the_divergence_block():
    rng = random.Random(11)
    a = _hom_field(rng, 2, 1)
    X = _hom_field(rng, 2, 2)
    assert forms.escort221(a, X) == -3 * d(div(circ_field(a, X)))


def test_table_231_matches_extraction():
    built = forms.table_from_231()
    extracted = escort_extract(2, 6)
    assert built.entries == extracted.entries


def test_escort231_legacy_mismatch_count():
    wrong = total = 0
    for miss in forms._gl_basis_keys(2):
        a = forms.trace_dual_field(2, miss)
        for q in forms._high_keys(2, 2):
            X = forms._monomial_field(2, q)
            total += 1
            if forms.escort231_legacy(a, X) != forms.escort231(a, X):
                wrong += 1
    assert (wrong, total) == (8, 24)


def test_divfree_s5_matches_brute_on_one_chain():
    quads = [Polynomial.monomial(2, a) for a in ((2, 0), (1, 1), (0, 2))]
    missing = quads[2]
    cubic = Polynomial.monomial(2, (2, 1))
    chain = [VectorField.coordinate(2, 1), VectorField.coordinate(2, 2),
             g_field(1, 2, quads[0]), g_field(1, 2, quads[1]),
             g_field(1, 2, cubic)]
    esc = forms.divfree_s5_from_escort(missing, cubic)
    assert esc.as_diffop() == s_k_brute(chain)


def test_stream_dual_pairs_apolar():
    h = Polynomial(2, {(2, 0): 1, (1, 1): 3})
    dual = forms.stream_dual(h)
    assert dual == Polynomial(2, {(0, 2): 1, (1, 1): 6})


def test_x_tilde_is_a_scaled_euler_field():
    E2 = forms.x_tilde(2)
    x2 = Polynomial.variable(3, 2)
    for i in range(1, 4):
        assert E2.comps[i - 1] == x2 * Polynomial.variable(3, i)


def test_g_table_matches_contraction_once():
    from ncommute.witt import two_form_to_field
    a = Polynomial.monomial(3, (1, 1, 0))
    b = Polynomial.monomial(3, (1, 1, 1))
    got = forms.g_table_eval((1, 2), (1, 2), a, b, 1)
    form = forms.escort382(g_field(1, 2, a), g_field(1, 2, b),
                           forms.x_tilde(1))
    assert got == -1 * two_form_to_field(form)


def test_g_tables_cover_axis_pairs():
    for table in (forms.G_TABLE_1212, forms.G_TABLE_1223):
        assert table
        for key in table:
            assert isinstance(key, tuple)
