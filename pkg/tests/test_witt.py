"""Polynomials, vector fields, operators, and differential forms."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from ncommute.witt import (OneForm, PolyDiffOp, Polynomial, TwoForm,
                           VectorField, bracket, circ_field, circ_wedge,
                           compose_op, d, div, euler_field, euler_multiple,
                           g_field, two_form_to_field, wedge)
from util import fields, polynomials


@given(polynomials(2), polynomials(2), polynomials(2))
def test_polynomial_ring_laws(p, q, r):
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


@given(polynomials(2), polynomials(2))
def test_partial_is_a_derivation(p, q):
    for i in (1, 2):
        assert (p * q).partial(i) == p.partial(i) * q + p * q.partial(i)


def test_polynomial_basics():
    n = 2
    p = Polynomial(n, {(2, 0): 3, (0, 1): Fraction(-1, 2)})
    assert p.degree() == 2
    assert p.homogeneous_part(1) == Polynomial(n, {(0, 1): Fraction(-1, 2)})
    assert not p.is_homogeneous(2)
    assert p.homogeneous_part(2).is_homogeneous(2)
    assert p.constant_term() == 0
    assert (p - p).is_zero()
    assert p.multi_partial((1, 0)) == Polynomial(n, {(1, 0): 6})
    assert 2 * p == p.scale(2)


def test_divided_monomial():
    # x^(2,1) = x1^2 x2 / (2! 1!)
    assert Polynomial.divided(2, (2, 1)) == \
        Polynomial(2, {(2, 1): Fraction(1, 2)})


def test_multi_partial_drops_low_terms():
    p = Polynomial(2, {(1, 0): 1, (0, 2): 1})
    assert p.multi_partial((2, 0)).is_zero()
    assert p.multi_partial((0, 2)) == Polynomial.constant(2, 2)


@given(fields(2), polynomials(2), polynomials(2))
def test_field_apply_is_a_derivation(X, p, q):
    assert X.apply(p * q) == X.apply(p) * q + p * X.apply(q)


@given(fields(2), fields(2))
def test_bracket_antisymmetric(X, Y):
    assert bracket(X, Y) == -bracket(Y, X)


@given(fields(2, max_deg=1), fields(2, max_deg=1), fields(2, max_deg=1))
def test_bracket_jacobi(X, Y, Z):
    total = (bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X))
             + bracket(Z, bracket(X, Y)))
    assert total.is_zero()


@given(fields(2), fields(2))
def test_bracket_through_operators(X, Y):
    ops = compose_op(X, Y) - compose_op(Y, X)
    assert ops.as_field() == bracket(X, Y)


@given(fields(2), fields(2))
def test_div_of_bracket(X, Y):
    lhs = div(bracket(X, Y))
    assert lhs == X.apply(div(Y)) - Y.apply(div(X))


def test_grade_decompose_splits_by_degree():
    n = 2
    X = VectorField(n, [Polynomial(n, {(0, 0): 1, (2, 0): 1}),
                        Polynomial(n, {(1, 0): 2})])
    parts = X.grade_decompose()
    assert sorted(parts) == [-1, 0, 1]
    total = VectorField.zero(n)
    for part in parts.values():
        total = total + part
    assert total == X


def test_compose_leibniz_order():
    n = 2
    x1 = Polynomial.variable(n, 1)
    D1 = PolyDiffOp(n, {(1, 0): Polynomial.one(n)})
    M = PolyDiffOp.scalar(n, x1)
    left = D1.compose(M)
    # d1 (x1 f) = f + x1 d1 f
    assert left == PolyDiffOp(n, {(0, 0): Polynomial.one(n),
                                  (1, 0): x1})


def test_polydiffop_pdeg_and_as_field():
    n = 2
    assert PolyDiffOp.zero(n).pdeg() == float("-inf")
    op = PolyDiffOp(n, {(1, 0): Polynomial.one(n)})
    assert op.pdeg() == 1
    assert op.as_field() == VectorField.coordinate(n, 1)
    with pytest.raises(ValueError):
        PolyDiffOp(n, {(1, 1): Polynomial.one(n)}).as_field()
    with pytest.raises(ValueError):
        PolyDiffOp.scalar(n, Polynomial.one(n)).as_field()


@given(polynomials(3))
def test_d_squared_vanishes(p):
    w = d(p)
    total = TwoForm.zero(3)
    # the exterior derivative of df, assembled per component
    for i in range(1, 4):
        for j in range(i + 1, 4):
            coef = w.comps[j - 1].partial(i) - w.comps[i - 1].partial(j)
            total = total + TwoForm(3, {(i, j): coef})
    assert total.is_zero()


@given(polynomials(3), polynomials(3))
def test_wedge_antisymmetric(p, q):
    assert wedge(d(p), d(q)) == -wedge(d(q), d(p))


def test_two_form_orientation():
    n = 3
    one = Polynomial.one(n)
    assert two_form_to_field(TwoForm(n, {(1, 2): one})) \
        == VectorField.coordinate(n, 3)
    assert two_form_to_field(TwoForm(n, {(1, 3): one})) \
        == -VectorField.coordinate(n, 2)
    assert two_form_to_field(TwoForm(n, {(2, 1): one})) \
        == -VectorField.coordinate(n, 3)
    with pytest.raises(ValueError):
        two_form_to_field(TwoForm(2, {}))


@given(polynomials(3, max_deg=2), polynomials(3, max_deg=2))
def test_cross_product_identity(p, q):
    """two_form_to_field(dp ^ dq) is the cross product of the gradients."""
    X = two_form_to_field(wedge(d(p), d(q)))
    gp = [p.partial(i) for i in (1, 2, 3)]
    gq = [q.partial(i) for i in (1, 2, 3)]
    cross = VectorField(3, [gp[1] * gq[2] - gp[2] * gq[1],
                            gp[2] * gq[0] - gp[0] * gq[2],
                            gp[0] * gq[1] - gp[1] * gq[0]])
    assert X == cross


@given(fields(3, max_deg=2), polynomials(3, max_deg=2))
def test_circ_wedge_expansion(v, f):
    total = TwoForm.zero(3)
    for j in (1, 2, 3):
        total = total + wedge(d(v.comps[j - 1]), d(f.partial(j)))
    assert circ_wedge(v, f) == total


@given(polynomials(3, max_deg=3))
def test_g_field_divergence_free(a):
    assert div(g_field(1, 2, a)).is_zero()
    assert div(g_field(2, 3, a)).is_zero()


def test_g_field_rejects_equal_axes():
    with pytest.raises(ValueError):
        g_field(1, 1, Polynomial.one(3))


def test_euler_fields():
    n = 3
    assert div(euler_field(n)) == Polynomial.constant(n, n)
    u = Polynomial.variable(n, 2)
    E = euler_multiple(u)
    assert E.comps[0] == u * Polynomial.variable(n, 1)
    x2sq = Polynomial.monomial(n, (0, 2, 0))
    assert E.comps[1] == x2sq


def test_renders_are_stable():
    n = 2
    p = Polynomial(n, {(1, 1): 2, (0, 0): -1})
    assert "x1*x2" in p.render()
    X = VectorField.single(n, 2, p)
    assert "d2" in X.render()
    w = wedge(d(Polynomial.variable(n, 1)), d(Polynomial.variable(n, 2)))
    assert w.render() == "dx1^dx2"
