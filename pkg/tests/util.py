"""Shared hypothesis strategies for the test suite."""

from fractions import Fraction

from hypothesis import strategies as st

from ncommute.grassmann import pack_generator
from ncommute.diffop import SuperDiffOp
from ncommute.witt import Polynomial, VectorField


def alphas(n, max_total=2):
    """Multi-indices with a small total degree."""
    return st.lists(st.integers(0, n - 1), max_size=max_total).map(
        lambda axes: tuple(axes.count(t) for t in range(n)))


def generators(n, max_total=2):
    return st.tuples(st.integers(1, n), alphas(n, max_total)).map(
        lambda p: pack_generator(n, p[0], p[1]))


def monomials(n, max_len=3):
    """Sorted tuples of distinct generators."""
    return st.frozensets(generators(n), max_size=max_len).map(
        lambda s: tuple(sorted(s)))


def coefficients():
    return st.integers(-4, 4).filter(bool).map(Fraction)


def operators(n, max_terms=3, max_order=2, parity=None):
    """Sparse operators; optionally with a fixed generator-count parity."""
    mono = monomials(n)
    if parity is not None:
        mono = mono.filter(lambda m: len(m) % 2 == parity)
    term = st.tuples(mono, alphas(n, max_order), coefficients())
    return st.lists(term, max_size=max_terms).map(
        lambda items: SuperDiffOp(
            n, _accumulate({(m, b): c for m, b, c in items})))


def _accumulate(pairs):
    out = {}
    for key, c in pairs.items():
        v = out.get(key, 0) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return out


def polynomials(n, max_deg=2, max_terms=3, homogeneous=None):
    al = alphas(n, max_deg)
    if homogeneous is not None:
        al = alphas(n, homogeneous).filter(
            lambda a: sum(a) == homogeneous)
    term = st.tuples(al, coefficients())
    return st.lists(term, max_size=max_terms).map(
        lambda items: Polynomial(n, _accumulate(
            {a: c for a, c in items})))


def fields(n, max_deg=2, homogeneous=None):
    return st.lists(polynomials(n, max_deg, homogeneous=homogeneous),
                    min_size=n, max_size=n).map(
        lambda comps: VectorField(n, comps))
