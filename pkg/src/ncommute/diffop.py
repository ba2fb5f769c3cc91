"""Differential operators with odd-polynomial coefficients and three products.

An operator term is ``u * d^beta`` with ``u`` a monomial from
:mod:`ncommute.grassmann` and ``beta`` the multi-index of the derivative
part.  Three multiplications live on these operators:

* ``compose`` (written ``X*Y``) — operator composition,
  ``u d^a * v d^b = sum over gamma <= a of C(a, gamma) u d^gamma(v) d^(a+b-gamma)``;
* ``circ`` — the same sum restricted to gamma != 0 (left-symmetric on
  first-order operators);
* ``bullet`` — the gamma = 0 part alone, coefficients multiplied and
  derivative parts added (associative, super-commutative).

Composition is the sum of the other two.  The module also builds the odd
derivation ``D = sum_i h_i d_i``, its cached associative powers (optionally
in the divergence-free quotient), projections, term statistics and the
divergence of first-order operators.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

from .grassmann import (
    NEG_INF,
    Monomial,
    SuperPolynomial,
    classify,
    eta,
    merge_mul,
    mul_gen_left,
    multi_partial_mono,
    partial_mono,
    render_monomial,
    render_signature,
    validate_monomial,
)

Term = tuple  # (coefficient monomial, derivative multi-index)


def _iter_gammas(alpha: tuple):
    """All multi-indices gamma <= alpha componentwise, with C(alpha, gamma)."""
    pools = [[(g, comb(a, g)) for g in range(a + 1)] for a in alpha]
    stack = [((), 1)]
    for pool in pools:
        stack = [(g + (v,), c * b) for g, c in stack for v, b in pool]
    return stack


def _add(out: dict, key, v: int) -> None:
    w = out.get(key, 0) + v
    if w:
        out[key] = w
    else:
        out.pop(key, None)


class SuperDiffOp:
    """Sparse integer combination of ``monomial * d^beta`` operator terms."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Term, int] | None = None):
        self.n = n
        self.terms = dict(terms) if terms else {}

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "SuperDiffOp":
        return cls(n)

    @classmethod
    def single(cls, n: int, mono: Monomial, dpart: Sequence[int], coeff: int = 1):
        dpart = tuple(dpart)
        if len(dpart) != n or any(d < 0 for d in dpart):
            raise ValueError(f"bad derivative multi-index {dpart}")
        validate_monomial(n, mono)
        return cls(n, {(mono, dpart): coeff}) if coeff else cls(n)

    # -- linear structure -------------------------------------------------

    def _check(self, other: "SuperDiffOp") -> None:
        if self.n != other.n:
            raise ValueError(f"mixed dimensions {self.n} and {other.n}")

    def __add__(self, other: "SuperDiffOp") -> "SuperDiffOp":
        self._check(other)
        out = dict(self.terms)
        for t, c in other.terms.items():
            _add(out, t, c)
        return SuperDiffOp(self.n, out)

    def __neg__(self) -> "SuperDiffOp":
        return SuperDiffOp(self.n, {t: -c for t, c in self.terms.items()})

    def __sub__(self, other: "SuperDiffOp") -> "SuperDiffOp":
        return self + (-other)

    def __rmul__(self, k: int) -> "SuperDiffOp":
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return SuperDiffOp(self.n)
        return SuperDiffOp(self.n, {t: k * c for t, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, SuperDiffOp)
                and self.n == other.n and self.terms == other.terms)

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- the three products -----------------------------------------------

    def _product(self, other: "SuperDiffOp", skip_zero_gamma: bool,
                 only_zero_gamma: bool) -> "SuperDiffOp":
        self._check(other)
        n = self.n
        out: dict = {}
        zero = (0,) * n
        for (u, a), cu in self.terms.items():
            gammas = [(zero, 1)] if only_zero_gamma else _iter_gammas(a)
            for (v, b), cv in other.terms.items():
                cuv = cu * cv
                for gamma, binom in gammas:
                    if skip_zero_gamma and gamma == zero:
                        continue
                    dpart = tuple(x + y - z for x, y, z in zip(a, b, gamma))
                    if gamma == zero:
                        r = merge_mul(u, v)
                        if r is not None:
                            _add(out, (r[0], dpart), cuv * r[1])
                        continue
                    for v2, s2 in multi_partial_mono(n, v, gamma):
                        r = merge_mul(u, v2)
                        if r is not None:
                            _add(out, (r[0], dpart), binom * cuv * s2 * r[1])
        return SuperDiffOp(n, out)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.__rmul__(other)
        return self._product(other, skip_zero_gamma=False, only_zero_gamma=False)

    def circ(self, other: "SuperDiffOp") -> "SuperDiffOp":
        return self._product(other, skip_zero_gamma=True, only_zero_gamma=False)

    def bullet(self, other: "SuperDiffOp") -> "SuperDiffOp":
        return self._product(other, skip_zero_gamma=False, only_zero_gamma=True)

    # -- inspection ---------------------------------------------------------

    def pdeg(self):
        """Maximal derivative order over stored terms; NEG_INF when zero."""
        if not self.terms:
            return NEG_INF
        return max(sum(d) for _, d in self.terms)

    def parity(self) -> int:
        """0 or 1 when homogeneous; raises on mixed parity."""
        ps = {len(m) & 1 for m, _ in self.terms}
        if len(ps) > 1:
            raise ValueError("operator of mixed parity")
        return ps.pop() if ps else 0

    def tau(self, d: int) -> "SuperDiffOp":
        """Projection onto terms of derivative order exactly ``d``."""
        return SuperDiffOp(self.n, {t: c for t, c in self.terms.items()
                                    if sum(t[1]) == d})

    def tau_type(self, sig: tuple, d: int | None = None) -> "SuperDiffOp":
        """Projection onto terms whose coefficient type signature is ``sig``."""
        sig = tuple(sig)
        out = {}
        for t, c in self.terms.items():
            if classify(self.n, t[0])[3] != sig:
                continue
            if d is not None and sum(t[1]) != d:
                continue
            out[t] = c
        return SuperDiffOp(self.n, out)

    def eta_projection(self, indices: Sequence[int], dpart: Sequence[int]):
        """Terms whose weight-(-1) coordinate set is exactly ``indices``
        and whose derivative part equals ``dpart``."""
        want = tuple(sorted(indices))
        dpart = tuple(dpart)
        etas = {eta(self.n, i) for i in range(1, self.n + 1)}
        out = {}
        for (u, b), c in self.terms.items():
            if b != dpart:
                continue
            present = tuple(g >> (6 * (self.n + 1)) for g in u if g in etas)
            if present == want:
                out[(u, b)] = c
        return SuperDiffOp(self.n, out)

    def term_stats(self) -> dict:
        """Counts of stored terms grouped by (type signature, derivative order)."""
        stats: dict = {}
        for (u, b), _ in self.terms.items():
            key = (classify(self.n, u)[3], sum(b))
            stats[key] = stats.get(key, 0) + 1
        return stats

    def divergence(self) -> SuperPolynomial:
        """Sum of d_i applied to the coefficient of d_i; order <= 1 only."""
        n = self.n
        out: dict = {}
        for (u, b), c in self.terms.items():
            order = sum(b)
            if order == 0:
                continue
            if order > 1:
                raise ValueError("divergence is defined for operators of order <= 1")
            axis = b.index(1) + 1
            for m2, s in partial_mono(n, u, axis):
                _add(out, m2, s * c)
        return SuperPolynomial(n, out)

    def coefficient_of(self, gens: Iterable[int], dpart: Sequence[int]) -> int:
        """Signed coefficient of (product of generators in written order) * d^dpart."""
        mono: Monomial = ()
        sign = 1
        for g in gens:
            grown = merge_mul(mono, (g,))
            if grown is None:
                return 0
            mono, s = grown
            sign *= s
        return sign * self.terms.get((mono, tuple(dpart)), 0)

    def gln_action(self, i: int, j: int) -> "SuperDiffOp":
        """Action of x_i d_j, extended from coefficients to whole operators.

        The derivative part transforms the same way a differentiated
        generator does: d^b picks up b_j * d^(b - e_j + e_i).  With this
        convention the action annihilates the odd derivation D itself.
        """
        n = self.n
        out: dict = {}
        for (u, b), c in self.terms.items():
            acted = SuperPolynomial(n, {u: c}).gln_action(i, j)
            for m2, c2 in acted.terms.items():
                _add(out, (m2, b), c2)
            bj = b[j - 1]
            if bj:
                b2 = list(b)
                b2[j - 1] -= 1
                b2[i - 1] += 1
                _add(out, (u, tuple(b2)), bj * c)
        return SuperDiffOp(n, out)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def render(self) -> str:
        from .grassmann import _render_terms

        def body(t):
            mono, dpart = t
            ds = "".join(f"d{axis}" * a for axis, a in enumerate(dpart, start=1))
            left = render_monomial(self.n, mono) if mono else ""
            if left and ds:
                return f"{left}*{ds}"
            return left or ds or "1"

        return _render_terms(self.sorted_terms(), body)

    def __repr__(self) -> str:
        return f"SuperDiffOp({self.n}, {self.render()})"

    def divfree_normalize(self) -> "SuperDiffOp":
        """Apply the divergence-free rewrite to every coefficient monomial."""
        out: dict = {}
        for (u, b), c in self.terms.items():
            reduced = SuperPolynomial(self.n, {u: c}).divfree_normalize()
            for m2, c2 in reduced.terms.items():
                _add(out, (m2, b), c2)
        return SuperDiffOp(self.n, out)


# ---------------------------------------------------------------------------
# the odd derivation and its powers
# ---------------------------------------------------------------------------

def odd_derivation(n: int) -> SuperDiffOp:
    """D = sum over i of h_i d_i."""
    terms = {}
    for i in range(1, n + 1):
        dpart = tuple(1 if j == i else 0 for j in range(1, n + 1))
        terms[((eta(n, i),), dpart)] = 1
    return SuperDiffOp(n, terms)


def _mul_d_left(X: SuperDiffOp) -> SuperDiffOp:
    """Composition D * X, specialised: only gamma in {0, e_j} contributes."""
    n = X.n
    out: dict = {}
    etas = [None] + [eta(n, j) for j in range(1, n + 1)]
    for (u, b), c in X.terms.items():
        for j in range(1, n + 1):
            bj = b[:j - 1] + (b[j - 1] + 1,) + b[j:]
            r = mul_gen_left(etas[j], u)
            if r is not None:
                _add(out, (r[0], bj), c * r[1])
            for u2, s2 in partial_mono(n, u, j):
                r = mul_gen_left(etas[j], u2)
                if r is not None:
                    _add(out, (r[0], b), c * s2 * r[1])
    return SuperDiffOp(n, out)


_D_POWER_CACHE: dict = {}


def d_power(n: int, k: int, divfree: bool = False) -> SuperDiffOp:
    """The k-th associative power of D, cached; divergence-free mode reduces
    coefficients after every multiplication."""
    if k < 1:
        raise ValueError("power exponent must be >= 1")
    key = (n, k, divfree)
    hit = _D_POWER_CACHE.get(key)
    if hit is not None:
        return hit
    if k == 1:
        X = odd_derivation(n)
    else:
        X = _mul_d_left(d_power(n, k - 1, divfree))
        if divfree:
            X = X.divfree_normalize()
    _D_POWER_CACHE[key] = X
    return X


def power(X: SuperDiffOp, k: int) -> SuperDiffOp:
    """Left-to-right associative power under composition."""
    if k < 1:
        raise ValueError("power exponent must be >= 1")
    acc = X
    for _ in range(k - 1):
        acc = acc * X
    return acc


def circ_power(X: SuperDiffOp, k: int) -> SuperDiffOp:
    """Right-nested power X o (X o (... o X))."""
    if k < 1:
        raise ValueError("power exponent must be >= 1")
    acc = X
    for _ in range(k - 1):
        acc = X.circ(acc)
    return acc


def bullet_power(X: SuperDiffOp, k: int) -> SuperDiffOp:
    if k < 1:
        raise ValueError("power exponent must be >= 1")
    acc = X
    for _ in range(k - 1):
        acc = acc.bullet(X)
    return acc


def compose(X: SuperDiffOp, Y: SuperDiffOp) -> SuperDiffOp:
    return X * Y


def circ(X: SuperDiffOp, Y: SuperDiffOp) -> SuperDiffOp:
    return X.circ(Y)


def bullet(X: SuperDiffOp, Y: SuperDiffOp) -> SuperDiffOp:
    return X.bullet(Y)


def pdeg_json(value):
    """Serialize a derivative order, mapping NEG_INF to the string "-inf"."""
    return value if value != NEG_INF else "-inf"


def stats_json(X: SuperDiffOp, k: int | None = None) -> dict:
    by_type: dict = {}
    for (sig, _), count in sorted(X.term_stats().items()):
        label = render_signature(sig)
        by_type[label] = by_type.get(label, 0) + count
    doc = {"n": X.n}
    if k is not None:
        doc["k"] = k
    doc["pdeg"] = pdeg_json(X.pdeg())
    doc["terms_total"] = len(X.terms)
    doc["by_type"] = by_type
    return doc
