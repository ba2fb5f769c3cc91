"""Polynomial vector fields over Q[x1..xn], with the small exterior calculus
(1-forms, 2-forms) and helper constructions the escort formulas are written in.

Coefficients are exact rationals throughout: divided powers x^(alpha)/alpha!
force denominators even though every headline result is integral.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import comb, factorial

MultiIndex = tuple


def _as_exact(c):
    """Normalize to int when possible, Fraction otherwise; exact either way.

    Integer-valued Fractions are unwrapped so the common all-integer
    workloads avoid gcd work on every coefficient operation.
    """
    if isinstance(c, int):
        return c
    c = Fraction(c)
    if c.denominator == 1:
        return c.numerator
    return c


def _render_coeff_prefix(c: Fraction, body: str) -> str:
    """Format one signed term, omitting unit coefficients next to a body."""
    mag = abs(c)
    if body:
        return body if mag == 1 else f"{mag}*{body}"
    return str(mag)


def _join_terms(parts):
    out = []
    for sign, piece in parts:
        if not out:
            out.append(piece if sign > 0 else f"-{piece}")
        else:
            out.append(f" + {piece}" if sign > 0 else f" - {piece}")
    return "".join(out) if out else "0"


class Polynomial:
    """Sparse polynomial: multi-index -> nonzero exact coefficient."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms = {a: _as_exact(c) for a, c in (terms or {}).items()
                      if c}

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, c) -> "Polynomial":
        return cls(n, {tuple(0 for _ in range(n)): c})

    @classmethod
    def one(cls, n: int) -> "Polynomial":
        return cls.constant(n, 1)

    @classmethod
    def monomial(cls, n: int, alpha, c=1) -> "Polynomial":
        return cls(n, {tuple(alpha): c})

    @classmethod
    def variable(cls, n: int, i: int) -> "Polynomial":
        return cls.monomial(n, tuple(1 if t == i else 0 for t in range(1, n + 1)))

    @classmethod
    def divided(cls, n: int, alpha) -> "Polynomial":
        """x^(alpha) = x^alpha / alpha!."""
        alpha = tuple(alpha)
        denom = 1
        for a in alpha:
            denom *= factorial(a)
        return cls(n, {alpha: Fraction(1, denom)})

    def _check(self, other: "Polynomial") -> None:
        if self.n != other.n:
            raise ValueError("mixed dimensions")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            v = out.get(a, 0) + c
            if v:
                out[a] = v
            else:
                out.pop(a, None)
        return Polynomial(self.n, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, k) -> "Polynomial":
        k = _as_exact(k)
        if not k:
            return Polynomial.zero(self.n)
        return Polynomial(self.n, {a: c * k for a, c in self.terms.items()})

    def __rmul__(self, k):
        return self.scale(k)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        out: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                v = out.get(key, 0) + ca * cb
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return Polynomial(self.n, out)

    def partial(self, i: int) -> "Polynomial":
        out = {}
        for a, c in self.terms.items():
            e = a[i - 1]
            if e:
                key = a[:i - 1] + (e - 1,) + a[i:]
                out[key] = out.get(key, 0) + c * e
        return Polynomial(self.n, out)

    def multi_partial(self, gamma) -> "Polynomial":
        p = self
        for i, g in enumerate(gamma, start=1):
            for _ in range(g):
                p = p.partial(i)
        return p

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Polynomial) and self.n == other.n
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def degree(self):
        if not self.terms:
            return None
        return max(sum(a) for a in self.terms)

    def is_homogeneous(self, deg: int) -> bool:
        return all(sum(a) == deg for a in self.terms)

    def homogeneous_part(self, deg: int) -> "Polynomial":
        return Polynomial(self.n, {a: c for a, c in self.terms.items()
                                   if sum(a) == deg})

    def constant_term(self) -> Fraction:
        return self.terms.get(tuple(0 for _ in range(self.n)), Fraction(0))

    def render(self) -> str:
        parts = []
        for a, c in sorted(self.terms.items()):
            body = "*".join(
                f"x{i}" if e == 1 else f"x{i}^{e}"
                for i, e in enumerate(a, start=1) if e)
            parts.append((1 if c > 0 else -1, _render_coeff_prefix(c, body)))
        return _join_terms(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self.n}, {self.render()})"


class VectorField:
    """First-order operator sum_i comps[i] * d_i."""

    __slots__ = ("n", "comps")

    def __init__(self, n: int, comps):
        comps = list(comps)
        if len(comps) != n:
            raise ValueError("need one component per coordinate")
        self.n = n
        self.comps = tuple(comps)

    @classmethod
    def zero(cls, n: int) -> "VectorField":
        return cls(n, [Polynomial.zero(n) for _ in range(n)])

    @classmethod
    def single(cls, n: int, i: int, poly: Polynomial) -> "VectorField":
        comps = [Polynomial.zero(n) for _ in range(n)]
        comps[i - 1] = poly
        return cls(n, comps)

    @classmethod
    def coordinate(cls, n: int, i: int) -> "VectorField":
        """The constant field d_i."""
        return cls.single(n, i, Polynomial.one(n))

    def __add__(self, other: "VectorField") -> "VectorField":
        if self.n != other.n:
            raise ValueError("mixed dimensions")
        return VectorField(self.n, [a + b for a, b in zip(self.comps, other.comps)])

    def __neg__(self) -> "VectorField":
        return VectorField(self.n, [-a for a in self.comps])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def scale(self, k) -> "VectorField":
        return VectorField(self.n, [c.scale(k) for c in self.comps])

    def __rmul__(self, k):
        return self.scale(k)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def __eq__(self, other) -> bool:
        return (isinstance(other, VectorField) and self.n == other.n
                and self.comps == other.comps)

    def __hash__(self):
        return hash((self.n, self.comps))

    def apply(self, f: Polynomial) -> Polynomial:
        """X applied to a polynomial: sum_i X_i d_i(f).  This is 'X o f'."""
        out = Polynomial.zero(self.n)
        for i, c in enumerate(self.comps, start=1):
            if c:
                out = out + c * f.partial(i)
        return out

    def as_diffop(self) -> "PolyDiffOp":
        out = {}
        for i, c in enumerate(self.comps, start=1):
            if c:
                key = tuple(1 if t == i else 0 for t in range(1, self.n + 1))
                out[key] = c
        return PolyDiffOp(self.n, out)

    def grade_decompose(self) -> dict:
        """Split into graded pieces: grade s holds degree-(s+1) coefficients."""
        out: dict = {}
        for i, c in enumerate(self.comps, start=1):
            for a, coef in c.terms.items():
                s = sum(a) - 1
                piece = out.setdefault(s, VectorField.zero(self.n))
                comps = list(piece.comps)
                comps[i - 1] = comps[i - 1] + Polynomial(self.n, {a: coef})
                out[s] = VectorField(self.n, comps)
        return out

    def render(self) -> str:
        parts = []
        for i, c in enumerate(self.comps, start=1):
            for a, coef in sorted(c.terms.items()):
                body = "*".join(
                    f"x{t}" if e == 1 else f"x{t}^{e}"
                    for t, e in enumerate(a, start=1) if e)
                body = f"{body}*d{i}" if body else f"d{i}"
                parts.append((1 if coef > 0 else -1,
                              _render_coeff_prefix(coef, body)))
        return _join_terms(parts)

    def __repr__(self) -> str:
        return f"VectorField({self.n}, {self.render()})"


class PolyDiffOp:
    """Differential operator: dpart multi-index -> Polynomial coefficient."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms = {}
        for b, p in (terms or {}).items():
            if isinstance(p, Polynomial) and p:
                self.terms[tuple(b)] = p

    @classmethod
    def zero(cls, n: int) -> "PolyDiffOp":
        return cls(n, {})

    @classmethod
    def scalar(cls, n: int, poly: Polynomial) -> "PolyDiffOp":
        return cls(n, {tuple(0 for _ in range(n)): poly})

    def __add__(self, other: "PolyDiffOp") -> "PolyDiffOp":
        if self.n != other.n:
            raise ValueError("mixed dimensions")
        out = dict(self.terms)
        for b, p in other.terms.items():
            q = out.get(b)
            s = p if q is None else q + p
            if s:
                out[b] = s
            else:
                out.pop(b, None)
        return PolyDiffOp(self.n, out)

    def __neg__(self) -> "PolyDiffOp":
        return PolyDiffOp(self.n, {b: -p for b, p in self.terms.items()})

    def __sub__(self, other: "PolyDiffOp") -> "PolyDiffOp":
        return self + (-other)

    def scale(self, k) -> "PolyDiffOp":
        return PolyDiffOp(self.n, {b: p.scale(k) for b, p in self.terms.items()})

    def __rmul__(self, k):
        return self.scale(k)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PolyDiffOp) and self.n == other.n
                and self.terms == other.terms)

    def pdeg(self):
        if not self.terms:
            return float("-inf")
        return max(sum(b) for b in self.terms)

    def compose(self, other: "PolyDiffOp") -> "PolyDiffOp":
        """Operator composition: Leibniz over the left derivative part.

        The derivatives of each right coefficient are enumerated once and
        shared across every left term, and terms are merged as raw
        coefficient dicts; both matter when this runs inside the k!
        permutation walk.
        """
        if self.n != other.n:
            raise ValueError("mixed dimensions")
        out: dict = {}
        for beta, v in other.terms.items():
            for gamma, dvt in _nonzero_derivatives(v):
                for alpha, u in self.terms.items():
                    mult = 1
                    for a, g in zip(alpha, gamma):
                        if g:
                            if g > a:
                                mult = 0
                                break
                            mult *= comb(a, g)
                    if not mult:
                        continue
                    key = tuple(a + b - g
                                for a, b, g in zip(alpha, beta, gamma))
                    bucket = out.get(key)
                    if bucket is None:
                        bucket = out[key] = {}
                    for am, cu in u.terms.items():
                        cum = cu * mult
                        for bm, cv in dvt.items():
                            m = tuple(x + y for x, y in zip(am, bm))
                            w = bucket.get(m, 0) + cum * cv
                            if w:
                                bucket[m] = w
                            else:
                                bucket.pop(m, None)
        return PolyDiffOp(self.n, {b: Polynomial(self.n, t)
                                   for b, t in out.items() if t})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return self.compose(other)

    def as_field(self) -> VectorField:
        """Reinterpret an order-<=1 operator with no scalar part as a field."""
        comps = [Polynomial.zero(self.n) for _ in range(self.n)]
        for b, p in self.terms.items():
            if sum(b) != 1:
                raise ValueError("operator is not a vector field")
            comps[b.index(1)] = comps[b.index(1)] + p
        return VectorField(self.n, comps)

    def render(self) -> str:
        parts = []
        for b, p in sorted(self.terms.items()):
            ds = "".join(f"d{i}" * e for i, e in enumerate(b, start=1))
            for a, coef in sorted(p.terms.items()):
                body = "*".join(
                    f"x{t}" if e == 1 else f"x{t}^{e}"
                    for t, e in enumerate(a, start=1) if e)
                body = "*".join(x for x in (body, ds) if x)
                parts.append((1 if coef > 0 else -1,
                              _render_coeff_prefix(coef, body)))
        return _join_terms(parts)

    def __repr__(self) -> str:
        return f"PolyDiffOp({self.n}, {self.render()})"


def _nonzero_derivatives(v: Polynomial):
    """Every (gamma, terms of d^gamma v) with a nonzero result.

    gamma ranges over the componentwise exponent caps of v, so the list
    stays tiny for the monomial coefficients composition produces.
    """
    caps = [0] * v.n
    for a in v.terms:
        for i, e in enumerate(a):
            if e > caps[i]:
                caps[i] = e
    out = []
    for gamma in product(*(range(c + 1) for c in caps)):
        dv = v.multi_partial(gamma)
        if dv:
            out.append((gamma, dv.terms))
    return out


class OneForm:
    """Sum of coefficient polynomials times dx_i."""

    __slots__ = ("n", "comps")

    def __init__(self, n: int, comps):
        comps = list(comps)
        if len(comps) != n:
            raise ValueError("need one component per coordinate")
        self.n = n
        self.comps = tuple(comps)

    @classmethod
    def zero(cls, n: int) -> "OneForm":
        return cls(n, [Polynomial.zero(n) for _ in range(n)])

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.n, [a + b for a, b in zip(self.comps, other.comps)])

    def __neg__(self) -> "OneForm":
        return OneForm(self.n, [-a for a in self.comps])

    def __sub__(self, other: "OneForm") -> "OneForm":
        return self + (-other)

    def scale(self, k) -> "OneForm":
        if isinstance(k, Polynomial):
            return OneForm(self.n, [c * k for c in self.comps])
        return OneForm(self.n, [c.scale(k) for c in self.comps])

    def __rmul__(self, k):
        return self.scale(k)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def __eq__(self, other) -> bool:
        return (isinstance(other, OneForm) and self.n == other.n
                and self.comps == other.comps)

    def render(self) -> str:
        parts = []
        for i, c in enumerate(self.comps, start=1):
            for a, coef in sorted(c.terms.items()):
                body = "*".join(
                    f"x{t}" if e == 1 else f"x{t}^{e}"
                    for t, e in enumerate(a, start=1) if e)
                body = f"{body}*dx{i}" if body else f"dx{i}"
                parts.append((1 if coef > 0 else -1,
                              _render_coeff_prefix(coef, body)))
        return _join_terms(parts)

    def __repr__(self) -> str:
        return f"OneForm({self.n}, {self.render()})"


class TwoForm:
    """Sparse 2-form: (i, j) with i < j -> Polynomial coefficient of dx_i^dx_j."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms = {}
        for (i, j), p in (terms or {}).items():
            if not isinstance(p, Polynomial) or not p:
                continue
            if i == j:
                continue
            if i > j:
                i, j = j, i
                p = -p
            q = self.terms.get((i, j))
            s = p if q is None else q + p
            if s:
                self.terms[(i, j)] = s
            else:
                self.terms.pop((i, j), None)

    @classmethod
    def zero(cls, n: int) -> "TwoForm":
        return cls(n, {})

    def __add__(self, other: "TwoForm") -> "TwoForm":
        out = dict(self.terms)
        for key, p in other.terms.items():
            q = out.get(key)
            s = p if q is None else q + p
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return TwoForm(self.n, out)

    def __neg__(self) -> "TwoForm":
        return TwoForm(self.n, {k: -p for k, p in self.terms.items()})

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        return self + (-other)

    def scale(self, k) -> "TwoForm":
        if isinstance(k, Polynomial):
            return TwoForm(self.n, {key: p * k for key, p in self.terms.items()})
        return TwoForm(self.n, {key: p.scale(k) for key, p in self.terms.items()})

    def __rmul__(self, k):
        return self.scale(k)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (isinstance(other, TwoForm) and self.n == other.n
                and self.terms == other.terms)

    def render(self) -> str:
        parts = []
        for (i, j), p in sorted(self.terms.items()):
            for a, coef in sorted(p.terms.items()):
                body = "*".join(
                    f"x{t}" if e == 1 else f"x{t}^{e}"
                    for t, e in enumerate(a, start=1) if e)
                wedge_part = f"dx{i}^dx{j}"
                body = f"{body}*{wedge_part}" if body else wedge_part
                parts.append((1 if coef > 0 else -1,
                              _render_coeff_prefix(coef, body)))
        return _join_terms(parts)

    def __repr__(self) -> str:
        return f"TwoForm({self.n}, {self.render()})"


# ---------------------------------------------------------------------------
# field-level operations
# ---------------------------------------------------------------------------

def compose_op(X: VectorField, Y: VectorField) -> PolyDiffOp:
    return X.as_diffop().compose(Y.as_diffop())


def circ_field(X: VectorField, Y: VectorField) -> VectorField:
    """Left-symmetric product: (X o Y)_i = X(Y_i)."""
    return VectorField(X.n, [X.apply(c) for c in Y.comps])


def bracket(X: VectorField, Y: VectorField) -> VectorField:
    return circ_field(X, Y) - circ_field(Y, X)


def div(X: VectorField) -> Polynomial:
    out = Polynomial.zero(X.n)
    for i, c in enumerate(X.comps, start=1):
        out = out + c.partial(i)
    return out


def d(f: Polynomial) -> OneForm:
    return OneForm(f.n, [f.partial(i) for i in range(1, f.n + 1)])


def wedge(w1: OneForm, w2: OneForm) -> TwoForm:
    out: dict = {}
    for i, j in combinations(range(1, w1.n + 1), 2):
        p = w1.comps[i - 1] * w2.comps[j - 1] - w1.comps[j - 1] * w2.comps[i - 1]
        if p:
            out[(i, j)] = p
    return TwoForm(w1.n, out)


def two_form_to_field(omega: TwoForm) -> VectorField:
    """dx1^dx2 -> d3, dx1^dx3 -> -d2, dx2^dx3 -> d1 (three dimensions only)."""
    if omega.n != 3:
        raise ValueError("the 2-form/field correspondence needs n = 3")
    comps = [Polynomial.zero(3) for _ in range(3)]
    signs = {(1, 2): (3, 1), (1, 3): (2, -1), (2, 3): (1, 1)}
    for key, p in omega.terms.items():
        axis, s = signs[key]
        comps[axis - 1] = comps[axis - 1] + p.scale(s)
    return VectorField(3, comps)


def circ_wedge(v: VectorField, f: Polynomial) -> TwoForm:
    """dv o^ df: sum_j d(v_j) ^ d(d_j f), extending u d_i -> du ^ d(d_i f)."""
    out = TwoForm.zero(v.n)
    for j, c in enumerate(v.comps, start=1):
        if c:
            out = out + wedge(d(c), d(f.partial(j)))
    return out


def circ_wedge_contracted(a: VectorField, X: VectorField, g: Polynomial) -> TwoForm:
    """sum_{i,j} d_i(g) * d(a_j) ^ d(d_j(X_i)): the '(da o^ dX) o Div' terms."""
    out = TwoForm.zero(a.n)
    for i in range(1, a.n + 1):
        gi = g.partial(i)
        if gi.is_zero():
            continue
        Xi = X.comps[i - 1]
        for j in range(1, a.n + 1):
            aj = a.comps[j - 1]
            if aj.is_zero():
                continue
            w = wedge(d(aj), d(Xi.partial(j)))
            for key in list(w.terms):
                w.terms[key] = w.terms[key] * gi
            out = out + w
    return out


def g_field(i: int, j: int, a: Polynomial) -> VectorField:
    """G_ij(a) = d_i(a) d_j - d_j(a) d_i; always divergence-free."""
    if i == j:
        raise ValueError("G_ij needs distinct axes")
    return (VectorField.single(a.n, j, a.partial(i))
            - VectorField.single(a.n, i, a.partial(j)))


def euler_multiple(u: Polynomial) -> VectorField:
    """u * (x1 d1 + ... + xn dn)."""
    return VectorField(u.n, [u * Polynomial.variable(u.n, i)
                             for i in range(1, u.n + 1)])


def euler_field(n: int) -> VectorField:
    return euler_multiple(Polynomial.one(n))


def grade_decompose(X: VectorField) -> dict:
    return X.grade_decompose()
