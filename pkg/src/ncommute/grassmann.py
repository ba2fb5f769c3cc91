"""Super-commutative algebra of differential polynomials in odd coordinates.

The algebra over the integers is generated by odd symbols ``e(alpha, i)``
standing for the alpha-th partial derivative of an odd coordinate
``h_i = e(0, i)``, with ``alpha`` a multi-index over ``n`` axes.  Generators
anticommute and square to zero, so a basis monomial is a strictly increasing
tuple of generators under a fixed canonical order; the sign of a term always
lives in its integer coefficient.

Canonical order of generators: compare the coordinate index first, then the
total degree ``|alpha|``, then the multi-indices componentwise where at the
first difference the *larger* component ranks *smaller* (so ``d1d1(h1)``
precedes ``d1d2(h1)``).

Generators are packed into plain integers such that the natural integer
order coincides with the canonical order.  Layout, most significant limb
first, 6 bits per limb::

    [index | |alpha| | 63-alpha_1 | ... | 63-alpha_n]

Index 0 is reserved for an odd scalar coordinate used by the order-<=1
operator mode; ordinary coordinates are 1..n.
"""

from __future__ import annotations

from bisect import bisect_left
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence

_LIMB = 6
_MASK = 63

NEG_INF = float("-inf")

Generator = int
Monomial = tuple  # tuple of packed Generator ints, strictly increasing


def pack_generator(n: int, index: int, alpha: Sequence[int]) -> Generator:
    """Pack ``e(alpha, index)`` into its canonical-order-preserving integer."""
    if len(alpha) != n:
        raise ValueError(f"multi-index length {len(alpha)} != n={n}")
    if not 0 <= index <= n:
        raise ValueError(f"coordinate index {index} out of range 0..{n}")
    deg = 0
    g = index
    for a in alpha:
        if a < 0 or a > _MASK:
            raise ValueError(f"multi-index component {a} out of range")
        deg += a
    if deg > _MASK:
        raise ValueError(f"total degree {deg} too large to pack")
    g = (g << _LIMB) | deg
    for a in alpha:
        g = (g << _LIMB) | (_MASK - a)
    return g


def unpack_generator(n: int, g: Generator) -> tuple:
    """Return ``(alpha, index)`` for a packed generator."""
    alpha = []
    for _ in range(n):
        alpha.append(_MASK - (g & _MASK))
        g >>= _LIMB
    g >>= _LIMB  # drop the degree limb
    return tuple(reversed(alpha)), g


def gen_index(n: int, g: Generator) -> int:
    return g >> (_LIMB * (n + 1))


def gen_degree(n: int, g: Generator) -> int:
    return (g >> (_LIMB * n)) & _MASK


def gen_weight(n: int, g: Generator) -> int:
    """|alpha| - 1 for ordinary coordinates, |alpha| for the scalar slot."""
    d = gen_degree(n, g)
    return d if gen_index(n, g) == 0 else d - 1


def eta(n: int, i: int) -> Generator:
    """The undifferentiated odd coordinate ``h_i``."""
    return pack_generator(n, i, (0,) * n)


def canonical_order(g1: Generator, g2: Generator) -> int:
    """-1, 0 or 1 as g1 precedes, equals or follows g2 canonically."""
    return (g1 > g2) - (g1 < g2)


def _deriv_shift(n: int, axis: int) -> int:
    # adding the shift bumps |alpha| and decrements the stored complement
    return (1 << (_LIMB * n)) - (1 << (_LIMB * (n - axis)))


def derive_generator(n: int, g: Generator, axis: int) -> Generator:
    """Shift a generator's multi-index by one along ``axis`` (1-based)."""
    if not 1 <= axis <= n:
        raise ValueError(f"axis {axis} out of range 1..{n}")
    return g + _deriv_shift(n, axis)


# ---------------------------------------------------------------------------
# monomial kernels: sorted-merge products with transposition-count signs
# ---------------------------------------------------------------------------

def merge_mul(m1: Monomial, m2: Monomial):
    """Merge two sorted generator tuples; return (monomial, sign) or None.

    The sign is (-1)**(number of transpositions needed to interleave), and
    None signals a repeated generator (odd square), killing the term.
    """
    if not m1:
        return m2, 1
    if not m2:
        return m1, 1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    swaps = 0
    while i < n1 and j < n2:
        a = m1[i]
        b = m2[j]
        if a < b:
            out.append(a)
            i += 1
        elif b < a:
            out.append(b)
            j += 1
            swaps += n1 - i
        else:
            return None
    if i < n1:
        out.extend(m1[i:])
    else:
        out.extend(m2[j:])
    return tuple(out), (-1 if swaps & 1 else 1)


def mul_gen_left(g: Generator, mono: Monomial):
    """Product g * mono for a single generator on the left."""
    p = bisect_left(mono, g)
    if p < len(mono) and mono[p] == g:
        return None
    return mono[:p] + (g,) + mono[p:], (-1 if p & 1 else 1)


def replace_gen(mono: Monomial, pos: int, h: Generator):
    """Replace the factor at ``pos`` by ``h`` and re-sort; (monomial, sign) or None."""
    rest = mono[:pos] + mono[pos + 1:]
    q = bisect_left(rest, h)
    if q < len(rest) and rest[q] == h:
        return None
    return rest[:q] + (h,) + rest[q:], (-1 if (q - pos) & 1 else 1)


def partial_mono(n: int, mono: Monomial, axis: int):
    """Leibniz expansion of d_axis on a monomial: yields (monomial, sign)."""
    shift = _deriv_shift(n, axis)
    for pos, g in enumerate(mono):
        g2 = g + shift
        tail = mono[pos + 1:]
        q = bisect_left(tail, g2)
        if q < len(tail) and tail[q] == g2:
            continue
        yield mono[:pos] + tail[:q] + (g2,) + tail[q:], (-1 if q & 1 else 1)


@lru_cache(maxsize=1 << 18)
def multi_partial_mono(n: int, mono: Monomial, gamma: tuple) -> tuple:
    """Iterated partials d^gamma applied to a monomial, as ((monomial, sign), ...)."""
    for axis in range(1, n + 1):
        if gamma[axis - 1]:
            g2 = gamma[:axis - 1] + (gamma[axis - 1] - 1,) + gamma[axis:]
            out: dict = {}
            for m, s in multi_partial_mono(n, mono, g2):
                for m2, s2 in partial_mono(n, m, axis):
                    c = out.get(m2, 0) + s * s2
                    if c:
                        out[m2] = c
                    else:
                        out.pop(m2, None)
            return tuple(out.items())
    return ((mono, 1),)


def classify(n: int, mono: Monomial):
    """Return (length, weight, parity, type signature) of a monomial.

    The type signature counts generators per weight starting at weight -1,
    trimmed after the last nonzero count, e.g. ``(2, 7, 1)``.
    """
    length = len(mono)
    weight = 0
    counts: dict = {}
    for g in mono:
        w = gen_weight(n, g)
        weight += w
        counts[w] = counts.get(w, 0) + 1
    if counts:
        top = max(counts)
        sig = tuple(counts.get(w, 0) for w in range(-1, top + 1))
        while sig and sig[-1] == 0:
            sig = sig[:-1]
    else:
        sig = ()
    return length, weight, length & 1, sig


def render_signature(sig: tuple) -> str:
    return "(" + ",".join(str(c) for c in sig) + ")"


def weight_count_bound(n: int, w: int) -> int:
    """Largest possible number of weight-w generators in one monomial."""
    return n * comb(n + w, w + 1)


def validate_monomial(n: int, mono: Monomial) -> None:
    """Assert strict ordering and the per-weight count bounds."""
    counts: dict = {}
    for prev, g in zip((None,) + mono, mono):
        if prev is not None and not prev < g:
            raise ValueError("generators not strictly increasing")
        if gen_index(n, g) >= 1:
            w = gen_weight(n, g)
            counts[w] = counts.get(w, 0) + 1
    for w, c in counts.items():
        if c > weight_count_bound(n, w):
            raise ValueError(f"{c} generators of weight {w} exceed the basis bound")


def render_generator(n: int, g: Generator) -> str:
    alpha, index = unpack_generator(n, g)
    ds = "".join(f"d{axis}" * a for axis, a in enumerate(alpha, start=1))
    if not ds:
        return f"h{index}"
    return f"{ds}(h{index})"


def render_monomial(n: int, mono: Monomial) -> str:
    if not mono:
        return "1"
    return "*".join(render_generator(n, g) for g in mono)


def _render_terms(pairs, body) -> str:
    chunks = []
    for key, c in pairs:
        mono = body(key)
        mag = abs(c)
        piece = mono if mag == 1 else f"{mag}*{mono}"
        if not chunks:
            chunks.append(piece if c > 0 else f"-{piece}")
        else:
            chunks.append(f" + {piece}" if c > 0 else f" - {piece}")
    return "".join(chunks) if chunks else "0"


class SuperPolynomial:
    """Sparse integer-coefficient element of the odd-coordinate algebra."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Monomial, int] | None = None):
        self.n = n
        self.terms = dict(terms) if terms else {}

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "SuperPolynomial":
        return cls(n)

    @classmethod
    def from_generators(cls, n: int, gens: Iterable[Generator], coeff: int = 1):
        """Build coeff * (product of generators in the written order)."""
        mono: Monomial = ()
        sign = 1
        for g in gens:
            grown = merge_mul(mono, (g,))
            if grown is None:
                return cls(n)
            mono, s = grown
            sign *= s
        validate_monomial(n, mono)
        c = coeff * sign
        return cls(n, {mono: c}) if c else cls(n)

    @classmethod
    def coordinate(cls, n: int, i: int) -> "SuperPolynomial":
        return cls(n, {(eta(n, i),): 1})

    # -- ring structure ------------------------------------------------

    def _check(self, other: "SuperPolynomial") -> None:
        if self.n != other.n:
            raise ValueError(f"mixed dimensions {self.n} and {other.n}")

    def __add__(self, other: "SuperPolynomial") -> "SuperPolynomial":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return SuperPolynomial(self.n, out)

    def __neg__(self) -> "SuperPolynomial":
        return SuperPolynomial(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "SuperPolynomial") -> "SuperPolynomial":
        return self + (-other)

    def __rmul__(self, k: int) -> "SuperPolynomial":
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return SuperPolynomial(self.n)
        return SuperPolynomial(self.n, {m: k * c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.__rmul__(other)
        self._check(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                r = merge_mul(m1, m2)
                if r is None:
                    continue
                m, s = r
                v = out.get(m, 0) + s * c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return SuperPolynomial(self.n, out)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SuperPolynomial)
                and self.n == other.n and self.terms == other.terms)

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- derivations and actions ----------------------------------------

    def partial(self, axis: int) -> "SuperPolynomial":
        """The even derivation shifting multi-indices along ``axis``."""
        if not 1 <= axis <= self.n:
            raise ValueError(f"axis {axis} out of range 1..{self.n}")
        out: dict = {}
        for mono, c in self.terms.items():
            for m2, s in partial_mono(self.n, mono, axis):
                v = out.get(m2, 0) + s * c
                if v:
                    out[m2] = v
                else:
                    out.pop(m2, None)
        return SuperPolynomial(self.n, out)

    def multi_partial(self, gamma: Sequence[int]) -> "SuperPolynomial":
        p = self
        for axis, a in enumerate(gamma, start=1):
            for _ in range(a):
                p = p.partial(axis)
        return p

    def gln_action(self, i: int, j: int) -> "SuperPolynomial":
        """Even-derivation action of the matrix unit carrying axis j to axis i.

        On a generator with multi-index alpha and coordinate s it returns
        ``-delta(i,s) e(alpha, j) + alpha_j e(alpha - e_j + e_i, s)``.
        """
        n = self.n
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError("axes out of range")
        shift = (1 << (_LIMB * (n - j))) - (1 << (_LIMB * (n - i)))
        out: dict = {}

        def emit(m, v):
            w = out.get(m, 0) + v
            if w:
                out[m] = w
            else:
                out.pop(m, None)

        for mono, c in self.terms.items():
            for pos, g in enumerate(mono):
                alpha, index = unpack_generator(n, g)
                if index == i:
                    r = replace_gen(mono, pos, pack_generator(n, j, alpha))
                    if r is not None:
                        emit(r[0], -c * r[1])
                aj = alpha[j - 1]
                if aj:
                    if i == j:
                        emit(mono, aj * c)
                    else:
                        r = replace_gen(mono, pos, g + shift)
                        if r is not None:
                            emit(r[0], aj * c * r[1])
        return SuperPolynomial(n, out)

    def divfree_normalize(self) -> "SuperPolynomial":
        """Eliminate generators e(alpha, n) with alpha_n >= 1.

        Rewrites each such generator as minus the sum of its axis-swapped
        images over the first n-1 coordinates (the zero-divergence relation
        for the universal odd derivation, differentiated), until none remain.
        """
        n = self.n
        if n < 2:
            raise ValueError("divergence-free rewrite needs n >= 2")
        out: dict = {}
        work = list(self.terms.items())
        while work:
            mono, c = work.pop()
            bad_pos = -1
            for pos, g in enumerate(mono):
                if gen_index(n, g) == n and (g & _MASK) < _MASK:
                    bad_pos = pos
                    break
            if bad_pos < 0:
                v = out.get(mono, 0) + c
                if v:
                    out[mono] = v
                else:
                    out.pop(mono, None)
                continue
            g = mono[bad_pos]
            alpha, _ = unpack_generator(n, g)
            base = list(alpha)
            base[n - 1] -= 1
            for i in range(1, n):
                sub = list(base)
                sub[i - 1] += 1
                r = replace_gen(mono, bad_pos, pack_generator(n, i, sub))
                if r is not None:
                    work.append((r[0], -c * r[1]))
        return SuperPolynomial(n, out)

    # -- inspection ------------------------------------------------------

    def coefficient(self, gens: Iterable[Generator]) -> int:
        """Signed coefficient of the product of ``gens`` in the written order."""
        mono: Monomial = ()
        sign = 1
        for g in gens:
            grown = merge_mul(mono, (g,))
            if grown is None:
                return 0
            mono, s = grown
            sign *= s
        return sign * self.terms.get(mono, 0)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def render(self) -> str:
        return _render_terms(self.sorted_terms(), lambda m: render_monomial(self.n, m))

    def __repr__(self) -> str:
        return f"SuperPolynomial({self.n}, {self.render()})"
