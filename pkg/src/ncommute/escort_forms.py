"""Closed-form evaluators for the escort invariants of N-commutators.

The extraction tables (envelope.escort_extract) record, for each support
chain of D^k, the constant-coefficient operator that the k-commutator takes
on that chain.  This module holds the closed formulas that reproduce those
tables: the (3,8,2) invariant of the 13-commutator, the (2,7,1) and
(3,6,0,1) invariants of the 10-commutator on three variables, and the n=2
invariants of the 6- and 5-commutators.  Each formula is accompanied by the
identification that matches it against the extracted table:

  * the omitted grade-0 basis element x_j d_i of a chain enters the formula
    as its trace-form dual a = x_i d_j; an omitted d_k enters as u = x_k;
  * chains are divided-power basis elements, so evaluating on ordinary
    monomial fields over-counts by alpha! per high-grade slot;
  * a permutation parity relates block order [dels | gls | highs] to the
    canonical chain order, with a bring-to-front Laplace sign for the
    omitted slots, and one global -1 (see table_from_382 and friends).

Two of the transcribed formulas disagree with the machine-extracted tables:
the 32-line of the (2,7,1) formula carries the opposite sign, and one of the
"+18 Div b" terms of the (3,6,0,1) formula breaks the cyclic pattern.  The
corrected versions (unique solutions of exact linear systems over all table
entries) ship as escort271/escort3601; the transcribed originals are kept as
*_legacy together with discrepancy reports.
"""

from fractions import Fraction
from itertools import combinations
from math import factorial

from .grassmann import pack_generator
from .witt import (
    Polynomial,
    TwoForm,
    VectorField,
    bracket,
    circ_field,
    circ_wedge,
    circ_wedge_contracted,
    d,
    div,
    euler_multiple,
    g_field,
    two_form_to_field,
    wedge,
)
from .envelope import EscortTable, escort_extract


def _check_grade(name, X, degree):
    """Require every nonzero component of X to be homogeneous of `degree`."""
    for comp in X.comps:
        for mono, c in comp.terms.items():
            if c and sum(mono) != degree:
                raise ValueError(
                    "%s must have homogeneous degree-%d coefficients" % (name, degree))


def escort382(a, X, Y):
    """Two-form invariant of the 13-commutator on three variables.

    a carries linear coefficients, X and Y quadratic ones.  Antisymmetric
    in (X, Y).  two_form_to_field of the result, taken with the global -1
    of the table identification, equals the extracted (3,8,2) entry on
    every support chain of D^13.
    """
    if a.n != 3:
        raise ValueError("escort382 is specific to n=3")
    _check_grade("a", a, 1)
    _check_grade("X", X, 2)
    _check_grade("Y", Y, 2)
    dvX, dvY, dva = div(X), div(Y), div(a)
    out = -wedge(d(a.apply(dvX)), d(dvY)) + wedge(d(a.apply(dvY)), d(dvX))
    out = out - 2 * (dva * wedge(d(dvX), d(dvY)))
    out = out + 4 * wedge(d(div(circ_field(X, a))), d(dvY)) \
              + 4 * wedge(d(dvX), d(div(circ_field(Y, a))))
    out = out + 8 * circ_wedge_contracted(a, X, dvY) \
              - 8 * circ_wedge_contracted(a, Y, dvX)
    return out


def _escort271_terms(u, a, b, X):
    """The eleven antisymmetrized building blocks of the (2,7,1) formula."""
    dvX = div(X)
    br = bracket(a, b)
    A = wedge(d(u), d(div(circ_field(br, X))))
    B = wedge(d(u), d(a.apply(div(circ_field(b, X))) - b.apply(div(circ_field(a, X)))))
    C = wedge(d(u), d(br.apply(dvX)))
    D = wedge(d(a.apply(u)), d(div(circ_field(b, X)))) \
        - wedge(d(b.apply(u)), d(div(circ_field(a, X))))
    E = wedge(d(a.apply(u)), d(b.apply(dvX))) - wedge(d(b.apply(u)), d(a.apply(dvX)))
    G = div(a) * wedge(d(u), d(b.apply(dvX))) - div(b) * wedge(d(u), d(a.apply(dvX)))
    H = div(a) * wedge(d(u), d(div(circ_field(b, X)))) \
        - div(b) * wedge(d(u), d(div(circ_field(a, X))))
    I = div(a) * circ_wedge(b, u * dvX) - div(b) * circ_wedge(a, u * dvX)
    J = circ_wedge(a, circ_field(b, X).apply(u)) - circ_wedge(b, circ_field(a, X).apply(u))
    K = circ_wedge(br, X.apply(u))
    L = circ_wedge(a, X.apply(b.apply(u))) - circ_wedge(b, X.apply(a.apply(u)))
    return [A, B, C, D, E, G, H, I, J, K, L]

# Unique solution of the 489-equation exact linear system over the (2,7,1)
# entries of D^10.  The transcribed formula has -32 in the fourth slot; every
# other slot solves to its transcribed value.
ESCORT271_COEFFS = (11, 21, -44, 32, -50, 2, 9, 8, 12, -28, 16)
ESCORT271_LEGACY_COEFFS = (11, 21, -44, -32, -50, 2, 9, 8, 12, -28, 16)


def _escort271_with(coeffs, u, a, b, X):
    if a.n != 3:
        raise ValueError("escort271 is specific to n=3")
    if not isinstance(u, Polynomial):
        raise ValueError("u must be a Polynomial")
    for mono, c in u.terms.items():
        if c and sum(mono) != 1:
            raise ValueError("u must be linear")
    _check_grade("a", a, 1)
    _check_grade("b", b, 1)
    _check_grade("X", X, 2)
    out = TwoForm.zero(3)
    for c, t in zip(coeffs, _escort271_terms(u, a, b, X)):
        out = out + c * t
    return out


def escort271(u, a, b, X):
    """Two-form invariant of the 10-commutator on chains with one missing d.

    u is linear, a and b carry linear coefficients, X quadratic ones.
    Antisymmetric in (a, b).  Matches the extracted (2,7,1) table exactly.
    """
    return _escort271_with(ESCORT271_COEFFS, u, a, b, X)


def escort271_legacy(u, a, b, X):
    """Transcribed variant of escort271 (32-line negated); for diagnostics."""
    return _escort271_with(ESCORT271_LEGACY_COEFFS, u, a, b, X)


def _escort3601_blocks(a, b, c, X, verbatim=False):
    dvX = div(X)

    def cyc(f):
        return f(a, b, c) + f(b, c, a) + f(c, a, b)

    T1 = cyc(lambda p, q, r: circ_wedge(p, q.apply(div(circ_field(r, X)))))
    T2 = cyc(lambda p, q, r: circ_wedge(p, r.apply(div(circ_field(q, X)))))
    T3 = cyc(lambda p, q, r: circ_wedge(p, div(circ_field(bracket(q, r), X))))
    T4 = cyc(lambda p, q, r: circ_wedge(bracket(p, q), div(circ_field(r, X))))
    T5 = cyc(lambda p, q, r: circ_wedge(bracket(p, q), r.apply(dvX)))
    T6 = circ_wedge(circ_field(a, bracket(b, c)) + circ_field(b, bracket(c, a))
                    + circ_field(c, bracket(a, b)), dvX)
    if verbatim:
        # The Div b middle line repeats db^d(a o Div X) instead of following
        # the cyclic pattern; kept exactly as written for the diagnostic.
        T7 = div(a) * (circ_wedge(b, c.apply(dvX)) - circ_wedge(c, b.apply(dvX))) \
           + div(b) * (circ_wedge(c, a.apply(dvX)) - circ_wedge(b, a.apply(dvX))) \
           + div(c) * (circ_wedge(a, b.apply(dvX)) - circ_wedge(b, a.apply(dvX)))
    else:
        T7 = cyc(lambda p, q, r: div(p) * (circ_wedge(q, r.apply(dvX))
                                           - circ_wedge(r, q.apply(dvX))))
    T8 = cyc(lambda p, q, r: div(p) * (circ_wedge(q, div(circ_field(r, X)))
                                       - circ_wedge(r, div(circ_field(q, X)))))
    return [T1, T2, T3, T4, T5, T6, T7, T8]

ESCORT3601_COEFFS = (-6, 6, -5, -1, -12, 27, 18, -14)


def _escort3601_with(a, b, c, X, verbatim):
    if a.n != 3:
        raise ValueError("escort3601 is specific to n=3")
    _check_grade("a", a, 1)
    _check_grade("b", b, 1)
    _check_grade("c", c, 1)
    _check_grade("X", X, 3)
    out = TwoForm.zero(3)
    for coef, t in zip(ESCORT3601_COEFFS, _escort3601_blocks(a, b, c, X, verbatim)):
        out = out + coef * t
    return out


def escort3601(a, b, c, X):
    """Two-form invariant of the 10-commutator on chains with all three d's.

    a, b, c carry linear coefficients, X cubic ones.  Fully cyclic in
    (a, b, c); matches the extracted (3,6,0,1) table exactly.
    """
    return _escort3601_with(a, b, c, X, verbatim=False)


def escort3601_legacy(a, b, c, X):
    """Variant with the asymmetric Div b line as transcribed; diagnostics."""
    return _escort3601_with(a, b, c, X, verbatim=True)


def escort3601_divfree(a, b, c, X):
    """Reduced form of escort3601 on divergence-free arguments, as printed.

    Keeps the first three cyclic blocks at (-6, 6, -5).  The Div p prefactor
    blocks and the trailing Div X blocks do vanish on divergence-free input,
    but the bracket block does not: the printed reduction differs from the
    true restriction of escort3601 by exactly +1 times the cyclic
    circ_wedge([p,q], Div(r o X)) block.  See escort_discrepancies().
    """
    for name, f in (("a", a), ("b", b), ("c", c), ("X", X)):
        if not div(f).is_zero():
            raise ValueError("%s must be divergence-free" % name)
    blocks = _escort3601_blocks(a, b, c, X)
    out = TwoForm.zero(3)
    for coef, t in zip((-6, 6, -5), blocks[:3]):
        out = out + coef * t
    return out


def escort3601_bracket_block(a, b, c, X):
    """The cyclic circ_wedge([p,q], Div(r o X)) block on its own.

    This is the -1 slot of the full formula and the exact residual between
    escort3601 restricted to divergence-free input and the printed reduced
    form: escort3601 = escort3601_divfree - bracket block there.
    """
    return _escort3601_blocks(a, b, c, X)[3]


# ---------------------------------------------------------------------------
# n = 2 invariants

def one_form_to_field(w):
    """Orientation of the 1-form/field identification on two variables.

    dx1 -> -d2, dx2 -> +d1.  Fitted once against the extracted table of
    D^6; all three blocks of the 6-commutator formula share it.
    """
    if w.n != 2:
        raise ValueError("one_form_to_field is specific to n=2")
    return VectorField(2, [w.comps[1], -w.comps[0]])

# Fitted block coefficients for the 6-commutator invariant.  The transcribed
# formula reads (1, 1, -3); the exact 12-unknown solve over all 14 extracted
# chains gives 4 on the d(a o Div X) block.
ESCORT231_COEFFS = (4, 1, -3)
ESCORT231_LEGACY_COEFFS = (1, 1, -3)


def _escort231_with(coeffs, a, X):
    if a.n != 2:
        raise ValueError("escort231 is specific to n=2")
    _check_grade("a", a, 1)
    _check_grade("X", X, 2)
    dvX = div(X)
    c1, c2, c3 = coeffs
    return c1 * d(a.apply(dvX)) + c2 * (div(a) * d(dvX)) \
        + c3 * d(div(circ_field(a, X)))


def escort231(a, X):
    """One-form invariant of the 6-commutator on two variables."""
    return _escort231_with(ESCORT231_COEFFS, a, X)


def escort231_legacy(a, X):
    """Transcribed variant of escort231 (first block at 1, not 4)."""
    return _escort231_with(ESCORT231_LEGACY_COEFFS, a, X)


def escort221(a, X):
    """One-form invariant of the 5-commutator on divergence-free fields, n=2."""
    if a.n != 2:
        raise ValueError("escort221 is specific to n=2")
    _check_grade("a", a, 1)
    _check_grade("X", X, 2)
    return -3 * d(div(circ_field(a, X)))


# ---------------------------------------------------------------------------
# Identification of formulas with extraction tables

def _gl_basis_keys(n):
    """Grade-0 generator keys (alpha, i) in canonical (packed) order."""
    keys = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            alpha = tuple(1 if t == j else 0 for t in range(1, n + 1))
            keys.append((alpha, i))
    keys.sort(key=lambda e: pack_generator(n, e[1], e[0]))
    return keys


def _del_keys(n):
    zero = tuple(0 for _ in range(n))
    return [(zero, i) for i in range(1, n + 1)]


def trace_dual_field(n, key):
    """Trace-form dual of the grade-0 generator x_j d_i: the field x_i d_j."""
    alpha, i = key
    j = alpha.index(1) + 1
    return VectorField.single(n, j, Polynomial.variable(n, i))


def _monomial_field(n, key):
    alpha, i = key
    return VectorField.single(n, i, Polynomial.monomial(n, alpha))


def _block_parity(chain, ref):
    """Sign of the permutation taking `ref` order to the sorted chain order."""
    pos = {entry: p for p, entry in enumerate(chain)}
    seq = [pos[e] for e in ref]
    inv = sum(1 for p in range(len(seq)) for q in range(p + 1, len(seq))
              if seq[p] > seq[q])
    return -1 if inv % 2 else 1


def _laplace(positions):
    """Bring-to-front sign for removing the given 0-based slots of a block."""
    s = sum(positions) - sum(range(len(positions)))
    return -1 if s % 2 else 1


def _alpha_factorial(alpha):
    out = 1
    for e in alpha:
        out *= factorial(e)
    return out


def _high_keys(n, degree):
    keys = []
    for i in range(1, n + 1):
        for alpha in _compositions(n, degree):
            keys.append((alpha, i))
    keys.sort(key=lambda e: pack_generator(n, e[1], e[0]))
    return keys


def _compositions(n, total):
    if n == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(n - 1, total - head):
            yield (head,) + rest


def _constant_field_value(fld):
    """(mu, coef) of a constant first-order field c*d_t; None if zero/mixed."""
    n = fld.n
    hits = []
    for t in range(n):
        comp = fld.comps[t]
        for mono, c in comp.terms.items():
            if not c:
                continue
            if sum(mono) != 0:
                raise ValueError("value is not constant: %s" % fld.render())
            hits.append((t, c))
    if not hits:
        return None
    if len(hits) > 1:
        raise ValueError("value is not a single direction: %s" % fld.render())
    t, c = hits[0]
    mu = tuple(1 if s == t else 0 for s in range(n))
    return mu, Fraction(c)


def _key_sort(n):
    return lambda e: pack_generator(n, e[1], e[0])


def table_from_382():
    """EscortTable of the 13-commutator built from the closed formula.

    Enumerates every candidate (3,8,2) chain, applies the complement and
    parity identification, and records nonzero values.  Equals
    escort_extract(3, 13) exactly.
    """
    n = 3
    key = _key_sort(n)
    dels = _del_keys(n)
    gl = _gl_basis_keys(n)
    quads = _high_keys(n, 2)
    entries = {}
    for miss_idx, miss in enumerate(gl):
        a = trace_dual_field(n, miss)
        gl_rest = [g for g in gl if g != miss]
        for qa, qb in combinations(quads, 2):
            form = escort382(a, _monomial_field(n, qa), _monomial_field(n, qb))
            val = _constant_field_value(two_form_to_field(form))
            if val is None:
                continue
            mu, comp = val
            chain = tuple(sorted(dels + gl_rest + [qa, qb], key=key))
            ref = dels + gl_rest + [qa, qb]
            par = _block_parity(chain, ref) * _laplace([miss_idx])
            fact = _alpha_factorial(qa[0]) * _alpha_factorial(qb[0])
            lam = -par * comp / fact
            entries[chain] = (mu, lam)
    return EscortTable(n, 13, entries)


def table_from_271():
    """(2,7,1) part of the 10-commutator table from the closed formula."""
    n = 3
    key = _key_sort(n)
    dels = _del_keys(n)
    gl = _gl_basis_keys(n)
    quads = _high_keys(n, 2)
    entries = {}
    for dpos, dmiss in enumerate(dels):
        u = Polynomial.variable(n, dmiss[1])
        del_rest = [e for e in dels if e != dmiss]
        for (p1, g1), (p2, g2) in combinations(enumerate(gl), 2):
            a = trace_dual_field(n, g1)
            b = trace_dual_field(n, g2)
            gl_rest = [g for g in gl if g != g1 and g != g2]
            for q in quads:
                form = escort271(u, a, b, _monomial_field(n, q))
                val = _constant_field_value(two_form_to_field(form))
                if val is None:
                    continue
                mu, comp = val
                chain = tuple(sorted(del_rest + gl_rest + [q], key=key))
                ref = del_rest + gl_rest + [q]
                par = _block_parity(chain, ref) * _laplace([dpos]) * _laplace([p1, p2])
                lam = -par * comp / _alpha_factorial(q[0])
                entries[chain] = (mu, lam)
    return EscortTable(n, 10, entries)


def table_from_3601():
    """(3,6,0,1) part of the 10-commutator table from the closed formula."""
    n = 3
    key = _key_sort(n)
    dels = _del_keys(n)
    gl = _gl_basis_keys(n)
    cubes = _high_keys(n, 3)
    entries = {}
    for triple in combinations(enumerate(gl), 3):
        positions = [p for p, _ in triple]
        a, b, c = (trace_dual_field(n, g) for _, g in triple)
        missing = {g for _, g in triple}
        gl_rest = [g for g in gl if g not in missing]
        for q in cubes:
            form = escort3601(a, b, c, _monomial_field(n, q))
            val = _constant_field_value(two_form_to_field(form))
            if val is None:
                continue
            mu, comp = val
            chain = tuple(sorted(dels + gl_rest + [q], key=key))
            ref = dels + gl_rest + [q]
            par = _block_parity(chain, ref) * _laplace(positions)
            lam = -par * comp / _alpha_factorial(q[0])
            entries[chain] = (mu, lam)
    return EscortTable(n, 10, entries)


def table_from_231():
    """Full table of the 6-commutator on two variables from the formula."""
    n = 2
    key = _key_sort(n)
    dels = _del_keys(n)
    gl = _gl_basis_keys(n)
    quads = _high_keys(n, 2)
    entries = {}
    for miss_idx, miss in enumerate(gl):
        a = trace_dual_field(n, miss)
        gl_rest = [g for g in gl if g != miss]
        for q in quads:
            w = escort231(a, _monomial_field(n, q))
            val = _constant_field_value(one_form_to_field(w))
            if val is None:
                continue
            mu, comp = val
            chain = tuple(sorted(dels + gl_rest + [q], key=key))
            ref = dels + gl_rest + [q]
            par = _block_parity(chain, ref) * _laplace([miss_idx])
            lam = par * comp / _alpha_factorial(q[0])
            entries[chain] = (mu, lam)
    return EscortTable(n, 6, entries)


def escort_table_eval(table, variant, args):
    """Contract an extraction table against concrete arguments.

    variant 382: args = (a, X, Y); 271: (u, a, b, X); 3601: (a, b, c, X);
    231: (a, X).  Returns the VectorField the closed formula of that variant
    evaluates to (the table side is the ground truth; this is its
    multilinear extension through the complement identification).
    """
    n = table.n
    key = _key_sort(n)
    gl = _gl_basis_keys(n)
    dels = _del_keys(n)

    def gl_coord(field, gkey):
        # coordinate of `field` on the trace-dual basis: x_i d_j for x_j d_i
        alpha, i = gkey
        j = alpha.index(1) + 1
        return field.comps[j - 1].terms.get(
            tuple(1 if t == i else 0 for t in range(1, n + 1)), Fraction(0))

    def high_coord(field, hkey):
        alpha, i = hkey
        return field.comps[i - 1].terms.get(alpha, Fraction(0))

    acc = [Polynomial.zero(n) for _ in range(n)]
    for chain, (mu, lam) in table.entries.items():
        chain_dels = [e for e in chain if sum(e[0]) == 0]
        chain_gls = [e for e in chain if sum(e[0]) == 1]
        highs = [e for e in chain if sum(e[0]) >= 2]
        missing_gl = [(p, g) for p, g in enumerate(gl) if g not in chain_gls]
        missing_del = [(p, e) for p, e in enumerate(dels) if e not in chain_dels]
        if variant == "382":
            a, X, Y = args
            if len(missing_gl) != 1 or len(highs) != 2 or missing_del:
                continue
            (p1, g1), = missing_gl
            qa, qb = highs
            coord = gl_coord(a, g1) * (high_coord(X, qa) * high_coord(Y, qb)
                                       - high_coord(X, qb) * high_coord(Y, qa))
            ref = chain_dels + chain_gls + list(highs)
            par = _block_parity(chain, ref) * _laplace([p1])
            fact = _alpha_factorial(qa[0]) * _alpha_factorial(qb[0])
        elif variant == "271":
            u, a, b, X = args
            if len(missing_gl) != 2 or len(highs) != 1 or len(missing_del) != 1:
                continue
            (dp, dk), = missing_del
            (p1, g1), (p2, g2) = missing_gl
            q, = highs
            ucoef = u.terms.get(
                tuple(1 if t == dk[1] else 0 for t in range(1, n + 1)), Fraction(0))
            coord = ucoef * (gl_coord(a, g1) * gl_coord(b, g2)
                             - gl_coord(a, g2) * gl_coord(b, g1)) * high_coord(X, q)
            ref = chain_dels + chain_gls + [q]
            par = _block_parity(chain, ref) * _laplace([dp]) * _laplace([p1, p2])
            fact = _alpha_factorial(q[0])
        elif variant == "3601":
            a, b, c, X = args
            if len(missing_gl) != 3 or len(highs) != 1 or missing_del:
                continue
            (p1, g1), (p2, g2), (p3, g3) = missing_gl
            q, = highs
            m = [[gl_coord(f, g) for g in (g1, g2, g3)] for f in (a, b, c)]
            det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                   - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                   + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
            coord = det * high_coord(X, q)
            ref = chain_dels + chain_gls + [q]
            par = _block_parity(chain, ref) * _laplace([p1, p2, p3])
            fact = _alpha_factorial(q[0])
        elif variant == "231":
            a, X = args
            if len(missing_gl) != 1 or len(highs) != 1 or missing_del:
                continue
            (p1, g1), = missing_gl
            q, = highs
            coord = gl_coord(a, g1) * high_coord(X, q)
            ref = chain_dels + chain_gls + [q]
            # no global -1 here: the fitted 1-form orientation carries it
            par = -_block_parity(chain, ref) * _laplace([p1])
            fact = _alpha_factorial(q[0])
        else:
            raise ValueError("unknown variant %r" % variant)
        if not coord:
            continue
        t = mu.index(1)
        scale = -par * lam * fact * coord
        if scale:
            acc[t] = acc[t] + Polynomial.constant(n, scale)
    return VectorField(n, acc)


def escort_discrepancies():
    """Where the transcribed formulas differ from the extracted tables.

    Compares each formula variant as transcribed against the corrected one
    (which is proven elsewhere to equal the extraction tables exactly) over
    every basis-argument tuple of its support type, and the printed
    divergence-free reduction of escort3601 against the true restriction.
    The extraction side is the ground truth.  Returns a dict keyed by
    variant with the slot that changed and the basis mismatch counts.
    """
    report = {}
    n = 3
    gl = _gl_basis_keys(n)
    dels = _del_keys(n)

    wrong = total = 0
    for dmiss in dels:
        u = Polynomial.variable(n, dmiss[1])
        for g1, g2 in combinations(gl, 2):
            a, b = trace_dual_field(n, g1), trace_dual_field(n, g2)
            for q in _high_keys(n, 2):
                X = _monomial_field(n, q)
                total += 1
                if escort271_legacy(u, a, b, X) != escort271(u, a, b, X):
                    wrong += 1
    report["271"] = {
        "slot": "d(a o u) ^ d(Div(b o X)) pair",
        "transcribed_coefficient": -32,
        "corrected_coefficient": 32,
        "basis_tuples_differing": wrong,
        "basis_tuples": total,
    }

    wrong = total = 0
    for g1, g2, g3 in combinations(gl, 3):
        a, b, c = (trace_dual_field(n, g) for g in (g1, g2, g3))
        for q in _high_keys(n, 3):
            X = _monomial_field(n, q)
            total += 1
            if escort3601_legacy(a, b, c, X) != escort3601(a, b, c, X):
                wrong += 1
    report["3601"] = {
        "slot": "Div b middle line",
        "transcribed_term": "Div b (dc o^ d(a o Div X) - db o^ d(a o Div X))",
        "corrected_term": "Div b (dc o^ d(a o Div X) - da o^ d(c o Div X))",
        "basis_tuples_differing": wrong,
        "basis_tuples": total,
    }

    wrong = total = 0
    for miss in _gl_basis_keys(2):
        a = trace_dual_field(2, miss)
        for q in _high_keys(2, 2):
            X = _monomial_field(2, q)
            total += 1
            if escort231_legacy(a, X) != escort231(a, X):
                wrong += 1
    report["231"] = {
        "slot": "d(a o Div X) block",
        "transcribed_coefficient": 1,
        "corrected_coefficient": 4,
        "basis_tuples_differing": wrong,
        "basis_tuples": total,
    }

    wrong = total = 0
    sl3 = _sl3_basis()
    for a, b, c in combinations(sl3, 3):
        for (i, j), alpha in (((1, 2), (2, 2, 0)), ((2, 3), (0, 1, 3)),
                              ((1, 3), (1, 0, 3))):
            X = g_field(i, j, Polynomial.monomial(3, alpha))
            total += 1
            if escort3601_divfree(a, b, c, X) != escort3601(a, b, c, X):
                wrong += 1
    report["3601_divfree"] = {
        "slot": "printed reduction omits the bracket block",
        "residual_block": "cyclic circ_wedge([p,q], Div(r o X)) at -1",
        "basis_tuples_differing": wrong,
        "basis_tuples": total,
    }
    return report


def _sl3_basis():
    """Traceless grade-0 fields: off-diagonal x_i d_j plus two diagonal gaps."""
    out = []
    for i in range(1, 4):
        for j in range(1, 4):
            if i != j:
                out.append(VectorField.single(3, j, Polynomial.variable(3, i)))
    for i in (1, 2):
        out.append(VectorField.single(3, i, Polynomial.variable(3, i))
                   - VectorField.single(3, i + 1, Polynomial.variable(3, i + 1)))
    return out


# ---------------------------------------------------------------------------
# Component tables for 13-commutator values on g-field pairs
#
# Rows of escort(G_ij(a), G_st(b), x_r~) where a is a quadratic, b a cubic,
# x_r~ = x_r times the Euler field.  Key (r, t) holds the coefficient list of
# the d_t component as (coef, a_derivative_multi, b_derivative_multi); the
# tables are symmetric in (r, t).  Other index pairs are produced from these
# two configurations by coordinate relabeling.

G_TABLE_1212 = {
    (1, 1): [(-32, (1, 0, 1), (0, 3, 0)), (32, (1, 1, 0), (0, 2, 1)),
             (-32, (0, 2, 0), (1, 1, 1)), (32, (0, 1, 1), (1, 2, 0))],
    (1, 2): [(32, (1, 0, 1), (1, 2, 0)), (-16, (2, 0, 0), (0, 2, 1)),
             (16, (0, 2, 0), (2, 0, 1)), (-32, (0, 1, 1), (2, 1, 0))],
    (1, 3): [(-32, (1, 1, 0), (1, 2, 0)), (16, (2, 0, 0), (0, 3, 0)),
             (16, (0, 2, 0), (2, 1, 0))],
    (2, 2): [(32, (2, 0, 0), (1, 1, 1)), (-32, (1, 1, 0), (2, 0, 1)),
             (-32, (1, 0, 1), (2, 1, 0)), (32, (0, 1, 1), (3, 0, 0))],
    (2, 3): [(-16, (2, 0, 0), (1, 2, 0)), (32, (1, 1, 0), (2, 1, 0)),
             (-16, (0, 2, 0), (3, 0, 0))],
    (3, 3): [],
}

G_TABLE_1223 = {
    (1, 1): [],
    (1, 2): [(-16, (1, 0, 1), (0, 2, 1)), (-16, (0, 2, 0), (1, 0, 2)),
             (16, (1, 1, 0), (0, 1, 2)), (16, (0, 1, 1), (1, 1, 1))],
    (1, 3): [(16, (0, 2, 0), (1, 1, 1)), (-16, (0, 1, 1), (1, 2, 0)),
             (-16, (1, 1, 0), (0, 2, 1)), (16, (1, 0, 1), (0, 3, 0))],
    (2, 2): [(32, (1, 1, 0), (1, 0, 2)), (32, (1, 0, 1), (1, 1, 1)),
             (-32, (2, 0, 0), (0, 1, 2)), (-32, (0, 1, 1), (2, 0, 1))],
    (2, 3): [(-48, (1, 1, 0), (1, 1, 1)), (-16, (1, 0, 1), (1, 2, 0)),
             (32, (2, 0, 0), (0, 2, 1)), (16, (0, 2, 0), (2, 0, 1)),
             (16, (0, 1, 1), (2, 1, 0))],
    (3, 3): [(-32, (2, 0, 0), (0, 3, 0)), (64, (1, 1, 0), (1, 2, 0)),
             (-32, (0, 2, 0), (2, 1, 0))],
}


def _perm_poly(p, sigma):
    """Substitute x_k -> x_{sigma[k]} in p (sigma: 1-based dict)."""
    out = {}
    for mono, c in p.terms.items():
        new = [0] * p.n
        for k, e in enumerate(mono, start=1):
            new[sigma[k] - 1] += e
        key = tuple(new)
        v = out.get(key, 0) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return Polynomial(p.n, out)


def _perm_sign(sigma):
    seq = [sigma[k] for k in sorted(sigma)]
    inv = sum(1 for p in range(len(seq)) for q in range(p + 1, len(seq))
              if seq[p] > seq[q])
    return -1 if inv % 2 else 1


def _table_cell(table, r, t, a, b):
    rows = table.get((r, t) if r <= t else (t, r), [])
    total = Fraction(0)
    for coef, am, bm in rows:
        total += coef * a.multi_partial(am).constant_term() \
                      * b.multi_partial(bm).constant_term()
    return total


def g_table_eval(pair1, pair2, a, b, r):
    """Constant field value of the 13-commutator invariant on g-field pairs.

    Evaluates escort(G_pair1(a), G_pair2(b), x_r~) from the component
    tables, where a is homogeneous quadratic and b homogeneous cubic.
    The printed rows carry the opposite orientation to the extraction
    contraction: the value equals minus
    two_form_to_field(escort382(G_pair1(a), G_pair2(b), x_r~)).
    """
    _check_poly_degree("a", a, 2)
    _check_poly_degree("b", b, 3)
    i, j = pair1
    s, t = pair2
    if i == j or s == t:
        return VectorField.zero(3)
    sign = 1
    set1, set2 = {i, j}, {s, t}
    if set1 == set2:
        table = G_TABLE_1212
        s1, s2 = sorted(set1)
        rest = ({1, 2, 3} - set1).pop()
        sigma = {1: s1, 2: s2, 3: rest}
        if (sigma[1], sigma[2]) != tuple(pair1):
            sign = -sign
        if (sigma[1], sigma[2]) != tuple(pair2):
            sign = -sign
    else:
        table = G_TABLE_1223
        shared = (set1 & set2).pop()
        sigma = {1: (set1 - {shared}).pop(), 2: shared,
                 3: (set2 - {shared}).pop()}
        if (sigma[1], sigma[2]) != tuple(pair1):
            sign = -sign
        if (sigma[2], sigma[3]) != tuple(pair2):
            sign = -sign
    inv = {v: k for k, v in sigma.items()}
    ap = _perm_poly(a, inv)
    bp = _perm_poly(b, inv)
    r0 = inv[r]
    sign *= _perm_sign(sigma)
    comps = [Polynomial.zero(3) for _ in range(3)]
    for t0 in (1, 2, 3):
        val = _table_cell(table, r0, t0, ap, bp)
        if val:
            comps[sigma[t0] - 1] = Polynomial.constant(3, sign * val)
    return VectorField(3, comps)


def _check_poly_degree(name, p, degree):
    if not isinstance(p, Polynomial):
        raise ValueError("%s must be a Polynomial" % name)
    for mono, c in p.terms.items():
        if c and sum(mono) != degree:
            raise ValueError("%s must be homogeneous of degree %d" % (name, degree))


def x_tilde(r):
    """The field x_r times the Euler field on three variables."""
    return euler_multiple(Polynomial.variable(3, r))


# ---------------------------------------------------------------------------
# Divergence-free 5-commutator on two variables

def stream_dual(h):
    """Apolar dual of a homogeneous stream polynomial on two variables.

    x^beta -> binom(|beta|, beta) * x^(reversed beta).  This is the pairing
    under which the omitted grade-0 slot of a divergence-free chain enters
    escort221; fitted against brute-force 5-commutators on all basis chains.
    """
    out = {}
    for (b1, b2), c in h.terms.items():
        deg = b1 + b2
        binom = factorial(deg) // (factorial(b1) * factorial(b2))
        key = (b2, b1)
        v = out.get(key, 0) + binom * c
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return Polynomial(2, out)


def divfree_s5_from_escort(missing_stream, cubic_stream):
    """Value of the 5-commutator on the divergence-free basis chain.

    The chain is [d1, d2, the two grade-0 Hamiltonian fields whose stream
    quadratics complement `missing_stream`, g(cubic_stream)] in that order.
    """
    a = g_field(1, 2, stream_dual(missing_stream))
    X = g_field(1, 2, cubic_stream)
    return one_form_to_field(escort221(a, X))
