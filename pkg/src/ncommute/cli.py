"""Command-line front end: parse fields, run powers, commutators, escorts.

Subcommands
    dpow    render the k-th power of the odd derivation, its stats, or one
            stored coefficient
    ncomm   evaluate the k-commutator of the fields in a file by one of
            four methods (brute, envelope, escort, circ)
    escort  evaluate a closed escort formula on arguments read from a file
    verify  run a named suite of machine checks and report pass/fail
    bench   time brute against envelope on random inputs

Field grammar (one field per line; whitespace ignored; `#` comments):
    field := term (('+'|'-') term)*
    term  := [coef '*'] (mono '*')* ('d' index | 'one')
    mono  := 'x' index ['^' nat]
    coef  := int | int '/' int
`one` is the order-0 slot of the extended algebra.  A field file may open
with a header line `n=3`; the --n flag wins on mismatch, with a warning.
The only environment variable consulted is NCOMMUTE_THREADS (worker count
for verify suites, default: cpu count).  Exit codes: 0 success, 1 a
verification or benchmark equality failure, 2 usage or parse errors.
"""

import argparse
import json
import os
import random
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import escort_forms as forms
from .diffop import (SuperDiffOp, bullet, bullet_power, circ, circ_power,
                     compose, d_power, pdeg_json, stats_json)
from .envelope import (PERMUTATION_CAP, chain_fields, escort_extract,
                       order_one_power, s_k_brute, s_k_circ, s_k_envelope,
                       s_k_via_escort)
from .grassmann import classify, eta, pack_generator, weight_count_bound
from .witt import (Polynomial, PolyDiffOp, VectorField, g_field,
                   two_form_to_field)


class CliError(Exception):
    """Usage-level failure; the caller maps it to exit code 2."""


class FieldSyntaxError(ValueError):
    def __init__(self, reason, line=1, column=1):
        super().__init__("line %d, column %d: %s" % (line, column, reason))
        self.reason = reason
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# tokenizer and parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"[ \t\r\n]+"
    r"|(?P<num>\d+)"
    r"|(?P<x>x(?P<xi>\d+))"
    r"|(?P<d>d(?P<di>\d+))"
    r"|(?P<one>one\b)"
    r"|(?P<sym>[+\-*/^])")


def _linecol(text, pos):
    line = text.count("\n", 0, pos) + 1
    column = pos - text.rfind("\n", 0, pos)
    return line, column


def _tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            line, col = _linecol(text, pos)
            raise FieldSyntaxError("unexpected character %r" % text[pos],
                                   line, col)
        if m.lastgroup == "num":
            toks.append(("num", int(m.group("num")), pos))
        elif m.lastgroup == "x":
            toks.append(("x", int(m.group("xi")), pos))
        elif m.lastgroup == "d":
            toks.append(("d", int(m.group("di")), pos))
        elif m.lastgroup == "one":
            toks.append(("one", None, pos))
        elif m.lastgroup == "sym":
            toks.append((m.group("sym"), None, pos))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    """Recursive-descent reader for the field grammar."""

    def __init__(self, text, n):
        self.text = text
        self.n = n
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, reason, tok=None):
        pos = (tok or self.peek())[2]
        line, col = _linecol(self.text, pos)
        raise FieldSyntaxError(reason, line, col)

    def check_index(self, idx, tok):
        if not 1 <= idx <= self.n:
            self.fail("index %d out of range for n=%d" % (idx, self.n), tok)

    def coefficient(self):
        tok = self.take()
        num = tok[1]
        if self.peek()[0] == "/":
            self.take()
            den = self.peek()
            if den[0] != "num":
                self.fail("expected an integer denominator")
            self.take()
            if den[1] == 0:
                self.fail("zero denominator", den)
            return Fraction(num, den[1])
        return Fraction(num)

    def term(self, poly_mode):
        """One summand: (coefficient, monomial tuple, generator or None).

        The generator is ('d', i) or 'one'; in poly_mode a term may stop
        after its monomial factors.
        """
        coef = Fraction(1)
        mono = [0] * self.n
        if self.peek()[0] == "num":
            coef = self.coefficient()
            if self.peek()[0] in ("+", "-", "end") and poly_mode:
                return coef, tuple(mono), None
            if self.peek()[0] != "*":
                self.fail("expected '*' after a coefficient")
            self.take()
        while True:
            tok = self.peek()
            if tok[0] == "x":
                self.take()
                self.check_index(tok[1], tok)
                exp = 1
                if self.peek()[0] == "^":
                    self.take()
                    etok = self.peek()
                    if etok[0] != "num":
                        self.fail("expected an integer exponent")
                    self.take()
                    exp = etok[1]
                mono[tok[1] - 1] += exp
                if self.peek()[0] in ("+", "-", "end") and poly_mode:
                    return coef, tuple(mono), None
                if self.peek()[0] != "*":
                    self.fail("expected '*' after a monomial factor")
                self.take()
            elif tok[0] == "d":
                self.take()
                self.check_index(tok[1], tok)
                return coef, tuple(mono), ("d", tok[1])
            elif tok[0] == "one":
                self.take()
                return coef, tuple(mono), "one"
            else:
                if poly_mode:
                    self.fail("expected a monomial factor")
                self.fail("term must end with 'd<i>' or 'one'")

    def expression(self, poly_mode):
        out = []
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        coef, mono, gen = self.term(poly_mode)
        out.append((sign * coef, mono, gen))
        while self.peek()[0] != "end":
            tok = self.take()
            if tok[0] not in ("+", "-"):
                self.fail("expected '+' or '-' between terms", tok)
            sign = -1 if tok[0] == "-" else 1
            coef, mono, gen = self.term(poly_mode)
            out.append((sign * coef, mono, gen))
        return out


def parse_field(text: str, n: int) -> PolyDiffOp:
    """Parse a field expression into an order-<=1 operator.

    `d<i>` terms carry the derivation part, `one` terms the order-0 part.
    The bare string "0" is accepted as the zero operator.
    """
    if text.strip() == "0":
        return PolyDiffOp.zero(n)
    zero = tuple(0 for _ in range(n))
    acc = {}
    for coef, mono, gen in _Parser(text, n).expression(poly_mode=False):
        if gen == "one":
            dpart = zero
        else:
            dpart = tuple(1 if t == gen[1] else 0 for t in range(1, n + 1))
        bucket = acc.setdefault(dpart, {})
        v = bucket.get(mono, 0) + coef
        if v:
            bucket[mono] = v
        else:
            bucket.pop(mono, None)
    return PolyDiffOp(n, {b: Polynomial(n, t) for b, t in acc.items()})


def parse_poly(text: str, n: int) -> Polynomial:
    """Parse a plain polynomial; terms need no generator suffix."""
    if text.strip() == "0":
        return Polynomial.zero(n)
    acc = {}
    for coef, mono, gen in _Parser(text, n).expression(poly_mode=True):
        if gen is not None and gen != "one":
            raise FieldSyntaxError("a polynomial term cannot carry d%d"
                                   % gen[1])
        v = acc.get(mono, 0) + coef
        if v:
            acc[mono] = v
        else:
            acc.pop(mono, None)
    return Polynomial(n, acc)


_GEN_PLAIN = re.compile(r"h(\d+)")
_GEN_DERIV = re.compile(r"((?:d\d+)+)\(h(\d+)\)")
_DSPEC = re.compile(r"(?:d\d+)*")


def _parse_dspec(spec, n):
    if not _DSPEC.fullmatch(spec):
        raise CliError("bad derivative spec %r; expected e.g. 'd1d2'" % spec)
    out = [0] * n
    for axis in re.findall(r"d(\d+)", spec):
        axis = int(axis)
        if not 1 <= axis <= n:
            raise CliError("index %d out of range for n=%d" % (axis, n))
        out[axis - 1] += 1
    return tuple(out)


def parse_generator_monomial(text, n):
    """Read a coefficient address like 'h1,d1(h2),d1d1(h1);d2'.

    Returns (generators in written order, derivative multi-index); the
    generator syntax matches the renderer (h2, d1(h2), d2d3(h1), ...).
    """
    if ";" in text:
        left, right = text.split(";", 1)
    else:
        left, right = text, ""
    gens = []
    for tok in left.split(","):
        tok = tok.strip()
        m = _GEN_PLAIN.fullmatch(tok)
        if m:
            idx = int(m.group(1))
            if not 1 <= idx <= n:
                raise CliError("index %d out of range for n=%d" % (idx, n))
            gens.append(eta(n, idx))
            continue
        m = _GEN_DERIV.fullmatch(tok)
        if m is None:
            raise CliError("bad generator %r; expected 'h2' or 'd1d2(h3)'"
                           % tok)
        idx = int(m.group(2))
        if not 1 <= idx <= n:
            raise CliError("index %d out of range for n=%d" % (idx, n))
        gens.append(pack_generator(n, idx, _parse_dspec(m.group(1), n)))
    return gens, _parse_dspec(right.strip(), n)


# ---------------------------------------------------------------------------
# rendering back into the grammar
# ---------------------------------------------------------------------------

def _mono_key(mono):
    return sum(mono), tuple(-e for e in mono)


def _term_body(coef, mono, tail):
    pieces = []
    c = abs(coef)
    for i, e in enumerate(mono, start=1):
        if e == 1:
            pieces.append("x%d" % i)
        elif e:
            pieces.append("x%d^%d" % (i, e))
    if tail:
        pieces.append(tail)
    if c != 1 or not pieces:
        pieces.insert(0, str(c))
    return "*".join(pieces)


def _join_terms(entries):
    if not entries:
        return "0"
    out = []
    for pos, (coef, mono, tail) in enumerate(entries):
        body = _term_body(coef, mono, tail)
        if pos == 0:
            out.append("-" + body if coef < 0 else body)
        else:
            out.append(" - " + body if coef < 0 else " + " + body)
    return "".join(out)


def render_field(op: PolyDiffOp) -> str:
    """Grammar-form rendering; re-parses to an equal operator when the
    derivative order is at most one."""
    entries = []
    for b, p in op.terms.items():
        tail = "".join("d%d" % i * e for i, e in enumerate(b, start=1)) \
            or "one"
        for mono, c in p.terms.items():
            entries.append((_mono_key(b), _mono_key(mono), c, mono, tail))
    entries.sort(key=lambda e: (e[0], e[1]))
    return _join_terms([(c, mono, tail) for _, _, c, mono, tail in entries])


def render_poly(p: Polynomial) -> str:
    entries = sorted(p.terms.items(), key=lambda e: _mono_key(e[0]))
    return _join_terms([(c, mono, None) for mono, c in entries])


# ---------------------------------------------------------------------------
# field spec files
# ---------------------------------------------------------------------------

_HEADER = re.compile(r"n\s*=\s*(\d+)")


def read_field_file(path, n):
    """Parse one field per line; honor comments and the optional n= header."""
    try:
        with open(path) as fh:
            raw = fh.read()
    except OSError as exc:
        raise CliError(str(exc))
    fields = []
    seen_header = False
    for lineno, line in enumerate(raw.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        m = _HEADER.fullmatch(s)
        if m and not seen_header and not fields:
            seen_header = True
            declared = int(m.group(1))
            if declared != n:
                print("warning: %s declares n=%d; the --n %d flag overrides"
                      % (path, declared, n), file=sys.stderr)
            continue
        try:
            fields.append(parse_field(s, n))
        except FieldSyntaxError as exc:
            raise CliError("%s, line %d, column %d: %s"
                           % (path, lineno, exc.column, exc.reason))
    return fields


def _as_vector_fields(fields):
    try:
        return [f.as_field() if isinstance(f, PolyDiffOp) else f
                for f in fields]
    except ValueError as exc:
        raise CliError(str(exc))


# ---------------------------------------------------------------------------
# deterministic random inputs for verify and bench
# ---------------------------------------------------------------------------

def _random_poly(rng, n, deg, homogeneous=False, terms=2):
    out = {}
    for _ in range(terms):
        mono = [0] * n
        steps = deg if homogeneous else rng.randint(0, deg)
        for _ in range(steps):
            mono[rng.randrange(n)] += 1
        c = rng.randint(-3, 3)
        key = tuple(mono)
        v = out.get(key, 0) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return Polynomial(n, out)


def _random_field(rng, n, deg=2, homogeneous=False):
    return VectorField(n, [_random_poly(rng, n, deg, homogeneous)
                           for _ in range(n)])


def _random_operator(rng, n, nterms=3, max_gens=2, max_order=2, parity=None):
    """Random element of the generator algebra with derivative parts."""
    terms = {}
    sizes = [g for g in range(max_gens + 1)
             if parity is None or g % 2 == parity]
    for _ in range(nterms):
        gens = set()
        want = rng.choice(sizes)
        guard = 0
        while len(gens) < want and guard < 50:
            guard += 1
            alpha = [0] * n
            for _ in range(rng.randint(0, 2)):
                alpha[rng.randrange(n)] += 1
            gens.add(pack_generator(n, rng.randint(1, n), tuple(alpha)))
        if len(gens) != want:
            continue
        b = [0] * n
        for _ in range(rng.randint(0, max_order)):
            b[rng.randrange(n)] += 1
        c = rng.randint(-3, 3)
        if c:
            key = (tuple(sorted(gens)), tuple(b))
            terms[key] = terms.get(key, 0) + c
    return SuperDiffOp(n, {k: v for k, v in terms.items() if v})


# ---------------------------------------------------------------------------
# verification checks
# ---------------------------------------------------------------------------

_TABLES = {}


def _shared_table(name):
    if name not in _TABLES:
        builders = {
            "x13": lambda: escort_extract(3, 13),
            "x10": lambda: escort_extract(3, 10),
            "x6": lambda: escort_extract(2, 6),
            "f382": forms.table_from_382,
            "f271": forms.table_from_271,
            "f3601": forms.table_from_3601,
            "f231": forms.table_from_231,
        }
        _TABLES[name] = builders[name]()
    return _TABLES[name]


def _ok(flag, want, got):
    return flag, str(want), str(got)


def _check_product_split(rng):
    bad = 0
    for _ in range(30):
        X = _random_operator(rng, 2)
        Y = _random_operator(rng, 2)
        if compose(X, Y) != circ(X, Y) + bullet(X, Y):
            bad += 1
    return _ok(bad == 0, "0 mismatches in 30 pairs", "%d mismatches" % bad)


def _check_compose_assoc(rng):
    bad = 0
    for _ in range(20):
        X, Y, Z = (_random_operator(rng, 2) for _ in range(3))
        if compose(compose(X, Y), Z) != compose(X, compose(Y, Z)):
            bad += 1
    return _ok(bad == 0, "0 mismatches in 20 triples", "%d mismatches" % bad)


def _check_bullet_laws(rng):
    bad = 0
    for _ in range(20):
        X, Y, Z = (_random_operator(rng, 2) for _ in range(3))
        if bullet(bullet(X, Y), Z) != bullet(X, bullet(Y, Z)):
            bad += 1
    for _ in range(20):
        qx, qy = rng.randint(0, 1), rng.randint(0, 1)
        X = _random_operator(rng, 2, parity=qx)
        Y = _random_operator(rng, 2, parity=qy)
        lhs = bullet(X, Y)
        rhs = bullet(Y, X)
        if qx * qy:
            rhs = -1 * rhs
        if lhs != rhs:
            bad += 1
    return _ok(bad == 0, "associative and supercommutative on 40 draws",
               "%d mismatches" % bad)


def _check_circ_left_symmetric(rng):
    bad = 0
    for _ in range(20):
        qx, qy = rng.randint(0, 1), rng.randint(0, 1)
        X = _random_operator(rng, 2, max_order=1, parity=qx)
        Y = _random_operator(rng, 2, max_order=1, parity=qy)
        Z = _random_operator(rng, 2)
        axy = circ(X, circ(Y, Z)) - circ(circ(X, Y), Z)
        ayx = circ(Y, circ(X, Z)) - circ(circ(Y, X), Z)
        if qx * qy:
            ayx = -1 * ayx
        if axy != ayx:
            bad += 1
    return _ok(bad == 0, "supersymmetric associator on 20 triples",
               "%d mismatches" % bad)


def _check_circ_derives_bullet(rng):
    bad = 0
    for _ in range(20):
        qx, qy = rng.randint(0, 1), rng.randint(0, 1)
        X = _random_operator(rng, 2, max_order=1, parity=qx)
        Y = _random_operator(rng, 2, parity=qy)
        Z = _random_operator(rng, 2)
        lhs = circ(X, bullet(Y, Z))
        rhs = bullet(circ(X, Y), Z)
        cross = bullet(Y, circ(X, Z))
        if qx * qy:
            cross = -1 * cross
        if lhs != rhs + cross:
            bad += 1
    return _ok(bad == 0, "Leibniz over bullet on 20 triples",
               "%d mismatches" % bad)


def _term_grades(n, mono, b):
    length, weight, _, _ = classify(n, mono)
    return length, weight + sum(b), sum(b)


def _check_grading_additive(rng):
    bad = 0
    for _ in range(40):
        X = _random_operator(rng, 2, nterms=1)
        Y = _random_operator(rng, 2, nterms=1)
        if not X.terms or not Y.terms:
            continue
        (mx, bx), = X.terms.keys()
        (my, by), = Y.terms.keys()
        lx, wx, dx = _term_grades(2, mx, bx)
        ly, wy, dy = _term_grades(2, my, by)
        for t, c in compose(X, Y).terms.items():
            l2, w2, _ = _term_grades(2, t[0], t[1])
            if l2 != lx + ly or w2 != wx + wy:
                bad += 1
        for t, c in bullet(X, Y).terms.items():
            l2, w2, d2 = _term_grades(2, t[0], t[1])
            if l2 != lx + ly or w2 != wx + wy or d2 != dx + dy:
                bad += 1
    return _ok(bad == 0, "lengths and weights add on 40 single-term pairs",
               "%d violations" % bad)


def _check_type_bounds(rng):
    X = d_power(3, 10)
    bad = 0
    for (mono, b), _ in X.terms.items():
        length, weight, _, sig = classify(3, mono)
        if length != 10 or sum(sig) != 10 or weight + sum(b) != 0:
            bad += 1
            continue
        for t, count in enumerate(sig):
            if count > weight_count_bound(3, t - 1):
                bad += 1
                break
    return _ok(bad == 0, "all 4062 terms within the per-weight bounds",
               "%d violations" % bad)


def _check_square(rng):
    lines = []
    ok = True
    for n in (2, 3):
        D = d_power(n, 1)
        F = d_power(n, 2)
        good = (compose(D, D) == F and circ(D, D) == F
                and not bullet(D, D).terms)
        ok = ok and good
        lines.append("n=%d %s" % (n, "ok" if good else "MISMATCH"))
    return _ok(ok, "D*D = D o D = F and D . D = 0 for n=2,3",
               "; ".join(lines))


def _check_even_circ_powers(rng):
    ok = True
    for n, k in ((2, 2), (3, 2), (3, 3)):
        D = d_power(n, 1)
        F = d_power(n, 2)
        if circ_power(D, 2 * k) != circ_power(F, k):
            ok = False
    return _ok(ok, "D^{o2k} = F^{ok} for (n,k) in (2,2),(3,2),(3,3)",
               "ok" if ok else "mismatch")


def _check_bullet_contraction(rng):
    F = d_power(3, 2)
    ok = (circ(F, bullet_power(F, 2)) == 2 * bullet(F, circ_power(F, 2))
          and circ(F, bullet_power(F, 3))
          == 3 * bullet(bullet_power(F, 2), circ_power(F, 2)))
    return _ok(ok, "F o F^{.k} = k F^{.(k-1)} . F^{o2} for k=2,3",
               "ok" if ok else "mismatch")


def _decomposition_check(k):
    F = d_power(3, 2)

    def cp(m):
        return circ_power(F, m)

    def bp(m):
        return bullet_power(F, m)

    if k == 4:
        rhs = cp(2) + bp(2)
    elif k == 6:
        rhs = cp(3) + 3 * bullet(F, cp(2)) + bp(3)
    elif k == 8:
        rhs = (cp(4) + 3 * bullet(cp(2), cp(2)) + 4 * bullet(F, cp(3))
               + 6 * bullet(cp(2), bp(2)) + bp(4))
    else:
        rhs = (cp(5) + 5 * (bullet(cp(2), cp(3)) + circ(F, bullet(F, cp(3))))
               + 5 * (2 * bullet(cp(3), bp(2))
                      + 3 * bullet(F, bullet(cp(2), cp(2))))
               + 10 * bullet(cp(2), bp(3)) + bp(5))
    return d_power(3, k) == rhs


def _check_fourth_power(rng):
    return _ok(_decomposition_check(4), "D^4 = F^{o2} + F^{.2}", "computed")


def _check_sixth_power(rng):
    return _ok(_decomposition_check(6),
               "D^6 = F^{o3} + 3 F.F^{o2} + F^{.3}", "computed")


def _check_eighth_power(rng):
    return _ok(_decomposition_check(8),
               "D^8 = F^{o4} + 3 F^{o2}.F^{o2} + 4 F.F^{o3}"
               " + 6 F^{o2}.F^{.2} + F^{.4}", "computed")


def _check_tenth_power(rng):
    return _ok(_decomposition_check(10),
               "D^10 with the F^{o2}.F^{.3} coefficient reconciled to 10",
               "computed")


def _check_bullet_powers_vanish(rng):
    ok = (not bullet_power(d_power(2, 2), 3).terms
          and not bullet_power(d_power(3, 2), 4).terms)
    return _ok(ok, "F^{.s} = 0 once s exceeds n (n=2: s=3; n=3: s=4)",
               "ok" if ok else "nonzero")


def _check_eta_socle(rng):
    bad = 0
    for n in (2, 3):
        F = d_power(n, 2)
        gens = tuple(sorted(eta(n, i) for i in range(1, n + 1)))
        socle = SuperDiffOp(n, {(gens, tuple(0 for _ in range(n))): 1})
        for _ in range(5):
            G = _random_operator(rng, n)
            if circ(F, compose(socle, G)).terms:
                bad += 1
    return _ok(bad == 0, "F o (h1..hn * G) = 0 on 10 random G",
               "%d nonzero" % bad)


def _check_vanishing_combos(rng):
    F = d_power(3, 2)
    c2, c3 = circ_power(F, 2), circ_power(F, 3)
    ok1 = not (bullet(c2, c3) + circ(F, bullet(F, c3))).terms
    ok2 = not bullet(c3, bullet_power(F, 2)).terms
    ok3 = not bullet(F, bullet(c2, c2)).terms
    return _ok(ok1 and ok2 and ok3,
               "F^{o2}.F^{o3} + F o (F.F^{o3}), F^{o3}.F^{.2},"
               " F.F^{o2}.F^{o2} all vanish at n=3",
               "%s %s %s" % (ok1, ok2, ok3))


def _check_order_split(rng):
    D10 = d_power(3, 10)
    ok = D10.tau(1) == circ_power(d_power(3, 2), 5)
    zeros = all(not D10.tau(s).terms for s in (2, 3, 4, 5))
    total = D10.tau(0) + D10.tau(1) == D10
    return _ok(ok and zeros and total,
               "order-1 part of D^10 is F^{o5}; orders 2..5 vanish",
               "split=%s zeros=%s" % (ok, zeros))


def _check_linear_invariance(rng):
    bad = []
    for k in (2, 5, 10, 13):
        X = d_power(3, k)
        for i in range(1, 4):
            for j in range(1, 4):
                if X.gln_action(i, j).terms:
                    bad.append((k, i, j))
    return _ok(not bad, "all 36 generator actions annihilate D^k,"
               " k in {2,5,10,13}", "violations: %s" % (bad or "none"))


def _pdeg_row(n, kmax, divfree=False):
    return [pdeg_json(d_power(n, k, divfree).pdeg())
            for k in range(1, kmax + 1)]


def _fmt_row(row):
    return " ".join(str(v) for v in row)


def _check_row_n2(rng):
    row = _pdeg_row(2, 7)
    want = [1, 1, 2, 2, 2, 1, "-inf"]
    return _ok(row == want, _fmt_row(want), _fmt_row(row))


def _check_row_n3(rng):
    row = _pdeg_row(3, 14)
    want = [1, 1, 2, 2, 3, 3, 3, 2, 3, 1, 2, 2, 1, "-inf"]
    return _ok(row == want, _fmt_row(want), _fmt_row(row))


def _check_row_n2_divfree(rng):
    row = _pdeg_row(2, 7, divfree=True)
    want = [1, 1, 2, 2, 1, "-inf", "-inf"]
    return _ok(row == want, _fmt_row(want), _fmt_row(row))


def _check_row_n3_divfree(rng):
    row = _pdeg_row(3, 14, divfree=True)
    want = [1, 1, 2, 2, 3, 3, 2, 2, 3, 1, 2, "-inf", "-inf", "-inf"]
    return _ok(row == want, _fmt_row(want), _fmt_row(row))


def _check_ten_power_split(rng):
    doc = stats_json(d_power(3, 10), 10)
    want = {"n": 3, "k": 10, "pdeg": 1, "terms_total": 4062,
            "by_type": {"(2,7,1)": 489, "(3,5,2)": 3093, "(3,6,0,1)": 480}}
    return _ok(doc == want, json.dumps(want), json.dumps(doc))


def _check_thirteen_power(rng):
    doc = stats_json(d_power(3, 13), 13)
    want = {"n": 3, "k": 13, "pdeg": 1, "terms_total": 261,
            "by_type": {"(3,8,2)": 261}}
    return _ok(doc == want, json.dumps(want), json.dumps(doc))


def _check_divfree_ten_split(rng):
    doc = stats_json(d_power(3, 10, divfree=True), 10)
    want = {"n": 3, "k": 10, "pdeg": 1, "terms_total": 864,
            "by_type": {"(2,7,1)": 82, "(3,5,2)": 706, "(3,6,0,1)": 76}}
    return _ok(doc == want, json.dumps(want), json.dumps(doc))


def _check_divfree_tail(rng):
    x11 = d_power(3, 11, divfree=True)
    mid = (len(x11.terms), x11.pdeg())
    tail = [not d_power(3, k, divfree=True).terms for k in (12, 13, 14)]
    div10 = not d_power(3, 10, divfree=True).divergence() \
        .divfree_normalize().terms
    ok = mid == (328, 2) and all(tail) and div10
    return _ok(ok, "11th: 328 order-2 terms; 12..14 vanish;"
               " divergence of the 10th reduces to 0",
               "11th=%s tail=%s div=%s" % (mid, tail, div10))


def _check_projection_counts(rng):
    P = circ_power(d_power(3, 2), 3)
    e1 = (1, 0, 0)
    cases = [((1,), 15), ((2,), 8), ((3,), 8),
             ((1, 2), 76), ((1, 3), 76), ((2, 3), 71)]
    got = [len(P.eta_projection(idx, e1).terms) for idx, _ in cases]
    want = [c for _, c in cases]
    return _ok(got == want, str(want), str(got))


def _single(n, i, alpha):
    return SuperDiffOp(n, {((pack_generator(n, i, alpha),),
                            tuple(0 for _ in range(n))): 1})


def _check_bullet_square_rows(rng):
    B = bullet(d_power(3, 2), d_power(3, 2))
    dd1 = SuperDiffOp(3, {((), (2, 0, 0)): 1})
    h = {i: _single(3, i, (0, 0, 0)) for i in (1, 2, 3)}
    rows = [
        ((1, 2), h[1] * h[2] * _single(3, 1, (1, 0, 0))
         * _single(3, 1, (0, 1, 0)) * dd1),
        ((1, 3), h[1] * h[3] * _single(3, 1, (1, 0, 0))
         * _single(3, 1, (0, 0, 1)) * dd1),
        ((2, 3), h[2] * h[3] * _single(3, 1, (0, 1, 0))
         * _single(3, 1, (0, 0, 1)) * dd1),
    ]
    ok = all(B.eta_projection(idx, (2, 0, 0)) == -2 * expected
             for idx, expected in rows)
    return _ok(ok, "three single-term order-2 projections with"
               " coefficient -2", "ok" if ok else "mismatch")


def _check_designated_coefficients(rng):
    g6 = d_power(2, 6)
    gens6 = [eta(2, 1), eta(2, 2), pack_generator(2, 1, (1, 0)),
             pack_generator(2, 1, (0, 1)), pack_generator(2, 2, (1, 0)),
             pack_generator(2, 1, (2, 0))]
    c6 = g6.coefficient_of(gens6, (0, 1))
    g13 = d_power(3, 13)
    gens13 = [eta(3, 1), eta(3, 2), eta(3, 3)]
    for j in (1, 2, 3):
        for i in (1, 2, 3):
            if (i, j) == (3, 3):
                continue
            gens13.append(pack_generator(
                3, j, tuple(1 if t == i else 0 for t in (1, 2, 3))))
    gens13.append(pack_generator(3, 1, (2, 0, 0)))
    gens13.append(pack_generator(3, 2, (0, 2, 0)))
    ok = c6 == 1 and g13.coefficient_of(gens13, (0, 0, 1)) == 2
    return _ok(ok, "1 (n=2, k=6) and 2 (n=3, k=13)",
               "%s and %s" % (c6, g13.coefficient_of(gens13, (0, 0, 1))))


def _check_table_382(rng):
    built = _shared_table("f382")
    extracted = _shared_table("x13")
    ok = built.entries == extracted.entries and len(built.entries) == 261
    return _ok(ok, "261 entries, formula build equals extraction",
               "%d entries, equal=%s" % (len(built.entries),
                                         built.entries == extracted.entries))


def _chain_degree_counts(chain):
    counts = {}
    for alpha, _ in chain:
        counts[sum(alpha)] = counts.get(sum(alpha), 0) + 1
    top = max(counts)
    return tuple(counts.get(d, 0) for d in range(top + 1))


def _check_tables_d10(rng):
    t10 = _shared_table("x10")
    split = {}
    for chain, value in t10.entries.items():
        split.setdefault(_chain_degree_counts(chain), {})[chain] = value
    b271 = _shared_table("f271")
    b3601 = _shared_table("f3601")
    ok271 = b271.entries == split.get((2, 7, 1)) \
        and len(b271.entries) == 489
    ok3601 = b3601.entries == split.get((3, 6, 0, 1)) \
        and len(b3601.entries) == 480
    return _ok(ok271 and ok3601,
               "489 and 480 entries, formula builds equal extraction",
               "271: %s (%d); 3601: %s (%d)"
               % (ok271, len(b271.entries), ok3601, len(b3601.entries)))


def _check_contractions(rng):
    t13 = _shared_table("x13")
    t10 = _shared_table("x10")
    bad = 0
    for _ in range(20):
        a = _random_field(rng, 3, 1, homogeneous=True)
        X = _random_field(rng, 3, 2, homogeneous=True)
        Y = _random_field(rng, 3, 2, homogeneous=True)
        if forms.escort_table_eval(t13, "382", (a, X, Y)) \
                != two_form_to_field(forms.escort382(a, X, Y)):
            bad += 1
    for _ in range(50):
        u = _random_poly(rng, 3, 1, homogeneous=True)
        a = _random_field(rng, 3, 1, homogeneous=True)
        b = _random_field(rng, 3, 1, homogeneous=True)
        X = _random_field(rng, 3, 2, homogeneous=True)
        if forms.escort_table_eval(t10, "271", (u, a, b, X)) \
                != two_form_to_field(forms.escort271(u, a, b, X)):
            bad += 1
    for _ in range(50):
        a = _random_field(rng, 3, 1, homogeneous=True)
        b = _random_field(rng, 3, 1, homogeneous=True)
        c = _random_field(rng, 3, 1, homogeneous=True)
        X = _random_field(rng, 3, 3, homogeneous=True)
        if forms.escort_table_eval(t10, "3601", (a, b, c, X)) \
                != two_form_to_field(forms.escort3601(a, b, c, X)):
            bad += 1
    return _ok(bad == 0, "0 mismatches in 120 random contractions",
               "%d mismatches" % bad)


def _check_discrepancy_counts(rng):
    rep = forms.escort_discrepancies()
    got = {k: (v["basis_tuples_differing"], v["basis_tuples"])
           for k, v in rep.items()}
    want = {"271": (225, 1944), "3601": (96, 2520), "231": (8, 24),
            "3601_divfree": (34, 168)}
    return _ok(got == want, str(want), str(got))


def _check_gtable(rng):
    pairs = [(1, 2), (1, 3), (2, 3)]
    bad = 0
    for p1 in pairs:
        for p2 in pairs:
            for r in (1, 2, 3):
                a = _random_poly(rng, 3, 2, homogeneous=True, terms=3)
                b = _random_poly(rng, 3, 3, homogeneous=True, terms=3)
                ref = two_form_to_field(forms.escort382(
                    g_field(p1[0], p1[1], a), g_field(p2[0], p2[1], b),
                    forms.x_tilde(r))).scale(-1)
                if forms.g_table_eval(p1, p2, a, b, r) != ref:
                    bad += 1
    return _ok(bad == 0, "0 mismatches over 27 pair/axis combinations",
               "%d mismatches" % bad)


def _example_chains():
    """The four 13-field example chains and the 11-field one."""
    n = 3
    dels = [VectorField.coordinate(n, i) for i in (1, 2, 3)]
    x = [Polynomial.variable(n, i) for i in (1, 2, 3)]

    def f(i, poly):
        return VectorField.single(n, i, poly)

    gl8 = [f(j, x[i - 1]) for i in (1, 2, 3) for j in (1, 2, 3)
           if (i, j) != (3, 3)]
    prefix = dels + gl8
    ex = {
        "ex1": (prefix + [f(3, x[0] * x[1]), f(3, x[2] * x[2])],
                PolyDiffOp.zero(n)),
        "ex2": (prefix + [f(3, x[0] * x[2]), f(3, x[2] * x[2])],
                PolyDiffOp(n, {(0, 1, 0): Polynomial.constant(n, 6)})),
        "ex3": (prefix + [f(3, x[0] * x[2]), f(3, x[1] * x[2])],
                PolyDiffOp(n, {(0, 0, 1): Polynomial.constant(n, 6)})),
        "ex4": (prefix + [f(3, x[0] * x[2]), f(3, x[1] * x[2] * x[2])],
                PolyDiffOp(n, {(0, 1, 0): x[1].scale(6),
                               (0, 0, 1): x[2].scale(12)})),
    }
    s11 = dels + [f(1, x[0]) + f(3, x[2]).scale(-1), f(2, x[0]), f(3, x[0]),
                  f(1, x[1]), f(2, x[1]) + f(3, x[2]).scale(-1), f(3, x[1]),
                  f(1, x[2]), f(1, x[2] * x[2])]
    return ex, s11


def _check_thirteen_examples(rng):
    table = _shared_table("f382")
    ex, _ = _example_chains()
    bad = []
    for name, (fields, want) in ex.items():
        env = s_k_envelope(fields)
        via = s_k_via_escort(table, fields)
        if env != want or via != want:
            bad.append(name)
    return _ok(not bad, "0, 6*d2, 6*d3, 6*x2*d2 + 12*x3*d3 by both methods",
               "failures: %s" % (bad or "none"))


def _check_eleven_example(rng):
    _, s11 = _example_chains()
    got = s_k_envelope(s11)
    want = PolyDiffOp(3, {(2, 0, 0): Polynomial.constant(3, 80)})
    return _ok(got == want, "80*d1d1", render_field(got))


def _check_table_231(rng):
    built = _shared_table("f231")
    extracted = _shared_table("x6")
    ok = built.entries == extracted.entries and len(built.entries) == 14
    return _ok(ok, "14 entries, formula build equals extraction",
               "%d entries, equal=%s" % (len(built.entries),
                                         built.entries == extracted.entries))


def _check_six_commutator(rng):
    table = _shared_table("f231")
    pool = sorted({entry for chain in escort_extract(2, 6).entries
                   for entry in chain})
    bad = 0
    for _ in range(50):
        chain = sorted(rng.sample(pool, 6))
        fields = chain_fields(2, chain)
        if s_k_brute(fields) != s_k_via_escort(table, fields):
            bad += 1
    return _ok(bad == 0, "0 mismatches on 50 random basis chains",
               "%d mismatches" % bad)


def _check_five_commutator_divfree(rng):
    quads = [Polynomial.monomial(2, a) for a in ((2, 0), (1, 1), (0, 2))]
    cubics = [Polynomial.monomial(2, a)
              for a in ((3, 0), (2, 1), (1, 2), (0, 3))]
    dels = [VectorField.coordinate(2, 1), VectorField.coordinate(2, 2)]
    bad = 0
    for miss in range(3):
        kept = [q for t, q in enumerate(quads) if t != miss]
        for cubic in cubics:
            chain = dels + [g_field(1, 2, q) for q in kept] \
                + [g_field(1, 2, cubic)]
            brute = s_k_brute(chain)
            esc = forms.divfree_s5_from_escort(quads[miss], cubic)
            if esc.as_diffop() != brute:
                bad += 1
    return _ok(bad == 0, "0 mismatches on the 12 basis chains",
               "%d mismatches" % bad)


def _check_degenerate_powers(rng):
    ok = (not d_power(2, 7).terms
          and not d_power(2, 6, divfree=True).terms
          and not d_power(2, 7, divfree=True).terms)
    return _ok(ok, "D^7 = 0 at n=2; divergence-free D^6 = D^7 = 0",
               "ok" if ok else "nonzero")


def _check_action_derivation(rng):
    bad = 0
    for n, trials in ((2, 10), (3, 5)):
        for _ in range(trials):
            X = _random_operator(rng, n)
            Y = _random_operator(rng, n)
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    lhs = compose(X, Y).gln_action(i, j)
                    rhs = compose(X.gln_action(i, j), Y) \
                        + compose(X, Y.gln_action(i, j))
                    if lhs != rhs:
                        bad += 1
    return _ok(bad == 0, "Leibniz over composition on 15 random pairs",
               "%d violations" % bad)


def _extended_ladder(n, kmax):
    E = order_one_power(n, 1)
    P = E
    out = [(1, len(P.terms), pdeg_json(P.pdeg()))]
    for k in range(2, kmax + 1):
        P = E * P
        out.append((k, len(P.terms), pdeg_json(P.pdeg())))
    return out


def _check_extended_ladder_n2(rng):
    got = _extended_ladder(2, 9)
    counts = [t for _, t, _ in got]
    orders = [p for _, _, p in got]
    ok = counts == [3, 6, 22, 33, 81, 34, 48, 0, 0] \
        and orders == [1, 1, 2, 2, 2, 1, 1, "-inf", "-inf"]
    return _ok(ok, "terms 3 6 22 33 81 34 48 0 0; orders"
               " 1 1 2 2 2 1 1 -inf -inf",
               "terms %s; orders %s" % (_fmt_row(counts), _fmt_row(orders)))


def _check_extended_orders_n2(rng):
    lad = _extended_ladder(2, 9)
    e7, e8, e9 = lad[6], lad[7], lad[8]
    ok = e7[2] != "-inf" and e7[2] <= 1 and e8[1] == 0 and e9[1] == 0
    return _ok(ok, "7th power of order <= 1; 8th and 9th vanish"
               " (the 8th cancels outright, so no order-0 remnant exists)",
               "7th order %s; term counts %d, %d" % (e7[2], e8[1], e9[1]))


def _check_extended_ladder_n3(rng):
    lad = _extended_ladder(3, 16)
    got = [lad[13], lad[14], lad[15]]
    want = [(14, 261, 0), (15, 261, 0), (16, 0, "-inf")]
    return _ok(got == want, str(want), str(got))


SUITES = {
    "products": [
        ("products/01-product-splits",
         "composition is the sum of its contraction and coefficient parts",
         _check_product_split),
        ("products/02-compose-associative",
         "composition is associative on random operators",
         _check_compose_assoc),
        ("products/03-bullet-laws",
         "the bullet product is associative and supercommutative",
         _check_bullet_laws),
        ("products/04-circ-left-symmetric",
         "the circ associator on order-<=1 operators is supersymmetric"
         " in its first two slots",
         _check_circ_left_symmetric),
        ("products/05-circ-derives-bullet",
         "order-<=1 operators act on bullet products as signed derivations",
         _check_circ_derives_bullet),
        ("products/06-gradings-additive",
         "generator count and total weight add under compose and bullet",
         _check_grading_additive),
        ("products/07-type-bounds",
         "every term of D^10 (n=3) respects the per-weight generator"
         " count bounds",
         _check_type_bounds),
    ],
    "lemmas": [
        ("lemmas/01-square",
         "the square of the odd derivation is its contraction square",
         _check_square),
        ("lemmas/02-even-circ-powers",
         "even circ powers of D collapse to circ powers of F",
         _check_even_circ_powers),
        ("lemmas/03-bullet-contraction",
         "contracting F into its bullet powers peels one factor",
         _check_bullet_contraction),
        ("lemmas/04-fourth-power",
         "D^4 decomposes into circ and bullet squares of F",
         _check_fourth_power),
        ("lemmas/05-sixth-power",
         "D^6 decomposes with coefficients 1, 3, 1",
         _check_sixth_power),
        ("lemmas/06-eighth-power",
         "D^8 decomposes with coefficients 1, 3, 4, 6, 1",
         _check_eighth_power),
        ("lemmas/07-tenth-power",
         "D^10 decomposes with the duplicated middle coefficient"
         " reconciled to 10",
         _check_tenth_power),
        ("lemmas/08-bullet-powers-vanish",
         "bullet powers of F die past the variable count",
         _check_bullet_powers_vanish),
        ("lemmas/09-eta-socle",
         "F contracts to zero against multiples of the full eta product",
         _check_eta_socle),
        ("lemmas/10-vanishing-combos",
         "three circ/bullet combinations in F vanish at n=3",
         _check_vanishing_combos),
        ("lemmas/11-order-split",
         "the order-1 part of D^10 is exactly F^{o5}",
         _check_order_split),
        ("lemmas/12-linear-invariance",
         "the gl_3 action annihilates D^k for k in {2,5,10,13}",
         _check_linear_invariance),
    ],
    "tables": [
        ("tables/01-full-row-n2",
         "derivative orders of D^1..D^7 at n=2",
         _check_row_n2),
        ("tables/02-full-row-n3",
         "derivative orders of D^1..D^14 at n=3 (the k=8 entry"
         " computes to 2)",
         _check_row_n3),
        ("tables/03-divfree-row-n2",
         "divergence-free derivative orders of D^1..D^7 at n=2",
         _check_row_n2_divfree),
        ("tables/04-divfree-row-n3",
         "divergence-free derivative orders of D^1..D^14 at n=3",
         _check_row_n3_divfree),
    ],
    "counts": [
        ("counts/01-ten-power-split",
         "D^10 (n=3) holds 4062 terms split 489/3093/480 by type",
         _check_ten_power_split),
        ("counts/02-thirteen-power",
         "D^13 (n=3) holds 261 terms, all of type (3,8,2)",
         _check_thirteen_power),
        ("counts/03-divfree-ten-split",
         "divergence-free D^10 holds 864 terms split 82/706/76",
         _check_divfree_ten_split),
        ("counts/04-divfree-tail",
         "divergence-free powers 11..14 and the divergence of the 10th",
         _check_divfree_tail),
        ("counts/05-projection-counts",
         "the six eta projections of F^{o3} count 15/8/8/76/76/71 terms",
         _check_projection_counts),
        ("counts/06-bullet-square-rows",
         "the three order-2 projections of F^{.2} are single terms at -2",
         _check_bullet_square_rows),
        ("counts/07-designated-coefficients",
         "the designated coefficients of D^6 (n=2) and D^13 (n=3)"
         " are 1 and 2",
         _check_designated_coefficients),
    ],
    "escorts": [
        ("escorts/01-table-382",
         "the closed (3,8,2) formula rebuilds the extracted 13th-power"
         " table",
         _check_table_382),
        ("escorts/02-tables-271-3601",
         "the closed (2,7,1) and (3,6,0,1) formulas rebuild the"
         " 10th-power tables",
         _check_tables_d10),
        ("escorts/03-contractions-random",
         "table contractions equal the closed formulas on random"
         " arguments",
         _check_contractions),
        ("escorts/04-discrepancy-counts",
         "the transcribed-formula discrepancy counts are stable",
         _check_discrepancy_counts),
        ("escorts/05-gtable-relabeling",
         "component-table lookups match the closed formula on all"
         " pair/axis combinations",
         _check_gtable),
        ("escorts/06-thirteen-examples",
         "the four 13-field example chains agree by envelope and escort",
         _check_thirteen_examples),
        ("escorts/07-eleven-example",
         "the 11-field example chain evaluates to 80*d1d1",
         _check_eleven_example),
    ],
    "n2": [
        ("n2/01-table-231",
         "the closed n=2 formula rebuilds the extracted 6th-power table",
         _check_table_231),
        ("n2/02-six-commutator-random",
         "table expansion equals brute force on random 6-tuples",
         _check_six_commutator),
        ("n2/03-five-commutator-divfree",
         "the divergence-free 5-commutator formula matches brute force"
         " on all 12 basis chains",
         _check_five_commutator_divfree),
        ("n2/04-degenerate-powers",
         "D^7 vanishes at n=2; divergence-free D^6 and D^7 vanish",
         _check_degenerate_powers),
    ],
    "gln": [
        ("gln/01-power-invariance",
         "the gl_3 action annihilates D^k for k in {2,5,10,13}",
         _check_linear_invariance),
        ("gln/02-action-derivation",
         "the linear action is a derivation of composition",
         _check_action_derivation),
        ("gln/03-gtable-relabeling",
         "component-table lookups match the closed formula on all"
         " pair/axis combinations",
         _check_gtable),
    ],
    "diff1": [
        ("diff1/01-ladder-n2",
         "term counts and orders of the extended powers at n=2",
         _check_extended_ladder_n2),
        ("diff1/02-order-claims-n2",
         "the 7th extended power has order <= 1; the 8th and 9th vanish",
         _check_extended_orders_n2),
        ("diff1/03-ladder-tail-n3",
         "extended powers 14..16 at n=3: 261, 261, 0 terms",
         _check_extended_ladder_n3),
    ],
}

SUITE_ORDER = ["products", "lemmas", "tables", "counts", "escorts",
               "n2", "gln", "diff1"]


def _worker_count():
    raw = os.environ.get("NCOMMUTE_THREADS", "")
    try:
        workers = int(raw)
    except ValueError:
        workers = 0
    if workers < 1:
        workers = os.cpu_count() or 1
    return workers


def run_verify(suite, seed, as_json=False, out=None):
    if out is None:
        out = sys.stdout
    if suite == "all":
        names = SUITE_ORDER
    elif suite in SUITES:
        names = [suite]
    else:
        raise CliError("unknown suite %r" % suite)
    checks = [item for name in names for item in SUITES[name]]

    def call(item):
        cid, claim, fn = item
        rng = random.Random("%s:%s" % (seed, cid))
        try:
            ok, expected, actual = fn(rng)
        except Exception as exc:
            ok, expected = False, "no exception"
            actual = "%s: %s" % (type(exc).__name__, exc)
        return cid, claim, ok, expected, actual

    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        results = list(pool.map(call, checks))
    elapsed = time.perf_counter() - t0
    passed = sum(1 for r in results if r[2])
    if as_json:
        doc = {"suite": suite, "seed": seed,
               "passed": passed == len(results),
               "checks": [{"id": cid, "claim": claim,
                           "status": "pass" if ok else "fail",
                           "expected": expected, "actual": actual}
                          for cid, claim, ok, expected, actual in results],
               "elapsed_seconds": round(elapsed, 3)}
        print(json.dumps(doc, indent=2), file=out)
    else:
        for cid, claim, ok, expected, actual in results:
            print("%s  %-32s %s" % ("PASS" if ok else "FAIL", cid, claim),
                  file=out)
            print("      expected: %s" % expected, file=out)
            print("      actual:   %s" % actual, file=out)
        print("verify %s: %d/%d passed (%.1fs)"
              % (suite, passed, len(results), elapsed), file=out)
    return 0 if passed == len(results) else 1


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_dpow(args):
    X = d_power(args.n, args.k, args.divfree)
    if args.coeff:
        gens, dpart = parse_generator_monomial(args.coeff, args.n)
        value = X.coefficient_of(gens, dpart)
        if args.json:
            print(json.dumps({"n": args.n, "k": args.k,
                              "divfree": args.divfree,
                              "monomial": args.coeff,
                              "coeff": str(value)}))
        else:
            print(value)
        return 0
    if args.stats:
        doc = stats_json(X, args.k)
        if args.divfree:
            doc["divfree"] = True
        if args.json:
            print(json.dumps(doc))
        else:
            print("n=%d k=%d pdeg=%s terms_total=%d"
                  % (doc["n"], doc["k"], doc["pdeg"], doc["terms_total"]))
            for label, count in doc["by_type"].items():
                print("  %s: %d" % (label, count))
        return 0
    if args.json:
        print(json.dumps({"n": args.n, "k": args.k, "divfree": args.divfree,
                          "pdeg": pdeg_json(X.pdeg()),
                          "terms": X.render()}))
    else:
        print(X.render())
    return 0


def _cmd_ncomm(args):
    fields = read_field_file(args.fields, args.n)
    if len(fields) != args.k:
        raise CliError("expected %d fields for --k %d, %s has %d"
                       % (args.k, args.k, args.fields, len(fields)))
    if args.method == "brute":
        if args.k > PERMUTATION_CAP:
            raise CliError("brute method is capped at k=%d; use envelope"
                           % PERMUTATION_CAP)
        result = s_k_brute(fields)
    elif args.method == "envelope":
        result = s_k_envelope(_as_vector_fields(fields))
    elif args.method == "escort":
        table = escort_extract(args.n, args.k)
        result = s_k_via_escort(table, _as_vector_fields(fields))
    else:
        try:
            result = s_k_circ(fields)
        except (TypeError, ValueError) as exc:
            raise CliError(str(exc))
    text = render_field(result)
    if args.json:
        terms = sum(len(p.terms) for p in result.terms.values())
        print(json.dumps({"n": args.n, "k": args.k, "method": args.method,
                          "result": text,
                          "pdeg": pdeg_json(result.pdeg()),
                          "terms": terms}))
    else:
        print(text)
    return 0


def _escort_lines(path, n):
    try:
        with open(path) as fh:
            raw = fh.read()
    except OSError as exc:
        raise CliError(str(exc))
    out = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        m = _HEADER.fullmatch(s)
        if m and not out:
            declared = int(m.group(1))
            if declared != n:
                print("warning: %s declares n=%d; the escort variant"
                      " fixes n=%d" % (path, declared, n), file=sys.stderr)
            continue
        out.append((lineno, s))
    return out


def _escort_field(path, lineno, text, n, degree, name):
    try:
        fld = parse_field(text, n).as_field()
        forms._check_grade(name, fld, degree)
        return fld
    except (FieldSyntaxError, ValueError) as exc:
        raise CliError("%s, line %d: %s" % (path, lineno, exc))


def _cmd_escort(args):
    name = args.name
    n = 2 if name in ("231", "221") else 3
    lines = _escort_lines(args.args, n)

    def need(count, what):
        if len(lines) != count:
            raise CliError("escort %s needs %s (%d lines), %s has %d"
                           % (name, what, count, args.args, len(lines)))

    if name == "382":
        need(3, "fields a, X, Y")
        a = _escort_field(args.args, lines[0][0], lines[0][1], n, 1, "a")
        X = _escort_field(args.args, lines[1][0], lines[1][1], n, 2, "X")
        Y = _escort_field(args.args, lines[2][0], lines[2][1], n, 2, "Y")
        form = forms.escort382(a, X, Y)
        field = two_form_to_field(form)
    elif name == "271":
        need(4, "a polynomial u and fields a, b, X")
        try:
            u = parse_poly(lines[0][1], n)
        except FieldSyntaxError as exc:
            raise CliError("%s, line %d: %s" % (args.args, lines[0][0], exc))
        a = _escort_field(args.args, lines[1][0], lines[1][1], n, 1, "a")
        b = _escort_field(args.args, lines[2][0], lines[2][1], n, 1, "b")
        X = _escort_field(args.args, lines[3][0], lines[3][1], n, 2, "X")
        try:
            form = forms.escort271(u, a, b, X)
        except ValueError as exc:
            raise CliError(str(exc))
        field = two_form_to_field(form)
    elif name == "3601":
        need(4, "fields a, b, c, X")
        a = _escort_field(args.args, lines[0][0], lines[0][1], n, 1, "a")
        b = _escort_field(args.args, lines[1][0], lines[1][1], n, 1, "b")
        c = _escort_field(args.args, lines[2][0], lines[2][1], n, 1, "c")
        X = _escort_field(args.args, lines[3][0], lines[3][1], n, 3, "X")
        form = forms.escort3601(a, b, c, X)
        field = two_form_to_field(form)
    elif name in ("231", "221"):
        need(2, "fields a, X")
        a = _escort_field(args.args, lines[0][0], lines[0][1], n, 1, "a")
        X = _escort_field(args.args, lines[1][0], lines[1][1], n, 2, "X")
        form = forms.escort231(a, X) if name == "231" \
            else forms.escort221(a, X)
        field = forms.one_form_to_field(form)
    elif name == "gtable":
        values = {}
        polys = {}
        for lineno, s in lines:
            if "=" not in s:
                raise CliError("%s, line %d: expected key=value" %
                               (args.args, lineno))
            key, _, rest = s.partition("=")
            key = key.strip()
            rest = rest.strip()
            if key in ("pair1", "pair2"):
                m = re.fullmatch(r"(\d)\s*,\s*(\d)", rest)
                if m is None:
                    raise CliError("%s, line %d: %s wants 'i,j'"
                                   % (args.args, lineno, key))
                values[key] = (int(m.group(1)), int(m.group(2)))
            elif key == "r":
                values[key] = int(rest)
            elif key in ("a", "b"):
                try:
                    polys[key] = parse_poly(rest, 3)
                except FieldSyntaxError as exc:
                    raise CliError("%s, line %d: %s"
                                   % (args.args, lineno, exc))
            else:
                raise CliError("%s, line %d: unknown key %r"
                               % (args.args, lineno, key))
        missing = {"pair1", "pair2", "r", "a", "b"} \
            - set(values) - set(polys)
        if missing:
            raise CliError("escort gtable needs keys pair1, pair2, r, a, b;"
                           " missing %s" % ", ".join(sorted(missing)))
        try:
            field = forms.g_table_eval(values["pair1"], values["pair2"],
                                       polys["a"], polys["b"], values["r"])
        except (KeyError, ValueError) as exc:
            raise CliError(str(exc))
        form = None
    else:
        raise CliError("unknown escort %r" % name)

    if args.dump_table:
        builders = {"382": "f382", "271": "f271", "3601": "f3601",
                    "231": "f231"}
        if name not in builders:
            raise CliError("no identification table for escort %s" % name)
        with open(args.dump_table, "w") as fh:
            fh.write(_shared_table(builders[name]).to_jsonl())

    field_text = render_field(field.as_diffop())
    if args.json:
        doc = {"name": name, "field": field_text}
        if form is not None:
            doc["form"] = form.render()
        print(json.dumps(doc))
    else:
        if form is not None:
            print("form:  %s" % form.render())
        print("field: %s" % field_text)
    return 0


def _cmd_verify(args):
    return run_verify(args.suite, args.seed, as_json=args.json)


def _parse_k_range(text):
    m = re.fullmatch(r"(\d+):(\d+)", text)
    if m is None:
        raise CliError("bad --k-range %r; expected A:B" % text)
    a, b = int(m.group(1)), int(m.group(2))
    if a < 1 or b < a:
        raise CliError("bad --k-range %r; need 1 <= A <= B" % text)
    return a, b


def bench_compare(n, k, trials, seed):
    """Time brute against envelope on identical random tuples.

    Results are asserted equal before timing is reported; above the
    permutation cap only the envelope column is produced.
    """
    rows = []
    for trial in range(1, trials + 1):
        rng = random.Random("%s:%d:%d" % (seed, k, trial))
        fields = [_random_field(rng, n, 2) for _ in range(k)]
        t0 = time.perf_counter()
        env = s_k_envelope(fields)
        t_env = time.perf_counter() - t0
        row = {"n": n, "k": k, "trial": trial,
               "envelope_seconds": round(t_env, 6),
               "terms": sum(len(p.terms) for p in env.terms.values()),
               "brute_seconds": None, "equal": None}
        if k <= PERMUTATION_CAP:
            t0 = time.perf_counter()
            brute = s_k_brute(fields)
            row["brute_seconds"] = round(time.perf_counter() - t0, 6)
            row["equal"] = brute == env
        rows.append(row)
    return rows


def _cmd_bench(args):
    lo, hi = _parse_k_range(args.k_range)
    rows = []
    for k in range(lo, hi + 1):
        rows.extend(bench_compare(args.n, k, args.trials, args.seed))
    failed = any(r["equal"] is False for r in rows)
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        for r in rows:
            if r["brute_seconds"] is None:
                left = "brute refused (cap %d)" % PERMUTATION_CAP
            else:
                left = "brute %.4fs" % r["brute_seconds"]
            tag = {True: "equal", False: "MISMATCH", None: ""}[r["equal"]]
            print("n=%d k=%d trial=%d: %s, envelope %.4fs, %d result"
                  " terms%s" % (r["n"], r["k"], r["trial"], left,
                                r["envelope_seconds"], r["terms"],
                                ", " + tag if tag else ""))
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# argument parsing and entry points
# ---------------------------------------------------------------------------

def build_arg_parser():
    parser = argparse.ArgumentParser(
        prog="ncommute",
        description="powers of the odd derivation and N-commutators"
                    " of polynomial fields")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dpow", help="k-th power of the odd derivation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--divfree", action="store_true",
                   help="reduce modulo the divergence relation")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--stats", action="store_true",
                       help="term counts by type instead of the terms")
    group.add_argument("--coeff", metavar="MONO",
                       help="one coefficient, e.g. 'h1,d1(h2);d2'")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_dpow)

    p = sub.add_parser("ncomm", help="k-commutator of the fields in a file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--fields", required=True, metavar="FILE")
    p.add_argument("--method", required=True,
                   choices=["brute", "envelope", "escort", "circ"])
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_ncomm)

    p = sub.add_parser("escort", help="evaluate a closed escort formula")
    p.add_argument("--name", required=True,
                   choices=["382", "271", "3601", "231", "221", "gtable"])
    p.add_argument("--args", required=True, metavar="FILE")
    p.add_argument("--dump-table", metavar="PATH",
                   help="also write the identification table as JSONL")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_escort)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True,
                   choices=SUITE_ORDER + ["all"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="brute vs envelope timings")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-range", required=True, metavar="A:B")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_bench)
    return parser


def run(argv=None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except FieldSyntaxError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
