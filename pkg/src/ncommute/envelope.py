"""Evaluation methods for the N-commutator s_k of concrete vector fields.

Three independent routes are implemented:

  * s_k_brute     -- the defining sum over all k! permutations (the oracle),
  * s_k_envelope  -- one power of a single odd element in Q[x] tensor Gr_k,
  * s_k_via_escort-- reconstruction from the universal D^k coefficient table.

plus s_k_circ (the right-nested left-symmetric variant) and the order-one
operator mode used for the extended-algebra nilpotency statements.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import factorial

from .grassmann import pack_generator, unpack_generator
from .diffop import SuperDiffOp, d_power
from .witt import Polynomial, VectorField, PolyDiffOp, circ_field

PERMUTATION_CAP = 9


def _as_diffop(field) -> PolyDiffOp:
    if isinstance(field, VectorField):
        return field.as_diffop()
    if isinstance(field, PolyDiffOp):
        return field
    raise TypeError("expected a VectorField or PolyDiffOp")


def s_k_brute(fields, cap: int = PERMUTATION_CAP) -> PolyDiffOp:
    """Skew-symmetrized sum of all k! composition products.

    Shares permutation prefixes: the recursion keeps one running left
    product per prefix instead of recomposing each permutation from scratch.
    """
    ops = [_as_diffop(f) for f in fields]
    k = len(ops)
    if k == 0:
        raise ValueError("need at least one field")
    n = ops[0].n
    if k > cap:
        raise ValueError(
            f"{k}! permutations exceed the cap ({cap}); use s_k_envelope")
    total = PolyDiffOp.zero(n)

    def walk(prefix: PolyDiffOp, remaining: tuple, sign: int):
        nonlocal total
        if not remaining:
            total = total + (prefix if sign > 0 else -prefix)
            return
        for pos, idx in enumerate(remaining):
            nxt = prefix.compose(ops[idx]) if prefix is not None else ops[idx]
            if nxt.is_zero():
                continue
            walk(nxt, remaining[:pos] + remaining[pos + 1:],
                 sign * (-1) ** pos)

    walk(None, tuple(range(k)), 1)
    return total


def s_k_circ(fields) -> PolyDiffOp:
    """Right-nested left-symmetric skew sum over permutations.

    Memoized over subsets: the inner sum for a subset S is
    sum over heads i in S of (-1)^rank(i) X_i o T(S minus i).
    """
    vfs = []
    for f in fields:
        if isinstance(f, PolyDiffOp):
            f = f.as_field()
        if not isinstance(f, VectorField):
            raise TypeError("s_k_circ needs first-order fields")
        vfs.append(f)
    k = len(vfs)
    if k == 0:
        raise ValueError("need at least one field")
    n = vfs[0].n

    cache: dict = {}

    def nested(subset: int):
        got = cache.get(subset)
        if got is not None:
            return got
        members = [i for i in range(k) if subset >> i & 1]
        if len(members) == 1:
            result = vfs[members[0]]
        else:
            result = VectorField.zero(n)
            for rank, i in enumerate(members):
                inner = nested(subset & ~(1 << i))
                piece = circ_field(vfs[i], inner)
                result = result + (piece if rank % 2 == 0 else -piece)
        cache[subset] = result
        return result

    return nested((1 << k) - 1).as_diffop()


# ---------------------------------------------------------------------------
# envelope method: one odd element of Q[x] (x) Gr_k
# ---------------------------------------------------------------------------

class EnvelopeElement:
    """Operator over the Grassmann envelope.

    terms: (xpart multi-index, eta bitmask, dpart multi-index) -> Fraction.
    Bit p-1 of the mask stands for eta_p; masks are the exterior monomials.
    """

    __slots__ = ("n", "k", "terms")

    def __init__(self, n: int, k: int, terms=None):
        self.n = n
        self.k = k
        self.terms = {key: Fraction(c) for key, c in (terms or {}).items() if c}

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "EnvelopeElement") -> "EnvelopeElement":
        out = dict(self.terms)
        for key, c in other.terms.items():
            v = out.get(key, 0) + c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return EnvelopeElement(self.n, self.k, out)


def _mask_mul_sign(a: int, b: int) -> int:
    """Sign of eta^a * eta^b when both are sorted exterior monomials."""
    if a & b:
        return 0
    sign = 1
    rest = a
    while rest:
        low = rest & -rest
        # each eta in b below this one contributes a transposition
        if (b & (low - 1)).bit_count() % 2:
            sign = -sign
        rest ^= low
    return sign


def lift_fields(fields) -> tuple:
    """F = sum_p X_p (x) eta_p as a list of first-order envelope terms.

    Returns (n, k, rows) where rows hold (axis i, xpart, mask, coeff).
    """
    vfs = list(fields)
    k = len(vfs)
    n = vfs[0].n
    rows = []
    for p, X in enumerate(vfs, start=1):
        if not isinstance(X, VectorField):
            X = X.as_field()
        for i, comp in enumerate(X.comps, start=1):
            for a, c in comp.terms.items():
                rows.append((i, a, 1 << (p - 1), c))
    return n, k, rows


def _left_mul_lift(rows, Z: EnvelopeElement) -> EnvelopeElement:
    """(sum_i f_i d_i) composed with Z, for the first-order lift F."""
    n, k = Z.n, Z.k
    out: dict = {}
    for (b, mask2, beta), c in Z.terms.items():
        for i, a, mask1, coef in rows:
            sign = _mask_mul_sign(mask1, mask2)
            if not sign:
                continue
            base = coef * c * sign
            # derivative hits the coefficient: f_i d_i(x^b eta) d^beta
            e = b[i - 1]
            if e:
                key = (tuple(x + y for x, y in zip(a, b[:i - 1] + (e - 1,) + b[i:])),
                       mask1 | mask2, beta)
                v = out.get(key, 0) + base * e
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
            # derivative passes through: f_i x^b eta d^(beta+e_i)
            key = (tuple(x + y for x, y in zip(a, b)), mask1 | mask2,
                   beta[:i - 1] + (beta[i - 1] + 1,) + beta[i:])
            v = out.get(key, 0) + base
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return EnvelopeElement(n, k, out)


def s_k_envelope(fields) -> PolyDiffOp:
    """Evaluate s_k as the top Grassmann coefficient of F^k."""
    n, k, rows = lift_fields(fields)
    zero = tuple(0 for _ in range(n))
    power = EnvelopeElement(n, k, {})
    for i, a, mask, c in rows:
        key = (a, mask, zero[:i - 1] + (1,) + zero[i:])
        power.terms[key] = power.terms.get(key, 0) + Fraction(c)
    for _ in range(k - 1):
        power = _left_mul_lift(rows, power)
    full = (1 << k) - 1
    out: dict = {}
    for (a, mask, beta), c in power.terms.items():
        if mask != full:
            continue
        poly = out.setdefault(beta, {})
        poly[a] = poly.get(a, 0) + c
    return PolyDiffOp(n, {beta: Polynomial(n, poly)
                          for beta, poly in out.items()})


# ---------------------------------------------------------------------------
# escort tables: the universal D^k coefficients, read back through supports
# ---------------------------------------------------------------------------

class EscortTable:
    """esc(s_k) on sorted support chains of divided-power basis fields.

    entries: chain -> (mu, coef); a chain is a sorted tuple of (alpha, i)
    pairs standing for x^(alpha) d_i with x^(alpha) = x^alpha / alpha!.
    """

    __slots__ = ("n", "k", "entries")

    def __init__(self, n: int, k: int, entries=None):
        self.n = n
        self.k = k
        self.entries = dict(entries or {})

    def __len__(self):
        return len(self.entries)

    def value(self, chain):
        return self.entries.get(tuple(chain))

    def chains_by_signature(self) -> dict:
        out: dict = {}
        for chain in self.entries:
            sig: dict = {}
            for alpha, _ in chain:
                w = sum(alpha) - 1
                sig[w] = sig.get(w, 0) + 1
            top = max(sig)
            key = tuple(sig.get(w, 0) for w in range(-1, top + 1))
            out.setdefault(key, []).append(chain)
        return out

    def to_jsonl(self) -> str:
        lines = []
        for chain in sorted(self.entries):
            mu, coef = self.entries[chain]
            lines.append(json.dumps({
                "chain": [["(" + ",".join(str(a) for a in alpha) + ")", i]
                          for alpha, i in chain],
                "value": {"mu": "(" + ",".join(str(m) for m in mu) + ")",
                          "coef": str(coef)},
            }))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_jsonl(cls, n: int, k: int, text: str) -> "EscortTable":
        entries = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            chain = tuple(
                (tuple(int(t) for t in spec.strip("()").split(",")), i)
                for spec, i in rec["chain"])
            mu = tuple(int(t) for t in rec["value"]["mu"].strip("()").split(","))
            entries[chain] = (mu, Fraction(rec["value"]["coef"]))
        return cls(n, k, entries)


def chain_sort_key(n: int, alpha, i: int) -> int:
    return pack_generator(n, i, alpha)


def escort_extract(n: int, k: int, divfree: bool = False) -> EscortTable:
    """Read esc(s_k) off the universal D^k: one entry per stored monomial."""
    X = d_power(n, k, divfree=divfree)
    entries = {}
    for (mono, dpart), coef in X.terms.items():
        chain = tuple(unpack_generator(n, g) for g in mono)
        entries[chain] = (dpart, Fraction(coef))
    return EscortTable(n, k, entries)


def _e_vector(chain_entry, fields):
    """E-coefficients of one chain slot against every input field.

    For the divided-power key x^(alpha) d_i the coefficient on v d_j is
    delta_ij d^alpha(v), with no alpha! division.
    """
    alpha, i = chain_entry
    out = []
    for X in fields:
        out.append(X.comps[i - 1].multi_partial(alpha))
    return out


def s_k_via_escort(table: EscortTable, fields) -> PolyDiffOp:
    """Reconstruct s_k(fields) from the escort table by the E-expansion.

    Each chain contributes det[E_q(X_p)] times its stored value; the
    determinant is accumulated as a wedge product over field subsets so
    sparse rows cost little.
    """
    vfs = [f if isinstance(f, VectorField) else f.as_field() for f in fields]
    k = len(vfs)
    if k != table.k:
        raise ValueError("field count does not match table arity")
    n = table.n
    acc: dict = {}
    for chain, (mu, coef) in table.entries.items():
        state = {0: Polynomial.one(n)}
        for entry in chain:
            col = _e_vector(entry, vfs)
            nxt: dict = {}
            for mask, poly in state.items():
                for p in range(k):
                    bit = 1 << p
                    if mask & bit:
                        continue
                    val = col[p]
                    if val.is_zero():
                        continue
                    sign = -1 if (mask >> (p + 1)).bit_count() % 2 else 1
                    piece = (poly * val).scale(sign)
                    got = nxt.get(mask | bit)
                    s = piece if got is None else got + piece
                    if s:
                        nxt[mask | bit] = s
                    else:
                        nxt.pop(mask | bit, None)
            state = nxt
            if not state:
                break
        det = state.get((1 << k) - 1)
        if det is None or det.is_zero():
            continue
        piece = det.scale(coef)
        got = acc.get(mu)
        s = piece if got is None else got + piece
        if s:
            acc[mu] = s
        else:
            acc.pop(mu, None)
    return PolyDiffOp(n, acc)


def divided_field(n: int, alpha, i: int) -> VectorField:
    """The basis field x^(alpha) d_i a chain entry stands for."""
    return VectorField.single(n, i, Polynomial.divided(n, alpha))


def chain_fields(n: int, chain) -> list:
    return [divided_field(n, alpha, i) for alpha, i in chain]


# ---------------------------------------------------------------------------
# order-one operator mode: E = eta_0 + sum eta_i d_i
# ---------------------------------------------------------------------------

def order_one_power(n: int, k: int) -> SuperDiffOp:
    """k-th power of eta_0 + D in the algebra extended by an odd scalar."""
    zero_alpha = tuple(0 for _ in range(n))
    eta0 = SuperDiffOp.single(n, (pack_generator(n, 0, zero_alpha),),
                              zero_alpha)
    E = eta0 + SuperDiffOp.zero(n)
    for i in range(1, n + 1):
        dpart = tuple(1 if t == i else 0 for t in range(1, n + 1))
        E = E + SuperDiffOp.single(n, (pack_generator(n, i, zero_alpha),), dpart)
    power = E
    for _ in range(k - 1):
        power = E * power
    return power
