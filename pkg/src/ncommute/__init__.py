"""Exact calculus for odd-coordinate differential operators and N-commutators."""

from .grassmann import SuperPolynomial, NEG_INF
from .diffop import SuperDiffOp, odd_derivation, d_power

__all__ = [
    "SuperPolynomial",
    "SuperDiffOp",
    "NEG_INF",
    "odd_derivation",
    "d_power",
]
