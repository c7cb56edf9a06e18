"""Exact rationals and the bridge to sympy's QQ domain."""

from fractions import Fraction
from typing import List, Sequence, Union

import sympy
from sympy import Poly, QQ

Rat = Fraction
RatLike = Union[int, str, Fraction, sympy.Rational]


def to_rat(value: RatLike) -> Fraction:
    """Convert ints, "p/q" strings, Fractions and sympy rationals to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, sympy.Basic):
        if not value.is_Rational:
            raise TypeError(f"not an exact rational: {value}")
        return Fraction(int(value.p), int(value.q))
    # gmpy2 / PythonMPQ domain elements
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot convert {value!r} to a rational")


def format_rat(value: Fraction) -> str:
    """Canonical text form: "p" for integers, "p/q" otherwise."""
    return str(value)


def to_sympy(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def poly_from_coeffs(coeffs: Sequence[RatLike], gen: sympy.Symbol) -> Poly:
    """Build a QQ polynomial from coefficients listed from degree 0 upward."""
    high_first = [to_sympy(to_rat(c)) for c in reversed(list(coeffs))] or [sympy.Integer(0)]
    return Poly(high_first, gen, domain=QQ)


def poly_coeffs(poly: Poly) -> List[Fraction]:
    """Coefficients of a univariate polynomial from degree 0 upward."""
    if poly.is_zero:
        return []
    return [to_rat(c) for c in reversed(poly.all_coeffs())]


def eval_coeffs(coeffs: Sequence[Fraction], x: Union[int, Fraction]) -> Fraction:
    """Horner evaluation of a coefficient list (degree 0 first)."""
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def derivative_coeffs(coeffs: Sequence[Fraction]) -> List[Fraction]:
    return [k * c for k, c in enumerate(coeffs)][1:]
