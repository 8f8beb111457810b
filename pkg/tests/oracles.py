"""Independent oracles used to freeze expected values.

Logarithms come from the atanh series evaluated in exact rational
arithmetic, so the expected constants never depend on the library paths
they are checking.
"""

from __future__ import annotations

from fractions import Fraction


def _atanh_series(z: Fraction, digits: int) -> Fraction:
    tol = Fraction(1, 10 ** (digits + 8))
    total = Fraction(0)
    term = z
    k = 0
    while abs(term) > tol * max(1, abs(2 * total)):
        total += term / (2 * k + 1)
        term *= z * z
        k += 1
    return 2 * total


def ln_fraction(x: Fraction, digits: int = 45) -> Fraction:
    """ln(x) by range reduction to [1, 2) plus the atanh series."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("ln needs a positive argument")
    shift = 0
    while x >= 2:
        x /= 2
        shift += 1
    while x < 1:
        x *= 2
        shift -= 1
    ln2 = _atanh_series(Fraction(1, 3), digits)
    return _atanh_series((x - 1) / (x + 1), digits) + shift * ln2


def logq_fraction(x: Fraction, q: int, digits: int = 45) -> Fraction:
    return ln_fraction(Fraction(x), digits) / ln_fraction(Fraction(q), digits)


def entropy_fraction(x: Fraction, q: int, digits: int = 45) -> Fraction:
    x = Fraction(x)
    if x in (0, 1):
        return Fraction(0)
    return -(x * logq_fraction(x, q, digits)
             + (1 - x) * logq_fraction(1 - x, q, digits))


def truncate_fraction(fr: Fraction, digits: int) -> str:
    neg = fr < 0
    scaled = abs(fr.numerator) * 10 ** digits // fr.denominator
    text = str(scaled).rjust(digits + 1, "0")
    out = text[: len(text) - digits] + "." + text[len(text) - digits:]
    return ("-" if neg and scaled else "") + out
