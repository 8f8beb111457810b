"""Arbitrary-precision real arithmetic and q-ary entropy primitives.

Every analytic quantity in this package flows through :class:`PrecisionReal`,
a small immutable wrapper around an ``mpmath`` float plus an explicit working
precision in bits.  Arithmetic between two wrapped values rounds at the
minimum of their precisions, so precision never silently inflates.  Module
operations (``logq``, ``entropy_q``, ...) evaluate internally with
``GUARD_BITS`` extra bits and round once to the target precision; documented
"k ulp" tolerances therefore refer to the stated precision.

Exact inputs are first-class: integers, :class:`fractions.Fraction`, decimal
strings ("0.29879..."), rational strings ("p/q") and integer power
expressions ("2^21") are all converted exactly before any rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath as mp

MIN_PRECISION = 64
DEFAULT_PRECISION = 768
GUARD_BITS = 64

Exact = Union[int, Fraction]
RealLike = Union["PrecisionReal", int, Fraction, str]


class DomainError(ValueError):
    """An input violates a documented precondition; the message names it."""


def parse_exact(text: str) -> Exact:
    """Parse a numeric literal into an exact integer or Fraction.

    Accepted forms: plain integers ("64"), integer power expressions
    ("2^21"), rational strings ("p/q" with integer parts), and decimal
    strings with optional exponent ("0.29879", "3.41e-16").
    """
    s = text.strip().replace("_", "")
    if not s:
        raise DomainError("empty numeric literal")
    if "^" in s:
        base_s, _, exp_s = s.partition("^")
        try:
            base, exp = int(base_s), int(exp_s)
        except ValueError:
            raise DomainError(f"malformed power expression {text!r}") from None
        if exp < 0:
            return Fraction(1, base ** (-exp))
        return base ** exp
    if "/" in s:
        num_s, _, den_s = s.partition("/")
        try:
            num, den = int(num_s), int(den_s)
        except ValueError:
            raise DomainError(f"malformed rational literal {text!r}") from None
        if den == 0:
            raise DomainError("rational literal with zero denominator")
        return Fraction(num, den)
    try:
        frac = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"malformed numeric literal {text!r}") from None
    return int(frac) if frac.denominator == 1 else frac


def mpf_to_fraction(value: mp.mpf) -> Fraction:
    """Exact rational value of a finite mpmath float (always dyadic).

    Reads the mantissa/exponent pair directly; wrapping in mp.mpf() would
    silently re-round at the ambient context precision.
    """
    mpf_tuple = getattr(value, "_mpf_", None)
    if mpf_tuple is None:
        raise DomainError(f"expected an mpmath float, got {type(value).__name__}")
    sign, man, exp, _ = mpf_tuple
    if man == 0:
        if exp == 0:
            return Fraction(0)
        raise DomainError("cannot convert a non-finite value to a fraction")
    frac = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -frac if sign else frac


def _from_exact(value: Exact, precision: int) -> mp.mpf:
    with mp.workprec(precision):
        if isinstance(value, Fraction):
            return mp.mpf(value.numerator) / mp.mpf(value.denominator)
        return mp.mpf(value)


@dataclass(frozen=True, eq=False)
class PrecisionReal:
    """A real number together with its working precision in bits.

    Comparisons are exact (they compare the underlying dyadic values and are
    independent of precision).  Binary arithmetic rounds at the minimum of
    the operand precisions; exact operands (int, Fraction, numeric string)
    adopt the wrapped operand's precision.
    """

    value: mp.mpf
    precision: int

    def __post_init__(self):
        if self.precision < MIN_PRECISION:
            raise DomainError(
                f"precision {self.precision} below minimum {MIN_PRECISION}"
            )
        if not mp.isfinite(self.value):
            raise DomainError("PrecisionReal requires a finite value")

    # -- conversions -------------------------------------------------
    def as_fraction(self) -> Fraction:
        return mpf_to_fraction(self.value)

    def to_decimal(self, digits: int) -> str:
        return truncate_decimal(self, digits)

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        return f"PrecisionReal({mp.nstr(self.value, 24)!r}, precision={self.precision})"

    # -- arithmetic --------------------------------------------------
    def _coerce(self, other) -> "PrecisionReal":
        if isinstance(other, PrecisionReal):
            return other
        if isinstance(other, str):
            other = parse_exact(other)
        if isinstance(other, (int, Fraction)):
            return PrecisionReal(_from_exact(other, self.precision), self.precision)
        return NotImplemented  # type: ignore[return-value]

    def _binary(self, other, op) -> "PrecisionReal":
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        prec = min(self.precision, rhs.precision)
        with mp.workprec(prec):
            out = op(self.value, rhs.value)
        return PrecisionReal(out, prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: b / a)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        with mp.workprec(self.precision):
            out = self.value ** exponent
        return PrecisionReal(out, self.precision)

    def __neg__(self):
        return PrecisionReal(-self.value, self.precision)

    def __abs__(self):
        return PrecisionReal(abs(self.value), self.precision)

    # -- comparisons (exact, total) -----------------------------------
    def _cmp_value(self, other):
        if isinstance(other, PrecisionReal):
            return other.value
        if isinstance(other, (int, Fraction, str)):
            coerced = self._coerce(other)
            return coerced.value
        return None

    def __eq__(self, other):
        rhs = self._cmp_value(other)
        return NotImplemented if rhs is None else self.value == rhs

    def __lt__(self, other):
        rhs = self._cmp_value(other)
        return NotImplemented if rhs is None else self.value < rhs

    def __le__(self, other):
        rhs = self._cmp_value(other)
        return NotImplemented if rhs is None else self.value <= rhs

    def __gt__(self, other):
        rhs = self._cmp_value(other)
        return NotImplemented if rhs is None else self.value > rhs

    def __ge__(self, other):
        rhs = self._cmp_value(other)
        return NotImplemented if rhs is None else self.value >= rhs

    def __hash__(self):
        return hash(self.value)


def as_real(x: RealLike, precision: int = DEFAULT_PRECISION) -> PrecisionReal:
    """Coerce an exact or wrapped number to ``PrecisionReal``.

    Already-wrapped values pass through unchanged (their own precision is
    kept); exact inputs are converted once, at ``precision`` bits.
    """
    if isinstance(x, PrecisionReal):
        return x
    if isinstance(x, str):
        x = parse_exact(x)
    if isinstance(x, (int, Fraction)):
        return PrecisionReal(_from_exact(x, precision), precision)
    raise DomainError(f"cannot interpret {type(x).__name__} as a real number")


def as_real_floor(x: RealLike, precision: int = DEFAULT_PRECISION) -> PrecisionReal:
    """Like as_real, but exact inputs round toward zero.

    Used when constructing points on tight linear constraints: magnitudes
    can only shrink, so exact feasibility survives the conversion.
    """
    if isinstance(x, PrecisionReal):
        return x
    if isinstance(x, str):
        x = parse_exact(x)
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        from mpmath import libmp
        value = mp.make_mpf(libmp.from_rational(
            x.numerator, x.denominator, precision, "d"))
        return PrecisionReal(value, precision)
    raise DomainError(f"cannot interpret {type(x).__name__} as a real number")


def exact_value(x: RealLike) -> Exact:
    """Exact rational content of a PrecisionReal / int / Fraction / string."""
    if isinstance(x, PrecisionReal):
        return x.as_fraction()
    if isinstance(x, str):
        return parse_exact(x)
    if isinstance(x, (int, Fraction)):
        return x
    raise DomainError(f"cannot interpret {type(x).__name__} as a real number")


# ----------------------------------------------------------------------
# ulp machinery
# ----------------------------------------------------------------------

def ulp(x: PrecisionReal, precision: int | None = None) -> mp.mpf:
    """Unit in the last place of ``x`` at the given (default: own) precision."""
    prec = precision if precision is not None else x.precision
    if x.value == 0:
        return mp.ldexp(1, -prec)
    return mp.ldexp(1, mp.mag(x.value) - prec)


def agrees_to_ulps(a: PrecisionReal, b: PrecisionReal, n_ulps: int,
                   precision: int | None = None) -> bool:
    """True when ``|a - b|`` is at most ``n_ulps`` last-place units.

    The scale is taken from the larger magnitude of the two operands at
    ``precision`` bits (default: the minimum of the operand precisions).
    """
    prec = precision if precision is not None else min(a.precision, b.precision)
    if a.value == b.value:
        return True
    with mp.workprec(prec + GUARD_BITS):
        diff = abs(a.value - b.value)
        scale = max(abs(a.value), abs(b.value))
    if scale == 0:
        return diff == 0
    return diff <= n_ulps * mp.ldexp(1, mp.mag(scale) - prec)


def truncate_decimal(x: PrecisionReal | Exact, digits: int) -> str:
    """Decimal string of ``x`` with ``digits`` fractional digits, truncated.

    Truncation is round-toward-zero, computed exactly in integer arithmetic,
    which matches how "..."-terminated reference constants are printed.
    """
    if digits < 0:
        raise DomainError("digits must be nonnegative")
    frac = exact_value(x) if not isinstance(x, Fraction) else x
    frac = Fraction(frac)
    negative = frac < 0
    scaled = abs(frac.numerator) * 10 ** digits // frac.denominator
    text = str(scaled).rjust(digits + 1, "0")
    int_part, frac_part = text[: len(text) - digits], text[len(text) - digits:]
    out = int_part if digits == 0 else f"{int_part}.{frac_part}"
    return f"-{out}" if negative and scaled != 0 else out


# ----------------------------------------------------------------------
# logarithms and q-ary entropy
# ----------------------------------------------------------------------

def _check_base(q: int) -> None:
    if not isinstance(q, int) or q < 2:
        raise DomainError(f"logarithm base must be an integer >= 2, got {q!r}")


def _pure_power_exponent(n: int, q: int) -> int | None:
    """k >= 1 with n == q**k, else None."""
    if n < q:
        return None
    k = 0
    while n > 1:
        n, rem = divmod(n, q)
        if rem:
            return None
        k += 1
    return k


def _integer_power_exponent(value: Fraction, q: int) -> int | None:
    """k with value == q**k (k may be negative), else None."""
    if value == 1:
        return 0
    if value.denominator == 1:
        return _pure_power_exponent(value.numerator, q)
    if value.numerator == 1:
        k = _pure_power_exponent(value.denominator, q)
        return None if k is None else -k
    return None


def logq(x: RealLike, q: int, precision: int = DEFAULT_PRECISION) -> PrecisionReal:
    """Base-q logarithm; exact whenever ``x`` is an integer power of ``q``."""
    _check_base(q)
    xr = as_real(x, precision)
    if xr.value <= 0:
        raise DomainError("logq requires a positive argument")
    exact = _integer_power_exponent(xr.as_fraction(), q)
    if exact is not None:
        return PrecisionReal(_from_exact(exact, xr.precision), xr.precision)
    with mp.workprec(xr.precision + GUARD_BITS):
        out = mp.log(xr.value) / mp.log(q)
    with mp.workprec(xr.precision):
        out = +out
    return PrecisionReal(out, xr.precision)


def xlogq(x: RealLike, q: int, precision: int = DEFAULT_PRECISION) -> PrecisionReal:
    """x * log_q(x) on [0, 1], extended continuously by 0 at x = 0."""
    _check_base(q)
    xr = as_real(x, precision)
    if xr.value < 0 or xr.value > 1:
        raise DomainError("xlogq requires 0 <= x <= 1")
    if xr.value == 0 or xr.value == 1:
        return PrecisionReal(mp.mpf(0), xr.precision)
    with mp.workprec(xr.precision + GUARD_BITS):
        out = xr.value * mp.log(xr.value) / mp.log(q)
    with mp.workprec(xr.precision):
        out = +out
    return PrecisionReal(out, xr.precision)


def entropy_ln_raw(x: mp.mpf) -> mp.mpf:
    """-x ln x - (1-x) ln(1-x) under the caller's mpmath context.

    Uses log1p for the (1-x) factor, so tiny x costs no cancellation even
    when 1-x rounds to 1 at the working precision.
    """
    if x == 0 or x == 1:
        return mp.mpf(0)
    return -(x * mp.log(x) + (1 - x) * mp.log1p(-x))


def entropy_q(x: RealLike, q: int, precision: int = DEFAULT_PRECISION) -> PrecisionReal:
    """q-ary entropy without the (q-1) weight: -x log_q x - (1-x) log_q(1-x)."""
    _check_base(q)
    xr = as_real(x, precision)
    if xr.value < 0 or xr.value > 1:
        raise DomainError("entropy_q requires 0 <= x <= 1")
    if xr.value == 0 or xr.value == 1:
        return PrecisionReal(mp.mpf(0), xr.precision)
    with mp.workprec(xr.precision + GUARD_BITS):
        out = entropy_ln_raw(xr.value) / mp.log(q)
    with mp.workprec(xr.precision):
        out = +out
    return PrecisionReal(out, xr.precision)
