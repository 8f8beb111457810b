"""Reference lower bounds on the asymptotic rate functions.

Baseline formulas used as sanity floors for the new bounds: the entropy
(Gilbert-Varshamov) bound, the tower bound 1 - d - 1/gamma, and its
log_q(1 + q^-3) refinement.  Also the known closed-form values of the
rational-places-per-genus limit for square and cube field sizes, and the
profile record (gamma, {gamma_l}) a bound evaluation runs against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Mapping

import gmpy2

from .numerics import (
    DEFAULT_PRECISION,
    DomainError,
    PrecisionReal,
    RealLike,
    as_real,
    logq,
    xlogq,
)


class UnknownIharaBound(DomainError):
    """q is neither a square nor a cube: supply gamma explicitly."""


def prime_power_base(q: int) -> tuple[int, int]:
    """Return (p, k) with q == p**k and p prime; DomainError otherwise."""
    if not isinstance(q, int) or q < 2:
        raise DomainError(f"field size must be an integer >= 2, got {q!r}")
    for k in range(q.bit_length(), 0, -1):
        root, exact = gmpy2.iroot(q, k)
        if exact and gmpy2.is_prime(root):
            return int(root), k
    raise DomainError(f"{q} is not a prime power")


def is_prime_power(q: int) -> bool:
    try:
        prime_power_base(q)
        return True
    except DomainError:
        return False


def ihara_lower_exact(q: int) -> Fraction:
    """Exact rational lower-bound value for the places/genus limit.

    sqrt(q) - 1 when q is a perfect square (used even when q is also a
    cube, since it is larger for q >= 4); 2(q^{2/3}-1)/(q^{1/3}+2) when q
    is a perfect cube; otherwise raises UnknownIharaBound.
    """
    prime_power_base(q)
    root = isqrt(q)
    if root * root == q:
        return Fraction(root - 1)
    cbrt, exact = gmpy2.iroot(q, 3)
    if exact:
        c = int(cbrt)
        return Fraction(2 * (c * c - 1), c + 2)
    raise UnknownIharaBound(
        f"no built-in profile for q={q}: not a square or cube, supply gamma"
    )


def ihara_lower(q: int, precision: int = DEFAULT_PRECISION) -> PrecisionReal:
    return as_real(ihara_lower_exact(q), precision)


@dataclass(frozen=True)
class IharaProfile:
    """A field size together with its realized place-count growth profile.

    ``gamma`` is the limit of rational places per genus along the tower;
    ``gamma_l`` maps a degree l >= 2 to the liminf of degree-l places per
    genus (absent means 0).  ``gamma_l`` may also carry an explicit entry
    for l = 1; otherwise gamma_1 defaults to gamma itself.
    """

    q: int
    gamma: PrecisionReal
    gamma_l: tuple[tuple[int, PrecisionReal], ...] = ()

    def __post_init__(self):
        prime_power_base(self.q)
        if not self.gamma > 0:
            raise DomainError("gamma must be positive")
        for degree, value in self.gamma_l:
            if degree < 1:
                raise DomainError(f"gamma_l degree must be >= 1, got {degree}")
            if value < 0:
                raise DomainError(f"gamma_{degree} must be nonnegative")

    @property
    def precision(self) -> int:
        return min([self.gamma.precision] + [v.precision for _, v in self.gamma_l])

    def effective_gamma_l(self) -> dict[int, PrecisionReal]:
        """gamma_l map with the gamma_1 = gamma default applied."""
        table = {degree: value for degree, value in self.gamma_l}
        table.setdefault(1, self.gamma)
        return table


def make_profile(q: int,
                 gamma: RealLike | None = None,
                 gamma_l: Mapping[int, RealLike] | None = None,
                 precision: int = DEFAULT_PRECISION) -> IharaProfile:
    """Build an IharaProfile, defaulting gamma from ihara_lower when known."""
    if gamma is None:
        gamma_value = ihara_lower(q, precision)
    else:
        gamma_value = as_real(gamma, precision)
    entries = ()
    if gamma_l:
        entries = tuple(sorted(
            (degree, as_real(value, precision)) for degree, value in gamma_l.items()
        ))
    return IharaProfile(q=q, gamma=gamma_value, gamma_l=entries)


def gv_bound(q: int, delta: RealLike, precision: int = DEFAULT_PRECISION) -> PrecisionReal:
    """Entropy lower bound 1 - d log_q(q-1) + d log_q d + (1-d) log_q(1-d).

    Domain: 0 < delta <= (q-1)/q.  The right endpoint is admitted and
    returns exactly 0 (the formula cancels algebraically there).
    """
    prime_power_base(q)
    from .numerics import exact_value
    d_input = Fraction(exact_value(delta))  # endpoint test precedes rounding
    d = as_real(delta, precision)
    plotkin = Fraction(q - 1, q)
    if d_input <= 0 or d_input > plotkin:
        raise DomainError(f"gv_bound requires 0 < delta <= (q-1)/q = {plotkin}")
    if d_input == plotkin:
        return as_real(0, d.precision)
    one = as_real(1, d.precision)
    return (one - d * logq(q - 1, q, d.precision)
            + xlogq(d, q) + xlogq(one - d, q))


def tvz_bound(delta: RealLike, gamma: RealLike,
              precision: int = DEFAULT_PRECISION) -> PrecisionReal:
    """Tower bound 1 - delta - 1/gamma (may be negative; caller clamps)."""
    d = as_real(delta, precision)
    g = as_real(gamma, precision)
    if not g > 0:
        raise DomainError("tvz_bound requires gamma > 0")
    if d < 0 or d > 1:
        raise DomainError("tvz_bound requires 0 <= delta <= 1")
    return 1 - d - 1 / g


def no1_bound(q: int, delta: RealLike, gamma: RealLike,
              precision: int = DEFAULT_PRECISION) -> PrecisionReal:
    """tvz_bound plus the uniform improvement log_q(1 + q^-3)."""
    prime_power_base(q)
    base = tvz_bound(delta, gamma, precision)
    bump = logq(1 + Fraction(1, q ** 3), q, base.precision)
    return base + bump
