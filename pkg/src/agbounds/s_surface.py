"""The m-variable surface S, its gradient, feasible region, and corner data.

S(sigma, y, x, t_1..t_m) is a telescoped sum of scaled entropy terms plus a
two-branch tail; its maximum over the compact (x, t)-region is the quantity
the solver module inverts.  Under conditions C1-C4 the maximum sits at a
closed-form corner A_1 = (t_1^*, tbar_2, ..., tbar_m) with x = 0, which this
module computes in exact rational arithmetic.

Branch handling: the tail switches between an entropy form and a linear form
at ratio (q-1)/q.  The side is decided exactly (the inputs are dyadic); in a
band of one last-place unit around the seam both forms are evaluated and
cross-checked to 4 ulps, and the entropy form is returned.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp

from .classic_bounds import prime_power_base
from .numerics import (
    DEFAULT_PRECISION,
    GUARD_BITS,
    DomainError,
    PrecisionReal,
    RealLike,
    agrees_to_ulps,
    as_real,
    as_real_floor,
    entropy_ln_raw,
)


class NondifferentiablePointError(DomainError):
    """Gradient requested at a boundary or branch-edge point."""


def _fr(x) -> Fraction:
    if isinstance(x, PrecisionReal):
        return x.as_fraction()
    return Fraction(x)


def weighted_x_sum(xs: Sequence) -> Fraction:
    """2 * (2 x_1 + 3 x_2 + ... + (m+1) x_m), exactly."""
    return 2 * sum(((l + 2) * _fr(x) for l, x in enumerate(xs)), Fraction(0))


def region_caps(xs: Sequence) -> tuple[Fraction, ...]:
    """Componentwise caps of the t-region: tbar_m = 2 x_m and, below the top,
    tbar_l = 2 x_l + sum_{nu > l} x_nu."""
    m = len(xs)
    vals = [_fr(x) for x in xs]
    caps = []
    for l in range(m):
        if l == m - 1:
            caps.append(2 * vals[l])
        else:
            caps.append(2 * vals[l] + sum(vals[l + 1:], Fraction(0)))
    return tuple(caps)


def region_contains(xs: Sequence, ts: Sequence) -> bool:
    """True iff ts lies in the feasible t-region determined by xs."""
    if len(xs) != len(ts):
        raise DomainError("xs and ts must have equal length")
    caps = region_caps(xs)
    tvals = [_fr(t) for t in ts]
    for t, cap in zip(tvals, caps):
        if t < 0 or t > cap:
            return False
    weighted_t = sum((l + 2) * t for l, t in enumerate(tvals))
    return weighted_t <= weighted_x_sum(xs)


@dataclass(frozen=True)
class SurfaceParams:
    """Fixed data of one surface: q, gamma, y, the x-vector, and sigma."""

    q: int
    gamma: PrecisionReal
    y: PrecisionReal
    xs: tuple[PrecisionReal, ...]
    sigma: PrecisionReal

    def __post_init__(self):
        prime_power_base(self.q)
        if len(self.xs) < 1:
            raise DomainError("at least one x coordinate is required (m >= 1)")
        if not self.gamma > 0:
            raise DomainError("gamma must be positive")
        if not self.y > 0:
            raise DomainError("y must be positive")
        for i, x in enumerate(self.xs):
            if x < 0:
                raise DomainError(f"x_{i + 1} must be nonnegative")
        if self.sigma < 0:
            raise DomainError("sigma must be nonnegative")
        budget = _fr(self.y) + weighted_x_sum(self.xs) + self.sigma_over_gamma
        if budget >= 1:
            raise DomainError(
                "domain requires y + 2(2x_1 + ... + (m+1)x_m) + sigma/gamma < 1"
            )

    @property
    def m(self) -> int:
        return len(self.xs)

    @property
    def precision(self) -> int:
        return min([self.gamma.precision, self.y.precision, self.sigma.precision]
                   + [x.precision for x in self.xs])

    @property
    def sigma_over_gamma(self) -> Fraction:
        return _fr(self.sigma) / _fr(self.gamma)


def make_surface(q: int, gamma: RealLike, y: RealLike, xs: Sequence[RealLike],
                 sigma: RealLike, precision: int = DEFAULT_PRECISION) -> SurfaceParams:
    return SurfaceParams(
        q=q,
        gamma=as_real(gamma, precision),
        y=as_real(y, precision),
        xs=tuple(as_real(x, precision) for x in xs),
        sigma=as_real(sigma, precision),
    )


@dataclass(frozen=True)
class SPoint:
    """A point of the surface domain: x in [0, sigma/gamma] plus the t-vector."""

    x: PrecisionReal
    ts: tuple[PrecisionReal, ...]

    @property
    def precision(self) -> int:
        return min([self.x.precision] + [t.precision for t in self.ts])


def make_point(x: RealLike, ts: Sequence[RealLike],
               precision: int = DEFAULT_PRECISION) -> SPoint:
    """Build a point; exact coordinates round toward zero.

    Directed rounding keeps exactly-tight region constraints satisfied
    after conversion (nearest rounding could push a tight weighted sum
    over its budget by one last-place unit).
    """
    return SPoint(x=as_real_floor(x, precision),
                  ts=tuple(as_real_floor(t, precision) for t in ts))


def validate_point(params: SurfaceParams, point: SPoint) -> None:
    """Exact membership check; raises DomainError naming the violation."""
    if len(point.ts) != params.m:
        raise DomainError(f"point has {len(point.ts)} t-coordinates, expected {params.m}")
    x = _fr(point.x)
    cap_x = params.sigma_over_gamma
    if x < 0:
        raise DomainError("point violates x >= 0")
    if x > cap_x:
        raise DomainError("point violates x <= sigma/gamma")
    caps = region_caps(params.xs)
    tvals = [_fr(t) for t in point.ts]
    for i, (t, cap) in enumerate(zip(tvals, caps)):
        if t < 0:
            raise DomainError(f"point violates t_{i + 1} >= 0")
        if t > cap:
            raise DomainError(f"point violates t_{i + 1} <= {cap} (region cap)")
    weighted_t = sum((l + 2) * t for l, t in enumerate(tvals))
    if weighted_t > weighted_x_sum(params.xs):
        raise DomainError(
            "point violates 2t_1 + 3t_2 + ... + (m+1)t_m <= 2(2x_1 + ... + (m+1)x_m)"
        )


# ----------------------------------------------------------------------
# evaluation
# ----------------------------------------------------------------------

def _branch_side(params: SurfaceParams, point: SPoint) -> int:
    """Exact sign of ratio - (q-1)/q: +1 entropy side, -1 linear side, 0 seam."""
    q = params.q
    wt = sum((l + 1) * _fr(t) for l, t in enumerate(point.ts))
    num = _fr(params.y) + _fr(point.x) + wt
    den = _fr(params.y) + params.sigma_over_gamma + wt
    lhs, rhs = q * num, (q - 1) * den
    return (lhs > rhs) - (lhs < rhs)


def _eval_tails(params: SurfaceParams, point: SPoint):
    """Common telescoped part plus both tail forms, under a guard context.

    Returns (common, entropy_tail, linear_tail, ratio) as raw mpf values
    computed at params/point precision + GUARD_BITS.
    """
    q = params.q
    g = params.gamma.value
    y = params.y.value
    x = point.x.value
    ts = [t.value for t in point.ts]
    m = len(ts)
    lnq = mp.log(q)
    common = mp.mpf(0)
    for l in range(m, 0, -1):
        rest = mp.fsum(ts[l:])
        coef = 1 - rest
        t = ts[l - 1]
        if t != 0:
            common += coef * entropy_ln_raw(t / coef)
    st = mp.fsum(ts)
    wt = mp.fsum((l + 1) * t for l, t in enumerate(ts))
    num = y + x + wt
    common += (1 - st) * entropy_ln_raw(num / (1 - st))
    common /= lnq
    den = y + params.sigma.value / g + wt
    ratio = num / den
    entropy_tail = den * entropy_ln_raw(ratio) / lnq if ratio != 1 else mp.mpf(0)
    linear_tail = den - num * (mp.log(q - 1) / lnq if q > 2 else mp.mpf(0))
    return common, entropy_tail, linear_tail, ratio


def s_value_branches(params: SurfaceParams, point: SPoint
                     ) -> tuple[PrecisionReal, PrecisionReal]:
    """Both branch totals (entropy form, linear form), regardless of side.

    Diagnostic used by the seam-continuity verification: at points exactly
    on the branch boundary the two totals must agree.
    """
    validate_point(params, point)
    prec = min(params.precision, point.precision)
    with mp.workprec(prec + GUARD_BITS):
        common, ent, lin, _ = _eval_tails(params, point)
        v_ent, v_lin = common + ent, common + lin
    with mp.workprec(prec):
        v_ent, v_lin = +v_ent, +v_lin
    return PrecisionReal(v_ent, prec), PrecisionReal(v_lin, prec)


def s_value(params: SurfaceParams, point: SPoint) -> PrecisionReal:
    """Value of the surface at a feasible point.

    The tail branch is selected by the exact side of the ratio at the seam
    (q-1)/q; at the seam itself the entropy form is returned after a 4-ulp
    cross-check of the two forms.
    """
    validate_point(params, point)
    prec = min(params.precision, point.precision)
    side = _branch_side(params, point)
    with mp.workprec(prec + GUARD_BITS):
        common, ent, lin, ratio = _eval_tails(params, point)
        boundary = mp.mpf(params.q - 1) / params.q
        band = mp.ldexp(1, mp.mag(boundary) - prec)
        near_seam = abs(ratio - boundary) <= band
        value = common + (ent if side >= 0 else lin)
        if near_seam:
            v_ent, v_lin = common + ent, common + lin
    with mp.workprec(prec):
        value = +value
    result = PrecisionReal(value, prec)
    if near_seam:
        with mp.workprec(prec):
            v_ent, v_lin = +v_ent, +v_lin
        if not agrees_to_ulps(PrecisionReal(v_ent, prec), PrecisionReal(v_lin, prec), 4):
            raise ArithmeticError(
                "branch forms disagree beyond 4 ulps at the seam; "
                f"q={params.q}, ratio deviation={mp.nstr(ratio - boundary, 8)}"
            )
    return result


# ----------------------------------------------------------------------
# gradient
# ----------------------------------------------------------------------

def _require_interior(params: SurfaceParams, point: SPoint) -> int:
    validate_point(params, point)
    x = _fr(point.x)
    cap_x = params.sigma_over_gamma
    if x == 0 or x == cap_x:
        raise NondifferentiablePointError(
            "nondifferentiable point: x on the boundary of [0, sigma/gamma]"
        )
    caps = region_caps(params.xs)
    tvals = [_fr(t) for t in point.ts]
    for i, (t, cap) in enumerate(zip(tvals, caps)):
        if t == 0 or t == cap:
            raise NondifferentiablePointError(
                f"nondifferentiable point: t_{i + 1} on the region boundary"
            )
    weighted_t = sum((l + 2) * t for l, t in enumerate(tvals))
    if weighted_t == weighted_x_sum(params.xs):
        raise NondifferentiablePointError(
            "nondifferentiable point: weighted t-constraint is tight"
        )
    side = _branch_side(params, point)
    if side == 0:
        raise NondifferentiablePointError(
            "nondifferentiable point: exactly on the tail branch boundary"
        )
    return side


def _gradient_raw(q: int, gamma, y, sigma, x, ts, side: int) -> list:
    """Closed-form gradient (d/dx, d/dt_1..d/dt_m) as raw mpf values.

    Caller supplies a strictly interior point and the exact branch side;
    must run inside an mpmath working-precision context.
    """
    m = len(ts)
    lnq = mp.log(q)
    c = sigma / gamma
    wt = mp.fsum((l + 1) * t for l, t in enumerate(ts))
    num = y + x + wt
    den = y + c + wt
    head = 1 - y - x - mp.fsum((l + 2) * t for l, t in enumerate(ts))
    ln_head, ln_num = mp.log(head), mp.log(num)
    grad = []
    if side > 0:
        grad.append((ln_head + mp.log(c - x) - 2 * ln_num) / lnq)
        ln_den = mp.log(den)
        for l in range(1, m + 1):
            grad.append(
                ((l + 1) * ln_head + l * ln_den - 2 * l * ln_num - mp.log(ts[l - 1]))
                / lnq
            )
    else:
        lnq1 = mp.log(q - 1) if q > 2 else mp.mpf(0)
        grad.append((ln_head - ln_num - lnq1) / lnq)
        ln_ratio = lnq - lnq1  # ln(q/(q-1))
        for l in range(1, m + 1):
            grad.append(
                ((l + 1) * ln_head - mp.log(ts[l - 1]) - l * ln_num + l * ln_ratio)
                / lnq
            )
    return grad


def s_gradient(params: SurfaceParams, point: SPoint) -> tuple[PrecisionReal, ...]:
    """(dS/dx, dS/dt_1, ..., dS/dt_m) at a strictly interior point."""
    side = _require_interior(params, point)
    prec = min(params.precision, point.precision)
    with mp.workprec(prec + GUARD_BITS):
        grad = _gradient_raw(params.q, params.gamma.value, params.y.value,
                             params.sigma.value, point.x.value,
                             [t.value for t in point.ts], side)
    out = []
    with mp.workprec(prec):
        for g in grad:
            out.append(PrecisionReal(+g, prec))
    return tuple(out)


def ds_dsigma(params: SurfaceParams, point: SPoint) -> PrecisionReal:
    """dS/dsigma; equals 1/gamma exactly on the linear branch."""
    validate_point(params, point)
    side = _branch_side(params, point)
    prec = min(params.precision, point.precision)
    if side == 0:
        raise NondifferentiablePointError(
            "nondifferentiable point: exactly on the tail branch boundary"
        )
    if side < 0:
        with mp.workprec(prec):
            return PrecisionReal(1 / params.gamma.value, prec)
    if _fr(point.x) == params.sigma_over_gamma:
        raise NondifferentiablePointError(
            "nondifferentiable point: x = sigma/gamma on the entropy branch"
        )
    with mp.workprec(prec + GUARD_BITS):
        g = params.gamma.value
        c = params.sigma.value / g
        wt = mp.fsum((l + 1) * t.value for l, t in enumerate(point.ts))
        den = params.y.value + c + wt
        out = mp.log(den / (c - point.x.value)) / (mp.log(params.q) * g)
    with mp.workprec(prec):
        out = +out
    return PrecisionReal(out, prec)


# ----------------------------------------------------------------------
# corner data and conditions C1-C4
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CornerData:
    """Exact corner quantities: tbar, the t* recursion, and u.

    u is the maximum of t_1 + 2 t_2 + ... + m t_m over the feasible region,
    attained at the corner A_1 = (t_1^*, tbar_2, ..., tbar_m).  Only t_1^*
    enters A_1; later recursion values can go negative (their corners fall
    outside the box), which the condition checks handle separately.
    """

    t_bar: tuple[Fraction, ...]
    t_star: tuple[Fraction, ...]
    u: Fraction

    @property
    def is_feasible(self) -> bool:
        """A_1 lies in the region (the weighted sum is tight by construction)."""
        return 0 <= self.t_star[0] <= self.t_bar[0]

    def corner_point(self, precision: int) -> SPoint:
        """A_1 with x = 0, as a precision-carrying point."""
        ts = (self.t_star[0],) + self.t_bar[1:]
        return make_point(0, ts, precision)


def corner_data(xs: Sequence, sigma: RealLike = 0, gamma: RealLike = 1,
                y: RealLike = 0) -> CornerData:
    """Solve the corner recursion by forward substitution, exactly.

    The corner quantities depend only on xs; sigma, gamma and y are accepted
    for signature symmetry with the condition checks and merely validated.
    """
    if len(xs) < 1:
        raise DomainError("corner_data requires m >= 1")
    vals = [_fr(x) for x in xs]
    if any(v < 0 for v in vals):
        raise DomainError("corner_data requires xs >= 0 componentwise")
    if _fr(sigma) < 0 or _fr(gamma) <= 0 or _fr(y) < 0:
        raise DomainError("corner_data requires sigma >= 0, gamma > 0, y >= 0")
    m = len(vals)
    t_bar = list(region_caps(vals))
    target = weighted_x_sum(vals)
    t_star = [Fraction(0)] * m
    t_star[0] = (target - sum(((l + 2) * t_bar[l] for l in range(1, m)), Fraction(0))) / 2
    for l in range(2, m + 1):  # (l+1) t*_l - (l+1) tbar_l = l t*_{l-1} - l tbar_{l-1}
        t_star[l - 1] = t_bar[l - 1] + Fraction(l, l + 1) * (t_star[l - 2] - t_bar[l - 2])
    u = t_star[0] + sum(((l + 1) * t_bar[l] for l in range(1, m)), Fraction(0))
    return CornerData(t_bar=tuple(t_bar), t_star=tuple(t_star), u=u)


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the corner-maximizer conditions with exact signed slacks.

    Slack sign convention: a condition passes iff its slack is positive
    (C1 and C4 admit equality, so they pass at slack zero as well).
    """

    c1: bool
    c2: tuple[bool, ...]
    c3: bool
    c4: tuple[bool, ...]
    corner_feasible: bool
    slacks: dict[str, Fraction]
    corner: CornerData

    @property
    def all_passed(self) -> bool:
        return self.c1 and all(self.c2) and self.c3 and all(self.c4)

    def slack_summary(self) -> dict[str, float]:
        return {name: float(value) for name, value in self.slacks.items()}


def check_conditions(params: SurfaceParams) -> ConditionReport:
    """Evaluate C1-C4 exactly as displayed, in rational arithmetic."""
    q = params.q
    y = _fr(params.y)
    c = params.sigma_over_gamma
    corner = corner_data(params.xs, params.sigma, params.gamma, params.y)
    base = y + c
    head = 1 - y - c - weighted_x_sum(params.xs)
    slacks: dict[str, Fraction] = {}

    slacks["C1"] = Fraction(y, q - 1) - c
    c1 = slacks["C1"] >= 0

    c2_flags = []
    for l in range(1, params.m + 1):
        slack = head ** (l + 1) * base ** l - corner.t_bar[l - 1] * (base + corner.u) ** (2 * l)
        slacks[f"C2[{l}]"] = slack
        c2_flags.append(slack > 0)

    slacks["C3"] = y * y - c * (1 - y)
    c3 = slacks["C3"] > 0

    c4_flags = []
    for l in range(1, params.m):
        slack = corner.t_star[l - 1] ** (l + 2) \
            - corner.t_bar[l] ** (l + 1) * (base + corner.u)
        slacks[f"C4[{l}]"] = slack
        # even powers of a negative t* could satisfy the displayed
        # inequality vacuously; the corner-path argument needs t* >= 0
        c4_flags.append(slack >= 0 and corner.t_star[l - 1] >= 0)

    return ConditionReport(
        c1=c1, c2=tuple(c2_flags), c3=c3, c4=tuple(c4_flags),
        corner_feasible=corner.is_feasible, slacks=slacks, corner=corner,
    )


# ----------------------------------------------------------------------
# sampling helpers for verification suites and the numerical fallback
# ----------------------------------------------------------------------

def sample_feasible_point(params: SurfaceParams, rng: random.Random,
                          interior: bool = False) -> SPoint:
    """Draw a feasible (x, t) point; with interior=True, strictly inside.

    Sampling is exact: coordinates are dyadic fractions of the exact caps,
    so feasibility never depends on rounding.
    """
    prec = params.precision
    caps = region_caps(params.xs)
    target = weighted_x_sum(params.xs)

    def unit() -> Fraction:
        raw = Fraction(rng.getrandbits(53), 1 << 53)
        return Fraction(1, 10) + raw * Fraction(4, 5) if interior else raw

    ts = [unit() * cap for cap in caps]
    weighted = sum((l + 2) * t for l, t in enumerate(ts))
    if weighted > target or (interior and weighted == target and target > 0):
        scale = Fraction(target, weighted) * (Fraction(9, 10) if interior else 1)
        ts = [t * scale for t in ts]
    x = unit() * params.sigma_over_gamma
    return make_point(x, ts, prec)
