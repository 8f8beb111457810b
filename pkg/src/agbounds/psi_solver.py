"""The I-function (max of the surface), its inverse, and the growth target.

I(sigma) is the maximum of the surface over the feasible (x, t)-region; it
is strictly increasing in sigma.  The solver inverts it against the
class-number growth target T = (1/gamma)[1 + sum_l gamma_l log_q(q^l/(q^l-1))]
by bisection, returning the unique sigma* with I(sigma*) = T, or 0 on the
defined zero branch (limit proxy <= T) and on the T <= I(0) clamp.

Where conditions C1-C4 certify the closed-form corner maximizer, I is the
corner value.  Otherwise a numerical maximization runs: projected gradient
ascent from the corner and 32 Halton starts, then a coordinate
golden-section polish, with documented tolerance 2^(-precision/4).  The
corner value is always a feasible lower bound, so during bisection a
comparison may also be certified by the corner alone when it already
exceeds the target; those shortcuts are counted in the diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath as mp

from .classic_bounds import IharaProfile
from .numerics import (
    DEFAULT_PRECISION,
    GUARD_BITS,
    DomainError,
    PrecisionReal,
    RealLike,
    as_real,
    mpf_to_fraction,
    truncate_decimal,
)
from .s_surface import (
    ConditionReport,
    SPoint,
    SurfaceParams,
    check_conditions,
    corner_data,
    make_point,
    region_caps,
    s_value,
    weighted_x_sum,
    _gradient_raw,
    _branch_side,
    _fr,
)


@dataclass(frozen=True)
class PsiProblem:
    """Inputs of one inversion: profile, y, the x-vector, and precision."""

    profile: IharaProfile
    y: PrecisionReal
    xs: tuple[PrecisionReal, ...]
    precision: int

    def __post_init__(self):
        if not self.y > 0:
            raise DomainError("y must be positive")
        for i, x in enumerate(self.xs):
            if x < 0:
                raise DomainError(f"x_{i + 1} must be nonnegative")
        if _fr(self.y) + weighted_x_sum(self.xs) >= 1:
            raise DomainError("domain requires y + 2(2x_1 + ... + (m+1)x_m) < 1")

    @property
    def m(self) -> int:
        return len(self.xs)

    def theta_exact(self) -> Fraction:
        """gamma * (1 - y - 2(2x_1 + ... + (m+1)x_m)), exactly."""
        return _fr(self.profile.gamma) * (1 - _fr(self.y) - weighted_x_sum(self.xs))

    def surface_at(self, sigma: RealLike) -> SurfaceParams:
        return SurfaceParams(
            q=self.profile.q,
            gamma=self.profile.gamma,
            y=self.y,
            xs=self.xs,
            sigma=as_real(sigma, self.precision),
        )


def make_psi_problem(profile: IharaProfile, y: RealLike, xs: Sequence[RealLike],
                     precision: int = DEFAULT_PRECISION) -> PsiProblem:
    return PsiProblem(
        profile=profile,
        y=as_real(y, precision),
        xs=tuple(as_real(x, precision) for x in xs),
        precision=precision,
    )


def class_number_target(profile: IharaProfile,
                        precision: int = DEFAULT_PRECISION) -> PrecisionReal:
    """T = (1/gamma)[1 + sum over nonzero gamma_l of gamma_l log_q(q^l/(q^l-1))]."""
    q = profile.q
    with mp.workprec(precision + GUARD_BITS):
        total = mp.mpf(1)
        lnq = mp.log(q)
        for degree, value in sorted(profile.effective_gamma_l().items()):
            if value.value == 0:
                continue
            power = q ** degree
            total += value.value * (mp.log(power) - mp.log(power - 1)) / lnq
        total /= profile.gamma.value
    with mp.workprec(precision):
        total = +total
    return PrecisionReal(total, precision)


@dataclass(frozen=True)
class IResult:
    value: PrecisionReal
    method: str            # "closed-form" | "numerical"
    conditions: ConditionReport
    maximizer: SPoint


def i_value(problem: PsiProblem, sigma: RealLike) -> IResult:
    """Maximum of the surface at this sigma, closed-form when certified."""
    params = problem.surface_at(sigma)
    report = check_conditions(params)
    corner_point = report.corner.corner_point(problem.precision)
    if report.all_passed and report.corner_feasible:
        return IResult(s_value(params, corner_point), "closed-form", report, corner_point)
    best_point, best_value = _maximize_surface(params)
    if report.corner_feasible:
        corner_value = s_value(params, corner_point)
        if corner_value > best_value:
            best_point, best_value = corner_point, corner_value
    return IResult(best_value, "numerical", report, best_point)


# ----------------------------------------------------------------------
# numerical fallback: multi-start projected ascent + golden polish
# ----------------------------------------------------------------------

def _halton(index: int, base: int) -> Fraction:
    result, f, i = Fraction(0), Fraction(1, base), index
    while i > 0:
        i, digit = divmod(i, base)
        result += f * digit
        f /= base
    return result


_HALTON_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)


def _project(xval: Fraction, ts: list[Fraction], cap_x: Fraction,
             caps: Sequence[Fraction], target: Fraction) -> tuple[Fraction, list[Fraction]]:
    xval = min(max(xval, Fraction(0)), cap_x)
    ts = [min(max(t, Fraction(0)), cap) for t, cap in zip(ts, caps)]
    weighted = sum((l + 2) * t for l, t in enumerate(ts))
    if weighted > target:
        scale = Fraction(target, weighted)
        ts = [t * scale for t in ts]
    return xval, ts


def _round_fraction(value: Fraction, prec: int) -> Fraction:
    """Nearest prec-bit dyadic, keeping fraction sizes bounded along iterates."""
    if value == 0:
        return Fraction(0)
    with mp.workprec(prec):
        approx = mp.mpf(value.numerator) / mp.mpf(value.denominator)
    return mpf_to_fraction(approx)


def _round_coords(xval: Fraction, ts: list[Fraction], prec: int,
                  cap_x: Fraction, caps: Sequence[Fraction], target: Fraction):
    xr = _round_fraction(xval, prec)
    tr = [_round_fraction(t, prec) for t in ts]
    return _project(xr, tr, cap_x, caps, target)


def _point_from(xval: Fraction, ts: Sequence[Fraction], prec: int) -> SPoint:
    return make_point(xval, tuple(ts), prec)


def _maximize_surface(params: SurfaceParams) -> tuple[SPoint, PrecisionReal]:
    """Best feasible point found by the documented fallback search."""
    prec = params.precision
    caps = region_caps(params.xs)
    cap_x = params.sigma_over_gamma
    target = weighted_x_sum(params.xs)
    corner = corner_data(params.xs)

    def evaluate(xval: Fraction, ts: Sequence[Fraction]) -> PrecisionReal:
        return s_value(params, _point_from(xval, ts, prec))

    active_t = [l for l, cap in enumerate(caps) if cap > 0]
    x_active = cap_x > 0

    starts: list[tuple[Fraction, list[Fraction]]] = []
    if corner.is_feasible:
        starts.append((Fraction(0), [corner.t_star[0]] + list(corner.t_bar[1:])))
    starts.append(_map_u([Fraction(0)] + [Fraction(1)] * len(caps),
                         cap_x, caps, target))
    for k in range(1, 33):
        coords = iter(_HALTON_PRIMES)
        xval = _halton(k, next(coords)) * cap_x if x_active else Fraction(0)
        ts = [Fraction(0)] * len(caps)
        for l in active_t:
            ts[l] = (Fraction(1, 50) + _halton(k, next(coords)) * Fraction(24, 25)) * caps[l]
        starts.append(_project(xval, ts, cap_x, caps, target))

    best_x, best_ts = starts[0]
    best_val = None

    for start_x, start_ts in starts:
        xval, ts = _round_coords(start_x, list(start_ts), prec, cap_x, caps, target)
        value = evaluate(xval, ts)
        alpha = mp.mpf("0.5")
        stall = 0
        for _ in range(10):
            grad = _pseudo_gradient(params, xval, ts, prec)
            scaled = []
            if x_active:
                scaled.append(grad[0] * mp.mpf(cap_x.numerator) / cap_x.denominator)
            for l in active_t:
                scaled.append(grad[l + 1] * mp.mpf(caps[l].numerator) / caps[l].denominator)
            norm = max((abs(s) for s in scaled), default=mp.mpf(0))
            if norm == 0:
                break
            improved = False
            step = alpha
            for _ in range(8):
                new_x, new_ts = xval, list(ts)
                idx = 0
                if x_active:
                    move = mpf_to_fraction(step * scaled[idx] / norm) * cap_x
                    new_x = xval + move
                    idx += 1
                for l in active_t:
                    move = mpf_to_fraction(step * scaled[idx] / norm) * caps[l]
                    new_ts[l] = ts[l] + move
                    idx += 1
                new_x, new_ts = _round_coords(new_x, new_ts, prec, cap_x, caps, target)
                new_val = evaluate(new_x, new_ts)
                if new_val > value:
                    xval, ts, value = new_x, new_ts, new_val
                    improved = True
                    alpha = min(mp.mpf(1), step * 2)
                    break
                step = step / 2
            if not improved:
                stall += 1
                if stall >= 2:
                    break
            else:
                stall = 0
        if best_val is None or value > best_val:
            best_x, best_ts, best_val = xval, ts, value

    best_x, best_ts, best_val = _golden_polish(
        params, best_x, list(best_ts), best_val, prec, cap_x, caps, target)
    return _point_from(best_x, best_ts, prec), best_val


def _pseudo_gradient(params: SurfaceParams, xval: Fraction, ts: list[Fraction],
                     prec: int) -> list[mp.mpf]:
    """Closed-form gradient with +/-infinite pulls replaced by large finites."""
    big = mp.mpf(10) ** 6
    point = _point_from(xval, ts, prec)
    side = _branch_side(params, point)
    if side == 0:
        side = 1
    with mp.workprec(prec + GUARD_BITS):
        safe_ts = []
        floor = mp.ldexp(1, -(2 * prec))
        for t in ts:
            safe_ts.append(mp.mpf(t.numerator) / t.denominator if t > 0 else floor)
        cap_x = params.sigma_over_gamma
        x = mp.mpf(xval.numerator) / xval.denominator if xval else mp.mpf(0)
        if cap_x > 0 and xval == cap_x:
            x = x * (1 - mp.ldexp(1, -(prec // 2)))
        grad = _gradient_raw(params.q, params.gamma.value, params.y.value,
                             params.sigma.value, x, safe_ts, side)
    return [mp.mpf(max(min(g, big), -big)) for g in grad]


def _map_u(u: Sequence[Fraction], cap_x: Fraction, caps: Sequence[Fraction],
           target: Fraction) -> tuple[Fraction, list[Fraction]]:
    """Sequential-cap chart [0,1]^{m+1} -> region; surjective and exact.

    u[0] scales x; u[l] scales t_l against the cap still allowed by the
    remaining weighted budget.  Because later coordinates re-derive their
    caps from the budget, a coordinate move slides points along the tight
    weighted face instead of stalling on it.
    """
    m = len(caps)
    xval = u[0] * cap_x
    ts = [Fraction(0)] * m
    budget = target
    for l in range(m, 0, -1):
        cap = min(caps[l - 1], Fraction(budget, l + 1))
        if cap > 0:
            ts[l - 1] = u[l] * cap
            budget -= (l + 1) * ts[l - 1]
    return xval, ts


def _invert_u(xval: Fraction, ts: Sequence[Fraction], cap_x: Fraction,
              caps: Sequence[Fraction], target: Fraction) -> list[Fraction]:
    m = len(caps)
    u = [Fraction(0)] * (m + 1)
    if cap_x > 0:
        u[0] = min(Fraction(xval, cap_x), Fraction(1))
    budget = target
    for l in range(m, 0, -1):
        cap = min(caps[l - 1], Fraction(budget, l + 1))
        if cap > 0:
            u[l] = min(Fraction(ts[l - 1], cap), Fraction(1))
        budget -= (l + 1) * ts[l - 1]
    return u


def _golden_polish(params: SurfaceParams, xval: Fraction, ts: list[Fraction],
                   value: PrecisionReal, prec: int, cap_x: Fraction,
                   caps: Sequence[Fraction], target: Fraction):
    """Cyclic golden-section ascent in the sequential-cap chart."""
    rel_tol = Fraction(1, 2 ** (prec // 4))
    invphi = Fraction(61803398875, 10 ** 11)  # rational golden ratio proxy
    u = _invert_u(xval, ts, cap_x, caps, target)
    active = [j for j in range(len(u))
              if (j == 0 and cap_x > 0) or (j > 0 and caps[j - 1] > 0)]

    def eval_u(coord: int, v: Fraction) -> PrecisionReal:
        trial = list(u)
        trial[coord] = v
        tx, tts = _map_u(trial, cap_x, caps, target)
        return s_value(params, _point_from(tx, tts, prec))

    for _ in range(3):
        sweep_gain = False
        for coord in active:
            lo, hi = Fraction(0), Fraction(1)

            def probe(lo_, hi_, frac_of_width):
                v = _round_fraction(lo_ + frac_of_width * (hi_ - lo_), prec)
                return min(max(v, lo_), hi_)

            a, b = probe(lo, hi, 1 - invphi), probe(lo, hi, invphi)
            fa, fb = eval_u(coord, a), eval_u(coord, b)
            guard = 0
            while hi - lo > rel_tol:
                guard += 1
                if guard > 4 * prec:
                    break
                if fa < fb:
                    lo, a, fa = a, b, fb
                    b = probe(lo, hi, invphi)
                    fb = eval_u(coord, b)
                else:
                    hi, b, fb = b, a, fa
                    a = probe(lo, hi, 1 - invphi)
                    fa = eval_u(coord, a)
            cand = (lo + hi) / 2
            cand_val = eval_u(coord, cand)
            best_end, best_end_val = (a, fa) if fa >= fb else (b, fb)
            if best_end_val > cand_val:
                cand, cand_val = best_end, best_end_val
            if cand_val > value:
                u[coord] = cand
                value = cand_val
                sweep_gain = True
        if not sweep_gain:
            break
    xval, ts = _map_u(u, cap_x, caps, target)
    return xval, ts, value


# ----------------------------------------------------------------------
# the inverse
# ----------------------------------------------------------------------

@dataclass
class PsiDiagnostics:
    theta: PrecisionReal
    target: PrecisionReal
    i_at_zero: PrecisionReal | None
    i_at_edge: PrecisionReal
    i_at_edge_kind: str  # closed-form | corner-lower-bound | numerical
    sigma: PrecisionReal
    iterations: int
    width: PrecisionReal | None
    method: str
    zero_branch: bool
    clamped: bool
    fallback_comparisons: int
    bracket: tuple[PrecisionReal, PrecisionReal] | None
    condition_slacks: dict[str, float] | None

    def as_dict(self, digits: int = 30) -> dict:
        def fmt(v):
            return None if v is None else truncate_decimal(v, digits)

        return {
            "theta": fmt(self.theta),
            "target": fmt(self.target),
            "i_at_zero": fmt(self.i_at_zero),
            "i_at_edge": fmt(self.i_at_edge),
            "i_at_edge_kind": self.i_at_edge_kind,
            "sigma": fmt(self.sigma),
            "iterations": self.iterations,
            "width": fmt(self.width),
            "method": self.method,
            "zero_branch": self.zero_branch,
            "clamped": self.clamped,
            "fallback_comparisons": self.fallback_comparisons,
            "bracket": None if self.bracket is None else
                       [fmt(self.bracket[0]), fmt(self.bracket[1])],
            "condition_slacks": self.condition_slacks,
        }


@dataclass(frozen=True)
class PsiResult:
    value: PrecisionReal
    diagnostics: PsiDiagnostics


def _i_exceeds(problem: PsiProblem, sigma: PrecisionReal,
               target: PrecisionReal) -> tuple[bool, str]:
    """(I(sigma) > target?, how) using only cheap corner evaluations.

    "exact" means conditions certify the corner equals the maximum;
    "corner" means the feasible corner alone already exceeds the target
    (a sound one-sided certificate); "tentative" means the comparison is
    a corner-based guess that the refinement phase must confirm.
    """
    params = problem.surface_at(sigma)
    report = check_conditions(params)
    if report.corner_feasible:
        corner_value = s_value(params, report.corner.corner_point(problem.precision))
        if report.all_passed:
            return corner_value > target, "exact"
        if corner_value > target:
            return True, "corner"
        return False, "tentative"
    return False, "tentative"


def _edge_probe(problem: PsiProblem, sigma_edge: PrecisionReal,
                target: PrecisionReal) -> tuple[PrecisionReal, str, bool]:
    """(value, kind, value > target) for the near-limit evaluation.

    When the feasible corner already exceeds the target, it certifies the
    comparison as a lower bound of the true maximum and the expensive
    numerical search is skipped; the reported value is then conservative
    (an underestimate), which can only favor the zero branch.
    """
    params = problem.surface_at(sigma_edge)
    report = check_conditions(params)
    corner_value = None
    if report.corner_feasible:
        corner_value = s_value(params, report.corner.corner_point(problem.precision))
        if report.all_passed:
            return corner_value, "closed-form", corner_value > target
        if corner_value > target:
            return corner_value, "corner-lower-bound", True
    _, best = _maximize_surface(params)
    if corner_value is not None and corner_value > best:
        best = corner_value
    return best, "numerical", best > target


def psi_value(problem: PsiProblem) -> PsiResult:
    """Invert the I-function against the class-number growth target."""
    prec = problem.precision
    profile = problem.profile
    target = class_number_target(profile, prec)
    theta = as_real(problem.theta_exact(), prec)
    zero = as_real(0, prec)

    with mp.workprec(prec):
        edge_mpf = theta.value * (1 - mp.ldexp(1, -(prec // 2)))
    sigma_edge = PrecisionReal(edge_mpf, prec)
    edge_value, edge_kind, edge_exceeds = _edge_probe(problem, sigma_edge, target)

    def zero_result(i_zero, method, zero_branch, clamped):
        diag = PsiDiagnostics(
            theta=theta, target=target, i_at_zero=i_zero, i_at_edge=edge_value,
            i_at_edge_kind=edge_kind, sigma=zero, iterations=0, width=None,
            method=method, zero_branch=zero_branch, clamped=clamped,
            fallback_comparisons=0, bracket=None, condition_slacks=None,
        )
        return PsiResult(zero, diag)

    if not edge_exceeds:
        return zero_result(None, edge_kind if edge_kind != "corner-lower-bound"
                           else "numerical", True, False)

    at_zero = i_value(problem, zero)
    if at_zero.value >= target:
        return zero_result(at_zero.value, at_zero.method, False, True)

    lo, hi = zero, sigma_edge
    width_target = theta * PrecisionReal(mp.ldexp(1, -(prec - 16)), prec)
    iterations = 0
    fallbacks = 0
    tentative_used = False
    max_iterations = 4 * prec
    while hi - lo > width_target:
        if iterations >= max_iterations:
            raise ArithmeticError("bisection failed to converge within 4*precision steps")
        mid = (lo + hi) / 2
        exceeds, how = _i_exceeds(problem, mid, target)
        fallbacks += how != "exact"
        tentative_used |= how == "tentative"
        if exceeds:
            hi = mid
        else:
            lo = mid
        iterations += 1

    sigma_star = (lo + hi) / 2
    reports = [check_conditions(problem.surface_at(s)) for s in (lo, sigma_star, hi)]
    closed = (not tentative_used) and \
        all(r.all_passed and r.corner_feasible for r in reports)

    if not closed and tentative_used:
        sigma_star, lo, hi, extra = _refine_root(problem, hi, target, width_target)
        iterations += extra

    diag = PsiDiagnostics(
        theta=theta, target=target, i_at_zero=at_zero.value, i_at_edge=edge_value,
        i_at_edge_kind=edge_kind, sigma=sigma_star, iterations=iterations,
        width=hi - lo, method="closed-form" if closed else "numerical",
        zero_branch=False, clamped=False, fallback_comparisons=fallbacks,
        bracket=(lo, hi),
        condition_slacks=reports[1].slack_summary() if closed else None,
    )
    return PsiResult(sigma_star, diag)


def _fixed_point_root(problem: PsiProblem, point: SPoint, hi: PrecisionReal,
                      target: PrecisionReal,
                      width_target: PrecisionReal) -> tuple[PrecisionReal, int]:
    """Root of sigma -> surface value at a frozen (x, t), bisected cheaply.

    The frozen point is feasible at every smaller sigma once x is clamped
    into [0, sigma/gamma]; its value is a lower bound of the maximum, so
    the root is always an upper bound for the true inverse.
    """
    prec = problem.precision
    ts = [_fr(t) for t in point.ts]

    def value_at(sigma: PrecisionReal) -> PrecisionReal:
        params = problem.surface_at(sigma)
        xval = min(_fr(point.x), params.sigma_over_gamma)
        return s_value(params, _point_from(xval, ts, prec))

    lo = as_real(0, prec)
    iterations = 0
    while hi - lo > width_target and iterations < 4 * prec:
        mid = (lo + hi) / 2
        if value_at(mid) > target:
            hi = mid
        else:
            lo = mid
        iterations += 1
    return hi, iterations


def _refine_root(problem: PsiProblem, hi: PrecisionReal, target: PrecisionReal,
                 width_target: PrecisionReal,
                 max_rounds: int = 4) -> tuple[PrecisionReal, PrecisionReal,
                                               PrecisionReal, int]:
    """Alternate maximizing at sigma and re-rooting the frozen maximizer.

    Starting from an upper anchor with I(hi) > target, each round finds the
    maximizer there and moves to the root of its frozen surface value: a
    decreasing sequence of upper bounds on the true inverse.  Stops when a
    round no longer moves by more than the numerical tolerance."""
    prec = problem.precision
    stop = as_real(problem.theta_exact(), prec) * \
        PrecisionReal(mp.ldexp(1, -(prec // 4)), prec)
    sigma = hi
    iterations = 0
    for _ in range(max_rounds):
        params = problem.surface_at(sigma)
        point, best = _maximize_surface(params)
        report = check_conditions(params)
        if report.corner_feasible:
            corner_point = report.corner.corner_point(prec)
            corner_value = s_value(params, corner_point)
            if corner_value > best:
                point, best = corner_point, corner_value
        if not best > target:
            break  # anchor no longer exceeds: keep the previous upper bound
        new_sigma, used = _fixed_point_root(problem, point, sigma, target,
                                            width_target)
        iterations += used
        moved = sigma - new_sigma
        sigma = new_sigma
        if moved < stop:
            break
    lo = sigma - stop if sigma - stop > 0 else as_real(0, prec)
    return sigma, lo, sigma, iterations
