"""Headline rate lower bounds, comparison tables, and an x-vector search.

r_general evaluates the full bound: the tower part 1 - d - 1/gamma, an
entropy block in the x-vector, a linear penalty sum (l+3) x_l, and the
inverted-surface credit psi/gamma with y = 1 - d - 2(2x_1 + ... + (m+1)x_m)
substituted internally.  r_lin is the linear-code specialization at x = 0.
Results carry a named component breakdown that sums to the total.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .classic_bounds import IharaProfile, gv_bound, no1_bound, tvz_bound
from .numerics import (
    DEFAULT_PRECISION,
    DomainError,
    PrecisionReal,
    RealLike,
    as_real,
    exact_value,
    truncate_decimal,
    xlogq,
    logq,
)
from .psi_solver import PsiResult, make_psi_problem, psi_value
from .s_surface import weighted_x_sum, _fr


@dataclass(frozen=True)
class BoundProblem:
    """Inputs of one general-bound evaluation."""

    profile: IharaProfile
    delta: PrecisionReal
    xs: tuple[PrecisionReal, ...]
    precision: int

    def __post_init__(self):
        if len(self.xs) < 1:
            raise DomainError("at least one x coordinate is required (m >= 1)")
        d = _fr(self.delta)
        ceiling = 1 - weighted_x_sum(self.xs)
        if d <= 0 or d >= ceiling:
            raise DomainError(
                "domain requires 0 < delta < 1 - 2(2x_1 + ... + (m+1)x_m)"
            )

    @property
    def m(self) -> int:
        return len(self.xs)


def make_bound_problem(profile: IharaProfile, delta: RealLike,
                       xs: Sequence[RealLike],
                       precision: int = DEFAULT_PRECISION) -> BoundProblem:
    return BoundProblem(
        profile=profile,
        delta=as_real(delta, precision),
        xs=tuple(as_real(x, precision) for x in xs),
        precision=precision,
    )


@dataclass(frozen=True)
class BoundResult:
    """A bound value with its named component breakdown and diagnostics."""

    value: PrecisionReal
    components: dict[str, PrecisionReal]
    psi: PsiResult

    def component_sum(self) -> PrecisionReal:
        total = None
        for part in self.components.values():
            total = part if total is None else total + part
        return total


def r_general(problem: BoundProblem) -> BoundResult:
    """The full lower bound at the problem's delta and x-vector."""
    prec = problem.precision
    profile = problem.profile
    q = profile.q
    delta = problem.delta
    xs = problem.xs

    y_exact = 1 - _fr(delta) - weighted_x_sum(xs)
    y = as_real(y_exact, prec)
    psi = psi_value(make_psi_problem(profile, y, xs, prec))

    tvz_part = 1 - delta - 1 / profile.gamma

    xsum_exact = sum((_fr(x) for x in xs), Fraction(0))
    xsum = as_real(xsum_exact, prec)
    entropy_part = xsum * logq(q - 1, q, prec)
    for x in xs:
        entropy_part = entropy_part - xlogq(x, q)
    entropy_part = entropy_part - xlogq(as_real(1 - xsum_exact, prec), q)

    penalty_exact = sum(((l + 4) * _fr(x) for l, x in enumerate(xs)), Fraction(0))
    penalty_part = -as_real(penalty_exact, prec)

    psi_part = psi.value / profile.gamma
    value = tvz_part + entropy_part + penalty_part + psi_part
    return BoundResult(
        value=value,
        components={
            "tvz": tvz_part,
            "entropy_x": entropy_part,
            "linear_penalty": penalty_part,
            "psi_over_gamma": psi_part,
        },
        psi=psi,
    )


def r_lin(profile: IharaProfile, delta: RealLike,
          precision: int = DEFAULT_PRECISION) -> BoundResult:
    """Linear-code bound 1 - d - 1/gamma + psi(1 - d, 0)/gamma."""
    d = as_real(delta, precision)
    d_exact = _fr(d)
    if d_exact <= 0 or d_exact >= 1:
        raise DomainError("r_lin requires 0 < delta < 1")
    zero = as_real(0, precision)
    y = as_real(1 - d_exact, precision)
    psi = psi_value(make_psi_problem(profile, y, (zero,), precision))
    tvz_part = 1 - d - 1 / profile.gamma
    psi_part = psi.value / profile.gamma
    value = tvz_part + zero + zero + psi_part
    return BoundResult(
        value=value,
        components={
            "tvz": tvz_part,
            "entropy_x": zero,
            "linear_penalty": zero,
            "psi_over_gamma": psi_part,
        },
        psi=psi,
    )


# ----------------------------------------------------------------------
# x-vector search
# ----------------------------------------------------------------------

LOG10_RANGE = (-130, -5)


def optimize_x(profile: IharaProfile, delta: RealLike, m: int, budget: int,
               precision: int = DEFAULT_PRECISION
               ) -> tuple[tuple[PrecisionReal, ...], BoundResult]:
    """Best-effort coordinate search over log10(x_l); clearly heuristic.

    Seeds with the all-zero vector (so the result never falls below the
    linear bound) and with curated magnitudes when q matches a benchmark
    case, then golden-section refines one coordinate at a time within
    log10(x_l) in [-130, -5] until the evaluation budget is exhausted.
    """
    if m < 1:
        raise DomainError("optimize_x requires m >= 1")
    if budget < 1:
        raise DomainError("optimize_x requires a positive evaluation budget")
    delta_exact = exact_value(delta)

    evaluations = 0

    def evaluate(xs_exact: tuple[Fraction, ...]) -> BoundResult | None:
        nonlocal evaluations
        if evaluations >= budget:
            return None
        evaluations += 1
        try:
            problem = make_bound_problem(profile, delta_exact, xs_exact, precision)
        except DomainError:
            return None
        return r_general(problem)

    from .reference_cases import seed_vectors_for

    seeds: list[tuple[Fraction, ...]] = [tuple(Fraction(0) for _ in range(m))]
    seeds.extend(seed_vectors_for(profile.q, m))

    best_xs, best = None, None
    for seed in seeds:
        result = evaluate(seed)
        if result is not None and (best is None or result.value > best.value):
            best_xs, best = seed, result

    lo_e, hi_e = LOG10_RANGE
    invphi = Fraction(61803398875, 10 ** 11)

    improved = True
    while evaluations < budget and improved and best_xs is not None:
        improved = False
        for coord in range(m):
            lo, hi = Fraction(lo_e), Fraction(hi_e)

            def at_exponent(e: Fraction):
                xs = list(best_xs)
                xs[coord] = _pow10(e, precision)
                return evaluate(tuple(xs))

            a = lo + (1 - invphi) * (hi - lo)
            b = lo + invphi * (hi - lo)
            fa, fb = at_exponent(a), at_exponent(b)
            while evaluations < budget and fa is not None and fb is not None \
                    and hi - lo > Fraction(1, 4):
                if fa.value < fb.value:
                    lo, a, fa = a, b, fb
                    b = lo + invphi * (hi - lo)
                    fb = at_exponent(b)
                else:
                    hi, b, fb = b, a, fa
                    a = lo + (1 - invphi) * (hi - lo)
                    fa = at_exponent(a)
            for cand in (fa, fb):
                if cand is not None and cand.value > best.value:
                    e = a if cand is fa else b
                    xs = list(best_xs)
                    xs[coord] = _pow10(e, precision)
                    best_xs, best = tuple(xs), cand
                    improved = True
            if evaluations >= budget:
                break

    xs_out = tuple(as_real(x, precision) for x in best_xs)
    return xs_out, best


def _pow10(exponent: Fraction, precision: int) -> Fraction:
    """10**exponent as an exact dyadic snapshot at the working precision."""
    import mpmath as mp

    with mp.workprec(precision):
        value = mp.mpf(10) ** (mp.mpf(exponent.numerator) / exponent.denominator)
    from .numerics import mpf_to_fraction
    return mpf_to_fraction(value)


# ----------------------------------------------------------------------
# comparison tables
# ----------------------------------------------------------------------

@dataclass
class TableRow:
    delta: Fraction
    gv: PrecisionReal | None = None
    tvz: PrecisionReal | None = None
    no1: PrecisionReal | None = None
    r_lin: PrecisionReal | None = None
    r_general: PrecisionReal | None = None
    best: str | None = None
    errors: dict[str, str] = field(default_factory=dict)


CSV_HEADER = "delta,gv,tvz,no1,r_lin,r_general,best"
_BOUND_COLUMNS = ("gv", "tvz", "no1", "r_lin", "r_general")


def compare_table(profile: IharaProfile, deltas: Sequence[RealLike], m: int,
                  xs: Sequence[RealLike] | str | None,
                  precision: int = DEFAULT_PRECISION,
                  budget: int = 50) -> list[TableRow]:
    """One row per delta with all five bounds at shared precision.

    ``xs`` is a literal x-vector, the string "optimize" to run the
    coordinate search per row, or None to skip the general bound.
    Per-row domain errors are recorded in the row, never raised.
    """
    rows = []
    for delta in deltas:
        d_exact = Fraction(exact_value(delta))
        row = TableRow(delta=d_exact)

        def attempt(name, thunk):
            try:
                return thunk()
            except DomainError as exc:
                row.errors[name] = str(exc)
                return None

        row.gv = attempt("gv", lambda: gv_bound(profile.q, d_exact, precision))
        row.tvz = attempt("tvz", lambda: tvz_bound(d_exact, profile.gamma, precision))
        row.no1 = attempt("no1", lambda: no1_bound(profile.q, d_exact, profile.gamma,
                                                   precision))
        lin = attempt("r_lin", lambda: r_lin(profile, d_exact, precision))
        row.r_lin = lin.value if lin is not None else None
        if xs is None:
            pass
        elif xs == "optimize":
            found = attempt("r_general",
                            lambda: optimize_x(profile, d_exact, m, budget, precision))
            if found is not None:
                row.r_general = found[1].value
        else:
            def general():
                problem = make_bound_problem(profile, d_exact, xs, precision)
                return r_general(problem).value
            row.r_general = attempt("r_general", general)

        candidates = {name: getattr(row, name) for name in _BOUND_COLUMNS}
        present = {name: v for name, v in candidates.items() if v is not None}
        if present:
            row.best = max(present, key=lambda name: present[name])
        rows.append(row)
    return rows


def format_exact_fraction(value: Fraction) -> str:
    """Exact text form: terminating decimal when possible, else p/q."""
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    shift = max(twos, fives)
    scaled = value.numerator * 10 ** shift // value.denominator
    return truncate_decimal(Fraction(scaled, 10 ** shift), shift)


def rows_to_csv(rows: Sequence[TableRow], digits: int = 30) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        cells = [format_exact_fraction(row.delta)]
        for name in _BOUND_COLUMNS:
            value = getattr(row, name)
            cells.append("" if value is None else truncate_decimal(value, digits))
        cells.append(row.best or "")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def rows_to_json(rows: Sequence[TableRow], digits: int = 30) -> list[dict]:
    out = []
    for row in rows:
        record = {"delta": format_exact_fraction(row.delta)}
        for name in _BOUND_COLUMNS:
            value = getattr(row, name)
            record[name] = None if value is None else truncate_decimal(value, digits)
        record["best"] = row.best
        if row.errors:
            record["errors"] = dict(row.errors)
        out.append(record)
    return out
