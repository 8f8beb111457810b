"""Arbitrary-precision asymptotic rate bounds for q-ary codes.

The analytic side computes classical baselines (entropy bound, tower
bound and its uniform refinement) and the improved bounds driven by a
bisection inversion of a maximized entropy surface, all over an explicit
working precision.  The combinatorial side verifies the supporting
divisor-counting and blocked-vector identities by exhaustive desk-scale
oracles over the rational function field.
"""

from .numerics import (
    DEFAULT_PRECISION,
    DomainError,
    PrecisionReal,
    agrees_to_ulps,
    as_real,
    entropy_q,
    logq,
    parse_exact,
    truncate_decimal,
    ulp,
    xlogq,
)
from .classic_bounds import (
    IharaProfile,
    UnknownIharaBound,
    gv_bound,
    ihara_lower,
    make_profile,
    no1_bound,
    tvz_bound,
)
from .s_surface import (
    ConditionReport,
    CornerData,
    NondifferentiablePointError,
    SPoint,
    SurfaceParams,
    check_conditions,
    corner_data,
    ds_dsigma,
    make_point,
    make_surface,
    region_contains,
    s_gradient,
    s_value,
    s_value_branches,
)
from .psi_solver import (
    PsiProblem,
    PsiResult,
    class_number_target,
    i_value,
    make_psi_problem,
    psi_value,
)
from .rate_bounds import (
    BoundProblem,
    BoundResult,
    compare_table,
    make_bound_problem,
    optimize_x,
    r_general,
    r_lin,
    rows_to_csv,
    rows_to_json,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
