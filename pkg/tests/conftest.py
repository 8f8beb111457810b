import time

import pytest

from agbounds import make_bound_problem, make_profile, r_general, r_lin
from agbounds.reference_cases import REFERENCE_CASES

ACCEPTANCE_PRECISION = 768


@pytest.fixture(scope="session")
def bench():
    """All benchmark-case bound evaluations at 768 bits, with wall times."""
    out = {}
    for label, case in REFERENCE_CASES.items():
        profile = make_profile(case.q, case.gamma, precision=ACCEPTANCE_PRECISION)
        started = time.monotonic()
        rows = []
        for sub in case.cases:
            lin = r_lin(profile, sub.delta, ACCEPTANCE_PRECISION)
            problem = make_bound_problem(profile, sub.delta, sub.xs,
                                         ACCEPTANCE_PRECISION)
            gen = r_general(problem)
            rows.append({"sub": sub, "lin": lin, "gen": gen})
        out[label] = {
            "case": case,
            "profile": profile,
            "rows": rows,
            "elapsed": time.monotonic() - started,
        }
    return out
