import random
from fractions import Fraction
from math import comb

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from agbounds.numerics import (
    DomainError,
    PrecisionReal,
    agrees_to_ulps,
    as_real,
    as_real_floor,
    entropy_q,
    logq,
    mpf_to_fraction,
    parse_exact,
    truncate_decimal,
    ulp,
    xlogq,
)
from oracles import logq_fraction, truncate_fraction

PREC = 192

# frozen from the rational series oracle in oracles.py
LOG2_3_DIGITS = "1.5849625007211561814537389439478165087598"
ENTROPY_QUARTER_DIGITS = "0.81127812445913286390969579203913"


def test_parse_exact_forms():
    assert parse_exact("64") == 64
    assert parse_exact("2^21") == 2 ** 21
    assert parse_exact("2^-3") == Fraction(1, 8)
    assert parse_exact("3/7") == Fraction(3, 7)
    assert parse_exact("0.29879") == Fraction(29879, 100000)
    assert parse_exact("3.41e-16") == Fraction(341, 10 ** 18)
    for bad in ("", "x", "1/0", "2^x"):
        with pytest.raises(DomainError):
            parse_exact(bad)


def test_precision_floor_enforced():
    with pytest.raises(DomainError):
        as_real(1, 32)


def test_minimum_precision_propagates():
    a = as_real(Fraction(1, 3), 256)
    b = as_real(Fraction(1, 7), 128)
    assert (a + b).precision == 128
    assert (a * b).precision == 128
    assert (a / b).precision == 128
    assert (1 - a).precision == 256


def test_comparisons_are_total_and_exact():
    a = as_real(Fraction(1, 3), PREC)
    b = as_real(Fraction(1, 3), PREC)
    assert a == b and not a < b and a <= b
    assert as_real(1, PREC) > a
    assert a < Fraction(1, 2)
    assert hash(a) == hash(b)


def test_mpf_to_fraction_roundtrip_is_exact():
    x = as_real(Fraction(355, 113), PREC)
    fr = x.as_fraction()
    again = as_real(fr, PREC)
    assert again.value == x.value
    # conversion must not re-round at the ambient (53-bit) context
    assert abs(fr - Fraction(355, 113)) < Fraction(1, 2 ** (PREC - 8))


def test_as_real_floor_rounds_toward_zero():
    fr = Fraction(2, 3)
    down = as_real_floor(fr, 64)
    assert down.as_fraction() < fr
    up = as_real_floor(-fr, 64)
    assert up.as_fraction() > -fr


def test_logq_exact_integer_powers():
    assert logq(8, 2, PREC).as_fraction() == 3
    assert logq(64, 64, PREC).as_fraction() == 1
    assert logq(Fraction(1, 2), 2, PREC).as_fraction() == -1
    assert logq(1, 7, PREC).as_fraction() == 0
    assert logq(2 ** 21, 2, PREC).as_fraction() == 21


def test_logq_matches_series_oracle():
    got = truncate_decimal(logq(3, 2, 256), 40)
    assert got == LOG2_3_DIGITS
    # the oracle itself re-derives the frozen digits
    assert truncate_fraction(logq_fraction(Fraction(3), 2), 40) == LOG2_3_DIGITS


def test_logq_domain_errors():
    with pytest.raises(DomainError):
        logq(0, 2, PREC)
    with pytest.raises(DomainError):
        logq(Fraction(-1, 2), 2, PREC)
    with pytest.raises(DomainError):
        logq(3, 1, PREC)


def test_xlogq_conventions():
    assert xlogq(0, 2, PREC).as_fraction() == 0
    assert xlogq(1, 7, PREC).as_fraction() == 0
    assert xlogq(Fraction(1, 2), 2, PREC).as_fraction() == Fraction(-1, 2)
    with pytest.raises(DomainError):
        xlogq(Fraction(-1, 10), 2, PREC)
    with pytest.raises(DomainError):
        xlogq(Fraction(11, 10), 2, PREC)


def test_entropy_examples():
    assert entropy_q(0, 64, PREC).as_fraction() == 0
    assert entropy_q(1, 64, PREC).as_fraction() == 0
    assert entropy_q(Fraction(1, 2), 2, PREC).as_fraction() == 1
    got = truncate_decimal(entropy_q(Fraction(1, 4), 2, 256), 32)
    assert got == ENTROPY_QUARTER_DIGITS
    with pytest.raises(DomainError):
        entropy_q(Fraction(3, 2), 2, PREC)


def test_entropy_symmetry_thousand_points():
    # dyadic samples: x and 1-x are then both exactly representable,
    # so the comparison probes the function, not input rounding
    rng = random.Random(0)
    for _ in range(1000):
        x = Fraction(rng.getrandbits(50) | 1, 2 ** 50)
        lhs = entropy_q(x, 3, PREC)
        rhs = entropy_q(1 - x, 3, PREC)
        assert agrees_to_ulps(lhs, rhs, 2)


def test_entropy_concavity_spot_checks():
    rng = random.Random(1)
    for _ in range(300):
        a = Fraction(rng.getrandbits(40) | 1, 2 ** 40)
        b = Fraction(rng.getrandbits(40) | 1, 2 ** 40)
        mid = entropy_q((a + b) / 2, 2, PREC)
        avg = (entropy_q(a, 2, PREC) + entropy_q(b, 2, PREC)) / 2
        slack = 2 * ulp(mid)
        assert mid.value >= avg.value - slack


def test_entropy_matches_binomial_growth():
    """Exact big-integer binomials approach the entropy value monotonically."""
    target = entropy_q(Fraction(1, 3), 2, 256)
    errors = []
    for n in (100, 1000, 10000):
        k = n // 3
        rate = logq(comb(n, k), 2, 256) / n
        errors.append(abs(float(rate.value - target.value)))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 0.01


def test_precision_degradation_bound():
    for maker in (lambda p: logq(3, 2, p),
                  lambda p: entropy_q(Fraction(1, 4), 2, p),
                  lambda p: xlogq(Fraction(2, 7), 5, p)):
        base = maker(PREC)
        doubled = maker(2 * PREC)
        rel = abs((doubled - base).value / doubled.value)
        assert rel < mp.ldexp(1, -(PREC // 2))


def test_entropy_tiny_argument_no_cancellation():
    x = Fraction(1, 10 ** 120)
    value = entropy_q(x, 2, PREC)
    expected = logq_fraction(x, 2, 200)
    approx = -(x * expected) + x / ln2_fraction_cache()
    rel = abs((value.as_fraction() - approx) / approx)
    assert rel < Fraction(1, 10 ** 30)


def ln2_fraction_cache():
    from oracles import ln_fraction
    return ln_fraction(Fraction(2), 60)


def test_truncate_decimal_truncates_not_rounds():
    x = as_real(Fraction(2, 3), PREC)
    assert truncate_decimal(x, 5) == "0.66666"
    assert truncate_decimal(as_real(Fraction(-2, 3), PREC), 3) == "-0.666"
    assert truncate_decimal(as_real(Fraction(999999, 1000000), PREC), 2) == "0.99"
    assert truncate_decimal(as_real(5, PREC), 0) == "5"


def test_ulp_agreement_helper():
    a = as_real(Fraction(1, 3), PREC)
    b = a + PrecisionReal(mp.ldexp(1, -PREC + 1), PREC) * a
    assert agrees_to_ulps(a, a, 0)
    assert agrees_to_ulps(a, b, 4)
    assert not agrees_to_ulps(a, a + Fraction(1, 1000), 4)


@given(st.fractions(min_value=Fraction(1, 10 ** 6), max_value=Fraction(10 ** 6)))
def test_logq_inverse_of_power_roundtrip(x):
    """q**logq(x) recovers x to working accuracy for generic inputs."""
    val = logq(x, 2, PREC)
    with mp.workprec(PREC):
        back = mp.mpf(2) ** val.value
    assert abs(mpf_to_fraction(back) - x) <= Fraction(x) / 2 ** (PREC - 16)
