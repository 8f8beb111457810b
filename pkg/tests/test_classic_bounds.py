from fractions import Fraction

import pytest

from agbounds.classic_bounds import (
    IharaProfile,
    UnknownIharaBound,
    gv_bound,
    ihara_lower,
    ihara_lower_exact,
    make_profile,
    no1_bound,
    prime_power_base,
    tvz_bound,
)
from agbounds.numerics import DomainError, agrees_to_ulps, as_real, logq, truncate_decimal
from oracles import truncate_fraction

PREC = 192

GV_2_011_DIGITS = "0.50008404183547200435950040586972"  # frozen via series oracle
DELTA_71 = Fraction(13763868443250238929521503984833381597731412559044,
                    46065097831342932365531985486767649347321318605709)


def test_prime_power_base():
    assert prime_power_base(64) == (2, 6)
    assert prime_power_base(49) == (7, 2)
    assert prime_power_base(2 ** 21) == (2, 21)
    assert prime_power_base(97) == (97, 1)
    for bad in (1, 6, 12, 100):
        with pytest.raises(DomainError):
            prime_power_base(bad)


def test_ihara_square_values():
    assert ihara_lower(64, PREC).as_fraction() == 7
    assert ihara_lower(49, PREC).as_fraction() == 6
    for p in (2, 3, 5, 7, 11, 13, 97):
        assert ihara_lower(p * p, PREC).as_fraction() == p - 1


def test_ihara_square_preferred_over_cube():
    # 64 is both a square and a cube; the square value 7 beats 2*15/6 = 5
    assert ihara_lower_exact(64) == 7
    assert ihara_lower_exact(4096) == 63  # 2^12, square wins again


def test_ihara_cube_value():
    assert ihara_lower_exact(2 ** 21) == Fraction(32766, 130)
    assert truncate_decimal(ihara_lower(2 ** 21, PREC), 20) == \
        truncate_fraction(Fraction(32766, 130), 20)
    assert ihara_lower_exact(8) == Fraction(2 * 3, 4)  # 2(4-1)/(2+2)


def test_ihara_unknown_profile():
    for q in (2, 3, 5, 32, 128):
        with pytest.raises(UnknownIharaBound):
            ihara_lower_exact(q)
    with pytest.raises(DomainError):
        ihara_lower_exact(24)


def test_gv_bound_endpoint_and_regression():
    assert gv_bound(2, Fraction(1, 2), PREC).as_fraction() == 0
    assert gv_bound(5, Fraction(4, 5), PREC).as_fraction() == 0
    got = truncate_decimal(gv_bound(2, Fraction(11, 100), 256), 32)
    assert got == GV_2_011_DIGITS


def test_gv_bound_near_zero_limit():
    value = gv_bound(64, Fraction(1, 10 ** 9), PREC)
    assert abs(float(value.value) - 1) < 1e-7


def test_gv_bound_domain_errors():
    with pytest.raises(DomainError):
        gv_bound(2, 0, PREC)
    with pytest.raises(DomainError):
        gv_bound(2, Fraction(51, 100), PREC)
    with pytest.raises(DomainError):
        gv_bound(2, Fraction(-1, 10), PREC)


def test_gv_bound_strictly_decreasing_grid():
    previous = None
    for k in range(1, 1001):
        delta = Fraction(k, 1001) * Fraction(1, 2)
        value = gv_bound(2, delta, 128)
        if previous is not None:
            assert value < previous
        previous = value


def test_tvz_values():
    assert agrees_to_ulps(tvz_bound(0, 7, PREC), as_real(Fraction(6, 7), PREC), 2)
    assert agrees_to_ulps(tvz_bound(1, 2, PREC), as_real(Fraction(-1, 2), PREC), 2)
    exact = 1 - DELTA_71 - Fraction(1, 7)
    got = truncate_decimal(tvz_bound(DELTA_71, 7, 256), 32)
    assert got == truncate_fraction(exact, 32)
    with pytest.raises(DomainError):
        tvz_bound(Fraction(1, 2), 0, PREC)
    with pytest.raises(DomainError):
        tvz_bound(Fraction(3, 2), 7, PREC)


def test_no1_values():
    base = no1_bound(64, Fraction(1, 4), 7, PREC)
    diff = base - tvz_bound(Fraction(1, 4), 7, PREC)
    bump = logq(1 + Fraction(1, 64 ** 3), 64, PREC)
    # the subtraction cancels ~20 bits, so measure in ulps of the bound itself
    assert abs((diff - bump).value) <= 4 * float(4 * __import__("agbounds").ulp(base))
    two = no1_bound(2, 1, 1, PREC)
    assert agrees_to_ulps(two, logq(Fraction(9, 8), 2, PREC), 4)
    direct = as_real(Fraction(6, 7), PREC) + logq(1 + Fraction(1, 2 ** 18), 64, PREC)
    assert agrees_to_ulps(no1_bound(64, 0, 7, PREC), direct, 4)


def test_no1_strictly_above_tvz():
    for q, gamma, delta in ((2, 1, Fraction(1, 3)), (64, 7, Fraction(2, 5)),
                            (49, 6, Fraction(9, 10))):
        assert no1_bound(q, delta, gamma, PREC) > tvz_bound(delta, gamma, PREC)


def test_profile_validation_and_defaults():
    profile = make_profile(64, precision=PREC)
    assert profile.gamma.as_fraction() == 7
    assert profile.effective_gamma_l()[1].as_fraction() == 7
    override = make_profile(64, gamma_l={1: 0}, precision=PREC)
    assert override.effective_gamma_l()[1].as_fraction() == 0
    extra = make_profile(64, gamma_l={2: Fraction(1, 10)}, precision=PREC)
    table = extra.effective_gamma_l()
    assert table[1].as_fraction() == 7 and table[2].as_fraction() == Fraction(1, 10)
    with pytest.raises(DomainError):
        make_profile(64, gamma=0, precision=PREC)
    with pytest.raises(DomainError):
        make_profile(64, gamma_l={2: -1}, precision=PREC)
    with pytest.raises(UnknownIharaBound):
        make_profile(5, precision=PREC)
