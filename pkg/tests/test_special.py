import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steklov_excision import DomainError, ScaledValue, bessel_iv, bessel_kv, bessel_quartet, log_gamma

mpmath.mp.dps = 40


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.mark.parametrize("z, expected", [(1.0, 0.0), (0.5, 0.5 * math.log(math.pi)), (7.0, math.log(720.0))])
def test_log_gamma_values(z, expected):
    assert log_gamma(z) == pytest.approx(expected, abs=1e-15)


def test_log_gamma_rejects_nonpositive():
    with pytest.raises(DomainError):
        log_gamma(0.0)


def test_iv_small_argument():
    assert bessel_iv(0.0, 1e-8).to_float() == pytest.approx(1.0, abs=1e-15)
    assert bessel_iv(1.0, 1e-8).to_float() == pytest.approx(5e-9, rel=1e-14)


def test_iv_half_order_against_long_series():
    x = mpmath.mpf(2)
    series = sum((x / 2) ** (2 * k + 0.5) / (mpmath.factorial(k) * mpmath.gamma(k + 1.5)) for k in range(60))
    assert rel(bessel_iv(0.5, 2.0).to_float(), float(series)) < 1e-15


def test_k0_small_argument_keeps_constant():
    k0 = bessel_kv(0.0, 1e-6).to_float()
    assert abs(k0 + math.log(1e-6)) / 13.8155 < 0.01
    assert rel(k0, float(mpmath.besselk(0, mpmath.mpf("1e-6")))) < 1e-14


def test_k2_small_argument_leading_term():
    assert rel(bessel_kv(2.0, 1e-4).to_float(), 2e8) < 1e-3


def half_integer_k(x):
    return math.exp(-x) * math.sqrt(math.pi / (2 * x)) * (1 + 1 / x)


@pytest.mark.parametrize("x", [1e-3, 0.3, 1.0, 3.0, 7.5, 20.0, 45.0])
def test_k_three_halves_closed_form(x):
    assert rel(bessel_kv(1.5, x).to_float(), half_integer_k(x)) <= 1e-13


def test_k_half_closed_form():
    for x in (0.01, 0.7, 2.0, 12.0):
        assert rel(bessel_kv(0.5, x).to_float(), math.exp(-x) * math.sqrt(math.pi / (2 * x))) <= 1e-13


def test_quartet_recurrence_identity():
    q = bessel_quartet(0.0, 2.0)
    assert q.i_prime.to_float() == bessel_iv(1.0, 2.0).to_float()


def test_quartet_wronskian_at_one():
    q = bessel_quartet(1.0, 1.0)
    assert q.wronskian().to_float() == pytest.approx(-1.0, abs=1e-14)


def test_quartet_against_finite_differences():
    nu, x, h = 3.5, 10.0, 1e-5
    q = bessel_quartet(nu, x)
    di = (bessel_iv(nu, x + h).to_float() - bessel_iv(nu, x - h).to_float()) / (2 * h)
    dk = (bessel_kv(nu, x + h).to_float() - bessel_kv(nu, x - h).to_float()) / (2 * h)
    assert rel(q.i_prime.to_float(), di) < 1e-7
    assert rel(q.k_prime.to_float(), dk) < 1e-7


@pytest.mark.parametrize("nu", [0.0, 0.25, 1.0, 2.5, 7.0, 10.0])
@pytest.mark.parametrize("x", [1e-6, 0.01, 0.9, 2.0, 2.1, 15.0, 29.9, 30.1, 50.0])
def test_against_mpmath(nu, x):
    iv = float(mpmath.besseli(nu, x))
    kv = float(mpmath.besselk(nu, x))
    assert rel(bessel_iv(nu, x).to_float(), iv) < 1e-13
    assert rel(bessel_kv(nu, x).to_float(), kv) < 1e-13


def test_extreme_arguments_stay_finite_in_scaled_form():
    i = bessel_iv(3.0, 2000.0)
    k = bessel_kv(3.0, 2000.0)
    assert i.log_abs() == pytest.approx(float(mpmath.log(mpmath.besseli(3, 2000))), rel=1e-14)
    assert k.log_abs() == pytest.approx(float(mpmath.log(mpmath.besselk(3, 2000))), rel=1e-14)
    with pytest.raises(OverflowError):
        i.to_float()


def test_small_x_leading_ratios():
    for nu in (0.5, 1.0, 3.0):
        x = 1e-7
        lead_i = (x / 2) ** nu / math.gamma(nu + 1)
        lead_k = 0.5 * math.gamma(nu) * (x / 2) ** (-nu)
        assert bessel_iv(nu, x).to_float() / lead_i == pytest.approx(1.0, abs=1e-9)
        assert bessel_kv(nu, x).to_float() / lead_k == pytest.approx(1.0, abs=1e-6)


def test_domain_errors():
    with pytest.raises(DomainError):
        bessel_iv(-1.0, 1.0)
    with pytest.raises(DomainError):
        bessel_kv(1.0, 0.0)


orders = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)
args = st.floats(min_value=1e-6, max_value=50.0, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(orders, args)
def test_wronskian_property(nu, x):
    w = bessel_quartet(nu, x).wronskian().to_float()
    assert abs(w * x + 1.0) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1.0, max_value=10.0), args)
def test_three_term_recurrence(nu, x):
    lhs = bessel_iv(nu - 1, x) - bessel_iv(nu + 1, x)
    rhs = bessel_iv(nu, x) * (2 * nu / x)
    assert rel(lhs.to_float(), rhs.to_float()) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-1e300, max_value=1e300, allow_nan=False, allow_infinity=False))
def test_scaled_value_round_trip(value):
    assert ScaledValue.from_float(value).to_float() == pytest.approx(value, rel=1e-15, abs=0.0)


def test_scaled_value_arithmetic_beyond_float_range():
    big = ScaledValue.from_log(1000.0)
    assert (big / big).to_float() == pytest.approx(1.0, rel=1e-15)
    assert ((big * 3.0) - big).log_abs() == pytest.approx(1000.0 + math.log(2.0), rel=1e-15)
    assert (big - big).is_zero()


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 5.0, 12.3])
@pytest.mark.parametrize("x", [1e-300, 1e-120, 1e-60])
def test_k_log_scale_for_tiny_arguments(nu, x):
    expected = float(mpmath.log(mpmath.besselk(nu, mpmath.mpf(x))))
    assert bessel_kv(nu, x).log_abs() == pytest.approx(expected, rel=1e-13)
