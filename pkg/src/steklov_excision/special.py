"""Real-order modified Bessel functions in overflow-safe scaled form.

Every public Bessel routine returns a :class:`ScaledValue`, i.e. a pair
``(mantissa, log_scale)`` with ``value = mantissa * exp(log_scale)``.  This
keeps ratios such as ``K_nu(x) / I_nu(x)`` representable long after the
individual factors have left the double range.

Algorithms
----------
* ``I_nu``: ascending power series (all terms positive) for
  ``x < max(30, nu**2 / 2)``; Hankel large-argument expansion otherwise.
* ``K_nu``: reduce ``nu = N + mu`` with ``|mu| <= 1/2``.  ``K_mu`` and
  ``K_{mu+1}`` come from Temme's series for ``x <= 2`` and Steed's continued
  fraction for ``x > 2``; ``K_nu`` follows by upward recurrence, which is
  stable for ``K``.  Temme's series reduces to the classical log-series when
  ``mu = 0`` so integer orders need no special casing.
* Derivatives use only ``I_0' = I_1``, ``K_0' = -K_1``,
  ``I_nu' = I_{nu-1} - (nu/x) I_nu`` and ``K_nu' = (nu/x) K_nu - K_{nu+1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import zeta

from .errors import DomainError

__all__ = [
    "ScaledValue",
    "BesselQuartet",
    "bessel_iv",
    "bessel_kv",
    "bessel_quartet",
    "log_gamma",
]

SERIES_RTOL = 1e-17
SERIES_MAX_TERMS = 500
ASYMPTOTIC_MIN_X = 30.0
_EPS = 1e-16
_MAX_ITER = 100_000
_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)
_LOG_FLOAT_MAX = math.log(1.7976931348623157e308)
_EULER_GAMMA = 0.57721566490153286061
# zeta(3), zeta(5), ... used by the odd part of log Gamma(1 + mu)
_ODD_ZETA = tuple(float(zeta(k)) for k in range(3, 64, 2))


@dataclass(frozen=True)
class ScaledValue:
    """A real number stored as ``mantissa * exp(log_scale)``.

    Instances built through :meth:`make` are normalized so that the mantissa
    is zero or has magnitude in ``[1/e, e)``.
    """

    mantissa: float
    log_scale: float = 0.0

    @classmethod
    def make(cls, mantissa: float, log_scale: float = 0.0) -> "ScaledValue":
        if not math.isfinite(mantissa) or not math.isfinite(log_scale):
            raise ArithmeticError(f"non-finite scaled value ({mantissa}, {log_scale})")
        if mantissa == 0.0:
            return cls(0.0, 0.0)
        shift = round(math.log(abs(mantissa)))
        if shift:
            # two factors: exp(-shift) alone overflows for subnormal mantissas
            half = shift // 2
            mantissa = mantissa * math.exp(-half) * math.exp(half - shift)
            log_scale = log_scale + shift
        return cls(mantissa, log_scale)

    @classmethod
    def from_float(cls, value: float) -> "ScaledValue":
        return cls.make(float(value), 0.0)

    @classmethod
    def from_log(cls, log_abs: float, sign: float = 1.0) -> "ScaledValue":
        return cls.make(math.copysign(1.0, sign), log_abs)

    def is_zero(self) -> bool:
        return self.mantissa == 0.0

    def sign(self) -> float:
        if self.mantissa == 0.0:
            return 0.0
        return math.copysign(1.0, self.mantissa)

    def log_abs(self) -> float:
        if self.mantissa == 0.0:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.log_scale

    def to_float(self) -> float:
        """Plain float; raises OverflowError instead of returning infinity."""
        if self.mantissa == 0.0:
            return 0.0
        if self.log_abs() > _LOG_FLOAT_MAX:
            raise OverflowError(f"value exp({self.log_abs():.6g}) exceeds double range")
        if self.log_scale < -745.0:
            # avoid exp underflow before the mantissa is applied
            return math.copysign(math.exp(self.log_abs()), self.mantissa)
        return self.mantissa * math.exp(self.log_scale)

    __float__ = to_float

    def __neg__(self) -> "ScaledValue":
        return ScaledValue(-self.mantissa, self.log_scale)

    def __abs__(self) -> "ScaledValue":
        return ScaledValue(abs(self.mantissa), self.log_scale)

    def __mul__(self, other) -> "ScaledValue":
        if not isinstance(other, ScaledValue):
            other = ScaledValue.from_float(other)
        if self.is_zero() or other.is_zero():
            return ScaledValue(0.0, 0.0)
        return ScaledValue.make(self.mantissa * other.mantissa, self.log_scale + other.log_scale)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScaledValue":
        if not isinstance(other, ScaledValue):
            other = ScaledValue.from_float(other)
        if other.is_zero():
            raise ZeroDivisionError("division by a zero ScaledValue")
        if self.is_zero():
            return ScaledValue(0.0, 0.0)
        return ScaledValue.make(self.mantissa / other.mantissa, self.log_scale - other.log_scale)

    def __rtruediv__(self, other) -> "ScaledValue":
        return ScaledValue.from_float(other) / self

    def __add__(self, other) -> "ScaledValue":
        if not isinstance(other, ScaledValue):
            other = ScaledValue.from_float(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        big, small = (self, other) if self.log_scale >= other.log_scale else (other, self)
        gap = small.log_scale - big.log_scale
        tail = small.mantissa * math.exp(gap) if gap > -745.0 else 0.0
        return ScaledValue.make(big.mantissa + tail, big.log_scale)

    __radd__ = __add__

    def __sub__(self, other) -> "ScaledValue":
        if not isinstance(other, ScaledValue):
            other = ScaledValue.from_float(other)
        return self + (-other)

    def __rsub__(self, other) -> "ScaledValue":
        return ScaledValue.from_float(other) - self


@dataclass(frozen=True)
class BesselQuartet:
    """``I_nu, K_nu`` and their derivatives at a single ``(nu, x)``."""

    order: float
    x: float
    i: ScaledValue
    k: ScaledValue
    i_prime: ScaledValue
    k_prime: ScaledValue

    def wronskian(self) -> ScaledValue:
        """``I K' - I' K``; equals ``-1/x`` analytically."""
        return self.i * self.k_prime - self.i_prime * self.k


def _check(nu: float, x: float) -> None:
    if not (math.isfinite(nu) and math.isfinite(x)):
        raise DomainError(f"non-finite Bessel argument (nu={nu}, x={x})")
    if nu < 0:
        raise DomainError(f"negative order nu={nu} is not supported")
    if x <= 0:
        raise DomainError(f"modified Bessel functions need x > 0, got x={x}")


def log_gamma(z: float) -> float:
    """Natural log of the Gamma function for ``z > 0``."""
    if not math.isfinite(z) or z <= 0:
        raise DomainError(f"log_gamma needs z > 0, got {z}")
    return math.lgamma(z)


def _iv_series(nu: float, x: float) -> ScaledValue:
    # sum_s (x/2)^(nu+2s) / (s! Gamma(nu+s+1)); prefactor kept in log form
    quarter_x2 = 0.25 * x * x
    total = 1.0
    term = 1.0
    extra_log = 0.0
    for s in range(1, SERIES_MAX_TERMS + 1):
        term *= quarter_x2 / (s * (s + nu))
        total += term
        if term < SERIES_RTOL * total:
            break
        if total > _RESCALE:
            total /= _RESCALE
            term /= _RESCALE
            extra_log += _LOG_RESCALE
    else:
        raise ArithmeticError(f"I series did not converge in {SERIES_MAX_TERMS} terms (nu={nu}, x={x})")
    log_prefactor = nu * math.log(0.5 * x) - math.lgamma(nu + 1.0)
    return ScaledValue.make(total, log_prefactor + extra_log)


def _hankel_terms(nu: float, x: float, sign: float) -> float:
    # sum_k sign^k a_k(nu) / x^k, a_k = prod_{i<=k}(4nu^2-(2i-1)^2) / (k! 8^k)
    mu = 4.0 * nu * nu
    total = 1.0
    term = 1.0
    prev = math.inf
    for k in range(1, _MAX_ITER):
        term *= sign * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = abs(term)
        if mag == 0.0 or mag < SERIES_RTOL * abs(total):
            break
        if mag > prev:
            # asymptotic series started to diverge; optimal truncation reached
            break
        total += term
        prev = mag
    return total


def _iv_asymptotic(nu: float, x: float) -> ScaledValue:
    total = _hankel_terms(nu, x, -1.0)
    return ScaledValue.make(total / math.sqrt(2.0 * math.pi * x), x)


def _use_asymptotic(nu: float, x: float) -> bool:
    return x >= max(ASYMPTOTIC_MIN_X, 0.5 * nu * nu)


def bessel_iv(nu: float, x: float) -> ScaledValue:
    """Modified Bessel function of the first kind ``I_nu(x)``."""
    _check(nu, x)
    if _use_asymptotic(nu, x):
        return _iv_asymptotic(nu, x)
    return _iv_series(nu, x)


def _temme_gammas(mu: float) -> tuple[float, float, float, float]:
    """gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu) for |mu| <= 1/2."""
    lg_plus = math.lgamma(1.0 + mu)
    lg_minus = math.lgamma(1.0 - mu)
    gampl = math.exp(-lg_plus)
    gammi = math.exp(-lg_minus)
    gam2 = 0.5 * (gammi + gampl)
    # gam1 = (gammi - gampl) / (2 mu) = exp(-even) * sinh(odd) / mu, where
    # odd(mu) = -gamma*mu - sum_{k odd >= 3} zeta(k) mu^k / k has a clean series
    even = 0.5 * (lg_plus + lg_minus)
    odd_over_mu = -_EULER_GAMMA
    power = 1.0
    mu2 = mu * mu
    for idx, z in enumerate(_ODD_ZETA):
        power *= mu2
        k = 3 + 2 * idx
        step = z * power / k
        odd_over_mu -= step
        if step < 1e-18:
            break
    odd = odd_over_mu * mu
    sinhc = 1.0 if abs(odd) < 1e-8 else math.sinh(odd) / odd
    gam1 = math.exp(-even) * sinhc * odd_over_mu
    return gam1, gam2, gampl, gammi


def _k_temme(mu: float, x: float) -> tuple[float, float]:
    """K_mu(x) and (x/2) K_{mu+1}(x) for x <= 2 and |mu| <= 1/2."""
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
    gam1, gam2, gampl, gammi = _temme_gammas(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    e = math.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = 1.0
    d = x2 * x2
    total1 = p
    mu2 = mu * mu
    for i in range(1, _MAX_ITER):
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= d / i
        p /= i - mu
        q /= i + mu
        delta = c * ff
        total += delta
        total1 += c * (p - i * ff)
        if abs(delta) < abs(total) * _EPS:
            break
    else:
        raise ArithmeticError(f"Temme series failed to converge (mu={mu}, x={x})")
    return total, total1


def _k_steed(mu: float, x: float) -> tuple[float, float]:
    """exp(x) K_mu(x), exp(x) K_{mu+1}(x) for x > 2 and |mu| <= 1/2."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25 - mu * mu
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, _MAX_ITER):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:
        raise ArithmeticError(f"Steed continued fraction failed to converge (mu={mu}, x={x})")
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) / s
    k1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, k1


def _kv_pair(nu: float, x: float) -> tuple[ScaledValue, ScaledValue]:
    """(K_nu(x), K_{nu+1}(x)) via reduction to |mu| <= 1/2 and upward recurrence."""
    n_up = int(math.floor(nu + 0.5))
    mu = nu - n_up
    if x <= 2.0:
        kmu, k1_half = _k_temme(mu, x)
        # K_{mu+1} ~ 1/x overflows near x = 1e-308, so factor 2/x into the log scale there
        if x < 1e-100:
            log_scale = math.log(2.0 / x)
            kmu *= 0.5 * x
            k1 = k1_half
        else:
            log_scale = 0.0
            k1 = k1_half * 2.0 / x
    else:
        kmu, k1 = _k_steed(mu, x)
        log_scale = -x
    two_over_x = 2.0 / x
    for i in range(1, n_up + 1):
        # one step can grow by ~2/x; renormalize only when it would overflow, since
        # every shift into log_scale costs a little accuracy on conversion back
        if k1 > 1e300 / ((mu + i) * two_over_x + 1.0):
            kmu /= k1
            log_scale += math.log(k1)
            k1 = 1.0
        kmu, k1 = k1, (mu + i) * two_over_x * k1 + kmu
    return ScaledValue.make(kmu, log_scale), ScaledValue.make(k1, log_scale)


def bessel_kv(nu: float, x: float) -> ScaledValue:
    """Modified Bessel function of the second kind ``K_nu(x)``."""
    _check(nu, x)
    return _kv_pair(nu, x)[0]


def bessel_quartet(nu: float, x: float) -> BesselQuartet:
    """``I_nu, K_nu, I_nu', K_nu'`` with derivatives taken from recurrences."""
    _check(nu, x)
    i_nu = bessel_iv(nu, x)
    k_nu, k_next = _kv_pair(nu, x)
    if nu == 0.0:
        i_prime = bessel_iv(1.0, x)
        k_prime = -k_next
    else:
        if nu >= 1.0:
            i_prev = bessel_iv(nu - 1.0, x)
        else:
            # I_{nu-1} = I_{nu+1} + (2 nu / x) I_nu keeps the order argument >= 0
            i_prev = bessel_iv(nu + 1.0, x) + i_nu * (2.0 * nu / x)
        i_prime = i_prev - i_nu * (nu / x)
        k_prime = k_nu * (nu / x) - k_next
    return BesselQuartet(order=nu, x=x, i=i_nu, k=k_nu, i_prime=i_prime, k_prime=k_prime)
