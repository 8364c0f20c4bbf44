"""Closed-form Steklov eigenvalues of a single separated mode.

For the product annulus ``N x [eps, delta] x S^{d-1}`` (``d = m - n``) with
metric ``h + dr^2 + r^2 g_0``, a harmonic function ``F_k(p) R(r) phi_j(q)``
leads to the radial equation

    r^2 R'' + (d - 1) r R' - (lambda_k r^2 + mu_j) R = 0

with the Steklov condition ``-R'(eps) = sigma R(eps)`` on the inner sphere and
``R(delta) = 0`` (Dirichlet) or ``R'(delta) = 0`` (Neumann) on the outer one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import CodimensionError, DomainError, InconsistencyError, ModeSingularError
from .special import ScaledValue, bessel_quartet
from .spectra import BaseManifold, base_spectrum, cross_section_spectrum

BoundaryCondition = Literal["dirichlet", "neumann"]
Branch = Literal["log", "power", "harmonic", "bessel"]

_SINGULAR_RTOL = 1e-14
_ZERO_CLAMP = 1e-13


@dataclass(frozen=True)
class ProblemSpec:
    """Geometry of one mixed Steklov problem on a product annulus."""

    m: int
    n: int
    eps: float
    delta: float
    base: BaseManifold
    outer_bc: BoundaryCondition = "dirichlet"

    def __post_init__(self):
        if self.m < 2:
            raise DomainError(f"ambient dimension m must be >= 2, got {self.m}")
        if self.n < 0:
            raise DomainError(f"base dimension n must be >= 0, got {self.n}")
        if self.n > self.m - 2:
            raise CodimensionError(
                f"n={self.n}, m={self.m} gives codimension {self.m - self.n}; "
                "the excision results require n <= m-2"
            )
        if not (math.isfinite(self.eps) and math.isfinite(self.delta)):
            raise DomainError("eps and delta must be finite")
        if not 0 < self.eps < self.delta:
            raise DomainError(f"need 0 < eps < delta, got eps={self.eps}, delta={self.delta}")
        if self.outer_bc not in ("dirichlet", "neumann"):
            raise DomainError(f"outer_bc must be 'dirichlet' or 'neumann', got {self.outer_bc!r}")
        dim = self.base.dimension
        if (self.n == 0) != (self.base.kind == "point"):
            raise DomainError("a point base is used exactly when n = 0")
        if dim is not None and dim != self.n:
            raise DomainError(f"base manifold has dimension {dim} but n={self.n}")

    @property
    def codim(self) -> int:
        return self.m - self.n

    def with_eps(self, eps: float) -> "ProblemSpec":
        return ProblemSpec(self.m, self.n, eps, self.delta, self.base, self.outer_bc)

    def with_bc(self, outer_bc: BoundaryCondition) -> "ProblemSpec":
        return ProblemSpec(self.m, self.n, self.eps, self.delta, self.base, outer_bc)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "eps": self.eps,
            "delta": self.delta,
            "base": self.base.to_dict(),
            "outer_bc": self.outer_bc,
        }


@dataclass(frozen=True)
class ModeData:
    """One separated mode (k, j)."""

    k: int
    j: int
    lam: float
    mu: float
    l: float
    nu: float
    multiplicity: int

    @classmethod
    def build(cls, spec: ProblemSpec, k: int, j: int, lam: float, lam_multiplicity: int = 1, mu_multiplicity: int = 1):
        d = spec.codim
        if lam < 0:
            raise DomainError(f"lambda must be >= 0, got {lam}")
        return cls(
            k=k,
            j=j,
            lam=float(lam),
            mu=float(j * (j + d - 2)),
            l=(2 - d) / 2,
            nu=(d - 2 + 2 * j) / 2,
            multiplicity=lam_multiplicity * mu_multiplicity,
        )


def mode_data(spec: ProblemSpec, k: int, j: int) -> ModeData:
    lines = base_spectrum(spec.base, k + 1)
    if k >= len(lines):
        raise DomainError(f"base manifold has no eigenvalue with index k={k}")
    cross = cross_section_spectrum(spec.codim, j)[j]
    line = lines[k]
    return ModeData.build(spec, k, j, line.value, line.multiplicity, cross.multiplicity)


def enumerate_modes(spec: ProblemSpec, k_max: int, j_max: int) -> list[ModeData]:
    """All modes in the rectangle ``0..k_max x 0..j_max`` that N actually has."""
    if k_max < 0 or j_max < 0:
        raise DomainError("mode bounds must be >= 0")
    lines = base_spectrum(spec.base, k_max + 1)
    cross = cross_section_spectrum(spec.codim, j_max)
    return [
        ModeData.build(spec, ln.index, c.index, ln.value, ln.multiplicity, c.multiplicity)
        for ln in lines
        for c in cross
    ]


def _power(r: float, exponent: float) -> ScaledValue:
    return ScaledValue.from_log(exponent * math.log(r))


@dataclass(frozen=True)
class RadialSolution:
    """The one-dimensional family of radial solutions meeting the outer condition.

    ``a`` and ``b`` multiply the two basis functions of ``branch``:

    * ``log``: ``1`` and ``log r``
    * ``power``: ``1`` and ``r^(2-d)``
    * ``harmonic``: ``r^j`` and ``r^(2-d-j)``
    * ``bessel``: ``r^l I_nu(sqrt(lam) r)`` and ``r^l K_nu(sqrt(lam) r)``
    """

    branch: Branch
    a: ScaledValue
    b: ScaledValue
    codim: int
    j: int
    l: float
    nu: float
    sqrt_lam: float

    def value_at(self, r: float) -> tuple[ScaledValue, ScaledValue]:
        """``(R(r), R'(r))``."""
        return self._terms(r)[0]

    def _terms(self, r: float):
        # returns ((R, R'), (|first term of R|, |second term of R|))
        a, b = self.a, self.b
        if self.branch == "log":
            t1, t2 = a, b * math.log(r)
            return (t1 + t2, b / r), (abs(t1), abs(t2))
        if self.branch == "power":
            p = 2 - self.codim
            rp = _power(r, p)
            t2 = b * rp
            return (a + t2, t2 * (p / r)), (abs(a), abs(t2))
        if self.branch == "harmonic":
            j, p = self.j, 2 - self.codim - self.j
            t1 = a * _power(r, j)
            t2 = b * _power(r, p)
            return (t1 + t2, (t1 * j + t2 * p) / r), (abs(t1), abs(t2))
        x = self.sqrt_lam * r
        q = bessel_quartet(self.nu, x)
        rl = _power(r, self.l)
        t1, t2 = a * q.i, b * q.k
        comb = t1 + t2
        # group the I-part and the K-part separately: each group has a fixed sign
        i_group = a * (q.i * self.l + q.i_prime * x)
        k_group = b * (q.k * self.l + q.k_prime * x)
        deriv = (i_group + k_group) * _power(r, self.l - 1.0)
        return (rl * comb, deriv), (abs(rl * t1), abs(rl * t2))


def radial_basis(spec: ProblemSpec, mode: ModeData) -> RadialSolution:
    """Radial solution satisfying the condition at ``r = delta``."""
    d, j, delta = spec.codim, mode.j, spec.delta
    one, zero = ScaledValue.from_float(1.0), ScaledValue(0.0, 0.0)
    dirichlet = spec.outer_bc == "dirichlet"
    if mode.lam == 0.0 and j == 0:
        if d == 2:
            branch = "log"
            a, b = (ScaledValue.from_float(-math.log(delta)), one) if dirichlet else (one, zero)
        else:
            branch = "power"
            a, b = (-_power(delta, 2 - d), one) if dirichlet else (one, zero)
    elif mode.lam == 0.0:
        branch = "harmonic"
        p = 2 - d - j
        if dirichlet:
            a, b = -_power(delta, p - j), one
        else:
            a, b = _power(delta, p - j) * (-p / j), one
    else:
        branch = "bessel"
        s = math.sqrt(mode.lam)
        q = bessel_quartet(mode.nu, s * delta)
        if dirichlet:
            a, b = -(q.k / q.i), one
        else:
            i_part = q.i * mode.l + q.i_prime * (s * delta)
            k_part = q.k * mode.l + q.k_prime * (s * delta)
            if k_part.is_zero():
                raise InconsistencyError(f"Neumann condition degenerate for mode ({mode.k}, {mode.j})")
            a, b = one, -(i_part / k_part)
    if a.is_zero() and b.is_zero():
        raise InconsistencyError(f"both coefficients vanish for mode ({mode.k}, {mode.j})")
    return RadialSolution(
        branch=branch,
        a=a,
        b=b,
        codim=d,
        j=j,
        l=mode.l,
        nu=mode.nu,
        sqrt_lam=math.sqrt(mode.lam),
    )


def _is_zero_mode(spec: ProblemSpec, mode: ModeData) -> bool:
    return spec.outer_bc == "neumann" and mode.lam == 0.0 and mode.j == 0


def steklov_value(spec: ProblemSpec, mode: ModeData) -> float:
    """Steklov eigenvalue ``sigma = -R'(eps) / R(eps)`` of one mode."""
    sol = radial_basis(spec, mode)
    (r_val, r_der), (t1, t2) = sol._terms(spec.eps)
    scale = t1 + t2
    if r_val.is_zero() or (abs(r_val) / scale).to_float() < _SINGULAR_RTOL:
        raise ModeSingularError(f"R(eps) vanishes for mode ({mode.k}, {mode.j})")
    sigma = (-(r_der / r_val)).to_float()
    if _is_zero_mode(spec, mode) and abs(sigma) < _ZERO_CLAMP / spec.eps:
        return 0.0
    return sigma


def closed_form_sigma(spec: ProblemSpec, mode: ModeData) -> float:
    """Per-case hand-simplified formulas; an independent second evaluation path."""
    d, j, eps, delta = spec.codim, mode.j, spec.eps, spec.delta
    dirichlet = spec.outer_bc == "dirichlet"
    if mode.lam == 0.0:
        if j == 0:
            if not dirichlet:
                return 0.0
            if d == 2:
                return 1.0 / (eps * math.log(delta / eps))
            t = (eps / delta) ** (d - 2)
            return (d - 2) / (eps * (1.0 - t))
        if d == 2:
            t = (eps / delta) ** (2 * j)
            if dirichlet:
                return j * (1.0 + t) / (eps * (1.0 - t))
            return j * (1.0 - t) / (eps * (1.0 + t))
        t = (eps / delta) ** (d - 2 + 2 * j)
        if dirichlet:
            return (d - 2 + j + j * t) / (eps * (1.0 - t))
        return j * (d - 2 + j) * (1.0 - t) / (eps * (j + (d - 2 + j) * t))

    s = math.sqrt(mode.lam)
    inner = bessel_quartet(mode.nu, s * eps)
    outer = bessel_quartet(mode.nu, s * delta)
    if d == 2:
        c = outer.k / outer.i if dirichlet else outer.k_prime / outer.i_prime
        num = c * inner.i_prime - inner.k_prime
        den = inner.k - c * inner.i
        return (num / den * s).to_float()
    l = mode.l
    if dirichlet:
        c = outer.k / outer.i
        ratio = (inner.k_prime - c * inner.i_prime) / (inner.k - c * inner.i)
        return -l / eps - (ratio * s).to_float()
    c = (outer.i * l + outer.i_prime * (s * delta)) / (outer.k * l + outer.k_prime * (s * delta))
    ratio = (c * inner.k_prime - inner.i_prime) / (inner.i - c * inner.k)
    return -l / eps + (ratio * s).to_float()


def steklov_asymptotic(spec: ProblemSpec, mode: ModeData) -> float:
    """Leading-order small-eps prediction for the mode."""
    d, j, eps = spec.codim, mode.j, spec.eps
    if _is_zero_mode(spec, mode):
        return 0.0
    if d == 2 and j == 0:
        if spec.outer_bc == "dirichlet":
            return 1.0 / (eps * abs(math.log(eps)))
        s = math.sqrt(mode.lam)
        q = bessel_quartet(0.0, s * spec.delta)
        ratio = (q.k_prime / q.i_prime).to_float()
        return 1.0 / (eps * (abs(math.log(s * eps)) - ratio))
    return (d - 2 + j) / eps
