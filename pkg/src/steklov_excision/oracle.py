"""Bessel-free reference values of sigma by direct ODE integration.

The radial equation is rewritten in ``t = log r``,

    R_tt + (d - 2) R_t - (lam e^{2t} + mu) R = 0,

and integrated with fixed-step classical RK4 from ``t = log delta`` down to
``t = log eps``, starting from the data that satisfies the outer condition.
The state is renormalized to unit max-norm after every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, IntegrationError, ModeSingularError
from .radial import ModeData, ProblemSpec


@dataclass(frozen=True)
class IntegratorConfig:
    step_count: int = 2048
    richardson: bool = True
    method: str = "rk4"

    def __post_init__(self):
        if self.step_count < 64:
            raise DomainError(f"step_count must be >= 64, got {self.step_count}")
        if self.method != "rk4":
            raise DomainError("only classical RK4 is available")


@dataclass(frozen=True)
class OracleSigma:
    sigma: float
    error_estimate: float
    step_count: int


def integrate_radial(spec: ProblemSpec, mode: ModeData, cfg: IntegratorConfig = IntegratorConfig()) -> tuple[float, float]:
    """``(R(eps), R'(eps))`` up to a common positive factor."""
    return _integrate(spec, mode, cfg.step_count)


def _integrate(spec: ProblemSpec, mode: ModeData, steps: int) -> tuple[float, float]:
    damp = float(spec.codim - 2)
    lam, mu = mode.lam, mode.mu
    t0 = math.log(spec.delta)
    h = (math.log(spec.eps) - t0) / steps
    if spec.outer_bc == "dirichlet":
        y0, y1 = 0.0, spec.delta  # R = 0, R_t = delta * R'(delta) = delta
    else:
        y0, y1 = 1.0, 0.0
    half = 0.5 * h
    pot0 = lam * math.exp(2.0 * t0)
    for i in range(steps):
        t = t0 + i * h
        pot_half = lam * math.exp(2.0 * t + h)
        pot1 = lam * math.exp(2.0 * (t + h))
        c0, ch, c1 = pot0 + mu, pot_half + mu, pot1 + mu
        k1a = y1
        k1b = -damp * y1 + c0 * y0
        ya, yb = y0 + half * k1a, y1 + half * k1b
        k2a = yb
        k2b = -damp * yb + ch * ya
        ya, yb = y0 + half * k2a, y1 + half * k2b
        k3a = yb
        k3b = -damp * yb + ch * ya
        ya, yb = y0 + h * k3a, y1 + h * k3b
        k4a = yb
        k4b = -damp * yb + c1 * ya
        y0 += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        y1 += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        norm = max(abs(y0), abs(y1))
        if not math.isfinite(norm) or norm == 0.0:
            raise IntegrationError(f"non-finite or vanishing state for mode ({mode.k}, {mode.j})")
        y0 /= norm
        y1 /= norm
        pot0 = pot1
    return y0, y1 / spec.eps


def _sigma(spec: ProblemSpec, mode: ModeData, steps: int) -> float:
    r_val, r_der = _integrate(spec, mode, steps)
    if abs(r_val) < 1e-300:
        raise ModeSingularError(f"R(eps) vanishes for mode ({mode.k}, {mode.j})")
    return -r_der / r_val


def oracle_sigma(spec: ProblemSpec, mode: ModeData, cfg: IntegratorConfig = IntegratorConfig()) -> OracleSigma:
    """sigma from the integrated ODE, Richardson-extrapolated if requested.

    The error estimate is the magnitude of the Richardson correction.
    """
    coarse = _sigma(spec, mode, cfg.step_count)
    if not cfg.richardson:
        return OracleSigma(coarse, math.nan, cfg.step_count)
    fine = _sigma(spec, mode, 2 * cfg.step_count)
    correction = (fine - coarse) / 15.0
    return OracleSigma(fine + correction, abs(correction), 2 * cfg.step_count)
