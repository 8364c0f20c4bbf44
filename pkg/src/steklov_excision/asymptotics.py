"""eps-sweeps and quantitative checks of the small-eps limit laws."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .assembler import assemble
from .errors import AuditError, DomainError, FitError, TruncationError
from .io import csv_text, json_text
from .radial import ProblemSpec, mode_data, steklov_value
from .spectra import BaseManifold, sphere_area

Law = Literal["power", "log"]

SWEEP_COLUMNS = ("eps", "sigma", "scaled", "target", "residual")
_DUAL_PATH_RTOL = 1e-12


@dataclass(frozen=True)
class SweepRecord:
    eps: float
    sigma: float
    scaled: float
    target: float
    residual: float
    law: Law = "power"


@dataclass(frozen=True)
class FitReport:
    fitted_limit: float
    convergence_exponent: float
    r_squared: float
    law: Law
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "fitted_limit": self.fitted_limit,
            "convergence_exponent": self.convergence_exponent,
            "r_squared": self.r_squared,
            "law": self.law,
            "flags": list(self.flags),
        }

    def json(self) -> str:
        return json_text(self.to_dict())


def sweep_csv(records: Sequence[SweepRecord]) -> str:
    return csv_text(SWEEP_COLUMNS, ((r.eps, r.sigma, r.scaled, r.target, r.residual) for r in records))


def mode_law(spec: ProblemSpec, k: int, j: int) -> tuple[Law, float]:
    """Scaling law and limit for mode (k, j)."""
    md = mode_data(spec, k, j)
    if spec.outer_bc == "neumann" and md.lam == 0.0 and j == 0:
        return "power", 0.0
    if spec.codim == 2 and j == 0:
        return "log", 1.0
    return "power", float(spec.codim - 2 + j)


def sweep_mode(spec: ProblemSpec, k: int, j: int, eps_list: Sequence[float]) -> list[SweepRecord]:
    """One record per eps, scaled as ``eps*sigma`` or ``eps*|log eps|*sigma``."""
    eps_list = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise DomainError("eps list must be strictly decreasing")
    if any(not 0 < e < spec.delta for e in eps_list):
        raise DomainError("every eps must satisfy 0 < eps < delta")
    law, target = mode_law(spec, k, j)
    records = []
    for eps in eps_list:
        s = spec.with_eps(eps)
        sigma = steklov_value(s, mode_data(s, k, j))
        factor = eps * abs(math.log(eps)) if law == "log" else eps
        scaled = factor * sigma
        records.append(SweepRecord(eps, sigma, scaled, target, scaled - target, law))
    return records


def _r_squared(y: np.ndarray, fitted: np.ndarray) -> float:
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((y - fitted) ** 2))
    if ss_tot == 0.0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - ss_res / ss_tot))


def _lstsq(design: np.ndarray, y: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(design), axis=0)
    if np.any(scale == 0.0):
        raise FitError("design matrix has an all-zero column")
    coef, _, rank, _ = np.linalg.lstsq(design / scale, y, rcond=None)
    if rank < design.shape[1]:
        raise FitError("degenerate design matrix")
    return coef / scale


def _slope(x: np.ndarray, y: np.ndarray) -> float:
    if np.ptp(x) == 0.0:
        raise FitError("degenerate design matrix")
    return float(np.polyfit(x, y, 1)[0])


def fit_limit(records: Sequence[SweepRecord]) -> FitReport:
    """Extrapolate the scaled values to eps -> 0.

    Log laws are fitted as a polynomial in ``1/|log eps|`` (quadratic when five
    or more records are available); power laws as ``L + A eps^p`` with ``p``
    chosen by a bounded one-dimensional search.  The intercept is the limit.
    """
    if len(records) < 4:
        raise FitError(f"need at least 4 records, got {len(records)}")
    law = records[0].law
    eps = np.array([r.eps for r in records])
    y = np.array([r.scaled for r in records])
    if np.ptp(np.log(eps)) == 0.0:
        raise FitError("degenerate design matrix: all eps equal")
    if np.ptp(y) <= 1e-14 * max(1.0, float(np.max(np.abs(y)))):
        return FitReport(float(y.mean()), math.nan, 1.0, law, ("constant data: exponent unidentifiable",))

    flags: list[str] = []
    if law == "log":
        u = 1.0 / np.abs(np.log(eps))
        degree = 2 if len(records) >= 5 else 1
        design = np.vander(u, degree + 1, increasing=True)
        coef = _lstsq(design, y)
        fitted = design @ coef
        limit = float(coef[0])
        resid = np.abs(y - limit)
        mask = resid > 0
        exponent = _slope(np.log(np.abs(np.log(eps[mask]))), np.log(resid[mask])) if mask.sum() >= 2 else math.nan
        return FitReport(limit, exponent, _r_squared(y, fitted), law, tuple(flags))

    log_eps = np.log(eps)

    def solve(p: float):
        design = np.column_stack([np.ones_like(eps), np.exp(p * log_eps)])
        coef = _lstsq(design, y)
        return coef, design @ coef

    def ssr(p: float) -> float:
        return float(np.sum((y - solve(p)[1]) ** 2))

    grid = np.linspace(0.1, 12.0, 120)
    p0 = float(grid[int(np.argmin([ssr(p) for p in grid]))])
    lo, hi = max(0.05, p0 - 0.1), min(12.0, p0 + 0.1)
    best = minimize_scalar(ssr, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    p = float(best.x)
    if p >= 11.9 or p <= 0.06:
        flags.append("exponent at search boundary")
    coef, fitted = solve(p)
    return FitReport(float(coef[0]), p, _r_squared(y, fitted), law, tuple(flags))


@dataclass(frozen=True)
class GapResult:
    eps: float
    lower: float
    upper: float
    boundary_volume: float
    exponent: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def value(self) -> float:
        """Bracket midpoint times ``|boundary|^{1/(m-1)}``."""
        return self.midpoint * self.boundary_volume**self.exponent

    @property
    def value_interval(self) -> tuple[float, float]:
        f = self.boundary_volume**self.exponent
        return self.lower * f, self.upper * f


def boundary_volume(spec: ProblemSpec, eps: float | None = None) -> float:
    """``|N| * |S^{d-1}| * eps^{d-1}`` for the inner boundary of the product annulus."""
    eps = spec.eps if eps is None else eps
    d = spec.codim
    return spec.base.volume * sphere_area(d) * eps ** (d - 1)


def normalized_gap(spec: ProblemSpec, eps: float | None = None, k_max: int = 4, j_max: int = 3) -> GapResult:
    """Bracket of sigma_1 scaled by the perimeter factor ``|boundary|^{1/(m-1)}``.

    The lower end is the second Steklov-Neumann eigenvalue (the first is 0) and
    the upper end the second Steklov-Dirichlet eigenvalue.
    """
    eps = spec.eps if eps is None else eps
    s = spec.with_eps(eps)
    neu = assemble(s.with_bc("neumann"), k_max, j_max)
    dir_ = assemble(s.with_bc("dirichlet"), k_max, j_max)
    n_vals = neu.values(certified_only=True)
    d_vals = dir_.values(certified_only=True)
    if len(n_vals) < 2 or len(d_vals) < 2:
        raise TruncationError(
            f"sigma_1 bracket not certified at eps={eps} with k_max={k_max}, j_max={j_max}; enlarge the bounds"
        )
    return GapResult(
        eps=eps,
        lower=n_vals[1],
        upper=d_vals[1],
        boundary_volume=boundary_volume(s),
        exponent=1.0 / (spec.m - 1),
    )


def gap_slope(spec: ProblemSpec, eps_list: Sequence[float], k_max: int = 4, j_max: int = 3) -> tuple[float, list[GapResult]]:
    """Least-squares slope of log(normalized gap) against log(eps)."""
    results = [normalized_gap(spec, e, k_max, j_max) for e in eps_list]
    x = np.log([r.eps for r in results])
    y = np.log([r.value for r in results])
    return _slope(x, y), results


@dataclass(frozen=True)
class PointRecord:
    k: int
    eps: float
    neumann_formula: float
    neumann_generic: float
    dirichlet_formula: float
    dirichlet_generic: float
    target: float
    normalized_target: float
    perimeter_factor: float = field(repr=False)

    @property
    def scaled_neumann(self) -> float:
        return self.eps * self.neumann_generic

    @property
    def scaled_dirichlet(self) -> float:
        return self.eps * self.dirichlet_generic

    @property
    def normalized_neumann(self) -> float:
        return self.neumann_generic * self.perimeter_factor

    @property
    def normalized_dirichlet(self) -> float:
        return self.dirichlet_generic * self.perimeter_factor


POINT_COLUMNS = (
    "k",
    "eps",
    "neumann_formula",
    "neumann_generic",
    "dirichlet_formula",
    "dirichlet_generic",
    "scaled_neumann",
    "scaled_dirichlet",
    "target",
    "normalized_neumann",
    "normalized_dirichlet",
    "normalized_target",
)


def point_csv(records: Sequence[PointRecord]) -> str:
    rows = (
        (
            r.k,
            r.eps,
            r.neumann_formula,
            r.neumann_generic,
            r.dirichlet_formula,
            r.dirichlet_generic,
            r.scaled_neumann,
            r.scaled_dirichlet,
            r.target,
            r.normalized_neumann,
            r.normalized_dirichlet,
            r.normalized_target,
        )
        for r in records
    )
    return csv_text(POINT_COLUMNS, rows)


def point_annulus_formulas(m: int, k: int, eps: float, delta: float) -> tuple[float, float]:
    """Explicit (Neumann, Dirichlet) eigenvalues of degree-k harmonics on B_delta minus B_eps."""
    if k == 0:
        if m == 2:
            return 0.0, 1.0 / (eps * math.log(delta / eps))
        return 0.0, (m - 2) / (eps * (1.0 - delta ** (2 - m) * eps ** (m - 2)))
    t = delta ** (2 - m - 2 * k) * eps ** (m + 2 * k - 2)
    neumann = k * (m + k - 2) * (1.0 - t) / (eps * (k + (m + k - 2) * t))
    dirichlet = ((m + k - 2) + k * t) / (eps * (1.0 - t))
    return neumann, dirichlet


def _agree(a: float, b: float) -> bool:
    if a == 0.0 or b == 0.0:
        return abs(a - b) <= 1e-10
    return abs(a - b) <= _DUAL_PATH_RTOL * abs(a)


def point_excision_check(m: int, eps: float, delta: float, k_max: int) -> list[PointRecord]:
    """Explicit ball-annulus formulas against the generic solver with N a point."""
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    if k_max < 1:
        raise DomainError(f"k_max must be >= 1, got {k_max}")
    base = BaseManifold.point()
    neu = ProblemSpec(m, 0, eps, delta, base, "neumann")
    dir_ = ProblemSpec(m, 0, eps, delta, base, "dirichlet")
    omega = sphere_area(m) ** (1.0 / (m - 1))
    records = []
    for k in range(k_max + 1):
        nf, df = point_annulus_formulas(m, k, eps, delta)
        ng = steklov_value(neu, mode_data(neu, 0, k))
        dg = steklov_value(dir_, mode_data(dir_, 0, k))
        if not (_agree(nf, ng) and _agree(df, dg)):
            raise AuditError(
                f"point excision dual path disagrees at m={m}, k={k}: "
                f"Neumann {nf!r} vs {ng!r}, Dirichlet {df!r} vs {dg!r}"
            )
        # the point-excision limit law covers k >= 1 only
        target = float(m + k - 2) if k >= 1 else math.nan
        records.append(
            PointRecord(
                k=k,
                eps=eps,
                neumann_formula=nf,
                neumann_generic=ng,
                dirichlet_formula=df,
                dirichlet_generic=dg,
                target=target,
                normalized_target=target * omega,
                perimeter_factor=eps * omega,
            )
        )
    return records


__all__ = [
    "SweepRecord",
    "FitReport",
    "GapResult",
    "PointRecord",
    "sweep_mode",
    "fit_limit",
    "normalized_gap",
    "gap_slope",
    "boundary_volume",
    "point_excision_check",
    "point_annulus_formulas",
]
