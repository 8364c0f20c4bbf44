"""Sorted Steklov spectra, cluster statistics and Dirichlet-Neumann bracketing."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import AuditError, DomainError, TruncationError
from .io import csv_text, json_text
from .radial import ModeData, ProblemSpec, enumerate_modes, steklov_value
from .spectra import base_spectrum

CSV_COLUMNS = ("sigma", "k", "j", "multiplicity", "cluster_target", "scaled_eps_sigma")
_ORDER_RTOL = 1e-12


@dataclass(frozen=True)
class EigenvalueEntry:
    sigma: float
    k: int
    j: int
    multiplicity: int
    cluster_target: float


@dataclass
class SpectrumTable:
    entries: list[EigenvalueEntry]
    k_max: int
    j_max: int
    eps: float
    spec: ProblemSpec | None = None
    threshold: float | None = None
    complete_below: float | None = None
    warnings: list[str] = field(default_factory=list)

    def values(self, certified_only: bool = False) -> list[float]:
        """Multiplicity-expanded sorted eigenvalues."""
        out = []
        for e in self.entries:
            if certified_only and not self.is_certified(e.sigma):
                continue
            out.extend([e.sigma] * e.multiplicity)
        return out

    def is_certified(self, sigma: float) -> bool:
        return self.complete_below is not None and sigma < self.complete_below

    def csv(self) -> str:
        rows = ((e.sigma, e.k, e.j, e.multiplicity, e.cluster_target, self.eps * e.sigma) for e in self.entries)
        return csv_text(CSV_COLUMNS, rows)

    def metadata(self) -> dict:
        return {
            "spec": self.spec.to_dict() if self.spec else None,
            "eps": self.eps,
            "k_max": self.k_max,
            "j_max": self.j_max,
            "threshold": self.threshold,
            "complete_below": self.complete_below,
            "warnings": list(self.warnings),
        }

    def json(self) -> str:
        payload = self.metadata()
        payload["entries"] = [
            {"sigma": e.sigma, "k": e.k, "j": e.j, "multiplicity": e.multiplicity, "cluster_target": e.cluster_target}
            for e in self.entries
        ]
        return json_text(payload)


def parallel_map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _nondecreasing(seq: Iterable[float]) -> bool:
    seq = list(seq)
    return all(b >= a - _ORDER_RTOL * abs(a) for a, b in zip(seq, seq[1:]))


def assemble(
    spec: ProblemSpec,
    k_max: int,
    j_max: int,
    threshold: float | None = None,
    workers: int = 1,
) -> SpectrumTable:
    """Sigma for every mode of the rectangle, sorted, with a completeness certificate.

    Entries strictly below ``complete_below`` are certified: provided sigma is
    nondecreasing in k and in j (audited on the rectangle), no mode outside the
    rectangle can fall below the smallest value on its last row or column.
    """
    modes = enumerate_modes(spec, k_max, j_max)

    def solve(mode: ModeData) -> float:
        try:
            return steklov_value(spec, mode)
        except Exception as exc:
            raise type(exc)(f"mode (k={mode.k}, j={mode.j}): {exc}") from exc

    sigmas = parallel_map(solve, modes, workers)
    grid = {(md.k, md.j): s for md, s in zip(modes, sigmas)}
    ks = sorted({md.k for md in modes})
    js = sorted({md.j for md in modes})

    warnings = []
    monotone = all(_nondecreasing(grid[(k, j)] for k in ks) for j in js) and all(
        _nondecreasing(grid[(k, j)] for j in js) for k in ks
    )
    # finite spectra (point, custom) may run out before k_max: then the k direction is exhaustive
    k_exhausted = spec.base.is_finite_spectrum() and len(base_spectrum(spec.base, k_max + 2)) <= k_max + 1
    complete_below = None
    if monotone:
        edge = [grid[(k, js[-1])] for k in ks]
        if not k_exhausted:
            edge += [grid[(ks[-1], j)] for j in js]
        complete_below = min(edge)
    else:
        warnings.append("sigma is not monotone in k and j on the rectangle; completeness not certified")
    if threshold is not None and (complete_below is None or complete_below < threshold):
        warnings.append(f"truncation: enumeration certified only below {complete_below}, requested {threshold}")

    target_shift = spec.codim - 2
    entries = [
        EigenvalueEntry(sigma=s, k=md.k, j=md.j, multiplicity=md.multiplicity, cluster_target=float(target_shift + md.j))
        for md, s in zip(modes, sigmas)
    ]
    entries.sort(key=lambda e: (e.sigma, e.j, e.k))
    return SpectrumTable(
        entries=entries,
        k_max=k_max,
        j_max=j_max,
        eps=spec.eps,
        spec=spec,
        threshold=threshold,
        complete_below=complete_below,
        warnings=warnings,
    )


@dataclass(frozen=True)
class Cluster:
    j: int
    count: int
    scaling: str  # "eps" or "eps_log"
    minimum: float
    maximum: float
    mean: float
    spread: float
    target: float
    distance: float


def clusters(table: SpectrumTable, eps: float | None = None) -> list[Cluster]:
    """Per-j statistics of the scaled eigenvalues.

    Codimension-2 ``j = 0`` clusters are scaled by ``eps |log eps|`` (target 1),
    all others by ``eps`` (target ``d - 2 + j``).  The Neumann zero mode is left
    out since its limit is 0 rather than the cluster target.
    """
    if not table.entries:
        raise DomainError("empty spectrum table")
    eps = table.eps if eps is None else eps
    spec = table.spec
    codim = spec.codim if spec else 2
    neumann = spec is not None and spec.outer_bc == "neumann"
    groups: dict[int, list[float]] = {}
    for e in table.entries:
        if neumann and e.k == 0 and e.j == 0:
            continue
        groups.setdefault(e.j, []).append(e.sigma)
    out = []
    for j in sorted(groups):
        if codim == 2 and j == 0:
            factor, scaling, target = eps * abs(math.log(eps)), "eps_log", 1.0
        else:
            factor, scaling, target = eps, "eps", float(codim - 2 + j)
        scaled = [factor * s for s in groups[j]]
        mean = sum(scaled) / len(scaled)
        out.append(
            Cluster(
                j=j,
                count=len(scaled),
                scaling=scaling,
                minimum=min(scaled),
                maximum=max(scaled),
                mean=mean,
                spread=max(scaled) - min(scaled),
                target=target,
                distance=abs(mean - target),
            )
        )
    return out


@dataclass
class BracketReport:
    checked: int
    violations: list[int]
    intervals: list[tuple[float, float]]
    neumann: SpectrumTable
    dirichlet: SpectrumTable

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_for_violations(self) -> None:
        if self.violations:
            raise AuditError(f"bracketing violated at indices {self.violations}")


def bracketing_audit(spec: ProblemSpec, k_max: int, j_max: int, limit: int = 50, workers: int = 1) -> BracketReport:
    """Check ``sigma_i^N <= sigma_{i+1}^D`` over the certified part of both spectra.

    With 0-based sorted lists (Dirichlet list starting at its first eigenvalue)
    the check reads ``N[i] <= D[i]``; ``[N[i], D[i]]`` is the resulting interval
    for the i-th Steklov eigenvalue of the excised domain.
    """
    neu = assemble(spec.with_bc("neumann"), k_max, j_max, workers=workers)
    dir_ = assemble(spec.with_bc("dirichlet"), k_max, j_max, workers=workers)
    if neu.complete_below is None or dir_.complete_below is None:
        raise TruncationError("bracketing audit needs both tables certified complete")
    n_vals = neu.values(certified_only=True)
    d_vals = dir_.values(certified_only=True)
    count = min(len(n_vals), len(d_vals), limit)
    violations = [i for i in range(count) if n_vals[i] > d_vals[i] * (1.0 + _ORDER_RTOL)]
    intervals = [(n_vals[i], d_vals[i]) for i in range(count)]
    return BracketReport(checked=count, violations=violations, intervals=intervals, neumann=neu, dirichlet=dir_)


def torus_slit_spectrum(eps: float, k_max: int) -> SpectrumTable:
    """Two-sided Steklov spectrum of the cylinder S^1 x [eps, 1 - eps].

    ``j = 0`` labels modes even about the mid-circle (``k tanh``), ``j = 1``
    odd ones (``k coth``; for k = 0 the linear mode ``2/(1-2 eps)``).
    ``cluster_target`` holds the eps -> 0 value.
    """
    if not 0 < eps < 0.5:
        raise DomainError(f"torus slit width needs 0 < eps < 1/2, got {eps}")
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    half = 0.5 * (1.0 - 2.0 * eps)
    entries = [
        EigenvalueEntry(0.0, 0, 0, 1, 0.0),
        EigenvalueEntry(2.0 / (1.0 - 2.0 * eps), 0, 1, 1, 2.0),
    ]
    for k in range(1, k_max + 1):
        entries.append(EigenvalueEntry(k * math.tanh(k * half), k, 0, 2, k * math.tanh(0.5 * k)))
        entries.append(EigenvalueEntry(k / math.tanh(k * half), k, 1, 2, k / math.tanh(0.5 * k)))
    entries.sort(key=lambda e: (e.sigma, e.j, e.k))
    nxt = k_max + 1
    return SpectrumTable(
        entries=entries,
        k_max=k_max,
        j_max=1,
        eps=eps,
        complete_below=nxt * math.tanh(nxt * half),
    )


def quasi_isometry_interval(sigma: float, K: float, m: int) -> tuple[float, float]:
    """Range of an eigenvalue after a K-quasi-isometric change of metric."""
    if K < 1:
        raise DomainError(f"quasi-isometry constant must be >= 1, got {K}")
    if sigma < 0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    factor = K ** (m + 0.5)
    return sigma / factor, sigma * factor


def certified_bracketing(
    spec: ProblemSpec,
    limit: int = 50,
    k_start: int = 4,
    j_start: int = 4,
    max_rounds: int = 8,
    workers: int = 1,
) -> BracketReport:
    """Bracketing audit on a rectangle grown until ``limit`` entries are certified.

    Each round doubles whichever of k_max, j_max bounds the certificate.
    """
    k_max, j_max = k_start, j_start
    finite = spec.base.is_finite_spectrum()
    if finite:
        k_max = min(k_max, len(base_spectrum(spec.base, k_max + 1)) - 1)
    for _ in range(max_rounds):
        report = bracketing_audit(spec, k_max, j_max, limit, workers)
        if report.checked >= limit:
            return report
        n_tab, d_tab = report.neumann, report.dirichlet
        k_edge = min(min(t.entries, key=lambda e: e.sigma if e.k == t.k_max else math.inf).sigma for t in (n_tab, d_tab))
        j_edge = min(min(t.entries, key=lambda e: e.sigma if e.j == t.j_max else math.inf).sigma for t in (n_tab, d_tab))
        if finite or j_edge <= k_edge:
            j_max *= 2
        else:
            k_max *= 2
    raise TruncationError(f"fewer than {limit} certified entries after growing to k_max={k_max}, j_max={j_max}")
