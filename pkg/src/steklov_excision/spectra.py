"""Laplace spectra of the base manifold N and of the cross-section sphere."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

from .errors import CodimensionError, DomainError

BaseKind = Literal["point", "circle", "flat_torus", "round_sphere", "custom"]

_VALUE_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralLine:
    value: float
    multiplicity: int
    index: int


@dataclass(frozen=True)
class BaseManifold:
    """Closed manifold N carrying a known Laplace spectrum.

    Use the constructors (:meth:`point`, :meth:`circle`, ...) rather than the
    raw initializer.
    """

    kind: BaseKind
    lengths: tuple[float, ...] = ()
    sphere_dim: int = 0
    radius: float = 1.0
    custom: tuple[tuple[float, int], ...] = ()
    custom_volume: float = 1.0

    @classmethod
    def point(cls) -> "BaseManifold":
        return cls(kind="point")

    @classmethod
    def circle(cls, length: float) -> "BaseManifold":
        if not length > 0:
            raise DomainError(f"circle length must be positive, got {length}")
        return cls(kind="circle", lengths=(float(length),))

    @classmethod
    def flat_torus(cls, lengths: Sequence[float]) -> "BaseManifold":
        lengths = tuple(float(v) for v in lengths)
        if not lengths or any(not v > 0 for v in lengths):
            raise DomainError(f"flat torus needs positive side lengths, got {lengths}")
        return cls(kind="flat_torus", lengths=lengths)

    @classmethod
    def round_sphere(cls, dim: int, radius: float = 1.0) -> "BaseManifold":
        if dim < 1:
            raise DomainError(f"round sphere dimension must be >= 1, got {dim}")
        if not radius > 0:
            raise DomainError(f"sphere radius must be positive, got {radius}")
        return cls(kind="round_sphere", sphere_dim=int(dim), radius=float(radius))

    @classmethod
    def from_custom(cls, pairs: Sequence[Sequence[float]], volume: float = 1.0) -> "BaseManifold":
        """Wrap a user-supplied ``[(value, multiplicity), ...]`` spectrum.

        Connectedness of N cannot be checked from a spectrum alone; the
        caller is responsible for supplying a connected N (simple eigenvalue 0).
        """
        clean = []
        for item in pairs:
            if len(item) != 2:
                raise DomainError(f"custom spectrum entries must be [value, multiplicity], got {item!r}")
            value, mult = float(item[0]), item[1]
            if int(mult) != mult or mult < 1:
                raise DomainError(f"multiplicity must be a positive integer, got {mult!r}")
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"Laplace eigenvalues must be finite and >= 0, got {value}")
            clean.append((value, int(mult)))
        if not clean:
            raise DomainError("custom spectrum is empty")
        if clean[0][0] != 0.0:
            raise DomainError("custom spectrum must start at eigenvalue 0")
        if any(b[0] <= a[0] for a, b in zip(clean, clean[1:])):
            raise DomainError("custom spectrum values must be strictly increasing")
        if not volume > 0:
            raise DomainError(f"volume must be positive, got {volume}")
        return cls(kind="custom", custom=tuple(clean), custom_volume=float(volume))

    @property
    def dimension(self) -> int | None:
        """Dimension of N, or None for custom spectra."""
        if self.kind == "point":
            return 0
        if self.kind == "circle":
            return 1
        if self.kind == "flat_torus":
            return len(self.lengths)
        if self.kind == "round_sphere":
            return self.sphere_dim
        return None

    @property
    def volume(self) -> float:
        if self.kind == "point":
            return 1.0
        if self.kind in ("circle", "flat_torus"):
            return math.prod(self.lengths)
        if self.kind == "round_sphere":
            return self.radius**self.sphere_dim * sphere_area(self.sphere_dim + 1)
        return self.custom_volume

    def is_finite_spectrum(self) -> bool:
        return self.kind in ("point", "custom")

    def to_dict(self) -> dict:
        if self.kind == "point":
            return {"kind": "point"}
        if self.kind == "circle":
            return {"kind": "circle", "length": self.lengths[0]}
        if self.kind == "flat_torus":
            return {"kind": "flat_torus", "lengths": list(self.lengths)}
        if self.kind == "round_sphere":
            return {"kind": "round_sphere", "dim": self.sphere_dim, "radius": self.radius}
        return {"kind": "custom", "spectrum": [list(p) for p in self.custom], "volume": self.custom_volume}


def sphere_area(d: int) -> float:
    """Volume of the unit sphere S^{d-1} in R^d, i.e. 2 pi^{d/2} / Gamma(d/2)."""
    if d < 1:
        raise DomainError(f"sphere_area needs d >= 1, got {d}")
    return 2.0 * math.pi ** (0.5 * d) / math.gamma(0.5 * d)


def harmonic_dimension(j: int, d: int) -> int:
    """Dimension of degree-j spherical harmonics on S^{d-1}, d >= 2."""
    if j == 0:
        return 1
    return math.comb(j + d - 2, d - 2) * (2 * j + d - 2) // max(j + d - 2, 1)


def _group(values: list[float]) -> list[tuple[float, int]]:
    values.sort()
    out: list[list] = []
    for v in values:
        if out and abs(v - out[-1][0]) <= _VALUE_RTOL * max(1.0, abs(v)):
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return [(v, m) for v, m in out]


def _torus_lines(lengths: tuple[float, ...], count: int) -> list[tuple[float, int]]:
    freqs = [(2.0 * math.pi / L) ** 2 for L in lengths]
    cutoff = max(freqs)
    while True:
        bounds = [math.isqrt(int(cutoff / f)) + 1 for f in freqs]
        ranges = [range(-b, b + 1) for b in bounds]
        values = []
        for xi in itertools.product(*ranges):
            v = sum(f * n * n for f, n in zip(freqs, xi))
            if v <= cutoff:
                values.append(v)
        grouped = _group(values)
        if len(grouped) > count:
            return grouped[:count]
        cutoff *= 2.0


def base_spectrum(base: BaseManifold, count: int) -> list[SpectralLine]:
    """First ``count`` distinct Laplace eigenvalues of N with multiplicities."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    kind = base.kind
    if kind == "point":
        pairs = [(0.0, 1)]
    elif kind == "circle":
        L = base.lengths[0]
        pairs = [((2.0 * math.pi * k / L) ** 2, 1 if k == 0 else 2) for k in range(count)]
    elif kind == "round_sphere":
        n, rho = base.sphere_dim, base.radius
        pairs = [(k * (k + n - 1) / rho**2, harmonic_dimension(k, n + 1)) for k in range(count)]
    elif kind == "flat_torus":
        pairs = _torus_lines(base.lengths, count)
    else:
        pairs = list(base.custom[:count])
    return [SpectralLine(value=float(v), multiplicity=m, index=i) for i, (v, m) in enumerate(pairs)]


def cross_section_spectrum(d: int, j_max: int) -> list[SpectralLine]:
    """Spectrum ``mu_j = j(j+d-2)`` of the unit sphere S^{d-1}, d = codimension."""
    if d <= 1:
        raise CodimensionError(
            f"codimension d={d} is not supported: the excision results need n <= m-2 (codimension >= 2)"
        )
    if j_max < 0:
        raise DomainError(f"j_max must be >= 0, got {j_max}")
    return [
        SpectralLine(value=float(j * (j + d - 2)), multiplicity=harmonic_dimension(j, d), index=j)
        for j in range(j_max + 1)
    ]


def load_custom_spectrum(source: str | Path, volume: float = 1.0) -> BaseManifold:
    """Read a JSON array of ``[value, multiplicity]`` pairs (path or JSON text)."""
    text = str(source)
    path = Path(text)
    if not text.lstrip().startswith("[") and path.exists():
        text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"custom spectrum is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise DomainError("custom spectrum must be a JSON array of [value, multiplicity] pairs")
    return BaseManifold.from_custom(data, volume=volume)
