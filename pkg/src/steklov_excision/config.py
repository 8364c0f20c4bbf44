"""JSON run configurations for the batch front end."""

from __future__ import annotations

import json
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from .errors import CodimensionError, DomainError, SteklovError
from .radial import ProblemSpec
from .spectra import BaseManifold, load_custom_spectrum

ACCEPTANCE_PAIRS = ((3, 1), (4, 1), (4, 2), (5, 2), (5, 3), (3, 0), (4, 0))


class ConfigError(SteklovError, ValueError):
    """Schema or domain violation in a run configuration."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class PointBase(_Strict):
    kind: Literal["point"]


class CircleBase(_Strict):
    kind: Literal["circle"]
    length: float = Field(gt=0)


class FlatTorusBase(_Strict):
    kind: Literal["flat_torus"]
    lengths: list[Annotated[float, Field(gt=0)]] = Field(min_length=1)


class RoundSphereBase(_Strict):
    kind: Literal["round_sphere"]
    dim: int = Field(ge=1)
    radius: float = Field(default=1.0, gt=0)


class CustomBase(_Strict):
    kind: Literal["custom"]
    # either inline [[value, multiplicity], ...] or a path to such a JSON file
    spectrum: Union[list[tuple[float, int]], str]
    volume: float = Field(default=1.0, gt=0)


BaseConfig = Annotated[
    Union[PointBase, CircleBase, FlatTorusBase, RoundSphereBase, CustomBase],
    Field(discriminator="kind"),
]


def build_base(cfg: BaseConfig) -> BaseManifold:
    if isinstance(cfg, PointBase):
        return BaseManifold.point()
    if isinstance(cfg, CircleBase):
        return BaseManifold.circle(cfg.length)
    if isinstance(cfg, FlatTorusBase):
        return BaseManifold.flat_torus(cfg.lengths)
    if isinstance(cfg, RoundSphereBase):
        return BaseManifold.round_sphere(cfg.dim, cfg.radius)
    if isinstance(cfg.spectrum, str):
        return load_custom_spectrum(cfg.spectrum, cfg.volume)
    return BaseManifold.from_custom(cfg.spectrum, cfg.volume)


class _Common(_Strict):
    out: str | None = None
    threads: int | None = Field(default=None, ge=0)
    deterministic: Literal[True] = True


def _check_codim(m: int, n: int) -> None:
    if n > m - 2:
        raise ValueError(
            f"n={n}, m={m} has codimension {m - n}; the excision limit laws hold only for 0 <= n <= m-2"
        )


class _Problem(_Common):
    m: int = Field(ge=2)
    n: int = Field(ge=0)
    delta: float = Field(default=1.0, gt=0)
    base: BaseConfig
    outer_bc: Literal["dirichlet", "neumann"] = "dirichlet"

    @model_validator(mode="after")
    def _codim(self):
        _check_codim(self.m, self.n)
        return self

    def problem(self, eps: float) -> ProblemSpec:
        return ProblemSpec(self.m, self.n, eps, self.delta, build_base(self.base), self.outer_bc)


class ModesConfig(_Problem):
    command: Literal["modes"]
    eps: float = Field(gt=0)
    k_max: int = Field(ge=0)
    j_max: int = Field(ge=0)
    oracle: bool = False


class SpectrumConfig(_Problem):
    command: Literal["spectrum"]
    eps: float = Field(gt=0)
    k_max: int = Field(ge=0)
    j_max: int = Field(ge=0)
    threshold: float | None = Field(default=None, gt=0)
    audit: bool = False


class SweepConfig(_Problem):
    command: Literal["sweep"]
    k: int = Field(ge=0)
    j: int = Field(ge=0)
    eps_list: list[Annotated[float, Field(gt=0)]] = Field(min_length=1)


class GapConfig(_Problem):
    command: Literal["gap"]
    eps_list: list[Annotated[float, Field(gt=0)]] = Field(min_length=2)
    k_max: int = Field(default=4, ge=1)
    j_max: int = Field(default=3, ge=1)


class VerifyConfig(_Common):
    command: Literal["verify"]
    pairs: list[tuple[int, int]] = Field(default_factory=lambda: [list(p) for p in ACCEPTANCE_PAIRS])
    eps_list: list[Annotated[float, Field(gt=0)]] = Field(default_factory=lambda: [0.1, 0.01], min_length=1)
    delta: float = Field(default=1.0, gt=0)
    k_max: int = Field(default=4, ge=0)
    j_max: int = Field(default=4, ge=0)
    tolerance: float = Field(default=1e-8, gt=0)
    step_count: int = Field(default=2048, ge=64)
    bracketing: bool = True

    @model_validator(mode="after")
    def _codim(self):
        for m, n in self.pairs:
            if m < 2 or n < 0:
                raise ValueError(f"pair ({m}, {n}) needs m >= 2 and n >= 0")
            _check_codim(m, n)
        return self


class TorusConfig(_Common):
    command: Literal["torus"]
    eps: float = Field(gt=0, lt=0.5)
    k_max: int = Field(ge=0)


class PointConfig(_Common):
    command: Literal["point"]
    m: int = Field(ge=2)
    eps: float = Field(gt=0)
    delta: float = Field(default=1.0, gt=0)
    k_max: int = Field(ge=1)


RunConfig = Annotated[
    Union[ModesConfig, SpectrumConfig, SweepConfig, GapConfig, VerifyConfig, TorusConfig, PointConfig],
    Field(discriminator="command"),
]
_ADAPTER = TypeAdapter(RunConfig)


def _format(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        path = ".".join(str(p) for p in e["loc"]) or "<root>"
        msg = e["msg"].removeprefix("Value error, ")
        lines.append(f"{path}: {msg}")
    return "; ".join(lines)


def parse_config(text: str):
    """Validate a JSON document into one of the command configs.

    Unknown keys are rejected, and every problem is checked eagerly against the
    solver's domain (including the custom-spectrum file, if one is named).
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    try:
        cfg = _ADAPTER.validate_python(raw)
    except ValidationError as exc:
        raise ConfigError(_format(exc)) from None
    try:
        if isinstance(cfg, (ModesConfig, SpectrumConfig)):
            cfg.problem(cfg.eps)
        elif isinstance(cfg, (SweepConfig, GapConfig)):
            cfg.problem(min(cfg.eps_list))
    except CodimensionError as exc:
        raise ConfigError(str(exc)) from exc
    except (DomainError, OSError) as exc:
        raise ConfigError(f"{cfg.command}: {exc}") from exc
    return cfg
