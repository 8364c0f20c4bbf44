"""Batch front end: ``steklov-excision --config run.json --out results/run_``."""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .assembler import (
    assemble,
    bracketing_audit,
    certified_bracketing,
    clusters,
    parallel_map,
    torus_slit_spectrum,
)
from .asymptotics import fit_limit, gap_slope, point_csv, point_excision_check, sweep_csv, sweep_mode
from .config import (
    ConfigError,
    GapConfig,
    ModesConfig,
    PointConfig,
    SpectrumConfig,
    SweepConfig,
    TorusConfig,
    VerifyConfig,
    parse_config,
)
from .errors import SteklovError
from .io import csv_text, json_text
from .oracle import IntegratorConfig, oracle_sigma
from .radial import ProblemSpec, closed_form_sigma, enumerate_modes, steklov_value
from .spectra import BaseManifold

log = logging.getLogger("steklov_excision")

THREADS_ENV = "STEKLOV_THREADS"
DEFAULT_PREFIX = "steklov_"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


@dataclass
class RunResult:
    status: int
    artifacts: dict[str, str] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)


def resolve_threads(flag: int | None, config_value: int | None = None) -> int:
    """Flag, then environment, then config, then 1.  0 means one per CPU."""
    value = flag
    if value is None and os.environ.get(THREADS_ENV):
        try:
            value = int(os.environ[THREADS_ENV])
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {os.environ[THREADS_ENV]!r}") from None
    if value is None:
        value = config_value
    if value is None:
        return 1
    if value < 0:
        raise ConfigError(f"thread count must be >= 0, got {value}")
    return value or (os.cpu_count() or 1)


def _modes(cfg: ModesConfig, workers: int) -> RunResult:
    spec = cfg.problem(cfg.eps)
    modes = enumerate_modes(spec, cfg.k_max, cfg.j_max)
    sigmas = parallel_map(lambda md: steklov_value(spec, md), modes, workers)
    columns = ["k", "j", "lam", "mu", "multiplicity", "sigma"]
    rows = [[md.k, md.j, md.lam, md.mu, md.multiplicity, s] for md, s in zip(modes, sigmas)]
    if cfg.oracle:
        columns += ["oracle", "oracle_error"]
        refs = parallel_map(lambda md: oracle_sigma(spec, md), modes, workers)
        for row, ref in zip(rows, refs):
            row += [ref.sigma, ref.error_estimate]
    return RunResult(EXIT_OK, {"modes.csv": csv_text(columns, rows)})


def _spectrum(cfg: SpectrumConfig, workers: int) -> RunResult:
    spec = cfg.problem(cfg.eps)
    table = assemble(spec, cfg.k_max, cfg.j_max, cfg.threshold, workers)
    payload = table.metadata()
    payload["clusters"] = [asdict(c) for c in clusters(table)]
    status, messages = EXIT_OK, list(table.warnings)
    if cfg.audit:
        report = bracketing_audit(spec, cfg.k_max, cfg.j_max, workers=workers)
        payload["bracketing"] = {"checked": report.checked, "violations": report.violations}
        if not report.ok:
            status = EXIT_FAILED
            messages.append(f"bracketing violated at indices {report.violations}")
    return RunResult(status, {"spectrum.csv": table.csv(), "spectrum.json": json_text(payload)}, messages)


def _sweep(cfg: SweepConfig, workers: int) -> RunResult:
    spec = cfg.problem(cfg.eps_list[0])
    records = sweep_mode(spec, cfg.k, cfg.j, cfg.eps_list)
    artifacts = {"sweep.csv": sweep_csv(records)}
    messages = []
    if len(records) >= 4:
        artifacts["fit.json"] = fit_limit(records).json()
    else:
        messages.append("fewer than 4 eps values: no fit written")
    return RunResult(EXIT_OK, artifacts, messages)


def _gap(cfg: GapConfig, workers: int) -> RunResult:
    spec = cfg.problem(cfg.eps_list[0])
    slope, results = gap_slope(spec, cfg.eps_list, cfg.k_max, cfg.j_max)
    columns = ("eps", "lower", "upper", "boundary_volume", "normalized", "normalized_lower", "normalized_upper")
    rows = [(r.eps, r.lower, r.upper, r.boundary_volume, r.value, *r.value_interval) for r in results]
    payload = {"spec": spec.to_dict(), "slope": slope, "exponent": 1.0 / (spec.m - 1)}
    return RunResult(EXIT_OK, {"gap.csv": csv_text(columns, rows), "gap.json": json_text(payload)})


def grid_base(n: int) -> BaseManifold:
    """Base used for grid runs: a point, a circle or a flat torus of side 2 pi."""
    if n == 0:
        return BaseManifold.point()
    if n == 1:
        return BaseManifold.circle(2 * math.pi)
    return BaseManifold.flat_torus([2 * math.pi] * n)


VERIFY_COLUMNS = ("m", "n", "eps", "outer_bc", "k", "j", "sigma", "closed_form", "oracle", "oracle_error", "deviation")


def relative_deviation(value: float, reference: float) -> float:
    if value == 0.0 or reference == 0.0:
        return abs(value - reference)
    return abs(value - reference) / abs(value)


def _verify(cfg: VerifyConfig, workers: int) -> RunResult:
    integ = IntegratorConfig(step_count=cfg.step_count)
    jobs = []
    for m, n in cfg.pairs:
        for eps in cfg.eps_list:
            for bc in ("dirichlet", "neumann"):
                spec = ProblemSpec(m, n, eps, cfg.delta, grid_base(n), bc)
                jobs += [(spec, md) for md in enumerate_modes(spec, cfg.k_max, cfg.j_max)]

    def check(job):
        spec, md = job
        sigma = steklov_value(spec, md)
        ref = oracle_sigma(spec, md, integ)
        return sigma, closed_form_sigma(spec, md), ref

    results = parallel_map(check, jobs, workers)
    rows, worst = [], 0.0
    for (spec, md), (sigma, closed, ref) in zip(jobs, results):
        dev = max(relative_deviation(sigma, ref.sigma), relative_deviation(sigma, closed))
        worst = max(worst, dev)
        rows.append((spec.m, spec.n, spec.eps, spec.outer_bc, md.k, md.j, sigma, closed, ref.sigma, ref.error_estimate, dev))

    status, messages = EXIT_OK, []
    if worst > cfg.tolerance:
        status = EXIT_FAILED
        messages.append(f"max relative deviation {worst:.3e} exceeds {cfg.tolerance:.1e}")
    payload = {"modes": len(rows), "max_relative_deviation": worst, "tolerance": cfg.tolerance, "bracketing": []}
    if cfg.bracketing:
        for m, n in cfg.pairs:
            for eps in cfg.eps_list:
                spec = ProblemSpec(m, n, eps, cfg.delta, grid_base(n))
                report = certified_bracketing(spec, workers=workers)
                payload["bracketing"].append(
                    {"m": m, "n": n, "eps": eps, "checked": report.checked, "violations": report.violations}
                )
                if not report.ok:
                    status = EXIT_FAILED
                    messages.append(f"bracketing violated for (m={m}, n={n}, eps={eps}) at {report.violations}")
    return RunResult(status, {"verify.csv": csv_text(VERIFY_COLUMNS, rows), "verify.json": json_text(payload)}, messages)


def _torus(cfg: TorusConfig, workers: int) -> RunResult:
    table = torus_slit_spectrum(cfg.eps, cfg.k_max)
    return RunResult(EXIT_OK, {"torus.csv": table.csv()})


def _point(cfg: PointConfig, workers: int) -> RunResult:
    records = point_excision_check(cfg.m, cfg.eps, cfg.delta, cfg.k_max)
    return RunResult(EXIT_OK, {"point.csv": point_csv(records)})


_DISPATCH = {
    "modes": _modes,
    "spectrum": _spectrum,
    "sweep": _sweep,
    "gap": _gap,
    "verify": _verify,
    "torus": _torus,
    "point": _point,
}


def run(config, threads: int | None = None) -> RunResult:
    """Execute a parsed config in memory; nothing is written to disk."""
    workers = resolve_threads(threads, config.threads)
    try:
        return _DISPATCH[config.command](config, workers)
    except SteklovError as exc:
        return RunResult(EXIT_FAILED, {}, [f"{type(exc).__name__}: {exc}"])


def write_artifacts(prefix: str, artifacts: dict[str, str]) -> list[Path]:
    """Write every artifact or none: files already written are removed on failure."""
    written: list[Path] = []
    try:
        for name in sorted(artifacts):
            path = Path(prefix + name)
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                written.append(path)
                fh.write(artifacts[name])
    except OSError:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steklov-excision",
        description="Steklov spectra of product annuli around excised submanifolds.",
    )
    parser.add_argument("--config", required=True, help="JSON run configuration ('-' reads stdin)")
    parser.add_argument("--out", default=None, help=f"output path prefix (default: config 'out' or {DEFAULT_PREFIX!r})")
    parser.add_argument("--threads", type=int, default=None, help=f"worker threads, 0 = auto (env: {THREADS_ENV})")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        text = sys.stdin.read() if args.config == "-" else Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = parse_config(text)
        result = run(config, args.threads)
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_USAGE

    for msg in result.messages:
        print(("error: " if result.status else "warning: ") + msg, file=sys.stderr)
    if not result.artifacts:
        return result.status or EXIT_FAILED
    prefix = args.out or config.out or DEFAULT_PREFIX
    try:
        paths = write_artifacts(prefix, result.artifacts)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_FAILED
    for p in paths:
        log.info("wrote %s", p)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
