"""Command-line interface: ``elastodisk solve | fields | verify | design | sweep``.

Exit codes: 0 success, 1 configuration or validation error, 2 numerical
failure, 3 verification failure.  Every output is accompanied by a run
manifest; with ``--out PATH`` it is written to ``PATH.manifest.json``,
otherwise JSON outputs embed it and CSV outputs send it to stderr.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import click
import numpy as np
import yaml

from . import __version__
from . import _suites
from . import fields as F
from .functionals import NumericalError
from .medium_model import ConfigError, ScatteringConfig, SubwavelengthWarning, config_to_dict, load_config
from .modal_solver import SingularSystemError, solve
from .regime import regime_report
from .scaled_specfun import CapacityError, DomainError, ScaledComplex, SingularityError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3
THREADS_ENV = "ELASTODISK_THREADS"
FIELD_COLUMNS = ("r", "theta", "re_ur", "im_ur", "re_utheta", "im_utheta", "log2_scale")
SWEEP_AXES = {
    "omega": "omega",
    "n": "incident.n",
    "delta": "contrast.delta",
    "eps_rho": "contrast.eps_rho",
    "gamma1": "shells.gamma1",
    "gamma2": "shells.gamma2",
}

_NUMERICAL = (SingularSystemError, NumericalError, CapacityError, SingularityError, ArithmeticError)


class CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# manifest and serialization
# ---------------------------------------------------------------------------


@dataclass
class RunManifest:
    """Everything needed to reproduce an output bit for bit."""

    command: str
    config: dict | None
    overrides: dict = field(default_factory=dict)
    axes: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    deterministic: bool = True
    seed: None = None
    tool: str = "elastodisk"
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def scaled_to_dict(z: ScaledComplex) -> dict:
    """``(significand, exponent, phase)`` of the modulus plus the exact scaled parts."""
    mod, phase = z.polar()
    return {
        "significand": mod.significand,
        "exponent": mod.exponent,
        "phase": phase,
        "re": [z.re.significand, z.re.exponent],
        "im": [z.im.significand, z.im.exponent],
    }


def scaled_from_dict(d: dict) -> ScaledComplex:
    from .scaled_specfun import ScaledReal

    return ScaledComplex(ScaledReal(d["re"][0], d["re"][1]), ScaledReal(d["im"][0], d["im"][1]))


def _emit(text: str, out: str | None, manifest: RunManifest, csv_output: bool = False) -> None:
    if out is None:
        sys.stdout.write(text)
        if csv_output:
            sys.stderr.write(_dumps(manifest.to_dict()))
        return
    manifest.outputs = [str(out)]
    Path(out).write_text(text)
    Path(f"{out}.manifest.json").write_text(_dumps(manifest.to_dict()))


def _scalar(text: str):
    """Number if ``text`` reads as one (YAML would keep ``1e-3`` a string), else YAML."""
    text = text.strip()
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return yaml.safe_load(text)


def _parse_overrides(items) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise CliFailure(EXIT_CONFIG, f"override {item!r} must look like key=value")
        key, value = item.split("=", 1)
        out[key.strip()] = _scalar(value)
    return out


def _load(path: str, overrides: dict) -> ScatteringConfig:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SubwavelengthWarning)
        return load_config(path, overrides)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


@click.group()
@click.version_option(__version__, prog_name="elastodisk")
def cli():
    """Modal elastic scattering by a high-contrast disk."""


_set_option = click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
                           help="Dotted-path override, e.g. incident.n=10 (repeatable).")
_out_option = click.option("--out", type=click.Path(dir_okay=False), default=None,
                           help="Write output here (and PATH.manifest.json) instead of stdout.")


def densities_report(cfg: ScatteringConfig) -> dict:
    d = solve(cfg)
    if not d.residual <= cfg.tolerances.solver_residual:
        raise CliFailure(EXIT_NUMERICAL, f"solver residual {d.residual:.3e} exceeds "
                                         f"{cfg.tolerances.solver_residual:.1e}")
    names = ("phi11", "phi12", "phi21", "phi22")
    return {
        "n": cfg.n,
        "densities": {k: scaled_to_dict(v) for k, v in zip(names, d.as_tuple())},
        "residual": d.residual,
        "condition_estimate": d.condition_estimate,
    }


@cli.command("solve")
@click.argument("config", type=click.Path(exists=False, dir_okay=False))
@_set_option
@_out_option
def cmd_solve(config, overrides, out):
    """Solve the modal transmission system and report the four densities."""
    ov = _parse_overrides(overrides)
    cfg = _load(config, ov)
    report = densities_report(cfg)
    manifest = RunManifest("solve", config_to_dict(cfg), ov)
    if out is None:
        report["manifest"] = manifest.to_dict()
    _emit(_dumps(report), out, manifest)


def field_rows(cfg: ScatteringConfig, region: str, r_min: float, r_max: float, r_count: int,
               theta_count: int) -> list[list]:
    """CSV rows of the interior total or scattered field, r-major then theta."""
    if r_count < 1 or theta_count < 1:
        raise CliFailure(EXIT_CONFIG, "r-count and theta-count must be positive")
    if region == "interior" and not 0.0 <= r_min <= r_max <= 1.0:
        raise CliFailure(EXIT_CONFIG, "interior grid must lie in 0 <= r <= 1")
    if region == "exterior" and not 1.0 <= r_min <= r_max:
        raise CliFailure(EXIT_CONFIG, "exterior grid must lie in r >= 1")
    d = solve(cfg)
    sample = F.interior_total_field if region == "interior" else F.scattered_field
    rows = []
    for r in np.linspace(r_min, r_max, r_count):
        s = sample(cfg, d, float(r))
        m, e = s.mantissas()
        for j in range(theta_count):
            theta = 2.0 * math.pi * j / theta_count
            u = m * complex(math.cos(cfg.n * theta), math.sin(cfg.n * theta))
            rows.append([float(r), theta, float(u[0].real), float(u[0].imag), float(u[1].real),
                         float(u[1].imag), int(e)])
    return rows


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


@cli.command("fields")
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--region", type=click.Choice(["interior", "exterior"]), required=True)
@click.option("--r-min", type=float, required=True)
@click.option("--r-max", type=float, required=True)
@click.option("--r-count", type=int, default=11, show_default=True)
@click.option("--theta-count", type=int, default=8, show_default=True)
@_set_option
@_out_option
def cmd_fields(config, region, r_min, r_max, r_count, theta_count, overrides, out):
    """Tabulate the interior total field or the scattered field on a polar grid.

    Columns hold mantissas; the displacement is ``mantissa * 2**log2_scale``.
    """
    ov = _parse_overrides(overrides)
    cfg = _load(config, ov)
    rows = field_rows(cfg, region, r_min, r_max, r_count, theta_count)
    manifest = RunManifest("fields", config_to_dict(cfg), ov, parameters={
        "region": region, "r_min": r_min, "r_max": r_max, "r_count": r_count, "theta_count": theta_count})
    _emit(_csv_text(FIELD_COLUMNS, rows), out, manifest, csv_output=True)


@cli.command("verify")
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--suite", type=click.Choice(list(_suites.SUITES) + ["all"]), default="all", show_default=True)
@click.option("--eps-loc", type=float, default=1e-2, show_default=True, help="Localization level.")
@_set_option
@_out_option
def cmd_verify(config, suite, eps_loc, overrides, out):
    """Run the verification suites; exit 3 when any check fails."""
    ov = _parse_overrides(overrides)
    cfg = _load(config, ov)
    names = _suites.SUITES if suite == "all" else (suite,)
    results = {name: [c.to_dict() for c in _suites.run_suite(name, cfg, eps_loc)] for name in names}
    passed = all(c["passed"] for checks in results.values() for c in checks)
    report = {"suites": results, "passed": passed}
    manifest = RunManifest("verify", config_to_dict(cfg), ov, parameters={"suite": suite, "eps_loc": eps_loc})
    if out is None:
        report["manifest"] = manifest.to_dict()
    _emit(_dumps(report), out, manifest)
    if not passed:
        failed = [f"{s}.{c['name']}" for s, cs in results.items() for c in cs if not c["passed"]]
        raise CliFailure(EXIT_VERIFY, "failed checks: " + ", ".join(failed))


@cli.command("design")
@click.option("--eps-loc", type=float, required=True)
@click.option("--gamma1", type=float, required=True)
@click.option("--gamma2", type=float, required=True)
@click.option("--delta", type=float, default=None, help="Stiffness contrast (default: the bound delta0).")
@click.option("--lam", type=float, default=1.0, show_default=True)
@click.option("--mu", type=float, default=1.0, show_default=True)
@click.option("--tau", type=float, default=0.1, show_default=True)
@_out_option
def cmd_design(eps_loc, gamma1, gamma2, delta, lam, mu, tau, out):
    """Regime constants, index thresholds and contrast bounds."""
    rep = regime_report(eps_loc, gamma1, gamma2, lam, mu, tau, delta)
    params = {"eps_loc": eps_loc, "gamma1": gamma1, "gamma2": gamma2, "delta": delta,
              "lam": lam, "mu": mu, "tau": tau}
    manifest = RunManifest("design", None, parameters=params)
    report = rep.to_dict()
    if out is None:
        report["manifest"] = manifest.to_dict()
    _emit(_dumps(report), out, manifest)


def parse_axis(spec: str) -> tuple[str, list]:
    """``name=v1,v2,...`` or ``name=lo..hi[..step]`` (integer ranges)."""
    if "=" not in spec:
        raise CliFailure(EXIT_CONFIG, f"axis {spec!r} must look like name=values")
    name, values = (s.strip() for s in spec.split("=", 1))
    if name not in SWEEP_AXES:
        raise CliFailure(EXIT_CONFIG, f"axis must be one of {sorted(SWEEP_AXES)}, got {name!r}")
    if ".." in values:
        parts = values.split("..")
        try:
            lo, hi, step = int(parts[0]), int(parts[1]), int(parts[2]) if len(parts) > 2 else 1
        except (ValueError, IndexError) as exc:
            raise CliFailure(EXIT_CONFIG, f"bad range {values!r}") from exc
        if step <= 0 or hi < lo:
            raise CliFailure(EXIT_CONFIG, f"bad range {values!r}")
        vals = list(range(lo, hi + 1, step))
    else:
        vals = [_scalar(v) for v in values.split(",") if v.strip()]
    if not vals or not all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
                           for v in vals):
        raise CliFailure(EXIT_CONFIG, f"axis {name!r} needs numeric values")
    if name == "n" and not all(isinstance(v, int) for v in vals):
        raise CliFailure(EXIT_CONFIG, "axis 'n' needs integer values")
    return name, vals


def _sweep_point(args) -> tuple[dict, str]:
    base, overrides, metrics = args
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SubwavelengthWarning)
            cfg = ScatteringConfig.with_values(base, overrides)
            return _suites.point_metrics(cfg, metrics), ""
    except (ConfigError, DomainError, *_NUMERICAL) as exc:
        return {}, f"{type(exc).__name__}: {exc}".replace("\n", " ")


def _threads(parallel: int | None) -> int:
    if parallel is not None:
        return max(1, parallel)
    env = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(env))
    except ValueError as exc:
        raise CliFailure(EXIT_CONFIG, f"{THREADS_ENV} must be an integer, got {env!r}") from exc


def sweep_rows(cfg: ScatteringConfig, axes: list[tuple[str, list]], metrics: list[str],
               workers: int = 1) -> tuple[list[str], list[list], bool]:
    """Evaluate metrics on the Cartesian grid of ``axes``; row order is axis-lexicographic."""
    for m in metrics:
        if m not in _suites.METRICS:
            raise CliFailure(EXIT_CONFIG, f"unknown metric {m!r}; choose from {list(_suites.METRICS)}")
    points = list(itertools.product(*(vals for _, vals in axes)))
    jobs = [(cfg, {SWEEP_AXES[name]: v for (name, _), v in zip(axes, pt)}, tuple(metrics)) for pt in points]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    header = [name for name, _ in axes] + list(metrics) + ["failure"]
    rows, ok = [], True
    for pt, (vals, failure) in zip(points, results):
        ok &= not failure
        rows.append(list(pt) + [float(vals[m]) if m in vals else "" for m in metrics] + [failure])
    return header, rows, ok


@cli.command("sweep")
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--axis", "axes", multiple=True, required=True, metavar="NAME=VALUES",
              help="Sweep axis, e.g. n=20..60..10 or omega=1e-2,5e-3 (repeatable).")
@click.option("--metric", "metrics", multiple=True, required=True,
              type=click.Choice(list(_suites.METRICS)))
@click.option("--parallel", type=int, default=None,
              help=f"Worker processes (default: ${THREADS_ENV} or 1).")
@_set_option
@_out_option
def cmd_sweep(config, axes, metrics, parallel, overrides, out):
    """Evaluate metrics over a parameter grid; output order never depends on parallelism."""
    ov = _parse_overrides(overrides)
    cfg = _load(config, ov)
    parsed = [parse_axis(a) for a in axes]
    header, rows, ok = sweep_rows(cfg, parsed, list(metrics), _threads(parallel))
    manifest = RunManifest("sweep", config_to_dict(cfg), ov,
                           axes=[{"name": n, "values": v} for n, v in parsed],
                           parameters={"metrics": list(metrics)})
    _emit(_csv_text(header, rows), out, manifest, csv_output=True)
    if not ok:
        raise CliFailure(EXIT_NUMERICAL, "one or more sweep points failed; see the failure column")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    """Console entry point mapping errors onto the exit-code contract."""
    try:
        cli.main(args=argv, prog_name="elastodisk", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_CONFIG
    except click.ClickException as exc:
        exc.show()
        return EXIT_CONFIG
    except CliFailure as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.code
    except (ConfigError, DomainError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        return EXIT_CONFIG
    except _NUMERICAL as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return EXIT_NUMERICAL
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
