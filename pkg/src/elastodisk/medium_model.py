"""Physical configuration of the disk scattering problem.

The scatterer is the unit disk.  The background medium has Lame parameters
``(lambda, mu)`` and density ``rho``; the inclusion is softer and lighter,
with parameters ``(lambda/delta, mu/delta, rho/eps_rho)`` rescaled by the
contrast ``(delta, eps_rho)``.  Wave speeds inside are slower by
``tau = sqrt(delta/eps_rho) < 1``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import yaml

__all__ = [
    "ConfigError",
    "ContrastError",
    "SubwavelengthWarning",
    "Material",
    "ContrastConfig",
    "Wavenumbers",
    "IncidentSpec",
    "ShellSpec",
    "Tolerances",
    "ScatteringConfig",
    "wavenumbers",
    "interior_material",
    "interior_wavenumbers",
    "load_config",
    "dump_config",
    "config_from_dict",
    "config_to_dict",
]

SUBWAVELENGTH_CEILING = 0.1


class ConfigError(ValueError):
    """Configuration violates a physical or geometric invariant."""


class ContrastError(ConfigError):
    """Contrast triple violates ``tau < 1``."""


class SubwavelengthWarning(UserWarning):
    """Frequency is above the sub-wavelength ceiling ``2*omega < 0.1``."""


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Material:
    """Isotropic elastic medium.

    Attributes
    ----------
    lam : float
        First Lame parameter.
    mu : float
        Shear modulus.
    rho : float
        Mass density.
    """

    lam: float = 1.0
    mu: float = 1.0
    rho: float = 1.0

    def __post_init__(self):
        lam, mu, rho = (_finite(k, v) for k, v in (("lambda", self.lam), ("mu", self.mu), ("rho", self.rho)))
        if not mu > 0.0:
            raise ConfigError(f"strong convexity needs mu > 0, got mu={mu}")
        if not lam + mu > 0.0:
            raise ConfigError(f"strong convexity needs lambda + mu > 0, got {lam + mu}")
        if not rho > 0.0:
            raise ConfigError(f"density must be positive, got rho={rho}")

    @property
    def c_s(self) -> float:
        return math.sqrt(self.mu / self.rho)

    @property
    def c_p(self) -> float:
        return math.sqrt((self.lam + 2.0 * self.mu) / self.rho)


@dataclass(frozen=True)
class ContrastConfig:
    """Stiffness contrast ``delta`` and density contrast ``eps_rho``."""

    delta: float
    eps_rho: float

    def __post_init__(self):
        for name in ("delta", "eps_rho"):
            v = _finite(name, getattr(self, name))
            if not 0.0 < v < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1), got {v}")
        if not self.tau < 1.0:
            raise ContrastError(
                f"wave-speed contrast tau = sqrt(delta/eps_rho) = {self.tau:.6g} must be < 1 "
                "(the inclusion must be slower than the background)"
            )

    @property
    def tau(self) -> float:
        return math.sqrt(self.delta / self.eps_rho)


@dataclass(frozen=True)
class Wavenumbers:
    k_s: float
    k_p: float
    c_s: float
    c_p: float


@dataclass(frozen=True)
class IncidentSpec:
    """Incident shear mode of index ``n`` and complex amplitude ``kappa``."""

    n: int
    kappa: complex = 1.0 + 0.0j
    allow_zero: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ConfigError(f"incident mode index must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "kappa", complex(self.kappa))
        if not (math.isfinite(self.kappa.real) and math.isfinite(self.kappa.imag)):
            raise ConfigError("kappa must be finite")
        if self.kappa == 0 and not self.allow_zero:
            raise ConfigError("kappa must be nonzero")


@dataclass(frozen=True)
class ShellSpec:
    """Boundary shells ``gamma1 < r < 1`` and ``1 < r < gamma2`` inside an observation radius ``R``."""

    gamma1: float = 0.5
    gamma2: float = 1.25
    R: float = 2.0

    def __post_init__(self):
        g1, g2, R = (_finite(k, getattr(self, k)) for k in ("gamma1", "gamma2", "R"))
        if not 0.0 < g1 < 1.0 < g2 < R:
            raise ConfigError(f"shells need 0 < gamma1 < 1 < gamma2 < R, got {g1}, {g2}, {R}")

    @property
    def xi1(self) -> float:
        return 1.0 - self.gamma1

    @property
    def xi2(self) -> float:
        return self.gamma2 - 1.0


@dataclass(frozen=True)
class Tolerances:
    quadrature_rel: float = 1e-10
    solver_residual: float = 1e-10


@dataclass(frozen=True)
class ScatteringConfig:
    """Complete single-mode scattering configuration."""

    background: Material
    contrast: ContrastConfig
    omega: float
    incident: IncidentSpec
    shells: ShellSpec = ShellSpec()
    tolerances: Tolerances = Tolerances()
    subwavelength_ceiling: float = SUBWAVELENGTH_CEILING

    def __post_init__(self):
        omega = _finite("omega", self.omega)
        if not omega > 0.0:
            raise ConfigError(f"omega must be positive, got {omega}")
        if 2.0 * omega >= self.subwavelength_ceiling:
            warnings.warn(
                f"omega*diam = {2.0 * omega:.3g} exceeds the sub-wavelength ceiling "
                f"{self.subwavelength_ceiling:.3g}; asymptotic checks do not apply",
                SubwavelengthWarning,
                stacklevel=3,
            )

    @property
    def n(self) -> int:
        return self.incident.n

    @property
    def kappa(self) -> complex:
        return self.incident.kappa

    @property
    def tau(self) -> float:
        return self.contrast.tau

    def with_values(self, overrides: dict[str, Any]) -> "ScatteringConfig":
        """Copy with dotted-path overrides such as ``{"incident.n": 10, "omega": 1e-3}``."""
        return config_from_dict(_apply_overrides(config_to_dict(self), overrides))


def wavenumbers(m: Material, omega: float) -> Wavenumbers:
    """Shear and compressional wavenumbers of a medium at angular frequency ``omega``."""
    if not omega > 0.0:
        raise ConfigError(f"omega must be positive, got {omega}")
    return Wavenumbers(k_s=omega / m.c_s, k_p=omega / m.c_p, c_s=m.c_s, c_p=m.c_p)


def interior_material(cfg: ScatteringConfig) -> Material:
    """Inclusion parameters ``(lambda/delta, mu/delta, rho/eps_rho)``."""
    b, c = cfg.background, cfg.contrast
    return Material(b.lam / c.delta, b.mu / c.delta, b.rho / c.eps_rho)


def interior_wavenumbers(cfg: ScatteringConfig) -> Wavenumbers:
    """Wavenumbers inside the inclusion; equal to ``tau`` times the background ones."""
    return wavenumbers(interior_material(cfg), cfg.omega)


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def config_to_dict(cfg: ScatteringConfig) -> dict[str, Any]:
    """Nested plain-data form of a configuration (the on-disk schema)."""
    return {
        "background": {"lambda": cfg.background.lam, "mu": cfg.background.mu, "rho": cfg.background.rho},
        "contrast": {"delta": cfg.contrast.delta, "eps_rho": cfg.contrast.eps_rho},
        "incident": {"n": cfg.incident.n, "kappa_re": cfg.kappa.real, "kappa_im": cfg.kappa.imag},
        "omega": cfg.omega,
        "shells": {"gamma1": cfg.shells.gamma1, "gamma2": cfg.shells.gamma2, "R": cfg.shells.R},
        "tolerances": asdict(cfg.tolerances),
    }


def _section(data: dict, name: str, required: bool = True) -> dict:
    sec = data.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing section '{name}'")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    return sec


def _number(sec: dict, key: str, where: str, default=None) -> float:
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing key '{where}.{key}'")
        return default
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"'{where}.{key}' must be a number, got {v!r}")
    return v


def config_from_dict(data: dict[str, Any]) -> ScatteringConfig:
    """Validate and build a configuration from its nested plain-data form.

    A zero amplitude is accepted here (it yields the trivial solution).
    """
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    bg = _section(data, "background", required=False)
    ct = _section(data, "contrast")
    inc = _section(data, "incident")
    sh = _section(data, "shells", required=False)
    tol = _section(data, "tolerances", required=False)
    if "omega" not in data:
        raise ConfigError("missing key 'omega'")
    n = inc.get("n")
    if isinstance(n, bool) or not isinstance(n, int):
        raise ConfigError(f"'incident.n' must be an integer, got {n!r}")
    kappa = complex(_number(inc, "kappa_re", "incident", 1.0), _number(inc, "kappa_im", "incident", 0.0))
    return ScatteringConfig(
        background=Material(
            _number(bg, "lambda", "background", 1.0),
            _number(bg, "mu", "background", 1.0),
            _number(bg, "rho", "background", 1.0),
        ),
        contrast=ContrastConfig(_number(ct, "delta", "contrast"), _number(ct, "eps_rho", "contrast")),
        omega=_number(data, "omega", "config"),
        incident=IncidentSpec(n, kappa, allow_zero=True),
        shells=ShellSpec(
            _number(sh, "gamma1", "shells", 0.5),
            _number(sh, "gamma2", "shells", 1.25),
            _number(sh, "R", "shells", 2.0),
        ),
        tolerances=Tolerances(
            _number(tol, "quadrature_rel", "tolerances", 1e-10),
            _number(tol, "solver_residual", "tolerances", 1e-10),
        ),
    )


def _apply_overrides(data: dict, overrides: dict[str, Any]) -> dict:
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in data.items()}
    for path, value in overrides.items():
        keys = path.split(".")
        node = out
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override path '{path}' does not name a section")
        node[keys[-1]] = value
    return out


def load_config(path: str | Path, overrides: dict[str, Any] | None = None) -> ScatteringConfig:
    """Read a YAML configuration file, applying optional dotted-path overrides."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    if overrides:
        data = _apply_overrides(data or {}, overrides)
    return config_from_dict(data)


def dump_config(cfg: ScatteringConfig, path: str | Path | None = None) -> str:
    """Serialize to YAML; floats are written with ``repr`` so they round-trip exactly."""
    text = yaml.safe_dump(config_to_dict(cfg), sort_keys=True)
    if path is not None:
        Path(path).write_text(text)
    return text

