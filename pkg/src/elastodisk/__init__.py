"""Modal elastic scattering by a high-contrast disk in the sub-wavelength regime."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .medium_model import (
    ConfigError,
    ContrastConfig,
    ContrastError,
    IncidentSpec,
    Material,
    ScatteringConfig,
    ShellSpec,
    Tolerances,
    load_config,
)
from .modal_solver import ModalDensities, SingularSystemError, solve
from .scaled_specfun import ScaledComplex, ScaledReal

__all__ = [
    "ConfigError",
    "ContrastConfig",
    "ContrastError",
    "IncidentSpec",
    "Material",
    "ModalDensities",
    "ScaledComplex",
    "ScaledReal",
    "ScatteringConfig",
    "ShellSpec",
    "SingularSystemError",
    "Tolerances",
    "load_config",
    "solve",
]
