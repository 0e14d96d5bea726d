"""Verification suites behind ``elastodisk verify`` and ``elastodisk sweep``."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import fields as F
from . import functionals as Fn
from . import regime
from .medium_model import ScatteringConfig
from .modal_solver import asymptotic_densities, solve

SUITES = ("localization", "resonance", "stress", "asymptotics")
SCALING_INDICES = (20, 30, 40, 50, 60)
OMEGA_LADDER = (1e-2, 5e-3, 2.5e-3, 1.25e-3)
LARGE = 1e2


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    target: str
    passed: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["measured"] = _json_float(self.measured)
        return d


def _json_float(x: float):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def _within(name: str, value: float, centre: float, half_width: float) -> Check:
    value = float(value)
    return Check(name, value, f"{centre} +/- {half_width}", bool(abs(value - centre) <= half_width))


def _at_most(name: str, value: float, bound: float) -> Check:
    value = float(value)
    return Check(name, value, f"<= {float(bound)!r}", bool(value <= bound))


def _at_least(name: str, value: float, bound: float) -> Check:
    value = float(value)
    return Check(name, value, f">= {float(bound)!r}", bool(value >= bound))


def regime_for(cfg: ScatteringConfig, eps_loc: float) -> regime.RegimeReport:
    b, sh = cfg.background, cfg.shells
    return regime.regime_report(eps_loc, sh.gamma1, sh.gamma2, b.lam, b.mu, cfg.tau, cfg.contrast.delta)


def log_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


# ---------------------------------------------------------------------------
# point metrics
# ---------------------------------------------------------------------------


def _rel_err(exact: complex, approx: complex) -> float:
    return abs(exact / approx - 1.0)


def density_asymptotic_error(cfg: ScatteringConfig, densities=None) -> float:
    d = solve(cfg) if densities is None else densities
    a = asymptotic_densities(cfg)
    e = d.common_exponent()
    return max(_rel_err(x.mantissa_at(e), y.mantissa_at(e)) for x, y in zip(d.as_tuple(), a.as_tuple()))


def field_asymptotic_error(cfg: ScatteringConfig, densities=None, r_in: float = 0.5,
                           r_out: float = 1.5) -> float:
    d = solve(cfg) if densities is None else densities
    xi = F.asymptotic_field_coefficients(cfg)
    errs = []
    for exact, approx in ((F.interior_total_field(cfg, d, r_in), xi.interior(r_in)),
                          (F.scattered_field(cfg, d, r_out), xi.exterior(r_out))):
        for u, v in zip((exact.u_r, exact.u_theta), approx):
            e = v.common_exponent()
            errs.append(_rel_err(u.mantissa_at(e), v.mantissa_at(e)))
    return max(errs)


def interior_norm_asymptotic_error(cfg: ScatteringConfig, densities=None) -> float:
    d = solve(cfg) if densities is None else densities
    exact = Fn.shell_l2_norm_sq(Fn.displacement_profile(cfg, d, "interior"), 0.0, 1.0,
                                cfg.tolerances.quadrature_rel)
    return abs(float(exact / Fn.asymptotic_interior_norm_sq(cfg)) - 1.0)


def incident_norm_asymptotic_error(cfg: ScatteringConfig) -> float:
    return abs(float(Fn.incident_norm_sq(cfg) / Fn.incident_norm_sq_closed_form(cfg)) - 1.0)


def energy_ratios(cfg: ScatteringConfig, densities) -> tuple[float, float, float]:
    """``E(u)/||u^i||^2``, ``E(u^s)/||u^i||^2`` and the larger imaginary residual."""
    inc = Fn.incident_norm_sq(cfg)
    ei = Fn.stress_energy_interior(cfg, densities)
    eo = Fn.stress_energy_exterior(cfg, densities)
    return float(ei.value / inc), float(eo.value / inc), max(ei.imag_residual, eo.imag_residual)


METRICS = (
    "residual",
    "condition",
    "localization_ratio_in",
    "localization_ratio_out",
    "resonance_ratio_in",
    "resonance_ratio_out",
    "energy_ratio_in",
    "energy_ratio_out",
    "density_asymptotic_error",
)


def point_metrics(cfg: ScatteringConfig, metrics) -> dict[str, float]:
    d = solve(cfg)
    out = {}
    energies = None
    for m in metrics:
        if m == "residual":
            out[m] = d.residual
        elif m == "condition":
            out[m] = d.condition_estimate
        elif m == "localization_ratio_in":
            out[m] = Fn.localization_ratio_interior(cfg, d)
        elif m == "localization_ratio_out":
            out[m] = Fn.localization_ratio_exterior(cfg, d)
        elif m == "resonance_ratio_in":
            out[m] = Fn.resonance_ratio_interior(cfg, d)
        elif m == "resonance_ratio_out":
            out[m] = Fn.resonance_ratio_exterior(cfg, d)
        elif m in ("energy_ratio_in", "energy_ratio_out"):
            if energies is None:
                energies = energy_ratios(cfg, d)
            out[m] = energies[0] if m.endswith("in") else energies[1]
        elif m == "density_asymptotic_error":
            out[m] = density_asymptotic_error(cfg, d)
        else:
            raise ValueError(f"unknown metric {m!r}; choose from {METRICS}")
    return out


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def localization_suite(cfg: ScatteringConfig, eps_loc: float) -> list[Check]:
    rep = regime_for(cfg, eps_loc)
    d = solve(cfg)
    n, sh = cfg.n, cfg.shells
    ri = Fn.localization_ratio_interior(cfg, d)
    ro = Fn.localization_ratio_exterior(cfg, d)
    return [
        _at_least("index_condition_localization", n, rep.n_min_localization),
        _at_most("interior_ratio_vs_gamma1_power", ri, 1.1 * sh.gamma1 ** n),
        _at_most("interior_ratio_vs_eps_loc", ri, 1.1 * eps_loc),
        _at_most("exterior_ratio_vs_gamma2_power", ro, 1.1 * sh.gamma2 ** (-n)),
        _at_most("exterior_ratio_vs_eps_loc", ro, 1.1 * eps_loc),
    ]


def _index_sweep(cfg: ScatteringConfig, indices, fn):
    return [fn(c, solve(c)) for c in (cfg.with_values({"incident.n": k}) for k in indices)]


def resonance_suite(cfg: ScatteringConfig, eps_loc: float, indices=SCALING_INDICES) -> list[Check]:
    rep = regime_for(cfg, eps_loc)
    vals = _index_sweep(cfg, indices, lambda c, d: (Fn.resonance_ratio_interior(c, d),
                                                    Fn.resonance_ratio_exterior(c, d)))
    d = solve(cfg)
    return [
        _within("interior_resonance_slope", log_slope(indices, [v[0] for v in vals]), 1.0, 0.15),
        _within("exterior_resonance_slope", log_slope(indices, [v[1] for v in vals]), 1.0, 0.15),
        _at_least("index_condition_quasi_minnaert", cfg.n, rep.n_min_quasi_minnaert),
        _at_least("interior_resonance_ratio", Fn.resonance_ratio_interior(cfg, d), LARGE),
        _at_least("exterior_resonance_ratio", Fn.resonance_ratio_exterior(cfg, d), LARGE),
    ]


def stress_suite(cfg: ScatteringConfig, eps_loc: float, indices=SCALING_INDICES) -> list[Check]:
    rep = regime_for(cfg, eps_loc)
    vals = _index_sweep(cfg, indices, energy_ratios)
    ei, eo, resid = energy_ratios(cfg, solve(cfg))
    return [
        _within("interior_energy_slope", log_slope(indices, [v[0] for v in vals]), 2.0, 0.2),
        _within("exterior_energy_slope", log_slope(indices, [v[1] for v in vals]), 2.0, 0.2),
        _at_most("energy_imaginary_residual", max([resid] + [v[2] for v in vals]), 1e-8),
        _at_least("index_condition_stress", cfg.n, rep.n_min_stress),
        _at_least("interior_energy_ratio", ei, LARGE),
        _at_least("exterior_energy_ratio", eo, LARGE),
    ]


def asymptotic_errors(cfg: ScatteringConfig, omegas=OMEGA_LADDER) -> dict[str, list[float]]:
    out: dict[str, list[float]] = {"densities": [], "fields": [], "interior_norm": [], "incident_norm": []}
    for w in omegas:
        c = cfg.with_values({"omega": w})
        d = solve(c)
        out["densities"].append(density_asymptotic_error(c, d))
        out["fields"].append(field_asymptotic_error(c, d))
        out["interior_norm"].append(interior_norm_asymptotic_error(c, d))
        out["incident_norm"].append(incident_norm_asymptotic_error(c))
    return out


def asymptotics_suite(cfg: ScatteringConfig, eps_loc: float, omegas=OMEGA_LADDER) -> list[Check]:
    errs = asymptotic_errors(cfg, omegas)
    return [_within(f"{k}_convergence_slope", log_slope(omegas, v), 2.0, 0.2) for k, v in errs.items()]


def run_suite(name: str, cfg: ScatteringConfig, eps_loc: float) -> list[Check]:
    return {"localization": localization_suite, "resonance": resonance_suite,
            "stress": stress_suite, "asymptotics": asymptotics_suite}[name](cfg, eps_loc)
