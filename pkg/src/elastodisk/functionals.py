"""Shell norms, localization and resonance ratios, and stress energies.

Angular integrals are done analytically: for a single mode ``e^{in theta}``
the squared L2 norm over an annulus is ``2 pi * int |f|^2 r dr``.  Only the
radial integral is numerical, by adaptive composite Gauss-Legendre on the
mantissa of the scaled integrand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from . import fields as F
from .medium_model import Material, ScatteringConfig, interior_material
from .modal_solver import ModalDensities
from .scaled_specfun import DomainError, ScaledReal

__all__ = [
    "NumericalError",
    "DegenerateFieldError",
    "RadialProfile",
    "StressEnergy",
    "ShellReport",
    "integrate",
    "shell_l2_norm_sq",
    "displacement_profile",
    "gradient_profile",
    "incident_norm_sq",
    "incident_norm_sq_closed_form",
    "localization_ratio_interior",
    "localization_ratio_exterior",
    "resonance_ratio_interior",
    "resonance_ratio_exterior",
    "stress_energy_interior",
    "stress_energy_exterior",
    "shell_report",
    "norm_coefficients",
    "asymptotic_interior_norm_sq",
    "asymptotic_localization_ratio_interior",
]

_PANEL_ORDER = 15
_NODES, _WEIGHTS = roots_legendre(_PANEL_ORDER)
_LN2 = math.log(2.0)


class NumericalError(ArithmeticError):
    """Quadrature met a non-finite integrand or failed to converge."""


class DegenerateFieldError(NumericalError):
    """A ratio has a vanishing denominator."""


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def _panel(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> np.ndarray:
    h = 0.5 * (b - a)
    x = a + h * (_NODES + 1.0)
    y = np.asarray(f(x), dtype=float)
    if not np.all(np.isfinite(y)):
        bad = x[np.nonzero(~np.isfinite(y))[-1][0]]
        raise NumericalError(f"non-finite integrand at r = {bad!r}")
    return h * (y @ _WEIGHTS)


def integrate(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              rel_tol: float = 1e-10, initial_panels: int = 8, max_panels: int = 20000):
    """Adaptive composite 15-point Gauss-Legendre integral of a smooth real function.

    ``f`` maps an array of ``npts`` abscissae to ``npts`` values or to an
    ``(m, npts)`` array; in the latter case all components share one error
    scale, the largest component total, so a component that is roundoff
    relative to the others does not drive refinement.  Each panel is compared
    with its two halves; panels whose discrepancy exceeds their
    width-proportional share of ``rel_tol * scale`` are bisected.
    """
    if not b > a:
        raise DomainError("integration interval must have b > a")

    def entry(lo, hi):
        mid = 0.5 * (lo + hi)
        return lo, hi, _panel(f, lo, hi), _panel(f, lo, mid) + _panel(f, mid, hi)

    edges = np.linspace(a, b, initial_panels + 1)
    work = [entry(float(lo), float(hi)) for lo, hi in zip(edges[:-1], edges[1:])]
    width = b - a
    while True:
        total = np.sum([w[3] for w in work], axis=0)
        peak = max(float(np.max(np.abs(w[3]))) for w in work)
        scale = max(float(np.max(np.abs(total))), 1e-300 * peak, 1e-300)
        refined, changed = [], False
        for lo, hi, coarse, fine in work:
            err = float(np.max(np.abs(coarse - fine)))
            if err > rel_tol * scale * (hi - lo) / width and hi - lo > 1e-14 * width:
                changed = True
                mid = 0.5 * (lo + hi)
                refined += [entry(lo, mid), entry(mid, hi)]
            else:
                refined.append((lo, hi, coarse, fine))
        work = refined
        if not changed:
            out = np.array([math.fsum(c) for c in zip(*(np.atleast_1d(w[3]) for w in work))])
            return float(out[0]) if np.ndim(work[0][3]) == 0 else out
        if len(work) > max_panels:
            raise NumericalError(f"quadrature did not reach rel_tol={rel_tol} on [{a}, {b}]")


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialProfile:
    """Components ``2**exponent * f_k(r)`` of one modal quantity on ``[r_lo, r_hi]``.

    ``mantissa(r)`` returns an array of shape ``(ncomp, npts)``; the squared
    norm density is ``sum_k |f_k|^2 r`` times ``2 pi`` after angular integration.
    """

    mantissa: Callable[[np.ndarray], np.ndarray]
    exponent: int
    r_lo: float
    r_hi: float

    @staticmethod
    def constant(values, r_lo: float, r_hi: float) -> "RadialProfile":
        v = np.asarray(values, dtype=complex).reshape(-1, 1)
        return RadialProfile(lambda r: v * np.ones_like(r), 0, r_lo, r_hi)


def shell_l2_norm_sq(profile: RadialProfile, r_lo: float, r_hi: float,
                     rel_tol: float = 1e-10) -> ScaledReal:
    """``2 pi * int_{r_lo}^{r_hi} sum_k |f_k(r)|^2 r dr`` as a scaled real."""
    if not 0.0 <= r_lo < r_hi:
        raise DomainError(f"need 0 <= r_lo < r_hi, got {r_lo}, {r_hi}")
    if r_lo < profile.r_lo or r_hi > profile.r_hi:
        raise DomainError(f"[{r_lo}, {r_hi}] is outside the profile domain [{profile.r_lo}, {profile.r_hi}]")

    def integrand(r):
        m = profile.mantissa(r)
        return np.sum(np.abs(m) ** 2, axis=0) * r

    val = 2.0 * math.pi * integrate(integrand, r_lo, r_hi, rel_tol)
    return ScaledReal(val).ldexp(2 * profile.exponent)


def _profile_from(prof_fn, r_lo: float, r_hi: float, what: str) -> RadialProfile:
    exponent = prof_fn(np.array([min(max(1.0, r_lo), r_hi)])).exponent

    def mantissa(r):
        p = prof_fn(r)
        shift = 2.0 ** (p.exponent - exponent)
        with np.errstate(under="ignore"):
            return shift * (p.displacement() if what == "u" else p.gradient())

    return RadialProfile(mantissa, exponent, r_lo, r_hi)


def _profile_fn(cfg: ScatteringConfig, densities: ModalDensities | None, region: str):
    if region == "incident":
        return lambda r: F.incident_profile(cfg, r)
    if region == "interior":
        return lambda r: F.interior_profile(cfg, densities, r)
    if region == "scattered":
        return lambda r: F.scattered_profile(cfg, densities, r)
    raise ValueError(f"unknown region {region!r}")


_DOMAINS = {"incident": (0.0, math.inf), "interior": (0.0, 1.0), "scattered": (1.0, math.inf)}


def _domain(region: str) -> tuple[float, float]:
    if region not in _DOMAINS:
        raise ValueError(f"unknown region {region!r}; choose from {tuple(_DOMAINS)}")
    return _DOMAINS[region]


def displacement_profile(cfg: ScatteringConfig, densities: ModalDensities | None, region: str,
                         r_lo: float | None = None, r_hi: float | None = None) -> RadialProfile:
    """Displacement of ``region`` in {"incident", "interior", "scattered"} as a profile."""
    lo, hi = _domain(region)
    return _profile_from(_profile_fn(cfg, densities, region),
                         lo if r_lo is None else r_lo, cfg.shells.R if r_hi is None and hi == math.inf else
                         (hi if r_hi is None else r_hi), "u")


def gradient_profile(cfg: ScatteringConfig, densities: ModalDensities | None, region: str,
                     r_lo: float | None = None, r_hi: float | None = None) -> RadialProfile:
    """Polar gradient components (rr, r-theta, theta-r, theta-theta) as a profile."""
    lo, hi = _domain(region)
    return _profile_from(_profile_fn(cfg, densities, region),
                         lo if r_lo is None else r_lo, cfg.shells.R if r_hi is None and hi == math.inf else
                         (hi if r_hi is None else r_hi), "grad")


# ---------------------------------------------------------------------------
# norms and ratios
# ---------------------------------------------------------------------------


def _tol(cfg: ScatteringConfig) -> float:
    return cfg.tolerances.quadrature_rel


def incident_norm_sq(cfg: ScatteringConfig) -> ScaledReal:
    """``||u^i||^2`` over the unit disk by quadrature."""
    return shell_l2_norm_sq(displacement_profile(cfg, None, "incident", 0.0, 1.0), 0.0, 1.0, _tol(cfg))


def incident_norm_sq_closed_form(cfg: ScatteringConfig) -> ScaledReal:
    """Leading-order closed form ``pi |kappa|^2 2^(3-2n) mu^(1-n) rho^(n-1) omega^(2n-2) / (n! (n-1)!)``."""
    n, m = cfg.n, cfg.background
    if cfg.kappa == 0:
        return ScaledReal(0.0)
    log2_val = (math.log2(math.pi) + 2.0 * math.log2(abs(cfg.kappa)) + (3 - 2 * n)
                + (1 - n) * math.log2(m.mu) + (n - 1) * math.log2(m.rho)
                + (2 * n - 2) * math.log2(cfg.omega)
                - (math.lgamma(n + 1) + math.lgamma(n)) / _LN2)
    return ScaledReal.from_log2(log2_val)


def _ratio(num: ScaledReal, den: ScaledReal) -> float:
    if den.is_zero():
        raise DegenerateFieldError("ratio denominator vanishes")
    return float(num / den)


def localization_ratio_interior(cfg: ScatteringConfig, densities: ModalDensities) -> float:
    """``||u||^2(r < gamma1) / ||u||^2(r < 1)`` for the interior total field."""
    prof = displacement_profile(cfg, densities, "interior")
    g1 = cfg.shells.gamma1
    core = shell_l2_norm_sq(prof, 0.0, g1, _tol(cfg))
    shell = shell_l2_norm_sq(prof, g1, 1.0, _tol(cfg))
    return _ratio(core, core + shell)


def localization_ratio_exterior(cfg: ScatteringConfig, densities: ModalDensities) -> float:
    """``||u^s||^2(gamma2 < r < R) / ||u^s||^2(1 < r < R)`` for the scattered field."""
    sh = cfg.shells
    prof = displacement_profile(cfg, densities, "scattered", 1.0, sh.R)
    shell = shell_l2_norm_sq(prof, 1.0, sh.gamma2, _tol(cfg))
    rest = shell_l2_norm_sq(prof, sh.gamma2, sh.R, _tol(cfg))
    return _ratio(rest, shell + rest)


def resonance_ratio_interior(cfg: ScatteringConfig, densities: ModalDensities) -> float:
    """``||grad u||`` over ``gamma1 < r < 1`` divided by ``||u^i||`` over the unit disk."""
    num = shell_l2_norm_sq(gradient_profile(cfg, densities, "interior"), cfg.shells.gamma1, 1.0, _tol(cfg))
    return math.sqrt(_ratio(num, incident_norm_sq(cfg)))


def resonance_ratio_exterior(cfg: ScatteringConfig, densities: ModalDensities) -> float:
    """``||grad u^s||`` over ``1 < r < gamma2`` divided by ``||u^i||`` over the unit disk."""
    sh = cfg.shells
    num = shell_l2_norm_sq(gradient_profile(cfg, densities, "scattered", 1.0, sh.gamma2), 1.0, sh.gamma2,
                           _tol(cfg))
    return math.sqrt(_ratio(num, incident_norm_sq(cfg)))


# ---------------------------------------------------------------------------
# stress energies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StressEnergy:
    """Real part of ``int sigma(u) : conj(grad u)`` and the relative size of its imaginary part."""

    value: ScaledReal
    imag_residual: float


def _energy_density(g: np.ndarray, m: Material) -> np.ndarray:
    """Literal ``sigma : conj(G)`` summed over the four polar entries."""
    grr, grt, gtr, gtt = g
    div = grr + gtt
    s_rr = m.lam * div + 2.0 * m.mu * grr
    s_tt = m.lam * div + 2.0 * m.mu * gtt
    s_rt = m.mu * (grt + gtr)
    return s_rr * np.conj(grr) + s_rt * np.conj(grt) + s_rt * np.conj(gtr) + s_tt * np.conj(gtt)


def _stress_energy(prof: RadialProfile, m: Material, r_lo: float, r_hi: float, tol: float) -> StressEnergy:
    def integrand(r):
        e = _energy_density(prof.mantissa(r), m) * r
        return np.stack([e.real, e.imag])

    re, im = 2.0 * math.pi * integrate(integrand, r_lo, r_hi, tol)
    resid = abs(im) / abs(re) if re != 0.0 else (0.0 if im == 0.0 else math.inf)
    return StressEnergy(ScaledReal(re).ldexp(2 * prof.exponent), resid)


def stress_energy_interior(cfg: ScatteringConfig, densities: ModalDensities) -> StressEnergy:
    """Stress energy of the interior field over ``gamma1 < r < 1`` with the inclusion moduli."""
    prof = gradient_profile(cfg, densities, "interior")
    return _stress_energy(prof, interior_material(cfg), cfg.shells.gamma1, 1.0, _tol(cfg))


def stress_energy_exterior(cfg: ScatteringConfig, densities: ModalDensities) -> StressEnergy:
    """Stress energy of the scattered field over ``1 < r < gamma2`` with the background moduli."""
    g2 = cfg.shells.gamma2
    prof = gradient_profile(cfg, densities, "scattered", 1.0, g2)
    return _stress_energy(prof, cfg.background, 1.0, g2, _tol(cfg))


# ---------------------------------------------------------------------------
# combined report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShellReport:
    """Squared L2 norms of the four regions and the derived ratios.

    ``norm_*`` fields hold squared norms: interior field on ``gamma1 < r < 1``
    (inner shell) and ``r < gamma1`` (core); scattered field on
    ``1 < r < gamma2`` (outer shell) and ``gamma2 < r < R`` (outer rest).
    """

    norm_inner_shell: ScaledReal
    norm_core: ScaledReal
    norm_outer_shell: ScaledReal
    norm_outer_rest: ScaledReal
    localization_ratio_in: float
    localization_ratio_out: float
    resonance_ratio_in: float
    resonance_ratio_out: float
    energy_in: ScaledReal
    energy_out: ScaledReal
    energy_imag_residual_in: float
    energy_imag_residual_out: float
    incident_norm_sq: ScaledReal


def shell_report(cfg: ScatteringConfig, densities: ModalDensities) -> ShellReport:
    sh, tol = cfg.shells, _tol(cfg)
    pin = displacement_profile(cfg, densities, "interior")
    pout = displacement_profile(cfg, densities, "scattered", 1.0, sh.R)
    core = shell_l2_norm_sq(pin, 0.0, sh.gamma1, tol)
    inner = shell_l2_norm_sq(pin, sh.gamma1, 1.0, tol)
    outer = shell_l2_norm_sq(pout, 1.0, sh.gamma2, tol)
    rest = shell_l2_norm_sq(pout, sh.gamma2, sh.R, tol)
    inc = incident_norm_sq(cfg)
    e_in = stress_energy_interior(cfg, densities)
    e_out = stress_energy_exterior(cfg, densities)
    return ShellReport(
        norm_inner_shell=inner,
        norm_core=core,
        norm_outer_shell=outer,
        norm_outer_rest=rest,
        localization_ratio_in=_ratio(core, core + inner),
        localization_ratio_out=_ratio(rest, outer + rest),
        resonance_ratio_in=resonance_ratio_interior(cfg, densities),
        resonance_ratio_out=resonance_ratio_exterior(cfg, densities),
        energy_in=e_in.value,
        energy_out=e_out.value,
        energy_imag_residual_in=e_in.imag_residual,
        energy_imag_residual_out=e_out.imag_residual,
        incident_norm_sq=inc,
    )


# ---------------------------------------------------------------------------
# leading-order interior norm
# ---------------------------------------------------------------------------


def norm_coefficients(cfg: ScatteringConfig) -> tuple[ScaledReal, float, float]:
    """Closed-form ``(zeta_1, zeta_4, zeta_5)`` of the leading interior norm expansion."""
    n = cfg.n
    if n < 2:
        raise DomainError("leading coefficients need n >= 2")
    lam, mu, rho = cfg.background.lam, cfg.background.mu, cfg.background.rho
    t2 = cfg.tau ** 2
    eps = cfg.contrast.eps_rho
    a = lam + 5.0 * mu - (n - 1) * t2 * (lam + mu) + lam * n + mu * n
    if cfg.kappa == 0 or a == 0.0:
        z1 = ScaledReal(0.0)
    else:
        log2_z1 = (math.log2(math.pi) + 2.0 * math.log2(abs(cfg.kappa)) + (3 - 2 * n)
                   + 2.0 * math.log2(t2) + (1 - n) * math.log2(mu) + (n - 1) * math.log2(rho)
                   + 2.0 * math.log2(eps) + 2.0 * math.log2(abs(a))
                   - math.log2(n) - 2.0 * math.log2(t2 + 1.0) - 2.0 * math.log2(lam + 3.0 * mu)
                   - 2.0 * math.lgamma(n) / _LN2)
        z1 = ScaledReal.from_log2(log2_z1)
    z4 = -2.0 * (n - 1) * n * (t2 - 1.0) * (lam + mu) / (
        (n * n - 1) * t2 * (lam + mu) - (n + 1) * (lam * (n + 1) + mu * (n + 5)))
    z5 = ((lam ** 2 * (n * n + 2 * n + 2) + 2.0 * lam * mu * (n * (n + 2) + 4) + mu ** 2 * (n * n + 2 * n + 10))
          * (n - 1) ** 2 * n * (t2 - 1.0) ** 2
          / ((n + 2) * ((n + 1) * (lam * (n + 1) + mu * (n + 5)) - (n * n - 1) * t2 * (lam + mu)) ** 2))
    return z1, z4, z5


def asymptotic_interior_norm_sq(cfg: ScatteringConfig, radius: float = 1.0) -> ScaledReal:
    """Leading ``||u||^2`` over ``r < radius``: ``zeta_1 g^(2n) (1 + zeta_4 g^2 + zeta_5 g^4) omega^(2n-2)``."""
    if not 0.0 < radius <= 1.0:
        raise DomainError("radius must lie in (0, 1]")
    z1, z4, z5 = norm_coefficients(cfg)
    poly = 1.0 + z4 * radius ** 2 + z5 * radius ** 4
    w = ScaledReal.from_log2((2 * cfg.n - 2) * math.log2(cfg.omega) + 2 * cfg.n * math.log2(radius))
    return z1 * w * poly


def asymptotic_localization_ratio_interior(cfg: ScatteringConfig) -> float:
    """Leading interior ratio ``g^(2n) (1 + zeta_4 g^2 + zeta_5 g^4) / (1 + zeta_4 + zeta_5)``."""
    _, z4, z5 = norm_coefficients(cfg)
    g = cfg.shells.gamma1
    return g ** (2 * cfg.n) * (1.0 + z4 * g * g + z5 * g ** 4) / (1.0 + z4 + z5)
