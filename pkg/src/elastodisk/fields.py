"""Incident, interior and scattered modal fields, their gradients and stresses.

Every field of mode ``n`` has the form ``(u_r e_r + u_theta e_theta) e^{in theta}``
with radial coefficients carried here.  Gradients use the polar convention
``G_ij = d_j u_i``:

    G_rr = d_r u_r              G_r_theta = (i n u_r - u_theta) / r
    G_theta_r = d_r u_theta     G_theta_theta = (i n u_theta + u_r) / r

again with the common factor ``e^{in theta}`` removed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _layer
from .medium_model import Material, ScatteringConfig, interior_material
from .modal_solver import ModalDensities
from .scaled_specfun import (
    DomainError,
    ScaledComplex,
    ScaledReal,
    bessel_j,
    bessel_j_prime,
    bessel_y,
    bessel_y_prime,
    log2_power_prefactor,
    normalized_first_kind,
)

__all__ = [
    "ModeFunctions",
    "FieldSample",
    "GradientSample",
    "StressSample",
    "ModalProfile",
    "incident_profile",
    "interior_profile",
    "scattered_profile",
    "incident_field",
    "incident_gradient",
    "interior_total_field",
    "scattered_field",
    "interior_gradient",
    "scattered_gradient",
    "stress",
    "traction",
    "AsymptoticFieldCoefficients",
    "AsymptoticGradient",
    "asymptotic_field_coefficients",
    "asymptotic_gradient_coefficients",
]

_LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# literal modal vector functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModeFunctions:
    """Radial pair of one modal vector wave function.

    ``s_*`` are shear modes ``(2 n Z(kr)/(kr), 2i Z'(kr))``, ``p_*`` are
    compressional modes ``(2 Z'(kr), 2i n Z(kr)/(kr))``; ``Z = J_n`` for the
    ``*_interior`` kinds and ``Z = H_n^(1)`` for the ``*_outgoing`` kinds.
    """

    kind: str
    n: int
    k: float

    _KINDS = ("s_interior", "p_interior", "s_outgoing", "p_outgoing")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"kind must be one of {self._KINDS}")
        if self.k <= 0.0:
            raise DomainError("wavenumber must be positive")

    def radial_pair(self, r: float) -> tuple[ScaledComplex, ScaledComplex]:
        x = self.k * float(r)
        n = self.n
        if x == 0.0:
            if self.kind.endswith("outgoing"):
                raise DomainError("outgoing modes are singular at r = 0")
            return ScaledComplex(), ScaledComplex()
        z = ScaledComplex(bessel_j(n, x))
        zp = ScaledComplex(bessel_j_prime(n, x))
        if self.kind.endswith("outgoing"):
            z = z + ScaledComplex(ScaledReal(0.0), bessel_y(n, x))
            zp = zp + ScaledComplex(ScaledReal(0.0), bessel_y_prime(n, x))
        a = z * (2.0 * n / x)
        b = zp * 2.0
        if self.kind.startswith("s"):
            return a, b * 1j
        return b, a * 1j


# ---------------------------------------------------------------------------
# sample types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSample:
    """Displacement coefficients at ``(r, theta)``; the vector is ``(u_r e_r + u_theta e_theta) e^{in theta}``."""

    r: float
    theta: float
    n: int
    u_r: ScaledComplex
    u_theta: ScaledComplex

    def vector(self) -> np.ndarray:
        """Polar components including the angular factor, as plain complex numbers."""
        phase = complex(math.cos(self.n * self.theta), math.sin(self.n * self.theta))
        return np.array([complex(self.u_r) * phase, complex(self.u_theta) * phase])

    def mantissas(self) -> tuple[np.ndarray, int]:
        e = max(self.u_r.common_exponent(), self.u_theta.common_exponent())
        return np.array([self.u_r.mantissa_at(e), self.u_theta.mantissa_at(e)]), e


@dataclass(frozen=True)
class GradientSample:
    """Polar gradient ``G_ij = d_j u_i`` with the factor ``e^{in theta}`` removed."""

    r: float
    theta: float
    n: int
    A_rr: ScaledComplex
    A_rtheta: ScaledComplex
    A_thetar: ScaledComplex
    A_thetatheta: ScaledComplex

    def components(self) -> tuple[ScaledComplex, ...]:
        return (self.A_rr, self.A_rtheta, self.A_thetar, self.A_thetatheta)

    def mantissas(self) -> tuple[np.ndarray, int]:
        comps = self.components()
        nonzero = [c.common_exponent() for c in comps if not c.is_zero()]
        e = max(nonzero) if nonzero else 0
        return np.array([c.mantissa_at(e) for c in comps]), e

    def matrix(self) -> np.ndarray:
        """2x2 complex matrix ``[[G_rr, G_rtheta], [G_thetar, G_thetatheta]]``."""
        return np.array([[complex(self.A_rr), complex(self.A_rtheta)],
                         [complex(self.A_thetar), complex(self.A_thetatheta)]])


@dataclass(frozen=True)
class StressSample:
    r: float
    theta: float
    n: int
    sigma_rr: ScaledComplex
    sigma_rtheta: ScaledComplex
    sigma_thetar: ScaledComplex
    sigma_thetatheta: ScaledComplex


# ---------------------------------------------------------------------------
# vectorized radial profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModalProfile:
    """Radial profile ``u = 2**exponent * r**power * value`` on an array of radii.

    ``slope`` is ``d(value)/dr``.  The reference exponent is chosen so that the
    values are O(|densities|) at ``r = 1``, where ``r**power`` peaks.
    """

    n: int
    r: np.ndarray
    power: int
    value: np.ndarray
    slope: np.ndarray
    exponent: int

    def _rpow(self, p: int) -> np.ndarray:
        with np.errstate(divide="ignore", under="ignore", over="ignore"):
            out = np.power(self.r, float(p))
        if p == 0:
            out = np.ones_like(self.r)
        return out

    def displacement(self) -> np.ndarray:
        """``u / 2**exponent``, shape (2, npts); may underflow to 0 far from r = 1."""
        return self._rpow(self.power) * self.value

    def reduced_gradient(self) -> np.ndarray:
        """Gradient times ``r**(1-power)``, shape (4, npts), rows G_rr, G_rt, G_tr, G_tt."""
        n, p, r = self.n, self.power, self.r
        vr, vt = self.value
        sr, st = self.slope
        return np.stack([p * vr + r * sr, 1j * n * vr - vt, p * vt + r * st, 1j * n * vt + vr])

    def gradient(self) -> np.ndarray:
        """``grad u / 2**exponent``, shape (4, npts)."""
        return self._rpow(self.power - 1) * self.reduced_gradient()

    def log2_radial_factor(self, p: int) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return p * np.log2(self.r)


def _check_radii(r, lo: float, hi: float, lo_open: bool, hi_open: bool, what: str) -> np.ndarray:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    bad = (r < lo) | (r > hi) | ((r == lo) & lo_open) | ((r == hi) & hi_open) | ~np.isfinite(r)
    if np.any(bad):
        raise DomainError(f"{what} needs radii in the stated range, got {r[bad][0]!r}")
    return r


def incident_profile(cfg: ScatteringConfig, r) -> ModalProfile:
    """Incident mode ``kappa * Psi_n^s(k_s r)`` as a profile; valid for any ``r >= 0``."""
    n = cfg.n
    r = _check_radii(r, 0.0, math.inf, False, False, "incident field")
    k = cfg.omega / cfg.background.c_s
    # kappa * (2n/k) * E_n(k) * r^(n-1) * (Jh(kr), i DJ(kr))
    log_c = float(log2_power_prefactor(n, k)) + math.log2(2.0 * n / k)
    e = math.floor(log_c)
    c = 2.0 ** (log_c - e) * cfg.kappa
    nf = normalized_first_kind(n, k * r)
    value = c * np.stack([nf.jh, 1j * nf.dj])
    slope = c * k * np.stack([nf.d_jh, 1j * nf.d_dj])
    return ModalProfile(n, r, n - 1, value.astype(complex), slope.astype(complex), e)


def _density_profile(side: str, cfg: ScatteringConfig, densities: ModalDensities, r: np.ndarray,
                     m: Material) -> ModalProfile:
    mant, e = densities.mantissas()
    phis = mant[:2] if side == _layer.INTERIOR else mant[2:]
    basis = _layer.modal_basis(side, cfg.n, cfg.omega, m.lam, m.mu, m.rho, r)
    value = np.einsum("ckp,k->cp", basis.value, phis)
    slope = np.einsum("ckp,k->cp", basis.slope, phis)
    return ModalProfile(cfg.n, r, basis.power, value, slope, e)


def interior_profile(cfg: ScatteringConfig, densities: ModalDensities, r) -> ModalProfile:
    """Interior total field ``S~[phi_1]`` for ``0 <= r <= 1``."""
    r = _check_radii(r, 0.0, 1.0, False, False, "interior field")
    return _density_profile(_layer.INTERIOR, cfg, densities, r, interior_material(cfg))


def scattered_profile(cfg: ScatteringConfig, densities: ModalDensities, r) -> ModalProfile:
    """Scattered field ``S[phi_2]`` for ``r >= 1``."""
    r = _check_radii(r, 1.0, math.inf, False, False, "scattered field")
    return _density_profile(_layer.EXTERIOR, cfg, densities, r, cfg.background)


# ---------------------------------------------------------------------------
# point evaluation
# ---------------------------------------------------------------------------


def _scaled_at(mantissa: complex, exponent: int, r: float, p: int) -> ScaledComplex:
    """``mantissa * 2**exponent * r**p`` without leaving the double range."""
    if mantissa == 0:
        return ScaledComplex()
    if r == 0.0:
        if p > 0:
            return ScaledComplex()
        if p < 0:
            raise DomainError("field is singular at r = 0")
        return ScaledComplex.from_complex(mantissa, exponent)
    lp = p * math.log2(r)
    ei = math.floor(lp)
    return ScaledComplex.from_complex(mantissa * 2.0 ** (lp - ei), exponent + ei)


def _field_sample(prof: ModalProfile, theta: float) -> FieldSample:
    r = float(prof.r[0])
    u = [_scaled_at(complex(prof.value[i, 0]), prof.exponent, r, prof.power) for i in range(2)]
    return FieldSample(r, float(theta), prof.n, u[0], u[1])


def _gradient_sample(prof: ModalProfile, theta: float) -> GradientSample:
    r = float(prof.r[0])
    g = prof.reduced_gradient()[:, 0]
    comps = [_scaled_at(complex(v), prof.exponent, r, prof.power - 1) for v in g]
    return GradientSample(r, float(theta), prof.n, *comps)


def incident_field(cfg: ScatteringConfig, r: float, theta: float = 0.0) -> FieldSample:
    return _field_sample(incident_profile(cfg, [r]), theta)


def incident_gradient(cfg: ScatteringConfig, r: float, theta: float = 0.0) -> GradientSample:
    return _gradient_sample(incident_profile(cfg, [r]), theta)


def interior_total_field(cfg: ScatteringConfig, densities: ModalDensities, r: float,
                         theta: float = 0.0) -> FieldSample:
    """Interior total field at ``0 <= r <= 1`` (``r = 1`` is the on-boundary value)."""
    return _field_sample(interior_profile(cfg, densities, [r]), theta)


def scattered_field(cfg: ScatteringConfig, densities: ModalDensities, r: float,
                    theta: float = 0.0) -> FieldSample:
    """Scattered field at ``r >= 1`` (``r = 1`` is the on-boundary value)."""
    return _field_sample(scattered_profile(cfg, densities, [r]), theta)


def interior_gradient(cfg: ScatteringConfig, densities: ModalDensities, r: float,
                      theta: float = 0.0) -> GradientSample:
    """Gradient of the interior field; at ``r = 1`` the interior one-sided limit."""
    return _gradient_sample(interior_profile(cfg, densities, [r]), theta)


def scattered_gradient(cfg: ScatteringConfig, densities: ModalDensities, r: float,
                       theta: float = 0.0) -> GradientSample:
    """Gradient of the scattered field; at ``r = 1`` the exterior one-sided limit."""
    return _gradient_sample(scattered_profile(cfg, densities, [r]), theta)


def stress(grad: GradientSample, m: Material) -> StressSample:
    """Isotropic stress ``lam * div * I + mu * (G + G^T)`` in the polar frame."""
    div = grad.A_rr + grad.A_thetatheta
    shear = (grad.A_rtheta + grad.A_thetar) * m.mu
    return StressSample(
        grad.r, grad.theta, grad.n,
        div * m.lam + grad.A_rr * (2.0 * m.mu),
        shear,
        shear,
        div * m.lam + grad.A_thetatheta * (2.0 * m.mu),
    )


def traction(grad: GradientSample, m: Material) -> tuple[ScaledComplex, ScaledComplex]:
    """Traction on a circle ``r = const`` from the co-normal derivative formula.

    ``(lam * div + 2 mu d_r u_r, mu * (G_rtheta + G_thetar))``; the same as
    ``sigma . e_r`` but formed without the stress tensor.
    """
    div = grad.A_rr + grad.A_thetatheta
    return (div * m.lam + grad.A_rr * (2.0 * m.mu), (grad.A_rtheta + grad.A_thetar) * m.mu)


# ---------------------------------------------------------------------------
# leading-order closed forms
# ---------------------------------------------------------------------------


def _log2_base(cfg: ScatteringConfig, factorial_arg: int, power_two: int) -> tuple[float, float]:
    """log2 magnitude and phase of ``kappa 2^power_two mu^((1-n)/2) rho^((n-1)/2) / factorial_arg!``."""
    n = cfg.n
    m = cfg.background
    log2_mag = (math.log2(abs(cfg.kappa)) + power_two + 0.5 * (1 - n) * math.log2(m.mu)
                + 0.5 * (n - 1) * math.log2(m.rho) - math.lgamma(factorial_arg + 1) / _LN2)
    return log2_mag, math.atan2(cfg.kappa.imag, cfg.kappa.real)


def _from_log2(log2_mag: float, phase: float, factor: complex) -> ScaledComplex:
    if factor == 0:
        return ScaledComplex()
    e = math.floor(log2_mag)
    m = 2.0 ** (log2_mag - e) * complex(math.cos(phase), math.sin(phase)) * factor
    return ScaledComplex.from_complex(m, e)


@dataclass(frozen=True)
class AsymptoticFieldCoefficients:
    """Closed-form leading coefficients of the interior (``xi[0:4]``) and scattered
    (``xi[4:8]``) fields; the fields are these times ``omega**(n-1)``."""

    n: int
    omega: float
    xi: tuple[ScaledComplex, ...]

    @property
    def omega_power(self) -> ScaledReal:
        return ScaledReal.from_log2((self.n - 1) * math.log2(self.omega))

    def interior(self, r: float) -> tuple[ScaledComplex, ScaledComplex]:
        """Leading ``(u_r, u_theta)`` inside, including ``omega**(n-1)``."""
        x1, x2, x3, x4 = self.xi[:4]
        w = ScaledComplex(self.omega_power)
        return ((x1 * r ** (self.n - 1) + x2 * r ** (self.n + 1)) * w,
                (x3 * r ** (self.n - 1) + x4 * r ** (self.n + 1)) * w)

    def exterior(self, r: float) -> tuple[ScaledComplex, ScaledComplex]:
        """Leading ``(u_r, u_theta)`` outside, including ``omega**(n-1)``."""
        x5, x6, x7, x8 = self.xi[4:]
        w = ScaledComplex(self.omega_power)
        return ((x5 * r ** (-self.n - 1) + x6 * r ** (1 - self.n)) * w,
                (x7 * r ** (-self.n - 1) + x8 * r ** (1 - self.n)) * w)


def asymptotic_field_coefficients(cfg: ScatteringConfig) -> AsymptoticFieldCoefficients:
    """Transcription of the closed-form leading field coefficients ``xi_1..xi_8``."""
    n = cfg.n
    if n < 2:
        raise DomainError("leading coefficients need n >= 2")
    lam, mu = cfg.background.lam, cfg.background.mu
    t2 = cfg.tau ** 2
    eps = cfg.contrast.eps_rho
    l3 = lam + 3.0 * mu
    base1, ph = _log2_base(cfg, n - 1, 1 - n)  # kappa 2^(1-n) mu.. rho.. / (n-1)!
    base2, _ = _log2_base(cfg, n - 2, 1 - n)  # same over (n-2)!
    a = (lam * (n + 1) + mu * (n + 5)) - (n - 1) * t2 * (lam + mu)
    xi1 = _from_log2(base1, ph, t2 * eps * a / ((t2 + 1.0) * l3))
    xi2 = _from_log2(base2, ph, t2 * eps * (t2 - 1.0) * (n * (lam + mu) - 2.0 * mu) / ((n + 1) * (t2 + 1.0) * l3))
    xi3 = _from_log2(base1, ph, 1j * t2 * eps * a / ((t2 + 1.0) * l3))
    xi4 = _from_log2(base1, ph, 1j * t2 * eps * (n - 1) * (t2 - 1.0) * (lam * (n + 2) + mu * (n + 4))
                     / ((n + 1) * (t2 + 1.0) * l3))
    b = t2 * l3 + (n + 1) * (lam + mu)
    xi5 = _from_log2(base1, ph, -(n - 1) * (t2 - 1.0) * b / ((n + 1) * (t2 + 1.0) * l3))
    xi6 = _from_log2(base1, ph, (t2 - 1.0) * (2.0 * mu + n * (lam + mu)) / ((t2 + 1.0) * l3))
    xi7 = _from_log2(base1, ph, 1j * (n - 1) * (t2 - 1.0) * b / ((n + 1) * (t2 + 1.0) * l3))
    xi8 = _from_log2(base1, ph, -1j * (t2 - 1.0) * (-2.0 * (lam + 2.0 * mu) + n * (lam + mu)) / ((t2 + 1.0) * l3))
    return AsymptoticFieldCoefficients(n, cfg.omega, (xi1, xi2, xi3, xi4, xi5, xi6, xi7, xi8))


def xi_interior_sum(cfg: ScatteringConfig) -> ScaledComplex:
    """Displayed closed form of ``xi_1 + xi_2 + xi_3 + xi_4``."""
    n = cfg.n
    t2 = cfg.tau ** 2
    eps = cfg.contrast.eps_rho
    base, ph = _log2_base(cfg, n - 1, 1 - n)
    f = (1 + 1j) * t2 * eps * (1j * (n - 1) * t2 + (2 - 1j) * n + (2 + 1j)) / ((n + 1) * (t2 + 1.0))
    return _from_log2(base, ph, f)


def xi_exterior_sum(cfg: ScatteringConfig) -> ScaledComplex:
    """Displayed closed form of ``xi_5 + xi_6 + xi_7 + xi_8``."""
    n = cfg.n
    t2 = cfg.tau ** 2
    base, ph = _log2_base(cfg, n - 1, 1 - n)
    f = (1 + 1j) * (t2 - 1.0) * (1j * (n - 1) * t2 + n + 1) / ((n + 1) * (t2 + 1.0))
    return _from_log2(base, ph, f)


@dataclass(frozen=True)
class AsymptoticGradient:
    """Leading gradient entries at one radius, including ``omega**(n-1)``.

    Interior: ``A11`` (rr), ``A12`` (lumped r-theta), ``A22`` (theta-theta);
    exterior: ``A31``, ``A32``, ``A42`` likewise.  The lumped off-diagonal
    entries correspond to ``G_rtheta + G_thetar`` in the polar convention.
    """

    r_interior: float | None
    r_exterior: float | None
    A11: ScaledComplex | None
    A12: ScaledComplex | None
    A22: ScaledComplex | None
    A31: ScaledComplex | None
    A32: ScaledComplex | None
    A42: ScaledComplex | None


def asymptotic_gradient_coefficients(cfg: ScatteringConfig, r: float) -> AsymptoticGradient:
    """Closed-form leading gradient entries at radius ``r``.

    For ``r < 1`` the interior entries are returned, for ``r > 1`` the exterior
    ones, and at ``r = 1`` both (as one-sided limits).  The radial-radial
    interior entry is completed from the leading field coefficients as
    ``(n-1) xi_1 r^(n-2) + (n+1) xi_2 r^n``.
    """
    n = cfg.n
    if n < 2:
        raise DomainError("leading coefficients need n >= 2")
    r = float(r)
    if r <= 0.0:
        raise DomainError("radius must be positive")
    lam, mu = cfg.background.lam, cfg.background.mu
    t2 = cfg.tau ** 2
    eps = cfg.contrast.eps_rho
    l3 = lam + 3.0 * mu
    base, ph = _log2_base(cfg, n - 2, 1 - n)
    base += (n - 1) * math.log2(cfg.omega)
    r2 = r * r
    A11 = A12 = A22 = A31 = A32 = A42 = None
    if r <= 1.0:
        lb = base + (n - 2) * math.log2(r)
        c = t2 * eps / ((t2 + 1.0) * l3)
        lam_part = lam * (n * (r2 - 1.0) * (t2 - 1.0) + t2 + 1.0)
        A11 = _from_log2(lb, ph, c * (lam_part + mu * (n * (r2 - 1.0) * (t2 - 1.0)
                                                        - 2.0 * r2 * (t2 - 1.0) + t2 + 5.0)))
        A12 = _from_log2(lb, ph, 2j * c * (lam_part + mu * (n * (r2 - 1.0) * (t2 - 1.0) + t2 + 5.0)))
        A22 = _from_log2(lb, ph, -c * (lam_part + mu * (n * (r2 - 1.0) * (t2 - 1.0)
                                                         + 2.0 * r2 * (t2 - 1.0) + t2 + 5.0)))
    if r >= 1.0:
        lb = base + (-n - 2) * math.log2(r)
        c = (t2 - 1.0) / ((t2 + 1.0) * l3)
        lam_part = lam * (-n * r2 + n + t2 + 1.0)
        A31 = _from_log2(lb, ph, c * (lam_part + mu * (-n * r2 + n - 2.0 * r2 + 3.0 * t2 + 1.0)))
        A32 = _from_log2(lb, ph, -2j * c * (t2 * l3 - (lam + mu) * (n * (r2 - 1.0) - 1.0)))
        A42 = _from_log2(lb, ph, -c * (lam_part + mu * (-n * r2 + n + 2.0 * r2 + 3.0 * t2 + 1.0)))
    return AsymptoticGradient(r if r <= 1.0 else None, r if r >= 1.0 else None,
                              A11, A12, A22, A31, A32, A42)
