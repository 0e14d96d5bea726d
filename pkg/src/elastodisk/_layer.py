"""Modal single-layer potentials of the disk in a form free of leading cancellation.

For a density ``e^{in theta} v`` (``v`` the radial or tangential unit vector)
the single-layer potential is a combination of s- and p-wave modal fields
whose ``1/omega**2`` prefactor multiplies a bracket with cancelling unit
terms.  Writing the cylinder functions through the normalized forms of
:mod:`elastodisk.scaled_specfun` lets those unit terms cancel analytically.

Inside the unit disk the potential is ``u = r**(n-1) * V(r)``, outside it is
``u = r**(-n-1) * V(r)``; ``V`` is O(1) over the sub-wavelength range.

Array layout: ``V[component, column, point]`` with component 0 = radial,
1 = tangential and column 0 = radial density, 1 = tangential density.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scaled_specfun import (
    DomainError,
    bessel_j,
    bessel_j_prime,
    bessel_y,
    bessel_y_prime,
    log2_power_prefactor,
    normalized_cylinder,
    normalized_first_kind,
)

INTERIOR = "interior"
EXTERIOR = "exterior"

# column -> (s-wave boundary type, p-wave boundary type); "a" ~ n Z(z)/z, "b" ~ Z'(z)
_BOUNDARY_TYPES = (("a", "b"), ("b", "a"))
# component -> (s-wave radial type, p-wave radial type)
_RADIAL_TYPES = (("a", "b"), ("b", "a"))
# phase factor per (component, column)
_PHASE = ((1.0, -1j), (1j, 1.0))


@dataclass(frozen=True)
class ModalBasis:
    """Reduced single-layer fields on one side of the interface.

    ``u = r**power * value`` and ``du/dr = r**(power-1) * (power*value + r*slope)``.
    """

    side: str
    n: int
    r: np.ndarray
    power: int
    value: np.ndarray
    slope: np.ndarray

    def reduced_gradient(self) -> np.ndarray:
        """Polar gradient times ``r**(1-power)``; shape (4, 2, npts).

        Order of the first axis: G_rr, G_r_theta, G_theta_r, G_theta_theta with
        ``G_ij = d_j u_i`` and the angular factor ``e^{in theta}`` removed.
        """
        n, p, r = self.n, self.power, self.r
        vr, vt = self.value[0], self.value[1]
        sr, st = self.slope[0], self.slope[1]
        return np.stack([
            p * vr + r * sr,
            1j * n * vr - vt,
            p * vt + r * st,
            1j * n * vt + vr,
        ])


def _wave_numbers(omega: float, lam: float, mu: float, rho: float) -> tuple[float, float]:
    return omega / math.sqrt(mu / rho), omega / math.sqrt((lam + 2.0 * mu) / rho)


def _first_kind(nf, kind: str):
    """(value, tail, z-derivative) of the normalized first-kind function of a type."""
    if kind == "a":
        return nf.jh, nf.jh_tail, nf.d_jh
    return nf.dj, nf.dj_tail, nf.d_dj


def _second_kind(nc, kind: str):
    """(sign, value, tail, z-derivative) of the normalized second-kind function."""
    if kind == "a":
        return -1.0, nc.f, nc.f_tail, nc.d_f
    return 1.0, nc.dy, nc.dy_tail, nc.d_dy


def modal_basis(side: str, n: int, omega: float, lam: float, mu: float, rho: float,
                r) -> ModalBasis:
    """Single-layer fields of the two modal densities at radii ``r``.

    Parameters
    ----------
    side : {"interior", "exterior"}
        ``interior`` needs ``0 <= r <= 1``; ``exterior`` needs ``r >= 1``.
    n : int
        Mode index, ``n >= 2``.
    omega : float
        Angular frequency.
    lam, mu, rho : float
        Lame parameters and density of the medium on that side.
    r : array_like
        Radii.
    """
    if n < 2:
        raise DomainError("the normalized modal basis needs n >= 2")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    k = _wave_numbers(omega, lam, mu, rho)
    K = n / (2.0 * omega * omega * rho)
    bnd = normalized_cylinder(n, np.array(k))
    value = np.zeros((2, 2, r.size), dtype=complex)
    slope = np.zeros((2, 2, r.size), dtype=complex)

    if side == INTERIOR:
        if np.any(r < 0.0) or np.any(r > 1.0):
            raise DomainError("interior basis needs 0 <= r <= 1")
        rad = [normalized_first_kind(n, kw * r) for kw in k]
        e2 = [2.0 ** (2.0 * float(log2_power_prefactor(n, kw))) for kw in k]
        for comp in range(2):
            for col in range(2):
                terms = []
                jj, djj = 0.0, 0.0
                for w in range(2):
                    bt, rt = _BOUNDARY_TYPES[col][w], _RADIAL_TYPES[comp][w]
                    sign, xv, xt, _ = _second_kind(_slice(bnd, w), bt)
                    zv, zt, dz = _first_kind(rad[w], rt)
                    terms.append((sign, xv, xt, zt, k[w] * dz))
                    xj = _first_kind(_slice(bnd, w), bt)[0]
                    jj = jj + e2[w] * xj * zv
                    djj = djj + e2[w] * xj * k[w] * dz
                v, dv = _cancelled(terms)
                ph = _PHASE[comp][col]
                value[comp, col] = ph * K * (v - 1j * math.pi * n * jj)
                slope[comp, col] = ph * K * (dv - 1j * math.pi * n * djj)
        return ModalBasis(side, n, r, n - 1, value, slope)

    if side == EXTERIOR:
        if np.any(r < 1.0):
            raise DomainError("exterior basis needs r >= 1")
        rad = [normalized_cylinder(n, kw * r) for kw in k]
        log_e = [log2_power_prefactor(n, kw * r) for kw in k]
        e2 = [np.exp2(2.0 * le) for le in log_e]
        for comp in range(2):
            for col in range(2):
                terms = []
                jj, djj = 0.0, 0.0
                for w in range(2):
                    bt, rt = _BOUNDARY_TYPES[col][w], _RADIAL_TYPES[comp][w]
                    xv, xt, _ = _first_kind(_slice(bnd, w), bt)
                    sign, zv, zt, dz = _second_kind(rad[w], rt)
                    terms.append((sign, xv, xt, zt, k[w] * dz))
                    zj, _, dzj = _first_kind(rad[w], rt)
                    jj = jj + e2[w] * xv * zj
                    djj = djj + e2[w] * xv * ((2.0 * n / r) * zj + k[w] * dzj)
                v, dv = _cancelled(terms)
                ph = _PHASE[comp][col]
                value[comp, col] = ph * K * (v - 1j * math.pi * n * jj)
                slope[comp, col] = ph * K * (dv - 1j * math.pi * n * djj)
        return ModalBasis(side, n, r, -n - 1, value, slope)

    raise ValueError(f"unknown side {side!r}")


class _Slice:
    __slots__ = ("jh", "jh_tail", "d_jh", "dj", "dj_tail", "d_dj",
                 "f", "f_tail", "d_f", "dy", "dy_tail", "d_dy")


def _slice(nc, i: int) -> _Slice:
    s = _Slice()
    for name in _Slice.__slots__:
        setattr(s, name, float(getattr(nc, name)[i]))
    return s


def _cancelled(terms):
    """Sum of two products ``sign * X * Z(r)`` whose unit parts cancel.

    Each term is ``(sign, X, X_tail, Z_tail, dZ/dr)``; the signs are opposite.
    Returns the sum and its r-derivative.
    """
    (s1, x1, t1, z1, d1), (s2, x2, t2, z2, d2) = terms
    if s1 == s2:
        raise AssertionError("modal products must carry opposite signs")
    if s1 < 0:
        (x1, t1, z1, d1), (x2, t2, z2, d2) = (x2, t2, z2, d2), (x1, t1, z1, d1)
    return (t1 - t2) + x1 * z1 - x2 * z2, x1 * d1 - x2 * d2


# ---------------------------------------------------------------------------
# literal evaluation from the unnormalized cylinder functions
# ---------------------------------------------------------------------------


def _cyl(kind: str, n: int, x: float) -> tuple[complex, complex, complex]:
    """(Z, Z', Z'') for Z = J (kind "J") or Z = H^(1) (kind "H")."""
    j, jp = float(bessel_j(n, x)), float(bessel_j_prime(n, x))
    if kind == "J":
        z, zp = complex(j), complex(jp)
    else:
        z = complex(j, float(bessel_y(n, x)))
        zp = complex(jp, float(bessel_y_prime(n, x)))
    zpp = -zp / x - (1.0 - n * n / (x * x)) * z
    return z, zp, zpp


def direct_modal_fields(side: str, n: int, omega: float, lam: float, mu: float, rho: float,
                        r) -> tuple[np.ndarray, np.ndarray]:
    """Single-layer fields and their r-derivatives from unnormalized cylinder functions.

    Loses roughly ``log10(1/k**2)`` digits to cancellation; used for ``n < 2``
    and as an independent cross-check of :func:`modal_basis`.  Returns
    arrays ``u[component, column, point]`` and ``du/dr`` of the same shape.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0.0):
        raise DomainError("direct evaluation needs r > 0")
    k = _wave_numbers(omega, lam, mu, rho)
    bkind, rkind = ("H", "J") if side == INTERIOR else ("J", "H")
    pre = math.pi / (2.0 * omega * omega * rho)
    u = np.zeros((2, 2, r.size), dtype=complex)
    du = np.zeros_like(u)
    bnd = [_cyl(bkind, n, kw) for kw in k]
    for i, ri in enumerate(r):
        rad = [_cyl(rkind, n, kw * ri) for kw in k]
        for comp in range(2):
            for col in range(2):
                acc, dacc = 0.0, 0.0
                for w in range(2):
                    kw = k[w]
                    zb, zbp, _ = bnd[w]
                    x = n * zb / kw if _BOUNDARY_TYPES[col][w] == "a" else zbp
                    z, zp, zpp = rad[w]
                    t = kw * ri
                    if _RADIAL_TYPES[comp][w] == "a":
                        y, dy = n * z / t, n * (zp / t - z / (t * t)) * kw
                    else:
                        y, dy = zp, zpp * kw
                    acc += kw * kw * x * y
                    dacc += kw * kw * x * dy
                ph = -1j * _PHASE[comp][col]
                u[comp, col, i] = ph * pre * acc
                du[comp, col, i] = ph * pre * dacc
    return u, du
