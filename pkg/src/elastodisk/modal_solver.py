"""Exact modal transmission system for the disk and its leading-order references.

For an incident shear mode of index ``n`` the interior and exterior densities
are ``phi_1 = (phi11 v + phi12 t) e^{in theta}`` and
``phi_2 = (phi21 v + phi22 t) e^{in theta}``.  Continuity of displacement and
traction on ``r = 1`` gives a 4x4 linear system whose matrix is O(1) for all
sub-wavelength frequencies while the right-hand side scales like
``omega**(n-1) / (n-1)!``; the right-hand side is therefore carried with a
separate binary exponent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _layer
from .medium_model import Material, ScatteringConfig, interior_material
from .scaled_specfun import (
    DomainError,
    ScaledComplex,
    ScaledReal,
    bessel_j,
    bessel_j_prime,
    log2_power_prefactor,
    normalized_first_kind,
)

__all__ = [
    "SingularSystemError",
    "LayerCoeffs",
    "TractionCoeffs",
    "IncidentBoundaryData",
    "ModalDensities",
    "ModalSystem",
    "single_layer_coeffs",
    "traction_coeffs",
    "interior_traction_coeffs",
    "incident_boundary_data",
    "assemble_system",
    "solve_densities",
    "solve",
    "asymptotic_densities",
    "a0_matrix",
    "a0_inverse",
    "a0_determinant",
    "limit_matrix",
]

_LN2 = math.log(2.0)


class SingularSystemError(ArithmeticError):
    """Elimination met a pivot that is zero relative to its row scale."""


@dataclass(frozen=True)
class LayerCoeffs:
    """On-boundary single-layer coefficients.

    ``S[e^{in theta} v] = (alpha1n v + alpha2n t) e^{in theta}`` and
    ``S[e^{in theta} t] = (alpha3n v + alpha4n t) e^{in theta}`` on ``r = 1``.
    """

    alpha1n: ScaledComplex
    alpha2n: ScaledComplex
    alpha3n: ScaledComplex
    alpha4n: ScaledComplex

    def as_array(self) -> np.ndarray:
        return np.array([complex(a) for a in (self.alpha1n, self.alpha2n, self.alpha3n, self.alpha4n)])


@dataclass(frozen=True)
class TractionCoeffs:
    """Traction coefficients of the single layer on ``r = 1`` from outside.

    The radial density maps to ``g1n v + g2n t``, the tangential one to
    ``g3n v + g4n t``.
    """

    g1n: ScaledComplex
    g2n: ScaledComplex
    g3n: ScaledComplex
    g4n: ScaledComplex

    def as_array(self) -> np.ndarray:
        return np.array([complex(g) for g in (self.g1n, self.g2n, self.g3n, self.g4n)])


@dataclass(frozen=True)
class IncidentBoundaryData:
    """Displacement (``f1n, f2n``) and traction (``ft1n, ft2n``) of the incident mode on ``r = 1``."""

    f1n: ScaledComplex
    f2n: ScaledComplex
    ft1n: ScaledComplex
    ft2n: ScaledComplex

    def as_scaled_vector(self) -> tuple[np.ndarray, int]:
        """Mantissas at a shared binary exponent, and that exponent."""
        vals = (self.f1n, self.f2n, self.ft1n, self.ft2n)
        nonzero = [v.common_exponent() for v in vals if not v.is_zero()]
        e = max(nonzero) if nonzero else 0
        return np.array([v.mantissa_at(e) for v in vals]), e


@dataclass(frozen=True)
class ModalDensities:
    """Density coefficients and the diagnostics of the solve that produced them."""

    phi11: ScaledComplex
    phi12: ScaledComplex
    phi21: ScaledComplex
    phi22: ScaledComplex
    residual: float = 0.0
    condition_estimate: float = 1.0

    def as_tuple(self) -> tuple[ScaledComplex, ...]:
        return (self.phi11, self.phi12, self.phi21, self.phi22)

    def common_exponent(self) -> int:
        nonzero = [p.common_exponent() for p in self.as_tuple() if not p.is_zero()]
        return max(nonzero) if nonzero else 0

    def mantissas(self, exponent: int | None = None) -> tuple[np.ndarray, int]:
        """Densities divided by ``2**exponent`` (default: the shared exponent)."""
        e = self.common_exponent() if exponent is None else exponent
        return np.array([p.mantissa_at(e) for p in self.as_tuple()]), e

    def scaled(self, factor: complex) -> "ModalDensities":
        return ModalDensities(*(p * factor for p in self.as_tuple()),
                              residual=self.residual, condition_estimate=self.condition_estimate)


@dataclass(frozen=True)
class ModalSystem:
    """Transmission system ``A x = b`` with its power-of-two equilibration.

    ``A`` holds, column-wise, the interior coefficients for ``(phi11, phi12)``
    and the negated exterior coefficients for ``(phi21, phi22)``.  Rows are
    radial displacement, tangential displacement, radial traction, tangential
    traction.  ``b = b_mantissa * 2**b_exponent``.  The equilibrated matrix is
    ``diag(2**-row_exponents) A diag(2**-col_exponents)``.
    """

    A: tuple[tuple[ScaledComplex, ...], ...]
    b: tuple[ScaledComplex, ...]
    matrix: np.ndarray
    b_mantissa: np.ndarray
    b_exponent: int
    row_exponents: np.ndarray
    col_exponents: np.ndarray
    equilibrated: np.ndarray
    condition_estimate: float


def _scaled(z: complex) -> ScaledComplex:
    return ScaledComplex.from_complex(z)


def _check_order(n: int) -> int:
    if int(n) != n or n < 0:
        raise DomainError(f"mode index must be a non-negative integer, got {n!r}")
    return int(n)


def _boundary_fields(side: str, n: int, omega: float, m: Material):
    """(u, du/dr) at r = 1 for both densities; arrays indexed [component, column]."""
    if n >= 2:
        basis = _layer.modal_basis(side, n, omega, m.lam, m.mu, m.rho, np.array([1.0]))
        u = basis.value[:, :, 0]
        du = basis.power * basis.value[:, :, 0] + basis.slope[:, :, 0]
        return u, du
    u, du = _layer.direct_modal_fields(side, n, omega, m.lam, m.mu, m.rho, np.array([1.0]))
    return u[:, :, 0], du[:, :, 0]


def _traction_at_unit_radius(n: int, u: np.ndarray, du: np.ndarray, m: Material) -> np.ndarray:
    """Traction (radial, tangential) x column at r = 1 from displacement and radial derivative."""
    g_rr = du[0]
    g_rt = 1j * n * u[0] - u[1]
    g_tr = du[1]
    g_tt = 1j * n * u[1] + u[0]
    div = g_rr + g_tt
    return np.array([m.lam * div + 2.0 * m.mu * g_rr, m.mu * (g_rt + g_tr)])


def single_layer_coeffs(n: int, omega: float, m: Material) -> LayerCoeffs:
    """Coefficients of the single layer of ``e^{in theta} v`` and ``e^{in theta} t`` on ``r = 1``."""
    n = _check_order(n)
    u, _ = _boundary_fields(_layer.INTERIOR, n, omega, m)
    return LayerCoeffs(_scaled(u[0, 0]), _scaled(u[1, 0]), _scaled(u[0, 1]), _scaled(u[1, 1]))


def traction_coeffs(n: int, omega: float, m: Material) -> TractionCoeffs:
    """Exterior-side traction coefficients of the single layer on ``r = 1``."""
    n = _check_order(n)
    u, du = _boundary_fields(_layer.EXTERIOR, n, omega, m)
    t = _traction_at_unit_radius(n, u, du, m)
    return TractionCoeffs(_scaled(t[0, 0]), _scaled(t[1, 0]), _scaled(t[0, 1]), _scaled(t[1, 1]))


def interior_traction_coeffs(n: int, omega: float, m: Material) -> TractionCoeffs:
    """Interior-side traction coefficients on ``r = 1`` (jump relation: exterior minus identity)."""
    n = _check_order(n)
    u, du = _boundary_fields(_layer.INTERIOR, n, omega, m)
    t = _traction_at_unit_radius(n, u, du, m)
    return TractionCoeffs(_scaled(t[0, 0]), _scaled(t[1, 0]), _scaled(t[0, 1]), _scaled(t[1, 1]))


def incident_boundary_data(n: int, omega: float, kappa: complex, background: Material) -> IncidentBoundaryData:
    """Trace and traction on ``r = 1`` of the incident shear mode ``kappa * Psi_n^s``."""
    n = _check_order(n)
    kappa = complex(kappa)
    mu = background.mu
    k = omega / background.c_s
    if kappa == 0:
        zero = ScaledComplex(0.0, 0.0)
        return IncidentBoundaryData(zero, zero, zero, zero)
    if n >= 1:
        nf = normalized_first_kind(n, np.array([k]))
        jh, dj = float(nf.jh[0]), float(nf.dj[0])
        log_e = float(log2_power_prefactor(n, k))
        e = math.floor(log_e)
        em = 2.0 ** (log_e - e)  # E_n(k) = em * 2**e
        f1 = kappa * (2.0 * n / k) * em * jh
        f2 = 2j * kappa * (n / k) * em * dj
        g1 = kappa * (4.0 * n * mu * em / k) * (n * dj - jh)
        g2 = kappa * (2j * mu * em / k) * ((2.0 * n * n - k * k) * jh - 2.0 * n * dj)
        return IncidentBoundaryData(*(ScaledComplex.from_complex(v, e) for v in (f1, f2, g1, g2)))
    j = bessel_j(0, k)
    jp = bessel_j_prime(0, k)
    f1 = ScaledComplex(0.0, 0.0)
    f2 = ScaledComplex(ScaledReal(0.0), jp * 2.0) * kappa
    g1 = ScaledComplex(0.0, 0.0)
    g2 = ScaledComplex(ScaledReal(0.0), (j * (-k * k) - jp * (2.0 * k)) * (2.0 * mu / k)) * kappa
    return IncidentBoundaryData(f1, f2, g1, g2)


# ---------------------------------------------------------------------------
# assembly and solution
# ---------------------------------------------------------------------------


def _frexp_exponents(values: np.ndarray) -> np.ndarray:
    """Exponent e with max|v| in [0.5, 1) * 2**e (0 for an all-zero input)."""
    out = np.zeros(values.shape[0], dtype=np.int64)
    for i, v in enumerate(values):
        m = float(np.max(np.abs(v))) if v.size else 0.0
        out[i] = math.frexp(m)[1] if m > 0.0 else 0
    return out


def _lu(a: np.ndarray):
    """Partial-pivot LU of a small complex matrix; returns (lu, perm)."""
    a = np.array(a, dtype=complex)
    size = a.shape[0]
    perm = np.arange(size)
    row_scale = np.max(np.abs(a), axis=1)
    for col in range(size):
        p = col + int(np.argmax(np.abs(a[col:, col])))
        if p != col:
            a[[col, p]] = a[[p, col]]
            perm[[col, p]] = perm[[p, col]]
            row_scale[[col, p]] = row_scale[[p, col]]
        pivot = a[col, col]
        if abs(pivot) <= 1e-300 * max(row_scale[col], 1e-300):
            raise SingularSystemError(f"pivot {abs(pivot):.3e} in column {col} is negligible")
        for r in range(col + 1, size):
            f = a[r, col] / pivot
            a[r, col] = f
            a[r, col + 1:] -= f * a[col, col + 1:]
    return a, perm


def _lu_solve(lu: np.ndarray, perm: np.ndarray, b: np.ndarray) -> np.ndarray:
    size = lu.shape[0]
    y = np.array(b, dtype=complex)[perm]
    for i in range(size):
        y[i] -= lu[i, :i] @ y[:i]
    for i in range(size - 1, -1, -1):
        y[i] = (y[i] - lu[i, i + 1:] @ y[i + 1:]) / lu[i, i]
    return y


def _inf_norm(a: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(a), axis=1)))


def assemble_system(cfg: ScatteringConfig) -> ModalSystem:
    """Assemble and equilibrate the transmission system of a configuration."""
    n, omega = cfg.n, cfg.omega
    bg = cfg.background
    inner = interior_material(cfg)
    at = single_layer_coeffs(n, omega, inner).as_array()
    a = single_layer_coeffs(n, omega, bg).as_array()
    gt = traction_coeffs(n, omega, inner).as_array()
    g = traction_coeffs(n, omega, bg).as_array()
    mat = np.array([
        [at[0], at[2], -a[0], -a[2]],
        [at[1], at[3], -a[1], -a[3]],
        [gt[0] - 1.0, gt[2], -g[0], -g[2]],
        [gt[1], gt[3] - 1.0, -g[1], -g[3]],
    ])
    inc = incident_boundary_data(n, omega, cfg.kappa, bg)
    b_mant, b_exp = inc.as_scaled_vector()

    rows = _frexp_exponents(mat)
    scaled_rows = mat * np.exp2(-rows.astype(float))[:, None]
    cols = _frexp_exponents(scaled_rows.T)
    eq = scaled_rows * np.exp2(-cols.astype(float))[None, :]
    try:
        lu, perm = _lu(eq)
        inv = np.column_stack([_lu_solve(lu, perm, e) for e in np.eye(4)])
        cond = _inf_norm(eq) * _inf_norm(inv)
    except SingularSystemError:
        cond = math.inf
    A = tuple(tuple(_scaled(v) for v in row) for row in mat)
    b = tuple(ScaledComplex.from_complex(v, b_exp) for v in b_mant)
    return ModalSystem(A=A, b=b, matrix=mat, b_mantissa=b_mant, b_exponent=b_exp,
                       row_exponents=rows, col_exponents=cols, equilibrated=eq,
                       condition_estimate=cond)


def solve_densities(sys: ModalSystem) -> ModalDensities:
    """Solve the equilibrated system by partial-pivot elimination.

    Raises
    ------
    SingularSystemError
        If a pivot is negligible relative to its row.
    """
    rhs = sys.b_mantissa * np.exp2(-sys.row_exponents.astype(float))
    lu, perm = _lu(sys.equilibrated)
    y = _lu_solve(lu, perm, rhs)
    x = y * np.exp2(-sys.col_exponents.astype(float))
    bnorm = float(np.max(np.abs(sys.b_mantissa)))
    residual = 0.0 if bnorm == 0.0 else float(np.max(np.abs(sys.matrix @ x - sys.b_mantissa))) / bnorm
    phis = [ScaledComplex.from_complex(v, sys.b_exponent) for v in x]
    return ModalDensities(*phis, residual=residual, condition_estimate=sys.condition_estimate)


def solve(cfg: ScatteringConfig) -> ModalDensities:
    """Assemble and solve in one step."""
    return solve_densities(assemble_system(cfg))


# ---------------------------------------------------------------------------
# leading-order references
# ---------------------------------------------------------------------------


def _leading_density_scale(cfg: ScatteringConfig) -> tuple[float, float]:
    """log2 magnitude and phase of
    ``kappa 2^(3-n) (lam+2mu) mu^((3-n)/2) rho^((n-1)/2) omega^(n-1) / ((lam+3mu) (n-2)!)``."""
    n = cfg.n
    m = cfg.background
    lam, mu, rho = m.lam, m.mu, m.rho
    log2_mag = (
        math.log2(abs(cfg.kappa)) + (3 - n) + math.log2(lam + 2.0 * mu)
        + (1.5 - 0.5 * n) * math.log2(mu) + (0.5 * n - 0.5) * math.log2(rho)
        + (n - 1) * math.log2(cfg.omega) - math.log2(lam + 3.0 * mu)
        - math.lgamma(n - 1) / _LN2
    )
    return log2_mag, math.atan2(cfg.kappa.imag, cfg.kappa.real)


def asymptotic_densities(cfg: ScatteringConfig) -> ModalDensities:
    """Leading ``omega**(n-1)`` terms of the four densities from the closed-form expansion."""
    n = cfg.n
    if n < 2:
        raise DomainError("leading-order densities need n >= 2")
    if cfg.kappa == 0:
        zero = ScaledComplex(0.0, 0.0)
        return ModalDensities(zero, zero, zero, zero)
    log2_mag, phase = _leading_density_scale(cfg)
    e = math.floor(log2_mag)
    p = 2.0 ** (log2_mag - e) * complex(math.cos(phase), math.sin(phase))
    t2 = cfg.tau ** 2
    phi11 = p * (t2 - 3.0) / (t2 + 1.0)
    phi12 = -1j * p
    phi21 = p * (t2 - 1.0) ** 2 / (t2 + 1.0)
    phi22 = -1j * p * (t2 - 1.0)
    return ModalDensities(*(ScaledComplex.from_complex(v, e) for v in (phi11, phi12, phi21, phi22)))


def _check_a0_inputs(n: int) -> None:
    if int(n) != n or n < 2:
        raise DomainError("the leading matrix is defined for n >= 2")


def a0_matrix(n: int, tau: float, background: Material) -> np.ndarray:
    """Displayed leading matrix of the modal system (as printed, not re-derived)."""
    _check_a0_inputs(n)
    lam, mu = background.lam, background.mu
    t2 = tau * tau
    c = (lam + 3.0 * mu) / (4.0 * mu * (n * n - 1) * (lam + 2.0 * mu))
    s = mu / (2.0 * lam + 4.0 * mu)
    return np.array([
        [-n * t2 * c, 1j * t2 * c, n * c, -1j * c],
        [-1j * t2 * c, -n * t2 * c, 1j * c, n * c],
        [-0.5, -0.5j * (1.0 - t2 * (lam + 3.0 * mu) / (lam + 2.0 * mu)), -0.5, -1j * s],
        [-1j * s * t2, 0.5 * (t2 - 2.0), 1j * s, -0.5],
    ])


def a0_inverse(n: int, tau: float, background: Material) -> np.ndarray:
    """Displayed closed-form inverse of :func:`a0_matrix` (observation radius set to 1)."""
    _check_a0_inputs(n)
    lam, mu = background.lam, background.mu
    t2 = tau * tau
    d = (t2 + 1.0) * (lam + 3.0 * mu)
    b11 = 2.0 * mu * (lam - t2 * (lam + mu * (n + 2)) - 2.0 * lam * n - 3.0 * mu * n) / d
    b12 = -2j * mu * (2.0 * lam + 3.0 * mu + t2 * (mu + n * (lam + 2.0 * mu)) - lam * n) / d
    b31 = 2.0 * mu * (-t2 * t2 * (lam + mu * (n + 2)) + t2 * (lam + mu * n) + 2.0 * n * (lam + 2.0 * mu)) / d
    b32 = 2j * mu * (2.0 * lam + 4.0 * mu - t2 * t2 * (mu + n * (lam + 2.0 * mu)) + t2 * (mu + lam * n)) / d
    l3 = lam + 3.0 * mu
    return np.array([
        [b11, b12, -2.0 / (t2 + 1.0), 1j * (1.0 - t2) / (t2 + 1.0)],
        [2j * mu * (lam + mu * (n + 2)) / l3, 2.0 * mu * (mu + n * (lam + 2.0 * mu)) / -l3, 0.0, -1.0],
        [b31, b32, 2.0 / (t2 + 1.0) - 2.0, -1j * t2 * (t2 - 1.0) / (t2 + 1.0)],
        [2j * mu * (-2.0 * lam - 4.0 * mu + t2 * (lam + mu * (n + 2))) / l3,
         2.0 * mu * (mu * t2 + n * (t2 - 2.0) * (lam + 2.0 * mu)) / -l3, 0.0, -t2],
    ])


def a0_determinant(n: int, tau: float, background: Material) -> float:
    """Displayed closed form of ``det(A0)``."""
    _check_a0_inputs(n)
    lam, mu = background.lam, background.mu
    return (tau * tau + 1.0) * (lam + 3.0 * mu) ** 2 / (32.0 * mu * mu * (n * n - 1) * (lam + 2.0 * mu) ** 2)


def limit_matrix(n: int, delta: float, background: Material) -> np.ndarray:
    """``omega -> 0`` limit of the assembled matrix, derived from the exact small-argument forms.

    Differs from :func:`a0_matrix`: the stiffness contrast ``delta`` multiplies
    the interior columns of the displacement rows, and the interior traction
    columns coincide with the exterior ones up to sign.
    """
    _check_a0_inputs(n)
    lam, mu = background.lam, background.mu
    c = (lam + 3.0 * mu) / (4.0 * mu * (n * n - 1) * (lam + 2.0 * mu))
    s = mu / (2.0 * lam + 4.0 * mu)
    return np.array([
        [-n * delta * c, 1j * delta * c, n * c, -1j * c],
        [-1j * delta * c, -n * delta * c, 1j * c, n * c],
        [-0.5, 1j * s, -0.5, -1j * s],
        [-1j * s, -0.5, 1j * s, -0.5],
    ])
