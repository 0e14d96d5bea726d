"""Closed-form regime constants, incident-index thresholds and contrast bounds.

The thresholds invert inequalities ``K n^2 <= gamma^(-n)`` (inside) and
``K n^2 <= gamma^n`` (outside) with the lower real branch of Lambert W.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .medium_model import Material
from .scaled_specfun import DomainError, SingularityError, lambert_w_minus1

__all__ = [
    "MODES",
    "RegimeReport",
    "r1",
    "r2",
    "r1_expanded",
    "r2_expanded",
    "k_constants",
    "index_thresholds",
    "design_contrast",
    "min_index",
    "regime_report",
]

MODES = ("localization", "quasi_minnaert", "surface_only", "stress", "stress_localized")


def _check_tau(tau: float, pole: bool) -> float:
    tau = float(tau)
    if not math.isfinite(tau) or tau <= 0.0:
        raise DomainError(f"tau must be positive, got {tau}")
    if tau == 1.0 and pole:
        raise SingularityError("the constant has a pole at tau = 1")
    if tau >= 1.0:
        raise DomainError(f"tau must be < 1, got {tau}")
    return tau


def _check_material(lam: float, mu: float) -> None:
    Material(lam, mu, 1.0)


def r1(lam: float, mu: float, tau: float) -> float:
    """Leading constant of ``1 + zeta_4 + zeta_5 ~ R1 / n^2`` in closed form."""
    _check_material(lam, mu)
    tau = _check_tau(tau, pole=True)
    t2, t4 = tau ** 2, tau ** 4
    num = (lam ** 2 * (3.0 * t4 - 10.0 * t2 + 11.0)
           + 2.0 * lam * mu * (5.0 * t4 - 18.0 * t2 + 25.0)
           + mu ** 2 * (11.0 * t4 - 34.0 * t2 + 59.0))
    return num / ((t2 - 1.0) ** 2 * (lam + mu) ** 2)


def r2(lam: float, mu: float, tau: float) -> float:
    """Exterior counterpart of :func:`r1` in closed form."""
    _check_material(lam, mu)
    tau = _check_tau(tau, pole=False)
    t2, t4 = tau ** 2, tau ** 4
    num = (3.0 * lam ** 2 + t4 * (lam + 3.0 * mu) ** 2 - 2.0 * t2 * (lam + mu) * (lam + 3.0 * mu)
           + 10.0 * lam * mu + 11.0 * mu ** 2)
    return num / (lam + mu) ** 2


def r1_expanded(lam: float, mu: float, tau: float) -> float:
    """:func:`r1` regrouped as a quadratic in ``tau^2`` over ``((1 - tau^2)(lam + mu))^2``."""
    _check_material(lam, mu)
    t = _check_tau(tau, pole=True) ** 2
    a = 3.0 * lam * lam + 10.0 * lam * mu + 11.0 * mu * mu
    b = 10.0 * lam * lam + 36.0 * lam * mu + 34.0 * mu * mu
    c = 11.0 * lam * lam + 50.0 * lam * mu + 59.0 * mu * mu
    d = (1.0 - t) * (lam + mu)
    return ((a * t - b) * t + c) / (d * d)


def r2_expanded(lam: float, mu: float, tau: float) -> float:
    """:func:`r2` regrouped as a quadratic in ``tau^2``."""
    _check_material(lam, mu)
    t = _check_tau(tau, pole=False) ** 2
    a = (lam + 3.0 * mu) ** 2
    b = 2.0 * (lam * lam + 4.0 * lam * mu + 3.0 * mu * mu)
    c = 3.0 * lam * lam + 10.0 * lam * mu + 11.0 * mu * mu
    return ((a * t - b) * t + c) / ((lam + mu) * (lam + mu))


def _check_shells(gamma1: float, gamma2: float) -> None:
    if not 0.0 < gamma1 < 1.0:
        raise DomainError(f"gamma1 must lie in (0, 1), got {gamma1}")
    if not gamma2 > 1.0:
        raise DomainError(f"gamma2 must exceed 1, got {gamma2}")


def _check_eps(eps_loc: float) -> None:
    if not 0.0 < eps_loc < 1.0:
        raise DomainError(f"localization level must lie in (0, 1), got {eps_loc}")


def k_constants(gamma1: float, gamma2: float, R1: float, R2: float) -> tuple[float, float]:
    """``K_i = 2 (1 - 2 gamma_i^2 + gamma_i^4) / R_i``."""
    _check_shells(gamma1, gamma2)
    if not (R1 > 0.0 and R2 > 0.0):
        raise DomainError("R1 and R2 must be positive")
    k1 = 2.0 * (1.0 - 2.0 * gamma1 ** 2 + gamma1 ** 4) / R1
    k2 = 2.0 * (1.0 - 2.0 * gamma2 ** 2 + gamma2 ** 4) / R2
    return k1, k2


def _lambert_index(scale: float, arg: float) -> int:
    """``floor(scale * W_-1(arg)) + 1``; ``1`` when ``arg`` leaves ``(-1/e, 0)``."""
    if not -math.exp(-1.0) <= arg < 0.0:
        return 1
    return max(1, math.floor(scale * lambert_w_minus1(arg)) + 1)


def index_thresholds(eps_loc: float, gamma1: float, gamma2: float,
                     K1: float, K2: float) -> tuple[int, int, int, int]:
    """Incident-index thresholds ``(n1, n2, n3, n4)``.

    ``n1, n3`` bound the localization levels ``gamma1^n`` and ``gamma2^(-n)``
    by ``eps_loc``; ``n2, n4`` are the Lambert-W indices beyond which
    ``K1 n^2 <= gamma1^(-n)`` and ``K2 n^2 <= gamma2^n``.
    """
    _check_eps(eps_loc)
    _check_shells(gamma1, gamma2)
    if not (K1 > 0.0 and K2 > 0.0):
        raise DomainError("K1 and K2 must be positive")
    l1, l2, le = math.log(gamma1), math.log(gamma2), math.log(eps_loc)
    n1 = math.floor(le / l1) + 1
    n3 = math.floor(-le / l2) + 1
    e2 = math.e ** 2
    n2 = _lambert_index(2.0 / l1, l1 / (2.0 * math.sqrt(K1))) if K1 > e2 * l1 * l1 / 4.0 else 1
    n4 = _lambert_index(-2.0 / l2, -l2 / (2.0 * math.sqrt(K2))) if K2 > e2 * l2 * l2 / 4.0 else 1
    return n1, n2, n3, n4


def design_contrast(eps_loc: float, gamma1: float, gamma2: float) -> tuple[float, float]:
    """Contrast bounds ``(delta0, delta1)``.

    ``delta0 = min(ln gamma1 / ln eps, -ln gamma2 / ln eps)`` and ``delta1`` is
    the minimum of the square roots of the same two quotients.
    """
    _check_eps(eps_loc)
    _check_shells(gamma1, gamma2)
    le = math.log(eps_loc)
    a, b = math.log(gamma1) / le, -math.log(gamma2) / le
    return min(a, b), min(math.sqrt(a), math.sqrt(b))


def _ceil_inverse(delta: float, power: int) -> int:
    """Exact ``ceil(delta^(-power))`` for the binary value of ``delta``."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    return math.ceil(1 / Fraction(delta) ** power)


def min_index(thresholds: tuple[int, int, int, int], delta: float, mode: str) -> int:
    """Smallest incident index satisfying the condition of ``mode``.

    ``localization``: ``max(n1..n4)``; ``quasi_minnaert``: also ``>= delta^-2``;
    ``surface_only``: ``delta^-2`` alone; ``stress``: ``delta^-1``;
    ``stress_localized``: ``max(n1..n4)`` and ``>= delta^-1``.
    """
    base = max(thresholds)
    if mode == "localization":
        return base
    if mode == "quasi_minnaert":
        return max(base, _ceil_inverse(delta, 2))
    if mode == "surface_only":
        return _ceil_inverse(delta, 2)
    if mode == "stress":
        return _ceil_inverse(delta, 1)
    if mode == "stress_localized":
        return max(base, _ceil_inverse(delta, 1))
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


@dataclass(frozen=True)
class RegimeReport:
    eps_loc: float
    gamma1: float
    gamma2: float
    lam: float
    mu: float
    tau: float
    delta: float
    R1: float
    R2: float
    K1: float
    K2: float
    n1: int
    n2: int
    n3: int
    n4: int
    n_min_localization: int
    n_min_quasi_minnaert: int
    n_min_surface_only: int
    n_min_stress: int
    n_min_stress_localized: int
    delta0: float
    delta1: float

    def to_dict(self) -> dict:
        return asdict(self)


def regime_report(eps_loc: float, gamma1: float, gamma2: float, lam: float = 1.0, mu: float = 1.0,
                  tau: float = 0.1, delta: float | None = None) -> RegimeReport:
    """All regime constants for one design point.

    When ``delta`` is omitted the design bound ``delta0`` is used for the
    delta-dependent indices.
    """
    R1, R2 = r1(lam, mu, tau), r2(lam, mu, tau)
    K1, K2 = k_constants(gamma1, gamma2, R1, R2)
    th = index_thresholds(eps_loc, gamma1, gamma2, K1, K2)
    d0, d1 = design_contrast(eps_loc, gamma1, gamma2)
    d = d0 if delta is None else float(delta)
    return RegimeReport(
        eps_loc=eps_loc, gamma1=gamma1, gamma2=gamma2, lam=lam, mu=mu, tau=tau, delta=d,
        R1=R1, R2=R2, K1=K1, K2=K2, n1=th[0], n2=th[1], n3=th[2], n4=th[3],
        n_min_localization=min_index(th, d, "localization"),
        n_min_quasi_minnaert=min_index(th, d, "quasi_minnaert"),
        n_min_surface_only=min_index(th, d, "surface_only"),
        n_min_stress=min_index(th, d, "stress"),
        n_min_stress_localized=min_index(th, d, "stress_localized"),
        delta0=d0, delta1=d1,
    )
