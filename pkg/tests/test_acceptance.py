"""Acceptance suite: one test group per criterion; the terminal summary prints one PASS/FAIL line each."""
import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from elastodisk import _layer, _suites, regime
from elastodisk import fields as F
from elastodisk import functionals as Fn
from elastodisk.cli import EXIT_CONFIG, EXIT_OK, EXIT_VERIFY, main
from elastodisk.medium_model import Material, interior_material
from elastodisk.modal_solver import a0_inverse, a0_matrix, assemble_system, limit_matrix, single_layer_coeffs, solve
from elastodisk.scaled_specfun import (
    bessel_j,
    bessel_j_prime,
    bessel_y,
    bessel_y_prime,
    lambert_w_minus1,
    series_j_oracle,
)
from conftest import FIXTURES, make_config
from oracles import kupradze_single_layer, lambert_bisection

OMEGAS = _suites.OMEGA_LADDER
INDICES = _suites.SCALING_INDICES
EPS_LOC = 1e-2


def _in_band(x: float, centre: float, half: float) -> bool:
    return abs(x - centre) <= half


# ---------------------------------------------------------------------------
# 1. special functions
# ---------------------------------------------------------------------------


def test_c1_special_functions(record):
    t0 = time.perf_counter()
    wr = 0.0
    for n in range(0, 201):
        for x in np.logspace(-6, 1, 40):
            w = bessel_j(n, x) * bessel_y_prime(n, x) - bessel_j_prime(n, x) * bessel_y(n, x)
            wr = max(wr, abs(float(w * (math.pi * x / 2.0)) - 1.0))
    ser = 0.0
    for n in range(0, 61):
        for x in np.linspace(1e-3, 1.0, 25):
            ser = max(ser, abs(float(bessel_j(n, x) / series_j_oracle(n, x)) - 1.0))
    dt = time.perf_counter() - t0
    ok = record(1, "wronskian", wr <= 1e-10, f"max rel {wr:.1e}")
    ok &= record(1, "series", ser <= 1e-10, f"max rel {ser:.1e}")
    ok &= record(1, "runtime", dt < 10.0, f"{dt:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 2. Lambert W
# ---------------------------------------------------------------------------


def test_c2_lambert(record):
    rng = np.random.default_rng(7)
    zs = -np.exp(-1.0) * np.concatenate([rng.uniform(0.0, 1.0, 500), np.logspace(-300, 0, 500)])
    zs = zs[zs < 0.0]
    res = max(abs(w * math.exp(w) - z) for z in zs for w in [lambert_w_minus1(float(z))])
    bp = abs(lambert_w_minus1(-math.exp(-1.0)) + 1.0)
    orc = abs(lambert_w_minus1(-0.1) / lambert_bisection(-0.1) - 1.0)
    ok = record(2, "residual", res <= 1e-12 and len(zs) == 1000, f"{res:.1e} on {len(zs)} points")
    ok &= record(2, "branch point", bp <= 1e-6, f"|W+1| {bp:.1e}")
    ok &= record(2, "bisection", orc <= 1e-12, f"rel {orc:.1e}")
    assert ok


# ---------------------------------------------------------------------------
# 3. layer potentials vs kernel quadrature
# ---------------------------------------------------------------------------


def _layer_field(side: str, n: int, omega: float, m: Material, r: float) -> np.ndarray:
    """Single-layer field (component, density column) at radius ``r``; n = 1 uses the direct path."""
    if n < 2:
        return _layer.direct_modal_fields(side, n, omega, m.lam, m.mu, m.rho, np.array([r]))[0][:, :, 0]
    b = _layer.modal_basis(side, n, omega, m.lam, m.mu, m.rho, np.array([r]))
    return b.value[:, :, 0] * r ** b.power


def test_c3_layer_potentials(record):
    m, omega = Material(1.0, 1.0, 1.0), 1e-2
    quad = 0.0
    for n in range(1, 11):
        for side, r in (("interior", 0.5), ("exterior", 2.0)):
            ours = _layer_field(side, n, omega, m, r)
            for col, dens in ((0, "radial"), (1, "tangential")):
                ref = kupradze_single_layer(np.array([r, 0.0]), n, dens, omega, m.lam, m.mu, m.rho)
                quad = max(quad, float(np.max(np.abs(ours[:, col] - ref) / np.abs(ref))))
    edge = 0.0
    for n in range(1, 11):
        a = single_layer_coeffs(n, omega, m).as_array().reshape(2, 2).T
        for side, r in (("interior", 1.0 - 1e-12), ("exterior", 1.0 + 1e-12)):
            u = _layer_field(side, n, omega, m, r)
            edge = max(edge, float(np.max(np.abs(u - a) / np.abs(a))))
    ok = record(3, "kernel quadrature", quad <= 1e-6, f"max rel {quad:.1e}")
    ok &= record(3, "boundary limits", edge <= 1e-9, f"max rel {edge:.1e}")
    assert ok


# ---------------------------------------------------------------------------
# 4. transmission conditions
# ---------------------------------------------------------------------------


def _jump(left, right) -> float:
    e = max(left.common_exponent(), right.common_exponent())
    a, b = left.mantissa_at(e), right.mantissa_at(e)
    return abs(a - b) / max(abs(a), abs(b))


def test_c4_transmission(record):
    t0 = time.perf_counter()
    worst = 0.0
    for n, omega in itertools.product((3, 5, 10, 20), (1e-2, 1e-3)):
        cfg = make_config(n=n, omega=omega, delta=1e-4, eps_rho=1e-2)
        d = solve(cfg)
        ui, us, uinc = F.interior_total_field(cfg, d, 1.0), F.scattered_field(cfg, d, 1.0), F.incident_field(cfg, 1.0)
        ti = F.traction(F.interior_gradient(cfg, d, 1.0), interior_material(cfg))
        ts = F.traction(F.scattered_gradient(cfg, d, 1.0), cfg.background)
        tinc = F.traction(F.incident_gradient(cfg, 1.0), cfg.background)
        worst = max(worst, _jump(ui.u_r, us.u_r + uinc.u_r), _jump(ui.u_theta, us.u_theta + uinc.u_theta),
                    _jump(ti[0], ts[0] + tinc[0]), _jump(ti[1], ts[1] + tinc[1]))
    dt = time.perf_counter() - t0
    ok = record(4, "continuity", worst <= 1e-8, f"max rel jump {worst:.1e}")
    ok &= record(4, "runtime", dt < 30.0, f"{dt:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 5. asymptotic convergence
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def asymptotic_errors():
    return _suites.asymptotic_errors(make_config(n=5), OMEGAS)


def _c5(record, errors, key):
    slope = _suites.log_slope(OMEGAS, errors[key])
    ok = record(5, key, 1.8 <= slope <= 2.2, f"slope {slope:.3f} (last error {errors[key][-1]:.2e})")
    assert ok


def test_c5_incident_norm(record, asymptotic_errors):
    _c5(record, asymptotic_errors, "incident_norm")


@pytest.mark.xfail(strict=True, reason="closed-form leading densities differ from the exact limit at O(1)")
def test_c5_densities(record, asymptotic_errors):
    _c5(record, asymptotic_errors, "densities")


@pytest.mark.xfail(strict=True, reason="closed-form leading field coefficients inherit the density offset")
def test_c5_fields(record, asymptotic_errors):
    _c5(record, asymptotic_errors, "fields")


@pytest.mark.xfail(strict=True, reason="closed-form leading interior norm inherits the density offset")
def test_c5_interior_norm(record, asymptotic_errors):
    _c5(record, asymptotic_errors, "interior_norm")


# ---------------------------------------------------------------------------
# 6. boundary localization
# ---------------------------------------------------------------------------


def test_c6_localization(record):
    t0 = time.perf_counter()
    base = make_config(n=2, omega=1e-3, delta=1e-4, eps_rho=1e-2, gamma1=0.5, gamma2=1.25, R=2.0)
    n = _suites.regime_for(base, EPS_LOC).n_min_localization
    checks = _suites.localization_suite(base.with_values({"incident.n": n}), EPS_LOC)
    dt = time.perf_counter() - t0
    ok = True
    for c in checks:
        ok &= record(6, c.name, c.passed, f"{c.measured:.3g} vs {c.target}")
    ok &= record(6, "runtime", dt < 10.0, f"{dt:.1f}s at n={n}")
    assert ok


# ---------------------------------------------------------------------------
# 7. surface resonance
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def quasi_minnaert_point():
    base = make_config(n=2, omega=1e-3, delta=0.05, eps_rho=0.5)
    n = _suites.regime_for(base, EPS_LOC).n_min_quasi_minnaert
    cfg = base.with_values({"incident.n": n})
    d = solve(cfg)
    return n, Fn.resonance_ratio_interior(cfg, d), Fn.resonance_ratio_exterior(cfg, d)


def test_c7_resonance_slopes(record):
    vals = []
    for n in INDICES:
        cfg = make_config(n=n, omega=1e-3, delta=1e-4, eps_rho=1e-2)
        d = solve(cfg)
        vals.append((Fn.resonance_ratio_interior(cfg, d), Fn.resonance_ratio_exterior(cfg, d)))
    s_in = _suites.log_slope(INDICES, [v[0] for v in vals])
    s_out = _suites.log_slope(INDICES, [v[1] for v in vals])
    ok = record(7, "interior slope", _in_band(s_in, 1.0, 0.15), f"{s_in:.3f}")
    ok &= record(7, "exterior slope", _in_band(s_out, 1.0, 0.15), f"{s_out:.3f}")
    assert ok


def test_c7_exterior_ratio_large(record, quasi_minnaert_point):
    n, _, r_out = quasi_minnaert_point
    assert record(7, "exterior ratio", r_out > 1e2, f"{r_out:.1f} at n={n}")


@pytest.mark.xfail(strict=True, reason="at delta=0.05 the interior ratio grows like n*delta and stays near 41")
def test_c7_interior_ratio_large(record, quasi_minnaert_point):
    n, r_in, _ = quasi_minnaert_point
    assert record(7, "interior ratio", r_in > 1e2, f"{r_in:.1f} at n={n}")


# ---------------------------------------------------------------------------
# 8. stress concentration
# ---------------------------------------------------------------------------


def test_c8_stress(record):
    vals = []
    for n in INDICES:
        cfg = make_config(n=n, omega=1e-3, delta=1e-4, eps_rho=1e-2)
        vals.append(_suites.energy_ratios(cfg, solve(cfg)))
    s_in = _suites.log_slope(INDICES, [v[0] for v in vals])
    s_out = _suites.log_slope(INDICES, [v[1] for v in vals])
    resid = max(v[2] for v in vals)
    ok = record(8, "interior slope", _in_band(s_in, 2.0, 0.2), f"{s_in:.3f}")
    ok &= record(8, "exterior slope", _in_band(s_out, 2.0, 0.2), f"{s_out:.3f}")
    ok &= record(8, "imaginary residual", resid <= 1e-8, f"{resid:.1e}")
    assert ok


# ---------------------------------------------------------------------------
# 9. regime thresholds
# ---------------------------------------------------------------------------


def test_c9_regime(record):
    g1s, g2s = (0.3, 0.45, 0.6, 0.75, 0.9), (1.1, 1.3, 1.6, 2.0, 3.0)
    r1, r2 = regime.r1(1.0, 1.0, 0.1), regime.r2(1.0, 1.0, 0.1)
    violations = 0
    for g1, g2 in itertools.product(g1s, g2s):
        k1, k2 = regime.k_constants(g1, g2, r1, r2)
        _, n2, _, n4 = regime.index_thresholds(EPS_LOC, g1, g2, k1, k2)
        violations += sum(k1 * n * n > g1 ** (-n) for n in range(n2, 501))
        violations += sum(k2 * n * n > g2 ** n for n in range(n4, 501))
    design_fail, checked = 0, 0
    for eps, g1, g2 in itertools.product((1e-1, 3e-2, 1e-2, 1e-3, 1e-4), g1s, g2s):
        if any(abs(q - round(q)) < 1e-9 for q in (math.log(eps) / math.log(g1), -math.log(eps) / math.log(g2))):
            continue
        d0, _ = regime.design_contrast(eps, g1, g2)
        th = regime.index_thresholds(eps, g1, g2, 0.01, 0.01)
        for delta in (d0, 0.5 * d0, 0.1 * d0):
            checked += 1
            design_fail += math.ceil(1 / Fraction(delta)) < max(th[0], th[2])
    ok = record(9, "threshold scan", violations == 0, f"{violations} violations on 5x5 grid up to n=500")
    ok &= record(9, "contrast bound", design_fail == 0, f"{design_fail} of {checked} points fail")
    assert ok


# ---------------------------------------------------------------------------
# 10. leading matrix
# ---------------------------------------------------------------------------


def _matrix_errors(n: int, reference) -> list[float]:
    errs = []
    for w in OMEGAS:
        cfg = make_config(n=n, omega=w)
        ref = reference(cfg)
        a = assemble_system(cfg).matrix
        mask = ref != 0
        errs.append(float(np.max(np.abs(a[mask] - ref[mask]) / np.abs(ref[mask]))))
    return errs


def test_c10_inverse_identity(record):
    worst = 0.0
    for n, tau in itertools.product((2, 3, 5, 10, 50, 200), (0.01, 0.1, 0.5, 0.9)):
        m = Material(1.0, 1.0, 1.0)
        worst = max(worst, float(np.max(np.abs(a0_matrix(n, tau, m) @ a0_inverse(n, tau, m) - np.eye(4)))))
    assert record(10, "A0 inverse", worst <= 1e-10, f"max |A0 A0inv - I| {worst:.1e}")


def test_c10_exact_limit_rate(record):
    slopes = [_suites.log_slope(OMEGAS, _matrix_errors(
        n, lambda c: limit_matrix(c.n, c.contrast.delta, c.background))) for n in (2, 5, 10)]
    ok = all(1.8 <= s <= 2.2 for s in slopes)
    assert record(10, "derived limit rate", ok, "slopes " + ", ".join(f"{s:.2f}" for s in slopes))


@pytest.mark.xfail(strict=True, reason="the closed-form leading matrix is not the small-frequency limit")
def test_c10_closed_form_limit_rate(record):
    errs = _matrix_errors(5, lambda c: a0_matrix(c.n, c.tau, c.background))
    slope = _suites.log_slope(OMEGAS, errs)
    assert record(10, "closed-form A0 rate", 1.8 <= slope <= 2.2 and errs[-1] < 1e-3,
                  f"slope {slope:.2f}, error {errs[-1]:.3g}")


# ---------------------------------------------------------------------------
# 11. CLI determinism and exit codes
# ---------------------------------------------------------------------------


def test_c11_cli(record, tmp_path, capsys):
    valid = str(FIXTURES / "valid.yaml")
    outs = []
    for par in ("1", "3"):
        path = tmp_path / f"sweep{par}.csv"
        main(["sweep", valid, "--axis", "n=20..60..10", "--axis", "omega=1e-3,2e-3",
              "--metric", "resonance_ratio_in", "--metric", "energy_ratio_out", "--parallel", par, "--out", str(path)])
        outs.append(path.read_bytes())
    codes = {
        "valid": main(["verify", valid, "--suite", "localization"]),
        "tau_ge_one": main(["verify", str(FIXTURES / "tau_ge_one.yaml"), "--suite", "localization"]),
        "below_threshold": main(["verify", str(FIXTURES / "below_threshold.yaml"), "--suite", "localization"]),
    }
    capsys.readouterr()
    ok = record(11, "serial vs parallel", outs[0] == outs[1] and len(outs[0]) > 0, f"{len(outs[0])} bytes")
    expect = {"valid": EXIT_OK, "tau_ge_one": EXIT_CONFIG, "below_threshold": EXIT_VERIFY}
    ok &= record(11, "exit codes", codes == expect, str(codes))
    assert ok
