import math
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from elastodisk.medium_model import (
    ConfigError,
    ContrastConfig,
    ContrastError,
    IncidentSpec,
    Material,
    ScatteringConfig,
    ShellSpec,
    SubwavelengthWarning,
    config_from_dict,
    config_to_dict,
    dump_config,
    interior_material,
    interior_wavenumbers,
    load_config,
    wavenumbers,
)
from conftest import make_config


class TestMaterial:
    def test_defaults_and_speeds(self):
        m = Material()
        assert (m.lam, m.mu, m.rho) == (1.0, 1.0, 1.0)
        assert m.c_s == 1.0
        assert m.c_p == pytest.approx(math.sqrt(3.0))

    @pytest.mark.parametrize("lam, mu, rho", [(1.0, 0.0, 1.0), (-2.0, 1.0, 1.0), (1.0, 1.0, 0.0),
                                              (1.0, -1.0, 1.0), (math.nan, 1.0, 1.0)])
    def test_strong_convexity(self, lam, mu, rho):
        with pytest.raises(ConfigError):
            Material(lam, mu, rho)

    def test_negative_lambda_allowed_when_convex(self):
        assert Material(-0.5, 1.0, 1.0).lam == -0.5


class TestContrast:
    def test_tau(self):
        c = ContrastConfig(1e-4, 1e-2)
        assert c.tau == pytest.approx(0.1)

    @pytest.mark.parametrize("delta, eps", [(0.5, 0.25), (0.1, 0.1)])
    def test_tau_must_be_below_one(self, delta, eps):
        with pytest.raises(ContrastError):
            ContrastConfig(delta, eps)

    @pytest.mark.parametrize("delta, eps", [(0.0, 0.5), (1.0, 0.5), (0.1, 1.5)])
    def test_range(self, delta, eps):
        with pytest.raises(ConfigError):
            ContrastConfig(delta, eps)

    @given(st.floats(min_value=1e-8, max_value=0.99), st.floats(min_value=1e-8, max_value=0.99))
    def test_interior_wavenumbers_scale_by_tau(self, delta, eps):
        if delta >= eps:
            with pytest.raises(ContrastError):
                ContrastConfig(delta, eps)
            return
        cfg = make_config(delta=delta, eps_rho=eps)
        kin, kout = interior_wavenumbers(cfg), wavenumbers(cfg.background, cfg.omega)
        assert kin.k_s == pytest.approx(cfg.tau * kout.k_s, rel=1e-13)
        assert kin.k_p == pytest.approx(cfg.tau * kout.k_p, rel=1e-13)

    def test_interior_material(self):
        m = interior_material(make_config(delta=1e-4, eps_rho=1e-2))
        assert (m.lam, m.mu, m.rho) == pytest.approx((1e4, 1e4, 1e2))


class TestIncidentAndShells:
    @pytest.mark.parametrize("n", [0, 1, 2.5, -3])
    def test_index(self, n):
        with pytest.raises(ConfigError):
            IncidentSpec(n)

    def test_zero_kappa(self):
        with pytest.raises(ConfigError):
            IncidentSpec(3, 0.0)
        assert IncidentSpec(3, 0.0, allow_zero=True).kappa == 0

    @pytest.mark.parametrize("g1, g2, R", [(0.0, 1.2, 2.0), (1.0, 1.2, 2.0), (0.5, 1.0, 2.0), (0.5, 2.5, 2.0)])
    def test_shell_ordering(self, g1, g2, R):
        with pytest.raises(ConfigError):
            ShellSpec(g1, g2, R)

    def test_shell_widths(self):
        s = ShellSpec(0.5, 1.25, 2.0)
        assert (s.xi1, s.xi2) == (0.5, 0.25)


class TestScatteringConfig:
    def test_subwavelength_warning(self):
        with pytest.warns(SubwavelengthWarning):
            ScatteringConfig(Material(), ContrastConfig(1e-4, 1e-2), 0.2, IncidentSpec(3))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            ScatteringConfig(Material(), ContrastConfig(1e-4, 1e-2), 1e-3, IncidentSpec(3))

    def test_omega_positive(self):
        with pytest.raises(ConfigError):
            ScatteringConfig(Material(), ContrastConfig(1e-4, 1e-2), 0.0, IncidentSpec(3))

    def test_with_values(self):
        cfg = make_config(n=5).with_values({"incident.n": 9, "omega": 2e-3, "shells.gamma1": 0.6})
        assert (cfg.n, cfg.omega, cfg.shells.gamma1) == (9, 2e-3, 0.6)


class TestFileFormat:
    @given(st.integers(min_value=2, max_value=400),
           st.floats(min_value=1e-6, max_value=0.04),
           st.floats(min_value=-3.0, max_value=3.0),
           st.floats(min_value=1e-6, max_value=0.5))
    def test_round_trip_exact(self, n, omega, kappa_im, delta):
        cfg = make_config(n=n, omega=omega, delta=delta, eps_rho=min(0.99, 2.0 * delta + 1e-3),
                          kappa=complex(1.0, kappa_im))
        again = config_from_dict(config_to_dict(cfg))
        assert again == cfg
        import yaml

        assert config_from_dict(yaml.safe_load(dump_config(cfg))) == cfg

    def test_load_with_overrides(self, fixtures_dir):
        cfg = load_config(fixtures_dir / "valid.yaml", {"incident.n": 7})
        assert cfg.n == 7 and cfg.tau == pytest.approx(0.1)

    def test_load_errors(self, tmp_path, fixtures_dir):
        with pytest.raises(ContrastError):
            load_config(fixtures_dir / "tau_ge_one.yaml")
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.yaml")
        bad = tmp_path / "bad.yaml"
        bad.write_text("contrast: [1, 2\n")
        with pytest.raises(ConfigError):
            load_config(bad)
        bad.write_text("contrast: {delta: 0.1, eps_rho: 0.5}\nincident: {n: 3.5}\nomega: 0.001\n")
        with pytest.raises(ConfigError):
            load_config(bad)
        bad.write_text("contrast: {delta: 0.1, eps_rho: 0.5}\nincident: {n: 3}\n")
        with pytest.raises(ConfigError):
            load_config(bad)

    def test_defaults_filled(self, tmp_path):
        p = tmp_path / "min.yaml"
        p.write_text("contrast: {delta: 0.01, eps_rho: 0.5}\nincident: {n: 4}\nomega: 0.001\n")
        cfg = load_config(p)
        assert cfg.background == Material() and cfg.kappa == 1.0 and cfg.shells == ShellSpec()
