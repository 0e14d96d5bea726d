import warnings
from pathlib import Path

import pytest
from hypothesis import settings

from elastodisk.medium_model import (
    ContrastConfig,
    IncidentSpec,
    Material,
    ScatteringConfig,
    ShellSpec,
    SubwavelengthWarning,
)

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def make_config(n=5, omega=1e-3, delta=1e-4, eps_rho=1e-2, kappa=1.0, lam=1.0, mu=1.0, rho=1.0,
                gamma1=0.5, gamma2=1.25, R=2.0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SubwavelengthWarning)
        return ScatteringConfig(Material(lam, mu, rho), ContrastConfig(delta, eps_rho), omega,
                                IncidentSpec(n, kappa, allow_zero=True), ShellSpec(gamma1, gamma2, R))


@pytest.fixture
def fixtures_dir():
    return FIXTURES


# ---------------------------------------------------------------------------
# acceptance summary: one PASS/FAIL line per criterion
# ---------------------------------------------------------------------------

ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def record():
    """``record(criterion, part, passed, detail)`` stores one measured part of a criterion."""

    def _record(criterion: int, part: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE.setdefault(criterion, []).append((part, bool(passed), detail))
        return bool(passed)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        ok = all(p for _, p, _ in parts)
        detail = "; ".join(f"{name} {d} [{'ok' if p else 'FAIL'}]" for name, p, d in parts)
        tr.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'} | {detail}")
