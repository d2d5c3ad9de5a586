import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"


@pytest.fixture
def qwi_path():
    return DATA / "qwi_style.csv"


def ar1_density(grid, phi, sigma2=1.0):
    """Closed-form AR(1) spectral density (2 pi)^-1 sigma2 / |1 - phi e^{-i lam}|^2."""
    lam = grid.points
    return sigma2 / (2 * np.pi * np.abs(1 - phi * np.exp(-1j * lam)) ** 2)


def simulate_ar1(phi, T, rng, sigma=1.0):
    e = rng.normal(0.0, sigma, T)
    x = np.empty(T)
    x[0] = e[0] / np.sqrt(1 - phi**2)
    for t in range(1, T):
        x[t] = phi * x[t - 1] + e[t]
    return x


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
