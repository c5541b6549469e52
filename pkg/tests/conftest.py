import numpy as np
import pytest

from slitsim.model import GridSpec, PhysicalParams, SlitConfig, canonical_config


@pytest.fixture
def params():
    return PhysicalParams()


@pytest.fixture
def canonical():
    return canonical_config()


@pytest.fixture
def canonical_pi():
    return canonical_config(dphi=np.pi)


@pytest.fixture
def small_grid():
    return GridSpec(-15.0, 15.0, 301, 0.0, 16.0, 161)


@pytest.fixture
def symmetric_slits():
    return SlitConfig(x0=-5.0, v=0.5, sigma0=1.0), SlitConfig(x0=5.0, v=-0.5, sigma0=1.0)


def numeric_moments(x, rho):
    """Mean and variance of a density sampled on a uniform grid (trapezoid)."""
    mass = np.trapezoid(rho, x)
    mean = np.trapezoid(x * rho, x) / mass
    var = np.trapezoid((x - mean) ** 2 * rho, x) / mass
    return mass, mean, var


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
