import math
import sys

import pytest

from stokeswave.solver import WaveParameters, flat_water, solve_stokes_wave

LAM = 10.0
G = 9.8


@pytest.fixture(scope="session")
def flat():
    return flat_water(WaveParameters(LAM, 0.0))


@pytest.fixture(scope="session")
def flat_c2():
    # wavelength picked so the linear phase speed is exactly 2
    return flat_water(WaveParameters(2 * math.pi * 4.0 / G, 0.0))


@pytest.fixture(scope="session")
def small_wave():
    return solve_stokes_wave(WaveParameters(LAM, 0.1, modes=32))


@pytest.fixture(scope="session")
def small_wave64():
    return solve_stokes_wave(WaveParameters(LAM, 0.1, modes=64))


@pytest.fixture(scope="session")
def wave():
    return solve_stokes_wave(WaveParameters(LAM, 0.5, modes=64))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = sorted(getattr(mod, "LINES", []))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
