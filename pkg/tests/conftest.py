import math

import pytest
from hypothesis import settings

from springcool.model import FeedbackParams, OscillatorParams, ReadoutParams, SystemParams

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    from _acceptance import RESULTS, summary_lines

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in summary_lines():
            terminalreporter.write_line(line)


def make_system(q0=1e6, nth0=1e8, omega_sql0=10.0, delta=0.0, theta=math.pi / 2, eta=1.0,
                kappa=1e3, omega_h=5.0, omega_l=500.0, gfb=1e3):
    return SystemParams(
        OscillatorParams(q0, nth0),
        ReadoutParams(omega_sql0, delta, theta, eta, kappa),
        FeedbackParams(omega_h, omega_l, gfb),
    )


@pytest.fixture
def bench():
    """Resonant phase-readout benchmark point."""
    return make_system()


@pytest.fixture
def bench_detuned():
    """Detuned, lossy, variable-quadrature benchmark point."""
    return make_system(delta=0.5, theta=math.pi / 3, eta=0.8)


SWEEP_PLANT = dict(q0=1e6, nth0=1e10, eta=0.8, kappa=1e6)


@pytest.fixture(scope="session")
def cooperativity_sweep():
    """Fifteen-point sweep over C_Q,SQL in [1e-2, 1e2] in all three modes."""
    import numpy as np

    from springcool.optimizer import FREE, PHASE, RESONANT, Plant, sweep_cooperativity

    p = SWEEP_PLANT
    plant = Plant(OscillatorParams(p["q0"], p["nth0"]), eta=p["eta"], kappa=p["kappa"])
    grid = np.logspace(-2, 2, 15)
    return sweep_cooperativity(plant, grid, modes=(FREE, PHASE, RESONANT), budget=10_000)
