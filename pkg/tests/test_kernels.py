import math
import os
import subprocess
import sys

import numpy as np
import pytest

from springcool import _kernels_py, kernels

compiled = pytest.importorskip("springcool._kernels")

RNG_SEED = 20261016


def _draws(n):
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(n):
        yield dict(
            q0=10 ** rng.uniform(2, 9),
            nth0=10 ** rng.uniform(0, 12),
            omega0=1.0,
            omega_sql0=10 ** rng.uniform(-2, 3),
            eta=rng.uniform(0.05, 1.0),
            kappa=10 ** rng.uniform(4, 12),
            delta=rng.uniform(-1.0, 1.0),
            omega_h=10 ** rng.uniform(-3, 1),
            ratio=10 ** rng.uniform(0.1, 4),
            gamma_fb=10 ** rng.uniform(-3, 3),
            theta=rng.uniform(0.1, math.pi - 0.1),
        )


def _close(a, b, rel=1e-13):
    if math.isnan(a) or math.isnan(b):
        return math.isnan(a) and math.isnan(b)
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


def test_backend_reports_compiled_extension():
    if os.environ.get("SPRINGCOOL_PURE_PYTHON", "") in ("", "0"):
        assert kernels.BACKEND == "cython"
        assert kernels.low_level_integrands() is not None


def test_inverse_purity_parity():
    for d in _draws(300):
        args = (d["q0"], d["nth0"], d["omega0"], d["omega_sql0"], d["eta"], d["kappa"], d["delta"],
                d["theta"], d["omega_h"], d["omega_h"] * d["ratio"], d["gamma_fb"])
        assert _close(compiled.inverse_purity(*args), _kernels_py.inverse_purity(*args))


def test_optimal_cot_parity():
    for d in _draws(300):
        args = (d["q0"], d["nth0"], d["omega0"], d["omega_sql0"], d["eta"], d["kappa"], d["delta"],
                d["omega_h"], d["omega_h"] * d["ratio"], d["gamma_fb"])
        assert _close(compiled.optimal_cot(*args), _kernels_py.optimal_cot(*args), rel=1e-12)


def test_cooling_state_parity_and_instability():
    for d in _draws(200):
        args = (1.0 + d["gamma_fb"], 1.0 / d["q0"], d["omega_h"], d["omega_h"] * d["ratio"], d["gamma_fb"],
                d["nth0"] / d["q0"], 1.0 / d["eta"], -0.3)
        for a, b in zip(compiled.cooling_state(*args), _kernels_py.cooling_state(*args)):
            assert _close(a, b)
    unstable = (-1.0, 1e-3, 1.0, 10.0, 0.0, 1.0, 1.0, 0.0)
    assert all(math.isnan(v) for v in compiled.cooling_state(*unstable))
    assert all(math.isnan(v) for v in _kernels_py.cooling_state(*unstable))


@pytest.mark.parametrize("centre", [0.0, 1.2, -1.2])
def test_moment_parity_with_offset(centre):
    params = (1.0, 1e-6, 0.44, 1.0, 100.0, 3e-3, 2.0, -0.1)
    for power in (0, 2):
        for t in np.concatenate([-np.logspace(-8, -1, 15), [0.0], np.logspace(-8, 2, 25)]):
            a = compiled.sxx_moment(t, *params, power, centre)
            b = _kernels_py.sxx_moment(t, *params, power, centre)
            assert _close(a, b, rel=1e-12)


def test_offset_moment_equals_shifted_moment():
    params = (1.0, 1e-6, 0.44, 1.0, 100.0, 3e-3, 2.0, -0.1)
    c = 1.2
    for t in (-1e-3, 1e-7, 0.05):
        shifted = _kernels_py.sxx_moment(c + t, *params, 2)
        offset = _kernels_py.sxx_moment(t, *params, 2, c)
        assert offset == pytest.approx(shifted, rel=1e-9)


def test_tail_parity():
    params = (1.0, 1e-4, 3.0, 1.0, 50.0, 1e-2, 1.0, 0.2)
    for u in (0.0, 1e-6, 1e-3, 0.1, 0.9):
        for power in (0, 2):
            a = compiled.sxx_moment_tail(u, *params, power)
            b = _kernels_py.sxx_moment_tail(u, *params, power)
            assert _close(a, b, rel=1e-12)


def test_environment_variable_forces_python_backend():
    code = "from springcool import kernels; print(kernels.BACKEND, kernels.low_level_integrands())"
    env = dict(os.environ, SPRINGCOOL_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "None"]
