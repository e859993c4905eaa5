import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from springcool.errors import ConfigurationError, DomainError
from springcool.model import (
    FeedbackParams,
    OscillatorParams,
    ReadoutParams,
    SystemParams,
    effective_angle,
    effective_oscillator,
    feedback_spring,
    gamma_structural,
    n_thermal,
    optical_spring,
)

OSC = OscillatorParams(q0=1e6, nth0=1e8)
pos = st.floats(1e-6, 1e6)


def test_gamma_structural_values():
    assert gamma_structural(OSC, 1.0) == pytest.approx(1e-6, rel=1e-15)
    assert gamma_structural(OSC, 2.0) == pytest.approx(5e-7, rel=1e-15)
    with pytest.raises(DomainError):
        gamma_structural(OSC, 0.0)


def test_n_thermal_values():
    assert n_thermal(OSC, 1.0) == pytest.approx(1e8)
    assert n_thermal(OSC, 100.0) == pytest.approx(1e6)
    assert n_thermal(OscillatorParams(1e6, 0.0), 5.0) == 0.0
    with pytest.raises(DomainError):
        n_thermal(OSC, -1.0)


def test_effective_angle_values():
    assert effective_angle(ReadoutParams(1.0, 0.0, math.pi / 2)) == pytest.approx(math.pi / 2)
    assert effective_angle(ReadoutParams(1.0, 1.0, math.pi / 2)) == pytest.approx(math.pi / 4)
    assert effective_angle(ReadoutParams(1.0, -1.0, math.pi / 4)) == pytest.approx(math.pi / 2)


def test_optical_spring_values():
    assert optical_spring(ReadoutParams(3.0, 0.0)) == (0.0, 0.0)
    rp2, g_rp = optical_spring(ReadoutParams(math.sqrt(2.0), 1.0, kappa=100.0))
    assert rp2 == pytest.approx(0.25, rel=1e-14)
    assert g_rp == pytest.approx(-1.0 / 400.0, rel=1e-14)
    rp2, g_rp = optical_spring(ReadoutParams(2.0, -1.0))
    assert rp2 < 0 and g_rp > 0


def test_feedback_spring_values():
    assert feedback_spring(OSC, FeedbackParams(1.0, 2.0, 0.0)) == (0.0, 0.0)
    assert feedback_spring(OSC, FeedbackParams(2.0, 5.0, 4.0)) == (4.0, 2.0)
    assert feedback_spring(OSC, FeedbackParams(1.0, 5.0, 1.0)) == (1.0, 1.0)


def test_effective_oscillator_bare_and_stiffened():
    w, g = effective_oscillator(SystemParams(OSC, ReadoutParams(1.0), FeedbackParams(1.0, 2.0, 0.0)))
    assert w == 1.0 and g == pytest.approx(1e-6)
    w, _ = effective_oscillator(SystemParams(OSC, ReadoutParams(1.0), FeedbackParams(3.0, 30.0, 99.0)))
    assert w == pytest.approx(10.0, rel=1e-15)


def test_effective_oscillator_anti_spring_is_rejected():
    # delta = -2 with omega_sql0 = 10 gives Omega_rp^2 = -4.
    sys = SystemParams(OSC, ReadoutParams(10.0, -2.0), FeedbackParams(1.0, 2.0, 0.0))
    with pytest.raises(ConfigurationError):
        effective_oscillator(sys)


@pytest.mark.parametrize(
    "ctor",
    [
        lambda: OscillatorParams(0.0, 1.0),
        lambda: OscillatorParams(1.0, -1.0),
        lambda: OscillatorParams(1.0, 1.0, omega0=0.0),
        lambda: ReadoutParams(-1.0),
        lambda: ReadoutParams(1.0, eta=0.0),
        lambda: ReadoutParams(1.0, eta=1.5),
        lambda: ReadoutParams(1.0, kappa=0.0),
        lambda: ReadoutParams(1.0, theta=-math.pi),
        lambda: FeedbackParams(2.0, 1.0, 1.0),
        lambda: FeedbackParams(1.0, 1.0 + 1e-9, 1.0),
        lambda: FeedbackParams(1.0, 2.0, -1.0),
    ],
)
def test_invariants_are_enforced(ctor):
    with pytest.raises(ConfigurationError):
        ctor()


@given(pos, pos)
def test_structural_damping_times_frequency_is_constant(w1, w2):
    assert gamma_structural(OSC, w1) * w1 == pytest.approx(gamma_structural(OSC, w2) * w2, rel=1e-14)
    assert n_thermal(OSC, w1) * w1 == pytest.approx(n_thermal(OSC, w2) * w2, rel=1e-14)


@given(st.floats(0.0, 100.0), st.floats(-5.0, 5.0), st.floats(1e-3, 1e6))
def test_optical_spring_is_odd_in_detuning(wsql, delta, kappa):
    a = optical_spring(ReadoutParams(wsql, delta, kappa=kappa))
    b = optical_spring(ReadoutParams(wsql, -delta, kappa=kappa))
    assert a[0] == -b[0] and a[1] == -b[1]


@given(st.just(0.0) | st.floats(1e-250, 1e6), st.floats(1e-4, 1e4))
def test_feedback_spring_identity(gfb, omega_h):
    spring, damping = feedback_spring(OSC, FeedbackParams(omega_h, 2 * omega_h, gfb))
    assert spring == pytest.approx(omega_h * damping, rel=1e-14, abs=0)


@given(st.floats(-math.pi + 1e-9, 0.0), st.floats(-5.0, 5.0))
def test_effective_angle_shifts_by_pi(theta, delta):
    a = effective_angle(ReadoutParams(1.0, delta, theta))
    b = effective_angle(ReadoutParams(1.0, delta, theta + math.pi))
    assert b - a == pytest.approx(math.pi, abs=1e-14)
