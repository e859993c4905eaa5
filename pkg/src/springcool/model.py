"""Dimensionless parameterization of the oscillator, readout and feedback.

Units: hbar = m = Omega_0 = 1. Every frequency is measured in units of the
intrinsic resonance frequency, so ``OscillatorParams.omega0`` is kept only
for completeness and defaults to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigurationError, DomainError

DEFAULT_KAPPA = 1.0e3
# Zero-bandwidth feedback makes the occupation formula singular (R -> 0).
MIN_BANDWIDTH = 1.0e-6


@dataclass(frozen=True)
class OscillatorParams:
    """Mechanical oscillator and its thermal bath.

    Attributes
    ----------
    q0 : float
        Intrinsic quality factor, ``Omega_0 / Gamma_0[Omega_0]``.
    nth0 : float
        Thermal occupation at the intrinsic frequency.
    omega0 : float
        Intrinsic resonance frequency (unit of frequency).
    """

    q0: float
    nth0: float
    omega0: float = 1.0

    def __post_init__(self):
        if not self.q0 > 0:
            raise ConfigurationError(f"q0 must be positive, got {self.q0}")
        if not self.nth0 >= 0:
            raise ConfigurationError(f"nth0 must be non-negative, got {self.nth0}")
        if not self.omega0 > 0:
            raise ConfigurationError(f"omega0 must be positive, got {self.omega0}")


@dataclass(frozen=True)
class ReadoutParams:
    """Cavity readout: power, detuning, homodyne angle and detection loss.

    ``omega_sql0`` is the SQL frequency at zero detuning; at fixed input power
    the detuned SQL frequency is ``omega_sql0 / sqrt(1 + delta**2)``.
    """

    omega_sql0: float
    delta: float = 0.0
    theta: float = math.pi / 2
    eta: float = 1.0
    kappa: float = DEFAULT_KAPPA

    def __post_init__(self):
        if not self.omega_sql0 >= 0:
            raise ConfigurationError(f"omega_sql0 must be non-negative, got {self.omega_sql0}")
        if not 0 < self.eta <= 1:
            raise ConfigurationError(f"eta must lie in (0, 1], got {self.eta}")
        if not self.kappa > 0:
            raise ConfigurationError(f"kappa must be positive, got {self.kappa}")
        if not -math.pi < self.theta <= math.pi:
            raise ConfigurationError(f"theta must lie in (-pi, pi], got {self.theta}")
        if not math.isfinite(self.delta):
            raise ConfigurationError(f"delta must be finite, got {self.delta}")

    @property
    def omega_sql_sq(self) -> float:
        """Squared SQL frequency at the actual detuning (fixed input power)."""
        return self.omega_sql0**2 / (1.0 + self.delta**2)


@dataclass(frozen=True)
class FeedbackParams:
    """Lead-lag feedback filter ``g (1 + i W/W_H) / (1 + i W/W_L)``."""

    omega_h: float
    omega_l: float
    gfb: float

    def __post_init__(self):
        if not 0 < self.omega_h < self.omega_l:
            raise ConfigurationError(
                f"need 0 < omega_h < omega_l, got omega_h={self.omega_h}, omega_l={self.omega_l}"
            )
        if self.omega_l < self.omega_h * (1.0 + MIN_BANDWIDTH):
            raise ConfigurationError(
                f"feedback band too narrow: omega_l/omega_h - 1 must be at least {MIN_BANDWIDTH}"
            )
        if not self.gfb >= 0:
            raise ConfigurationError(f"gfb must be non-negative, got {self.gfb}")


@dataclass(frozen=True)
class SystemParams:
    osc: OscillatorParams
    readout: ReadoutParams
    fb: FeedbackParams = field(default_factory=lambda: FeedbackParams(0.1, 10.0, 0.0))


def gamma_structural(osc: OscillatorParams, omega: float) -> float:
    """Structural damping rate ``(W0/Q)(W0/W)``; diverges at DC."""
    if not omega > 0:
        raise DomainError(f"structural damping is undefined at omega={omega}")
    return (osc.omega0 / osc.q0) * (osc.omega0 / omega)


def n_thermal(osc: OscillatorParams, omega: float) -> float:
    """High-temperature occupation ``nth0 * W0 / W``."""
    if not omega > 0:
        raise DomainError(f"thermal occupation is undefined at omega={omega}")
    return osc.nth0 * osc.omega0 / omega


def effective_angle(readout: ReadoutParams) -> float:
    return readout.theta - math.atan(readout.delta)


def optical_spring(readout: ReadoutParams) -> tuple[float, float]:
    """Radiation-pressure spring and damping ``(Omega_rp**2, Gamma_rp)``.

    Blue detuning (delta > 0) stiffens and anti-damps.
    """
    d = readout.delta
    wsql2 = readout.omega_sql_sq
    spring = wsql2 * d / (2.0 * (1.0 + d * d))
    damping = -(wsql2 / readout.kappa) * d / (1.0 + d * d) ** 2
    return spring, damping


def feedback_spring(osc: OscillatorParams, fb: FeedbackParams) -> tuple[float, float]:
    """Feedback spring and damping ``(Omega_fb**2, Gamma_fb)``; note Omega_fb**2 = W_H * Gamma_fb."""
    spring = fb.gfb * osc.omega0**2
    return spring, spring / fb.omega_h


def effective_oscillator(sys: SystemParams) -> tuple[float, float]:
    """Stiffened frequency and total damping, with Gamma_0 frozen at Omega_eff.

    Raises
    ------
    ConfigurationError
        If the static stiffness is not positive (anti-spring instability).
    """
    rp2, g_rp = optical_spring(sys.readout)
    fb2, g_fb = feedback_spring(sys.osc, sys.fb)
    w2 = sys.osc.omega0**2 + rp2 + fb2
    if not w2 > 0:
        raise ConfigurationError(f"statically unstable: Omega_eff**2 = {w2:.6g} <= 0")
    w = math.sqrt(w2)
    return w, gamma_structural(sys.osc, w) + g_rp + g_fb
