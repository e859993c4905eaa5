"""Imprecision, back-action and their correlation for a detuned cavity readout.

The exact expressions keep the full dependence on the scaled Fourier
frequency ``w = 2 * Omega / kappa``; the broadband ones are their ``w -> 0``
limits and are what the feedback model consumes. All spectra are symmetrized,
double-sided, in hbar = m = Omega_0 = 1 units. Detection loss scales the
imprecision by ``1/eta`` and the correlation by ``1/sqrt(eta)``; back-action is
untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SignalBlindError
from .model import (
    ReadoutParams,
    SystemParams,
    effective_angle,
    effective_oscillator,
    gamma_structural,
    n_thermal,
)

_BLIND = 1e-12


@dataclass(frozen=True)
class NoisePair:
    s_xx_imp: float
    s_ff_rp: float
    s_fx_re: float


@dataclass(frozen=True)
class PhononBudget:
    """Phonon-equivalent noise occupations at the stiffened frequency."""

    n_ba: float
    n_imp: float
    n_cor: float
    n_th_eff: float
    cq: float


def _scaled(readout: ReadoutParams, omega):
    return 2.0 * np.asarray(omega, dtype=float) / readout.kappa


def _quadrature_gain(delta, theta, w):
    # |signal transfer|^2 up to a constant; zero means a signal-blind quadrature.
    s, c = math.sin(theta), math.cos(theta)
    return (s - delta * c) ** 2 + (w * s) ** 2


def _check_blind(den):
    if np.any(np.asarray(den) < _BLIND):
        raise SignalBlindError("homodyne quadrature carries no displacement signal")


def imprecision_psd_exact(readout: ReadoutParams, omega):
    """Displacement-equivalent imprecision at any Fourier frequency.

    The resonant phase-readout baseline is ``(1 + w**2) / (2 Omega_SQL**2)``;
    the detuning/angle factor is
    ``(1+(d+w)^2)(1+(d-w)^2) / ((1+w^2) [(sin t - d cos t)^2 + w^2 sin^2 t])``.
    """
    d, t = readout.delta, readout.theta
    w = _scaled(readout, omega)
    den = _quadrature_gain(d, t, w)
    _check_blind(den)
    lorentz = (1.0 + (d + w) ** 2) * (1.0 + (d - w) ** 2)
    base = (1.0 + w * w) / (2.0 * readout.omega_sql_sq)
    return base * lorentz / ((1.0 + w * w) * den) / readout.eta


def backaction_psd_exact(readout: ReadoutParams, omega):
    d = readout.delta
    w = _scaled(readout, omega)
    base = 0.5 * readout.omega_sql_sq / (1.0 + w * w)
    factor = (1.0 + w * w) * (1.0 + d * d + w * w) / ((1.0 + (d + w) ** 2) * (1.0 + (d - w) ** 2))
    return base * factor


def cross_correlation_exact(readout: ReadoutParams, omega):
    """Complex force-imprecision cross spectrum.

    Its real part tends to ``-cot(theta_eff) / 2`` as ``w -> 0``; the
    imaginary part ``d*w / (2 D)`` vanishes on resonance or at DC.
    """
    d, t = readout.delta, readout.theta
    w = _scaled(readout, omega)
    den = _quadrature_gain(d, t, w)
    _check_blind(den)
    re = ((d * d - w * w - 1.0) * math.sin(2 * t) + 2.0 * d * math.cos(2 * t)) / (4.0 * den)
    im = d * w / (2.0 * den)
    return (re + 1j * im) / math.sqrt(readout.eta)


def uncertainty_product_exact(readout: ReadoutParams, omega):
    """``S_imp * S_FF`` from the exact spectra, ``(1+d^2+w^2) / (4 eta D)``."""
    d, t = readout.delta, readout.theta
    w = _scaled(readout, omega)
    den = _quadrature_gain(d, t, w)
    _check_blind(den)
    return (1.0 + d * d + w * w) / (4.0 * readout.eta * den)


def _sin_eff(readout):
    s = math.sin(effective_angle(readout))
    if abs(s) < _BLIND:
        raise SignalBlindError("amplitude-quadrature readout: theta_eff = 0 mod pi")
    return s


def imprecision_psd(readout: ReadoutParams) -> float:
    """Broadband imprecision ``(1 + d^2) / (2 Omega_SQL^2 eta sin^2 theta_eff)``."""
    s = _sin_eff(readout)
    return (1.0 + readout.delta**2) / (2.0 * readout.omega_sql_sq * readout.eta * s * s)


def backaction_psd(readout: ReadoutParams) -> float:
    """Broadband back-action ``Omega_SQL^2 / (2 (1 + d^2))``."""
    return 0.5 * readout.omega_sql_sq / (1.0 + readout.delta**2)


def cross_correlation_broadband(readout: ReadoutParams) -> float:
    s = _sin_eff(readout)
    return -0.5 * (math.cos(effective_angle(readout)) / s) / math.sqrt(readout.eta)


def broadband_noise(readout: ReadoutParams) -> NoisePair:
    return NoisePair(
        imprecision_psd(readout), backaction_psd(readout), cross_correlation_broadband(readout)
    )


def thermal_force_psd(osc, omega, gamma0=None):
    """``2 (n_th[W] + 1/2) W Gamma_0`` with Gamma_0 structural unless given."""
    if gamma0 is None:
        gamma0 = gamma_structural(osc, omega)
    return 2.0 * (n_thermal(osc, omega) + 0.5) * omega * gamma0


def phonon_budget(sys: SystemParams) -> PhononBudget:
    """Occupations at Omega_eff; ``n_ba`` is taken per force quantum, ``S_FF / (2 W Gamma_0)``."""
    w_eff, _ = effective_oscillator(sys)
    g0 = gamma_structural(sys.osc, w_eff)
    noise = broadband_noise(sys.readout)
    n_ba = noise.s_ff_rp / (2.0 * w_eff * g0)
    n_imp = noise.s_xx_imp * w_eff * g0 / 2.0
    n_th_eff = n_thermal(sys.osc, w_eff)
    cq = n_ba / n_th_eff if n_th_eff > 0 else math.inf
    return PhononBudget(n_ba=n_ba, n_imp=n_imp, n_cor=-noise.s_fx_re, n_th_eff=n_th_eff, cq=cq)
