"""Closed-loop displacement spectrum and its rational factorization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .model import (
    SystemParams,
    effective_oscillator,
    feedback_spring,
    gamma_structural,
    optical_spring,
)
from .quantum_noise import broadband_noise, thermal_force_psd

FROZEN = "frozen"
STRUCTURAL = "exact-structural"


class LoopScales(NamedTuple):
    """Scalars that fully determine the frozen-damping closed loop."""

    stiffness: float  # Omega_0^2 + Omega_rp^2
    gamma_m: float  # Gamma_0[Omega_eff] + Gamma_rp
    fb_gain: float  # g_fb * Omega_0^2
    omega_h: float
    omega_l: float
    omega_eff: float
    gamma_fb: float
    gamma_eff: float
    gamma0_eff: float
    s_force: float  # frozen thermal + back-action force PSD
    s_thermal: float
    s_backaction: float
    s_imp: float
    s_fx: float


def loop_scales(sys: SystemParams) -> LoopScales:
    rp2, g_rp = optical_spring(sys.readout)
    fb2, g_fb = feedback_spring(sys.osc, sys.fb)
    w_eff, g_eff = effective_oscillator(sys)
    g0 = gamma_structural(sys.osc, w_eff)
    noise = broadband_noise(sys.readout)
    s_th = thermal_force_psd(sys.osc, w_eff, g0)
    return LoopScales(
        stiffness=sys.osc.omega0**2 + rp2,
        gamma_m=g0 + g_rp,
        fb_gain=fb2,
        omega_h=sys.fb.omega_h,
        omega_l=sys.fb.omega_l,
        omega_eff=w_eff,
        gamma_fb=g_fb,
        gamma_eff=g_eff,
        gamma0_eff=g0,
        s_force=s_th + noise.s_ff_rp,
        s_thermal=s_th,
        s_backaction=noise.s_ff_rp,
        s_imp=noise.s_xx_imp,
        s_fx=noise.s_fx_re,
    )


@dataclass(frozen=True)
class SpectrumPoint:
    """Displacement PSD at ``omega`` split into its four physical sources.

    Arrays are accepted throughout, so every field may be an ndarray.
    """

    omega: np.ndarray
    chi_eff_inv: np.ndarray
    thermal: np.ndarray
    backaction: np.ndarray
    fed_imprecision: np.ndarray
    correlation: np.ndarray

    @property
    def s_xx_total(self):
        return self.thermal + self.backaction + self.fed_imprecision + self.correlation

    @property
    def terms(self) -> dict:
        return {
            "thermal": self.thermal,
            "backaction": self.backaction,
            "fed_imprecision": self.fed_imprecision,
            "correlation": self.correlation,
        }


@dataclass(frozen=True)
class LambdaCoefficients:
    lambda_l: float
    lambda_h: float
    s1: float
    s2: float


def feedback_inv(sys: SystemParams, omega):
    """Inverse feedback susceptibility ``g W0^2 (1 + iW/W_H) / (1 + iW/W_L)``."""
    w = np.asarray(omega, dtype=float)
    fb = sys.fb
    return fb.gfb * sys.osc.omega0**2 * (1 + 1j * w / fb.omega_h) / (1 + 1j * w / fb.omega_l)


def chi_eff_inv(sys: SystemParams, omega, damping=FROZEN):
    """Inverse effective susceptibility of the stiffened, fed-back oscillator."""
    w = np.asarray(omega, dtype=float)
    rp2, g_rp = optical_spring(sys.readout)
    if damping == FROZEN:
        g0 = gamma_structural(sys.osc, effective_oscillator(sys)[0])
    elif damping == STRUCTURAL:
        if np.any(w <= 0):
            raise DomainError("structural damping needs omega > 0")
        g0 = (sys.osc.omega0 / sys.osc.q0) * (sys.osc.omega0 / w)
    else:
        raise ValueError(f"unknown damping mode {damping!r}")
    mech = -w * w + sys.osc.omega0**2 + 1j * w * g0 + rp2 + 1j * w * g_rp
    return mech + feedback_inv(sys, w)


def displacement_psd(sys: SystemParams, omega, damping=FROZEN) -> SpectrumPoint:
    """Symmetrized displacement PSD with its source breakdown.

    ``frozen`` holds Gamma_0 and the thermal force at their Omega_eff values,
    the approximation under which the variances have a closed form.
    ``exact-structural`` keeps Gamma_0 ~ 1/W everywhere, which makes the
    low-frequency displacement variance diverge logarithmically.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w == 0) and damping == STRUCTURAL:
        raise DomainError("structural spectrum is singular at omega = 0")
    noise = broadband_noise(sys.readout)
    inv = chi_eff_inv(sys, w, damping)
    resp = 1.0 / np.abs(inv) ** 2
    fb = feedback_inv(sys, w)
    if damping == FROZEN:
        w_eff = effective_oscillator(sys)[0]
        s_th = thermal_force_psd(sys.osc, w_eff, gamma_structural(sys.osc, w_eff)) * np.ones_like(w)
    else:
        aw = np.abs(w)
        s_th = 2.0 * (sys.osc.nth0 * sys.osc.omega0 / aw + 0.5) * aw * (sys.osc.omega0**2 / (sys.osc.q0 * aw))
    # chi_fb^-1[-W] is the conjugate for a real filter.
    corr = 2.0 * np.real(np.conj(fb)) * noise.s_fx_re
    return SpectrumPoint(
        omega=w,
        chi_eff_inv=inv,
        thermal=resp * s_th,
        backaction=resp * noise.s_ff_rp,
        fed_imprecision=resp * np.abs(fb) ** 2 * noise.s_xx_imp,
        correlation=resp * corr,
    )


def cubic_coefficients(ls: LoopScales) -> tuple[float, float, float]:
    """``(s1, s2, a3)`` of ``(W_L + iW) chi_eff^-1 = -iW^3 - s1 W^2 + i s2 W + a3``."""
    s1 = ls.omega_l + ls.gamma_m
    s2 = ls.omega_eff**2 + ls.omega_l * ls.gamma_m + (ls.omega_l - ls.omega_h) * ls.gamma_fb
    return s1, s2, ls.omega_l * ls.omega_eff**2


def hurwitz_margin(ls: LoopScales) -> float:
    """``s1 s2 - a3`` expanded so no large terms cancel."""
    gm, wl = ls.gamma_m, ls.omega_l
    return gm * ls.omega_eff**2 + (wl + gm) * (wl * gm + (wl - ls.omega_h) * ls.gamma_fb)


def lambda_coefficients(sys: SystemParams) -> LambdaCoefficients:
    """Numerator weights of ``(W^2 + W_L^2)|chi_eff|^-2 S_xx = L_L W^2 + L_H W_L^2``.

    The weights carry the feedback damping Gamma_fb, which makes the
    factorization exact for the frozen spectrum.
    """
    ls = loop_scales(sys)
    s1, s2, _ = cubic_coefficients(ls)

    def lam(corner):
        y = corner * ls.gamma_fb
        return ls.s_force + y * y * ls.s_imp + 2.0 * y * ls.s_fx

    return LambdaCoefficients(lam(ls.omega_l), lam(ls.omega_h), s1, s2)
