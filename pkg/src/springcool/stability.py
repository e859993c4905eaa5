"""Closed-loop stability of the cubic characteristic polynomial."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import SystemParams, feedback_spring, optical_spring


@dataclass(frozen=True)
class StabilityReport:
    """Routh-Hurwitz verdict for ``s^3 + s1 s^2 + s2 s + a3``.

    Attributes
    ----------
    stable : bool
        True when every slack in ``margins`` is positive.
    gfb_min : float
        Smallest gain that stabilizes the loop with everything else fixed
        (``inf`` if no gain does).
    margins : dict
        Slack values ``s1``, ``s2``, ``a3`` and ``hurwitz = s1 s2 - a3``.
    simplified_gain_bound : float
        The one-line gain bound ``-Gamma_rp W_L W_H / (W0^2 (W_L - W_H))``,
        which neglects intrinsic damping. Advisory only.
    """

    stable: bool
    gfb_min: float
    margins: dict
    simplified_gain_bound: float

    @property
    def violated(self) -> list[str]:
        return [k for k, v in self.margins.items() if not v > 0]


def _plant(sys: SystemParams) -> tuple[float, float]:
    """Static stiffness and mechanical damping; Gamma_0 frozen at Omega_eff.

    If the loop is statically unstable there is no Omega_eff, and Gamma_0 is
    taken at Omega_0 instead. Only signs matter in that case.
    """
    osc = sys.osc
    rp2, g_rp = optical_spring(sys.readout)
    stiffness = osc.omega0**2 + rp2
    w2 = stiffness + feedback_spring(osc, sys.fb)[0]
    w_ref = math.sqrt(w2) if w2 > 0 else osc.omega0
    return stiffness, osc.omega0**2 / (osc.q0 * w_ref) + g_rp


def routh_margins(sys: SystemParams) -> dict:
    stiffness, gamma_m = _plant(sys)
    fb2, g_fb = feedback_spring(sys.osc, sys.fb)
    wh, wl = sys.fb.omega_h, sys.fb.omega_l
    w2 = stiffness + fb2
    s1 = wl + gamma_m
    s2 = w2 + wl * gamma_m + (wl - wh) * g_fb
    a3 = wl * w2
    # s1*s2 - a3 with the large Omega_L * Omega_eff**2 terms cancelled by hand.
    hurwitz = gamma_m * w2 + s1 * (wl * gamma_m + (wl - wh) * g_fb)
    return {"s1": s1, "s2": s2, "a3": a3, "hurwitz": hurwitz}


def characteristic_polynomial(sys: SystemParams) -> np.ndarray:
    """Monic cubic in the Laplace variable, assembled from the loop factors.

    ``(s + W_L)(s^2 + Gamma_m s + K) + g W0^2 (W_L / W_H)(s + W_H)``.
    """
    stiffness, gamma_m = _plant(sys)
    fb2 = feedback_spring(sys.osc, sys.fb)[0]
    wh, wl = sys.fb.omega_h, sys.fb.omega_l
    open_loop = np.polymul([1.0, wl], [1.0, gamma_m, stiffness])
    return np.polyadd(open_loop, fb2 * wl / wh * np.array([1.0, wh]))


def characteristic_roots(sys: SystemParams) -> np.ndarray:
    return np.roots(characteristic_polynomial(sys))


def simplified_gain_bound(sys: SystemParams) -> float:
    _, g_rp = optical_spring(sys.readout)
    wh, wl = sys.fb.omega_h, sys.fb.omega_l
    return -g_rp * wl * wh / (sys.osc.omega0**2 * (wl - wh))


def _is_stable(sys: SystemParams) -> bool:
    return all(v > 0 for v in routh_margins(sys).values())


def minimum_stable_gain(sys: SystemParams, rtol: float = 1e-10) -> float:
    """Bisect for the smallest stabilizing ``gfb``.

    Returns 0 when the open loop is already stable and ``inf`` when no gain
    up to 1e30 helps.
    """

    def at(g):
        return _is_stable(replace(sys, fb=replace(sys.fb, gfb=g)))

    if at(0.0):
        return 0.0
    hi = 1e-12
    while not at(hi):
        hi *= 4.0
        if hi > 1e30:
            return math.inf
    lo = hi / 4.0 if hi > 1e-12 else 0.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if at(mid):
            hi = mid
        else:
            lo = mid
    return hi


def check_stability(sys: SystemParams) -> StabilityReport:
    margins = routh_margins(sys)
    return StabilityReport(
        stable=all(v > 0 for v in margins.values()),
        gfb_min=minimum_stable_gain(sys),
        margins=margins,
        simplified_gain_bound=simplified_gain_bound(sys),
    )
