"""Closed-form variances, occupation and the analytic design rules.

Two levels of approximation live here. ``variances_closed_form`` and
``purity_closed_form`` are exact for the frozen-damping spectrum: the
rational integral is evaluated with the feedback damping Gamma_fb in the
noise weights and the full cubic. ``inverse_purity_lambda`` and
``neff_three_term`` are the compact forms that replace Gamma_fb by Gamma_eff
and the cubic's ``s1`` by ``Omega_L``; they agree with the exact result
when feedback dominates the damping and ``Omega_L`` is the largest rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import kernels
from .errors import DomainError, InstabilityError
from .model import (
    OscillatorParams,
    ReadoutParams,
    SystemParams,
    effective_angle,
    effective_oscillator,
    gamma_structural,
)
from .quantum_noise import broadband_noise, phonon_budget
from .spectra import LoopScales, loop_scales
from .stability import routh_margins


@dataclass(frozen=True)
class NeffTerms:
    """Three-term split of ``2 n_eff + 1``, each term already divided by R."""

    thermal_backaction: float
    fed_imprecision: float
    correlation: float

    @property
    def inverse_purity(self) -> float:
        return self.thermal_backaction + self.fed_imprecision + self.correlation

    @property
    def n_eff(self) -> float:
        return 0.5 * (self.inverse_purity - 1.0)


@dataclass(frozen=True)
class CoolingResult:
    """Steady state of the feedback-cooled oscillator.

    ``2 n_eff + 1 = Omega_eff <dx^2> + <dp^2> / Omega_eff`` (hbar = m = 1).
    """

    x_var: float
    p_var: float
    n_eff: float
    purity: float
    omega_eff: float
    gamma_eff: float
    stable: bool
    terms: NeffTerms


@dataclass(frozen=True)
class CCoefficients:
    """Filter prefactors of the compact occupation formula.

    ``g`` is the damping enhancement ``Gamma_eff / Gamma_0[Omega_eff]``.
    """

    c_tot: float
    c_imp: float
    c_cor: float
    r: float
    g: float
    a: float  # 2 Omega_eff^2 + (Omega_L - Omega_H) Gamma_eff = (C_tot - 2) Omega_L^2


@dataclass(frozen=True)
class OptimalSpring:
    from_n_imp: float
    from_coupling: float


@dataclass(frozen=True)
class Thresholds:
    n_imp_max: float
    q0_min: float
    qf_min: float


def _require_stable(sys: SystemParams) -> None:
    margins = routh_margins(sys)
    bad = [k for k, v in margins.items() if not v > 0]
    if bad:
        detail = ", ".join(f"{k} = {margins[k]:.6g}" for k in bad)
        raise InstabilityError(f"closed loop is unstable: {detail} (must be > 0)", violated=bad)


def _state(ls: LoopScales) -> tuple[float, float]:
    return kernels.cooling_state(
        ls.stiffness, ls.gamma_m, ls.omega_h, ls.omega_l, ls.gamma_fb, ls.s_force, ls.s_imp, ls.s_fx
    )


def variances_closed_form(sys: SystemParams) -> tuple[float, float]:
    """Position and momentum variances of the frozen-damping closed loop.

    Raises
    ------
    InstabilityError
        If any Routh-Hurwitz condition fails; ``violated`` lists which.
    """
    _require_stable(sys)
    return _state(loop_scales(sys))


def purity_closed_form(sys: SystemParams) -> CoolingResult:
    _require_stable(sys)
    ls = loop_scales(sys)
    x_var, p_var = _state(ls)
    inv = ls.omega_eff * x_var + p_var / ls.omega_eff
    return CoolingResult(
        x_var=x_var,
        p_var=p_var,
        n_eff=0.5 * (inv - 1.0),
        purity=1.0 / inv,
        omega_eff=ls.omega_eff,
        gamma_eff=ls.gamma_eff,
        stable=True,
        terms=neff_three_term(sys),
    )


def equipartition_neff(sys: SystemParams) -> float:
    """Occupation read off the potential energy alone, ``Omega_eff <dx^2> - 1/2``."""
    x_var, _ = variances_closed_form(sys)
    return effective_oscillator(sys)[0] * x_var - 0.5


def c_coefficients_from(omega_eff, gamma_eff, gamma0, omega_h, omega_l) -> CCoefficients:
    a = 2.0 * omega_eff**2 + (omega_l - omega_h) * gamma_eff
    return CCoefficients(
        c_tot=(a + 2.0 * omega_l**2) / omega_l**2,
        c_imp=(a + 2.0 * omega_h**2) / omega_eff**2,
        c_cor=(a + 2.0 * omega_l * omega_h) / (omega_l * omega_eff),
        r=1.0 - omega_h / omega_l,
        g=gamma_eff / gamma0,
        a=a,
    )


def c_coefficients(sys: SystemParams) -> CCoefficients:
    w_eff, g_eff = effective_oscillator(sys)
    return c_coefficients_from(
        w_eff, g_eff, gamma_structural(sys.osc, w_eff), sys.fb.omega_h, sys.fb.omega_l
    )


def backaction_residual(sys: SystemParams) -> float:
    """``1 - C_cor^2 / (C_tot C_imp)``, the fraction of back-action left uncancelled.

    Evaluated in the factored form ``2 A (W_L - W_H)^2 / ((A + 2 W_L^2)(A + 2 W_H^2))``,
    which stays accurate when the residual is tiny and vanishes exactly when
    ``C_tot = 2`` (``A = 0``).
    """
    cc = c_coefficients(sys)
    wh, wl = sys.fb.omega_h, sys.fb.omega_l
    return 2.0 * cc.a * (wl - wh) ** 2 / ((cc.a + 2.0 * wl**2) * (cc.a + 2.0 * wh**2))


def cancellation_ratio(sys: SystemParams) -> tuple[float, float]:
    """Both sides of the identity linking ``C_cor^2 / (2 C_imp)`` to ``C_tot``.

    Returns ``(lhs, rhs)`` with
    ``rhs = [1 + (C_tot - 2) r / 2]^2 / (1 + (C_tot - 2) r^2 / 2)`` and
    ``r = W_L / W_H``.
    """
    cc = c_coefficients(sys)
    r = sys.fb.omega_l / sys.fb.omega_h
    x = 0.5 * (cc.c_tot - 2.0)
    return cc.c_cor**2 / (2.0 * cc.c_imp), (1.0 + x * r) ** 2 / (1.0 + x * r * r)


def _compact_inputs(sys: SystemParams):
    w_eff, g_eff = effective_oscillator(sys)
    g0 = gamma_structural(sys.osc, w_eff)
    return w_eff, g_eff, g0, phonon_budget(sys), c_coefficients(sys)


def neff_three_term(sys: SystemParams) -> NeffTerms:
    """Compact occupation split into thermal plus back-action, fed imprecision and correlation.

    ``R (2 n + 1) = C_tot (n_th + n_ba + 1/2) / g + g C_imp n_imp - C_cor n_cor``.
    """
    _, _, _, b, cc = _compact_inputs(sys)
    return NeffTerms(
        thermal_backaction=cc.c_tot * (b.n_th_eff + b.n_ba + 0.5) / (cc.g * cc.r),
        fed_imprecision=cc.g * cc.c_imp * b.n_imp / cc.r,
        correlation=-cc.c_cor * b.n_cor / cc.r,
    )


def inverse_purity_lambda(sys: SystemParams) -> float:
    """Compact ``1/mu`` from the lambda weights, with Gamma_eff in the filter terms."""
    w_eff, g_eff, _, _, _ = _compact_inputs(sys)
    ls = loop_scales(sys)
    wh, wl = sys.fb.omega_h, sys.fb.omega_l

    def lam(corner):
        y = corner * g_eff
        return ls.s_force + y * y * ls.s_imp + 2.0 * y * ls.s_fx

    s2 = w_eff**2 + (wl - wh) * g_eff
    num = lam(wl) * (w_eff**2 + s2) + 2.0 * lam(wh) * wl**2
    return num / (2.0 * w_eff * wl * (wl - wh) * g_eff)


def _wrap_angle(theta_eff: float, delta: float) -> float:
    theta = math.fmod(theta_eff + math.atan(delta), math.pi)
    if theta <= 0.0:
        theta += math.pi
    return theta


def optimal_angle(sys: SystemParams, form: str = "exact") -> float:
    """Homodyne angle that minimizes the occupation, folded into (0, pi].

    Parameters
    ----------
    sys : SystemParams
        The readout angle in ``sys`` is ignored.
    form : {"exact", "compact"}
        ``exact`` minimizes the exact occupation returned by
        ``purity_closed_form``. ``compact`` solves
        ``cot(theta_eff) = C_cor n_cor^(pi/4) / (2 g C_imp n_imp^(pi/2))``.
    """
    _require_stable(sys)
    o, r = sys.osc, sys.readout
    if form == "exact":
        cot = kernels.optimal_cot(
            o.q0, o.nth0, o.omega0, r.omega_sql0, r.eta, r.kappa, r.delta,
            sys.fb.omega_h, sys.fb.omega_l, loop_scales(sys).gamma_fb,
        )
    elif form == "compact":
        w_eff, _, g0, _, cc = _compact_inputs(sys)
        n_imp_phase = (1.0 + r.delta**2) / (2.0 * r.omega_sql_sq * r.eta) * w_eff * g0 / 2.0
        n_cor_quarter = 1.0 / (2.0 * math.sqrt(r.eta))
        cot = cc.c_cor * n_cor_quarter / (2.0 * cc.g * cc.c_imp * n_imp_phase)
    else:
        raise ValueError(f"unknown form {form!r}")
    return _wrap_angle(math.atan2(1.0, cot), r.delta)


def phase_readout_neff(sys: SystemParams, spring: bool = True) -> float:
    """Occupation for resonant phase readout, where correlations vanish.

    ``n + 1/2 = [n_th + n_ba + 1/2 + (W_eff/Gamma_0)^2 n_imp] / g + g n_imp``.
    The squared term is the feedback back-action of a stiffening filter;
    ``spring=False`` drops it, leaving the detailed-balance form of a pure
    damper.
    """
    r = sys.readout
    if abs(r.delta) > 1e-12 or abs(abs(effective_angle(r)) - math.pi / 2) > 1e-12:
        raise DomainError("phase-readout form needs delta = 0 and theta = +-pi/2")
    w_eff, g_eff, g0, b, _ = _compact_inputs(sys)
    g = g_eff / g0
    bath = b.n_th_eff + b.n_ba + 0.5
    if spring:
        bath += (w_eff / g0) ** 2 * b.n_imp
    return bath / g + g * b.n_imp - 0.5


def detailed_balance_floor(sys: SystemParams) -> float:
    """Smallest ``n + 1/2`` reachable by tuning the damping of a pure damper."""
    b = phonon_budget(sys)
    return 2.0 * math.sqrt((b.n_th_eff + b.n_ba + 0.5) * b.n_imp)


def _n_imp_structural(osc: OscillatorParams, readout: ReadoutParams) -> float:
    """Imprecision occupation, which is frequency independent for structural damping."""
    noise = broadband_noise(readout)
    return noise.s_xx_imp * osc.omega0**2 / (2.0 * osc.q0)


def optimal_spring(osc: OscillatorParams, readout: ReadoutParams) -> OptimalSpring:
    """Spring frequency balancing thermal dilution against feedback back-action.

    Minimizing ``n_th[W] + n_imp (W / Gamma_0[W])^2`` gives
    ``W^5 = W0^5 n_th0 / (4 n_imp Q0^2)``. The second form substitutes the
    resonant phase-readout ``n_imp``; the two agree for that readout.
    """
    n_imp = _n_imp_structural(osc, readout)
    from_n_imp = osc.omega0 * (osc.nth0 / (4.0 * n_imp * osc.q0**2)) ** 0.2
    wsql = math.sqrt(readout.omega_sql_sq)
    from_coupling = (
        osc.omega0 * (readout.eta * osc.nth0 / osc.q0) ** 0.2 * (wsql / osc.omega0) ** 0.4
    )
    return OptimalSpring(from_n_imp, from_coupling)


def ground_state_thresholds(osc: OscillatorParams, readout: ReadoutParams, f0=None) -> Thresholds:
    """Advisory conditions for reaching ``n_eff < 1`` with phase readout.

    ``qf_min`` is the Q-frequency product ``Q0 f0``; ``f0`` defaults to
    ``omega0 / 2 pi`` in the internal frequency unit. Pass the mechanical
    frequency in Hz to get it in Hz.
    """
    if f0 is None:
        f0 = osc.omega0 / (2.0 * math.pi)
    wsql = math.sqrt(readout.omega_sql_sq)
    n_imp_max = math.sqrt(2.0) / 5.0 ** (5.0 / 6.0) * osc.nth0 ** (-2.0 / 3.0) * osc.q0 ** (-1.0 / 3.0)
    q0_min = (5.0 / 8.0) ** 1.25 * osc.nth0 * (osc.omega0 / wsql) ** 3
    return Thresholds(n_imp_max=n_imp_max, q0_min=q0_min, qf_min=q0_min * f0)
