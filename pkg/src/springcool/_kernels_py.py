"""Pure-Python kernels; the reference the compiled core must reproduce.

Every function works on flat floats so it can be called from tight loops
(quadrature, optimizer) without building parameter objects.
"""

from __future__ import annotations

import math

INF = math.inf


def sxx_moment(t, stiffness, gamma_m, fb_gain, omega_h, omega_l, s_force, s_imp, s_fx, power, centre=0.0):
    """``w**power * S_xx(w)`` for the frozen-damping closed loop at ``w = centre + t``.

    Passing the offset ``t`` from a nearby ``centre`` rather than ``w``
    itself lets quadrature resolve peaks narrower than the spacing of
    doubles around ``w``.
    """
    w = centre + t
    a = w / omega_h
    b = w / omega_l
    den = 1.0 + b * b
    fb_re = fb_gain * (1.0 + a * b) / den
    fb_im = fb_gain * (a - b) / den
    fb_abs2 = fb_gain * fb_gain * (1.0 + a * a) / den
    # K + Re(fb) - w^2 written as (r - w)(r + w) + fb b (a - b) / den with
    # r^2 = K + fb, and the factor that vanishes at the peak formed from the
    # offset t (for instance (r - centre) - t) so that a panel
    # integrated in the offset t keeps full precision however narrow the peak.
    k_dc = stiffness + fb_gain
    if k_dc > 0.0:
        r = math.sqrt(k_dc)
        if centre >= 0.0:
            re = ((r - centre) - t) * (r + w)
        else:
            re = (r - w) * ((r + centre) + t)
        re += fb_gain * b * (a - b) / den
    else:
        re = stiffness - w * w + fb_re
    im = w * gamma_m + fb_im
    num = s_force + fb_abs2 * s_imp + 2.0 * fb_re * s_fx
    val = num / (re * re + im * im)
    if power == 2.0:
        return val * w * w
    return val * w**power


def sxx_moment_tail(u, stiffness, gamma_m, fb_gain, omega_h, omega_l, s_force, s_imp, s_fx, power, centre=0.0):
    """The same moment after ``w = 1/u``, including the Jacobian ``1/u**2``; ``centre`` is ignored."""
    if u == 0.0:
        return 0.0
    w = 1.0 / u
    return sxx_moment(w, stiffness, gamma_m, fb_gain, omega_h, omega_l, s_force, s_imp, s_fx, power) * w * w


def cooling_state(stiffness, gamma_m, omega_h, omega_l, gamma_fb, s_force, s_imp, s_fx):
    """Closed-form ``(x_var, p_var)``; NaNs when the loop is unstable.

    The lambdas carry the feedback damping only, and the Hurwitz determinant
    is written so that no large terms cancel.
    """
    w2 = stiffness + omega_h * gamma_fb
    s1 = omega_l + gamma_m
    inner = omega_l * gamma_m + (omega_l - omega_h) * gamma_fb
    det = gamma_m * w2 + s1 * inner
    if not (s1 > 0.0 and w2 > 0.0 and det > 0.0):
        return math.nan, math.nan
    s2 = w2 + inner
    y_l = omega_l * gamma_fb
    y_h = omega_h * gamma_fb
    lam_l = s_force + y_l * y_l * s_imp + 2.0 * y_l * s_fx
    lam_h = s_force + y_h * y_h * s_imp + 2.0 * y_h * s_fx
    x_var = (lam_l * w2 + lam_h * omega_l * s1) / (2.0 * w2 * det)
    p_var = (lam_l * s2 + lam_h * omega_l * omega_l) / (2.0 * det)
    return x_var, p_var


def _scales(q0, nth0, omega0, omega_sql0, eta, kappa, delta, omega_h, gamma_fb):
    d2 = 1.0 + delta * delta
    wsql2 = omega_sql0 * omega_sql0 / d2
    rp2 = wsql2 * delta / (2.0 * d2)
    g_rp = -(wsql2 / kappa) * delta / (d2 * d2)
    stiffness = omega0 * omega0 + rp2
    w2 = stiffness + omega_h * gamma_fb
    if not w2 > 0.0:
        return None
    w_eff = math.sqrt(w2)
    g0 = omega0 * omega0 / (q0 * w_eff)
    s_force = 2.0 * (nth0 * omega0 / w_eff + 0.5) * w_eff * g0 + wsql2 / (2.0 * d2)
    s_imp0 = d2 / (2.0 * wsql2 * eta)
    return stiffness, g0 + g_rp, w_eff, s_force, s_imp0


def inverse_purity(q0, nth0, omega0, omega_sql0, eta, kappa, delta, theta, omega_h, omega_l, gamma_fb):
    """``2 n_eff + 1`` from flat parameters; ``inf`` for any infeasible point."""
    if not (0.0 < omega_h < omega_l and gamma_fb >= 0.0 and omega_sql0 > 0.0):
        return INF
    sc = _scales(q0, nth0, omega0, omega_sql0, eta, kappa, delta, omega_h, gamma_fb)
    if sc is None:
        return INF
    stiffness, gamma_m, w_eff, s_force, s_imp0 = sc
    sn = math.sin(theta - math.atan(delta))
    if abs(sn) < 1e-12:
        return INF
    cot = math.cos(theta - math.atan(delta)) / sn
    s_imp = s_imp0 / (sn * sn)
    s_fx = -0.5 * cot / math.sqrt(eta)
    x_var, p_var = cooling_state(stiffness, gamma_m, omega_h, omega_l, gamma_fb, s_force, s_imp, s_fx)
    if x_var != x_var:
        return INF
    val = w_eff * x_var + p_var / w_eff
    return val if val > 0.0 else INF


def optimal_cot(q0, nth0, omega0, omega_sql0, eta, kappa, delta, omega_h, omega_l, gamma_fb):
    """``cot(theta_eff)`` minimizing the exact occupation at fixed other parameters.

    The occupation is a quadratic in ``c = cot(theta_eff)``: imprecision grows as
    ``1 + c**2`` and the correlation is linear in ``c``.
    """
    sc = _scales(q0, nth0, omega0, omega_sql0, eta, kappa, delta, omega_h, gamma_fb)
    if sc is None or not omega_l > omega_h:
        return math.nan
    _, gamma_m, w_eff, _, s_imp0 = sc
    s1 = omega_l + gamma_m
    s2 = w_eff * w_eff + omega_l * gamma_m + (omega_l - omega_h) * gamma_fb
    w_l = w_eff * w_eff + s2
    w_h = omega_l * (s1 + omega_l)
    y_l = omega_l * gamma_fb
    y_h = omega_h * gamma_fb
    den = s_imp0 * (w_l * y_l * y_l + w_h * y_h * y_h)
    if not den > 0.0:
        return 0.0
    return (w_l * y_l + w_h * y_h) / (2.0 * math.sqrt(eta) * den)
