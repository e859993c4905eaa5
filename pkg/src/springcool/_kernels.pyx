# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_kernels_py`` for the reference semantics."""

from libc.math cimport sqrt, sin, cos, atan, pow, NAN, INFINITY, fabs


cdef inline double _moment(double t, double stiffness, double gamma_m, double fb_gain,
                           double omega_h, double omega_l, double s_force, double s_imp,
                           double s_fx, double power, double centre) noexcept nogil:
    cdef double w = centre + t
    cdef double a = w / omega_h
    cdef double b = w / omega_l
    cdef double den = 1.0 + b * b
    cdef double fb_re = fb_gain * (1.0 + a * b) / den
    cdef double fb_im = fb_gain * (a - b) / den
    cdef double fb_abs2 = fb_gain * fb_gain * (1.0 + a * a) / den
    # K + Re(fb) - w^2 written as (r - w)(r + w) + fb b (a - b) / den with
    # r^2 = K + fb, and the factor that vanishes at the peak formed from the
    # offset t (for instance (r - centre) - t) so that a panel
    # integrated in the offset t keeps full precision however narrow the peak.
    cdef double k_dc = stiffness + fb_gain
    cdef double r, re
    if k_dc > 0.0:
        r = sqrt(k_dc)
        if centre >= 0.0:
            re = ((r - centre) - t) * (r + w)
        else:
            re = (r - w) * ((r + centre) + t)
        re += fb_gain * b * (a - b) / den
    else:
        re = stiffness - w * w + fb_re
    cdef double im = w * gamma_m + fb_im
    cdef double val = (s_force + fb_abs2 * s_imp + 2.0 * fb_re * s_fx) / (re * re + im * im)
    if power == 2.0:
        return val * w * w
    return val * pow(w, power)


# scipy.LowLevelCallable entry points: xx[0] is the variable, xx[1:11] the
# ten flat arguments in the order of the Python fallback.
cdef api double sxx_moment_llc(int n, double *xx) noexcept nogil:
    return _moment(xx[0], xx[1], xx[2], xx[3], xx[4], xx[5], xx[6], xx[7], xx[8], xx[9], xx[10])


cdef api double sxx_moment_tail_llc(int n, double *xx) noexcept nogil:
    cdef double u = xx[0]
    if u == 0.0:
        return 0.0
    cdef double w = 1.0 / u
    return _moment(w, xx[1], xx[2], xx[3], xx[4], xx[5], xx[6], xx[7], xx[8], xx[9], 0.0) * w * w


cpdef double sxx_moment(double t, double stiffness, double gamma_m, double fb_gain,
                        double omega_h, double omega_l, double s_force, double s_imp,
                        double s_fx, double power, double centre=0.0):
    return _moment(t, stiffness, gamma_m, fb_gain, omega_h, omega_l, s_force, s_imp, s_fx, power, centre)


cpdef double sxx_moment_tail(double u, double stiffness, double gamma_m, double fb_gain,
                             double omega_h, double omega_l, double s_force, double s_imp,
                             double s_fx, double power, double centre=0.0):
    if u == 0.0:
        return 0.0
    cdef double w = 1.0 / u
    return _moment(w, stiffness, gamma_m, fb_gain, omega_h, omega_l, s_force, s_imp, s_fx, power, 0.0) * w * w


cdef inline void _state(double stiffness, double gamma_m, double omega_h, double omega_l,
                        double gamma_fb, double s_force, double s_imp, double s_fx,
                        double *x_var, double *p_var) noexcept nogil:
    cdef double w2 = stiffness + omega_h * gamma_fb
    cdef double s1 = omega_l + gamma_m
    cdef double inner = omega_l * gamma_m + (omega_l - omega_h) * gamma_fb
    cdef double det = gamma_m * w2 + s1 * inner
    if not (s1 > 0.0 and w2 > 0.0 and det > 0.0):
        x_var[0] = NAN
        p_var[0] = NAN
        return
    cdef double s2 = w2 + inner
    cdef double y_l = omega_l * gamma_fb
    cdef double y_h = omega_h * gamma_fb
    cdef double lam_l = s_force + y_l * y_l * s_imp + 2.0 * y_l * s_fx
    cdef double lam_h = s_force + y_h * y_h * s_imp + 2.0 * y_h * s_fx
    x_var[0] = (lam_l * w2 + lam_h * omega_l * s1) / (2.0 * w2 * det)
    p_var[0] = (lam_l * s2 + lam_h * omega_l * omega_l) / (2.0 * det)


cpdef tuple cooling_state(double stiffness, double gamma_m, double omega_h, double omega_l,
                          double gamma_fb, double s_force, double s_imp, double s_fx):
    cdef double x_var, p_var
    _state(stiffness, gamma_m, omega_h, omega_l, gamma_fb, s_force, s_imp, s_fx, &x_var, &p_var)
    return x_var, p_var


cdef inline bint _scales(double q0, double nth0, double omega0, double omega_sql0, double eta,
                         double kappa, double delta, double omega_h, double gamma_fb,
                         double *out) noexcept nogil:
    cdef double d2 = 1.0 + delta * delta
    cdef double wsql2 = omega_sql0 * omega_sql0 / d2
    cdef double rp2 = wsql2 * delta / (2.0 * d2)
    cdef double g_rp = -(wsql2 / kappa) * delta / (d2 * d2)
    cdef double stiffness = omega0 * omega0 + rp2
    cdef double w2 = stiffness + omega_h * gamma_fb
    if not w2 > 0.0:
        return False
    cdef double w_eff = sqrt(w2)
    cdef double g0 = omega0 * omega0 / (q0 * w_eff)
    out[0] = stiffness
    out[1] = g0 + g_rp
    out[2] = w_eff
    out[3] = 2.0 * (nth0 * omega0 / w_eff + 0.5) * w_eff * g0 + wsql2 / (2.0 * d2)
    out[4] = d2 / (2.0 * wsql2 * eta)
    return True


cpdef double inverse_purity(double q0, double nth0, double omega0, double omega_sql0, double eta,
                            double kappa, double delta, double theta, double omega_h,
                            double omega_l, double gamma_fb):
    cdef double sc[5]
    cdef double x_var, p_var, sn, cot, val
    if not (0.0 < omega_h < omega_l and gamma_fb >= 0.0 and omega_sql0 > 0.0):
        return INFINITY
    if not _scales(q0, nth0, omega0, omega_sql0, eta, kappa, delta, omega_h, gamma_fb, sc):
        return INFINITY
    sn = sin(theta - atan(delta))
    if fabs(sn) < 1e-12:
        return INFINITY
    cot = cos(theta - atan(delta)) / sn
    _state(sc[0], sc[1], omega_h, omega_l, gamma_fb, sc[3], sc[4] / (sn * sn),
           -0.5 * cot / sqrt(eta), &x_var, &p_var)
    if x_var != x_var:
        return INFINITY
    val = sc[2] * x_var + p_var / sc[2]
    return val if val > 0.0 else INFINITY


cpdef double optimal_cot(double q0, double nth0, double omega0, double omega_sql0, double eta,
                         double kappa, double delta, double omega_h, double omega_l,
                         double gamma_fb):
    cdef double sc[5]
    if not omega_l > omega_h:
        return NAN
    if not _scales(q0, nth0, omega0, omega_sql0, eta, kappa, delta, omega_h, gamma_fb, sc):
        return NAN
    cdef double w_eff = sc[2]
    cdef double s1 = omega_l + sc[1]
    cdef double s2 = w_eff * w_eff + omega_l * sc[1] + (omega_l - omega_h) * gamma_fb
    cdef double w_l = w_eff * w_eff + s2
    cdef double w_h = omega_l * (s1 + omega_l)
    cdef double y_l = omega_l * gamma_fb
    cdef double y_h = omega_h * gamma_fb
    cdef double den = sc[4] * (w_l * y_l * y_l + w_h * y_h * y_h)
    if not den > 0.0:
        return 0.0
    return (w_l * y_l + w_h * y_h) / (2.0 * sqrt(eta) * den)
