"""Adaptive quadrature of the variance integrals.

This module must not import ``closed_form``: it is the independent route.
It integrates ``S_xx`` and ``W^2 S_xx`` over the positive half-line and
divides by pi, which equals the two-sided ``dW / 2 pi`` integral because
the symmetrized spectrum is even.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .. import kernels
from ..errors import ConvergenceError, DomainError, InstabilityError
from ..model import SystemParams
from ..spectra import FROZEN, STRUCTURAL, displacement_psd, loop_scales
from ..stability import characteristic_roots

DEFAULT_TOL = 1e-9
DEFAULT_BUDGET = 1_000_000
_PANEL_LIMIT = 200


@dataclass(frozen=True)
class QuadratureReport:
    """Integrated variances with the bookkeeping needed to trust them.

    Attributes
    ----------
    abs_err_estimate : tuple of float
        QUADPACK error estimates summed over panels, for ``(x_var, p_var)``.
    n_evals : int
        Integrand evaluations over both integrals.
    """

    x_var: float
    p_var: float
    abs_err_estimate: tuple
    n_evals: int
    converged: bool

    @property
    def rel_err_estimate(self) -> float:
        ex, ep = self.abs_err_estimate
        return max(ex / abs(self.x_var), ep / abs(self.p_var))


def _assert_stable(sys: SystemParams) -> np.ndarray:
    roots = characteristic_roots(sys)
    if np.any(roots.real >= 0.0):
        worst = roots[np.argmax(roots.real)]
        raise InstabilityError(
            f"closed-loop pole at s = {worst:.6g} is not in the left half-plane; "
            "the variance integrals have no physical meaning",
            violated=["poles"],
        )
    return roots


def breakpoints(sys: SystemParams, roots: np.ndarray) -> np.ndarray:
    """Panel edges: each pole's peak and shoulders, plus the filter corners and Omega_eff."""
    pts = [sys.fb.omega_h, sys.fb.omega_l]
    ls = loop_scales(sys)
    pts.append(ls.omega_eff)
    for s in roots:
        centre, width = abs(s.imag), abs(s.real)
        pts.append(width)
        # Shoulders at geometrically growing offsets out to the pole's own
        # scale, so no panel spans more than a factor 8 of the 1/offset^2 flank.
        k = 1.0
        while k * width <= max(centre, width):
            pts.extend((centre - k * width, centre + k * width))
            k *= 8.0
        pts.append(centre)
    pts = np.unique(np.array([p for p in pts if p > 0.0 and math.isfinite(p)]))
    # Merge edges closer than a relative 1e-13; they only add empty panels.
    keep = [pts[0]]
    for p in pts[1:]:
        if p > keep[-1] * (1.0 + 1e-13):
            keep.append(p)
    return np.array(keep)


class _Accumulator:
    def __init__(self, budget):
        self.value = 0.0
        self.err = 0.0
        self.n_evals = 0
        self.ok = True
        self.budget = budget

    def add(self, func, a, b, args, tol):
        out = integrate.quad(func, a, b, args=args, epsabs=0.0, epsrel=tol, limit=_PANEL_LIMIT, full_output=1)
        self.value += out[0]
        self.err += out[1]
        self.n_evals += out[2]["neval"]
        if len(out) > 3:
            self.ok = False
        if self.n_evals > self.budget:
            self.ok = False
            return False
        return True


def _panel_centre(a, b, centres):
    """Pole centre to integrate ``[a, b]`` about, or 0 for panels away from peaks.

    Near a sharp peak the abscissae ``w = mid + h x`` lose the relative
    precision of ``h``; integrating the offset ``t = w - c`` keeps it.
    """
    mid = 0.5 * (a + b)
    best = 0.0
    for c in centres:
        if 0.5 * c <= a and b <= 2.0 * c and (best == 0.0 or abs(mid - c) < abs(mid - best)):
            best = c
    return best


def _integrate_frozen(sys, roots, tol, budget, omega_min, full_line):
    ls = loop_scales(sys)
    llc = kernels.low_level_integrands()
    body, tail = llc if llc is not None else (kernels.sxx_moment, kernels.sxx_moment_tail)
    edges = breakpoints(sys, roots)
    lo = 0.0 if omega_min is None else omega_min
    edges = np.concatenate(([lo], edges[edges > lo]))
    top = edges[-1]
    centres = sorted({abs(r.imag) for r in roots if abs(r.imag) > 0.0})
    panels = [(a, b, _panel_centre(a, b, centres)) for a, b in zip(edges[:-1], edges[1:])]
    panel_tol = tol / 10.0
    results = []
    total_evals = 0
    for power in (0.0, 2.0):
        head = (ls.stiffness, ls.gamma_m, ls.fb_gain, ls.omega_h, ls.omega_l, ls.s_force, ls.s_imp, ls.s_fx, power)
        acc = _Accumulator(budget - total_evals)
        sides = (1.0, -1.0) if full_line else (1.0,)
        for sign in sides:
            for a, b, c in panels:
                lo_, hi_, c = (a - c, b - c, c) if sign > 0 else (c - b, c - a, -c)
                if not acc.add(body, lo_, hi_, head + (c,), panel_tol):
                    break
            args = head + (0.0,)
            # Tail: W = 1/u maps (top, inf) onto (0, 1/top).
            if sign > 0:
                acc.add(tail, 0.0, 1.0 / top, args, panel_tol)
            else:
                acc.add(tail, -1.0 / top, 0.0, args, panel_tol)
        total_evals += acc.n_evals
        scale = 2.0 * math.pi if full_line else math.pi
        results.append((acc.value / scale, acc.err / scale, acc.ok))
    return results, total_evals


def _integrate_structural(sys, tol, budget, omega_min):
    if omega_min is None or not omega_min > 0:
        raise DomainError("structural damping makes <dx^2> diverge at DC; pass omega_min > 0")
    roots = characteristic_roots(sys)
    edges = breakpoints(sys, roots)
    edges = np.concatenate(([omega_min], edges[edges > omega_min]))
    top = edges[-1]
    results = []
    total_evals = 0
    for power in (0.0, 2.0):

        def body(w, p=power):
            return float(displacement_psd(sys, w, STRUCTURAL).s_xx_total) * w**p

        def tail(u, p=power):
            return 0.0 if u == 0.0 else body(1.0 / u, p) / (u * u)

        acc = _Accumulator(budget - total_evals)
        for a, b in zip(edges[:-1], edges[1:]):
            if not acc.add(body, a, b, (), tol / 10.0):
                break
        acc.add(tail, 0.0, 1.0 / top, (), tol / 10.0)
        total_evals += acc.n_evals
        results.append((acc.value / math.pi, acc.err / math.pi, acc.ok))
    return results, total_evals


def integrate_variances(
    sys: SystemParams,
    tol: float = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
    damping: str = FROZEN,
    omega_min: float | None = None,
    full_line: bool = False,
) -> QuadratureReport:
    """Integrate the displacement spectrum for ``<dx^2>`` and ``<dp^2>``.

    Parameters
    ----------
    tol : float
        Target relative accuracy, within ``[1e-12, 1e-3]``.
    budget : int
        Maximum number of integrand evaluations over both integrals.
    damping : {"frozen", "exact-structural"}
        Integrand variant; the structural one requires ``omega_min``.
    omega_min : float, optional
        Lower integration limit. Defaults to 0 for the frozen integrand.
    full_line : bool
        Integrate over the whole real line instead of doubling the half-line.

    Raises
    ------
    InstabilityError
        If any closed-loop pole lies in the closed right half-plane.
    ConvergenceError
        If the budget is exhausted or QUADPACK flags a panel; ``partial``
        holds the report accumulated so far.
    """
    if not 1e-12 <= tol <= 1e-3:
        raise DomainError(f"tol must lie in [1e-12, 1e-3], got {tol}")
    roots = _assert_stable(sys)
    if damping == FROZEN:
        results, n_evals = _integrate_frozen(sys, roots, tol, budget, omega_min, full_line)
    elif damping == STRUCTURAL:
        results, n_evals = _integrate_structural(sys, tol, budget, omega_min)
    else:
        raise ValueError(f"unknown damping mode {damping!r}")
    (x_var, x_err, x_ok), (p_var, p_err, p_ok) = results
    report = QuadratureReport(
        x_var=x_var,
        p_var=p_var,
        abs_err_estimate=(x_err, p_err),
        n_evals=n_evals,
        converged=False,
    )
    ok = x_ok and p_ok and n_evals <= budget and x_var > 0 and p_var > 0
    if ok and report.rel_err_estimate < tol:
        return QuadratureReport(x_var, p_var, (x_err, p_err), n_evals, True)
    raise ConvergenceError(
        f"quadrature did not reach rel. tol {tol:g} within {budget} evaluations "
        f"(estimate {report.rel_err_estimate if x_var and p_var else math.inf:.3g})",
        partial=report,
    )
