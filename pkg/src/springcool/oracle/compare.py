"""Closed form against quadrature, for single points and seeded random suites."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..closed_form import purity_closed_form
from ..model import FeedbackParams, OscillatorParams, ReadoutParams, SystemParams
from ..stability import routh_margins
from .quadrature import DEFAULT_TOL, QuadratureReport, integrate_variances


@dataclass(frozen=True)
class VerificationRecord:
    rel_x: float
    rel_p: float
    rel_n: float
    closed: tuple  # (x_var, p_var, n_eff)
    oracle: QuadratureReport

    @property
    def max_rel(self) -> float:
        return max(self.rel_x, self.rel_p, self.rel_n)


@dataclass(frozen=True)
class SuiteReport:
    records: list
    configs: list

    @property
    def max_rel(self) -> float:
        return max(r.max_rel for r in self.records)


def _rel(a, b):
    return abs(a - b) / abs(b)


def verify_closed_form(sys: SystemParams, tol: float = DEFAULT_TOL) -> VerificationRecord:
    cf = purity_closed_form(sys)
    q = integrate_variances(sys, tol=tol)
    n_q = 0.5 * (cf.omega_eff * q.x_var + q.p_var / cf.omega_eff - 1.0)
    return VerificationRecord(
        rel_x=_rel(cf.x_var, q.x_var),
        rel_p=_rel(cf.p_var, q.p_var),
        rel_n=_rel(cf.n_eff, n_q),
        closed=(cf.x_var, cf.p_var, cf.n_eff),
        oracle=q,
    )


def _draw(rng: np.random.Generator) -> SystemParams:
    def logu(lo, hi):
        return 10.0 ** rng.uniform(math.log10(lo), math.log10(hi))

    osc = OscillatorParams(q0=logu(1e3, 1e9), nth0=logu(1.0, 1e10))
    readout = ReadoutParams(
        omega_sql0=logu(0.1, 100.0),
        delta=rng.uniform(-2.0, 2.0),
        theta=rng.uniform(0.0, math.pi),
        eta=rng.uniform(0.1, 1.0),
    )
    omega_h = logu(1e-2, 1e2)
    fb = FeedbackParams(
        omega_h=omega_h,
        omega_l=omega_h * 10.0 ** rng.uniform(0.05, 2.0),
        gfb=logu(1e-2, 1e4),
    )
    return SystemParams(osc, readout, fb)


def random_configurations(n: int, seed: int = 0, stable_only: bool = True) -> list[SystemParams]:
    """Seeded draws over the verification domain; unstable draws are rejected.

    Filter corners span four decades, the band one to two hundred fold.
    Draws whose homodyne angle is within 1e-3 of the signal-blind quadrature
    are skipped as well.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        sys = _draw(rng)
        theta_eff = sys.readout.theta - math.atan(sys.readout.delta)
        if abs(math.sin(theta_eff)) < 1e-3:
            continue
        if stable_only and not all(v > 0 for v in routh_margins(sys).values()):
            continue
        out.append(sys)
    return out


def verify_suite(n: int = 100, seed: int = 0, tol: float = DEFAULT_TOL) -> SuiteReport:
    configs = random_configurations(n, seed)
    return SuiteReport(records=[verify_closed_form(s, tol) for s in configs], configs=configs)
