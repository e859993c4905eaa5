"""Purity maximization over the feedback filter, detuning and homodyne angle.

Search coordinates are ``log10`` of ``Omega_H``, ``Omega_L`` and
``Gamma_fb`` in units of the zero-detuning SQL frequency, plus the detuning
``delta``. The homodyne angle is not searched: at fixed other parameters the
occupation is a quadratic in ``cot(theta_eff)``, so the free-angle mode sets
it to its exact conditional optimum at every evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from . import kernels
from .closed_form import CoolingResult, purity_closed_form
from .errors import DomainError, InfeasibleError
from .model import (
    DEFAULT_KAPPA,
    FeedbackParams,
    OscillatorParams,
    ReadoutParams,
    SystemParams,
)

FREE = "free"
PHASE = "phase"
RESONANT = "resonant"
MODES = (FREE, PHASE, RESONANT)
_EXTRA_SEEDS = 2
# The noise model is the broadband-cavity limit. Candidates whose spring,
# filter band or SQL frequency come within this fraction of kappa are
# outside it and are rejected, as are the unphysical states (1/mu < 1)
# that the truncated model can produce there.
BROADBAND_FRACTION = 0.1


@dataclass(frozen=True)
class Plant:
    """Everything the experimenter cannot tune."""

    osc: OscillatorParams
    eta: float = 1.0
    kappa: float = DEFAULT_KAPPA


@dataclass(frozen=True)
class Bounds:
    """Search box; corners and Gamma_fb as log10 of multiples of Omega_SQL,0.

    ``Gamma_fb <= Omega_L`` and ``Omega_H < Omega_L`` are enforced as
    feasibility constraints rather than box edges.
    """

    log_omega_h: tuple = (-2.0, 3.0)
    log_omega_l: tuple = (-2.0, 3.0)
    log_gamma_fb: tuple = (-4.0, 3.0)
    delta: tuple = (-2.0, 2.0)

    def box(self, mode: str) -> list[tuple]:
        box = [self.log_omega_h, self.log_omega_l, self.log_gamma_fb]
        if mode != RESONANT:
            box.append(self.delta)
        return box


@dataclass(frozen=True)
class OptimizationProblem:
    plant: Plant
    cq_sql: float
    mode: str = FREE
    bounds: Bounds = field(default_factory=Bounds)
    budget: int = 10_000
    n_starts: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.cq_sql > 0:
            raise DomainError(f"cq_sql must be positive, got {self.cq_sql}")
        if self.budget < 1000:
            raise DomainError(f"budget must be at least 1000, got {self.budget}")
        if self.n_starts < 8:
            raise DomainError(f"need at least 8 starts, got {self.n_starts}")


@dataclass(frozen=True)
class OptimumPoint:
    cq_sql: float
    mode: str
    purity: float
    n_eff: float
    omega_sql0: float
    omega_h: float
    omega_l: float
    gamma_fb: float
    delta: float
    theta: float
    omega_eff: float
    gamma_eff: float
    coords: tuple
    n_evals: int
    system: SystemParams
    result: CoolingResult


@dataclass(frozen=True)
class SweepResult:
    mode: str
    points: list

    @property
    def purity(self) -> np.ndarray:
        return np.array([p.purity for p in self.points])


def cq_to_coupling(osc: OscillatorParams, cq_sql: float) -> float:
    """Zero-detuning SQL frequency giving quantum cooperativity ``cq_sql``.

    With structural damping ``n_ba = Q0 W_SQL0^2 / (4 W0^2)`` and
    ``n_th = n_th0 W0 / W_SQL0`` at ``W = W_SQL0``, so
    ``C = Q0 W_SQL0^3 / (4 n_th0 W0^3)`` and the inversion is a cube root.
    Input power scales as ``W_SQL0^2``, hence ``C`` as power to the 3/2.
    """
    if not cq_sql > 0:
        raise DomainError(f"cq_sql must be positive, got {cq_sql}")
    return osc.omega0 * (4.0 * cq_sql * osc.nth0 / osc.q0) ** (1.0 / 3.0)


def coupling_to_cq(osc: OscillatorParams, omega_sql0: float) -> float:
    return osc.q0 * (omega_sql0 / osc.omega0) ** 3 / (4.0 * osc.nth0)


class _Objective:
    """``log(1/mu)`` on search coordinates; infeasible points map to ``inf``."""

    def __init__(self, plant: Plant, omega_sql0: float, mode: str):
        o = plant.osc
        self.head = (o.q0, o.nth0, o.omega0, omega_sql0, plant.eta, plant.kappa)
        self.wsql = omega_sql0
        self.mode = mode
        self.n_evals = 0

    def physical(self, v):
        wh, wl, gfb = (self.wsql * 10.0 ** v[i] for i in range(3))
        delta = v[3] if self.mode != RESONANT else 0.0
        if self.mode == FREE:
            cot = kernels.optimal_cot(*self.head, delta, wh, wl, gfb)
            theta = math.atan2(1.0, cot) + math.atan(delta) if cot == cot else math.nan
        else:
            theta = math.pi / 2
        return wh, wl, gfb, delta, theta

    def broadband(self, wl, wh, gfb, delta):
        omega0, kappa = self.head[2], self.head[5]
        d2 = 1.0 + delta * delta
        w_eff2 = omega0 * omega0 + self.wsql**2 * delta / (2.0 * d2 * d2) + wh * gfb
        top = max(wl, self.wsql, math.sqrt(max(w_eff2, 0.0)))
        return top <= BROADBAND_FRACTION * kappa

    def __call__(self, v):
        self.n_evals += 1
        wh, wl, gfb, delta, theta = self.physical(v)
        if not (wl > wh * (1.0 + 1e-6) and gfb <= wl) or theta != theta:
            return math.inf
        if not self.broadband(wl, wh, gfb, delta):
            return math.inf
        val = kernels.inverse_purity(*self.head, delta, theta, wh, wl, gfb)
        return math.log(val) if val >= 1.0 else math.inf


def _cold_starts(box, n, seed):
    sample = qmc.LatinHypercube(d=len(box), seed=seed).random(n)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    return list(lo + sample * (hi - lo))


def _heuristic_start(mode):
    # Filter band around the SQL frequency with strong damping; a mild
    # blue detuning supplies an optical spring.
    v = [math.log10(0.3), math.log10(3.0), math.log10(0.5)]
    if mode != RESONANT:
        v.append(0.3)
    return np.array(v)


def _fold_theta(theta):
    t = math.fmod(theta, math.pi)
    return t + math.pi if t <= 0.0 else t


def _as_point(problem, obj, v, n_evals) -> OptimumPoint:
    wh, wl, gfb, delta, theta = obj.physical(v)
    theta = _fold_theta(theta)
    plant = problem.plant
    sys = SystemParams(
        plant.osc,
        ReadoutParams(obj.wsql, delta=delta, theta=theta, eta=plant.eta, kappa=plant.kappa),
        FeedbackParams(wh, wl, gfb * wh / plant.osc.omega0**2),
    )
    res = purity_closed_form(sys)
    return OptimumPoint(
        cq_sql=problem.cq_sql, mode=problem.mode, purity=res.purity, n_eff=res.n_eff,
        omega_sql0=obj.wsql, omega_h=wh, omega_l=wl, gamma_fb=gfb, delta=delta, theta=theta,
        omega_eff=res.omega_eff, gamma_eff=res.gamma_eff, coords=tuple(float(x) for x in v),
        n_evals=n_evals, system=sys, result=res,
    )


def optimize_purity(problem: OptimizationProblem, seeds=()) -> OptimumPoint:
    """Deterministic multi-start Nelder-Mead over the search box.

    Parameters
    ----------
    seeds : sequence of array_like
        Extra starting points in search coordinates (warm starts), at most
        two. Each start, cold or seeded, gets the same share of the budget,
        so adding seeds can only improve on the cold starts.

    Raises
    ------
    InfeasibleError
        If no start reaches a stable point.
    """
    if len(seeds) > _EXTRA_SEEDS:
        raise DomainError(f"at most {_EXTRA_SEEDS} seeds are accepted")
    wsql = cq_to_coupling(problem.plant.osc, problem.cq_sql)
    obj = _Objective(problem.plant, wsql, problem.mode)
    box = problem.bounds.box(problem.mode)
    dim = len(box)
    starts = [_heuristic_start(problem.mode)]
    starts += _cold_starts(box, problem.n_starts - 1, problem.seed)
    starts += [np.asarray(s, dtype=float)[:dim] for s in seeds]
    per_start = problem.budget // (problem.n_starts + _EXTRA_SEEDS)
    best_x, best_f = None, math.inf
    for x0 in starts:
        x0 = np.clip(x0, [b[0] for b in box], [b[1] for b in box])
        if not math.isfinite(obj(x0)):
            continue
        res = optimize.minimize(
            obj, x0, method="Nelder-Mead", bounds=box,
            options={"maxfev": per_start, "xatol": 1e-9, "fatol": 1e-13},
        )
        if res.fun < best_f:
            best_x, best_f = res.x, res.fun
    if best_x is None:
        raise InfeasibleError(
            f"no stable point inside the bounds and the broadband domain for "
            f"C_Q,SQL = {problem.cq_sql:g} ({problem.mode})"
        )
    return _as_point(problem, obj, best_x, obj.n_evals)


def sweep_cooperativity(
    plant: Plant,
    cq_grid,
    modes=(FREE, PHASE),
    budget: int = 10_000,
    n_starts: int = 8,
    seed: int = 0,
    bounds: Bounds | None = None,
) -> dict:
    """Optimize every grid point in every mode, warm-starting along the grid.

    Modes run from the most to the least constrained. The phase-fixed
    optimum seeds the free-angle search and the resonant optimum seeds the
    phase-fixed one, so the looser mode can never come out worse.
    """
    grid = [float(c) for c in cq_grid]
    if any(c <= 0 for c in grid) or grid != sorted(grid):
        raise DomainError("cq_grid must be positive and sorted")
    bounds = bounds or Bounds()
    order = [m for m in (RESONANT, PHASE, FREE) if m in modes]
    out = {}
    for mode in order:
        looser_seed = {FREE: PHASE, PHASE: RESONANT}.get(mode)
        points, prev = [], None
        for i, c in enumerate(grid):
            seeds = []
            if prev is not None:
                seeds.append(prev.coords)
            if looser_seed in out:
                seeds.append(_lift(out[looser_seed].points[i].coords, mode))
            problem = OptimizationProblem(plant, c, mode, bounds, budget, n_starts, seed)
            prev = optimize_purity(problem, seeds)
            points.append(prev)
        out[mode] = SweepResult(mode, points)
    return {m: out[m] for m in modes}


def _lift(coords, mode):
    """Embed a more constrained optimum into the coordinates of ``mode``."""
    v = list(coords)
    if mode != RESONANT and len(v) == 3:
        v.append(0.0)
    return v
