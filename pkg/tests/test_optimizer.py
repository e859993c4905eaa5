import math

import numpy as np
import pytest

from conftest import SWEEP_PLANT
from springcool.closed_form import optimal_angle
from springcool.errors import DomainError, InfeasibleError
from springcool.model import OscillatorParams
from springcool.optimizer import (
    FREE,
    PHASE,
    RESONANT,
    Bounds,
    OptimizationProblem,
    Plant,
    coupling_to_cq,
    cq_to_coupling,
    optimize_purity,
    sweep_cooperativity,
)
from springcool.stability import check_stability

OSC = OscillatorParams(SWEEP_PLANT["q0"], SWEEP_PLANT["nth0"])
PLANT = Plant(OSC, eta=SWEEP_PLANT["eta"], kappa=SWEEP_PLANT["kappa"])


@pytest.mark.parametrize("cq", [1e-6, 1e-2, 1.0, 37.0, 1e4])
def test_cooperativity_round_trip(cq):
    assert coupling_to_cq(OSC, cq_to_coupling(OSC, cq)) == pytest.approx(cq, rel=1e-10)


def test_coupling_is_monotone_and_vanishes_with_cooperativity():
    w = [cq_to_coupling(OSC, c) for c in np.logspace(-12, 4, 30)]
    assert all(b > a for a, b in zip(w, w[1:]))
    assert w[0] / w[-1] == pytest.approx(1e-16 ** (1.0 / 3.0), rel=1e-10)
    assert cq_to_coupling(OSC, 1e-300) < 1e-90


def test_cooperativity_doubles_with_power_factor():
    # Power scales as omega_sql0^2, so doubling C needs 2^(2/3) times the power.
    w = cq_to_coupling(OSC, 3.0)
    w_up = w * math.sqrt(2.0 ** (2.0 / 3.0))
    assert coupling_to_cq(OSC, w_up) == pytest.approx(6.0, rel=1e-12)


def test_nonpositive_cooperativity_rejected():
    with pytest.raises(DomainError):
        cq_to_coupling(OSC, 0.0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(cq_sql=-1.0), dict(mode="sideways"), dict(budget=999), dict(n_starts=7)],
)
def test_problem_validation(kwargs):
    base = dict(plant=PLANT, cq_sql=1.0)
    base.update(kwargs)
    with pytest.raises(DomainError):
        OptimizationProblem(**base)


def test_optimizer_is_deterministic():
    problem = OptimizationProblem(PLANT, 2.0, budget=2000, seed=7)
    a, b = optimize_purity(problem), optimize_purity(problem)
    assert a.coords == b.coords
    assert a.purity == b.purity


def test_empty_feasible_set_reported():
    bounds = Bounds(log_omega_h=(2.0, 3.0), log_omega_l=(-2.0, -1.0))
    with pytest.raises(InfeasibleError):
        optimize_purity(OptimizationProblem(PLANT, 1.0, bounds=bounds, budget=1000))


def test_outside_broadband_regime_is_infeasible():
    # An SQL frequency comparable to kappa leaves no valid candidate.
    plant = Plant(OscillatorParams(1e4, 1e10), eta=0.8, kappa=1e3)
    with pytest.raises(InfeasibleError):
        optimize_purity(OptimizationProblem(plant, 100.0, budget=1000))


def test_too_many_seeds_rejected():
    with pytest.raises(DomainError):
        optimize_purity(OptimizationProblem(PLANT, 1.0, budget=1000), seeds=[[0, 0, 0, 0]] * 3)


def test_unsorted_grid_rejected():
    with pytest.raises(DomainError):
        sweep_cooperativity(PLANT, [1.0, 0.5])


def test_free_angle_never_worse(cooperativity_sweep):
    free, phase, res = (cooperativity_sweep[m].purity for m in (FREE, PHASE, RESONANT))
    assert np.all(free >= phase)
    assert np.all(phase >= res)


def test_optima_are_stable_physical_and_angle_stationary(cooperativity_sweep):
    for mode in (FREE, PHASE, RESONANT):
        for p in cooperativity_sweep[mode].points:
            assert check_stability(p.system).stable
            assert 0.0 < p.purity < math.sqrt(PLANT.eta)
            if mode == FREE:
                assert p.theta == pytest.approx(optimal_angle(p.system), abs=1e-3)
            else:
                assert p.theta == pytest.approx(math.pi / 2, abs=1e-15)
            if mode == RESONANT:
                assert p.delta == 0.0


def test_purity_grows_with_cooperativity(cooperativity_sweep):
    mu = cooperativity_sweep[FREE].purity
    assert np.all(np.diff(mu) >= -1e-9)


def test_corner_and_detuning_trends(cooperativity_sweep):
    pts = cooperativity_sweep[FREE].points
    lo, hi = pts[0], pts[-1]
    assert lo.omega_h / lo.omega_sql0 > hi.omega_h / hi.omega_sql0
    assert lo.omega_l / lo.omega_sql0 > hi.omega_l / hi.omega_sql0
    assert abs(lo.delta) < abs(hi.delta)


def test_warm_start_never_loses_to_cold_restart(cooperativity_sweep):
    for i in (3, 9, 14):
        warm = cooperativity_sweep[FREE].points[i]
        cold = optimize_purity(OptimizationProblem(PLANT, warm.cq_sql, FREE, budget=10_000))
        assert warm.purity >= cold.purity - 1e-6


def test_sweep_is_reproducible(cooperativity_sweep):
    again = sweep_cooperativity(PLANT, np.logspace(-2, 2, 15)[:3], modes=(FREE, PHASE, RESONANT), budget=10_000)
    for mode in again:
        for a, b in zip(again[mode].points, cooperativity_sweep[mode].points):
            assert a.coords == b.coords
