import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import make_system
from springcool.model import gamma_structural, optical_spring
from springcool.oracle import random_configurations
from springcool.stability import characteristic_polynomial, characteristic_roots, check_stability


def test_resonant_readout_is_stable_for_any_gain():
    for gfb in (1e-6, 1.0, 1e6):
        rep = check_stability(make_system(gfb=gfb))
        assert rep.stable and rep.simplified_gain_bound == 0.0 and rep.gfb_min == 0.0


def test_blue_detuning_without_feedback_is_unstable_when_antidamping_wins():
    sys = make_system(delta=0.5, kappa=10.0, gfb=0.0)
    _, g_rp = optical_spring(sys.readout)
    rp2, _ = optical_spring(sys.readout)
    assert g_rp < -gamma_structural(sys.osc, math.sqrt(1 + rp2))
    rep = check_stability(sys)
    assert not rep.stable and "hurwitz" in rep.violated
    # Weak anti-damping is outweighed by intrinsic loss.
    weak = make_system(delta=0.5, kappa=1e12, gfb=0.0)
    assert check_stability(weak).stable


def test_minimum_gain_brackets_the_boundary():
    sys = make_system(delta=0.5, kappa=10.0, gfb=0.0)
    g = check_stability(sys).gfb_min
    assert 0 < g < math.inf
    assert check_stability(replace(sys, fb=replace(sys.fb, gfb=g * (1 + 1e-6)))).stable
    assert not check_stability(replace(sys, fb=replace(sys.fb, gfb=g * (1 - 1e-6)))).stable


@pytest.mark.parametrize("delta,kappa", [(0.5, 10.0), (1.0, 30.0), (0.2, 3.0)])
def test_simplified_gain_bound_agrees_when_feedback_band_is_wide(delta, kappa):
    # The one-line bound drops intrinsic damping and the static stiffness
    # relative to W_L^2; it is accurate when both are negligible.
    sys = make_system(q0=1e12, delta=delta, kappa=kappa, omega_h=5.0, omega_l=5e4, gfb=0.0)
    rep = check_stability(sys)
    assert rep.gfb_min == pytest.approx(rep.simplified_gain_bound, rel=1e-3)
    # With a narrow band the bound is off by an O(1) factor.
    narrow = make_system(q0=1e12, delta=delta, kappa=kappa, omega_h=5.0, omega_l=8.0, gfb=0.0)
    rep = check_stability(narrow)
    assert abs(rep.gfb_min / rep.simplified_gain_bound - 1) > 1e-2


def test_characteristic_polynomial_is_monic_cubic(bench):
    poly = characteristic_polynomial(bench)
    rep = check_stability(bench)
    assert poly[0] == 1.0 and len(poly) == 4
    assert poly[1] == pytest.approx(rep.margins["s1"], rel=1e-14)
    assert poly[2] == pytest.approx(rep.margins["s2"], rel=1e-14)
    assert poly[3] == pytest.approx(rep.margins["a3"], rel=1e-14)


def test_routh_hurwitz_matches_root_finding():
    configs = random_configurations(1000, seed=3, stable_only=False)
    verdicts = [check_stability(s).stable for s in configs]
    roots = [bool(np.all(characteristic_roots(s).real < 0)) for s in configs]
    assert verdicts == roots
    assert 50 < sum(verdicts) < 1000
