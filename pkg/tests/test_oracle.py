import ast
import math
from pathlib import Path

import numpy as np
import pytest

import springcool.oracle.quadrature as quadrature
from conftest import make_system
from springcool.errors import ConvergenceError, DomainError, InstabilityError
from springcool.oracle import integrate_variances, verify_closed_form
from springcool.oracle.compare import random_configurations, verify_suite
from springcool.quantum_noise import phonon_budget
from springcool.spectra import STRUCTURAL


def test_bare_oscillator_is_lorentzian():
    # No feedback gain and no detuning: a weakly damped oscillator in a bath.
    sys = make_system(q0=1e9, nth0=1e3, gfb=0.0)  # linewidth 5e-10
    b = phonon_budget(sys)
    expected = b.n_th_eff + b.n_ba + 0.5
    for tol in (1e-9, 1e-12):
        q = integrate_variances(sys, tol=tol)
        assert q.x_var == pytest.approx(expected, rel=max(tol, 1e-14))
        assert q.p_var == pytest.approx(expected, rel=max(tol, 1e-14))


@pytest.mark.parametrize("name", ["bench", "bench_detuned"])
def test_half_line_doubling_matches_full_line(name, request):
    sys = request.getfixturevalue(name)
    half = integrate_variances(sys, tol=1e-12)
    full = integrate_variances(sys, tol=1e-12, full_line=True)
    assert half.x_var == pytest.approx(full.x_var, rel=1e-11)
    assert half.p_var == pytest.approx(full.p_var, rel=1e-11)


@pytest.mark.parametrize("name", ["bench", "bench_detuned"])
def test_tolerance_halving_stays_within_error_estimate(name, request):
    sys = request.getfixturevalue(name)
    coarse = integrate_variances(sys, tol=1e-8)
    fine = integrate_variances(sys, tol=5e-9)
    # Allow for the last bit of rounding when the estimate itself is tiny.
    slack = 1e-14
    assert abs(fine.x_var - coarse.x_var) <= coarse.abs_err_estimate[0] + slack * coarse.x_var
    assert abs(fine.p_var - coarse.p_var) <= coarse.abs_err_estimate[1] + slack * coarse.p_var


def test_report_marks_convergence(bench):
    q = integrate_variances(bench, tol=1e-9)
    assert q.converged
    assert q.rel_err_estimate < 1e-9
    assert q.n_evals > 0


def test_momentum_grows_with_low_pass_corner():
    # Without the low-pass roll-off the fed imprecision makes <dp^2> diverge.
    wls = np.array([1e8, 3e8, 1e9])
    p = [integrate_variances(make_system(omega_l=wl, gfb=1e4)).p_var for wl in wls]
    slope = np.polyfit(np.log(wls), np.log(p), 1)[0]
    assert slope == pytest.approx(1.0, abs=1e-2)


def test_structural_mismatch_grows_as_quality_drops():
    gaps = []
    for q0 in (1e8, 1e6, 1e4, 1e3):
        sys = make_system(q0=q0, nth0=1e4)
        frozen = integrate_variances(sys)
        structural = integrate_variances(sys, damping=STRUCTURAL, omega_min=1e-6)
        gaps.append(abs(structural.x_var / frozen.x_var - 1.0))
    assert all(b > a for a, b in zip(gaps, gaps[1:]))
    assert gaps[0] < 1e-8 < gaps[-1]


def test_structural_integrand_needs_lower_cutoff(bench):
    with pytest.raises((DomainError, ValueError)):
        integrate_variances(bench, damping=STRUCTURAL)


def test_unstable_configuration_refused():
    with pytest.raises(InstabilityError):
        integrate_variances(make_system(delta=0.5, gfb=0.0))


@pytest.mark.parametrize("tol", [1e-13, 1e-2])
def test_tolerance_range_enforced(bench, tol):
    with pytest.raises(DomainError):
        integrate_variances(bench, tol=tol)


def test_budget_exhaustion_reports_partial_sums(bench):
    with pytest.raises(ConvergenceError) as info:
        integrate_variances(bench, budget=50)
    partial = info.value.partial
    assert partial is not None and not partial.converged
    assert partial.n_evals > 50


def test_verification_record(bench_detuned):
    rec = verify_closed_form(bench_detuned)
    assert rec.max_rel < 1e-6
    assert rec.oracle.converged


def test_suite_is_seeded():
    a = random_configurations(5, seed=42)
    b = random_configurations(5, seed=42)
    assert a == b
    assert a != random_configurations(5, seed=43)


def test_small_suite_agrees():
    assert verify_suite(10, seed=9).max_rel < 1e-6


def _imported_modules(path):
    tree = ast.parse(Path(path).read_text())
    names = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            names.update(a.name for a in node.names)
        elif isinstance(node, ast.ImportFrom):
            names.add(node.module or "")
            names.update(f"{node.module}.{a.name}" for a in node.names)
    return names


def test_quadrature_is_independent_of_closed_forms():
    names = _imported_modules(quadrature.__file__)
    assert not any("closed_form" in n for n in names)
    source = Path(quadrature.__file__).read_text()
    assert "cooling_state" not in source
    assert "inverse_purity" not in source
    assert "lambda_coefficients" not in source


def test_no_closed_form_module_depends_on_the_oracle():
    root = Path(quadrature.__file__).parent.parent
    for name in ("closed_form.py", "spectra.py", "stability.py", "model.py", "quantum_noise.py"):
        assert not any("oracle" in n for n in _imported_modules(root / name))
