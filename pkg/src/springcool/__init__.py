"""Quantum-limited feedback cooling of a structurally damped oscillator.

Units throughout are hbar = m = Omega_0 = 1.
"""

from .closed_form import (
    CCoefficients,
    CoolingResult,
    NeffTerms,
    c_coefficients,
    ground_state_thresholds,
    optimal_angle,
    optimal_spring,
    phase_readout_neff,
    purity_closed_form,
    variances_closed_form,
)
from .errors import (
    ConfigParseError,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    InfeasibleError,
    InstabilityError,
    SignalBlindError,
    SpringcoolError,
)
from .kernels import BACKEND
from .model import (
    FeedbackParams,
    OscillatorParams,
    ReadoutParams,
    SystemParams,
    effective_angle,
    effective_oscillator,
    feedback_spring,
    gamma_structural,
    n_thermal,
    optical_spring,
)
from .optimizer import OptimizationProblem, Plant, cq_to_coupling, optimize_purity, sweep_cooperativity
from .quantum_noise import NoisePair, PhononBudget, phonon_budget
from .spectra import LambdaCoefficients, SpectrumPoint, chi_eff_inv, displacement_psd, lambda_coefficients
from .stability import StabilityReport, check_stability

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CCoefficients",
    "ConfigParseError",
    "ConfigurationError",
    "ConvergenceError",
    "CoolingResult",
    "DomainError",
    "FeedbackParams",
    "InfeasibleError",
    "InstabilityError",
    "LambdaCoefficients",
    "NeffTerms",
    "NoisePair",
    "OptimizationProblem",
    "OscillatorParams",
    "PhononBudget",
    "Plant",
    "ReadoutParams",
    "SignalBlindError",
    "SpectrumPoint",
    "SpringcoolError",
    "StabilityReport",
    "SystemParams",
    "c_coefficients",
    "check_stability",
    "chi_eff_inv",
    "cq_to_coupling",
    "displacement_psd",
    "effective_angle",
    "effective_oscillator",
    "feedback_spring",
    "gamma_structural",
    "ground_state_thresholds",
    "lambda_coefficients",
    "n_thermal",
    "optical_spring",
    "optimal_angle",
    "optimal_spring",
    "optimize_purity",
    "phase_readout_neff",
    "phonon_budget",
    "purity_closed_form",
    "sweep_cooperativity",
    "variances_closed_form",
]
