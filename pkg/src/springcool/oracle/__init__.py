"""Brute-force verification by adaptive quadrature of the displacement spectrum."""

from .compare import (
    SuiteReport,
    VerificationRecord,
    random_configurations,
    verify_closed_form,
    verify_suite,
)
from .quadrature import QuadratureReport, integrate_variances

__all__ = [
    "QuadratureReport",
    "SuiteReport",
    "VerificationRecord",
    "integrate_variances",
    "random_configurations",
    "verify_closed_form",
    "verify_suite",
]
