"""Floating-point evaluation, quadrature and numeric identity checks."""
from .checks import (
    contour_residue, elliptic_law_residual, residue_and_elliptic_check, thm1_rhs_numeric,
    thm2_rhs_numeric, verify_thm1_numeric, verify_thm2_numeric,
)
from .evaluate import (
    DEFAULT_TAU, EvalContext, appell_eval, eta_eval, partial_theta_eval, quotient_eval,
    quotient_laurent, theta_derivs, theta_eval,
)
from .quadrature import QuadratureResult, QuadratureSpec, fourier_quadrature
from .quantum import (
    CocycleProbe, StandardForm, cocycle_probe, radial_limit, reduce_partial_theta_standard,
    rows_to_csv,
)

__all__ = [
    "DEFAULT_TAU", "EvalContext", "QuadratureResult", "QuadratureSpec", "CocycleProbe",
    "StandardForm", "appell_eval", "cocycle_probe", "contour_residue", "elliptic_law_residual",
    "eta_eval", "fourier_quadrature", "partial_theta_eval", "quotient_eval", "quotient_laurent",
    "radial_limit", "reduce_partial_theta_standard", "residue_and_elliptic_check", "rows_to_csv",
    "theta_derivs", "theta_eval", "thm1_rhs_numeric", "thm2_rhs_numeric", "verify_thm1_numeric",
    "verify_thm2_numeric",
]
