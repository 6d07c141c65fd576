"""Orthogonal polynomials on the unit circle: Szego recursion, Prufer
variables, and weighted log-integral sum rules for Bernstein-Szego measures."""

__version__ = "0.1.0"

from .verblunsky import VerblunskySequence, forward_difference, lp_norm, power_sequence, test_sequence
from .szego import (
    PolynomialPair,
    bernstein_szego_density,
    evaluate_pair,
    evaluate_phi,
    szego_polynomials,
    szego_step,
)
from .pruefer import (
    AbelInput,
    PrueferState,
    ResonanceError,
    abel_transform,
    log_density_limit,
    log_r_partial,
    oscillatory_sum,
    pruefer_step,
)
from .sumrule import (
    QuadratureGrid,
    SumRuleApproximant,
    ZEstimate,
    equivalence_experiment,
    exponent_fit,
    f_series_eval,
    szego_identity_m0,
    weight_poly_coeffs,
    z_integral,
)
