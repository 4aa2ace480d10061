"""Numerical checks of the inequalities behind the DKG well-posedness theory."""
from .angles import (
    elliptic_angle_sides,
    hyperbolic_angle_sides,
    modulation_angle_sides,
    verify_angle_bound_16,
    verify_angle_equivalences,
)
from .bilinear import bilinear_constant_11, bilinear_constant_12, check_hypotheses, ratio_11, ratio_12
from .cone import (
    ConeIntegralSpec,
    EmptyConicWarning,
    cone_delta_integral,
    expected_cone_exponents,
    fit_cone_exponents,
    reference_weights,
)
from .nullform import nullform_sides, verify_nullform_13
from .products import product_estimate_check, validate_product
from .region import (
    RegionQuery,
    admissible_region,
    bilinear_violations,
    in_l2_region,
    l2_region_violations,
    near_one_violations,
    threshold_pair,
)
from .sampling import DegenerateSampleWarning, SampleConfig
from .scaling import expected_exponent, modulated_gaussian, scaling_check
from .transfer import free_wave, free_wave_mode, mixed_norm

__all__ = [
    "ConeIntegralSpec", "DegenerateSampleWarning", "EmptyConicWarning", "RegionQuery", "SampleConfig",
    "admissible_region", "bilinear_constant_11", "bilinear_constant_12", "bilinear_violations",
    "check_hypotheses", "cone_delta_integral", "elliptic_angle_sides", "expected_cone_exponents",
    "expected_exponent", "fit_cone_exponents", "free_wave", "free_wave_mode", "hyperbolic_angle_sides",
    "in_l2_region", "l2_region_violations", "mixed_norm", "modulated_gaussian", "modulation_angle_sides",
    "near_one_violations", "nullform_sides", "product_estimate_check", "ratio_11", "ratio_12",
    "reference_weights", "scaling_check", "threshold_pair", "validate_product", "verify_angle_bound_16",
    "verify_angle_equivalences", "verify_nullform_13",
]
