"""Poisson-type summation formulas and crystalline measures from pairs of exponential polynomials."""

from .errors import *  # noqa: F401,F403
from .exppoly import (
    ExpPoly,
    StripBounds,
    add,
    derivative,
    evaluate,
    example1_phi,
    from_trig,
    make_exp_poly,
    strip_bounds,
)
from .dsl import format_poly, parse_poly_dsl
from .zerofinder import Rect, ZeroSet, count_zeros_rect, find_zeros, min_abs_derivative, refine_zero, separation
from .spectrum import (
    Spectrum,
    SpectrumSide,
    coeff_sup_profile,
    compute_spectrum,
    expand_lower,
    expand_upper,
    growth_profile,
    merge_spectrum,
)
from .measure import (
    CrystallineMeasurePair,
    Example1Report,
    atom_coefficients,
    build_measure_pair,
    check_subs,
    example1_analysis,
    progression_scan,
)
from .verifier import GaussianTest, VerificationReport, eval_test, transform_test, verify_formula, verify_suite

__version__ = "0.1.0"
