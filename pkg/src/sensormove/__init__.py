"""Randomized sensor reallocation on the unit interval and the unit square.

Simulation of the anchor, MV, CV1 and CV2 movement algorithms, an exact
assignment oracle for the planar transport cost, numeric checks of the
supporting beta-distribution inequalities, and a seeded experiment harness.
"""
from .beta import (
    BetaParams,
    MomentQuery,
    beta_pdf,
    binomial_lower_tail,
    incomplete_beta,
    lemma_sum_bound,
    max_positive_part_moment,
    positive_part_moment,
    series_integral_closed_form,
    series_integral_numeric,
    verify_lemma_first,
    verify_prohorov,
    verify_series_integral_identity,
)
from .geometry import (
    CandIParams,
    CIResult,
    DisplacementReport,
    Placement1D,
    Placement2D,
    displacement_report,
    verify_ci_1d,
    verify_ci_2d,
)
from .harness import (
    CIViolation,
    ExperimentConfig,
    FitResult,
    fit_scaling,
    oracle_scaling_2d,
    replicate_case2,
    run_experiment,
)
from .line import (
    CV1Params,
    MVParams,
    anchor_cost_leading_term,
    cv1_algorithm,
    move_to_anchors_1d,
    mv_algorithm,
)
from .matching import CostMatrix, hungarian, sorted_matching_cost_1d
from .rng import SeedSpec, sample_sorted_uniform_1d, sample_uniform_2d
from .square import CV2Params, GridAnchors, anchor_matching_cost_2d, cv2_algorithm, grid_anchors

__version__ = "0.1.0"
