"""Exact verification of inclusion-exclusion identities for convex hulls.

Everything runs on exact rational arithmetic: hull membership, relative
interiors, face lattices and the identity checks are decided by rational
linear algebra and an exact simplex feasibility solver, so degenerate
configurations (collinear points, duplicated points, query points on
low-dimensional flats) are handled without tolerances.
"""

__version__ = "0.1.0"

from .exact import Rat, affine_rank, rat, vec
from .geometry import (AffineFlat, Configuration, EnumerationLimitError,
                       HypothesisError, affine_flat, configuration,
                       flat_meets_hull, flat_meets_relint, hull_contains,
                       hulls_intersect, is_clean_face, is_face,
                       is_r_general_position, is_vertex, relint_contains)
from .simplex import FeasibilitySystem, lp_feasible
from .faces import FaceRecord, enumerate_faces, f_vector, faces_meeting_flat, \
    faces_meeting_polytope
from .volumes import MCParams, external_angle, intrinsic_volume, \
    polytope_volume, triangulate
from .identities import (IdentityReport, b_star_sum_check, b_sum_check,
                         b_vectors, buchta_pointwise_check, cowan_affine_check,
                         cowan_check, dual_cowan_check,
                         euler_intersection_check, euler_touch_check,
                         face_count_identity_check, intrinsic_identity_check,
                         simplex_lift_crosscheck)
from .stochastic import (Distribution, TrialSummary, buchta_distribution_check,
                         expectation_identity_trial, sample_config)

__all__ = [
    "AffineFlat", "Configuration", "Distribution", "EnumerationLimitError",
    "FaceRecord", "FeasibilitySystem", "HypothesisError", "IdentityReport",
    "MCParams", "Rat", "TrialSummary", "affine_flat", "affine_rank",
    "b_star_sum_check", "b_sum_check", "b_vectors", "buchta_distribution_check",
    "buchta_pointwise_check", "configuration", "cowan_affine_check",
    "cowan_check", "dual_cowan_check", "enumerate_faces",
    "euler_intersection_check", "euler_touch_check", "external_angle",
    "f_vector", "face_count_identity_check", "faces_meeting_flat",
    "faces_meeting_polytope", "flat_meets_hull", "flat_meets_relint",
    "hull_contains", "hulls_intersect", "intrinsic_identity_check",
    "intrinsic_volume", "is_clean_face", "is_face", "is_r_general_position",
    "is_vertex", "lp_feasible", "polytope_volume", "rat", "relint_contains",
    "sample_config", "simplex_lift_crosscheck", "triangulate", "vec",
]
