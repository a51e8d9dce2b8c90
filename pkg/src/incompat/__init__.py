"""Incompatibility of triplets of two-outcome qubit observables."""
from .errors import *  # noqa: F401,F403
from .families import delta_perp, delta_y, perp_triplet, thresholds, y_triplet
from .fermat import ft_point, ft_sum
from .jm import GAMMA, anchors, gamma, jm_feasible_general, jm_margin, parent_povm_8, unbias
from .mur import (
    implement_optimal,
    mur_lower_bound,
    optimal_triplet,
    randomized_implementation,
    worst_case_state,
    worst_case_uncertainty,
)
from .optimizer import OptimizerOptions, brute_force_incompatibility, incompatibility, verify_candidate
from .qubit import Observable, Triplet, make_observable
from .symmetry import find_graded_symmetries, symmetrize
