"""Exact correlation bounds for order statistics from finite populations."""

from .bounds import (
    alpha_beta,
    covariance_bound_check,
    hdg_discrete_bound,
    rational_p_reduction_bound,
    rational_R,
    sigma_from_deltas,
    sigma_terrell_hahn,
    terrell_discrete_bound,
    tsm_bound,
)
from .hahn import HahnBasis, build_basis, fourier_coefficients, leading_coefficients, reconstruct
from .maxcorr import maximal_correlation, perturbation_check, renyi_functional, w_polynomial
from .optimize import default_quartic_params, minimize_quartic, quartic_value, search_same_g
from .populations import (
    OrderStatJoint,
    Population,
    conditional_expectation,
    lattice_population,
    make_population,
    order_stat_joint,
    rho_order_stats,
)

__version__ = "0.1.0"
