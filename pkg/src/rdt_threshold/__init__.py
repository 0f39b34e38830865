"""Exact cost bounds for randomized evaluation of uniform read-once threshold formulae."""

from .bounds import gamma_exact, gamma_generic, largest_eigenvalue, report_andor, report_bounds
from .directional import delta_matrix, exact_cost, monte_carlo, run_directional
from .formula import FormulaSpec, enumerate_reluctant, evaluate, reluctant_counts, sample_reluctant
from .oracle import CostModel, check_shrink_inequality, optimal_expected_cost, optimal_tree_over_slice
from .pkn import p, p_eta, verify_pkn_properties

__version__ = "0.1.0"

__all__ = [
    "CostModel",
    "FormulaSpec",
    "check_shrink_inequality",
    "delta_matrix",
    "enumerate_reluctant",
    "evaluate",
    "exact_cost",
    "gamma_exact",
    "gamma_generic",
    "largest_eigenvalue",
    "monte_carlo",
    "optimal_expected_cost",
    "optimal_tree_over_slice",
    "p",
    "p_eta",
    "reluctant_counts",
    "report_andor",
    "report_bounds",
    "run_directional",
    "sample_reluctant",
    "verify_pkn_properties",
]
