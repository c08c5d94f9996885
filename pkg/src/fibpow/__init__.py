"""Certified solver suite for the equation F_n + F_m = y^a.

Verifies that for every fixed y > 1 outside {2, 3, 4, 6, 10} the
equation has at most one solution with n > m > 1, a > 0, by combining
certified linear-forms-in-logarithms bounds, exact lattice and
continued-fraction reduction, and exact integer enumeration.
"""

from .arbreal import CertifiedReal, PrecisionExhausted, log_rational
from .linforms import (
    bravo_luca_n_bound,
    gap_bound,
    laurent_lower_bound,
    matveev_coefficient,
    matveev_lower_bound,
    verify_constants,
)
from .pipeline import (
    BoundState,
    InstanceReport,
    StageFailed,
    StepFailed,
    derive_two_solution_bounds,
    enumerate_candidates,
    global_reduction,
    prove_theorem,
    solve_for_y,
    solve_instance,
    verify_solution,
)
from .quadfield import (
    ALPHA,
    SQRT5,
    QuadElement,
    SolutionTriple,
    fibonacci,
    lucas,
    perfect_power_decompose,
    tau,
    zeckendorf,
)
from .reduction import (
    ReductionFailed,
    baker_davenport,
    build_kappa_list,
    cf_gap_bound,
    continued_fraction,
    de_weger_reduce,
    lll_reduce,
)

__version__ = "1.0.0"

__all__ = [
    "ALPHA",
    "SQRT5",
    "BoundState",
    "CertifiedReal",
    "InstanceReport",
    "PrecisionExhausted",
    "QuadElement",
    "ReductionFailed",
    "SolutionTriple",
    "StageFailed",
    "StepFailed",
    "baker_davenport",
    "bravo_luca_n_bound",
    "build_kappa_list",
    "cf_gap_bound",
    "continued_fraction",
    "de_weger_reduce",
    "derive_two_solution_bounds",
    "enumerate_candidates",
    "fibonacci",
    "gap_bound",
    "global_reduction",
    "laurent_lower_bound",
    "lll_reduce",
    "log_rational",
    "lucas",
    "matveev_coefficient",
    "matveev_lower_bound",
    "perfect_power_decompose",
    "prove_theorem",
    "solve_for_y",
    "solve_instance",
    "tau",
    "verify_constants",
    "verify_solution",
    "zeckendorf",
]
