"""Exact mutation engine for acyclic sign-skew-symmetric exchange matrices.

The package is organized in five layers. `matrices` holds exchange matrices,
matrix mutation and structural predicates. `laurent` is an exact integer
Laurent-polynomial arithmetic. `quivers` builds finite truncations of the
labeled covering quiver, mutates whole label orbits, and folds back to
matrices. `seeds` expands cluster variables and verifies positivity,
F-polynomial and Laurentness properties. `bridge` ties a matrix seed to a
covering-quiver seed and verifies that mutation commutes with covering and
with the projection of cluster variables.

The most used names are re-exported here; the submodules remain the
authoritative API.
"""

from .bridge import (
    UnfoldedSeedPair,
    orbit_mutate_seed,
    pi,
    square_embedding,
    unfolded_seed_pair,
    verify_covering_commutation,
    verify_pi_commutation,
)
from .laurent import InexactDivisionError, LaurentPoly, LaurentRing
from .matrices import (
    ExchangeMatrix,
    format_matrix,
    fuzz_totality,
    is_acyclic,
    is_connected,
    is_sign_skew_symmetric,
    is_skew_symmetrizable,
    mutate,
    parse_matrix,
    principal_extension,
)
from .quivers import (
    FrontierExhaustedError,
    LabeledQuiver,
    build_unfolding,
    fold,
    orbit_mutate,
    read_snapshot,
    to_dot,
    write_snapshot,
)
from .reports import Failure, VerificationReport
from .seeds import (
    Seed,
    ExpansionBudgetError,
    expand,
    f_polynomial,
    initial_seed,
    mutate_seed,
    verify_fpolynomials,
    verify_laurent_adjacent,
    verify_positivity,
)

__version__ = "0.1.0"

__all__ = [
    "ExchangeMatrix",
    "ExpansionBudgetError",
    "Failure",
    "FrontierExhaustedError",
    "InexactDivisionError",
    "LabeledQuiver",
    "LaurentPoly",
    "LaurentRing",
    "Seed",
    "UnfoldedSeedPair",
    "VerificationReport",
    "build_unfolding",
    "expand",
    "f_polynomial",
    "fold",
    "format_matrix",
    "fuzz_totality",
    "initial_seed",
    "is_acyclic",
    "is_connected",
    "is_sign_skew_symmetric",
    "is_skew_symmetrizable",
    "mutate",
    "mutate_seed",
    "orbit_mutate",
    "orbit_mutate_seed",
    "parse_matrix",
    "pi",
    "principal_extension",
    "read_snapshot",
    "square_embedding",
    "to_dot",
    "unfolded_seed_pair",
    "verify_covering_commutation",
    "verify_fpolynomials",
    "verify_laurent_adjacent",
    "verify_pi_commutation",
    "verify_positivity",
    "write_snapshot",
]
