"""Random increasing k-trees: simulation, exact expected profiles and asymptotics."""

from .errors import (
    ConfigError,
    InconsistentSystemError,
    KTreeError,
    NonConvergenceError,
    ResourceGuardError,
)
from .ktree import (
    DEFAULT_SEED,
    BlackNode,
    KTree,
    TreeRepr,
    WhiteNode,
    apply_step,
    count_ktrees,
    enumerate_histories,
    from_tree_repr,
    grow_random,
    make_rng,
    new_root_clique,
    to_tree_repr,
)
from .profile import connectivity_profile, monte_carlo, root_distances, summary
from .exact import expected_profile_exact, root_degree_pmf
from .asymptotics import alpha_plus, lambda_spectrum
from .limitlaw import limit_law_series, limit_moments

__all__ = [
    "ConfigError", "InconsistentSystemError", "KTreeError", "NonConvergenceError", "ResourceGuardError",
    "DEFAULT_SEED", "BlackNode", "KTree", "TreeRepr", "WhiteNode", "apply_step", "count_ktrees",
    "enumerate_histories", "from_tree_repr", "grow_random", "make_rng", "new_root_clique", "to_tree_repr",
    "connectivity_profile", "monte_carlo", "root_distances", "summary",
    "expected_profile_exact", "root_degree_pmf", "alpha_plus", "lambda_spectrum",
    "limit_law_series", "limit_moments",
]
__version__ = "0.1.0"
