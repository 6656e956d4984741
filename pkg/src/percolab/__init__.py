"""Percolation laboratory for random multigraphs with given degree sequences."""

from .distributions import (
    DegreeDistribution,
    DegreeSequence,
    PoissonDistribution,
    PoissonMixture,
    PowerLawDistribution,
    TableDistribution,
    ThinnedDistribution,
    factorial_moments,
    from_spec,
    load_spec,
    point_mass,
    sample_degree_sequence,
    size_biased_shift,
    thin,
    two_point,
)
from .multigraph import (
    Multigraph,
    components,
    configuration_model,
    graph_stats,
    is_simple,
    k_core,
)
from .percolation import (
    PercolationSpec,
    explode_bond,
    explode_site,
    percolate_direct,
    percolate_via_explosion,
    predict_exploded_profile,
)
from .giant import critical_expansion, giant_bond, giant_site, giant_threshold, solve_xi_base
from .kcore import (
    enumerate_transitions,
    h1_func,
    h_func,
    kcore_bond,
    kcore_site,
    kcore_threshold,
    phi_func,
)
from .bootstrap import bootstrap_predict, bootstrap_qc, core_correspondence_check, run_bootstrap
from .branching import BranchingModel, mc_tree_containment, pmax_recursion, survival_probability

__version__ = "0.1.0"
