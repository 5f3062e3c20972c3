"""Coarse tree decompositions and induced Menger certificates over layered set families."""

from .errors import Inconclusive, ParseError, PathOverflow, SamplingFailure, ValidationError
from .graph import (
    Graph,
    MinorModel,
    QuotientMap,
    connected_components,
    enumerate_induced_paths,
    from_edge_list,
    induced_subgraph,
    is_anticomplete,
    quotient_by_components,
    separates,
    to_edge_list,
    verify_minor_model,
)
from .family import (
    LayeredFamily,
    OrderedPartition,
    ancestral_path,
    build_layered_family,
    degeneracy_layering,
    downward_closure,
    upward_closure,
    verify_witnessing,
)
from .lp import (
    restrict_balanced_dual,
    restrict_dual_to_upward_minimal,
    solve_ab_lp,
    solve_balanced_lp,
)
from .rounding import greedy_cover, round_ab_separator, round_balanced_separator
from .sampling import sample_dense_subgraph, sample_path_multiset, split_balanced_to_two_sided
from .partition import (
    bfs_layer_split,
    classify_parts,
    extract_ktt_model,
    greedy_four_radius_partition,
    star_edge_partition,
)
from .decomposition import (
    build_tree_decomposition,
    coarse_treewidth_pipeline,
    coverability,
    distance_r_independence,
    validate_tree_decomposition,
)
from .menger import (
    aux_class_menger,
    brute_force_anticomplete_packing,
    cleaning_step,
    coarse_menger_pipeline,
    degree_dependent_menger,
    g_bound,
    menger_max_flow,
    recursive_induced_menger,
)
from .certificates import verify_certificate
from .generators import gen_graph

__version__ = "0.1.0"
