"""Explicit subcubic graphs with large packing chromatic number: constructions,
exact invariants and checkable lower-bound certificates."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    UNREACHABLE,
    DistanceMatrix,
    Graph,
    VertexMap,
    all_pairs_distances,
    bfs_distances,
    build_graph,
    check_map_isomorphism,
    degree_profile,
    diameter,
    induced_subgraph,
    power_graph,
)
from .families import (  # noqa: E402
    LabeledFamilyGraph,
    build_G0,
    build_Gk,
    build_H,
    build_perfect_tree,
    decompose_halves,
)
from .packing import (  # noqa: E402
    PackingColoring,
    SolverConfig,
    SolveResult,
    Status,
    counting_lower_bound,
    decide_packing_colorable,
    greedy_upper_bound,
    max_i_packing,
    packing_chromatic_number,
    validate_packing_coloring,
)
from .certify import (  # noqa: E402
    Certificate,
    Claim,
    check_certificate,
    certify_chi_rho_lower,
    check_midpoint_property,
    disjoint_copies_bound,
    singleton_color_threshold,
    verify_lemma,
)
