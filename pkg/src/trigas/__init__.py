"""Triangle gas toolkit for the one-dimensional long-range Ising chain.

Spin configurations with finitely many minus sites map bijectively to
finite triangle families; triangles group into contours by a separation
rule; contours carry energy lower bounds, a tree encoding built from a
square merging process, and entropy counts; a Metropolis sampler closes
the loop by measuring contour events against the series bound.
"""

from .bounds import (
    ConvexityReport,
    EntropyReport,
    WAlphaReport,
    convexity_check,
    convexity_margin,
    enumerate_G,
    iter_single_contours,
    walpha_scan,
)
from .contours import (
    DEFAULT_C,
    Contour,
    ContourPartition,
    PeierlsParams,
    PeierlsReport,
    SeparationCheck,
    WeightBoundReport,
    contour_dist,
    contour_weight,
    decompose,
    peierls_check,
    verify_c,
    weight_bound_check,
)
from .model import (
    ALPHA_PLUS,
    ExactEnergy,
    ModelParams,
    SpinConfiguration,
    coupling,
    exterior_coupling_sum,
    h_alpha,
    power_tail,
    relative_energy,
    relative_energy_exact,
    tail_sum,
    zeta_alpha,
)
from .sampler import (
    ChainResult,
    EventReport,
    SamplerConfig,
    SeriesReport,
    beta_threshold,
    contour_event_estimate,
    exact_boltzmann,
    peierls_series_bound,
    run_chain,
)
from .squares import (
    Arrow,
    ArrowReport,
    InternalConsistencyError,
    Square,
    SquareProcessTrace,
    StepOutcome,
    arrow_lemma_checks,
    run_square_process,
    square_dist,
    squares_init,
    step,
)
from .trees import (
    BlackNode,
    ContourTree,
    SphereNode,
    TreeReport,
    WhiteNode,
    extract_tree,
    tree_to_record,
    validate_tree_constraints,
)
from .triangles import (
    InterfaceList,
    Triangle,
    TriangleConfiguration,
    build_triangles,
    check_compatibility,
    conditional_energy,
    interface_points,
    spins_from_triangles,
    tri_dist,
    w_kernel,
    w_kernel_batch,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_PLUS",
    "Arrow",
    "ArrowReport",
    "BlackNode",
    "ChainResult",
    "Contour",
    "ContourPartition",
    "ContourTree",
    "ConvexityReport",
    "DEFAULT_C",
    "EntropyReport",
    "EventReport",
    "ExactEnergy",
    "InterfaceList",
    "InternalConsistencyError",
    "ModelParams",
    "PeierlsParams",
    "PeierlsReport",
    "SamplerConfig",
    "SeparationCheck",
    "SeriesReport",
    "SphereNode",
    "SpinConfiguration",
    "Square",
    "SquareProcessTrace",
    "StepOutcome",
    "TreeReport",
    "Triangle",
    "TriangleConfiguration",
    "WAlphaReport",
    "WeightBoundReport",
    "WhiteNode",
    "arrow_lemma_checks",
    "beta_threshold",
    "build_triangles",
    "check_compatibility",
    "conditional_energy",
    "contour_dist",
    "contour_event_estimate",
    "contour_weight",
    "convexity_check",
    "convexity_margin",
    "coupling",
    "decompose",
    "enumerate_G",
    "exact_boltzmann",
    "exterior_coupling_sum",
    "extract_tree",
    "h_alpha",
    "interface_points",
    "iter_single_contours",
    "peierls_check",
    "peierls_series_bound",
    "power_tail",
    "relative_energy",
    "relative_energy_exact",
    "run_chain",
    "run_square_process",
    "spins_from_triangles",
    "square_dist",
    "squares_init",
    "step",
    "tail_sum",
    "tree_to_record",
    "tri_dist",
    "validate_tree_constraints",
    "verify_c",
    "w_kernel",
    "w_kernel_batch",
    "walpha_scan",
    "weight_bound_check",
    "zeta_alpha",
]
