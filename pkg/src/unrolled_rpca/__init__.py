"""Low-rank + sparse matrix decomposition by accelerated alternating
projections, with a fixed-depth unrolled variant whose two thresholding
scalars (beta, gamma) are learned from data through the firm-thresholding
(MCP prox) activation."""

from .linalg import (
    RankRBasis,
    TangentFactors,
    rank_projection,
    singular_values,
    structured_rank_projection,
    tangent_factors,
    tangent_projection,
    truncated_svd,
)
from .matrix_io import (
    load_matrix,
    read_pgm,
    save_matrix,
    stack_images,
    write_pgm,
)
from .metrics import (
    MetricsReport,
    compute_metrics,
    eps_L,
    eps_M,
    eps_S,
    eps_supp,
)
from .network import (
    UnrolledParams,
    default_params,
    forward,
    forward_equivalence_check,
)
from .shrinkage import (
    McpParams,
    apply_elementwise,
    firm_threshold,
    hard_threshold,
    mcp_penalty,
    soft_threshold,
)
from .solver import (
    DecompositionState,
    SolveResult,
    SolverConfig,
    default_beta,
    initialize,
    iterate,
    solve,
)
from .synth import (
    SynthCase,
    SynthTriple,
    gen_case,
    gen_dataset,
    gen_low_rank,
    gen_sparse,
    load_dataset,
    save_dataset,
)
from .training import (
    TrainConfig,
    TrainReport,
    TrainSample,
    fd_gradient,
    make_training_set,
    objective,
    relative_loss,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "DecompositionState",
    "McpParams",
    "MetricsReport",
    "RankRBasis",
    "SolveResult",
    "SolverConfig",
    "SynthCase",
    "SynthTriple",
    "TangentFactors",
    "TrainConfig",
    "TrainReport",
    "TrainSample",
    "UnrolledParams",
    "apply_elementwise",
    "compute_metrics",
    "default_beta",
    "default_params",
    "eps_L",
    "eps_M",
    "eps_S",
    "eps_supp",
    "fd_gradient",
    "firm_threshold",
    "forward",
    "forward_equivalence_check",
    "gen_case",
    "gen_dataset",
    "gen_low_rank",
    "gen_sparse",
    "hard_threshold",
    "initialize",
    "iterate",
    "load_dataset",
    "load_matrix",
    "make_training_set",
    "mcp_penalty",
    "objective",
    "rank_projection",
    "read_pgm",
    "relative_loss",
    "save_dataset",
    "save_matrix",
    "singular_values",
    "soft_threshold",
    "solve",
    "stack_images",
    "structured_rank_projection",
    "tangent_factors",
    "tangent_projection",
    "train",
    "truncated_svd",
    "write_pgm",
]
