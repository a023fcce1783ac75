"""Fixed-depth unrolled variant of the alternating-projections solver.

The network is the solver's initialization plus exactly `layers` copies of
its iteration, with every hard-thresholding step replaced by the firm
(MCP-prox) operator at the same threshold schedule.  The two scalars
(beta, gamma) are shared across layers and are the only learnable
parameters; the concavity upsilon stays fixed.  There is no early
stopping: depth is part of the model, so trained parameters are specific
to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import ensure_matrix
from .shrinkage import SHRINKAGE_KINDS, make_shrinker
from .solver import SolverNumericalError, _initialize, _iterate

# Clamp box for the learnable scalars; training projects onto it.
BETA_BOUNDS = (1e-6, 1.0)
GAMMA_BOUNDS = (0.05, 0.99)

DEFAULT_UPSILON = 1.05
DEFAULT_LAYERS = 20


class ThresholdBandError(ValueError):
    """An entry fell inside (zeta, upsilon*zeta), where the firm and hard
    operators genuinely differ; the hard-equivalence check is undefined."""


@dataclass
class UnrolledParams:
    """Learnable thresholding scalars plus the fixed network shape.

    beta and gamma live in the clamp boxes above; upsilon > 1 is the firm
    threshold concavity; `layers` counts iteration layers after the
    initialization stage (0 is allowed and returns the initialization
    pair); beta_init defaults to beta.
    """

    beta: float
    gamma: float
    upsilon: float = DEFAULT_UPSILON
    layers: int = DEFAULT_LAYERS
    beta_init: float | None = None

    def __post_init__(self):
        if self.beta_init is None:
            self.beta_init = self.beta
        lo, hi = BETA_BOUNDS
        if not lo <= self.beta <= hi:
            raise ValueError(f"beta={self.beta} outside [{lo}, {hi}]")
        lo, hi = GAMMA_BOUNDS
        if not lo <= self.gamma <= hi:
            raise ValueError(f"gamma={self.gamma} outside [{lo}, {hi}]")
        if not self.upsilon > 1:
            raise ValueError(f"upsilon must be > 1, got {self.upsilon}")
        if self.layers < 0:
            raise ValueError(f"layers must be >= 0, got {self.layers}")
        if not self.beta_init > 0:
            raise ValueError(f"beta_init must be > 0, got {self.beta_init}")


def default_params(shape, **overrides) -> UnrolledParams:
    """Untrained parameters for a d1 x d2 problem (the solver's defaults)."""
    from .solver import default_beta

    overrides.setdefault("beta", default_beta(shape))
    overrides.setdefault("gamma", 0.7)
    return UnrolledParams(**overrides)


class ForwardResult(NamedTuple):
    L: np.ndarray
    S: np.ndarray
    residuals: list[float]


def forward(
    M: np.ndarray,
    r: int,
    params: UnrolledParams,
    shrinkage: str = "firm",
) -> ForwardResult:
    """Run the network: initialization plus `params.layers` fixed layers.

    `shrinkage` selects the activation ("firm" is the model; "soft" and
    "hard" exist for ablations).  Returns the decomposition and the
    relative-residual trace, one entry per stage.
    """
    M = ensure_matrix(M)
    if r > min(M.shape):
        raise ValueError(f"r={r} exceeds min(shape)={min(M.shape)}")
    if shrinkage not in SHRINKAGE_KINDS:
        raise ValueError(f"unknown shrinkage {shrinkage!r}")
    shrink = make_shrinker(shrinkage, params.upsilon)
    try:
        state = _initialize(M, r, params.beta_init, params.beta, shrink)
    except np.linalg.LinAlgError as exc:
        raise SolverNumericalError(f"initialization: {exc}") from exc
    trace = [state.residual]
    for layer in range(params.layers):
        try:
            state = _iterate(state, M, r, params.beta, params.gamma, shrink)
        except SolverNumericalError as exc:
            raise SolverNumericalError(f"layer {layer + 1}: {exc}") from exc
        trace.append(state.residual)
    return ForwardResult(L=state.L, S=state.S, residuals=trace)


def forward_equivalence_check(
    M: np.ndarray,
    r: int,
    params: UnrolledParams,
    tol: float = 1e-6,
) -> bool:
    """Check that at upsilon -> 1+ the network reproduces the hard path.

    Runs the firm network and the hard-thresholding iteration for the same
    number of stages (no early stopping) and compares outputs entrywise.
    The two operators agree exactly outside the open band
    (zeta, upsilon*zeta); if any entry lands inside it at any stage the
    comparison is meaningless and ThresholdBandError is raised so callers
    can skip.
    """
    if not 1 < params.upsilon <= 1 + 1e-6:
        raise ValueError(
            f"equivalence check needs upsilon just above 1, got {params.upsilon}"
        )
    M = ensure_matrix(M)

    def guarded(kind):
        shrink = make_shrinker(kind, params.upsilon)

        def shrink_and_check(X, zeta):
            mag = np.abs(X)
            inside = (mag > zeta) & (mag < params.upsilon * zeta)
            if np.any(inside):
                raise ThresholdBandError(
                    f"{int(np.count_nonzero(inside))} entries inside "
                    f"({zeta}, {params.upsilon * zeta})"
                )
            return shrink(X, zeta)

        return shrink_and_check

    firm_state = _initialize(M, r, params.beta_init, params.beta, guarded("firm"))
    hard_state = _initialize(M, r, params.beta_init, params.beta, guarded("hard"))
    for _ in range(params.layers):
        firm_state = _iterate(
            firm_state, M, r, params.beta, params.gamma, guarded("firm")
        )
        hard_state = _iterate(
            hard_state, M, r, params.beta, params.gamma, guarded("hard")
        )
    return bool(
        np.max(np.abs(firm_state.L - hard_state.L), initial=0.0) <= tol
        and np.max(np.abs(firm_state.S - hard_state.S), initial=0.0) <= tol
    )
