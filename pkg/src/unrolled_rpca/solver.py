"""Accelerated alternating projections for low-rank + sparse decomposition.

One iteration projects M - S_k onto the tangent space of the rank-r
manifold at L_k, truncates the result to rank r through the 2r x 2r core
(see `linalg`), and hard-thresholds M - L_{k+1} at

    zeta_{k+1} = beta * (sigma_{r+1}(P_{k+1}) + gamma**(k+1) * sigma_1(P_{k+1}))

so the threshold tracks the residual spectrum while the gamma term decays
geometrically.  Initialization thresholds M itself at
beta_init * sigma_1(M), truncates, and thresholds once more.

The same stage functions drive the unrolled network, which swaps the hard
thresholding for the firm (MCP) operator; they accept the shrinkage
callback as a parameter for that reason.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    RankRBasis,
    ensure_matrix,
    structured_rank_projection,
    tangent_factors,
)
from .shrinkage import hard_threshold


class SolverNumericalError(RuntimeError):
    """A linear-algebra kernel failed; message carries the iteration index."""


def default_beta(shape) -> float:
    """Default threshold scale 1 / (2 * (d1*d2)**(1/4))."""
    d1, d2 = shape
    return 1.0 / (2.0 * (d1 * d2) ** 0.25)


@dataclass
class SolverConfig:
    """Inputs of the alternating-projections solver.

    beta_init defaults to beta (a single scale for the initialization and
    loop thresholds); epsilon is the relative-error stopping tolerance.
    """

    r: int
    beta: float
    epsilon: float = 1e-6
    beta_init: float | None = None
    gamma: float = 0.7
    max_iters: int = 50

    def __post_init__(self):
        if self.beta_init is None:
            self.beta_init = self.beta
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if not (self.beta > 0 and self.beta_init > 0):
            raise ValueError("beta and beta_init must be > 0")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")

    @classmethod
    def for_shape(cls, shape, r: int, **overrides) -> "SolverConfig":
        """Config with the default beta for a d1 x d2 problem."""
        overrides.setdefault("beta", default_beta(shape))
        return cls(r=r, **overrides)


@dataclass
class DecompositionState:
    """Iterates (L_k, S_k), the rank-r basis of L_k, and diagnostics.

    `residual` is ||M - L - S||_F / ||M||_F (0 when M is all zero);
    `zeta` and `gamma_term` record the threshold used to produce S and
    its geometrically decaying component.
    """

    L: np.ndarray
    S: np.ndarray
    basis: RankRBasis
    k: int
    residual: float
    zeta: float = 0.0
    gamma_term: float = 0.0


@dataclass
class SolveResult:
    state: DecompositionState
    residuals: list[float] = field(default_factory=list)
    converged: bool = False

    @property
    def L(self) -> np.ndarray:
        return self.state.L

    @property
    def S(self) -> np.ndarray:
        return self.state.S


def relative_residual(M: np.ndarray, L: np.ndarray, S: np.ndarray) -> float:
    """||M - L - S||_F / ||M||_F, defined as 0 for an all-zero M."""
    norm = np.linalg.norm(M)
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(M - L - S) / norm)


def _initialize(M, r, beta_init, beta, shrink) -> DecompositionState:
    """Initialization stages shared by the solver and the unrolled network."""
    sigma1_M = float(np.linalg.svd(M, compute_uv=False)[0])
    zeta_init = beta_init * sigma1_M
    S_init = shrink(M, zeta_init)
    A = M - S_init
    # one SVD serves both the rank-r truncation and sigma_1(M - S_init)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    basis = RankRBasis(U=U[:, :r].copy(), sigma=s[:r].copy(), V=Vt[:r].T.copy())
    L0 = basis.to_matrix()
    zeta0 = beta * float(s[0])
    S0 = shrink(M - L0, zeta0)
    return DecompositionState(
        L=L0,
        S=S0,
        basis=basis,
        k=0,
        residual=relative_residual(M, L0, S0),
        zeta=zeta0,
        gamma_term=0.0,
    )


def _iterate(state, M, r, beta, gamma, shrink) -> DecompositionState:
    """One tangent-projection / truncation / thresholding update."""
    k_next = state.k + 1
    try:
        factors = tangent_factors(M - state.S, state.basis)
        core_spectrum = np.linalg.svd(factors.core, compute_uv=False)
        basis = structured_rank_projection(factors, state.basis, r)
    except np.linalg.LinAlgError as exc:
        raise SolverNumericalError(f"iteration {k_next}: {exc}") from exc
    sigma1 = float(core_spectrum[0])
    sigma_r1 = float(core_spectrum[r]) if core_spectrum.size > r else 0.0
    gamma_term = beta * gamma**k_next * sigma1
    zeta = beta * sigma_r1 + gamma_term
    L = basis.to_matrix()
    S = shrink(M - L, zeta)
    return DecompositionState(
        L=L,
        S=S,
        basis=basis,
        k=k_next,
        residual=relative_residual(M, L, S),
        zeta=zeta,
        gamma_term=gamma_term,
    )


def initialize(M: np.ndarray, cfg: SolverConfig) -> DecompositionState:
    """Run the hard-thresholding initialization, returning the k=0 state."""
    M = ensure_matrix(M)
    if cfg.r > min(M.shape):
        raise ValueError(f"r={cfg.r} exceeds min(shape)={min(M.shape)}")
    return _initialize(M, cfg.r, cfg.beta_init, cfg.beta, hard_threshold)


def iterate(
    state: DecompositionState, M: np.ndarray, cfg: SolverConfig
) -> DecompositionState:
    """Advance the decomposition by one hard-thresholding iteration."""
    return _iterate(state, M, cfg.r, cfg.beta, cfg.gamma, hard_threshold)


def solve(M: np.ndarray, cfg: SolverConfig) -> SolveResult:
    """Iterate until the relative residual drops below cfg.epsilon.

    Stops at cfg.max_iters without raising; inspect `converged` and the
    residual trace (one entry per state, starting at initialization).
    """
    M = ensure_matrix(M)
    state = initialize(M, cfg)
    trace = [state.residual]
    while state.residual >= cfg.epsilon and state.k < cfg.max_iters:
        state = iterate(state, M, cfg)
        trace.append(state.residual)
    return SolveResult(
        state=state, residuals=trace, converged=state.residual < cfg.epsilon
    )
