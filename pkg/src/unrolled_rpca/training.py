"""Learning (beta, gamma) by projected gradient descent on relative errors.

The criterion sums, over the training set, the relative squared errors of
the network's two outputs against their targets:

    f(beta, gamma) = sum_q  ||L^q - L_t^q||_F^2 / ||L_t^q||_F^2
                          + ||S^q - S_t^q||_F^2 / ||S_t^q||_F^2

with (L^q, S^q) the forward pass on M^q.  Since only two scalars are
learned, gradients come from central finite differences (four forward
sweeps per step) rather than differentiating through the SVD/QR kernels;
steps are clamped to the parameter box.  Targets are either the generating
ground truth or the converged output of the classical solver.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .network import BETA_BOUNDS, GAMMA_BOUNDS, UnrolledParams, forward
from .solver import SolverConfig, solve
from .synth import SynthTriple

TARGET_MODES = ("ground-truth", "from-solver")


class TrainSample(NamedTuple):
    M: np.ndarray
    L_target: np.ndarray
    S_target: np.ndarray


class Gradient(NamedTuple):
    d_beta: float
    d_gamma: float
    one_sided_beta: bool = False
    one_sided_gamma: bool = False


@dataclass
class TrainConfig:
    """Optimization settings.

    Learning rates apply to the per-sample mean of the objective gradient
    (the summed gradient divided by the batch size), so the defaults
    transfer across dataset sizes.  They are large because the loss is a
    sum of squared relative errors, typically 1e-6 and below: gamma needs
    a step big enough to cross from the initialization into the flat
    high-accuracy basin in a few epochs, after which the gradient
    collapses and the iterate parks.  `learning_rate`, when given,
    overrides both per-parameter rates.  `batch` is "full" (one clamped
    step per epoch) or "per-sample" (one step per sample, order shuffled
    by `seed`).
    """

    r: int
    epochs: int = 8
    learning_rate: float | None = None
    lr_beta: float = 10.0
    lr_gamma: float = 2000.0
    fd_step: float = 0.05
    batch: str = "full"
    seed: int = 0
    shrinkage: str = "firm"
    # Per-step displacement caps (gradient clipping): the loss spans many
    # orders of magnitude, so a raw step at a cliff edge would catapult a
    # parameter across its whole box.  The caps shrink by step_decay each
    # epoch, the standard diminishing-step treatment for a piecewise-smooth
    # objective; it lets the iterate cross plateaus early and settle at a
    # minimum instead of bouncing around it.
    max_step_beta: float = 0.02
    max_step_gamma: float = 0.15
    step_decay: float = 0.5

    def __post_init__(self):
        if self.learning_rate is not None:
            if self.learning_rate < 0:
                raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
            self.lr_beta = self.learning_rate
            self.lr_gamma = self.learning_rate
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not 0 < self.fd_step < 1e-1:
            raise ValueError(f"fd_step must lie in (0, 0.1), got {self.fd_step}")
        if self.batch not in ("full", "per-sample"):
            raise ValueError(f"batch must be 'full' or 'per-sample', got {self.batch}")
        if self.lr_beta < 0 or self.lr_gamma < 0:
            raise ValueError("learning rates must be >= 0")
        if self.max_step_beta <= 0 or self.max_step_gamma <= 0:
            raise ValueError("step caps must be > 0")
        if not 0 < self.step_decay <= 1:
            raise ValueError(f"step_decay must lie in (0, 1], got {self.step_decay}")


@dataclass
class TrainReport:
    """Per-epoch losses and the parameter trajectory endpoints."""

    epoch_losses: list[float]
    initial_beta: float
    initial_gamma: float
    final_beta: float
    final_gamma: float
    upsilon: float
    layers: int
    wall_time: float = 0.0
    fd_fallbacks: list[str] = field(default_factory=list)

    def final_params(self, beta_init: float | None = None) -> UnrolledParams:
        return UnrolledParams(
            beta=self.final_beta,
            gamma=self.final_gamma,
            upsilon=self.upsilon,
            layers=self.layers,
            beta_init=beta_init,
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "epoch_losses": self.epoch_losses,
                "initial": {"beta": self.initial_beta, "gamma": self.initial_gamma},
                "final": {"beta": self.final_beta, "gamma": self.final_gamma},
                "upsilon": self.upsilon,
                "layers": self.layers,
                "wall_time_s": self.wall_time,
                "fd_fallbacks": self.fd_fallbacks,
            },
            indent=2,
        )


def relative_loss(X_hat: np.ndarray, X: np.ndarray) -> float:
    """||X_hat - X||_F^2 / ||X||_F^2; the second argument is the reference."""
    X_hat, X = np.asarray(X_hat, float), np.asarray(X, float)
    if X_hat.shape != X.shape:
        raise ValueError(f"shape mismatch {X_hat.shape} vs {X.shape}")
    denom = float(np.linalg.norm(X)) ** 2
    if denom == 0.0:
        raise ValueError("undefined relative loss: zero-norm reference")
    return float(np.linalg.norm(X_hat - X)) ** 2 / denom


def objective(
    params: UnrolledParams,
    data: list[TrainSample],
    r: int,
    shrinkage: str = "firm",
) -> float:
    """Summed relative losses of the forward pass over the training set."""
    if not data:
        raise ValueError("objective needs a nonempty training set")
    total = 0.0
    for q, sample in enumerate(data):
        try:
            L_out, S_out, _ = forward(sample.M, r, params, shrinkage=shrinkage)
            total += relative_loss(L_out, sample.L_target)
            total += relative_loss(S_out, sample.S_target)
        except ValueError as exc:
            raise ValueError(f"sample {q}: {exc}") from exc
    return total


def _with(params: UnrolledParams, beta: float, gamma: float) -> UnrolledParams:
    return UnrolledParams(
        beta=beta,
        gamma=gamma,
        upsilon=params.upsilon,
        layers=params.layers,
        beta_init=None if params.beta_init == params.beta else params.beta_init,
    )


def _difference(f: Callable[[float], float], x: float, h: float, lo: float, hi: float):
    """Central difference, falling back to one-sided at the box edge."""
    if x + h <= hi and x - h >= lo:
        return (f(x + h) - f(x - h)) / (2 * h), False
    if x + h > hi:
        return (f(x) - f(x - h)) / h, True
    return (f(x + h) - f(x)) / h, True


def fd_gradient(
    params: UnrolledParams,
    data: list[TrainSample],
    r: int,
    fd_step: float,
    shrinkage: str = "firm",
    objective_fn: Callable[[float, float], float] | None = None,
) -> Gradient:
    """Finite-difference gradient of the objective in (beta, gamma).

    Steps are relative: h_beta = fd_step * beta, h_gamma = fd_step * gamma.
    `objective_fn(beta, gamma)` overrides the training objective (used by
    tests to inject analytic surrogates).
    """
    if objective_fn is None:
        def objective_fn(beta, gamma):
            return objective(_with(params, beta, gamma), data, r, shrinkage)

    beta, gamma = params.beta, params.gamma
    d_beta, one_sided_beta = _difference(
        lambda b: objective_fn(b, gamma), beta, fd_step * beta, *BETA_BOUNDS
    )
    d_gamma, one_sided_gamma = _difference(
        lambda g: objective_fn(beta, g), gamma, fd_step * gamma, *GAMMA_BOUNDS
    )
    return Gradient(d_beta, d_gamma, one_sided_beta, one_sided_gamma)


def _clamp(x: float, bounds) -> float:
    return min(max(x, bounds[0]), bounds[1])


def train(
    data: list[TrainSample],
    cfg: TrainConfig,
    init: UnrolledParams,
) -> TrainReport:
    """Projected gradient descent from `init`; deterministic given cfg.seed.

    Full-batch mode takes one step per epoch on the summed gradient;
    per-sample mode steps once per sample in an epoch-shuffled order.
    Epoch losses are recorded before each epoch's updates.
    """
    if not data:
        raise ValueError("train needs a nonempty training set")
    t0 = time.perf_counter()
    beta, gamma = init.beta, init.gamma
    losses: list[float] = []
    fallbacks: list[str] = []
    order_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed)))

    def step(batch, epoch, beta, gamma):
        grad = fd_gradient(
            _with(init, beta, gamma), batch, cfg.r, cfg.fd_step, cfg.shrinkage
        )
        if grad.one_sided_beta:
            fallbacks.append(f"epoch {epoch}: one-sided beta difference")
        if grad.one_sided_gamma:
            fallbacks.append(f"epoch {epoch}: one-sided gamma difference")
        # Rates act on the per-sample mean gradient; caps shrink per epoch.
        scale = 1.0 / len(batch)
        shrink = cfg.step_decay**epoch
        cap_beta = cfg.max_step_beta * shrink
        cap_gamma = cfg.max_step_gamma * shrink
        d_beta = _clamp(cfg.lr_beta * scale * grad.d_beta, (-cap_beta, cap_beta))
        d_gamma = _clamp(cfg.lr_gamma * scale * grad.d_gamma, (-cap_gamma, cap_gamma))
        beta = _clamp(beta - d_beta, BETA_BOUNDS)
        gamma = _clamp(gamma - d_gamma, GAMMA_BOUNDS)
        return beta, gamma

    for epoch in range(cfg.epochs):
        losses.append(
            objective(_with(init, beta, gamma), data, cfg.r, cfg.shrinkage)
        )
        if cfg.batch == "full":
            beta, gamma = step(data, epoch, beta, gamma)
        else:
            for q in order_rng.permutation(len(data)):
                beta, gamma = step([data[q]], epoch, beta, gamma)
    return TrainReport(
        epoch_losses=losses,
        initial_beta=init.beta,
        initial_gamma=init.gamma,
        final_beta=beta,
        final_gamma=gamma,
        upsilon=init.upsilon,
        layers=init.layers,
        wall_time=time.perf_counter() - t0,
        fd_fallbacks=fallbacks,
    )


def make_training_set(
    triples: list[SynthTriple],
    r: int,
    targets: str = "ground-truth",
    solver_epsilon: float = 1e-8,
    solver_max_iters: int = 200,
) -> list[TrainSample]:
    """Build (M, L_target, S_target) samples from generated triples.

    "ground-truth" uses the generating pair; "from-solver" emulates
    targets produced by a classical algorithm by running the
    alternating-projections solver to a tight tolerance.
    """
    if targets not in TARGET_MODES:
        raise ValueError(f"unknown target mode {targets!r}, expected {TARGET_MODES}")
    samples = []
    for t in triples:
        if targets == "ground-truth":
            samples.append(TrainSample(M=t.M_star, L_target=t.L_star, S_target=t.S_star))
        else:
            cfg = SolverConfig.for_shape(
                t.M_star.shape, r, epsilon=solver_epsilon, max_iters=solver_max_iters
            )
            result = solve(t.M_star, cfg)
            samples.append(TrainSample(M=t.M_star, L_target=result.L, S_target=result.S))
    return samples
