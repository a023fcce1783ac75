"""Seeded generators for low-rank + sparse test problems.

A triple is M* = L* + S* with L* = U V^T (U, V standard normal d x r) and
S* supported on cells sampled uniformly without replacement under a
per-row/per-column cap of floor(alpha * d) nonzeros; values are uniform on
[-c * mean|L*|, c * mean|L*|] with the expectation estimated empirically
from the generated L* itself.

The four benchmark settings vary sparsity and amplitude:

    case 1: alpha=0.1,  c=1      case 2: alpha=0.3, c=1
    case 3: alpha=0.01, c=1      case 4: alpha=0.1, c=10

Reproducibility: all draws come from numpy's PCG64 generator.  Sample i of
a dataset uses SeedSequence(case.seed, spawn_key=(i,)); a lone triple uses
SeedSequence(case.seed) directly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .matrix_io import load_matrix, save_matrix

# case id -> (alpha, c)
CASE_TABLE = {1: (0.1, 1.0), 2: (0.3, 1.0), 3: (0.01, 1.0), 4: (0.1, 10.0)}

MANIFEST_NAME = "manifest.json"


class SparsityError(ValueError):
    """The requested sparsity pattern is infeasible."""


@dataclass(frozen=True)
class SynthCase:
    """Generator configuration for square d x d instances."""

    d: int
    r: int
    alpha: float
    c: float
    seed: int

    def __post_init__(self):
        if self.r < 0 or self.r > self.d:
            raise ValueError(f"rank {self.r} invalid for d={self.d}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.c > 0:
            raise ValueError(f"c must be > 0, got {self.c}")

    @classmethod
    def standard(cls, case_id: int, d: int = 250, r: int = 2, seed: int = 0):
        """One of the four benchmark settings at the stated dimension."""
        if case_id not in CASE_TABLE:
            raise ValueError(f"unknown case {case_id}, expected one of 1-4")
        alpha, c = CASE_TABLE[case_id]
        return cls(d=d, r=r, alpha=alpha, c=c, seed=seed)


@dataclass
class SynthTriple:
    """Ground truth pair and its sum; `support` lists S*'s nonzero cells."""

    L_star: np.ndarray
    S_star: np.ndarray
    M_star: np.ndarray
    support: set


def gen_low_rank(d: int, r: int, rng: np.random.Generator) -> np.ndarray:
    """U V^T with standard normal factors; r=0 gives the zero matrix."""
    if r == 0:
        return np.zeros((d, d))
    U = rng.standard_normal((d, r))
    V = rng.standard_normal((d, r))
    return U @ V.T


def _sample_support(d: int, cap: int, target: int, rng: np.random.Generator):
    """Uniform draws without replacement, row and column counts capped.

    Each accepted cell is uniform over the currently feasible cells (row
    and column below cap, not yet chosen); uniform proposals over the full
    grid with rejection realize exactly that law cheaply.  When rejections
    pile up near the end we enumerate the feasible set instead.  Stops
    early if no feasible cell remains, so the fill can be partial.
    """
    chosen = np.zeros((d, d), dtype=bool)
    row_counts = np.zeros(d, dtype=int)
    col_counts = np.zeros(d, dtype=int)
    picked = []
    misses = 0
    while len(picked) < target:
        if misses < 200:
            i, j = rng.integers(0, d, size=2)
            if chosen[i, j] or row_counts[i] >= cap or col_counts[j] >= cap:
                misses += 1
                continue
        else:
            feasible = np.flatnonzero(
                (row_counts[:, None] < cap) & (col_counts[None, :] < cap) & ~chosen
            )
            if feasible.size == 0:
                break
            cell = int(rng.choice(feasible))
            i, j = divmod(cell, d)
        misses = 0
        chosen[i, j] = True
        row_counts[i] += 1
        col_counts[j] += 1
        picked.append((int(i), int(j)))
    return picked


def gen_sparse(
    d: int,
    alpha: float,
    c: float,
    L_star: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, set]:
    """Sparse matrix with capped support and amplitude tied to L*.

    Targets exactly floor(alpha*d) nonzeros per row and column (fewer only
    when the draw runs out of feasible cells).  Values are drawn as
    uniform(-1, 1) * (c * mean|L*|) so equal seeds at different c give
    entrywise proportional matrices.
    """
    cap = int(np.floor(alpha * d))
    if cap < 1:
        raise SparsityError(
            f"floor(alpha*d) = floor({alpha}*{d}) = 0: no feasible support"
        )
    mean_abs = float(np.mean(np.abs(L_star)))
    if mean_abs == 0.0:
        raise SparsityError("L_star is identically zero, amplitude undefined")
    cells = _sample_support(d, cap, cap * d, rng)
    # Scale by c last so equal seeds at different c are exactly proportional.
    values = rng.uniform(-1.0, 1.0, size=len(cells)) * mean_abs * c
    S = np.zeros((d, d))
    rows = [i for i, _ in cells]
    cols = [j for _, j in cells]
    S[rows, cols] = values
    return S, set(cells)


def gen_case(case: SynthCase) -> SynthTriple:
    """One (L*, S*, M*) triple from the case's own seed."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(case.seed)))
    L = gen_low_rank(case.d, case.r, rng)
    S, support = gen_sparse(case.d, case.alpha, case.c, L, rng)
    return SynthTriple(L_star=L, S_star=S, M_star=L + S, support=support)


def gen_dataset(
    case: SynthCase, total: int, train: int
) -> tuple[list[SynthTriple], list[SynthTriple]]:
    """`total` independent triples; the first `train` form the training split.

    Sample i uses the sub-seed SeedSequence(case.seed, spawn_key=(i,)), so
    datasets are reproducible and samples are independent streams.
    """
    if train > total:
        raise ValueError(f"train={train} exceeds total={total}")
    triples = []
    for i in range(total):
        seq = np.random.SeedSequence(case.seed, spawn_key=(i,))
        rng = np.random.Generator(np.random.PCG64(seq))
        L = gen_low_rank(case.d, case.r, rng)
        S, support = gen_sparse(case.d, case.alpha, case.c, L, rng)
        triples.append(SynthTriple(L_star=L, S_star=S, M_star=L + S, support=support))
    return triples[:train], triples[train:]


def save_dataset(
    out_dir,
    case: SynthCase,
    train: list[SynthTriple],
    test: list[SynthTriple],
) -> Path:
    """Persist a dataset as binary matrices plus a JSON manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for split, triples in (("train", train), ("test", test)):
        for i, t in enumerate(triples):
            for part, mat in (("M", t.M_star), ("L", t.L_star), ("S", t.S_star)):
                save_matrix(mat, out_dir / f"{split}_{i:04d}_{part}.bin", "binary")
    manifest = {
        "kind": "synthetic-dataset",
        "format": "rpca-binary-v1",
        "case": asdict(case),
        "total": len(train) + len(test),
        "train": len(train),
        "test": len(test),
        "file_pattern": "{split}_{index:04d}_{part}.bin",
    }
    with open(out_dir / MANIFEST_NAME, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return out_dir


def load_dataset(in_dir) -> tuple[SynthCase, list[SynthTriple], list[SynthTriple]]:
    """Load a dataset directory written by `save_dataset`."""
    in_dir = Path(in_dir)
    manifest_path = in_dir / MANIFEST_NAME
    if not manifest_path.exists():
        raise FileNotFoundError(f"no {MANIFEST_NAME} in {in_dir}")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    case = SynthCase(**manifest["case"])
    splits = {}
    for split, count in (("train", manifest["train"]), ("test", manifest["test"])):
        triples = []
        for i in range(count):
            parts = {
                part: load_matrix(in_dir / f"{split}_{i:04d}_{part}.bin", "binary")
                for part in ("M", "L", "S")
            }
            nz = np.argwhere(parts["S"] != 0.0)
            triples.append(
                SynthTriple(
                    L_star=parts["L"],
                    S_star=parts["S"],
                    M_star=parts["M"],
                    support={(int(i), int(j)) for i, j in nz},
                )
            )
        splits[split] = triples
    return case, splits["train"], splits["test"]
