"""Recovery-error metrics for a low-rank + sparse decomposition.

Four errors against ground truth: absolute Frobenius distances for the two
components, the relative reconstruction error of their sum, and the
fraction of entries whose zero/nonzero status disagrees between the true
and recovered sparse parts.  Support membership uses exact zeros by
default because every sparse matrix this library produces comes out of a
thresholding operator; a tolerance override exists for external data.

CSV serialization uses the frozen column order

    method,case,seed,eps_L,eps_S,eps_M,eps_supp

with empty strings for absent tags.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

CSV_COLUMNS = ("method", "case", "seed", "eps_L", "eps_S", "eps_M", "eps_supp")


def _check_same_shape(A, B, names):
    if A.shape != B.shape:
        raise ValueError(f"{names}: shape mismatch {A.shape} vs {B.shape}")


def eps_L(L_star: np.ndarray, L_out: np.ndarray) -> float:
    """Frobenius distance to the true low-rank part."""
    L_star, L_out = np.asarray(L_star, float), np.asarray(L_out, float)
    _check_same_shape(L_star, L_out, "eps_L")
    return float(np.linalg.norm(L_star - L_out))


def eps_S(S_star: np.ndarray, S_out: np.ndarray) -> float:
    """Frobenius distance to the true sparse part."""
    S_star, S_out = np.asarray(S_star, float), np.asarray(S_out, float)
    _check_same_shape(S_star, S_out, "eps_S")
    return float(np.linalg.norm(S_star - S_out))


def eps_M(M_star: np.ndarray, L_out: np.ndarray, S_out: np.ndarray) -> float:
    """Relative reconstruction error ||M* - L - S||_F / ||M*||_F."""
    M_star = np.asarray(M_star, float)
    L_out, S_out = np.asarray(L_out, float), np.asarray(S_out, float)
    _check_same_shape(M_star, L_out, "eps_M")
    _check_same_shape(M_star, S_out, "eps_M")
    norm = np.linalg.norm(M_star)
    if norm == 0.0:
        raise ValueError("eps_M undefined for a zero-norm M*")
    return float(np.linalg.norm(M_star - L_out - S_out) / norm)


def eps_supp(S_star: np.ndarray, S_out: np.ndarray, tol: float = 0.0) -> float:
    """Fraction of the d*d cells whose support membership disagrees.

    Requires square input (the normalization is 1/d**2).  An entry counts
    as nonzero when |x| > tol; the default tol=0 is exact-zero semantics.
    """
    S_star, S_out = np.asarray(S_star, float), np.asarray(S_out, float)
    _check_same_shape(S_star, S_out, "eps_supp")
    d1, d2 = S_star.shape
    if d1 != d2:
        raise ValueError(f"eps_supp requires a square matrix, got {S_star.shape}")
    in_star = np.abs(S_star) > tol
    in_out = np.abs(S_out) > tol
    return float(np.count_nonzero(in_star != in_out) / (d1 * d2))


@dataclass
class MetricsReport:
    """The four errors for one decomposition, plus free-form labels."""

    eps_L: float
    eps_S: float
    eps_M: float
    eps_supp: float
    tags: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "eps_L": self.eps_L,
            "eps_S": self.eps_S,
            "eps_M": self.eps_M,
            "eps_supp": self.eps_supp,
            "tags": self.tags,
        }
        return json.dumps(payload, indent=2)

    def csv_row(self) -> str:
        """One CSV line in the frozen CSV_COLUMNS order."""
        cells = [
            str(self.tags.get("method", "")),
            str(self.tags.get("case", "")),
            str(self.tags.get("seed", "")),
            repr(self.eps_L),
            repr(self.eps_S),
            repr(self.eps_M),
            repr(self.eps_supp),
        ]
        return ",".join(cells)


def compute_metrics(
    L_star: np.ndarray,
    S_star: np.ndarray,
    M_star: np.ndarray,
    L_out: np.ndarray,
    S_out: np.ndarray,
    tags: dict | None = None,
    supp_tol: float = 0.0,
) -> MetricsReport:
    """All four errors in one report."""
    return MetricsReport(
        eps_L=eps_L(L_star, L_out),
        eps_S=eps_S(S_star, S_out),
        eps_M=eps_M(M_star, L_out, S_out),
        eps_supp=eps_supp(S_star, S_out, tol=supp_tol),
        tags=dict(tags or {}),
    )
