"""Elementwise thresholding operators: hard, soft, and firm (MCP prox).

All three operators accept scalars or numpy arrays and apply entrywise.
Boundary conventions are frozen so tests are deterministic:

* hard thresholding keeps an entry only when ``|x| > zeta`` (strict), so
  ``|x| == zeta`` maps to 0;
* firm thresholding at ``|x| == upsilon * zeta`` returns ``x`` itself (the
  two branches of the min coincide there, so this is exact).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SHRINKAGE_KINDS = ("hard", "soft", "firm")


@dataclass(frozen=True)
class McpParams:
    """Threshold and concavity of the minimax concave penalty.

    zeta >= 0 is the threshold; upsilon > 1 controls concavity.  As
    upsilon -> 1+ the prox approaches hard thresholding, as upsilon -> inf
    it approaches soft thresholding.
    """

    zeta: float
    upsilon: float

    def __post_init__(self):
        if self.zeta < 0:
            raise ValueError(f"zeta must be nonnegative, got {self.zeta}")
        if not self.upsilon > 1:
            raise ValueError(f"upsilon must be > 1 strictly, got {self.upsilon}")


def _elementwise(x, values):
    """Return `values` shaped like the input: float for scalar input."""
    if np.ndim(x) == 0:
        return float(values)
    return values


def hard_threshold(x, zeta: float):
    """Keep entries with |x| > zeta, zero the rest (prox of the l0 count)."""
    if zeta < 0:
        raise ValueError(f"zeta must be nonnegative, got {zeta}")
    a = np.asarray(x, dtype=float)
    return _elementwise(x, np.where(np.abs(a) > zeta, a, 0.0))


def soft_threshold(x, zeta: float):
    """sign(x) * max(|x| - zeta, 0), the prox of the l1 norm."""
    if zeta < 0:
        raise ValueError(f"zeta must be nonnegative, got {zeta}")
    a = np.asarray(x, dtype=float)
    return _elementwise(x, np.sign(a) * np.maximum(np.abs(a) - zeta, 0.0))


def mcp_penalty(x, params: McpParams):
    """Minimax concave penalty value.

    Equals ``upsilon * zeta**2 / 2`` for ``|x| > upsilon * zeta`` and
    ``zeta * |x| - x**2 / (2 * upsilon)`` otherwise; continuous at the joint.
    """
    zeta, upsilon = params.zeta, params.upsilon
    a = np.abs(np.asarray(x, dtype=float))
    flat = upsilon * zeta**2 / 2.0
    ramp = zeta * a - a**2 / (2.0 * upsilon)
    return _elementwise(x, np.where(a > upsilon * zeta, flat, ramp))


def firm_threshold(x, params: McpParams):
    """Firm thresholding, the proximal mapping of the MCP.

    sign(x) * min(upsilon * max(|x| - zeta, 0) / (upsilon - 1), |x|):
    zero below zeta, identity above upsilon * zeta, linear ramp between.
    """
    zeta, upsilon = params.zeta, params.upsilon
    a = np.asarray(x, dtype=float)
    mag = np.abs(a)
    ramp = upsilon * np.maximum(mag - zeta, 0.0) / (upsilon - 1.0)
    return _elementwise(x, np.sign(a) * np.minimum(ramp, mag))


def apply_elementwise(M: np.ndarray, op: str, params) -> np.ndarray:
    """Apply one of the named operators entrywise to a matrix.

    `op` is "hard", "soft" (params: the scalar threshold zeta) or "firm"
    (params: an McpParams).  Shape is preserved.
    """
    M = np.asarray(M, dtype=float)
    if op == "hard":
        return hard_threshold(M, params)
    if op == "soft":
        return soft_threshold(M, params)
    if op == "firm":
        if not isinstance(params, McpParams):
            raise TypeError("firm thresholding takes an McpParams")
        return firm_threshold(M, params)
    raise ValueError(f"unknown operator {op!r}, expected one of {SHRINKAGE_KINDS}")


def make_shrinker(kind: str, upsilon: float | None = None):
    """Build a (matrix, zeta) -> matrix shrinkage callback.

    Used by the solver loop and the unrolled network, where the threshold
    changes every step but the operator (and its concavity) is fixed.
    """
    if kind == "hard":
        return hard_threshold
    if kind == "soft":
        return soft_threshold
    if kind == "firm":
        if upsilon is None:
            raise ValueError("firm shrinkage requires upsilon")
        # Validate the concavity once rather than on every call.
        McpParams(0.0, upsilon)

        def firm(x, zeta):
            return firm_threshold(x, McpParams(zeta, upsilon))

        return firm
    raise ValueError(f"unknown shrinkage {kind!r}, expected one of {SHRINKAGE_KINDS}")
