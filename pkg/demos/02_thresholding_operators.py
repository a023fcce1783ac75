"""Compare the three elementwise shrinkage operators.

Hard thresholding kills everything below the threshold and passes the rest
through unchanged; soft thresholding also shrinks what it keeps (a bias of
zeta on every survivor); firm thresholding ramps between the two, is exact
above upsilon*zeta, and is the proximal mapping of the minimax concave
penalty, which is what makes it usable as a trainable activation.
"""

import numpy as np

from unrolled_rpca import McpParams, firm_threshold, hard_threshold, mcp_penalty, soft_threshold

zeta, upsilon = 1.0, 2.0
params = McpParams(zeta=zeta, upsilon=upsilon)
xs = np.linspace(-3.5, 3.5, 15)

print(f"zeta={zeta}, upsilon={upsilon} (firm is identity beyond "
      f"upsilon*zeta={upsilon * zeta})")
print(f"{'x':>8} {'hard':>8} {'soft':>8} {'firm':>8} {'MCP(x)':>8}")
for x in xs:
    print(
        f"{x:8.3f} {hard_threshold(x, zeta):8.3f} {soft_threshold(x, zeta):8.3f} "
        f"{firm_threshold(x, params):8.3f} {mcp_penalty(x, params):8.3f}"
    )

# firm thresholding really is the prox of the MCP: check one point by grid search
x = 1.4
grid = np.arange(-2 * abs(x), 2 * abs(x), 1e-4)
objective = 0.5 * (grid - x) ** 2 + mcp_penalty(grid, params)
print(f"\nprox check at x={x}: grid argmin {grid[np.argmin(objective)]:.4f} "
      f"vs firm_threshold {firm_threshold(x, params):.4f}")

# limits: upsilon -> 1+ recovers hard, upsilon -> inf recovers soft
near_hard = McpParams(zeta, 1 + 1e-6)
near_soft = McpParams(zeta, 1e6)
x = 2.5
print(f"limits at x={x}: firm(upsilon->1) = {firm_threshold(x, near_hard):.6f} "
      f"(hard gives {hard_threshold(x, zeta):.6f}), "
      f"firm(upsilon->inf) = {firm_threshold(x, near_soft):.6f} "
      f"(soft gives {soft_threshold(x, zeta):.6f})")
