"""Regenerate tests/data/golden_forward_trace.json.

Run after any intentional change to the forward pass's numerics; the test
suite compares traces at 1e-9, so incidental refactors should NOT need a
regen.  The file records its own generating configuration.
"""

import json
from pathlib import Path

import unrolled_rpca as u

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "golden_forward_trace.json"

case = u.SynthCase(d=50, r=2, alpha=0.1, c=1.0, seed=2024)
triple = u.gen_case(case)
params = u.default_params((case.d, case.d), layers=20)
_, _, trace = u.forward(triple.M_star, case.r, params)

OUT.write_text(
    json.dumps(
        {
            "case": {"d": case.d, "r": case.r, "alpha": case.alpha,
                     "c": case.c, "seed": case.seed},
            "params": {"beta": params.beta, "gamma": params.gamma,
                       "upsilon": params.upsilon, "layers": params.layers},
            "residuals": trace,
        },
        indent=2,
    )
    + "\n"
)
print(f"wrote {OUT} (final residual {trace[-1]:.3e})")
