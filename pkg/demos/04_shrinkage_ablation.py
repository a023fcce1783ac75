"""Swap the network's activation and watch the sparse estimate degrade.

The firm operator passes surviving entries through exactly, so the sparse
component's values come out unbiased.  Soft thresholding shrinks every
survivor by the threshold, and that bias accumulates through the layers:
same support, visibly worse values.
"""

import numpy as np

import unrolled_rpca as u

d = 64
case = u.SynthCase.standard(1, d=d, seed=3)
_, test_triples = u.gen_dataset(case, 30, 10)
params = u.default_params((d, d))

rows = []
for kind in ("firm", "soft", "hard"):
    eS, esupp = [], []
    for t in test_triples:
        _, S, _ = u.forward(t.M_star, case.r, params, shrinkage=kind)
        eS.append(u.eps_S(t.S_star, S))
        esupp.append(u.eps_supp(t.S_star, S))
    rows.append((kind, np.mean(eS), np.mean(esupp)))

print(f"{'activation':>10} {'mean eps_S':>12} {'mean eps_supp':>14}")
for kind, eS, esupp in rows:
    print(f"{kind:>10} {eS:12.4e} {esupp:14.4e}")
print("\nfirm vs soft eps_S ratio:", f"{rows[1][1] / rows[0][1]:.1f}x")
