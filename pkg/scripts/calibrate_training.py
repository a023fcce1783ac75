"""Calibration driver: the full Case-1 train/eval pipeline at d=250.

Runs the firm and soft networks through training and measures the
test-split errors against the classical solver, mirroring the shape of
the acceptance checks.  Slow (~15 min); used to pin the trainer defaults
and the expected margins before freezing them into tests.
"""

import time

import numpy as np

import unrolled_rpca as u
from unrolled_rpca.training import TrainConfig, train


def evaluate(label, test, produce):
    eL, eS, eM, esupp = [], [], [], []
    for t in test:
        L, S = produce(t.M_star)
        eL.append(u.eps_L(t.L_star, L))
        eS.append(u.eps_S(t.S_star, S))
        eM.append(u.eps_M(t.M_star, L, S))
        esupp.append(u.eps_supp(t.S_star, S))
    print(
        f"{label:16s} eps_L {np.mean(eL):.3e}  eps_S {np.mean(eS):.3e}  "
        f"eps_M {np.mean(eM):.3e}  eps_supp {np.mean(esupp):.3e}"
    )
    return np.mean(eL), np.mean(eS), np.mean(esupp)


def main():
    d = 250
    case = u.SynthCase.standard(1, d=d, seed=11)
    t0 = time.perf_counter()
    train_split, test_split = u.gen_dataset(case, 300, 180)
    print(f"generated 300 samples in {time.perf_counter()-t0:.0f}s")
    data = u.make_training_set(train_split, case.r)
    init = u.default_params((d, d))

    t0 = time.perf_counter()
    rep_firm = train(data, TrainConfig(r=case.r), init)
    print(
        f"firm : beta {rep_firm.initial_beta:.4f}->{rep_firm.final_beta:.4f}, "
        f"gamma 0.70->{rep_firm.final_gamma:.4f}, "
        f"loss {rep_firm.epoch_losses[0]:.2e}->{rep_firm.epoch_losses[-1]:.2e}, "
        f"{time.perf_counter()-t0:.0f}s"
    )

    t0 = time.perf_counter()
    rep_soft = train(data, TrainConfig(r=case.r, shrinkage="soft"), init)
    print(
        f"soft : beta {rep_soft.initial_beta:.4f}->{rep_soft.final_beta:.4f}, "
        f"gamma 0.70->{rep_soft.final_gamma:.4f}, "
        f"loss {rep_soft.epoch_losses[0]:.2e}->{rep_soft.epoch_losses[-1]:.2e}, "
        f"{time.perf_counter()-t0:.0f}s"
    )

    cfg = u.SolverConfig.for_shape((d, d), case.r)

    def classical(M):
        res = u.solve(M, cfg)
        return res.L, res.S

    def unrolled(params, shrinkage):
        def produce(M):
            L, S, _ = u.forward(M, case.r, params, shrinkage=shrinkage)
            return L, S

        return produce

    t0 = time.perf_counter()
    acc = evaluate("accaltproj", test_split, classical)
    firm = evaluate("unrolled-firm", test_split, unrolled(rep_firm.final_params(), "firm"))
    soft = evaluate("unrolled-soft", test_split, unrolled(rep_soft.final_params(), "soft"))
    print(f"eval in {time.perf_counter()-t0:.0f}s")
    print(f"criterion2: eps_L firm<acc: {firm[0] < acc[0]}, eps_S firm<acc: {firm[1] < acc[1]}")
    ratio = soft[2] / firm[2] if firm[2] > 0 else float("inf")
    print(f"criterion4: supp ratio soft/firm = {ratio:.1f} (need >= 10)")


if __name__ == "__main__":
    main()
