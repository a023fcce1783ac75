"""Command-line harness tying generation, solving, training and evaluation
into reproducible runs.

Subcommands:

    gen        write a synthetic dataset directory (matrices + manifest)
    decompose  split one matrix into low-rank and sparse parts
    train      learn (beta, gamma) on a dataset's training split
    eval       aggregate recovery errors over a dataset's test split
    faces      stack PGM images, decompose at rank 1, write image outputs

Every run writes a JSON manifest (command, full configuration snapshot,
tool version, wall time, artifact paths) sufficient to reproduce it.
Exit codes: 0 success, 1 finished-but-not-converged (outputs still
written), 2 usage or input error.  The evaluation worker pool is sized by
--workers, defaulting to the UNROLLED_RPCA_WORKERS environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .matrix_io import (
    ImageFormatError,
    MatrixFormatError,
    load_matrix,
    save_matrix,
    stack_images,
    write_pgm,
)
from .metrics import compute_metrics, eps_M
from .network import DEFAULT_LAYERS, DEFAULT_UPSILON, UnrolledParams, forward
from .solver import SolverConfig, default_beta, solve
from .synth import SynthCase, SparsityError, gen_dataset, load_dataset, save_dataset
from .training import TrainConfig, make_training_set, train

WORKERS_ENV = "UNROLLED_RPCA_WORKERS"


class InputError(ValueError):
    """Bad user input surfaced as exit code 2."""


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _write_manifest(path: Path, command: str, config: dict, artifacts, wall: float):
    manifest = {
        "command": command,
        "version": __version__,
        "config": config,
        "artifacts": [str(a) for a in artifacts],
        "wall_time_s": wall,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _load_params_file(path, layers, upsilon) -> UnrolledParams:
    with open(path) as fh:
        payload = json.load(fh)
    final = payload.get("final", payload)
    return UnrolledParams(
        beta=final["beta"],
        gamma=final["gamma"],
        upsilon=payload.get("upsilon", upsilon),
        layers=layers if layers is not None else payload.get("layers", DEFAULT_LAYERS),
    )


def _resolve_case(args) -> SynthCase:
    if args.case is not None:
        if args.case not in (1, 2, 3, 4):
            raise InputError(f"unknown case {args.case}, expected 1-4")
        return SynthCase.standard(args.case, d=args.d, r=args.r, seed=args.seed)
    if args.alpha is None or args.c is None:
        raise InputError("need either --case or both --alpha and --c")
    return SynthCase(d=args.d, r=args.r, alpha=args.alpha, c=args.c, seed=args.seed)


def cmd_gen(args) -> int:
    t0 = time.perf_counter()
    case = _resolve_case(args)
    if args.train > args.total:
        raise InputError(f"--train {args.train} exceeds --total {args.total}")
    train_split, test_split = gen_dataset(case, args.total, args.train)
    out = save_dataset(args.out, case, train_split, test_split)
    _write_manifest(
        out / "run_manifest.json",
        "gen",
        {
            "case": asdict(case),
            "total": args.total,
            "train": args.train,
        },
        [out],
        time.perf_counter() - t0,
    )
    print(f"wrote {args.total} samples ({args.train} train) to {out}")
    return 0


def _decompose_one(M, args):
    """Run the selected method; returns (L, S, residuals, converged, extra)."""
    if args.method == "accaltproj":
        cfg = SolverConfig(
            r=args.r,
            beta=args.beta if args.beta is not None else default_beta(M.shape),
            beta_init=args.beta_init,
            gamma=args.gamma if args.gamma is not None else 0.7,
            epsilon=args.epsilon,
            max_iters=args.max_iters,
        )
        result = solve(M, cfg)
        return result.L, result.S, result.residuals, result.converged, {
            "iterations": result.state.k,
            "config": {
                "r": cfg.r,
                "beta": cfg.beta,
                "beta_init": cfg.beta_init,
                "gamma": cfg.gamma,
                "epsilon": cfg.epsilon,
                "max_iters": cfg.max_iters,
            },
        }
    if args.params is not None:
        params = _load_params_file(args.params, args.layers, args.upsilon)
    else:
        params = UnrolledParams(
            beta=args.beta if args.beta is not None else default_beta(M.shape),
            gamma=args.gamma if args.gamma is not None else 0.7,
            upsilon=args.upsilon,
            layers=args.layers if args.layers is not None else DEFAULT_LAYERS,
            beta_init=args.beta_init,
        )
    L, S, residuals = forward(M, args.r, params, shrinkage=args.shrinkage)
    return L, S, residuals, True, {
        "layers": params.layers,
        "config": {
            "r": args.r,
            "beta": params.beta,
            "gamma": params.gamma,
            "upsilon": params.upsilon,
            "layers": params.layers,
            "shrinkage": args.shrinkage,
        },
    }


def cmd_decompose(args) -> int:
    t0 = time.perf_counter()
    M = load_matrix(args.matrix, args.format)
    L, S, residuals, converged, extra = _decompose_one(M, args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_matrix(L, out / "L.bin", "binary")
    save_matrix(S, out / "S.bin", "binary")
    report = {
        "method": args.method,
        "residuals": residuals,
        "final_residual": residuals[-1],
        "converged": converged,
        **extra,
    }
    if args.truth_dir is not None:
        truth = Path(args.truth_dir)
        L_star = load_matrix(truth / "L.bin", "binary")
        S_star = load_matrix(truth / "S.bin", "binary")
        metrics = compute_metrics(
            L_star, S_star, M, L, S, tags={"method": args.method}
        )
        report["metrics"] = json.loads(metrics.to_json())
    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    _write_manifest(
        out / "run_manifest.json",
        "decompose",
        {"matrix": str(args.matrix), **extra.get("config", {})},
        [out / "L.bin", out / "S.bin", out / "report.json"],
        time.perf_counter() - t0,
    )
    print(f"{args.method}: residual {residuals[-1]:.3e}, converged={converged}")
    return 0 if converged else 1


def cmd_train(args) -> int:
    t0 = time.perf_counter()
    if args.shrinkage == "hard":
        raise InputError(
            "--shrinkage hard is not trainable: its forward map is flat in "
            "(beta, gamma) almost everywhere, so gradients carry no signal"
        )
    case, train_split, _ = load_dataset(args.dataset)
    if not train_split:
        raise InputError(f"dataset {args.dataset} has an empty training split")
    r = args.r if args.r is not None else case.r
    samples = make_training_set(train_split, r, targets=args.targets)
    cfg = TrainConfig(
        r=r,
        epochs=args.epochs,
        learning_rate=args.lr,
        lr_beta=args.lr_beta,
        lr_gamma=args.lr_gamma,
        fd_step=args.fd_step,
        batch=args.batch,
        seed=args.seed,
        shrinkage=args.shrinkage,
    )
    shape = samples[0].M.shape
    init = UnrolledParams(
        beta=args.beta if args.beta is not None else default_beta(shape),
        gamma=args.gamma if args.gamma is not None else 0.7,
        upsilon=args.upsilon,
        layers=args.layers,
    )
    report = train(samples, cfg, init)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json() + "\n")
    _write_manifest(
        out.with_suffix(".manifest.json"),
        "train",
        {
            "dataset": str(args.dataset),
            "targets": args.targets,
            "epochs": cfg.epochs,
            "lr_beta": cfg.lr_beta,
            "lr_gamma": cfg.lr_gamma,
            "fd_step": cfg.fd_step,
            "batch": cfg.batch,
            "seed": cfg.seed,
            "shrinkage": cfg.shrinkage,
            "layers": init.layers,
            "upsilon": init.upsilon,
            "init": {"beta": init.beta, "gamma": init.gamma},
        },
        [out],
        time.perf_counter() - t0,
    )
    print(
        f"trained {cfg.epochs} epochs: beta {report.initial_beta:.4g} -> "
        f"{report.final_beta:.4g}, gamma {report.initial_gamma:.4g} -> "
        f"{report.final_gamma:.4g}"
    )
    return 0


def _eval_one(task):
    """Worker: decompose one test sample and return its four errors."""
    method, payload, r, triple = task
    M, L_star, S_star = triple
    if method == "accaltproj":
        cfg = SolverConfig.for_shape(M.shape, r, **payload)
        result = solve(M, cfg)
        L, S = result.L, result.S
    else:
        params = UnrolledParams(**payload["params"])
        L, S, _ = forward(M, r, params, shrinkage=payload["shrinkage"])
    report = compute_metrics(L_star, S_star, M, L, S)
    return report.eps_L, report.eps_S, report.eps_M, report.eps_supp


def cmd_eval(args) -> int:
    t0 = time.perf_counter()
    case, _, test_split = load_dataset(args.dataset)
    if not test_split:
        raise InputError(f"dataset {args.dataset} has an empty test split")
    r = args.r if args.r is not None else case.r
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise InputError("--methods is empty")
    shape = test_split[0].M_star.shape

    method_specs = []
    for method in methods:
        if method == "accaltproj":
            method_specs.append(("accaltproj", {}))
        elif method == "unrolled":
            if args.params is not None:
                params = _load_params_file(args.params, args.layers, args.upsilon)
            else:
                params = UnrolledParams(
                    beta=args.beta if args.beta is not None else default_beta(shape),
                    gamma=args.gamma if args.gamma is not None else 0.7,
                    upsilon=args.upsilon,
                    layers=args.layers if args.layers is not None else DEFAULT_LAYERS,
                )
            label = "unrolled" if args.shrinkage == "firm" else f"unrolled-{args.shrinkage}"
            method_specs.append(
                (
                    label,
                    {
                        "params": {
                            "beta": params.beta,
                            "gamma": params.gamma,
                            "upsilon": params.upsilon,
                            "layers": params.layers,
                        },
                        "shrinkage": args.shrinkage,
                    },
                )
            )
        else:
            raise InputError(f"unknown method {method!r}")

    tasks = [
        (label if label == "accaltproj" else "unrolled", payload, r,
         (t.M_star, t.L_star, t.S_star))
        for label, payload in method_specs
        for t in test_split
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_eval_one, tasks, chunksize=4))
    else:
        rows = [_eval_one(t) for t in tasks]

    n = len(test_split)
    lines = ["method,metric,mean,std"]
    metric_names = ("eps_L", "eps_S", "eps_M", "eps_supp")
    for m_idx, (label, _) in enumerate(method_specs):
        block = rows[m_idx * n : (m_idx + 1) * n]
        for j, name in enumerate(metric_names):
            values = [row[j] for row in block]
            mean = statistics.fmean(values)
            std = statistics.pstdev(values) if len(values) > 1 else 0.0
            lines.append(f"{label},{name},{mean!r},{std!r}")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    _write_manifest(
        out.with_suffix(".manifest.json"),
        "eval",
        {
            "dataset": str(args.dataset),
            "methods": methods,
            "shrinkage": args.shrinkage,
            "params": str(args.params) if args.params else None,
            "workers": args.workers,
        },
        [out],
        time.perf_counter() - t0,
    )
    print("\n".join(lines))
    return 0


def cmd_faces(args) -> int:
    t0 = time.perf_counter()
    image_dir = Path(args.images)
    paths = sorted(image_dir.glob(args.glob))
    if not paths:
        raise InputError(f"no images matching {args.glob!r} in {image_dir}")
    M = stack_images(paths)
    height = _pgm_height(paths[0])
    solve_t0 = time.perf_counter()
    L, S, residuals, converged, extra = _decompose_one(M, args)
    solve_seconds = time.perf_counter() - solve_t0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_matrix(L, out / "L.bin", "binary")
    save_matrix(S, out / "S.bin", "binary")
    width = M.shape[0] // height
    for j in range(M.shape[1]):
        low = L[:, j].reshape((height, width), order="F")
        sparse = S[:, j].reshape((height, width), order="F")
        write_pgm(out / f"lowrank_{j:02d}.pgm", low)
        write_pgm(out / f"sparse_{j:02d}.pgm", sparse)
    report = {
        "images": [str(p) for p in paths],
        "stack_shape": list(M.shape),
        "method": args.method,
        "rank": args.r,
        "residuals": residuals,
        "final_residual": residuals[-1],
        "converged": converged,
        "eps_M": eps_M(M, L, S),
        "decomposition_seconds": solve_seconds,
        **extra,
    }
    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    _write_manifest(
        out / "run_manifest.json",
        "faces",
        {"images": str(image_dir), "glob": args.glob, **extra.get("config", {})},
        [out / "L.bin", out / "S.bin", out / "report.json"],
        time.perf_counter() - t0,
    )
    print(
        f"{args.method} on {M.shape[0]}x{M.shape[1]} stack: residual "
        f"{residuals[-1]:.3e} in {solve_seconds:.2f}s"
    )
    return 0 if converged else 1


def _pgm_height(path) -> int:
    from .matrix_io import read_pgm

    return read_pgm(path).shape[0]


def _add_method_flags(p, default_r=None):
    p.add_argument("--r", type=int, default=default_r, help="target rank")
    p.add_argument(
        "--method", choices=("accaltproj", "unrolled"), default="accaltproj"
    )
    p.add_argument("--beta", type=float, default=None, help="threshold scale")
    p.add_argument("--beta-init", type=float, default=None, dest="beta_init")
    p.add_argument("--gamma", type=float, default=None, help="threshold decay")
    p.add_argument("--epsilon", type=float, default=1e-6, help="stop tolerance")
    p.add_argument("--max-iters", type=int, default=50, dest="max_iters")
    p.add_argument("--layers", type=int, default=None, help="unrolled depth")
    p.add_argument("--upsilon", type=float, default=DEFAULT_UPSILON)
    p.add_argument("--shrinkage", choices=("firm", "soft", "hard"), default="firm")
    p.add_argument("--params", default=None, help="trained parameter JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unrolled-rpca",
        description="Low-rank + sparse decomposition by accelerated "
        "alternating projections, classical or unrolled.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--case", type=int, default=None, help="benchmark case 1-4")
    p.add_argument("--d", type=int, default=250, help="square dimension")
    p.add_argument("--r", type=int, default=2, help="rank of the low-rank part")
    p.add_argument("--alpha", type=float, default=None, help="sparsity fraction")
    p.add_argument("--c", type=float, default=None, help="amplitude multiplier")
    p.add_argument("--total", type=int, default=300)
    p.add_argument("--train", type=int, default=180)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("decompose", help="decompose one matrix")
    p.add_argument("matrix", help="path to the input matrix")
    p.add_argument("--format", choices=("binary", "csv"), default="binary")
    _add_method_flags(p, default_r=2)
    p.add_argument("--truth-dir", default=None, dest="truth_dir",
                   help="directory with L.bin and S.bin ground truth")
    p.add_argument("-o", "--out", default="decomposition")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("train", help="learn (beta, gamma) on a dataset")
    p.add_argument("dataset", help="dataset directory from `gen`")
    p.add_argument("--r", type=int, default=None, help="rank (default: dataset's)")
    p.add_argument("--layers", type=int, default=DEFAULT_LAYERS)
    p.add_argument("--upsilon", type=float, default=DEFAULT_UPSILON)
    p.add_argument("--epochs", type=int, default=8)
    p.add_argument("--lr", type=float, default=None, help="uniform learning rate")
    p.add_argument("--lr-beta", type=float, default=1e-3, dest="lr_beta")
    p.add_argument("--lr-gamma", type=float, default=1e-2, dest="lr_gamma")
    p.add_argument("--fd-step", type=float, default=1e-2, dest="fd_step")
    p.add_argument("--batch", choices=("full", "per-sample"), default="full")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=None, help="initial beta")
    p.add_argument("--gamma", type=float, default=None, help="initial gamma")
    p.add_argument("--targets", choices=("ground-truth", "from-solver"),
                   default="ground-truth")
    p.add_argument("--shrinkage", choices=("firm", "soft", "hard"), default="firm")
    p.add_argument("-o", "--out", default="trained_params.json")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser(
        "eval",
        help="aggregate errors over the test split",
        epilog="Output CSV columns (frozen for this major version): "
        "method,metric,mean,std with one row per (method, metric); metrics "
        "appear in the order eps_L, eps_S, eps_M, eps_supp.",
    )
    p.add_argument("dataset", help="dataset directory from `gen`")
    p.add_argument("--methods", default="accaltproj,unrolled",
                   help="comma-separated: accaltproj, unrolled")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--layers", type=int, default=None)
    p.add_argument("--upsilon", type=float, default=DEFAULT_UPSILON)
    p.add_argument("--shrinkage", choices=("firm", "soft", "hard"), default="firm")
    p.add_argument("--params", default=None, help="trained parameter JSON")
    p.add_argument(
        "--workers",
        type=int,
        default=_default_workers(),
        help=f"per-sample worker processes (default from ${WORKERS_ENV}, else 1)",
    )
    p.add_argument("-o", "--out", default="eval.csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("faces", help="rank-1 decomposition of an image stack")
    p.add_argument("images", help="directory of equal-size binary PGM images")
    p.add_argument("--glob", default="*.pgm")
    _add_method_flags(p, default_r=1)
    p.add_argument("-o", "--out", default="faces_out")
    p.set_defaults(func=cmd_faces)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        InputError,
        FileNotFoundError,
        MatrixFormatError,
        ImageFormatError,
        SparsityError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
