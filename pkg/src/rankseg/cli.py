"""Command-line front end: predict, eval, simulate and bench subcommands."""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .metrics import eval_dataset, mdice_eval
from .multiseg import predict_multi
from .pbdist import DP_SIZE_CAP, pb_moments
from .rankdice import RankSegConfig, predict_dice, rank_probs, score_ba, score_exact, score_trna, shrink_bound
from .rankiou import predict_iou
from .simulate import DecaySpec, run_example1, run_example2
from .tensorio import apply_temperature, read_npy, write_npy


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", type=float, default=0.0, help="smoothing parameter")
    p.add_argument("--metric", choices=("dice", "iou"), default="dice")
    p.add_argument("--algo", choices=("exact", "trna", "ba", "auto"), default="auto")
    p.add_argument("--eps", type=float, default=1e-4,
                   help="truncation tolerance for approximate scoring")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--zero-over-zero", choices=("zero", "one"), default="zero",
                   help="value of 0/0 when gamma=0 and both masks are empty")
    p.add_argument("--d-cap", type=int, default=None,
                   help="user bound on the volume search range")


def _config(args) -> RankSegConfig:
    return RankSegConfig(gamma=args.gamma, algorithm=args.algo, epsilon=args.eps,
                         d_cap=args.d_cap, zero_over_zero=args.zero_over_zero)


def _parse_shape(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}")
    return w, h


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankseg",
        description="Turn per-pixel probability maps into Dice/IoU-optimal masks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="predict masks from a probability/logit tensor")
    p.add_argument("input", help="NPY tensor: (d), (H,W), (K,d) or (K,H,W)")
    p.add_argument("--out", default=None, help="output mask path (.npy)")
    p.add_argument("--multi", action="store_true",
                   help="treat a 2-D input as (K, d) class rows instead of (H, W)")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--activation", choices=("none", "sigmoid", "softmax"),
                   default="none")
    _add_common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="evaluate predicted masks against ground truth")
    p.add_argument("--pred", required=True, help="NPY mask tensor")
    p.add_argument("--gt", required=True, help="NPY ground-truth tensor, same shape")
    p.add_argument("--out", default=None, help="optional JSON output path")
    p.add_argument("--multi", action="store_true",
                   help="interpret the second axis as classes: (n, K, ...)")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="run a synthetic experiment, emit a CSV report")
    p.add_argument("scenario", choices=("example1", "example2"))
    p.add_argument("--decay", choices=("step", "exponential", "linear"), default="step")
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--rho", type=float, default=0.1)
    p.add_argument("--shape", type=_parse_shape, default=(28, 28), metavar="WxH")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--n", type=int, default=2000, help="instances (example2)")
    p.add_argument("--thresholds", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
                   help="comma-separated fixed thresholds (example2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="time the scoring algorithms across dimensions")
    p.add_argument("--sizes", default=",".join(str(1 << k) for k in range(8, 19)),
                   help="comma-separated dimensions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--force", action="store_true",
                   help="run the exact algorithm above the direct-convolution cap")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def _predict_one(row: np.ndarray, cfg: RankSegConfig, metric: str):
    start = time.perf_counter()
    if metric == "dice":
        mask, res = predict_dice(row, cfg)
    else:
        mask, res = predict_iou(row, cfg)
    millis = (time.perf_counter() - start) * 1e3
    meta = {
        "tau_hat": res.tau_hat,
        "d0": res.d0,
        "sigma2": pb_moments(row).sigma2,
        "algorithm_used": res.algorithm_used,
        "millis": millis,
    }
    return mask, meta


def cmd_predict(args) -> int:
    cfg = _config(args)
    probs = apply_temperature(read_npy(args.input), args.temperature, args.activation)
    if probs.ndim == 1 or (probs.ndim == 2 and not args.multi):
        rows = probs.reshape(1, -1)
    elif probs.ndim == 2:
        rows = probs
    elif probs.ndim == 3:
        rows = probs.reshape(probs.shape[0], -1)
    else:
        raise ValueError(f"unsupported tensor rank {probs.ndim} (shape {probs.shape})")

    def one(k: int):
        return _predict_one(rows[k], cfg, args.metric)

    if args.threads > 1 and rows.shape[0] > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(one, range(rows.shape[0])))
    else:
        results = [one(k) for k in range(rows.shape[0])]

    masks = np.stack([m for m, _ in results]).reshape(probs.shape).astype(np.uint8)
    metas = [meta for _, meta in results]
    out = Path(args.out) if args.out else Path(args.input).with_suffix("").with_name(
        Path(args.input).stem + "_mask.npy")
    write_npy(out, masks)
    sidecar = metas[0] if (probs.ndim == 1 or (probs.ndim == 2 and not args.multi)) else metas
    with open(str(out) + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out} and {out}.json")
    return 0


def _instances(arr: np.ndarray, multi: bool) -> list[np.ndarray]:
    if arr.ndim == 1 or (arr.ndim == 2 and multi):
        return [arr]
    return [arr[i] for i in range(arr.shape[0])]


def cmd_eval(args) -> int:
    pred = read_npy(args.pred)
    gt = read_npy(args.gt)
    if pred.shape != gt.shape:
        raise ValueError(f"shape mismatch: pred {pred.shape} vs gt {gt.shape}")
    lines = []
    if args.multi:
        gts = _instances(gt, True)
        preds = _instances(pred, True)
        summary = mdice_eval(gts, preds, gamma=args.gamma, metric=args.metric,
                             zero_over_zero=args.zero_over_zero)
        lines.append({**vars(summary), "mode": "instance (class-weighted)"})
    else:
        pairs = list(zip(_instances(gt, False), _instances(pred, False)))
        inst = eval_dataset(pairs, gamma=args.gamma, mode="instance",
                            metric=args.metric, zero_over_zero=args.zero_over_zero)
        pooled = eval_dataset(pairs, gamma=args.gamma, mode="pooled",
                              metric=args.metric, zero_over_zero=args.zero_over_zero)
        lines.append(vars(inst))
        lines.append({**vars(pooled), "mode": "pooled (biased)"})
    for rec in lines:
        stderr = rec.get("std_error")
        stderr_txt = "" if stderr is None else f" stderr={stderr:.6f}"
        print(f"{args.metric} {rec['mode']}: mean={rec['mean']:.6f}{stderr_txt} "
              f"n={rec['n_instances']} excluded={rec['n_excluded']}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(lines, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_simulate(args) -> int:
    cfg = _config(args)
    w, h = args.shape
    if args.scenario == "example1":
        rho = args.rho if args.decay == "step" else None
        spec = DecaySpec(kind=args.decay, beta=args.beta, rho=rho, width=w, height=h)
        report = run_example1([spec], replicates=args.reps, gamma=args.gamma,
                              seed=args.seed, threads=args.threads, cfg=cfg)
    else:
        thresholds = [float(t) for t in args.thresholds.split(",")]
        report = run_example2(n=args.n, width=w, height=h, thresholds=thresholds,
                              gamma=args.gamma, seed=args.seed,
                              threads=args.threads, cfg=cfg)
    if args.out:
        report.write_csv(args.out)
        if report.optimal_thresholds is not None:
            extra = Path(args.out).with_name(Path(args.out).stem
                                             + "_optimal_thresholds.csv")
            with open(extra, "w", newline="") as fh:
                fh.write("rho,optimal_threshold\n")
                for r, t in zip(report.instance_rho, report.optimal_thresholds):
                    fh.write(f"{r:.6f},{t:g}\n")
    else:
        sys.stdout.write(report.to_csv())
    return 0


def _bench_profiles(d: int, seed: int) -> dict[str, np.ndarray]:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, d])))
    well = np.full(d, 1e-3)
    well[: max(d // 1000, 8)] = 0.999
    diffuse = rng.beta(2.0, 2.0, size=d)
    return {"well-separated": well, "diffuse": diffuse}


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = ["algo,d,d0,sigma2,millis"]
    for d in sizes:
        for profile in _bench_profiles(d, args.seed).values():
            r = rank_probs(profile)
            d0 = shrink_bound(r, args.gamma)
            sigma2 = pb_moments(profile).sigma2
            for algo in ("exact", "trna", "ba"):
                if algo == "exact" and d > DP_SIZE_CAP and not args.force:
                    continue
                if algo in ("trna", "ba") and sigma2 < 25.0:
                    continue
                start = time.perf_counter()
                if algo == "exact":
                    score_exact(r, args.gamma, d0)
                elif algo == "trna":
                    score_trna(r, args.gamma, args.eps, d0)
                else:
                    score_ba(r, args.gamma, args.eps, d0)
                millis = (time.perf_counter() - start) * 1e3
                rows.append(f"{algo},{d},{d0},{sigma2:.4f},{millis:.3f}")
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface a diagnostic, not a traceback
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
