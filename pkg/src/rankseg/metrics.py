"""Empirical Dice/IoU evaluation.

Per-instance averages are the recommended (unbiased) evaluation; pooling
TP/FP/FN across a dataset before forming the ratio under-weights small
instances and is labeled biased wherever it is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .multiseg import mdice_weights


@dataclass
class EvalSummary:
    mean: float
    std_error: float | None
    n_instances: int
    n_excluded: int
    mode: str  # "instance" or "pooled"


def _counts(y, yhat) -> tuple[float, float, float]:
    y = np.asarray(y).ravel()
    yhat = np.asarray(yhat).ravel()
    if y.shape != yhat.shape:
        raise ValueError(f"mask length mismatch: {y.size} vs {yhat.size}")
    y = y != 0
    yhat = yhat != 0
    tp = float(np.sum(y & yhat))
    fp = float(np.sum(~y & yhat))
    fn = float(np.sum(y & ~yhat))
    return tp, fp, fn


def _ratio(num: float, den: float, zero_over_zero: str) -> float:
    if den == 0.0:
        return 1.0 if zero_over_zero == "one" else 0.0
    return num / den


def dice_instance(y, yhat, gamma: float = 0.0, zero_over_zero: str = "zero") -> float:
    """(2 TP + gamma) / (2 TP + FP + FN + gamma) for a single instance."""
    tp, fp, fn = _counts(y, yhat)
    return _ratio(2.0 * tp + gamma, 2.0 * tp + fp + fn + gamma, zero_over_zero)


def iou_instance(y, yhat, gamma: float = 0.0, zero_over_zero: str = "zero") -> float:
    """(TP + gamma) / (TP + FP + FN + gamma) for a single instance."""
    tp, fp, fn = _counts(y, yhat)
    return _ratio(tp + gamma, tp + fp + fn + gamma, zero_over_zero)


def eval_dataset(pairs, gamma: float = 0.0, mode: str = "instance",
                 metric: str = "dice", zero_over_zero: str = "zero") -> EvalSummary:
    """Evaluate (ground truth, prediction) pairs.

    ``instance`` mode averages per-instance scores and reports the standard
    error; ``pooled`` mode aggregates TP/FP/FN first (biased: it discounts
    small instances) and carries no standard error.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty evaluation dataset")
    if mode not in ("instance", "pooled"):
        raise ValueError(f"unknown mode {mode!r}")
    if metric not in ("dice", "iou"):
        raise ValueError(f"unknown metric {metric!r}")
    if mode == "instance":
        fn_ = dice_instance if metric == "dice" else iou_instance
        vals = np.array([fn_(y, yhat, gamma, zero_over_zero) for y, yhat in pairs])
        stderr = float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else 0.0
        return EvalSummary(mean=float(vals.mean()), std_error=stderr,
                           n_instances=vals.size, n_excluded=0, mode="instance")
    tp = fp = fn = 0.0
    for y, yhat in pairs:
        a, b, c = _counts(y, yhat)
        tp, fp, fn = tp + a, fp + b, fn + c
    if metric == "dice":
        mean = _ratio(2.0 * tp + gamma, 2.0 * tp + fp + fn + gamma, zero_over_zero)
    else:
        mean = _ratio(tp + gamma, tp + fp + fn + gamma, zero_over_zero)
    return EvalSummary(mean=mean, std_error=None, n_instances=len(pairs),
                       n_excluded=0, mode="pooled")


def mdice_eval(gts, preds, gamma: float = 0.0, metric: str = "dice",
               zero_over_zero: str = "zero") -> EvalSummary:
    """Weighted multi-class evaluation over instances.

    Each instance scores a weighted average over classes; classes absent in
    both ground truth and prediction get zero weight.  Instances where every
    class is absent-and-unpredicted are excluded and counted.
    """
    gts, preds = list(gts), list(preds)
    if len(gts) != len(preds):
        raise ValueError("ground-truth / prediction count mismatch")
    if not gts:
        raise ValueError("empty evaluation dataset")
    fn_ = dice_instance if metric == "dice" else iou_instance
    vals = []
    excluded = 0
    for gt, pred in zip(gts, preds):
        gt = np.asarray(gt)
        pred = np.asarray(pred)
        alpha = mdice_weights(gt, pred)
        if alpha.sum() == 0.0:
            excluded += 1
            continue
        score = sum(
            a * fn_(gt[k], pred[k], gamma, zero_over_zero)
            for k, a in enumerate(alpha) if a > 0.0
        )
        vals.append(score)
    if not vals:
        return EvalSummary(mean=float("nan"), std_error=None, n_instances=0,
                           n_excluded=excluded, mode="instance")
    arr = np.array(vals)
    stderr = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
    return EvalSummary(mean=float(arr.mean()), std_error=stderr,
                       n_instances=arr.size, n_excluded=excluded, mode="instance")
