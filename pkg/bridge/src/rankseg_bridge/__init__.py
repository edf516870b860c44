"""In-process predict/eval binding on dense numeric arrays.

Model pipelines that already hold probabilities in memory should not have to
round-trip tensors through files to use the volume-search rule.  This
package exposes the same predictions and evaluation records as the `rankseg`
command line, as two plain functions on numpy arrays.

Inputs are taken as views of caller memory, never copied silently: arrays
must be C-contiguous with a 32- or 64-bit float dtype (uint8 also accepted
for masks in evaluation), anything else is rejected with a descriptive
error.  Calls are reentrant — all state lives on the stack, and numpy
releases the interpreter lock inside the heavy kernels.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from rankseg import (
    RankSegConfig,
    apply_temperature,
    eval_dataset,
    mdice_eval,
    pb_moments,
    predict_dice,
    predict_iou,
)

__version__ = "0.1.0"

__all__ = ["BridgeConfig", "bridge_predict", "bridge_eval"]

_FLOAT_DTYPES = (np.dtype(np.float32), np.dtype(np.float64))


@dataclass
class BridgeConfig:
    """Prediction/evaluation settings, validated like the CLI options."""

    gamma: float = 0.0
    metric: str = "dice"
    algorithm: str = "auto"
    epsilon: float = 1e-4
    d_cap: int | None = None
    zero_over_zero: str = "zero"
    multi: bool = False
    temperature: float = 1.0
    activation: str = "none"

    def __post_init__(self):
        # Shares the core validation rules; raises on any bad field.
        self._core = RankSegConfig(
            gamma=self.gamma, algorithm=self.algorithm, epsilon=self.epsilon,
            d_cap=self.d_cap, zero_over_zero=self.zero_over_zero)
        if self.metric not in ("dice", "iou"):
            raise ValueError(f"unknown metric {self.metric!r}")


def _require_dense(arr, name: str, allow_uint8: bool = False) -> np.ndarray:
    if not isinstance(arr, np.ndarray):
        raise TypeError(f"{name} must be a numpy array, got {type(arr).__name__}")
    allowed = _FLOAT_DTYPES + ((np.dtype(np.uint8),) if allow_uint8 else ())
    if arr.dtype not in allowed:
        raise TypeError(
            f"{name} has dtype {arr.dtype}; expected one of "
            f"{', '.join(str(d) for d in allowed)} (no silent conversion)")
    if not arr.flags["C_CONTIGUOUS"]:
        raise ValueError(
            f"{name} is not C-contiguous; pass numpy.ascontiguousarray(...) "
            "explicitly if a copy is acceptable")
    return arr


def _class_rows(arr: np.ndarray, multi: bool) -> np.ndarray:
    if arr.ndim == 1 or (arr.ndim == 2 and not multi):
        return arr.reshape(1, -1)
    if arr.ndim == 2:
        return arr
    if arr.ndim == 3:
        return arr.reshape(arr.shape[0], -1)
    raise ValueError(f"unsupported tensor rank {arr.ndim} (shape {arr.shape})")


def bridge_predict(array, cfg: BridgeConfig | None = None):
    """Predict masks for a (d), (H, W), (K, d) or (K, H, W) array.

    2-D input is one (H, W) instance unless ``cfg.multi`` marks it as (K, d)
    class rows.  Returns ``(mask, meta)`` where ``mask`` is uint8 with the
    input's shape and ``meta`` is one metadata record (chosen volume, search
    bound, count variance, algorithm, timing) — a list of records for
    multi-class input.
    """
    if cfg is None:
        cfg = BridgeConfig()
    array = _require_dense(array, "array")
    probs = apply_temperature(array, cfg.temperature, cfg.activation)
    rows = _class_rows(probs, cfg.multi)
    predict = predict_dice if cfg.metric == "dice" else predict_iou
    masks, metas = [], []
    for row in rows:
        start = time.perf_counter()
        mask, res = predict(row, cfg._core)
        millis = (time.perf_counter() - start) * 1e3
        masks.append(mask)
        metas.append({
            "tau_hat": res.tau_hat,
            "d0": res.d0,
            "sigma2": pb_moments(row).sigma2,
            "algorithm_used": res.algorithm_used,
            "millis": millis,
        })
    out = np.stack(masks).reshape(probs.shape).astype(np.uint8)
    single = probs.ndim == 1 or (probs.ndim == 2 and not cfg.multi)
    return out, (metas[0] if single else metas)


def _instances(arr: np.ndarray, multi: bool) -> list[np.ndarray]:
    if arr.ndim == 1 or (arr.ndim == 2 and multi):
        return [arr]
    return [arr[i] for i in range(arr.shape[0])]


def bridge_eval(pred, gt, cfg: BridgeConfig | None = None) -> list[dict]:
    """Evaluate predictions against ground truth, same records as the CLI.

    Without ``cfg.multi``: one per-instance record and one pooled (biased)
    record.  With it, the leading axis after the batch is treated as classes
    and a single class-weighted record is returned.
    """
    if cfg is None:
        cfg = BridgeConfig()
    pred = _require_dense(pred, "pred", allow_uint8=True)
    gt = _require_dense(gt, "gt", allow_uint8=True)
    if pred.shape != gt.shape:
        raise ValueError(f"shape mismatch: pred {pred.shape} vs gt {gt.shape}")
    if cfg.multi:
        summary = mdice_eval(_instances(gt, True), _instances(pred, True),
                             gamma=cfg.gamma, metric=cfg.metric,
                             zero_over_zero=cfg.zero_over_zero)
        return [{**vars(summary), "mode": "instance (class-weighted)"}]
    pairs = list(zip(_instances(gt, False), _instances(pred, False)))
    inst = eval_dataset(pairs, gamma=cfg.gamma, mode="instance",
                        metric=cfg.metric, zero_over_zero=cfg.zero_over_zero)
    pooled = eval_dataset(pairs, gamma=cfg.gamma, mode="pooled",
                          metric=cfg.metric, zero_over_zero=cfg.zero_over_zero)
    return [vars(inst), {**vars(pooled), "mode": "pooled (biased)"}]
