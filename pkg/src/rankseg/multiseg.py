"""Overlapping multi-class prediction and class weighting.

With overlap permitted, the multi-class objective separates into one
independent single-class volume search per class row, so prediction is just
the single-class rule applied row-wise.  Row probabilities may come from
sigmoid or softmax heads alike; column sums are not enforced.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .rankdice import RankSegConfig, predict_dice
from .rankiou import predict_iou


def _as_rows(data) -> tuple[np.ndarray, tuple[int, ...]]:
    """Flatten (K, d) or (K, H, W) class-probability data to (K, d)."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 2:
        return arr, arr.shape
    if arr.ndim == 3:
        k, h, w = arr.shape
        return arr.reshape(k, h * w), arr.shape
    raise ValueError(f"expected (K, d) or (K, H, W) probabilities, got shape {arr.shape}")


def predict_multi(pm, cfg: RankSegConfig | None = None, metric: str = "dice",
                  threads: int = 1) -> np.ndarray:
    """Per-class mask prediction on a (K, d) or (K, H, W) probability map.

    Classes are independent; masks may overlap.  Errors are re-raised with
    the offending class index.
    """
    if metric not in ("dice", "iou"):
        raise ValueError(f"unknown metric {metric!r}")
    rows, shape = _as_rows(pm)
    predict = predict_dice if metric == "dice" else predict_iou

    def one(k: int) -> np.ndarray:
        try:
            mask, _ = predict(rows[k], cfg)
            return mask
        except Exception as exc:
            raise type(exc)(f"class {k}: {exc}") from exc

    if threads > 1 and rows.shape[0] > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            masks = list(pool.map(one, range(rows.shape[0])))
    else:
        masks = [one(k) for k in range(rows.shape[0])]
    return np.stack(masks).reshape(shape).astype(np.uint8)


def mdice_weights(gt, pred) -> np.ndarray:
    """Class weights: zero for classes absent in both ground truth and
    prediction, uniform over the remaining (active) classes.

    Returns the all-zero vector when no class is active; callers treat such
    instances as undefined.
    """
    gt_rows, gt_shape = _as_rows(gt)
    pred_rows, pred_shape = _as_rows(pred)
    if gt_shape != pred_shape:
        raise ValueError(f"shape mismatch: {gt_shape} vs {pred_shape}")
    active = (gt_rows != 0).any(axis=1) | (pred_rows != 0).any(axis=1)
    alpha = np.zeros(gt_rows.shape[0])
    n_active = int(active.sum())
    if n_active:
        alpha[active] = 1.0 / n_active
    return alpha
