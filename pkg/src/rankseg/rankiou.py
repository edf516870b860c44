"""IoU-optimal volume search and mask prediction.

The expected IoU of a top-tau mask depends on the Poisson-binomial count of
the *unselected* pixels, so each volume needs the PMF of a shrinking suffix.
The one-shot cross-correlation trick used for Dice does not apply here; only
the exact and truncated-normal-approximation modes are offered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pbdist import PBMoments, pb_moments, pb_pmf_fft, rna_pmf, validate_probs
from .rankdice import (
    RankSegConfig,
    RankedProbs,
    _require_variance,
    _resolve_algorithm,
    _trunc_window,
    rank_probs,
)

IOU_MODES = ("exact", "trna")


@dataclass
class IoUScoreTable:
    """IoU score table over volumes 0..d0 and the chosen volume."""

    scores: np.ndarray
    d0: int
    tau_hat: int
    algorithm_used: str


def _convolve_bernoulli(mass: np.ndarray, p: float) -> np.ndarray:
    """Add one Bernoulli(p) trial to a count PMF (stable O(len) update)."""
    nxt = np.zeros(mass.size + 1)
    nxt[:-1] = mass * (1.0 - p)
    nxt[1:] += mass * p
    return nxt


def _iou_partial(s_tau: float, pmf: np.ndarray, ls: np.ndarray, tau: int,
                 gamma: float) -> float:
    """(s_tau + gamma) * sum_l pmf[l] / (tau + l + gamma); the l = 0 term at
    tau = gamma = 0 uses the 0/0 := 0 convention."""
    den = tau + ls + gamma
    if tau == 0 and gamma == 0.0:
        keep = den > 0.0
        return float((s_tau + gamma) * np.sum(pmf[keep] / den[keep]))
    return float((s_tau + gamma) * np.sum(pmf / den))


def score_iou(r: RankedProbs, gamma: float, d0: int, mode: str = "exact",
              epsilon: float = 1e-4) -> IoUScoreTable:
    """IoU score table over volumes 0..d0.

    Exact mode builds the suffix PMF for tau = d0 once by FFT and grows it
    backward one Bernoulli at a time (no deconvolution).  trna mode uses
    suffix moments, updated incrementally, with a truncated approximate PMF.
    """
    d = r.dim
    if not 0 <= d0 <= d:
        raise ValueError(f"d0 = {d0} out of range for d = {d}")
    if mode not in IOU_MODES:
        raise ValueError(f"unknown IoU scoring mode {mode!r}")
    scores = np.empty(d0 + 1)
    s_cum = np.concatenate(([0.0], r.cumsum))
    if mode == "exact":
        pmf = pb_pmf_fft(r.sorted[d0:])
        for tau in range(d0, -1, -1):
            ls = np.arange(d - tau + 1)
            scores[tau] = _iou_partial(s_cum[tau], pmf, ls, tau, gamma)
            if tau > 0:
                pmf = _convolve_bernoulli(pmf, r.sorted[tau - 1])
    else:
        vars_ = r.sorted * (1.0 - r.sorted)
        vcum = np.concatenate(([0.0], np.cumsum(vars_)))
        m3cum = np.concatenate(([0.0], np.cumsum(vars_ * (1.0 - 2.0 * r.sorted))))
        full = pb_moments(r.sorted)
        for tau in range(d0 + 1):
            mu = full.mu - s_cum[tau]
            s2 = full.sigma2 - float(vcum[tau])
            _require_variance(s2)
            m3 = full.m3 - float(m3cum[tau])
            m = PBMoments(mu=mu, sigma2=s2, m3=m3, eta=m3 / s2**1.5)
            ls = _trunc_window(m, epsilon, d - tau)
            pmf = rna_pmf(m, ls[0], ls[-1])
            scores[tau] = _iou_partial(s_cum[tau], pmf, ls, tau, gamma)
    tau_hat = int(np.argmax(scores))
    return IoUScoreTable(scores=scores, d0=d0, tau_hat=tau_hat, algorithm_used=mode)


def shrink_iou_bound(r: RankedProbs, gamma: float) -> int:
    """Early-stop volume for the IoU search.

    Smallest tau >= 1 with s_tau + gamma >= q/(1-q) * max(d + gamma,
    ((d - tau) q + tau + gamma)^2 / (tau + gamma)) where q is the next ranked
    probability; q = 1 keeps searching, q = 0 stops.  Returns d when the
    condition never holds.
    """
    d = r.dim
    if d <= 1:
        return d
    for tau in range(1, d):
        q_next = r.sorted[tau]
        if q_next == 0.0:
            return tau
        if q_next == 1.0:
            continue
        rhs = (q_next / (1.0 - q_next)) * max(
            d + gamma,
            ((d - tau) * q_next + tau + gamma) ** 2 / (tau + gamma),
        )
        if r.cumsum[tau - 1] + gamma >= rhs:
            return tau
    return d


def predict_iou(q, cfg: RankSegConfig | None = None) -> tuple[np.ndarray, IoUScoreTable]:
    """Predict the expected-IoU-optimal mask: rank, bound, score, select."""
    q = validate_probs(q)
    if cfg is None:
        cfg = RankSegConfig()
    if cfg.algorithm == "ba":
        raise ValueError("the one-shot approximation is not offered for IoU; "
                         "use 'exact', 'trna' or 'auto'")
    r = rank_probs(q)
    d0 = shrink_iou_bound(r, cfg.gamma)
    if cfg.d_cap is not None:
        d0 = min(d0, cfg.d_cap)
    algo = _resolve_algorithm(q, cfg)
    if algo == "ba":
        algo = "trna"
    table = score_iou(r, cfg.gamma, d0, mode=algo, epsilon=cfg.epsilon)
    mask = np.zeros(q.size, dtype=np.uint8)
    mask[r.order[: table.tau_hat]] = 1
    return mask, table


def expected_iou_oracle(q, mask, gamma: float = 0.0,
                        zero_over_zero: str = "zero") -> float:
    """Expected IoU of a fixed mask by exhaustive enumeration.  d <= 20."""
    q = validate_probs(q)
    d = q.size
    if d > 20:
        raise ValueError(f"enumeration oracle limited to d <= 20, got {d}")
    mask = np.asarray(mask, dtype=np.float64)
    bits = (np.arange(1 << d)[:, None] >> np.arange(d)[None, :]) & 1
    probs = np.prod(np.where(bits, q, 1.0 - q), axis=1)
    inter = bits @ mask
    den = bits.sum(axis=1) + mask.sum() - inter + gamma
    num = inter + gamma
    empty = 1.0 if zero_over_zero == "one" else 0.0
    ratio = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), empty)
    return float(probs @ ratio)
