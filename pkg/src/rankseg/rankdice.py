"""Dice-optimal volume search and mask prediction.

Given per-pixel success probabilities, the expected Dice of a top-tau mask
decomposes into score terms driven by Poisson-binomial PMFs.  This module
ranks the probabilities, bounds the search range, evaluates the score table
exactly or approximately, and selects the maximizing volume.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import pbdist
from .pbdist import PBMoments, pb_moments, pb_pmf_fft, rna_pmf, rna_quantile, validate_probs

# Approximation error bounds are only available at this variance or above.
MIN_APPROX_VARIANCE = 25.0

# Exact scoring is cheap up to this dimension; beyond it auto mode switches
# to the one-shot cross-correlation approximation.
AUTO_EXACT_MAX_DIM = 500

ALGORITHMS = ("exact", "trna", "ba", "auto")


class VarianceTooSmallError(ValueError):
    """Count variance below the validity threshold of the approximations."""


@dataclass
class RankSegConfig:
    """Prediction settings shared by the Dice and IoU searches."""

    gamma: float = 0.0
    algorithm: str = "auto"
    epsilon: float = 1e-4
    d_cap: int | None = None
    zero_over_zero: str = "zero"

    def __post_init__(self):
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must be in (0, 0.5), got {self.epsilon}")
        if self.d_cap is not None and self.d_cap < 1:
            raise ValueError(f"d_cap must be positive, got {self.d_cap}")
        if self.zero_over_zero not in ("zero", "one"):
            raise ValueError(f"zero_over_zero must be 'zero' or 'one'")


@dataclass(frozen=True)
class RankedProbs:
    """Descending sort of a probability vector with cumulative sums.

    ``order[k]`` is the original index of the (k+1)-th largest probability;
    ties are broken by ascending original index.  ``cumsum[k]`` is the sum of
    the top k+1 sorted probabilities.
    """

    order: np.ndarray
    sorted: np.ndarray
    cumsum: np.ndarray

    @property
    def dim(self) -> int:
        return self.sorted.size


@dataclass
class VolumeSearchResult:
    """Score table over volumes 0..d0 and the chosen volume."""

    scores: np.ndarray
    d0: int
    tau_hat: int
    algorithm_used: str


def rank_probs(q) -> RankedProbs:
    """Stable descending sort; ties keep ascending original index."""
    q = validate_probs(q)
    order = np.argsort(-q, kind="stable")
    sorted_q = q[order]
    return RankedProbs(order=order, sorted=sorted_q, cumsum=np.cumsum(sorted_q))


def shrink_bound(r: RankedProbs, gamma: float) -> int:
    """Smallest tau at which the score is provably non-increasing beyond it.

    Returns min{tau in 1..d-1 : s_tau / q_(tau+1) >= tau + gamma + d}, with a
    zero denominator counting as satisfied, or d when no tau qualifies.
    """
    d = r.dim
    if d <= 1:
        return d
    q_next = r.sorted[1:]
    s = r.cumsum[: d - 1]
    taus = np.arange(1, d, dtype=np.float64)
    cond = (q_next == 0.0) | (s >= (taus + gamma + d) * q_next)
    hits = np.flatnonzero(cond)
    return int(hits[0]) + 1 if hits.size else d


def _loo_pmfs(sorted_q: np.ndarray, count: int) -> np.ndarray:
    """PMFs of the count with one ranked pixel removed, rows s = 0..count-1,
    each of length d (counts 0..d-1).

    Uses exclusive prefix/suffix products of the per-pixel characteristic
    factors when the frequency matrix fits in memory, otherwise recomputes
    each reduced product directly.  No deconvolution in either path.
    """
    d = sorted_q.size
    n = pbdist._next_pow2(max(d, 1))
    nh = n // 2 + 1
    if d * nh <= 4_000_000:
        z = np.exp(-2j * np.pi * np.arange(nh) / n)
        factors = 1.0 - sorted_q[:, None] + sorted_q[:, None] * z[None, :]
        prefix = np.ones((d, nh), dtype=np.complex128)
        if d > 1:
            prefix[1:] = np.cumprod(factors[:-1], axis=0)
        suffix = np.ones((d, nh), dtype=np.complex128)
        if d > 1:
            suffix[:-1] = np.cumprod(factors[::-1], axis=0)[::-1][1:]
        chars = prefix[:count] * suffix[:count]
        pmfs = np.fft.irfft(chars, n, axis=1)[:, :d]
    else:
        pmfs = np.empty((count, d))
        for s in range(count):
            reduced = np.delete(sorted_q, s)
            pmfs[s] = pbdist.pb_pmf_fft(reduced)[:d]
    pmfs[np.abs(pmfs) < pbdist.FFT_CLAMP] = 0.0
    np.maximum(pmfs, 0.0, out=pmfs)
    return pmfs


def _nu_term(pmf_full: np.ndarray, ls: np.ndarray, tau: int, gamma: float) -> float:
    """gamma-smoothing score term sum_l gamma P(count = l) / (tau + l + gamma)."""
    if gamma == 0.0:
        return 0.0
    return float(np.sum(gamma * pmf_full / (tau + ls + gamma)))


def score_exact(r: RankedProbs, gamma: float, d0: int) -> VolumeSearchResult:
    """Exact score table over volumes 0..d0 via the rank-1 recursion."""
    d = r.dim
    if not 0 <= d0 <= d:
        raise ValueError(f"d0 = {d0} out of range for d = {d}")
    pmf_full = pb_pmf_fft(r.sorted)
    ls_full = np.arange(d + 1)
    scores = np.empty(d0 + 1)
    scores[0] = _nu_term(pmf_full, ls_full, 0, gamma)
    if d0 > 0:
        loo = _loo_pmfs(r.sorted, d0)
        ls = np.arange(d)
        omega = np.zeros(d)
        for tau in range(1, d0 + 1):
            omega += r.sorted[tau - 1] * loo[tau - 1]
            omega_bar = float(np.sum(2.0 * omega / (tau + ls + gamma + 1.0)))
            scores[tau] = omega_bar + _nu_term(pmf_full, ls_full, tau, gamma)
    tau_hat = int(np.argmax(scores))
    return VolumeSearchResult(scores=scores, d0=d0, tau_hat=tau_hat,
                              algorithm_used="exact")


def _trunc_window(m: PBMoments, epsilon: float, d: int) -> np.ndarray:
    """Count window where the approximate PMF mass is non-negligible.

    Falls back to the full range when the window misses {0..d} entirely.
    """
    lo = int(np.floor(m.sigma * rna_quantile(m, epsilon) + m.mu - 1.5))
    hi = int(np.floor(m.sigma * rna_quantile(m, 1.0 - epsilon) + m.mu - 0.5))
    lo, hi = max(lo, 0), min(hi, d)
    if lo > hi:
        return np.arange(d + 1)
    return np.arange(lo, hi + 1)


def _require_variance(sigma2: float) -> None:
    if sigma2 < MIN_APPROX_VARIANCE:
        raise VarianceTooSmallError(
            f"count variance {sigma2:.4g} < {MIN_APPROX_VARIANCE}; "
            "approximation error bounds do not apply, use the exact algorithm"
        )


def score_trna(r: RankedProbs, gamma: float, epsilon: float, d0: int) -> VolumeSearchResult:
    """Truncated normal-approximation scores: the recursion runs on
    approximate PMFs restricted to the high-mass count window."""
    d = r.dim
    m = pb_moments(r.sorted)
    _require_variance(m.sigma2)
    ls = _trunc_window(m, epsilon, d)
    pmf_full = rna_pmf(m, ls[0], ls[-1])
    scores = np.empty(d0 + 1)
    scores[0] = _nu_term(pmf_full, ls, 0, gamma)
    omega = np.zeros(ls.size)
    vars_ = r.sorted * (1.0 - r.sorted)
    m3s = vars_ * (1.0 - 2.0 * r.sorted)
    for tau in range(1, d0 + 1):
        qj = r.sorted[tau - 1]
        s2 = m.sigma2 - vars_[tau - 1]
        m3 = m.m3 - m3s[tau - 1]
        loo = PBMoments(mu=m.mu - qj, sigma2=s2, m3=m3, eta=m3 / s2**1.5)
        omega += qj * rna_pmf(loo, ls[0], ls[-1])
        omega_bar = float(np.sum(2.0 * omega / (tau + ls + gamma + 1.0)))
        scores[tau] = omega_bar + _nu_term(pmf_full, ls, tau, gamma)
    tau_hat = int(np.argmax(scores))
    return VolumeSearchResult(scores=scores, d0=d0, tau_hat=tau_hat,
                              algorithm_used="trna")


def _fft_crosscorr(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """c[k] = sum_m values[m] * weights[m + k] for k = 0..len(weights)-len(values),
    via FFT with next-power-of-two padding."""
    nv, nw = values.size, weights.size
    n = pbdist._next_pow2(nv + nw - 1)
    conv = np.fft.irfft(np.fft.rfft(weights, n) * np.fft.rfft(values[::-1], n), n)
    return conv[nv - 1 : nw]


def score_ba(r: RankedProbs, gamma: float, epsilon: float, d0: int) -> VolumeSearchResult:
    """One-shot scores: every leave-one-out PMF is replaced by the full-count
    PMF, so all volumes come out of a single FFT cross-correlation."""
    d = r.dim
    m = pb_moments(r.sorted)
    _require_variance(m.sigma2)
    ls = _trunc_window(m, epsilon, d)
    pmf = rna_pmf(m, ls[0], ls[-1])
    lo = float(ls[0])
    w_omega = 1.0 / (lo + gamma + 1.0 + np.arange(ls.size + d0))
    corr_omega = _fft_crosscorr(pmf, w_omega)
    scores = np.zeros(d0 + 1)
    if d0 > 0:
        scores[1:] = 2.0 * r.cumsum[:d0] * corr_omega[1:]
    if gamma > 0.0:
        w_nu = 1.0 / (lo + gamma + np.arange(ls.size + d0))
        scores += gamma * _fft_crosscorr(pmf, w_nu)
    tau_hat = int(np.argmax(scores))
    return VolumeSearchResult(scores=scores, d0=d0, tau_hat=tau_hat,
                              algorithm_used="ba")


def _resolve_algorithm(q: np.ndarray, cfg: RankSegConfig) -> str:
    algo = cfg.algorithm
    if algo == "auto":
        algo = "exact" if q.size <= AUTO_EXACT_MAX_DIM else "ba"
    if algo in ("trna", "ba"):
        sigma2 = float(np.sum(q * (1.0 - q)))
        if sigma2 < MIN_APPROX_VARIANCE:
            if cfg.algorithm == "auto":
                algo = "exact"
            else:
                _require_variance(sigma2)
    return algo


def predict_dice(q, cfg: RankSegConfig | None = None) -> tuple[np.ndarray, VolumeSearchResult]:
    """Predict the expected-Dice-optimal mask: rank, bound, score, select."""
    q = validate_probs(q)
    if cfg is None:
        cfg = RankSegConfig()
    r = rank_probs(q)
    d0 = shrink_bound(r, cfg.gamma)
    if cfg.d_cap is not None:
        d0 = min(d0, cfg.d_cap)
    algo = _resolve_algorithm(q, cfg)
    if algo == "exact":
        result = score_exact(r, cfg.gamma, d0)
    elif algo == "trna":
        result = score_trna(r, cfg.gamma, cfg.epsilon, d0)
    else:
        result = score_ba(r, cfg.gamma, cfg.epsilon, d0)
    mask = np.zeros(q.size, dtype=np.uint8)
    mask[r.order[: result.tau_hat]] = 1
    return mask, result


def expected_dice_oracle(q, mask, gamma: float = 0.0,
                         zero_over_zero: str = "zero") -> float:
    """Expected Dice of a fixed mask by exhaustive enumeration over all 2^d
    label outcomes.  Test oracle; d <= 20."""
    q = validate_probs(q)
    d = q.size
    if d > 20:
        raise ValueError(f"enumeration oracle limited to d <= 20, got {d}")
    mask = np.asarray(mask, dtype=np.float64)
    bits = (np.arange(1 << d)[:, None] >> np.arange(d)[None, :]) & 1
    probs = np.prod(np.where(bits, q, 1.0 - q), axis=1)
    inter = bits @ mask
    den = bits.sum(axis=1) + mask.sum() + gamma
    num = 2.0 * inter + gamma
    empty = 1.0 if zero_over_zero == "one" else 0.0
    ratio = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), empty)
    return float(probs @ ratio)
