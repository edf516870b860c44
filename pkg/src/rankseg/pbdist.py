"""Poisson-binomial distribution numerics.

A Poisson-binomial variable is the sum of independent, non-identically
distributed Bernoulli trials.  This module provides exact PMFs (direct
convolution and FFT of the characteristic function), closed-form moments,
leave-one-out PMFs, and a skew-corrected normal approximation to the CDF
together with its quantile function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

# Cap on the O(d^2) direct-convolution path so it cannot silently dominate
# runtime; overridable per call.
DP_SIZE_CAP = 5000

# Magnitudes below this are treated as exact zeros in FFT-derived PMFs.
FFT_CLAMP = 1e-14


class SizeCapError(ValueError):
    """Probability vector too long for the direct-convolution path."""


class DegenerateVarianceError(ValueError):
    """Zero-variance count passed to a normal-approximation routine."""


def validate_probs(probs) -> np.ndarray:
    """Validate and convert a success-probability vector to float64."""
    q = np.asarray(probs, dtype=np.float64)
    if q.ndim != 1:
        raise ValueError(f"expected a 1-D probability vector, got shape {q.shape}")
    if q.size:
        if not np.all(np.isfinite(q)):
            raise ValueError("probabilities must be finite")
        if q.min() < 0.0 or q.max() > 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
    return q


@dataclass(frozen=True)
class PBMoments:
    """Mean, variance, third central moment and skewness of the count.

    ``eta`` is None when the variance is zero (skewness undefined).
    """

    mu: float
    sigma2: float
    m3: float
    eta: float | None

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def pb_moments(q) -> PBMoments:
    """Closed-form moments: mu = sum q, sigma2 = sum q(1-q), m3 = sum q(1-q)(1-2q)."""
    q = validate_probs(q)
    v = q * (1.0 - q)
    mu = float(q.sum())
    sigma2 = float(v.sum())
    m3 = float((v * (1.0 - 2.0 * q)).sum())
    eta = m3 / sigma2**1.5 if sigma2 > 0.0 else None
    return PBMoments(mu=mu, sigma2=sigma2, m3=m3, eta=eta)


def pb_pmf_exact(q, cap: int = DP_SIZE_CAP) -> np.ndarray:
    """Exact PMF by direct convolution of d Bernoulli laws, O(d^2)."""
    q = validate_probs(q)
    if q.size > cap:
        raise SizeCapError(
            f"direct convolution capped at d <= {cap}, got d = {q.size}"
        )
    mass = np.ones(1)
    for p in q:
        nxt = np.zeros(mass.size + 1)
        nxt[:-1] = mass * (1.0 - p)
        nxt[1:] += mass * p
        mass = nxt
    return mass


def _next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 0).bit_length()


def _char_function(q: np.ndarray, n: int) -> np.ndarray:
    """Characteristic-function values prod_j (1 - q_j + q_j z_t) at the
    non-negative FFT frequencies t = 0 .. n//2, oriented so that the inverse
    real FFT recovers the PMF directly."""
    t = np.arange(n // 2 + 1)
    z = np.exp(-2j * np.pi * t / n)
    out = np.ones(t.size, dtype=np.complex128)
    # Chunked product keeps the intermediate (chunk, n//2+1) matrix small.
    for start in range(0, q.size, 256):
        block = q[start : start + 256]
        out *= np.prod(1.0 - block[:, None] + block[:, None] * z[None, :], axis=0)
    return out


def _clamp_pmf(mass: np.ndarray) -> np.ndarray:
    mass[np.abs(mass) < FFT_CLAMP] = 0.0
    np.maximum(mass, 0.0, out=mass)
    return mass


def pb_pmf_fft(q) -> np.ndarray:
    """Exact PMF via FFT of the characteristic function.

    Transform length is the smallest power of two >= d + 1; tiny values and
    negative round-off are clamped to zero.
    """
    q = validate_probs(q)
    d = q.size
    if d == 0:
        return np.ones(1)
    n = _next_pow2(d + 1)
    mass = np.fft.irfft(_char_function(q, n), n)[: d + 1]
    return _clamp_pmf(mass)


def pb_pmf_without(q, j: int) -> np.ndarray:
    """PMF of the count with the j-th trial removed, length d (counts 0..d-1).

    Recomputed on the reduced vector; deconvolving the full PMF divides by
    (1 - q_j) and is unstable for q_j near 1.
    """
    q = validate_probs(q)
    if not 0 <= j < q.size:
        raise IndexError(f"index {j} out of range for d = {q.size}")
    reduced = np.delete(q, j)
    if reduced.size <= DP_SIZE_CAP and reduced.size <= 64:
        return pb_pmf_exact(reduced)
    return pb_pmf_fft(reduced)


def _psi(m: PBMoments, u: np.ndarray) -> np.ndarray:
    """Skew-corrected normal CDF: Phi(u) + eta (1 - u^2) phi(u) / 6."""
    eta = m.eta if m.eta is not None else 0.0
    return norm.cdf(u) + eta * (1.0 - u * u) * norm.pdf(u) / 6.0


def rna_cdf(m: PBMoments, l) -> float | np.ndarray:
    """Refined normal approximation to P(count <= l), clamped to [0, 1]."""
    if m.sigma2 <= 0.0:
        raise DegenerateVarianceError(
            "refined normal approximation undefined for zero variance; "
            "use the exact PMF"
        )
    u = (np.asarray(l, dtype=np.float64) + 0.5 - m.mu) / m.sigma
    out = np.clip(_psi(m, u), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def rna_pmf(m: PBMoments, lo: int, hi: int) -> np.ndarray:
    """Approximate PMF over counts lo..hi as differences of the clamped
    approximate CDF; negative differences are clamped to zero without
    renormalization."""
    ls = np.arange(lo - 1, hi + 1)
    cdf = rna_cdf(m, ls)
    return np.maximum(np.diff(cdf), 0.0)


def rna_quantile(m: PBMoments, p: float) -> float:
    """Inverse of the skew-corrected CDF, by bisection to 1e-10 in u."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile level must be in (0, 1), got {p}")
    if m.sigma2 <= 0.0:
        raise DegenerateVarianceError("quantile undefined for zero variance")
    center = norm.ppf(p)
    lo, hi = center - 1.0, center + 1.0
    width = 1.0
    while _psi(m, np.float64(lo)) > p:
        width *= 2.0
        lo -= width
    while _psi(m, np.float64(hi)) < p:
        width *= 2.0
        hi += width
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if _psi(m, np.float64(mid)) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
