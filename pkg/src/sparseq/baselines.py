"""Thresholding estimators used as comparison methods."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm


@dataclass(frozen=True)
class ThresholdSpec:
    kind: str
    q: float = 0.1

    def __post_init__(self):
        if self.kind not in ("hard", "soft", "sure", "fdr"):
            raise ValueError(f"unknown threshold kind {self.kind!r}")
        if self.kind == "fdr" and not 0 < self.q < 1:
            raise ValueError("FDR level q must lie in (0, 1)")

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "soft":
            return soft_threshold(x, universal_lambda(x.size))
        if self.kind == "hard":
            return hard_threshold(x, universal_lambda(x.size))
        if self.kind == "sure":
            return sure_estimate(x)
        return fdr_estimate(x, self.q)


def soft_threshold(x, lam: float) -> np.ndarray:
    if lam < 0:
        raise ValueError("threshold must be non-negative")
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - lam, 0.0)


def hard_threshold(x, lam: float) -> np.ndarray:
    """Keep x_i when |x_i| > lam (strictly), else 0."""
    if lam < 0:
        raise ValueError("threshold must be non-negative")
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) > lam, x, 0.0)


def universal_lambda(n: float) -> float:
    """sqrt(2 log n)."""
    if n < 2:
        raise ValueError("universal threshold needs n >= 2")
    return float(np.sqrt(2.0 * np.log(n)))


def sure_risk(x, lam: float) -> float:
    """Stein unbiased risk of soft thresholding at ``lam`` (unit noise)."""
    a = np.abs(np.asarray(x, dtype=float))
    return float(a.size - 2 * np.count_nonzero(a <= lam) + np.sum(np.minimum(a * a, lam * lam)))


def sure_lambda(x) -> float:
    """Soft threshold minimizing SURE over the candidates {0} U {|x_i|}.

    Ties go to the smaller threshold. O(n log n).
    """
    a = np.sort(np.abs(np.asarray(x, dtype=float)))
    n = a.size
    if n < 2:
        raise ValueError("SURE threshold needs n >= 2")
    cand = np.concatenate([[0.0], a])
    count = np.searchsorted(a, cand, side="right")
    csum = np.concatenate([[0.0], np.cumsum(a * a)])
    risk = n - 2 * count + csum[count] + (n - count) * cand * cand
    return float(cand[np.argmin(risk)])


def sure_estimate(x) -> np.ndarray:
    return soft_threshold(x, sure_lambda(x))


def fdr_threshold(x, q: float) -> float:
    """Step-up FDR threshold on two-sided normal p-values.

    With |x| sorted in decreasing order and p_k = 2(1 - Phi(|x|_(k))), take the
    largest k with p_k <= q k / n and return |x|_(k); ``inf`` when none qualify.
    """
    if not 0 < q < 1:
        raise ValueError("FDR level q must lie in (0, 1)")
    a = np.sort(np.abs(np.asarray(x, dtype=float)))[::-1]
    n = a.size
    if n == 0:
        return float("inf")
    pvals = 2.0 * norm.sf(a)
    ok = np.flatnonzero(pvals <= q * np.arange(1, n + 1) / n)
    if ok.size == 0:
        return float("inf")
    return float(a[ok[-1]])


def fdr_estimate(x, q: float) -> np.ndarray:
    """Hard threshold keeping |x_i| >= the FDR threshold."""
    x = np.asarray(x, dtype=float)
    lam = fdr_threshold(x, q)
    return np.where(np.abs(x) >= lam, x, 0.0)
