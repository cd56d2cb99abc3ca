"""Coordinate-ascent variational inference for a truncated stick-breaking
Dirichlet process mixture whose base measure has a point mass at zero.

Generative model (truncation level T)::

    V_t ~ Beta(1, alpha0),  t < T,   V_T = 1
    xi_t ~ Bernoulli(w0)
    eta_t = 0 if xi_t else N(0, sigma0_sq)
    Z_i ~ Multinomial(pi(V)),  X_i ~ N(eta_{Z_i}, 1)

The factorized variational family keeps, per cluster, a spike probability
``p``, slab mean ``m`` and variance ``tau_sq``; Beta parameters
``gamma1``/``gamma2`` for the sticks; and responsibilities ``phi``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .numerics import digamma, log_sum_exp, sigmoid

logger = logging.getLogger(__name__)

_P_FLOOR = np.finfo(float).tiny
_P_CEIL = 1.0 - np.finfo(float).epsneg
_JITTER = 1e-3


@dataclass(frozen=True)
class Hyperparams:
    """Fixed knobs of a fit. Defaults are the benchmark settings with sigma0 = 4."""

    T: int = 10
    alpha0: float = 1.0
    w0: float = 0.01
    sigma0_sq: float = 16.0
    kappa: float = 0.99
    tol: float = 1e-6
    max_iter: int = 500
    seed: int = 0

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 2:
            raise ValueError(f"T must be an integer >= 2, got {self.T}")
        if not self.alpha0 > 0:
            raise ValueError("alpha0 must be positive")
        if not 0 < self.w0 < 1:
            raise ValueError("w0 must lie in (0, 1)")
        if not self.sigma0_sq > 0:
            raise ValueError("sigma0_sq must be positive")
        if not 0 < self.kappa <= 1:
            raise ValueError("kappa must lie in (0, 1]")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    def with_sigma0(self, sigma0: float) -> "Hyperparams":
        return replace(self, sigma0_sq=float(sigma0) ** 2)


@dataclass
class VBState:
    phi: np.ndarray
    p: np.ndarray
    m: np.ndarray
    tau_sq: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    n_iter: int = 0
    converged: bool = False
    delta: float = field(default=np.inf)

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    @property
    def T(self) -> int:
        return self.phi.shape[1]


def _as_observations(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("observations must be a 1-D vector")
    if x.size == 0:
        raise ValueError("need at least one observation")
    if not np.all(np.isfinite(x)):
        raise ValueError("observations must be finite")
    return x


def init_phi(x, h: Hyperparams) -> np.ndarray:
    """Initial responsibilities from empirical-quantile centers.

    Centers sit at the sample quantiles of levels (t - 0.5)/T and each row is
    a softmax of -(x_i - c_t)^2 / 2. Seeded uniform jitter in [0, 1e-3] is
    then added and rows renormalized. Jitter rows are handed out in sorted
    order of ``x`` so the result does not depend on the input ordering.
    """
    x = _as_observations(x)
    T = h.T
    centers = np.quantile(x, (np.arange(1, T + 1) - 0.5) / T)
    logits = -0.5 * (x[:, None] - centers[None, :]) ** 2
    phi = np.exp(logits - log_sum_exp(logits, axis=1)[:, None])
    rng = np.random.Generator(np.random.PCG64(int(h.seed)))
    jitter = rng.uniform(0.0, _JITTER, size=phi.shape)
    order = np.argsort(x, kind="stable")
    phi[order] += jitter
    return phi / phi.sum(axis=1, keepdims=True)


def init_state(x, h: Hyperparams) -> VBState:
    x = _as_observations(x)
    phi = init_phi(x, h)
    T = h.T
    return VBState(
        phi=phi,
        p=np.full(T, h.w0),
        m=np.zeros(T),
        tau_sq=np.full(T, h.sigma0_sq),
        gamma1=np.ones(T - 1),
        gamma2=np.full(T - 1, h.alpha0),
    )


def update_cluster(x, phi, h: Hyperparams):
    """Closed-form update of (m, tau_sq, p) for one column or all columns.

    ``phi`` may be a length-n column or an n x T matrix. With A = sum phi*x and
    B = sum phi, m = s A/(s B + 1), tau_sq = s/(s B + 1) and the spike
    probability is sigmoid(logit(w0) + log(s B + 1)/2 - s A^2 / (2(s B + 1)))
    where s = sigma0_sq.
    """
    x = np.asarray(x, dtype=float)
    phi = np.asarray(phi, dtype=float)
    w = phi if phi.ndim == 2 else phi[:, None]
    A = np.sum(w * x[:, None], axis=0)
    B = np.sum(w, axis=0)
    s = h.sigma0_sq
    denom = s * B + 1.0
    m = s * A / denom
    tau_sq = s / denom
    arg = np.log(h.w0) - np.log1p(-h.w0) + 0.5 * np.log(denom) - s * A**2 / (2.0 * denom)
    # keep p strictly inside (0, 1) so both p and 1 - p stay usable
    p = np.clip(sigmoid(arg), _P_FLOOR, _P_CEIL)
    if phi.ndim == 1:
        return float(m[0]), float(tau_sq[0]), float(p[0])
    return m, tau_sq, p


def update_sticks(phi, h: Hyperparams):
    """Beta parameters for V_1..V_{T-1}.

    gamma1[t] = 1 + sum_i phi[i, t];  gamma2[t] = alpha0 + sum_i sum_{j>t} phi[i, j].
    """
    phi = np.asarray(phi, dtype=float)
    col = np.sum(phi, axis=0)
    T = phi.shape[1]
    # tail[t] = mass of clusters strictly above t
    tail = np.concatenate([np.cumsum(col[::-1])[::-1][1:], [0.0]])
    gamma1 = 1.0 + col[: T - 1]
    gamma2 = h.alpha0 + tail[: T - 1]
    return gamma1, gamma2


def expected_log_sticks(gamma1, gamma2, digamma_fn=digamma) -> np.ndarray:
    """E_q[log pi_t] for t = 1..T, with V_T = 1."""
    gamma1 = np.asarray(gamma1, dtype=float)
    gamma2 = np.asarray(gamma2, dtype=float)
    total = digamma_fn(gamma1 + gamma2)
    e_log_v = np.append(digamma_fn(gamma1) - total, 0.0)
    e_log_1mv = digamma_fn(gamma2) - total
    return e_log_v + np.concatenate([[0.0], np.cumsum(e_log_1mv)])


def assignment_scores(x, state: VBState, digamma_fn=digamma) -> np.ndarray:
    """Unnormalized log responsibilities S[i, t]."""
    x = np.asarray(x, dtype=float)
    stick = expected_log_sticks(state.gamma1, state.gamma2, digamma_fn)
    keep = 1.0 - state.p
    return (
        stick[None, :]
        + (keep * state.m)[None, :] * x[:, None]
        - 0.5 * (keep * (state.m**2 + state.tau_sq))[None, :]
    )


def update_assignments(x, state: VBState, h: Optional[Hyperparams] = None) -> np.ndarray:
    S = assignment_scores(x, state)
    return np.exp(S - log_sum_exp(S, axis=1)[:, None])


def fit(
    x,
    h: Hyperparams,
    phi_init: Optional[np.ndarray] = None,
    callback: Optional[Callable[[VBState], None]] = None,
) -> VBState:
    """Run coordinate ascent until max |delta phi| <= h.tol or h.max_iter sweeps.

    Each sweep updates every cluster's (m, tau_sq, p), then the sticks, then
    the responsibilities, each step using the freshest values. Hitting the
    iteration cap is not an error: the returned state has ``converged=False``.
    ``callback`` is invoked with the state after every sweep.
    """
    x = _as_observations(x)
    # work in sorted order so every n-indexed sum has a fixed reduction order
    order = np.argsort(x, kind="stable")
    xs = x[order]
    state = init_state(xs, h)
    if phi_init is not None:
        phi_init = np.asarray(phi_init, dtype=float)
        if phi_init.shape != state.phi.shape:
            raise ValueError(f"phi_init must have shape {state.phi.shape}")
        phi0 = phi_init[order]
        state.phi = phi0 / phi0.sum(axis=1, keepdims=True)

    def unsorted(a):
        out = np.empty_like(a)
        out[order] = a
        return out

    for it in range(1, h.max_iter + 1):
        state.m, state.tau_sq, state.p = update_cluster(xs, state.phi, h)
        state.gamma1, state.gamma2 = update_sticks(state.phi, h)
        phi_new = update_assignments(xs, state, h)
        state.delta = float(np.max(np.abs(phi_new - state.phi)))
        state.phi = phi_new
        state.n_iter = it
        if state.delta <= h.tol:
            state.converged = True
        if callback is not None:
            callback(replace(state, phi=unsorted(state.phi)))
        if state.converged:
            break

    if not state.converged:
        logger.warning(
            "variational fit stopped at max_iter=%d with max |dphi|=%.3g",
            h.max_iter,
            state.delta,
        )
    state.phi = unsorted(state.phi)
    return state
