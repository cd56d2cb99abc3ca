"""Posterior-mean estimate of a sparse mean vector under the MAP prior."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .numerics import log_sum_exp
from .prior_map import MapPrior, build_map_prior
from .vbdp import Hyperparams, VBState, fit


@dataclass(frozen=True)
class CoordinatePosterior:
    zero_weight: float
    atom_weights: np.ndarray
    atoms: np.ndarray

    def mean(self) -> float:
        return posterior_mean(self)

    def to_dict(self) -> dict:
        return {
            "zero_weight": float(self.zero_weight),
            "atoms": [[float(a), float(w)] for a, w in zip(self.atoms, self.atom_weights)],
        }


@dataclass
class Estimate:
    x: np.ndarray
    theta_hat: np.ndarray
    prior: MapPrior
    state: VBState
    kappa: float
    per_coordinate: Optional[list[CoordinatePosterior]] = field(default=None, repr=False)

    @property
    def converged(self) -> bool:
        return self.state.converged

    @property
    def n_iter(self) -> int:
        return self.state.n_iter

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "x", "theta_hat"])
        for i, (xi, ti) in enumerate(zip(self.x, self.theta_hat)):
            w.writerow([i, repr(float(xi)), repr(float(ti))])
        return buf.getvalue()

    def to_dict(self, include_posteriors: bool = False) -> dict:
        d = {
            "n": int(self.x.size),
            "converged": bool(self.converged),
            "iterations": int(self.n_iter),
            "kappa": float(self.kappa),
            "prior": self.prior.to_dict(),
            "x": [float(v) for v in self.x],
            "theta_hat": [float(v) for v in self.theta_hat],
        }
        if include_posteriors:
            cps = self.per_coordinate
            if cps is None:
                cps = [coordinate_posterior(xi, self.prior, self.kappa) for xi in self.x]
            d["posteriors"] = [cp.to_dict() for cp in cps]
        return d

    def to_json(self, include_posteriors: bool = False, **kwargs) -> str:
        return json.dumps(self.to_dict(include_posteriors), **kwargs)


def _log_prior(g: MapPrior) -> np.ndarray:
    w = np.concatenate([[g.zero_weight], g.weights])
    if not np.any(w > 0):
        raise ValueError("prior has no positive weight")
    with np.errstate(divide="ignore"):
        return np.log(w)


def posterior_weights(x, g: MapPrior, kappa: float) -> np.ndarray:
    """Posterior atom weights for every coordinate, shape (n, T + 1).

    Column 0 is the point mass at zero; column t + 1 is ``g.locations[t]``.
    Computed in the log domain, so extreme ``x`` cannot overflow.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    support = np.concatenate([[0.0], g.locations])
    logw = _log_prior(g)[None, :] - 0.5 * kappa * (x[:, None] - support[None, :]) ** 2
    return np.exp(logw - log_sum_exp(logw, axis=1)[:, None])


def coordinate_posterior(x_i: float, g: MapPrior, kappa: float) -> CoordinatePosterior:
    """Fractional-likelihood posterior of one mean under the discrete prior ``g``."""
    if not 0 < kappa <= 1:
        raise ValueError("kappa must lie in (0, 1]")
    w = posterior_weights([x_i], g, kappa)[0]
    return CoordinatePosterior(float(w[0]), w[1:], g.locations)


def posterior_mean(cp: CoordinatePosterior) -> float:
    return float(np.sum(cp.atom_weights * cp.atoms))


def estimate(x, h: Hyperparams, keep_posteriors: bool = False) -> Estimate:
    """Fit, extract the MAP prior, and return posterior means for every coordinate."""
    x = np.asarray(x, dtype=float)
    state = fit(x, h)
    g = build_map_prior(state, x.size)
    W = posterior_weights(x, g, h.kappa)
    theta = np.sum(W[:, 1:] * g.locations[None, :], axis=1)
    cps = None
    if keep_posteriors:
        cps = [CoordinatePosterior(float(r[0]), r[1:], g.locations) for r in W]
    return Estimate(x=x, theta_hat=theta, prior=g, state=state, kappa=h.kappa, per_coordinate=cps)
