"""MAP discrete prior built from a converged variational state."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .vbdp import VBState

ZERO = -1  # assignment code for the point mass at zero


@dataclass(frozen=True)
class MapPrior:
    """Point mass at zero plus T located atoms, weights summing to one."""

    zero_weight: float
    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if loc.shape != w.shape or loc.ndim != 1:
            raise ValueError("locations and weights must be 1-D and of equal length")
        if self.zero_weight < 0 or np.any(w < 0):
            raise ValueError("prior weights must be non-negative")
        if abs(self.zero_weight + w.sum() - 1.0) > 1e-12:
            raise ValueError("prior weights must sum to 1")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in zip(self.locations, self.weights)]

    def support_size(self, include_zero: bool = False) -> int:
        """Number of located atoms carrying positive weight."""
        k = int(np.count_nonzero(self.weights > 0))
        return k + int(include_zero and self.zero_weight > 0)

    def to_dict(self) -> dict:
        return {"zero_weight": float(self.zero_weight), "atoms": [list(a) for a in self.atoms]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "MapPrior":
        atoms = np.asarray(d["atoms"], dtype=float).reshape(-1, 2)
        return cls(float(d["zero_weight"]), atoms[:, 0], atoms[:, 1])

    @classmethod
    def from_json(cls, s: str) -> "MapPrior":
        return cls.from_dict(json.loads(s))


def atom_posterior(phi_row, p, m):
    """Approximate posterior of the atom behind one observation.

    Returns ``(zero_mass, atom_masses)``: the mass at 0 is sum_t phi_t p_t and
    the mass at m_t is phi_t (1 - p_t).
    """
    phi_row = np.asarray(phi_row, dtype=float)
    p = np.asarray(p, dtype=float)
    return float(np.sum(phi_row * p)), phi_row * (1.0 - p)


def _preference_order(m) -> np.ndarray:
    # ties: prefer smaller |location|, then smaller index
    m = np.asarray(m, dtype=float)
    return np.lexsort((np.arange(m.size), np.abs(m)))


def map_assign(zero_mass: float, atom_masses, m) -> int:
    """Index of the most probable atom, or ``ZERO`` for the point mass.

    Exact ties go to zero first, then to the atom with smallest |location|.
    """
    atom_masses = np.asarray(atom_masses, dtype=float)
    if atom_masses.size == 0:
        return ZERO
    order = _preference_order(m)
    j = int(order[np.argmax(atom_masses[order])])
    return ZERO if zero_mass >= atom_masses[j] else j


def map_assignments(state: VBState) -> np.ndarray:
    """Vectorized ``map_assign`` over all observations."""
    zero = np.sum(state.phi * state.p, axis=1)
    masses = state.phi * (1.0 - state.p)
    order = _preference_order(state.m)
    best = order[np.argmax(masses[:, order], axis=1)]
    top = masses[np.arange(masses.shape[0]), best]
    return np.where(zero >= top, ZERO, best)


def build_map_prior(state: VBState, n: int | None = None) -> MapPrior:
    """Empirical frequencies of the per-observation MAP atoms."""
    n = state.n if n is None else int(n)
    if n <= 0:
        raise ValueError("cannot build a prior from zero observations")
    if n != state.n:
        raise ValueError(f"n={n} does not match the state ({state.n} rows)")
    assign = map_assignments(state)
    counts = np.bincount(assign[assign != ZERO], minlength=state.T).astype(float)
    n_zero = int(np.count_nonzero(assign == ZERO))
    return MapPrior(n_zero / n, np.array(state.m, dtype=float), counts / n)
