"""Log-space categorical belief over the joint state space.

The belief is a flat array of log-probabilities addressed by the space's
row-major strides. Zero-probability states are stored as -inf and excluded
from entropy sums; NaN never appears. All entropies are natural-log (nats).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, ExpansionRefused
from .labels import LabelMap, labels_to_distribution
from .state import Dimension, StateSpace

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class PriorVector:
    """Per-dimension prior over that dimension's values."""

    dim_id: str
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size < 2:
            raise ConfigError("prior must be a vector over at least 2 values")
        if np.any(probs < 0) or not np.isfinite(probs).all():
            raise ConfigError("prior entries must be finite and non-negative")
        if abs(probs.sum() - 1.0) > _NORM_TOL:
            raise ConfigError(f"prior for {self.dim_id!r} sums to {probs.sum()}, not 1")
        probs.setflags(write=False)


def prior_from_labels(dim: Dimension, labels: Sequence[str], label_map: LabelMap) -> PriorVector:
    """Build a dimension prior by normalizing one label per value."""
    if len(labels) != dim.size:
        raise ConfigError(
            f"dimension {dim.id!r} has {dim.size} values but got {len(labels)} labels"
        )
    return PriorVector(dim.id, labels_to_distribution(labels, label_map))


def _log(p: np.ndarray) -> np.ndarray:
    """log with 0 -> -inf and no warnings."""
    out = np.full_like(p, -np.inf, dtype=np.float64)
    np.log(p, out=out, where=p > 0)
    return out


@dataclass(frozen=True)
class Belief:
    """Normalized posterior over the joint states, stored as log-probabilities."""

    space: StateSpace
    logp: np.ndarray

    def __post_init__(self):
        logp = np.asarray(self.logp, dtype=np.float64)
        if logp.shape != (self.space.total_states,):
            raise ConfigError("log-probability table does not match the state space")
        if np.isnan(logp).any():
            raise ConfigError("belief contains NaN log mass")
        object.__setattr__(self, "logp", logp)
        logp.setflags(write=False)

    @classmethod
    def from_logits(cls, space: StateSpace, logits: np.ndarray) -> "Belief":
        """Normalize arbitrary finite-or--inf logits into a belief."""
        logits = np.asarray(logits, dtype=np.float64)
        z = _logsumexp(logits)
        if z == -np.inf:
            raise ConfigError("cannot normalize: no state has positive mass")
        return cls(space, logits - z)

    @classmethod
    def point_mass(cls, space: StateSpace, flat: int) -> "Belief":
        logp = np.full(space.total_states, -np.inf)
        logp[flat] = 0.0
        return cls(space, logp)

    def probs(self) -> np.ndarray:
        return np.exp(self.logp)


def _logsumexp(logx: np.ndarray) -> float:
    m = logx.max()
    if m == -np.inf:
        return -np.inf
    return float(m + np.log(np.exp(logx - m).sum()))


def init_belief(priors: Sequence[PriorVector], space: StateSpace) -> Belief:
    """Product prior over the joint space: logp(state) = sum_j log prior_j(value_j).

    Expects exactly one prior per dimension, in dimension order.
    """
    if len(priors) != space.n_dims:
        raise ConfigError(
            f"need {space.n_dims} priors (one per dimension), got {len(priors)}"
        )
    logp = np.zeros(space.total_states)
    for j, prior in enumerate(priors):
        if prior.dim_id != space.dims[j].id:
            raise ConfigError(
                f"prior order mismatch: position {j} expects {space.dims[j].id!r}, "
                f"got {prior.dim_id!r}"
            )
        if prior.probs.size != space.shape[j]:
            raise ConfigError(f"prior for {prior.dim_id!r} has wrong length")
        logp += _log(prior.probs)[space.value_indices(j)]
    return Belief.from_logits(space, logp)


def entropy(b: Belief) -> float:
    """Shannon entropy -sum p log p in nats, with 0 log 0 = 0."""
    mask = b.logp > -np.inf
    p = np.exp(b.logp[mask])
    return float(-(p * b.logp[mask]).sum())


def marginal(b: Belief, dim_id: str) -> np.ndarray:
    """Marginal probability vector of one dimension."""
    j = b.space.dim_position(dim_id)
    p = b.probs().reshape(b.space.shape)
    axes = tuple(a for a in range(b.space.n_dims) if a != j)
    return p.sum(axis=axes) if axes else p


def map_state(b: Belief) -> dict[str, str]:
    """Argmax assignment (dim id -> value id); ties break to the lowest flat index."""
    flat = int(np.argmax(b.logp))
    return b.space.assignment_ids(flat)


def map_flat_index(b: Belief) -> int:
    return int(np.argmax(b.logp))


def extend_belief(
    b: Belief,
    new_dim: Dimension,
    new_prior: PriorVector,
    *,
    state_cap: int | None = None,
) -> Belief:
    """Append a dimension under independence: new(state, v) = old(state) * prior(v).

    The extended space keeps the old dimensions' order and appends the new
    one last, so old flat indices map to contiguous blocks.
    """
    if new_prior.dim_id != new_dim.id:
        raise ConfigError("prior does not belong to the new dimension")
    if new_prior.probs.size != new_dim.size:
        raise ConfigError("prior length does not match the new dimension")
    extended_total = b.space.total_states * new_dim.size
    if state_cap is not None and extended_total > state_cap:
        raise ExpansionRefused(
            f"extension to {extended_total} states exceeds the cap of {state_cap}"
        )
    space = b.space.extended(new_dim)
    logp = (b.logp[:, None] + _log(new_prior.probs)[None, :]).reshape(-1)
    return Belief.from_logits(space, logp)
