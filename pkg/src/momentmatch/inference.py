"""Exact inference by enumeration: clamped log-partition functions, their
gradients, normalized distributions and single-datum log-probabilities.

Every log-partition value here is ``log sum exp(log_h + theta . T)`` over the
configurations agreeing with a clamp.  An empty clamp gives ``A(theta)``;
clamping the conditioning variables gives ``A(x, theta)``; clamping the
conditioning and observed variables gives ``A(x, y, theta)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import Configuration, FamilySpec, as_theta
from .errors import DegenerateClampError


def scores(spec: FamilySpec, theta) -> np.ndarray:
    """Unnormalized log weights ``log_h + T theta`` in enumeration order."""
    return spec.log_h + spec.T @ as_theta(spec, theta)


def logsumexp(s: np.ndarray) -> float:
    """Max-shifted log-sum-exp; -inf for an empty or all -inf input."""
    s = s[np.isfinite(s)]
    if s.size == 0:
        return -np.inf
    m = s.max()
    return float(m + np.log(np.sum(np.exp(s - m))))


def log_partition(spec: FamilySpec, clamp: Mapping[str, int], theta) -> float:
    idx = spec.clamp_indices(clamp)
    return logsumexp(scores(spec, theta)[idx])


def _clamped_probs(spec, clamp, theta):
    idx = spec.clamp_indices(clamp)
    s = scores(spec, theta)[idx]
    keep = np.isfinite(s)
    if not keep.any():
        raise DegenerateClampError(f"every configuration compatible with {dict(clamp)} is forbidden")
    idx, s = idx[keep], s[keep]
    a = logsumexp(s)
    return idx, s - a


def grad_log_partition(spec: FamilySpec, clamp: Mapping[str, int], theta) -> np.ndarray:
    """Expected sufficient statistics under the clamped conditional distribution."""
    idx, logp = _clamped_probs(spec, clamp, theta)
    return np.exp(logp) @ spec.T[idx]


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    spec: FamilySpec
    indices: np.ndarray
    log_probs: np.ndarray

    @property
    def support(self) -> list[Configuration]:
        return [self.spec.configuration(i) for i in self.indices]

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_probs)

    def expect(self, values: np.ndarray) -> np.ndarray:
        """Expectation of a table indexed by enumeration order (e.g. ``spec.T``)."""
        return self.probs @ np.asarray(values)[self.indices]

    def prob_of(self, config: Mapping[str, int]) -> float:
        hit = np.flatnonzero(self.indices == self.spec.flat_index(config))
        return float(np.exp(self.log_probs[hit[0]])) if hit.size else 0.0

    def marginal(self, names) -> dict[tuple[int, ...], float]:
        """Marginal probabilities over ``names``, keyed by index tuples."""
        cols = [self.spec.names.index(n) for n in names]
        out: dict[tuple[int, ...], float] = {}
        for i, p in zip(self.indices, self.probs):
            key = tuple(int(k) for k in self.spec.grid[i, cols])
            out[key] = out.get(key, 0.0) + float(p)
        return out


def distribution(spec: FamilySpec, clamp: Mapping[str, int], theta) -> DiscreteDistribution:
    """Distribution over full configurations agreeing with ``clamp``.

    Forbidden configurations are dropped from the support.
    """
    idx, logp = _clamped_probs(spec, clamp, theta)
    return DiscreteDistribution(spec, idx, logp)


def log_prob_datum(spec: FamilySpec, row: Mapping[str, int], theta) -> float:
    """Log-probability of one row: the objective for a single datum.

    PLAIN and CONDITIONAL use ``log_h + theta.T - A``; HIDDEN and
    CONDITIONAL_HIDDEN marginalize the hidden variables, ``A(row) - A(cond)``.
    """
    spec.check_row(row)
    theta = as_theta(spec, theta)
    cond = spec.cond_part(row)
    variant = spec.variant()
    if variant.has_hidden:
        top = log_partition(spec, row, theta)
    else:
        i = spec.flat_index(row)
        top = spec.log_h[i] + spec.T[i] @ theta
    if top == -np.inf:
        return -np.inf
    return float(top - log_partition(spec, cond, theta))
