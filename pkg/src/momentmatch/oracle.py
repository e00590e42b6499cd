"""Brute-force reference computations.

Deliberately naive: pure-Python loops over ``itertools.product``, direct
unshifted sums of ``exp``.  Nothing here calls the stabilized numpy path in
``inference`` or ``learning``, so agreement between the two is evidence.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import Configuration, Dataset, FamilySpec, Role
from .errors import DegenerateClampError, NoInteriorMaximumError


def _configs(spec: FamilySpec, clamp: Mapping[str, int]):
    spec.check_clamp(clamp)
    names = spec.names
    ranges = [
        [clamp[v.name]] if v.name in clamp else range(v.cardinality)
        for v in spec.variables
    ]
    strides = [math.prod(spec.shape[k + 1:]) for k in range(len(names))]
    for idx in itertools.product(*ranges):
        flat = sum(i * s for i, s in zip(idx, strides))
        yield dict(zip(names, idx)), flat


def _weight(spec, flat, theta) -> float:
    lh = float(spec.log_h[flat])
    if lh == -math.inf:
        return 0.0
    t = spec.T[flat]
    return math.exp(lh + sum(float(t[j]) * float(theta[j]) for j in range(spec.stat_dim)))


def naive_log_partition(spec: FamilySpec, clamp: Mapping[str, int], theta) -> float:
    """log of the literal sum of h * exp(theta . T); +inf if the sum overflows."""
    total = 0.0
    try:
        for _, flat in _configs(spec, clamp):
            total += _weight(spec, flat, theta)
    except OverflowError:
        return math.inf
    if math.isinf(total):
        return math.inf
    return math.log(total) if total > 0 else -math.inf


def brute_force_expectation(
    spec: FamilySpec,
    clamp: Mapping[str, int],
    theta,
    f: Callable[[Configuration], Sequence[float]] | None = None,
) -> np.ndarray:
    """Sum of normalized weight times f(config) over configurations agreeing with clamp.

    ``f`` defaults to the sufficient statistics.  Returns an all-inf vector if
    the weights overflow.
    """
    if f is None:
        def f(c):
            return spec.T[spec.flat_index(c)]
    total = 0.0
    acc = None
    try:
        for config, flat in _configs(spec, clamp):
            w = _weight(spec, flat, theta)
            val = [float(v) for v in f(config)]
            acc = [w * v for v in val] if acc is None else [a + w * v for a, v in zip(acc, val)]
            total += w
    except OverflowError:
        total = math.inf
    if math.isinf(total):
        return np.full(len(acc) if acc else spec.stat_dim, math.inf)
    if total == 0.0:
        raise DegenerateClampError(f"every configuration compatible with {dict(clamp)} is forbidden")
    return np.array([a / total for a in acc])


def naive_log_likelihood(spec: FamilySpec, dataset: Dataset, theta) -> float:
    cond = spec.names_with_role(Role.COND)
    total = 0.0
    for row in dataset.rows:
        top = naive_log_partition(spec, row, theta)
        bottom = naive_log_partition(spec, {n: row[n] for n in cond}, theta)
        total += top - bottom
    return total / len(dataset.rows)


def naive_grad_log_likelihood(spec: FamilySpec, dataset: Dataset, theta) -> np.ndarray:
    cond = spec.names_with_role(Role.COND)
    total = np.zeros(spec.stat_dim)
    for row in dataset.rows:
        total += brute_force_expectation(spec, row, theta)
        total -= brute_force_expectation(spec, {n: row[n] for n in cond}, theta)
    return total / len(dataset.rows)


def mle_oracle_1d(spec: FamilySpec, dataset: Dataset, grid=(-10.0, 10.0, 2001)) -> float:
    """Maximizer of a one-parameter likelihood by grid scan then bisection.

    Raises NoInteriorMaximumError when the gradient does not change sign on
    the grid (the maximum sits on or beyond its edge).
    """
    if spec.stat_dim != 1:
        raise ValueError("mle_oracle_1d needs stat_dim == 1")
    lo, hi, n = grid
    pts = np.linspace(lo, hi, int(n))

    def grad(t):
        return float(naive_grad_log_likelihood(spec, dataset, [t])[0])

    lls = [naive_log_likelihood(spec, dataset, [t]) for t in pts]
    k = int(np.argmax(lls))
    a, b = pts[max(k - 1, 0)], pts[min(k + 1, len(pts) - 1)]
    ga, gb = grad(a), grad(b)
    if not (ga >= 0 >= gb) or a == b:
        raise NoInteriorMaximumError(
            f"gradient does not change sign around the best grid point {pts[k]:g}"
        )
    for _ in range(200):
        mid = 0.5 * (a + b)
        gm = grad(mid)
        if abs(gm) <= 1e-10 or b - a < 1e-15:
            return mid
        if gm > 0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)
