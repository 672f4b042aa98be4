"""Quadratic Wasserstein distance on small discrete supports.

Two independent routes: the exact 1D quantile (CDF-merging) coupling, and a
linear program over the coupling polytope for small supports in any
dimension.  Agreement between the two on 1D instances is a test invariant.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linprog
from scipy.spatial.distance import cdist

from .errors import SizeError, SpaceMismatchError
from .measures import DiscreteMeasure

LP_SUPPORT_CAP = 64


def w2_1d(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Exact order-two Wasserstein distance between 1D measures via the
    monotone quantile coupling.  The supports may differ.  Instances of
    higher dimension are routed to the linear program when small enough."""
    if mu.space.dim != 1 or nu.space.dim != 1:
        if (np.count_nonzero(mu.weights) <= LP_SUPPORT_CAP
                and np.count_nonzero(nu.weights) <= LP_SUPPORT_CAP):
            return w2_small_lp(mu, nu)
        raise SpaceMismatchError("w2_1d needs 1D measures (support too large "
                                 "for the linear-program fallback)")
    xs, xw = _support_1d(mu)
    ys, yw = _support_1d(nu)
    cost = 0.0
    i = j = 0
    mass_i, mass_j = xw[0], yw[0]
    while True:
        step = min(mass_i, mass_j)
        cost += step * (xs[i] - ys[j]) ** 2
        mass_i -= step
        mass_j -= step
        if mass_i <= 0.0:
            i += 1
            if i == len(xs):
                break
            mass_i = xw[i]
        if mass_j <= 0.0:
            j += 1
            if j == len(ys):
                break
            mass_j = yw[j]
    return math.sqrt(max(cost, 0.0))


def _support_1d(m: DiscreteMeasure):
    mask = m.weights > 0.0
    return m.space.points[mask, 0], m.weights[mask]


def w2_small_lp(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Optimal value of the transport linear program with squared Euclidean
    cost, restricted to supports of at most 64 points each."""
    xs = mu.space.points[mu.weights > 0.0]
    ys = nu.space.points[nu.weights > 0.0]
    xw = mu.weights[mu.weights > 0.0]
    yw = nu.weights[nu.weights > 0.0]
    if len(xs) > LP_SUPPORT_CAP or len(ys) > LP_SUPPORT_CAP:
        raise SizeError(f"supports exceed {LP_SUPPORT_CAP} points")
    if xs.shape[1] != ys.shape[1]:
        raise SpaceMismatchError("measures live in different dimensions")
    n, m = len(xs), len(ys)
    cost = cdist(xs, ys, metric="sqeuclidean").ravel()
    a_eq = np.zeros((n + m, n * m))
    for i in range(n):
        a_eq[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        a_eq[n + j, j::m] = 1.0
    res = linprog(cost, A_eq=a_eq, b_eq=np.concatenate([xw, yw]),
                  bounds=(0.0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"transport LP failed: {res.message}")
    return math.sqrt(max(float(res.fun), 0.0))
