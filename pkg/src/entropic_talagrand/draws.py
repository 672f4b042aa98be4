"""Seeded random instances for the verification suites.

Draw families are defined through continuous functions of the coordinates
(low-order Fourier tilts), so the same seed produces consistent instances
across grid resolutions.  That is what makes the two-resolution refinement
comparisons meaningful.
"""

from __future__ import annotations

import numpy as np

from .measures import DiscreteMeasure, GridSpace, ScalarField


def _draw_fourier_coeffs(rng, modes: int, amplitude: float, dim: int):
    coeffs = []
    for _ in range(dim):
        ks = np.arange(1, modes + 1)
        a = rng.normal(scale=amplitude / ks)
        b = rng.normal(scale=amplitude / ks)
        coeffs.append((a, b))
    return coeffs


def _eval_fourier(space: GridSpace, coeffs) -> np.ndarray:
    out = np.zeros(space.n_points)
    pts = space.points
    for d, (a, b) in enumerate(coeffs):
        lo, hi = space.axes[d][0], space.axes[d][-1]
        z = np.pi * (pts[:, d] - lo) / (hi - lo)
        for k in range(len(a)):
            out += a[k] * np.cos((k + 1) * z) + b[k] * np.sin((k + 1) * z)
    return out


def smooth_field(space: GridSpace, rng, amplitude: float = 0.8,
                 modes: int = 3) -> ScalarField:
    """Band-limited random field; bounded with bounded slope, so its
    exponential is log-Lipschitz."""
    coeffs = _draw_fourier_coeffs(rng, modes, amplitude, space.dim)
    return ScalarField(space, _eval_fourier(space, coeffs))


def tilted_measure(m: DiscreteMeasure, rng, amplitude: float = 0.8,
                   modes: int = 3) -> DiscreteMeasure:
    """Exponential tilt of m by a random smooth field; has finite entropy
    against m of order amplitude squared."""
    g = smooth_field(m.space, rng, amplitude=amplitude, modes=modes)
    return DiscreteMeasure.from_log_weights(m.space, m.log_weights + g.values)


def positive_field(space: GridSpace, rng, amplitude: float = 0.8,
                   modes: int = 3) -> ScalarField:
    """Strictly positive random field exp(g) with g smooth."""
    g = smooth_field(space, rng, amplitude=amplitude, modes=modes)
    return ScalarField(space, np.exp(g.values))


def nonneg_field(space: GridSpace, rng, amplitude: float = 1.0,
                 modes: int = 3) -> ScalarField:
    """Nonnegative random field with Lipschitz values: smooth field shifted
    up by its minimum."""
    g = smooth_field(space, rng, amplitude=amplitude, modes=modes)
    return ScalarField(space, g.values - g.values.min())


def random_sublevel_set(space: GridSpace, rng, amplitude: float = 1.0,
                        modes: int = 3):
    """Sub-level set of a random smooth field at a random interior quantile;
    covers both connected and disconnected shapes."""
    from .tensor_concentration import BorelSubset

    g = smooth_field(space, rng, amplitude=amplitude, modes=modes)
    quantile = rng.uniform(0.15, 0.85)
    level = np.quantile(g.values, quantile)
    membership = g.values <= level
    if not membership.any():  # degenerate quantile on a tiny grid
        membership = g.values <= g.values.min()
    return BorelSubset(space, membership)


def random_halfline_set(space: GridSpace, rng):
    """Random half line {x <= c} or {x >= c} on a 1D grid, with c placed at
    an interior quantile of the coordinate range."""
    from .tensor_concentration import BorelSubset

    x = space.points[:, 0]
    c = rng.uniform(np.quantile(x, 0.15), np.quantile(x, 0.85))
    if rng.uniform() < 0.5:
        return BorelSubset(space, x <= c)
    return BorelSubset(space, x >= c)
