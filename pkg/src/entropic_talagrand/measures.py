"""Probability measures on finite uniform grids, entropies, and power means.

All mass computations run in the log domain through ``logsumexp`` so that
strongly tilted inputs (noise levels down to 2**-8) neither overflow nor
underflow.  Weights below ``ZERO_WEIGHT`` count as exact zeros when deciding
absolute continuity: denormal noise must not flip a finite entropy to +inf.

Values are immutable after construction; every operation returns a new
object, so instances are safe to share across threads.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, SpaceMismatchError

ZERO_WEIGHT = 1e-300
WEIGHT_SUM_TOL = 1e-12


class GridSpace:
    """Finite product grid: one strictly increasing, uniformly spaced axis
    per dimension, flattened in C order (last axis varies fastest)."""

    def __init__(self, axes):
        axes = tuple(np.array(ax, dtype=float) for ax in axes)
        if not axes:
            raise ValueError("GridSpace needs at least one axis")
        spacing = []
        for ax in axes:
            if ax.ndim != 1 or ax.size < 1:
                raise ValueError("each axis must be a nonempty 1D array")
            if not np.all(np.isfinite(ax)):
                raise ValueError("axis coordinates must be finite")
            if ax.size == 1:
                spacing.append(1.0)
                continue
            steps = np.diff(ax)
            if np.any(steps <= 0):
                raise ValueError("axes must be strictly increasing")
            h = float(steps[0])
            if not np.allclose(steps, h, rtol=1e-9, atol=0.0):
                raise ValueError("axis spacing must be constant")
            spacing.append(h)
        for ax in axes:
            ax.setflags(write=False)
        self.axes = axes
        self.spacing = tuple(spacing)
        self.shape = tuple(ax.size for ax in axes)
        self.dim = len(axes)
        self.n_points = int(np.prod(self.shape))
        self._points = None

    @classmethod
    def regular(cls, lo: float, hi: float, n: int) -> "GridSpace":
        """Uniform 1D grid with ``n`` points on [lo, hi]."""
        if not lo < hi:
            raise ValueError("need lo < hi")
        if n < 2:
            raise ValueError("need at least 2 points")
        return cls([np.linspace(lo, hi, n)])

    @property
    def points(self) -> np.ndarray:
        """Flattened product coordinates, shape (n_points, dim)."""
        if self._points is None:
            mesh = np.meshgrid(*self.axes, indexing="ij")
            pts = np.stack(mesh, axis=-1).reshape(-1, self.dim)
            pts.setflags(write=False)
            self._points = pts
        return self._points

    def product(self, other: "GridSpace") -> "GridSpace":
        return GridSpace(self.axes + other.axes)

    def matches(self, other: "GridSpace") -> bool:
        if self is other:
            return True
        if self.shape != other.shape or self.dim != other.dim:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.axes, other.axes))

    def __repr__(self):
        return f"GridSpace(shape={self.shape})"


def _require_same_space(a, b, what: str):
    if not a.space.matches(b.space):
        raise SpaceMismatchError(f"{what}: operands live on different grids")


class DiscreteMeasure:
    """Nonnegative weights summing to one on a :class:`GridSpace`."""

    def __init__(self, space: GridSpace, weights):
        weights = np.array(weights, dtype=float).reshape(-1)
        if weights.size != space.n_points:
            raise ValueError("weight count does not match grid size")
        if not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        total = float(weights.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1 (got {total!r})")
        # Denormal residue counts as an exact zero for support questions.
        weights[weights < ZERO_WEIGHT] = 0.0
        weights.setflags(write=False)
        self.space = space
        self.weights = weights
        self._log_weights = None

    @classmethod
    def uniform(cls, space: GridSpace) -> "DiscreteMeasure":
        n = space.n_points
        return cls(space, np.full(n, 1.0 / n))

    @classmethod
    def dirac(cls, space: GridSpace, index: int) -> "DiscreteMeasure":
        w = np.zeros(space.n_points)
        w[index] = 1.0
        return cls(space, w)

    @classmethod
    def from_log_weights(cls, space: GridSpace, log_w) -> "DiscreteMeasure":
        """Normalize unnormalized log weights in the log domain."""
        log_w = np.asarray(log_w, dtype=float)
        log_z = logsumexp(log_w)
        if not np.isfinite(log_z):
            raise ValueError("log weights have no finite mass")
        return cls(space, np.exp(log_w - log_z))

    @property
    def log_weights(self) -> np.ndarray:
        if self._log_weights is None:
            with np.errstate(divide="ignore"):
                lw = np.log(self.weights)
            lw.setflags(write=False)
            self._log_weights = lw
        return self._log_weights

    @property
    def support(self) -> np.ndarray:
        return self.weights > 0.0

    def to_json_dict(self) -> dict:
        return {
            "axes": [ax.tolist() for ax in self.space.axes],
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "DiscreteMeasure":
        space = GridSpace([np.asarray(ax, dtype=float) for ax in payload["axes"]])
        return cls(space, np.asarray(payload["weights"], dtype=float))

    def __repr__(self):
        return f"DiscreteMeasure(n={self.space.n_points})"


class ScalarField:
    """Finite real values, one per grid point (test functions, potentials
    of the dual problem, payoffs).

    ``allow_posinf`` admits +inf entries; the only producer of those is the
    set-hitting cost, whose target mass can underflow.
    """

    def __init__(self, space: GridSpace, values, allow_posinf: bool = False):
        values = np.array(values, dtype=float).reshape(-1)
        if values.size != space.n_points:
            raise ValueError("value count does not match grid size")
        if allow_posinf:
            if np.any(np.isnan(values)) or np.any(np.isneginf(values)):
                raise ValueError("values must be real or +inf")
        elif not np.all(np.isfinite(values)):
            raise ValueError("ScalarField stores finite values only")
        values.setflags(write=False)
        self.space = space
        self.values = values

    @classmethod
    def constant(cls, space: GridSpace, c: float) -> "ScalarField":
        return cls(space, np.full(space.n_points, float(c)))

    def __repr__(self):
        return f"ScalarField(n={self.space.n_points})"


def relative_entropy(q: DiscreteMeasure, p: DiscreteMeasure) -> float:
    """Sum of q_i * log(q_i / p_i), with 0 log 0 = 0.

    Returns +inf exactly when q puts mass where p has none.  The result is
    clamped at zero against rounding residue (it is nonnegative and vanishes
    only at q = p).
    """
    _require_same_space(q, p, "relative_entropy")
    qw = q.weights
    pw = p.weights
    mask = qw > 0.0
    if np.any(pw[mask] == 0.0):
        return math.inf
    val = float(np.sum(qw[mask] * (np.log(qw[mask]) - np.log(pw[mask]))))
    if -1e-12 < val < 0.0:
        return 0.0
    return val


def p_norm(f: ScalarField, p: float, m: DiscreteMeasure) -> float:
    """Power mean (integral f^p dm)^(1/p) against m, geometric mean at p = 0.

    Strict positivity of f is required for p <= 0 (negative powers and the
    geometric mean blow up at zeros); f >= 0 suffices for p > 0.  Everything
    runs through logsumexp so very small or very large p stay finite.
    """
    _require_same_space(f, m, "p_norm")
    v = f.values
    if p <= 0.0 and np.any(v <= 0.0):
        raise DomainError("p_norm with p <= 0 needs strictly positive values")
    if np.any(v < 0.0):
        raise DomainError("p_norm needs nonnegative values")
    with np.errstate(divide="ignore"):
        log_f = np.log(v)
    if p == 0.0:
        mask = m.weights > 0.0
        return float(math.exp(np.sum(m.weights[mask] * log_f[mask])))
    return float(math.exp(logsumexp(p * log_f + m.log_weights) / p))


def ent_functional(f: ScalarField, m: DiscreteMeasure) -> float:
    """Entropy functional: integral of f log f minus (integral f) log (integral f),
    both against m.  Nonnegative by Jensen; zero at constants."""
    _require_same_space(f, m, "ent_functional")
    v = f.values
    if np.any(v <= 0.0):
        raise DomainError("ent_functional needs strictly positive values")
    mean = float(np.sum(m.weights * v))
    val = float(np.sum(m.weights * v * np.log(v)) - mean * math.log(mean))
    if -1e-12 < val < 0.0:
        return 0.0
    return val


def product_measure(a: DiscreteMeasure, b: DiscreteMeasure) -> DiscreteMeasure:
    """Independent product on the product grid; marginals recover a and b."""
    space = a.space.product(b.space)
    return DiscreteMeasure(space, np.outer(a.weights, b.weights).ravel())


def factor_marginals(m: DiscreteMeasure, n_first: int) -> tuple[np.ndarray, np.ndarray]:
    """Marginal weight vectors of a measure on a two-factor product grid,
    where the first factor has ``n_first`` points."""
    n = m.space.n_points
    if n % n_first != 0:
        raise ValueError("n_first does not divide the number of points")
    table = m.weights.reshape(n_first, n // n_first)
    return table.sum(axis=1), table.sum(axis=0)
