"""Reversible reference dynamics on grids.

The stationary law has log density proportional to -2 U.  The continuous-time
generator is a nearest-neighbor chain whose jump rates

    rate(i -> j) = epsilon / (2 h^2) * exp(-(U_j - U_i)),   j a grid neighbor,

satisfy detailed balance with respect to the stationary law exactly, because
m_i * rate(i -> j) is symmetric in (i, j) by construction.  Boundary rows
simply omit the missing neighbor, which preserves that symmetry.  Transition
matrices come from the eigendecomposition of the symmetrized rate matrix, so
the joint law ``m_i K_ij`` is structurally symmetric up to row renormalization
(about 1e-15 relative), and spectra are cached for reuse across horizons.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh
from scipy.special import logsumexp

from .errors import DegeneratePotentialError, DomainError, ParameterError
from .measures import DiscreteMeasure, GridSpace, product_measure

DEFAULT_GRID_N = 128
DEFAULT_N_SIGMA = 5.0


@dataclass(frozen=True)
class PotentialSpec:
    """Potential family with its evaluated grid values.

    Families: quadratic (lam_u * |x|^2 / 2), double_well (a * (x_k^2 - b)^2
    summed over coordinates), tabulated (explicit per-point values).
    """

    family: str
    lam_u: float | None = None
    a: float | None = None
    b: float | None = None
    values: np.ndarray | None = None

    @classmethod
    def quadratic(cls, lam_u: float) -> "PotentialSpec":
        if lam_u <= 0:
            raise ParameterError("quadratic potential needs lam_u > 0")
        return cls(family="quadratic", lam_u=float(lam_u))

    @classmethod
    def double_well(cls, a: float, b: float) -> "PotentialSpec":
        if a <= 0:
            raise ParameterError("double well needs a > 0")
        return cls(family="double_well", a=float(a), b=float(b))

    @classmethod
    def tabulated(cls, values) -> "PotentialSpec":
        vals = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ParameterError("tabulated potential values must be finite")
        return cls(family="tabulated", values=vals)

    def evaluate(self, grid: GridSpace) -> np.ndarray:
        if self.family == "quadratic":
            return 0.5 * self.lam_u * np.sum(grid.points**2, axis=1)
        if self.family == "double_well":
            return np.sum(self.a * (grid.points**2 - self.b) ** 2, axis=1)
        if self.family == "tabulated":
            vals = self.values.reshape(-1)
            if vals.size != grid.n_points:
                raise ParameterError("tabulated values do not match grid size")
            return vals.copy()
        raise ParameterError(f"unknown potential family {self.family!r}")

    def to_json_dict(self) -> dict:
        if self.family == "quadratic":
            return {"family": "quadratic", "lambda": self.lam_u}
        if self.family == "double_well":
            return {"family": "double_well", "a": self.a, "b": self.b}
        return {"family": "tabulated", "values": self.values.tolist()}

    @classmethod
    def from_json_dict(cls, payload: dict) -> "PotentialSpec":
        family = payload.get("family")
        if family == "quadratic":
            return cls.quadratic(payload["lambda"])
        if family == "double_well":
            return cls.double_well(payload["a"], payload["b"])
        if family == "tabulated":
            return cls.tabulated(payload["values"])
        raise ParameterError(f"unknown potential family {family!r}")


def gaussian_grid(lam_u: float, n: int = DEFAULT_GRID_N,
                  n_sigma: float = DEFAULT_N_SIGMA) -> GridSpace:
    """Default 1D grid for a quadratic potential: [-n_sigma, n_sigma] standard
    deviations of the stationary Gaussian, whose variance is 1/(2 lam_u)."""
    sigma = 1.0 / np.sqrt(2.0 * lam_u)
    return GridSpace.regular(-n_sigma * sigma, n_sigma * sigma, n)


def stationary_measure(grid: GridSpace, potential: PotentialSpec) -> DiscreteMeasure:
    """Weights proportional to exp(-2 U), normalized in the log domain."""
    with np.errstate(over="ignore"):
        log_w = -2.0 * potential.evaluate(grid)
    if not np.isfinite(logsumexp(log_w)):
        raise DegeneratePotentialError("all stationary weights underflowed")
    return DiscreteMeasure.from_log_weights(grid, log_w)


class Generator:
    """Conservative rate matrix, reversible with respect to its stationary
    measure.  The eigendecomposition of the symmetrized matrix is cached."""

    def __init__(self, space: GridSpace, epsilon: float, rate_matrix: np.ndarray,
                 stationary: DiscreteMeasure):
        self.space = space
        self.epsilon = float(epsilon)
        rate_matrix = np.asarray(rate_matrix, dtype=float)
        rate_matrix.setflags(write=False)
        self.rate_matrix = rate_matrix
        self.stationary = stationary
        self._spectrum = None

    def spectrum(self):
        """(eigenvalues, eigenvectors, sqrt stationary weights) of
        D^{1/2} L D^{-1/2} with D = diag(m)."""
        if self._spectrum is None:
            sqrt_m = np.sqrt(self.stationary.weights)
            sym = self.rate_matrix * (sqrt_m[:, None] / sqrt_m[None, :])
            sym = 0.5 * (sym + sym.T)
            w, v = eigh(sym)
            self._spectrum = (w, v, sqrt_m)
        return self._spectrum


def build_generator(grid: GridSpace, potential: PotentialSpec,
                    epsilon: float) -> Generator:
    """Nearest-neighbor generator for the grid Langevin dynamics.

    On product grids, neighbors along every axis get rates; for separable
    potentials this is exactly the Kronecker sum of the 1D generators.
    """
    if epsilon <= 0:
        raise ParameterError("epsilon must be positive")
    u = potential.evaluate(grid)
    if not np.all(np.isfinite(u)):
        raise ParameterError("potential must be finite on the grid")
    n = grid.n_points
    rates = np.zeros((n, n))
    shape = grid.shape
    u_nd = u.reshape(shape)
    idx_nd = np.arange(n).reshape(shape)
    for axis, h in enumerate(grid.spacing):
        if shape[axis] < 2:
            continue
        coef = epsilon / (2.0 * h * h)
        lo = [slice(None)] * grid.dim
        hi = [slice(None)] * grid.dim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        i_lo = idx_nd[tuple(lo)].ravel()
        i_hi = idx_nd[tuple(hi)].ravel()
        du = (u_nd[tuple(hi)] - u_nd[tuple(lo)]).ravel()
        rates[i_lo, i_hi] += coef * np.exp(-du)
        rates[i_hi, i_lo] += coef * np.exp(du)
    rates[np.arange(n), np.arange(n)] = -rates.sum(axis=1)
    m = stationary_measure(grid, potential)
    return Generator(grid, epsilon, rates, m)


class ReferenceKernel:
    """Row-stochastic transition matrix in the log domain (-inf entries mark
    transitions below the floating-point floor).

    ``exact_reversible`` records whether the joint law m_i K_ij is symmetric
    by construction; kernels sampled from closed-form densities are only
    approximate cross-checks and clear the flag.
    """

    def __init__(self, space: GridSpace, stationary: DiscreteMeasure,
                 epsilon: float, t: float, log_k: np.ndarray,
                 generator: Generator | None = None,
                 exact_reversible: bool = True):
        log_k = np.asarray(log_k, dtype=float)
        log_k.setflags(write=False)
        self.space = space
        self.stationary = stationary
        self.epsilon = float(epsilon)
        self.t = float(t)
        self.log_k = log_k
        self.generator = generator
        self.exact_reversible = exact_reversible
        self._k = None

    @property
    def k(self) -> np.ndarray:
        if self._k is None:
            k = np.exp(self.log_k)
            k.setflags(write=False)
            self._k = k
        return self._k

    def joint_log(self) -> np.ndarray:
        """log of the two-time joint law m_i K_ij."""
        return self.stationary.log_weights[:, None] + self.log_k

    def reversibility_residual(self) -> float:
        joint = self.stationary.weights[:, None] * self.k
        return float(np.max(np.abs(joint - joint.T)))

    def row_sum_residual(self) -> float:
        return float(np.max(np.abs(self.k.sum(axis=1) - 1.0)))


def transition_kernel(gen: Generator, t: float) -> ReferenceKernel:
    """exp(t L) via the symmetrized eigendecomposition, row-normalized in the
    log domain.  Negative rounding residue in far tails is clipped to zero
    (log entry -inf)."""
    if t <= 0:
        raise ParameterError("t must be positive")
    w, v, sqrt_m = gen.spectrum()
    if not np.all(np.isfinite(w)):
        raise ArithmeticError(
            f"eigendecomposition produced non-finite spectrum "
            f"(min={w.min()!r}, max={w.max()!r})")
    sym_prop = (v * np.exp(t * w)) @ v.T
    sym_prop = 0.5 * (sym_prop + sym_prop.T)
    np.clip(sym_prop, 0.0, None, out=sym_prop)
    with np.errstate(divide="ignore"):
        log_k = np.log(sym_prop)
    log_sqrt_m = 0.5 * gen.stationary.log_weights
    log_k += log_sqrt_m[None, :] - log_sqrt_m[:, None]
    log_k -= logsumexp(log_k, axis=1, keepdims=True)
    return ReferenceKernel(gen.space, gen.stationary, gen.epsilon, t, log_k,
                           generator=gen)


def ou_closed_form(grid: GridSpace, lam_u: float, epsilon: float,
                   t: float) -> ReferenceKernel:
    """Gaussian transition law of the linear drift dynamics, sampled on the
    grid and row-normalized.

    Row i is the density with mean x_i * exp(-epsilon*lam_u*t) and variance
    (1 - exp(-2*epsilon*lam_u*t)) / (2*lam_u).  Grid sampling breaks exact
    reversibility; this kernel is an approximate cross-check only.
    """
    if lam_u <= 0:
        raise ParameterError("lam_u must be positive")
    if epsilon <= 0 or t <= 0:
        raise ParameterError("epsilon and t must be positive")
    if grid.dim != 1:
        raise ParameterError("closed form is 1D only")
    x = grid.axes[0]
    decay = np.exp(-epsilon * lam_u * t)
    var = -np.expm1(-2.0 * epsilon * lam_u * t) / (2.0 * lam_u)
    log_k = -((x[None, :] - decay * x[:, None]) ** 2) / (2.0 * var)
    log_k -= logsumexp(log_k, axis=1, keepdims=True)
    m = stationary_measure(grid, PotentialSpec.quadratic(lam_u))
    return ReferenceKernel(grid, m, epsilon, t, log_k, generator=None,
                           exact_reversible=False)


def product_kernel(a: ReferenceKernel, b: ReferenceKernel) -> ReferenceKernel:
    """Kernel of two independent factors on the product grid: log entries add
    coordinatewise, the stationary law is the product measure."""
    if not np.isclose(a.epsilon, b.epsilon, rtol=1e-12, atol=0.0):
        raise ParameterError("product kernel needs matching epsilon")
    if not np.isclose(a.t, b.t, rtol=1e-12, atol=0.0):
        raise ParameterError("product kernel needs matching t")
    na, nb = a.space.n_points, b.space.n_points
    log_k = (a.log_k[:, None, :, None] + b.log_k[None, :, None, :]).reshape(
        na * nb, na * nb)
    m = product_measure(a.stationary, b.stationary)
    return ReferenceKernel(a.space.product(b.space), m, a.epsilon, a.t, log_k,
                           generator=None,
                           exact_reversible=a.exact_reversible and b.exact_reversible)


def kernel_to_csv(kernel: ReferenceKernel, path) -> None:
    """Dump log transition entries as CSV rows (one row per source point)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in kernel.log_k:
            writer.writerow([repr(float(x)) for x in row])
