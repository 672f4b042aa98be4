"""Linear heat action, its log-domain nonlinear counterpart, and the
quadratic-cost infimal convolution used as the zero-noise limit oracle."""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import logsumexp

from .errors import ParameterError
from .measures import DiscreteMeasure, GridSpace, ScalarField
from .reference import ReferenceKernel


def apply_heat(kernel: ReferenceKernel, f: ScalarField) -> ScalarField:
    """Row-wise kernel average of f.  Positive inputs stay in the log domain;
    sign-changing inputs fall back to a plain matrix product."""
    v = f.values
    if np.all(v > 0.0):
        out = np.exp(logsumexp(kernel.log_k + np.log(v)[None, :], axis=1))
    else:
        out = kernel.k @ v
    return ScalarField(kernel.space, out)


def apply_hjb(kernel: ReferenceKernel, phi: ScalarField, epsilon: float) -> ScalarField:
    """Soft infimum -eps * log E exp(-phi/eps) along kernel rows.

    exp(-phi/eps) is never materialized, so noise levels down to 2**-8 are
    safe.  Constants are fixed points and the output stays within
    [min phi, max phi].
    """
    if epsilon <= 0:
        raise ParameterError("epsilon must be positive")
    shifted = kernel.log_k - phi.values[None, :] / epsilon
    return ScalarField(kernel.space, -epsilon * logsumexp(shifted, axis=1))


def entropy_dual_value(p_ref: DiscreteMeasure, psi: ScalarField) -> float:
    """log integral exp(psi) d p_ref.

    Equals the supremum of (integral psi dq - relative entropy of q given
    p_ref) over probability measures q, attained at the exponential tilt
    q* proportional to p_ref * exp(psi).
    """
    return float(logsumexp(p_ref.log_weights + psi.values))


def hopf_lax(grid: GridSpace, phi: ScalarField, t: float) -> ScalarField:
    """Exact inf over grid points of phi(y) + |x - y|^2 / (2 t).

    Brute force over all point pairs; no sub-grid interpolation, so this is
    exact on its own discrete domain and any discretization gap against the
    soft version is reported by the caller, not hidden here.
    """
    if t <= 0:
        raise ParameterError("t must be positive")
    sq = cdist(grid.points, phi.space.points, metric="sqeuclidean")
    values = np.min(phi.values[None, :] + sq / (2.0 * t), axis=1)
    return ScalarField(grid, values)
