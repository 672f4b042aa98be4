"""Static entropy-minimizing couplings over a reversible reference kernel.

The solver is iterative proportional fitting in the log domain: with the
joint reference log R_ij = log m_i + log K_ij, the coupling is parameterized
as log pi_ij = log R_ij + alpha_i + beta_j and the potentials are updated
alternately to match the two marginals.  Each update is exact, so after a
full sweep the column marginals hold exactly and the stopping rule watches
the L1 error of the row marginals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import InfeasibleError, NotConvergedError, ParameterError, SupportError
from .measures import DiscreteMeasure, ScalarField, relative_entropy
from .reference import ReferenceKernel
from .semigroup import apply_hjb

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 50_000


@dataclass
class CouplingSolution:
    """Converged (or diagnosed) coupling with its certificates.

    ``primal_cost`` is the relative entropy of the coupling against the joint
    reference, in nats; ``dual_cost`` is the value of the candidate dual
    certificate built from the potentials, which closes the gap at the
    optimum; ``marginal_err`` is the total L1 mismatch of both marginals.
    """

    log_pi: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    primal_cost: float
    dual_cost: float
    marginal_err: float
    iterations: int
    converged: bool
    mu: DiscreteMeasure = field(repr=False, default=None)
    nu: DiscreteMeasure = field(repr=False, default=None)
    kernel: ReferenceKernel = field(repr=False, default=None)
    objective_trace: list = field(repr=False, default=None)

    def to_json_dict(self, full: bool = False) -> dict:
        payload = {
            "primal_cost": self.primal_cost,
            "dual_cost": self.dual_cost,
            "marginal_err": self.marginal_err,
            "iterations": self.iterations,
            "converged": self.converged,
        }
        if full:
            payload["alpha"] = self.alpha.tolist()
            payload["beta"] = self.beta.tolist()
            payload["log_pi"] = self.log_pi.tolist()
        return payload


def _masked_dot(weights: np.ndarray, values: np.ndarray) -> float:
    """Sum of weights * values over the support, with 0 * (-inf) read as 0."""
    mask = weights > 0.0
    return float(np.dot(weights[mask], values[mask]))


def ipfp(kernel: ReferenceKernel, mu: DiscreteMeasure, nu: DiscreteMeasure,
         tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
         track_objective: bool = False) -> CouplingSolution:
    """Alternating log-domain marginal fitting.

    Stops when the L1 marginal error drops below ``tol``; otherwise returns
    ``converged=False`` with diagnostics.  Marginals putting mass outside the
    support of the stationary law are rejected up front, and a target column
    with no reference mass at all raises ``InfeasibleError``.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    for name, marg in (("mu", mu), ("nu", nu)):
        if not marg.space.matches(kernel.space):
            raise SupportError(f"{name} lives on a different grid than the kernel")
        if np.any(marg.weights[kernel.stationary.weights == 0.0] > 0.0):
            raise SupportError(
                f"{name} puts mass where the stationary measure vanishes")
    log_r = kernel.joint_log()
    dead_cols = np.all(np.isneginf(log_r), axis=0)
    if np.any(nu.weights[dead_cols] > 0.0):
        raise InfeasibleError(
            "nu requires a target state the reference kernel never reaches")

    log_mu = mu.log_weights
    log_nu = nu.log_weights
    n_rows, n_cols = log_r.shape
    alpha = np.zeros(n_rows)
    beta = np.zeros(n_cols)
    trace = [] if track_objective else None
    err = math.inf
    it = 0
    with np.errstate(invalid="ignore"):
        for it in range(1, max_iter + 1):
            # Row logsumexp doubles as the marginal check for the previous
            # sweep, whose column constraint holds exactly.
            row_lse = logsumexp(log_r + beta[None, :], axis=1)
            if it > 1:
                row_marg = np.exp(alpha + row_lse)
                err = float(np.abs(row_marg - mu.weights).sum())
                if err < tol:
                    it -= 1
                    break
            alpha = log_mu - row_lse
            alpha[np.isnan(alpha)] = -math.inf
            col_lse = logsumexp(log_r + alpha[:, None], axis=0)
            beta = log_nu - col_lse
            beta[np.isnan(beta)] = -math.inf
            if track_objective:
                trace.append(_masked_dot(mu.weights, alpha)
                             + _masked_dot(nu.weights, beta))

    converged = err < tol
    log_pi = log_r + alpha[:, None] + beta[None, :]
    pi = np.exp(log_pi)
    marginal_err = (float(np.abs(pi.sum(axis=1) - mu.weights).sum())
                    + float(np.abs(pi.sum(axis=0) - nu.weights).sum()))
    primal = _masked_dot(mu.weights, alpha) + _masked_dot(nu.weights, beta)
    h_mu_m = relative_entropy(mu, kernel.stationary)
    phi_star = ScalarField(kernel.space, np.where(np.isneginf(beta), 0.0,
                                                  -kernel.epsilon * beta))
    dual = h_mu_m + dual_value(kernel, mu, nu, phi_star,
                               kernel.epsilon) / kernel.epsilon
    return CouplingSolution(
        log_pi=log_pi, alpha=alpha, beta=beta,
        primal_cost=primal, dual_cost=dual, marginal_err=marginal_err,
        iterations=it, converged=converged, mu=mu, nu=nu, kernel=kernel,
        objective_trace=trace)


def entropic_cost(sol: CouplingSolution) -> float:
    """Optimal value of the coupling problem; refuses unconverged input."""
    if not sol.converged:
        raise NotConvergedError(
            f"coupling not converged: marginal_err={sol.marginal_err:.3e} "
            f"after {sol.iterations} sweeps")
    return sol.primal_cost


def forward_cost(sol: CouplingSolution, mu: DiscreteMeasure,
                 kernel: ReferenceKernel) -> float:
    """Kernel-averaged conditional entropy of the coupling's disintegration:
    sum over i of mu_i times the entropy of row i of pi/mu_i against row i of
    the kernel.  Rows with mu_i = 0 are skipped."""
    total = 0.0
    for i in np.flatnonzero(mu.weights > 0.0):
        log_p = sol.log_pi[i] - mu.log_weights[i]
        mask = log_p > -math.inf
        p = np.exp(log_p[mask])
        total += mu.weights[i] * float(
            np.dot(p, log_p[mask] - kernel.log_k[i][mask]))
    return total


def dual_value(kernel: ReferenceKernel, mu: DiscreteMeasure,
               nu: DiscreteMeasure, phi: ScalarField, epsilon: float) -> float:
    """Dual test value: integral of the soft infimum of phi against mu minus
    the integral of phi against nu.  Nonpositive after subtracting the scaled
    optimal cost net of the entropy of mu (weak duality)."""
    q_phi = apply_hjb(kernel, phi, epsilon)
    return (float(np.dot(mu.weights, q_phi.values))
            - float(np.dot(nu.weights, phi.values)))
