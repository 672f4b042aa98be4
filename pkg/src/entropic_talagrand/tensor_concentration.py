"""Tensorization of the inequalities and dimension-free concentration.

Product constructions are capped at two factors and 4096 product points:
kernels are dense matrices, and the dimension-free claim is evidenced by
comparing the one-factor and two-factor slack, not by asymptotics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, NotConvergedError, ParameterError, SizeError
from .inequalities import (EtiParams, InequalityReport, eti_check, make_report,
                           theta, theta_minus_one)
from .measures import DiscreteMeasure, GridSpace, ScalarField, product_measure
from .reference import ReferenceKernel, product_kernel
from .schrodinger import forward_cost, ipfp
from .semigroup import apply_hjb

PRODUCT_POINT_CAP = 4096


@dataclass
class BorelSubset:
    """Boolean membership over the points of a grid."""

    space: GridSpace
    membership: np.ndarray

    def __post_init__(self):
        mem = np.asarray(self.membership, dtype=bool).reshape(-1)
        if mem.size != self.space.n_points:
            raise ValueError("membership size does not match grid")
        mem.setflags(write=False)
        self.membership = mem

    @property
    def is_empty(self) -> bool:
        return not bool(self.membership.any())

    def complement(self) -> "BorelSubset":
        return BorelSubset(self.space, ~self.membership)

    def to_json_dict(self) -> dict:
        return {"membership": self.membership.tolist()}


def set_hitting_cost(kernel: ReferenceKernel, a: BorelSubset) -> ScalarField:
    """Per-point cost -log K(x, A); +inf where the kernel mass on A
    underflows.  An empty target makes every entry +inf."""
    if not a.space.matches(kernel.space):
        raise ParameterError("subset lives on a different grid than the kernel")
    n = kernel.space.n_points
    if a.is_empty:
        warnings.warn("hitting cost of the empty set is +inf everywhere")
        values = np.full(n, math.inf)
    else:
        with np.errstate(invalid="ignore"):
            values = -logsumexp(kernel.log_k[:, a.membership], axis=1)
    return ScalarField(kernel.space, values, allow_posinf=True)


def cost_sublevel_set(kernel: ReferenceKernel, a: BorelSubset,
                      u: float) -> BorelSubset:
    """Points whose hitting cost is at most u; equivalently, points from
    which the kernel mass on A is at least exp(-u).  Both characterizations
    are the same float comparison, so they agree exactly."""
    if u < 0:
        raise ParameterError("u must be nonnegative")
    cost = set_hitting_cost(kernel, a)
    return BorelSubset(kernel.space, cost.values <= u)


def concentration_set_check(kernel: ReferenceKernel, m: DiscreteMeasure,
                            a: BorelSubset, u: float, s: float, p: EtiParams,
                            tol: float) -> InequalityReport:
    """Set form of dimension-free concentration at horizon 1, in the log
    domain:

        (theta(lam*eps*s) - 1) * log m(complement of A_u)
          + theta(lam*eps*(1-s)) * log m(A)   <=   -u.

    A factor with zero mass sends the left side to -inf (vacuous).
    """
    if not np.isclose(p.t, 1.0, rtol=1e-12):
        raise ParameterError("concentration checks run at horizon t = 1")
    if not 0.0 < s < 1.0:
        raise ParameterError("split point must lie in (0, 1)")
    a_u = cost_sublevel_set(kernel, a, u)
    mass_a = float(m.weights[a.membership].sum())
    mass_out = float(m.weights[~a_u.membership].sum())
    with np.errstate(divide="ignore"):
        lhs = (theta_minus_one(p.lam * p.epsilon * s) * np.log(mass_out)
               + theta(p.lam * p.epsilon * (1.0 - s)) * np.log(mass_a))
    if math.isnan(lhs):
        lhs = -math.inf  # 0 * log 0 style corner: vacuous either way
    return make_report("concentration_set", p.replace(s=s), float(lhs), -u,
                       tol, kernel.space.n_points,
                       extras={"u": u, "mass_a": mass_a, "mass_out": mass_out,
                               "scale": "log"})


def concentration_fn_check(kernel: ReferenceKernel, m: DiscreteMeasure,
                           phi: ScalarField, u: float, v: float, s: float,
                           p: EtiParams, tol: float) -> InequalityReport:
    """Functional form of concentration at horizon 1, in the log domain:

        eps*(theta(lam*eps*s) - 1) * log m(Q phi > u)
          + eps*theta(lam*eps*(1-s)) * log m(phi <= v)   <=   v - u,

    for nonnegative phi and u > v.
    """
    if not np.isclose(p.t, 1.0, rtol=1e-12):
        raise ParameterError("concentration checks run at horizon t = 1")
    if not 0.0 < s < 1.0:
        raise ParameterError("split point must lie in (0, 1)")
    if u <= v:
        raise ParameterError("need u > v")
    if np.any(phi.values < 0.0):
        raise DomainError("phi must be nonnegative")
    q_phi = apply_hjb(kernel, phi, p.epsilon)
    mass_q = float(m.weights[q_phi.values > u].sum())
    mass_v = float(m.weights[phi.values <= v].sum())
    with np.errstate(divide="ignore"):
        lhs = p.epsilon * (theta_minus_one(p.lam * p.epsilon * s) * np.log(mass_q)
                           + theta(p.lam * p.epsilon * (1.0 - s)) * np.log(mass_v))
    if math.isnan(lhs):
        lhs = -math.inf
    return make_report("concentration_fn", p.replace(s=s), float(lhs), v - u,
                       tol, kernel.space.n_points,
                       extras={"u": u, "v": v, "mass_q": mass_q,
                               "mass_v": mass_v, "scale": "log"})


def _random_product_pair(m1, m2, rng, correlated: bool):
    from .draws import tilted_measure  # local import to avoid a cycle
    if not correlated:
        return product_measure(tilted_measure(m1, rng),
                               tilted_measure(m2, rng))
    # Correlated draw: tilt the product law by a non-separable smooth field.
    mp = product_measure(m1, m2)
    pts = mp.space.points
    scale = np.array([ax[-1] - ax[0] for ax in mp.space.axes])
    z = pts / scale[None, :]
    coupling = float(rng.normal(scale=0.6))
    tilt = coupling * np.prod(np.sin(np.pi * z + rng.uniform(0, np.pi)), axis=1)
    return DiscreteMeasure.from_log_weights(mp.space, mp.log_weights + tilt)


def tensor_eti_suite(factors, p: EtiParams, tol: float, n_draws: int = 8,
                     rng=None, **solver_kw) -> InequalityReport:
    """Run the two-marginal check on the product of two factor kernels over
    random product-form and correlated pairs; return the worst-slack report.
    """
    if len(factors) != 2:
        raise ParameterError("tensorization suite supports exactly 2 factors")
    (k1, m1), (k2, m2) = factors
    n_prod = k1.space.n_points * k2.space.n_points
    if n_prod > PRODUCT_POINT_CAP:
        raise SizeError(f"product state space {n_prod} exceeds "
                        f"{PRODUCT_POINT_CAP} points")
    if rng is None:
        rng = np.random.default_rng(0)
    kp = product_kernel(k1, k2)
    mp = product_measure(m1, m2)
    worst = None
    all_ok = True
    for draw in range(n_draws):
        correlated = draw % 2 == 1
        mu = _random_product_pair(m1, m2, rng, correlated=False)
        nu = _random_product_pair(m1, m2, rng, correlated=correlated)
        rep = eti_check(kp, mp, mu, nu, p, tol, **solver_kw)
        all_ok = all_ok and rep.satisfied
        if worst is None or rep.slack < worst.slack:
            worst = rep
    worst.name = "tensor_eti"
    worst.satisfied = all_ok and worst.satisfied
    worst.extras.update({"n_draws": n_draws, "product_points": n_prod})
    return worst


def tensorized_cost_upper_bound(k1: ReferenceKernel, k2: ReferenceKernel,
                                mu: DiscreteMeasure, nu: DiscreteMeasure,
                                tol: float = 1e-10) -> float:
    """Upper bound on the marginal-wise tensorized cost via the explicit
    two-stage coupling.

    Stage one couples the first marginals optimally; stage two couples each
    conditional pair optimally.  The bound evaluates, on the resulting
    coupling, the sum over coordinates i of the average entropy of the i-th
    marginal of the disintegration kernel against the i-th factor kernel.
    """
    n1, n2 = k1.space.n_points, k2.space.n_points
    if mu.space.n_points != n1 * n2 or nu.space.n_points != n1 * n2:
        raise ParameterError("marginals do not live on the product grid")
    mu_t = mu.weights.reshape(n1, n2)
    nu_t = nu.weights.reshape(n1, n2)
    mu1 = DiscreteMeasure(k1.space, _renorm(mu_t.sum(axis=1)))
    nu1 = DiscreteMeasure(k1.space, _renorm(nu_t.sum(axis=1)))

    sol1 = ipfp(k1, mu1, nu1, tol=tol)
    if not sol1.converged:
        raise NotConvergedError("first-marginal solve did not converge")
    term1 = forward_cost(sol1, mu1, k1)

    pi1 = np.exp(sol1.log_pi)
    mu1_w = mu1.weights
    # Conditional second-coordinate laws of mu given x1 and of nu given y1.
    mu_cond = {i: DiscreteMeasure(k2.space, _renorm(mu_t[i]))
               for i in np.flatnonzero(mu1_w > 0.0)}
    nu1_w = nu1.weights
    nu_cond = {j: DiscreteMeasure(k2.space, _renorm(nu_t[j]))
               for j in np.flatnonzero(nu1_w > 0.0)}

    # q_rows[(x1, y1)] is the conditional transition table q(x2, dy2).
    q_rows = {}
    for i in mu_cond:
        for j in np.flatnonzero(pi1[i] > 0.0):
            sol_q = ipfp(k2, mu_cond[i], nu_cond[j], tol=tol)
            if not sol_q.converged:
                raise NotConvergedError(
                    f"conditional solve at pair (x1={i}, y1={j}) did not converge")
            with np.errstate(invalid="ignore"):
                rows = np.exp(sol_q.log_pi
                              - mu_cond[i].log_weights[:, None])
            rows[~np.isfinite(rows)] = 0.0
            q_rows[(i, j)] = rows

    k2_log = k2.log_k
    term2 = 0.0
    for i in mu_cond:
        # Second-marginal kernel of the coupling at (x1, x2): mixture over y1
        # of the conditional tables, weighted by the first-stage kernel row.
        p1_row = pi1[i] / mu1_w[i]
        mix = np.zeros((n2, n2))
        for j in np.flatnonzero(pi1[i] > 0.0):
            mix += p1_row[j] * q_rows[(i, j)]
        for x2 in np.flatnonzero(mu_t[i] > 0.0):
            row = mix[x2]
            mask = row > 0.0
            term2 += mu_t[i, x2] * float(
                np.dot(row[mask], np.log(row[mask]) - k2_log[x2][mask]))
    return term1 + term2


def _renorm(w: np.ndarray) -> np.ndarray:
    total = w.sum()
    if total <= 0.0:
        raise ValueError("cannot normalize a zero-mass slice")
    return w / total
