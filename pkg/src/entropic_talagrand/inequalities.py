"""Entropy-transport inequality checkers and their report type.

Every report follows one convention: the checked statement is lhs <= rhs,
slack = rhs - lhs, and satisfied means slack >= -tolerance.  Checks whose
natural statement reads the other way around (domination of the quadratic
transport cost) swap sides so the convention is uniform across the CSV.

The multiplicative constant shared by all of them is

    theta(x) = 1 / (1 - exp(-x)),   x > 0,

and theta(x) - 1 = 1 / expm1(x) gets its own numerically stable branch for
small arguments.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError
from .measures import (DiscreteMeasure, ScalarField, ent_functional, p_norm,
                       relative_entropy)
from .reference import Generator, ReferenceKernel
from .schrodinger import entropic_cost, ipfp
from .semigroup import apply_heat, apply_hjb, entropy_dual_value
from .transport import w2_1d

CSV_COLUMNS = ("name", "lambda", "epsilon", "s", "t", "lhs", "rhs", "slack",
               "satisfied", "tolerance", "grid_n")


def theta(x: float) -> float:
    """1 / (1 - exp(-x)) for x > 0; decreasing, tends to 1 at infinity."""
    if x <= 0:
        raise DomainError("theta needs a positive argument")
    return 1.0 / -math.expm1(-x)


def theta_minus_one(x: float) -> float:
    """theta(x) - 1 = 1 / (exp(x) - 1), stable for small x via expm1."""
    if x <= 0:
        raise DomainError("theta_minus_one needs a positive argument")
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class EtiParams:
    """Constant, noise level, split point, and horizon of one inequality."""

    lam: float
    epsilon: float
    s: float
    t: float

    def __post_init__(self):
        if self.lam <= 0 or self.epsilon <= 0 or self.t <= 0:
            raise ParameterError("lam, epsilon, t must be positive")
        if not 0.0 <= self.s < self.t:
            raise ParameterError("need 0 <= s < t")

    def replace(self, **kw) -> "EtiParams":
        data = {"lam": self.lam, "epsilon": self.epsilon, "s": self.s, "t": self.t}
        data.update(kw)
        return EtiParams(**data)


@dataclass
class InequalityReport:
    name: str
    lam: float
    epsilon: float
    s: float
    t: float
    lhs: float
    rhs: float
    slack: float
    satisfied: bool
    tolerance: float
    grid_n: int
    control: bool = False
    applicable: bool = True
    note: str = ""
    extras: dict = field(default_factory=dict)

    def as_csv_row(self) -> list:
        return [self.name, repr(float(self.lam)), repr(float(self.epsilon)),
                repr(float(self.s)), repr(float(self.t)), repr(float(self.lhs)),
                repr(float(self.rhs)), repr(float(self.slack)),
                str(bool(self.satisfied)), repr(float(self.tolerance)),
                str(int(self.grid_n))]

    def as_json_dict(self) -> dict:
        return {
            "name": self.name, "lambda": self.lam, "epsilon": self.epsilon,
            "s": self.s, "t": self.t, "lhs": self.lhs, "rhs": self.rhs,
            "slack": self.slack, "satisfied": self.satisfied,
            "tolerance": self.tolerance, "grid_n": self.grid_n,
            "control": self.control, "applicable": self.applicable,
            "note": self.note, "extras": self.extras,
        }


def make_report(name: str, params: EtiParams, lhs: float, rhs: float,
                tol: float, grid_n: int, **kw) -> InequalityReport:
    if math.isnan(lhs) or math.isnan(rhs):
        slack = math.nan
        satisfied = False
    elif math.isinf(rhs) and rhs > 0:
        slack = math.inf
        satisfied = True
    else:
        slack = rhs - lhs
        satisfied = slack >= -tol
    return InequalityReport(name=name, lam=params.lam, epsilon=params.epsilon,
                            s=params.s, t=params.t, lhs=lhs, rhs=rhs,
                            slack=slack, satisfied=satisfied, tolerance=tol,
                            grid_n=grid_n, **kw)


def _entropy_term(factor: float, h: float) -> float:
    # factor may be +inf at a singular split point; h = 0 wins in that case.
    if h == 0.0:
        return 0.0
    return factor * h


def _check_kernel_params(kernel: ReferenceKernel, p: EtiParams):
    if not (np.isclose(kernel.t, p.t, rtol=1e-9, atol=0.0)
            and np.isclose(kernel.epsilon, p.epsilon, rtol=1e-9, atol=0.0)):
        raise ParameterError(
            f"kernel built at (epsilon={kernel.epsilon}, t={kernel.t}) does "
            f"not match params (epsilon={p.epsilon}, t={p.t})")


def eti_check(kernel: ReferenceKernel, m: DiscreteMeasure, mu: DiscreteMeasure,
              nu: DiscreteMeasure, p: EtiParams, tol: float,
              **solver_kw) -> InequalityReport:
    """Two-marginal form: coupling cost against theta-weighted entropies.

    lhs = optimal coupling cost of (mu, nu); rhs = theta(lam*eps*s) H(mu|m)
    + theta(lam*eps*(t-s)) H(nu|m).  At s = 0 the first weight is infinite
    and the report is vacuously satisfied unless H(mu|m) = 0.
    """
    _check_kernel_params(kernel, p)
    h_mu = relative_entropy(mu, m)
    h_nu = relative_entropy(nu, m)
    coef_mu = theta(p.lam * p.epsilon * p.s) if p.s > 0 else math.inf
    coef_nu = theta(p.lam * p.epsilon * (p.t - p.s))
    rhs = _entropy_term(coef_mu, h_mu) + _entropy_term(coef_nu, h_nu)
    if math.isinf(rhs):
        return make_report("eti", p, 0.0, math.inf, tol,
                           kernel.space.n_points, note="vacuous: rhs infinite")
    lhs = entropic_cost(ipfp(kernel, mu, nu, **solver_kw))
    return make_report("eti", p, lhs, rhs, tol, kernel.space.n_points,
                       extras={"h_mu": h_mu, "h_nu": h_nu})


def eti_m_check(kernel: ReferenceKernel, m: DiscreteMeasure,
                mu: DiscreteMeasure, p: EtiParams, tol: float,
                **solver_kw) -> InequalityReport:
    """One-marginal form: cost to the stationary law against
    theta(lam*eps*t) H(mu|m)."""
    _check_kernel_params(kernel, p)
    h_mu = relative_entropy(mu, m)
    rhs = _entropy_term(theta(p.lam * p.epsilon * p.t), h_mu)
    if math.isinf(rhs):
        return make_report("eti_m", p, 0.0, math.inf, tol,
                           kernel.space.n_points, note="vacuous: rhs infinite")
    lhs = entropic_cost(ipfp(kernel, mu, m, **solver_kw))
    return make_report("eti_m", p, lhs, rhs, tol, kernel.space.n_points,
                       extras={"h_mu": h_mu})


def reverse_hc_exponents(p: EtiParams, s: float) -> tuple[float, float]:
    """Exponent pair (p_exp, q) with (q-1)/(p_exp-1) = exp(lam*eps*t):
    q = -(exp(lam*eps*s) - 1) <= 0 and p_exp = 1 - exp(-lam*eps*(t-s)) in
    [0, 1)."""
    if not 0.0 < s < p.t:
        raise ParameterError("split point must lie strictly inside (0, t)")
    x = p.lam * p.epsilon
    q = -math.expm1(x * s)
    p_exp = -math.expm1(-x * (p.t - s))
    ratio = (q - 1.0) / (p_exp - 1.0)
    target = math.exp(x * p.t)
    if abs(ratio - target) > 1e-12 * max(1.0, target):
        raise ArithmeticError(
            f"exponent pairing drifted: (q-1)/(p-1)={ratio!r} vs {target!r}")
    return p_exp, q


def reverse_hc_check(kernel: ReferenceKernel, m: DiscreteMeasure,
                     f: ScalarField, s_frac: float, p: EtiParams,
                     tol: float) -> InequalityReport:
    """Reverse hypercontractivity below exponent one: the q-mean of the
    heated function dominates the p-mean of the function itself, with the
    exponent pair pinned to exp(lam*eps*t).

    ``s_frac`` in (0, 1) places the split point at s_frac * t.
    """
    _check_kernel_params(kernel, p)
    if np.any(f.values <= 0.0):
        raise DomainError("reverse_hc_check needs a strictly positive field")
    s = s_frac * p.t
    p_exp, q = reverse_hc_exponents(p, s)
    lhs = p_norm(f, p_exp, m)
    heated = apply_heat(kernel, f)
    rhs = p_norm(heated, q, m)
    rep = make_report("reverse_hc", p.replace(s=s), lhs, rhs, tol,
                      kernel.space.n_points,
                      extras={"p_exp": p_exp, "q": q})
    return rep


def hjb_contraction_ii(kernel: ReferenceKernel, m: DiscreteMeasure,
                       phi: ScalarField, p: EtiParams,
                       tol: float) -> InequalityReport:
    """Exponential-moment contraction at weight 1/(eps*theta(lam*eps*t)).

    Both sides are evaluated and reported on the log scale:
    lhs = log integral exp(-phi / (eps*theta)) dm,
    rhs = -(1/(eps*theta)) integral (soft infimum of phi) dm.
    """
    _check_kernel_params(kernel, p)
    a = p.epsilon * theta(p.lam * p.epsilon * p.t)
    lhs = entropy_dual_value(m, ScalarField(phi.space, -phi.values / a))
    q_phi = apply_hjb(kernel, phi, p.epsilon)
    rhs = -float(np.dot(m.weights, q_phi.values)) / a
    return make_report("hjb_contraction_ii", p, lhs, rhs, tol,
                       kernel.space.n_points, extras={"scale": "log"})


def contraction_iii_schedule(p: EtiParams) -> tuple[float, float, float]:
    """(C, rescaled noise eps/C, rescaled horizon C*t) with
    C = eps * (theta(lam*eps*t) - 1)."""
    c = p.epsilon * theta_minus_one(p.lam * p.epsilon * p.t)
    return c, p.epsilon / c, c * p.t


def hjb_contraction_iii(kernel_scaled: ReferenceKernel, m: DiscreteMeasure,
                        psi: ScalarField, p: EtiParams,
                        tol: float) -> InequalityReport:
    """Jensen-type contraction for the rescaled soft infimum.

    ``kernel_scaled`` must be built at noise eps/C and horizon C*t for
    C = eps*(theta(lam*eps*t)-1); the log-scale statement is
    log integral exp(Q psi) dm <= integral psi dm.
    """
    c, eps_scaled, t_scaled = contraction_iii_schedule(p)
    if not (np.isclose(kernel_scaled.epsilon, eps_scaled, rtol=1e-9)
            and np.isclose(kernel_scaled.t, t_scaled, rtol=1e-9)):
        raise ParameterError(
            f"kernel built at (epsilon={kernel_scaled.epsilon}, "
            f"t={kernel_scaled.t}); schedule requires (epsilon={eps_scaled}, "
            f"t={t_scaled})")
    q_psi = apply_hjb(kernel_scaled, psi, eps_scaled)
    lhs = entropy_dual_value(m, q_psi)
    rhs = float(np.dot(m.weights, psi.values))
    return make_report("hjb_contraction_iii", p, lhs, rhs, tol,
                       kernel_scaled.space.n_points,
                       extras={"scale": "log", "C": c})


def domination_check(kernel: ReferenceKernel, m: DiscreteMeasure,
                     mu: DiscreteMeasure, nu: DiscreteMeasure, epsilon: float,
                     tol: float, **solver_kw) -> InequalityReport:
    """The scaled coupling cost dominates half the squared quadratic
    transport distance plus half the scaled entropies (horizon 1, 1D).

    Sides are swapped into the uniform lhs <= rhs convention:
    lhs = (eps/2) H(mu|m) + (eps/2) H(nu|m) + W2^2/2, rhs = eps * cost.
    """
    if not np.isclose(kernel.t, 1.0, rtol=1e-12):
        raise ParameterError("domination check runs at horizon t = 1")
    if kernel.space.dim != 1:
        raise ParameterError("domination check needs a 1D instance")
    p = EtiParams(lam=1.0, epsilon=epsilon, s=0.5, t=1.0)
    h_mu = relative_entropy(mu, m)
    h_nu = relative_entropy(nu, m)
    w2 = w2_1d(mu, nu)
    lhs = 0.5 * epsilon * h_mu + 0.5 * epsilon * h_nu + 0.5 * w2 * w2
    rhs = epsilon * entropic_cost(ipfp(kernel, mu, nu, **solver_kw))
    return make_report("domination", p, lhs, rhs, tol, kernel.space.n_points,
                       extras={"w2": w2, "h_mu": h_mu, "h_nu": h_nu})


def talagrand_check(m: DiscreteMeasure, mu: DiscreteMeasure, p: EtiParams,
                    tol: float) -> InequalityReport:
    """Classical transport-entropy consequence at horizon 1:
    W2^2(mu, m)/2 <= (2*eps*theta(lam*eps) - eps) * H(mu|m)."""
    if not np.isclose(p.t, 1.0, rtol=1e-12):
        raise ParameterError("talagrand check runs at horizon t = 1")
    w2 = w2_1d(mu, m)
    lhs = 0.5 * w2 * w2
    coef = 2.0 * p.epsilon * theta(p.lam * p.epsilon) - p.epsilon
    rhs = _entropy_term(coef, relative_entropy(mu, m))
    return make_report("talagrand", p, lhs, rhs, tol, m.space.n_points,
                       extras={"w2": w2, "coef": coef})


def infconv_lsi_check(kernel: ReferenceKernel, m: DiscreteMeasure,
                      f: ScalarField, p: EtiParams,
                      tol: float) -> InequalityReport:
    """Infimal-convolution logarithmic Sobolev inequality.

    lhs = Ent_m(exp f); rhs = kappa * integral (f - Qf) exp(f) dm with
    kappa = 1 + eps / (exp(lam*eps*t) - (1+eps)).  Requires
    exp(lam*eps*t) > 1 + eps; the other sign regime of the denominator is
    reported as not applicable rather than checked.  The integrand
    (f - Qf) exp(f) is not pointwise nonnegative, so only the full
    inequality is asserted.
    """
    _check_kernel_params(kernel, p)
    x = p.lam * p.epsilon * p.t
    denom = math.expm1(x) - p.epsilon
    if denom <= 0.0:
        rep = make_report("infconv_lsi", p, 0.0, 0.0, tol,
                          kernel.space.n_points, applicable=False,
                          note="not-applicable: exp(lam*eps*t) <= 1 + eps")
        rep.satisfied = True
        return rep
    kappa = 1.0 + p.epsilon / denom
    note = ""
    if denom < 1e-6 * (1.0 + p.epsilon):
        note = "near-singular coefficient"
    ef = ScalarField(f.space, np.exp(f.values))
    lhs = ent_functional(ef, m)
    q_f = apply_hjb(kernel, f, p.epsilon)
    rhs = kappa * float(np.dot(m.weights, (f.values - q_f.values) * ef.values))
    return make_report("infconv_lsi", p, lhs, rhs, tol, kernel.space.n_points,
                       note=note, extras={"kappa": kappa})


def grad_squared(g: ScalarField) -> np.ndarray:
    """Squared discrete gradient: forward differences scaled by the axis
    spacing, one-sided at the trailing boundary, summed over axes."""
    space = g.space
    v = g.values.reshape(space.shape)
    total = np.zeros(space.shape)
    for axis, h in enumerate(space.spacing):
        if space.shape[axis] < 2:
            continue
        d = np.diff(v, axis=axis) / h
        pad = [(0, 0)] * space.dim
        pad[axis] = (0, 1)
        d_full = np.pad(d, pad, mode="edge")
        total += d_full**2
    return total.reshape(-1)


def poincare_check(gen: Generator, m: DiscreteMeasure, g: ScalarField,
                   lam: float, tol: float) -> InequalityReport:
    """Variance against (2/lam) times the Dirichlet-type energy built from
    the discrete gradient."""
    if lam <= 0:
        raise ParameterError("lam must be positive")
    mean = float(np.dot(m.weights, g.values))
    lhs = float(np.dot(m.weights, g.values**2)) - mean * mean
    rhs = (2.0 / lam) * float(np.dot(m.weights, grad_squared(g)))
    p = EtiParams(lam=lam, epsilon=gen.epsilon, s=0.0, t=1.0)
    return make_report("poincare", p, lhs, rhs, tol, gen.space.n_points)


def lsi_reference_constant(lam_u: float) -> float:
    """Constant used to parameterize suites for a quadratic potential: a
    lam_u-convex potential yields the two-marginal inequality at 2*lam_u."""
    if lam_u <= 0:
        raise DomainError("lam_u must be positive")
    return 2.0 * lam_u


def write_reports_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rep in reports:
            writer.writerow(rep.as_csv_row())


def write_reports_jsonl(reports, path) -> None:
    with open(path, "w") as fh:
        for rep in reports:
            fh.write(json.dumps(rep.as_json_dict(), sort_keys=True) + "\n")
