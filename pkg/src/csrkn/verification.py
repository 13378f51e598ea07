"""Condition checks for continuous coefficients and discrete tableaux.

All algebraic checks reduce to exact moment sums or small matrix algebra;
nothing is sampled except the two-variable identities, which are polynomial
and therefore fully pinned by a dense grid.  The order bound used throughout
is min(b_order, 2*cn_order + 2, cn_order + dn_order) on whatever condition
orders actually hold, which reproduces the classical simplifying-assumption
bound for RKN methods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .construction import (ContinuousCoefficients, RKNTableau,
                           discrete_symplectic_residual,
                           symplectic_identity_residual)
from .integrator import SolverConfig, integrate
from .problems import SecondOrderProblem

TOL_ALGEBRAIC = 1e-12
TOL_CHAINED = 1e-10


@dataclass(frozen=True)
class ConditionReport:
    """Residuals of the weight (B), stage (CN) and transpose (DN) moment
    conditions, indexed from condition order 1, plus the structural
    residuals and the order they imply."""

    kind: str
    b_residuals: tuple[float, ...]
    cn_residuals: tuple[float, ...]
    dn_residuals: tuple[float, ...]
    b_order: int
    cn_order: int
    dn_order: int
    symplectic_residual: float
    symmetry_residual: float | None
    predicted_order: int

    @property
    def symmetry_applicable(self) -> bool:
        return self.symmetry_residual is not None


def order_bound(b_order: int, cn_order: int, dn_order: int) -> int:
    """Order guaranteed by conditions B(b), CN(cn), DN(dn)."""
    return min(b_order, 2 * cn_order + 2, cn_order + dn_order)


def order_bound_with_quadrature(b_order: int, cn_order: int, dn_order: int,
                                quad_order: int, deg_b: int, deg_a_tau: int,
                                deg_a_sigma: int) -> int:
    """Order kept after sampling with a quadrature rule of the given order.

    Each condition survives discretization only while the quadrature stays
    exact on the integrand, which caps the usable condition orders by the
    rule order minus the coefficient degrees involved.
    """
    rho = min(b_order, quad_order - deg_b)
    alpha = min(cn_order, quad_order - deg_a_sigma + 1)
    beta = min(dn_order, quad_order - deg_a_tau - deg_b + 1)
    return order_bound(rho, alpha, beta)


def _orders_from_residuals(residuals, tol: float, start: int) -> int:
    """Largest n such that the first (n - start + 1) residuals pass."""
    order = start
    for res in residuals:
        if res > tol:
            break
        order += 1
    return order


def check_continuous(coeffs: ContinuousCoefficients, kappa_max: int = 6,
                     tol: float = TOL_CHAINED) -> ConditionReport:
    """Measure the moment conditions of a continuous coefficient set.

    The weight condition of order kappa asks the weighted moment of
    B(tau) tau^(kappa-1) to equal 1/kappa; the stage and transpose
    conditions are polynomial identities whose residual is the largest
    stray coefficient.  The scan runs past the construction orders so the
    report shows where each condition chain breaks.
    """
    basis = coeffs.basis
    moments = basis.moments
    b_poly = coeffs.b_poly
    a_poly = coeffs.a_poly

    b_res = []
    for kappa in range(1, kappa_max + 1):
        value = float(np.dot(b_poly, moments[kappa - 1: kappa - 1 + len(b_poly)]))
        b_res.append(abs(value - 1.0 / kappa))

    cn_res = []
    n_tau, n_sigma = a_poly.shape
    for kappa in range(1, kappa_max):
        lhs = np.array([
            float(np.dot(a_poly[m, :], moments[kappa - 1: kappa - 1 + n_sigma]))
            for m in range(n_tau)])
        diff = np.zeros(max(n_tau, kappa + 2))
        diff[:n_tau] = lhs
        diff[kappa + 1] -= 1.0 / (kappa * (kappa + 1))
        cn_res.append(float(np.max(np.abs(diff))))

    # the transpose condition carries the weight on tau only
    ba = np.zeros((n_tau + len(b_poly) - 1, n_sigma))
    for col in range(n_sigma):
        ba[:, col] = np.convolve(b_poly, a_poly[:, col])
    dn_res = []
    for kappa in range(1, kappa_max):
        lhs = np.array([
            float(np.dot(ba[:, col], moments[kappa - 1: kappa - 1 + ba.shape[0]]))
            for col in range(n_sigma)])
        target = np.zeros(kappa + 2)
        target[kappa + 1] = 1.0 / (kappa * (kappa + 1))
        target[1] -= 1.0 / kappa
        target[0] += 1.0 / (kappa + 1)
        rhs = np.convolve(b_poly, target)
        diff = np.zeros(max(len(lhs), len(rhs)))
        diff[: len(lhs)] = lhs
        diff[: len(rhs)] -= rhs
        dn_res.append(float(np.max(np.abs(diff))))

    grid = np.linspace(0.0, 1.0, 24)
    symplectic = symplectic_identity_residual(coeffs, grid)
    symmetry = None
    if coeffs.family.symmetric_weight:
        symmetry = _continuous_symmetry_residual(coeffs, grid)

    b_order = _orders_from_residuals(b_res, tol, 0)
    cn_order = _orders_from_residuals(cn_res, tol, 1)
    dn_order = _orders_from_residuals(dn_res, tol, 1)
    return ConditionReport(
        kind="continuous", b_residuals=tuple(b_res),
        cn_residuals=tuple(cn_res), dn_residuals=tuple(dn_res),
        b_order=b_order, cn_order=cn_order, dn_order=dn_order,
        symplectic_residual=symplectic, symmetry_residual=symmetry,
        predicted_order=order_bound(b_order, cn_order, dn_order))


def _continuous_symmetry_residual(coeffs: ContinuousCoefficients,
                                  grid: np.ndarray) -> float:
    """Residual of the time-reversal conditions on the coefficient functions."""
    tt, ss = np.meshgrid(grid, grid, indexing="ij")
    adjoint = (coeffs.b(1.0 - ss) * tt - coeffs.b_bar(1.0 - ss)
               + coeffs.a_bar(1.0 - tt, 1.0 - ss))
    res = float(np.max(np.abs(adjoint - coeffs.a_bar(tt, ss))))
    res = max(res, float(np.max(np.abs(coeffs.b(grid) - coeffs.b(1.0 - grid)))))
    return res


def check_discrete(tableau: RKNTableau, kappa_max: int | None = None,
                   tol: float = TOL_CHAINED) -> ConditionReport:
    """Measure the classical simplifying assumptions of a tableau."""
    s = tableau.s
    if kappa_max is None:
        kappa_max = 2 * s + 2
    c = tableau.c
    bp = tableau.b_prime
    a = tableau.a_bar

    b_res = []
    for kappa in range(1, kappa_max + 1):
        b_res.append(abs(float(bp @ c ** (kappa - 1)) - 1.0 / kappa))

    cn_res = []
    for kappa in range(1, kappa_max):
        lhs = a @ c ** (kappa - 1)
        rhs = c ** (kappa + 1) / (kappa * (kappa + 1))
        cn_res.append(float(np.max(np.abs(lhs - rhs))))

    dn_res = []
    for kappa in range(1, kappa_max):
        lhs = (bp * c ** (kappa - 1)) @ a
        rhs = bp * (c ** (kappa + 1) / (kappa * (kappa + 1))
                    - c / kappa + 1.0 / (kappa + 1))
        dn_res.append(float(np.max(np.abs(lhs - rhs))))

    symmetry = check_symmetric(tableau)
    b_order = _orders_from_residuals(b_res, tol, 0)
    cn_order = _orders_from_residuals(cn_res, tol, 1)
    dn_order = _orders_from_residuals(dn_res, tol, 1)
    return ConditionReport(
        kind="discrete", b_residuals=tuple(b_res),
        cn_residuals=tuple(cn_res), dn_residuals=tuple(dn_res),
        b_order=b_order, cn_order=cn_order, dn_order=dn_order,
        symplectic_residual=check_symplectic(tableau),
        symmetry_residual=symmetry,
        predicted_order=order_bound(b_order, cn_order, dn_order))


def check_symplectic(tableau: RKNTableau) -> float:
    """Max residual of the two algebraic symplecticity identities."""
    pairwise = discrete_symplectic_residual(tableau)
    position = float(np.max(np.abs(
        tableau.b_bar - tableau.b_prime * (1.0 - tableau.c))))
    return max(pairwise, position)


def adjoint_tableau(tableau: RKNTableau) -> RKNTableau:
    """Tableau of the adjoint (time-reversed) method.

    Stage order is flipped so that the adjoint of a reflection-symmetric
    rule keeps increasing nodes; the transformation is an involution for
    any tableau.
    """
    rev = slice(None, None, -1)
    c = 1.0 - tableau.c[rev]
    bp = tableau.b_prime[rev]
    bb = bp - tableau.b_bar[rev]
    a = (bp[None, :] * (1.0 - tableau.c[rev])[:, None]
         - tableau.b_bar[rev][None, :] + tableau.a_bar[rev, rev])
    return RKNTableau(c=c, a_bar=a, b_bar=bb, b_prime=bp,
                      family=tableau.family, method=tableau.method,
                      gamma=tableau.gamma, spec=tableau.spec)


def check_symmetric(tableau: RKNTableau) -> float | None:
    """Entry-wise distance to the adjoint tableau.

    Only meaningful when the weight is reflection-symmetric (the adjoint of
    the underlying scheme then has the same weight); otherwise None is
    returned and the method's asymmetry shows up in the integrator
    round-trip instead.
    """
    if tableau.family is None or not tableau.family.symmetric_weight:
        return None
    adj = adjoint_tableau(tableau)
    return float(max(
        np.max(np.abs(adj.c - tableau.c)),
        np.max(np.abs(adj.a_bar - tableau.a_bar)),
        np.max(np.abs(adj.b_bar - tableau.b_bar)),
        np.max(np.abs(adj.b_prime - tableau.b_prime))))


@dataclass(frozen=True)
class OrderEstimate:
    """Step-halving study: endpoint errors and the slopes between levels."""

    step_sizes: tuple[float, ...]
    errors: tuple[float, ...]
    slopes: tuple[float, ...]

    @property
    def mean_slope(self) -> float:
        finite = [s for s in self.slopes if math.isfinite(s)]
        return sum(finite) / len(finite) if finite else math.nan


def empirical_order(tableau: RKNTableau, problem: SecondOrderProblem,
                    h0: float, levels: int, t_end: float = 1.0,
                    config: SolverConfig | None = None) -> OrderEstimate:
    """Measure the convergence order by repeated step halving.

    Integrates to t_end with h0, h0/2, ... and reports the max-norm endpoint
    errors against the exact solution together with the dyadic slopes
    log2(e_k / e_{k+1}).
    """
    if problem.exact is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    config = config or SolverConfig()
    steps0 = round(t_end / h0)
    hs, errors = [], []
    for level in range(levels):
        h = h0 / 2 ** level
        n_steps = steps0 * 2 ** level
        traj = integrate(tableau, problem, 0.0, problem.q0, problem.qp0,
                         h, n_steps, config)
        q_ref, qp_ref = problem.exact(traj.times[-1])
        err = max(float(np.max(np.abs(traj.q[-1] - q_ref))),
                  float(np.max(np.abs(traj.qp[-1] - qp_ref))))
        hs.append(h)
        errors.append(err)
    slopes = []
    for a, b in zip(errors, errors[1:]):
        slopes.append(math.log2(a / b) if a > 0 and b > 0 else math.nan)
    return OrderEstimate(step_sizes=tuple(hs), errors=tuple(errors),
                         slopes=tuple(slopes))


def report_lines(report: ConditionReport) -> list[str]:
    """Human-readable rendering of a condition report."""
    lines = [f"{report.kind} condition report"]
    for label, residuals in (("B", report.b_residuals),
                             ("CN", report.cn_residuals),
                             ("DN", report.dn_residuals)):
        for offset, res in enumerate(residuals):
            lines.append(f"  {label} kappa={offset + 1}: {res:.3e}")
    lines.append(f"largest satisfied: B({report.b_order}), "
                 f"CN({report.cn_order}), DN({report.dn_order})")
    lines.append(f"predicted order: {report.predicted_order}")
    lines.append(f"symplectic residual: {report.symplectic_residual:.3e}")
    if report.symmetry_residual is None:
        lines.append("symmetry: not applicable")
    else:
        lines.append(f"symmetry residual: {report.symmetry_residual:.3e}")
    return lines


def report_csv(report: ConditionReport) -> str:
    """CSV rendering: condition,kappa,residual (structural rows use kappa 0)."""
    rows = ["condition,kappa,residual"]
    for label, residuals in (("B", report.b_residuals),
                             ("CN", report.cn_residuals),
                             ("DN", report.dn_residuals)):
        for offset, res in enumerate(residuals):
            rows.append(f"{label},{offset + 1},{res:.17g}")
    rows.append(f"symplectic,0,{report.symplectic_residual:.17g}")
    if report.symmetry_residual is not None:
        rows.append(f"symmetry,0,{report.symmetry_residual:.17g}")
    rows.append(f"predicted_order,0,{report.predicted_order}")
    return "\n".join(rows) + "\n"
