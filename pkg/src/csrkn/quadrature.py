"""Gauss rules for the supported weight functions.

Nodes and weights come from the Golub-Welsch eigenproblem on the symmetric
tridiagonal Jacobi matrix of the family recurrence.  The eigensolver is a
small implicit-shift QL sweep kept in-repo: the matrices never exceed
MAX_DEGREE x MAX_DEGREE and a non-converging sweep must surface as an error,
never as a silently degraded rule.  Every rule is cross-checked on
construction against the interpolatory weight definition
b_i = int_I l_i(x) w(x) dx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import Family, OrthonormalBasis, recurrence_coefficients

_QL_MAX_SWEEPS = 50
_INTERP_RTOL = 1e-11


class EigenConvergenceError(RuntimeError):
    """QL iteration failed to isolate an eigenvalue within the sweep budget."""


def tridiagonal_eigen(diag, off) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric tridiagonal matrix.

    Implicit-shift QL with Wilkinson shifts, accumulating the full
    eigenvector matrix.  Returns (values ascending, vectors as columns).
    """
    d = np.asarray(diag, dtype=float).copy()
    n = d.size
    e = np.zeros(n)
    e[: n - 1] = np.asarray(off, dtype=float)
    z = np.eye(n)
    eps = np.finfo(float).eps
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > _QL_MAX_SWEEPS:
                raise EigenConvergenceError(
                    f"QL sweep budget ({_QL_MAX_SWEEPS}) exhausted at "
                    f"eigenvalue {l} of {n}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                fcol = z[:, i + 1].copy()
                z[:, i + 1] = s * z[:, i] + c * fcol
                z[:, i] = c * z[:, i] - s * fcol
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    order = np.argsort(d, kind="stable")
    return d[order], z[:, order]


@dataclass(frozen=True)
class QuadratureRule:
    """s-point Gauss rule: nodes are the zeros of P_s, weights are positive."""

    family: Family
    s: int
    nodes: np.ndarray
    weights: np.ndarray


def _lagrange_coeffs(nodes: np.ndarray, i: int) -> np.ndarray:
    """Monomial coefficients of the i-th Lagrange cardinal polynomial."""
    poly = np.array([1.0])
    for j, cj in enumerate(nodes):
        if j == i:
            continue
        poly = np.convolve(poly, np.array([-cj, 1.0])) / (nodes[i] - cj)
    return poly


def interpolatory_weights(basis: OrthonormalBasis, nodes: np.ndarray) -> np.ndarray:
    """Weights from the literal definition b_i = int_I l_i(x) w(x) dx."""
    return np.array([basis.weighted_integral(_lagrange_coeffs(nodes, i))
                     for i in range(len(nodes))])


def gauss_rule(basis: OrthonormalBasis, s: int) -> QuadratureRule:
    """s-point Gauss rule for the basis family (exact to degree 2s - 1)."""
    if not 1 <= s <= basis.max_degree:
        raise ValueError(f"s must be in 1..{basis.max_degree}, got {s}")
    diag, off = recurrence_coefficients(basis.family, s)
    nodes, vectors = tridiagonal_eigen(diag, off[: s - 1])
    weights = basis.moments[0] * vectors[0, :] ** 2
    ref = interpolatory_weights(basis, nodes)
    drift = np.max(np.abs(weights - ref) / np.abs(ref))
    if drift > _INTERP_RTOL:
        raise EigenConvergenceError(
            f"Golub-Welsch weights disagree with the interpolatory "
            f"definition (relative drift {drift:.3e})")
    return QuadratureRule(family=basis.family, s=s, nodes=nodes, weights=weights)


def exactness_degree(rule: QuadratureRule, basis: OrthonormalBasis,
                     rtol: float = 1e-10) -> int:
    """Largest d with sum b_i c_i^k == m_k for every k <= d."""
    if rule.family is not basis.family:
        raise ValueError("rule and basis families differ")
    degree = -1
    powers = np.ones_like(rule.nodes)
    for k in range(len(basis.moments)):
        mk = basis.moments[k]
        if abs(float(rule.weights @ powers) - mk) >= rtol * max(1.0, abs(mk)):
            break
        degree = k
        powers = powers * rule.nodes
    return degree
