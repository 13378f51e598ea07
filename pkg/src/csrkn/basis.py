"""Weighted orthonormal polynomial families.

Four families are supported: shifted Legendre and shifted Chebyshev (first
kind) on [0, 1], and standard/shifted Hermite on the whole real line.  Each
polynomial is stored as a dense monomial coefficient vector (ascending
powers), so that every integral against the weight reduces to a dot product
with precomputed moments.

High-degree products cancel violently in the monomial basis (terms near
1e10 summing to order one), so the moment table is kept as hi/lo double
pairs and the weighted dots run in compensated double-double arithmetic.
That confines the error of inner products to what the stored coefficient
vectors themselves carry, which for the capped degrees stays well under
1e-12.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial import polynomial as npoly

MAX_DEGREE = 12

_PI_50 = decimal.Decimal("3.14159265358979323846264338327950288419716939937511")
_SPLIT = 134217729.0  # 2**27 + 1, Veltkamp splitting constant


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    t = s - a
    return s, (a - (s - t)) + (b - t)


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ah = _SPLIT * a
    ah -= ah - a
    al = a - ah
    bh = _SPLIT * b
    bh -= bh - b
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


class Family(Enum):
    """Supported weight functions and their intervals."""

    SHIFTED_LEGENDRE = "shifted-legendre"      # w(x) = 1 on [0, 1]
    SHIFTED_CHEBYSHEV1 = "shifted-chebyshev1"  # w(x) = 1/(2 sqrt(x(1-x))) on [0, 1]
    SHIFTED_HERMITE = "shifted-hermite"        # w(x) = exp(-(2x-1)^2) on R
    STANDARD_HERMITE = "standard-hermite"      # w(x) = exp(-x^2) on R

    @property
    def symmetric_weight(self) -> bool:
        """True when w(x) == w(1 - x) everywhere."""
        return self is not Family.STANDARD_HERMITE

    @property
    def finite_interval(self) -> bool:
        return self in (Family.SHIFTED_LEGENDRE, Family.SHIFTED_CHEBYSHEV1)

    def weight(self, x):
        """Evaluate the weight function (vectorized)."""
        x = np.asarray(x, dtype=float)
        if self is Family.SHIFTED_LEGENDRE:
            return np.ones_like(x)
        if self is Family.SHIFTED_CHEBYSHEV1:
            return 1.0 / (2.0 * np.sqrt(x * (1.0 - x)))
        if self is Family.SHIFTED_HERMITE:
            return np.exp(-((2.0 * x - 1.0) ** 2))
        return np.exp(-(x * x))


def family_from_name(name: str) -> Family:
    for fam in Family:
        if fam.value == name:
            return fam
    raise ValueError(f"unknown family {name!r}; choose from "
                     f"{', '.join(f.value for f in Family)}")


def _decimal_moments(family: Family, count: int) -> list[decimal.Decimal]:
    one = decimal.Decimal(1)
    if family is Family.SHIFTED_LEGENDRE:
        return [one / (k + 1) for k in range(count)]
    if family is Family.SHIFTED_CHEBYSHEV1:
        # m_k = (pi/2) * binom(2k, k) / 4^k via the ratio recurrence
        m = [_PI_50 / 2]
        for k in range(1, count):
            m.append(m[k - 1] * (2 * k - 1) / (2 * k))
        return m
    if family is Family.STANDARD_HERMITE:
        # odd moments vanish, even ones follow the Gamma-function recurrence
        m = [_PI_50.sqrt(), decimal.Decimal(0)]
        for k in range(2, count):
            m.append(m[k - 2] * (k - 1) / 2)
        return m[:count]
    # shift x -> (u+1)/2 turns these into a binomial mix of the standard
    # Hermite moments
    std = _decimal_moments(Family.STANDARD_HERMITE, count)
    out = []
    for k in range(count):
        acc = sum(math.comb(k, j) * std[j] for j in range(0, k + 1, 2))
        out.append(acc / decimal.Decimal(2) ** (k + 1))
    return out


def _moments(family: Family, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form moments m_k = int_I x^k w(x) dx as hi/lo double pairs."""
    with decimal.localcontext() as ctx:
        ctx.prec = 50
        exact = _decimal_moments(family, count)
        hi = np.array([float(m) for m in exact])
        lo = np.array([float(m - decimal.Decimal(h))
                       for m, h in zip(exact, hi)])
    return hi, lo


def _decimal_recurrence(family: Family, k: int) -> tuple[decimal.Decimal,
                                                         decimal.Decimal]:
    """(diag_k, off_k) of the orthonormal recurrence, in working precision."""
    two = decimal.Decimal(2)
    if family is Family.SHIFTED_LEGENDRE:
        off = (k + 1) / (decimal.Decimal((2 * k + 1) * (2 * k + 3)).sqrt() * 2)
        return 1 / two, off
    if family is Family.SHIFTED_CHEBYSHEV1:
        off = 1 / (2 * two.sqrt()) if k == 0 else decimal.Decimal("0.25")
        return 1 / two, off
    if family is Family.SHIFTED_HERMITE:
        return 1 / two, (decimal.Decimal(k + 1) / 2).sqrt() / 2
    return decimal.Decimal(0), (decimal.Decimal(k + 1) / 2).sqrt()


def _decimal_coeffs(family: Family, max_degree: int,
                    m0: decimal.Decimal) -> list[list[decimal.Decimal]]:
    zero = decimal.Decimal(0)
    polys = [[1 / m0.sqrt()]]
    prev: list[decimal.Decimal] = []
    for k in range(max_degree):
        diag, off = _decimal_recurrence(family, k)
        cur = polys[k]
        nxt = [zero] * (k + 2)
        for i, c in enumerate(cur):
            nxt[i + 1] += c
            nxt[i] -= diag * c
        if k > 0:
            _, off_prev = _decimal_recurrence(family, k - 1)
            for i, c in enumerate(prev):
                nxt[i] -= off_prev * c
        polys.append([c / off for c in nxt])
        prev = cur
    return polys


def recurrence_coefficients(family: Family, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Jacobi coefficients of the orthonormal three-term recurrence.

    Returns (diag, off) with x p_k = off[k] p_{k+1} + diag[k] p_k
    + off[k-1] p_{k-1}.  The shifted families are the classical ones under
    x -> (u+1)/2, which maps the Jacobi matrix J to (J + I)/2.
    """
    k = np.arange(n, dtype=float)
    if family is Family.SHIFTED_LEGENDRE:
        off = (k + 1) / np.sqrt((2 * k + 1) * (2 * k + 3)) / 2.0
        diag = np.full(n, 0.5)
    elif family is Family.SHIFTED_CHEBYSHEV1:
        off = np.full(n, 0.25)
        if n > 0:
            off[0] = 1.0 / (2.0 * math.sqrt(2.0))
        diag = np.full(n, 0.5)
    elif family is Family.SHIFTED_HERMITE:
        off = np.sqrt((k + 1) / 2.0) / 2.0
        diag = np.full(n, 0.5)
    else:
        off = np.sqrt((k + 1) / 2.0)
        diag = np.zeros(n)
    return diag, off


@dataclass(frozen=True)
class OrthonormalBasis:
    """Orthonormal polynomials P_0 .. P_max_degree for one weight function.

    ``coeffs[n]`` holds the monomial coefficients of P_n (ascending powers,
    length n + 1, positive leading coefficient).  The coefficients are
    correctly rounded doubles; their sub-ulp remainders and those of the
    moment table are kept alongside so the family's own inner products do
    not inherit the monomial cancellation loss.
    """

    family: Family
    max_degree: int
    coeffs: tuple[np.ndarray, ...]
    coeffs_lo: tuple[np.ndarray, ...]
    moments: np.ndarray
    moments_lo: np.ndarray

    def poly(self, n: int) -> np.ndarray:
        if not 0 <= n <= self.max_degree:
            raise ValueError(f"degree {n} outside 0..{self.max_degree}")
        return self.coeffs[n]

    def eval(self, n: int, x):
        """Evaluate P_n at x (vectorized)."""
        return npoly.polyval(np.asarray(x, dtype=float), self.poly(n))

    def _resolve(self, poly) -> tuple[np.ndarray, np.ndarray]:
        """Attach the stored remainder when poly is one of the family."""
        poly = np.asarray(poly, dtype=float)
        n = len(poly) - 1
        if 0 <= n <= self.max_degree and np.array_equal(poly, self.coeffs[n]):
            return self.coeffs[n], self.coeffs_lo[n]
        return poly, np.zeros_like(poly)

    def _moment_dot(self, terms) -> float:
        """Compensated sum of (hi, lo, moment index) triples."""
        hi = lo = 0.0
        for chi, clo, k in terms:
            p, err = _two_prod(chi, self.moments[k])
            err += chi * self.moments_lo[k] + clo * self.moments[k]
            hi, carry = _two_sum(hi, p)
            lo += carry + err
        return hi + lo

    def weighted_integral(self, poly) -> float:
        """int_I p(x) w(x) dx for a monomial-coefficient vector p."""
        poly = np.asarray(poly, dtype=float)
        if len(poly) > len(self.moments):
            raise ValueError(
                f"degree {len(poly) - 1} exceeds stored moments "
                f"(max degree {len(self.moments) - 1})")
        return self._moment_dot(
            (c, 0.0, k) for k, c in enumerate(poly) if c != 0.0)


def make_basis(family: Family, max_degree: int) -> OrthonormalBasis:
    """Build the orthonormal family from its three-term recurrence.

    The recurrence runs in 50-digit working precision and the results are
    rounded to double; everything downstream works on the rounded vectors.
    """
    if not 0 <= max_degree <= MAX_DEGREE:
        raise ValueError(
            f"max_degree must be in 0..{MAX_DEGREE} (monomial conditioning), "
            f"got {max_degree}")
    with decimal.localcontext() as ctx:
        ctx.prec = 50
        exact_moments = _decimal_moments(family, 2 * max_degree + 3)
        moments = np.array([float(m) for m in exact_moments])
        moments_lo = np.array([float(m - decimal.Decimal(h))
                               for m, h in zip(exact_moments, moments)])
        exact_coeffs = _decimal_coeffs(family, max_degree, exact_moments[0])
        coeffs = []
        coeffs_lo = []
        for poly in exact_coeffs:
            hi = np.array([float(c) for c in poly])
            coeffs.append(hi)
            coeffs_lo.append(np.array([float(c - decimal.Decimal(h))
                                       for c, h in zip(poly, hi)]))
    return OrthonormalBasis(family=family, max_degree=max_degree,
                            coeffs=tuple(coeffs), coeffs_lo=tuple(coeffs_lo),
                            moments=moments, moments_lo=moments_lo)


def inner_product(basis: OrthonormalBasis, p, q) -> float:
    """Weighted inner product <p, q>_w of two monomial-coefficient vectors.

    Summed as sum_{m,n} p_m q_n m_{m+n} with exact term products, so the
    violent cancellation of high-degree cross terms costs no accuracy.
    Vectors recognized as the family's own polynomials are evaluated with
    their stored sub-ulp refinements.
    """
    p, p_lo = basis._resolve(p)
    q, q_lo = basis._resolve(q)
    deg = (len(p) - 1) + (len(q) - 1)
    if deg > 2 * basis.max_degree + 2:
        raise ValueError(
            f"product degree {deg} exceeds moment table "
            f"({2 * basis.max_degree + 2})")

    def terms():
        for m, cm in enumerate(p):
            if cm == 0.0 and p_lo[m] == 0.0:
                continue
            for n, dn in enumerate(q):
                if dn == 0.0 and q_lo[n] == 0.0:
                    continue
                chi, clo = _two_prod(float(cm), float(dn))
                clo += float(cm) * q_lo[n] + p_lo[m] * float(dn)
                yield chi, clo, m + n

    return basis._moment_dot(terms())


def unit_integral(poly) -> float:
    """Plain int_0^1 p(x) dx for a monomial-coefficient vector."""
    poly = np.asarray(poly, dtype=float)
    return float(sum(c / (k + 1) for k, c in enumerate(poly)))


def unit_interval_integral(basis: OrthonormalBasis, n: int) -> float:
    """int_0^1 P_n(x) dx.

    The range [0, 1] is fixed for every family, including those weighted on
    the whole real line: the stage interval is always the unit interval even
    when the polynomial family lives elsewhere.
    """
    return unit_integral(basis.poly(n))


def double_primitive(basis: OrthonormalBasis, n: int) -> np.ndarray:
    """Coefficients of int_0^tau int_0^a P_n(x) dx da, a degree n+2 polynomial."""
    p = basis.poly(n)
    out = np.zeros(len(p) + 2)
    for k, c in enumerate(p):
        out[k + 2] = c / ((k + 1) * (k + 2))
    return out
