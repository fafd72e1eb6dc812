"""Bernstein approximation operators and basis conversion on [0,1]^n.

Provides the degree-d Bernstein operator B_d(p) built from exact grid values
p(k/d), conversion between the monomial and Bernstein bases, and the classic
coefficient range enclosure min_k b_k <= p <= max_k b_k used by the oracle.

Everything here is exact rational arithmetic; the hot paths (basis
conversion and grid minima at large d) run over plain Python integers with
denominators cleared, which is an order of magnitude faster than Fraction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterator, Sequence

from .polyring import Exponent, Polynomial


def _check_degree(d: int) -> None:
    if d < 1:
        raise ValueError(f"Bernstein degree must be >= 1, got {d}")


def univariate_basis(d: int, k: int, num_vars: int = 1, var: int = 0) -> Polynomial:
    """C(d,k) x^k (1-x)^(d-k) as a polynomial in the given variable slot."""
    _check_degree(d)
    if not 0 <= k <= d:
        raise ValueError(f"basis index {k} outside [0, {d}]")
    terms = {}
    for j in range(d - k + 1):
        exps = [0] * num_vars
        exps[var] = k + j
        # C(d,k) * C(d-k, j) * (-1)^j  from expanding (1-x)^(d-k)
        terms[tuple(exps)] = Fraction(comb(d, k) * comb(d - k, j) * (-1) ** j)
    return Polynomial(num_vars, terms)


def bernstein_basis(d: int, kappa: Sequence[int]) -> Polynomial:
    """The n-variate Bernstein basis polynomial prod_i C(d,k_i) x_i^{k_i} (1-x_i)^{d-k_i}."""
    _check_degree(d)
    n = len(kappa)
    if n < 1:
        raise ValueError("kappa must be nonempty")
    for k in kappa:
        if not 0 <= k <= d:
            raise ValueError(f"kappa component {k} outside [0, {d}]")
    out = Polynomial.constant(n, 1)
    for i, k in enumerate(kappa):
        out = out * univariate_basis(d, k, num_vars=n, var=i)
    return out


def grid_points(d: int, n: int) -> Iterator[Exponent]:
    """All kappa in {0..d}^n, lexicographic."""
    return itertools.product(range(d + 1), repeat=n)


def bernstein_approx(p: Polynomial, d: int) -> Polynomial:
    """B_d(p) = sum_kappa p(kappa/d) P_{d,kappa}, computed exactly.

    Reproduces affine polynomials for every d, and converges uniformly on
    the cube as d grows.  Cost is (d+1)^n basis expansions, so keep d small
    for n >= 3.
    """
    _check_degree(d)
    n = p.num_vars
    out = Polynomial.zero(n)
    for kappa in grid_points(d, n):
        value = p.evaluate([Fraction(k, d) for k in kappa])
        if value:
            out = out + bernstein_basis(d, kappa).scale(value)
    return out


def partition_of_unity_check(d: int, n: int) -> bool:
    """Verify sum_kappa P_{d,kappa} = 1 exactly, and that the leading
    binomial products sum to 2^(n*d)."""
    _check_degree(d)
    if n < 1:
        raise ValueError("n must be >= 1")
    total = Polynomial.zero(n)
    coeff_sum = 0
    for kappa in grid_points(d, n):
        total = total + bernstein_basis(d, kappa)
        prod = 1
        for k in kappa:
            prod *= comb(d, k)
        coeff_sum += prod
    return total == Polynomial.constant(n, 1) and coeff_sum == 2 ** (n * d)


@dataclass(frozen=True)
class BernsteinExpansion:
    """Exact coefficients b_kappa with p = sum b_kappa P_{d,kappa}."""

    degree: int
    num_vars: int
    coefficients: dict[Exponent, Fraction]

    def to_polynomial(self) -> Polynomial:
        out = Polynomial.zero(self.num_vars)
        for kappa, b in self.coefficients.items():
            if b:
                out = out + bernstein_basis(self.degree, kappa).scale(b)
        return out

    def coefficient_range(self) -> tuple[Fraction, Fraction]:
        vals = self.coefficients.values()
        return min(vals), max(vals)


def _tensor_coefficient_grid(p: Polynomial, degrees: Sequence[int]) -> tuple[list[int], int]:
    """Bernstein coefficients of p at per-variable degrees, scaled to a
    common integer denominator.

    Returns (values in lex grid order over prod_i {0..d_i}, denominator D)
    with b_kappa = value / D.  Uses the per-variable triangular basis change
        x^a = sum_{k>=a} C(k,a)/C(d,a) P_{d,k}
    applied tensorially over plain ints.
    """
    n = p.num_vars
    if len(degrees) != n:
        raise ValueError("one degree per variable required")
    # Per-variable max exponent keeps the weight tables small.
    maxexp = [0] * n
    for exps in p.terms:
        for i, e in enumerate(exps):
            maxexp[i] = max(maxexp[i], e)
    for i in range(n):
        if degrees[i] < maxexp[i]:
            raise ValueError(
                f"need degree >= {maxexp[i]} in variable {i + 1}, got {degrees[i]}"
            )
    # Common denominator: clear p's denominators and the C(d_i,a) divisors.
    pden = 1
    for c in p.terms.values():
        pden = pden * c.denominator // _gcd(pden, c.denominator)
    bden = 1
    for i in range(n):
        for a in range(maxexp[i] + 1):
            cda = comb(degrees[i], a)
            bden = bden * cda // _gcd(bden, cda)
    # weight[i][k][a] = C(k,a)/C(d_i,a) * bden  (integer)
    weights = []
    for i in range(n):
        wi = [[comb(k, a) * (bden // comb(degrees[i], a)) for a in range(maxexp[i] + 1)]
              for k in range(degrees[i] + 1)]
        weights.append(wi)
    int_terms = [(exps, int(c * pden)) for exps, c in p.terms.items()]
    values: list[int] = []
    for kappa in itertools.product(*(range(d + 1) for d in degrees)):
        acc = 0
        for exps, ic in int_terms:
            w = ic
            ok = True
            for i, a in enumerate(exps):
                if a > kappa[i]:
                    ok = False
                    break
                w *= weights[i][kappa[i]][a]
            if ok:
                acc += w
        values.append(acc)
    # acc is sum of ic * prod_i (C(k,a)/C(d_i,a) * bden): each factor bden
    # appears n times, so the true denominator is pden * bden^n.
    return values, pden * bden ** n


def tensor_bernstein_coefficients(p: Polynomial, degrees: Sequence[int]) -> dict[Exponent, Fraction]:
    """Coefficients b_kappa with p = sum b_kappa prod_i C(d_i,k_i) x_i^{k_i} (1-x_i)^{d_i-k_i}."""
    values, den = _tensor_coefficient_grid(p, degrees)
    kappas = itertools.product(*(range(d + 1) for d in degrees))
    return {kappa: Fraction(v, den) for kappa, v in zip(kappas, values)}


def _integer_coefficient_grid(p: Polynomial, d: int) -> tuple[list[int], int]:
    """Uniform-degree Bernstein coefficients of p, integer-scaled."""
    deg = max(p.degree(), 0)
    if d < deg:
        raise ValueError(f"need d >= degree(p) = {deg}, got {d}")
    return _tensor_coefficient_grid(p, [d] * p.num_vars)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def to_bernstein_basis(p: Polynomial, d: int) -> BernsteinExpansion:
    """Exact change of basis: coefficients b_kappa with p = sum b_kappa P_{d,kappa}.

    Requires d >= degree(p).  Round-tripping through to_polynomial() is the
    identity.
    """
    _check_degree(d)
    values, den = _integer_coefficient_grid(p, d)
    coeffs = {
        kappa: Fraction(v, den)
        for kappa, v in zip(grid_points(d, p.num_vars), values)
    }
    return BernsteinExpansion(degree=d, num_vars=p.num_vars, coefficients=coeffs)


def coefficient_enclosure(p: Polynomial, d: int) -> tuple[Fraction, Fraction]:
    """Range enclosure [min_k b_k, max_k b_k] containing [p_min, p_max] on the cube.

    Same coefficients as to_bernstein_basis, but only the extremes are
    materialized as Fractions.
    """
    _check_degree(d)
    values, den = _integer_coefficient_grid(p, d)
    return Fraction(min(values), den), Fraction(max(values), den)


def grid_values_range(p: Polynomial, d: int) -> tuple[Fraction, Fraction]:
    """Exact min/max of p over the uniform grid {0, 1/d, ..., 1}^n.

    These are attained values of p, so min is an upper bound for p_min and
    max a lower bound for p_max.  Runs over cleared-denominator integers.
    """
    _check_degree(d)
    n = p.num_vars
    deg = max(p.degree(), 0)
    pden = 1
    for c in p.terms.values():
        pden = pden * c.denominator // _gcd(pden, c.denominator)
    # p(kappa/d) * pden * d^deg is an integer.
    int_terms = [(exps, int(c * pden) * d ** (deg - sum(exps))) for exps, c in p.terms.items()]
    maxexp = [0] * n
    for exps in p.terms:
        for i, e in enumerate(exps):
            maxexp[i] = max(maxexp[i], e)
    # pow_table indexed [i][k][a] = k^a
    pow_table = [[[k ** a for a in range(maxexp[i] + 1)] for k in range(d + 1)] for i in range(n)]
    best_lo = None
    best_hi = None
    for kappa in grid_points(d, n):
        acc = 0
        for exps, ic in int_terms:
            w = ic
            for i, a in enumerate(exps):
                if a:
                    w *= pow_table[i][kappa[i]][a]
            acc += w
        if best_lo is None or acc < best_lo:
            best_lo = acc
        if best_hi is None or acc > best_hi:
            best_hi = acc
    den = pden * d ** deg
    return Fraction(best_lo, den), Fraction(best_hi, den)
