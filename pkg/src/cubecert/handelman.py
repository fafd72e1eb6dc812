"""Handelman lower bounds over the unit cube via exact-rational LP.

The order-r truncated preprime generated by x_1, 1-x_1, ..., x_n, 1-x_n
consists of nonnegative scalar combinations of the products
x^h (1-x)^k with |h|+|k| <= r.  The best lower bound

    p_han(r) = sup { mu : p - mu in H_r }

is a linear program in (mu, lambda); it is solved here exactly, so the
returned bound and certificate are rigorous, not floating approximations.

Multiplying any product by x_i + (1-x_i) = 1 raises its level by one while
staying in the cone, so the cone is already generated by the level-r
products alone.  The LP is built on that homogeneous slice by default
(about 5x fewer columns at r=16); certificates it returns are still valid
order-r certificates, and the optimum is unchanged.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, NamedTuple

import numpy as np

from . import bernstein, exactlp
from .polyring import Exponent, Polynomial, monomials_upto


class HandelmanBasisElement(NamedTuple):
    """Exponents of the product prod_i x_i^{h_i} (1-x_i)^{k_i}."""

    h: Exponent
    k: Exponent

    @property
    def level(self) -> int:
        return sum(self.h) + sum(self.k)


class HandelmanInfeasibleError(RuntimeError):
    """No representation of p - mu exists at this order for any mu."""


def _compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    """All tuples of `parts` nonnegative ints summing to `total`, lex from
    the first coordinate high to low."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_handelman_basis(n: int, r: int) -> list[HandelmanBasisElement]:
    """All (h, k) with |h|+|k| <= r, graded then ordered by (k, h).

    The empty product (the constant 1) is included as the first element.
    """
    if n < 1 or r < 0:
        raise ValueError("need n >= 1 and r >= 0")
    out = []
    for level in range(r + 1):
        out.extend(enumerate_handelman_level(n, level))
    return out


def enumerate_handelman_level(n: int, level: int) -> list[HandelmanBasisElement]:
    """All (h, k) with |h|+|k| = level, ordered by (k, h) ascending."""
    elems = []
    for hk in _compositions(level, 2 * n):
        h, k = hk[:n], hk[n:]
        elems.append(HandelmanBasisElement(h, k))
    elems.sort(key=lambda e: (e.k, e.h))
    return elems


def expand_basis_element(elem: HandelmanBasisElement) -> Polynomial:
    """x^h (1-x)^k as an exact polynomial (integer coefficients)."""
    n = len(elem.h)
    terms: dict[Exponent, Fraction] = {}
    ranges = [range(kv + 1) for kv in elem.k]
    for js in itertools.product(*ranges):
        coeff = 1
        for kv, j in zip(elem.k, js):
            coeff *= comb(kv, j) * (-1) ** j
        exps = tuple(hv + j for hv, j in zip(elem.h, js))
        key = exps
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return Polynomial(n, terms)


@dataclass
class HandelmanCertificate:
    """Weights lambda >= 0 with p = mu + sum lambda_(h,k) x^h (1-x)^k."""

    order: int
    mu: Fraction
    terms: dict[HandelmanBasisElement, Fraction]
    num_vars: int

    def expansion(self) -> Polynomial:
        out = Polynomial.constant(self.num_vars, self.mu)
        for elem, lam in self.terms.items():
            if lam:
                out = out + expand_basis_element(elem).scale(lam)
        return out

    def to_json_dict(self) -> dict:
        return {
            "format_version": 1,
            "n": self.num_vars,
            "order": self.order,
            "mu": str(self.mu),
            "terms": [
                {"h": list(e.h), "k": list(e.k), "lambda": str(lam)}
                for e, lam in sorted(self.terms.items(), key=lambda t: (t[0].k, t[0].h))
            ],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @classmethod
    def from_json_dict(cls, data: dict) -> "HandelmanCertificate":
        terms = {
            HandelmanBasisElement(tuple(t["h"]), tuple(t["k"])): Fraction(t["lambda"])
            for t in data["terms"]
        }
        n = int(data["n"]) if "n" in data else (len(next(iter(terms)).h) if terms else 1)
        return cls(order=int(data["order"]), mu=Fraction(data["mu"]), terms=terms, num_vars=n)

    @classmethod
    def from_json(cls, text: str) -> "HandelmanCertificate":
        return cls.from_json_dict(json.loads(text))


def verify_handelman(cert: HandelmanCertificate, p: Polynomial) -> tuple[bool, Polynomial]:
    """Exact check: all lambda >= 0 and the expansion reproduces p.

    Returns (ok, residual) where residual = p - expansion; a nonzero
    residual or a sign violation makes ok False.
    """
    residual = p - cert.expansion()
    for elem, lam in cert.terms.items():
        if lam < 0 or elem.level > cert.order:
            return False, residual
    return residual.is_zero(), residual


class HandelmanFamily:
    """LP data for fixed (n, r), reusable across many polynomials.

    Builds the level-r column matrix once.  Solves warm-start from an exact
    feasible point: p, expanded in the balanced tensor-Bernstein group and
    shifted by its least coefficient, is a nonnegative combination of one
    group of columns, and a (cached) completion of that group to a basis
    makes it basic.  That skips simplex phase 1 entirely.  The start (and
    every vertex after it) is made nondegenerate by perturbing b along the
    starting basis columns, which costs nothing exactness-wise: only the
    final basis is kept, and the solution is re-derived for the true b with
    a dual-simplex cleanup.  A cold two-phase solve remains as fallback.
    """

    def __init__(self, n: int, r: int):
        if n < 1 or r < 1:
            raise ValueError("need n >= 1 and r >= 1")
        self.n = n
        self.r = r
        self.elements = enumerate_handelman_level(n, r)
        self.monomials = [mono for mono in monomials_upto(n, r) if any(mono)]
        self.row_of = {mono: i for i, mono in enumerate(self.monomials)}
        self.m = len(self.monomials)
        zero = (0,) * n
        self.columns: list[exactlp.Column] = []
        self.costs: list[Fraction] = []
        for elem in self.elements:
            poly = expand_basis_element(elem)
            col = {}
            for exps, coeff in poly.terms.items():
                if exps == zero:
                    continue
                col[self.row_of[exps]] = int(coeff)
            self.columns.append(col)
            self.costs.append(poly.terms.get(zero, Fraction(0)))
        # balanced per-variable degrees for the warm-start group
        base, extra = divmod(r, n)
        self.group_degrees = tuple(base + (1 if i < extra else 0) for i in range(n))
        self._group_index: dict[Exponent, int] = {}
        for j, elem in enumerate(self.elements):
            dvec = tuple(hv + kv for hv, kv in zip(elem.h, elem.k))
            if dvec == self.group_degrees:
                self._group_index[elem.h] = j
        self._kappa_of_col = {j: h for h, j in self._group_index.items()}
        self._engine: exactlp.RevisedSimplex | None = None
        self._start_basis: list[int] | None = None
        self._shared_tab: exactlp._Tableau | None = None

    def _engine_lazy(self) -> exactlp.RevisedSimplex:
        if self._engine is None:
            self._engine = exactlp.RevisedSimplex(self.columns, self.m, self.costs)
        return self._engine

    def _completion_columns(self) -> list[int]:
        """Columns completing the warm-start group's span to full rank.

        The group columns sum to the constant (partition of unity), whose
        nonconstant rows vanish, so their rank is one less than their count
        and the completion has m - (group-1) members.  Column choice is
        guessed in floating point (orthogonal-residual greedy) and certified
        exactly, with an exact greedy scan as fallback; cached per family.
        """
        if self._start_basis is not None:
            return self._start_basis
        group = [self._group_index[h] for h in sorted(self._group_index)]
        group_set = set(group)
        need = self.m - (len(group) - 1)
        m = self.m
        A = np.zeros((m, len(self.columns)))
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                A[i, j] = float(v)
        norms = np.linalg.norm(A, axis=0)
        norms[norms == 0] = 1.0
        An = A / norms
        Qg, _ = np.linalg.qr(An[:, group])
        completion: list[int] = []
        Qcur = Qg
        resid_norm = np.linalg.norm(An - Qcur @ (Qcur.T @ An), axis=0)
        for j in np.argsort(-resid_norm):
            if len(completion) == need:
                break
            j = int(j)
            if j in group_set:
                continue
            v = An[:, j] - Qcur @ (Qcur.T @ An[:, j])
            nv = np.linalg.norm(v)
            if nv > 1e-7:
                completion.append(j)
                Qcur = np.hstack([Qcur, (v / nv)[:, None]])
        if len(completion) == need and self._exact_nonsingular(group[1:] + completion):
            self._start_basis = completion
            return completion
        # exact greedy fallback: extend by columns that keep the candidate
        # basis matrix at full column rank (checked fraction-free)
        completion = []
        kept = group[1:]
        for j in range(len(self.columns)):
            if len(completion) == need:
                break
            if j in group_set:
                continue
            trial = kept + completion + [j]
            sub = [[0] * len(trial) for _ in range(m)]
            for pos, jj in enumerate(trial):
                for i, v in self.columns[jj].items():
                    sub[i][pos] = v
            if _has_full_column_rank(sub, len(trial)):
                completion.append(j)
        if len(completion) != need:
            raise exactlp.LPError("could not complete the warm-start basis")
        self._start_basis = completion
        return completion

    def _exact_nonsingular(self, basis: list[int]) -> bool:
        if len(basis) != self.m:
            return False
        try:
            exactlp.montante_solve(self._engine_lazy()._basis_matrix(basis), [[0] * self.m])
            return True
        except exactlp.SingularMatrixError:
            return False

    def _shared_tableau(self) -> exactlp._Tableau:
        """Tableau pre-pivoted to the warm-start basis (cached)."""
        if self._shared_tab is not None:
            return self._shared_tab
        completion = self._completion_columns()
        group_sorted = sorted(self._group_index)
        start_cols = [self._group_index[h] for h in group_sorted[1:]] + completion
        tab = exactlp._Tableau(self.columns, self.m,
                               [Fraction(0)] * self.m, self.costs)
        for j in start_cols:
            row = next(
                (i for i in range(self.m)
                 if tab.basis[i] >= tab.n and tab.T[i, j] != 0),
                None,
            )
            if row is None:
                raise exactlp.LPError("warm-start basis is singular")
            tab.pivot(row, j)
        self._shared_tab = tab
        return tab

    def _warm_solve(self, p: Polynomial) -> list[int] | None:
        """Run the warm-started, perturbed phase 2; returns the final basis
        (exactly dual feasible for the true costs) or None on failure."""
        coeffs = bernstein.tensor_bernstein_coefficients(p, self.group_degrees)
        kappa0 = min(coeffs, key=lambda k: (coeffs[k], k))
        mu0 = coeffs[kappa0]
        group_sorted = sorted(self._group_index)
        kappa_fix = group_sorted[0]
        tab = self._shared_tableau().clone()
        if kappa0 != kappa_fix:
            col_out = self._group_index[kappa0]
            col_in = self._group_index[kappa_fix]
            pos = tab.basis.index(col_out)
            if tab.T[pos, col_in] == 0:
                return None
            tab.pivot(pos, col_in)
        # basic values: shifted Bernstein coefficients on the group columns,
        # zero on the completion, plus a tiny deterministic perturbation that
        # makes every visited vertex nondegenerate
        prng = random.Random(0x5EED)
        values = []
        for j in tab.basis:
            kappa = self._kappa_of_col.get(j)
            if kappa is not None:
                binom_prod = 1
                for dv, kv in zip(self.group_degrees, kappa):
                    binom_prod *= comb(dv, kv)
                base = (coeffs[kappa] - mu0) * binom_prod
            else:
                base = Fraction(0)
            values.append(base + Fraction(prng.randint(1, 10 ** 6), 10 ** 15))
        tab.set_rhs_for_basic_values(values)
        tab.set_cost_row(tab.c_int)
        allowed = np.zeros(tab.n + self.m, dtype=bool)
        allowed[: tab.n] = True
        status = tab.run(allowed, 20000, rule="dantzig")
        if status != "optimal":
            return None
        return list(tab.basis)

    def lower_bound(self, p: Polynomial) -> tuple[Fraction, HandelmanCertificate]:
        n, r = self.n, self.r
        if p.num_vars != n:
            raise ValueError("variable count mismatch with this family")
        if r < p.degree():
            raise ValueError(f"need r >= degree(p) = {p.degree()}, got r = {r}")
        b = [p.coefficient(mono) for mono in self.monomials]
        sol = None
        warm_ok = not p.is_zero() and all(
            max((e[i] for e in p.terms), default=0) <= self.group_degrees[i]
            for i in range(n)
        )
        if warm_ok:
            try:
                basis = self._warm_solve(p)
                if basis is not None:
                    engine = self._engine_lazy()
                    basis = engine.dual_from_basis(basis, b)
                    sol = engine.primal_from_basis(basis, b)
            except (exactlp.LPError, exactlp.SingularMatrixError):
                sol = None
        if sol is None or sol.status != "optimal":
            sol = exactlp.solve_lp(self.columns, self.m, b, self.costs)
        if sol.status == "infeasible":
            raise HandelmanInfeasibleError(
                f"p - mu has no order-{r} representation for any mu"
            )
        if sol.status != "optimal":
            raise exactlp.LPError(f"unexpected LP status {sol.status!r}")
        mu = p.constant_term() - sol.objective
        terms = {self.elements[j]: lam for j, lam in sol.x.items() if lam}
        cert = HandelmanCertificate(order=r, mu=mu, terms=terms, num_vars=n)
        return mu, cert


def _has_full_column_rank(rows: list[list[int]], k: int) -> bool:
    """Fraction-free column-rank check for an integer matrix."""
    A = [row[:] for row in rows]
    m = len(A)
    prev = 1
    col = 0
    for c in range(k):
        piv = next((i for i in range(col, m) if A[i][c]), None)
        if piv is None:
            return False
        A[col], A[piv] = A[piv], A[col]
        pval = A[col][c]
        for i in range(m):
            if i == col:
                continue
            f = A[i][c]
            if f:
                for j in range(c + 1, k):
                    A[i][j] = (pval * A[i][j] - f * A[col][j]) // prev
                A[i][c] = 0
            elif pval != prev:
                for j in range(c + 1, k):
                    A[i][j] = (pval * A[i][j]) // prev
        prev = pval
        col += 1
    return True


def handelman_lower_bound(p: Polynomial, r: int,
                          homogeneous: bool = True) -> tuple[Fraction, HandelmanCertificate]:
    """Exact p_han(r) and an optimal certificate.

    Requires r >= degree(p).  With homogeneous=True the LP runs on the
    level-r slice of the basis (same optimum, smaller instance); with False
    it runs on the full graded basis, which is useful for cross-checks.
    """
    n = p.num_vars
    if r < p.degree():
        raise ValueError(f"need r >= degree(p) = {p.degree()}, got r = {r}")
    if r < 0:
        raise ValueError("order must be nonnegative")
    if homogeneous and r >= 1:
        return HandelmanFamily(n, r).lower_bound(p)
    elements = enumerate_handelman_basis(n, r)
    monomials = [mono for mono in monomials_upto(n, r) if any(mono)]
    row_of = {mono: i for i, mono in enumerate(monomials)}
    m = len(monomials)
    columns: list[exactlp.Column] = []
    costs: list[Fraction] = []
    zero = (0,) * n
    for elem in elements:
        poly = expand_basis_element(elem)
        col = {}
        for exps, coeff in poly.terms.items():
            if exps == zero:
                continue
            col[row_of[exps]] = int(coeff)
        columns.append(col)
        costs.append(poly.terms.get(zero, Fraction(0)))
    b = [p.coefficient(mono) for mono in monomials]
    sol = exactlp.solve_lp(columns, m, b, costs)
    if sol.status == "infeasible":
        raise HandelmanInfeasibleError(
            f"p - mu has no order-{r} representation for any mu"
        )
    if sol.status != "optimal":
        raise exactlp.LPError(f"unexpected LP status {sol.status!r}")
    mu = p.constant_term() - sol.objective
    terms = {elements[j]: lam for j, lam in sol.x.items() if lam}
    cert = HandelmanCertificate(order=r, mu=mu, terms=terms, num_vars=n)
    return mu, cert
