"""Self-contained exact-rational linear programming.

Solves   min c.x  s.t.  A x = b,  x >= 0   with exact rational data and
returns exact optimal solutions, via a two-phase primal simplex on a
fraction-free integer tableau (Edmonds / Bareiss pivoting): the stored
tableau T together with a scalar divisor delta represents the rational
tableau T/delta, and the pivot update

    T'[i][j] = (T[p][q] * T[i][j] - T[i][q] * T[p][j]) // delta

is an exact integer division.  Feasibility, pricing and ratio tests are
therefore integer sign checks, so the solver is rigorous by construction.
Entering columns follow Dantzig's rule for speed and switch to Bland's rule
(which cannot cycle) as soon as the objective stalls on a degenerate vertex.

The tableau lives in a numpy int64 array while entries are small enough
that the pivot update cannot overflow, and is promoted to a Python-integer
object array otherwise; results are identical either way.

montante_solve, a fraction-free Gauss-Jordan elimination for exact linear
systems, is shared with the certificate-rationalization code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

import numpy as np

Column = dict[int, int]  # sparse column: row index -> integer entry

_INT64_SAFE = 1 << 31  # |entries| below this cannot overflow the update


class SingularMatrixError(ArithmeticError):
    pass


class LPError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# fraction-free exact linear algebra


def montante_solve(matrix: list[list[int]], rhs_cols: list[list[int]]) -> tuple[list[list[int]], int]:
    """Solve M x = r for each rhs column, fraction-free.

    Returns (solutions, den) where solution k is the integer vector nums
    with x = nums / den and den = +-det(M) (nonzero).  All divisions are
    exact by the Bareiss minor identity.
    """
    m = len(matrix)
    if m == 0:
        return [[] for _ in rhs_cols], 1
    K = len(rhs_cols)
    width = m + K
    A = [list(matrix[i]) + [rhs_cols[k][i] for k in range(K)] for i in range(m)]
    prev = 1
    for k in range(m):
        piv_row = next((r for r in range(k, m) if A[r][k]), None)
        if piv_row is None:
            raise SingularMatrixError(f"singular at column {k}")
        if piv_row != k:
            A[k], A[piv_row] = A[piv_row], A[k]
        pivot = A[k][k]
        for i in range(m):
            if i == k:
                continue
            row_i = A[i]
            row_k = A[k]
            f = row_i[k]
            if f:
                for j in range(k + 1, width):
                    row_i[j] = (pivot * row_i[j] - f * row_k[j]) // prev
                row_i[k] = 0
            elif pivot != prev:
                for j in range(k + 1, width):
                    row_i[j] = (pivot * row_i[j]) // prev
            # rescale the already-cleared diagonal so it tracks the pivot
            if i < k:
                row_i[i] = (pivot * row_i[i]) // prev
        prev = pivot
    den = prev
    sols = [[A[i][m + k] for i in range(m)] for k in range(K)]
    return sols, den


# ---------------------------------------------------------------------------
# fraction-free simplex


@dataclass
class LPSolution:
    status: str                       # optimal | infeasible | unbounded
    objective: Fraction | None
    x: dict[int, Fraction] = field(default_factory=dict)
    basis: list[int] = field(default_factory=list)
    pivots: int = 0


class _Tableau:
    """Integer tableau T with divisor delta; rational tableau is T/delta.

    Layout: body rows 0..m-1 over columns [structural | artificial | rhs],
    cost row last.  The rhs column carries an extra factor db (the lcm of
    the b denominators) and the cost row an extra dc; both cancel out of
    every sign test and ratio comparison.
    """

    def __init__(self, columns: Sequence[Column], m: int,
                 b: Sequence[Fraction], c: Sequence[Fraction]):
        self.m = m
        self.n = len(columns)
        self.db = lcm(*(v.denominator for v in b)) if b else 1
        self.dc = lcm(*(v.denominator for v in c)) if c else 1
        self.c_int = [int(v * self.dc) for v in c]
        b_int = [int(v * self.db) for v in b]
        width = self.n + m + 1
        big = any(abs(v) >= _INT64_SAFE for v in b_int)
        if not big:
            big = any(abs(v) >= _INT64_SAFE for col in columns for v in col.values())
        T = np.zeros((m + 1, width), dtype=object if big else np.int64)
        for j, col in enumerate(columns):
            for i, v in col.items():
                T[i, j] = v
        for i in range(m):
            if b_int[i] < 0:
                T[i, : self.n] *= -1
            T[i, self.n + i] = 1
            T[i, -1] = abs(b_int[i])
        self.T = T
        self.delta = 1
        self.basis = list(range(self.n, self.n + m))
        self.pivots = 0

    # -- exact helpers ------------------------------------------------------

    def _maybe_promote(self) -> None:
        if self.T.dtype == object:
            return
        mx = int(np.abs(self.T).max(initial=0))
        if mx >= _INT64_SAFE or abs(self.delta) >= _INT64_SAFE:
            self.T = self.T.astype(object)

    def pivot(self, p: int, q: int) -> None:
        T = self.T
        piv = int(T[p, q])
        if piv == 0:
            raise LPError("zero pivot")
        colq = T[:, q].copy()
        rowp = T[p, :].copy()
        newT = (T * piv - np.outer(colq, rowp)) // self.delta
        newT[p, :] = rowp
        if piv < 0:
            # keep delta positive so integer signs mirror rational signs
            newT = -newT
            piv = -piv
        self.T = newT
        self.delta = piv
        self.basis[p] = q
        self.pivots += 1
        self._maybe_promote()

    def set_cost_row(self, costs_int: Sequence[int]) -> None:
        """Install reduced costs for the integer cost vector against the
        current basis: row = delta * c - sum_i c_B[i] * T[i].

        Accumulated in Python integers (the intermediate sums can exceed
        int64 even when the tableau itself fits), then stored back at the
        tableau's dtype when safe.
        """
        T = self.T
        width = T.shape[1]
        row = [0] * width
        for j, cj in enumerate(costs_int):
            if cj:
                row[j] = cj * self.delta
        for i in range(self.m):
            cb = costs_int[self.basis[i]] if self.basis[i] < len(costs_int) else 0
            if cb:
                Ti = T[i, :]
                for j in range(width):
                    v = int(Ti[j])
                    if v:
                        row[j] -= cb * v
        if T.dtype != object and any(abs(v) >= _INT64_SAFE for v in row):
            self.T = T.astype(object)
            T = self.T
        for j in range(width):
            T[-1, j] = row[j]

    def objective_key(self) -> Fraction:
        return Fraction(int(self.T[-1, -1]), self.delta)

    def run(self, allowed: np.ndarray, max_pivots: int, rule: str = "bland") -> str:
        """Primal simplex to optimality on the current cost row.

        rule='bland' enters the lowest eligible index (never cycles, and on
        these binomial-structured instances it also keeps the visited basis
        determinants small, which is what bounds the integer growth);
        rule='dantzig' takes the most negative reduced cost and falls back
        to Bland on stalls.
        """
        m = self.m
        stall = 0
        bland = rule == "bland"
        last_obj = self.objective_key()
        for _ in range(max_pivots):
            cost = self.T[-1, : self.T.shape[1] - 1]
            neg = np.flatnonzero((cost < 0) & allowed)
            if neg.size == 0:
                return "optimal"
            if bland:
                q = int(neg[0])
            else:
                q = int(neg[np.argmin(cost[neg])])
            col = self.T[:m, q]
            rhs = self.T[:m, -1]
            p = None
            best_num = best_den = None
            for i in range(m):
                w = int(col[i])
                if w <= 0:
                    continue
                xi = int(rhs[i])
                if p is None:
                    better = True
                else:
                    lhs = xi * best_den
                    rhsv = best_num * w
                    better = lhs < rhsv or (lhs == rhsv and self.basis[i] < self.basis[p])
                if better:
                    p = i
                    best_num, best_den = xi, w
            if p is None:
                return "unbounded"
            self.pivot(p, q)
            obj = self.objective_key()
            if obj == last_obj:
                stall += 1
                if stall > m + 20:
                    bland = True
            else:
                stall = 0
                last_obj = obj
                bland = rule == "bland"
        return "stalled"

    def basic_solution(self) -> dict[int, Fraction]:
        out = {}
        den = self.delta * self.db
        for i in range(self.m):
            v = int(self.T[i, -1])
            if v:
                out[self.basis[i]] = Fraction(v, den)
        return out

    def clone(self) -> "_Tableau":
        twin = object.__new__(_Tableau)
        twin.m = self.m
        twin.n = self.n
        twin.db = self.db
        twin.dc = self.dc
        twin.c_int = self.c_int
        twin.T = self.T.copy()
        twin.delta = self.delta
        twin.basis = list(self.basis)
        twin.pivots = 0
        return twin

    def set_rhs_for_basic_values(self, values: Sequence[Fraction]) -> None:
        """Install the rhs column for a prescribed basic solution x_B.

        Valid when the caller knows B^{-1} b analytically (e.g. b lies in
        the span of the basis columns with known coefficients).  Updates db
        so the stored integers are delta * db * x_B.
        """
        db = lcm(*(v.denominator for v in values)) if values else 1
        self.db = db
        ints = [int(v * db) * self.delta for v in values]
        if self.T.dtype != object and any(abs(v) >= _INT64_SAFE for v in ints):
            self.T = self.T.astype(object)
        for i, v in enumerate(ints):
            self.T[i, -1] = v
        self.T[-1, -1] = 0


def _tableau_solve(columns: Sequence[Column], m: int, b: Sequence[Fraction],
                   c: Sequence[Fraction], max_pivots: int) -> LPSolution:
    n = len(columns)
    tab = _Tableau(columns, m, b, c)
    # phase 1: minimize the artificial variables
    phase1_cost = [0] * n + [1] * m
    tab.set_cost_row(phase1_cost)
    allowed = np.ones(n + m, dtype=bool)
    status = tab.run(allowed, max_pivots)
    if status == "stalled":
        raise LPError("phase 1 exceeded the pivot budget")
    if status == "unbounded":
        raise LPError("phase 1 cannot be unbounded; data corrupted")
    if tab.objective_key() != 0:
        return LPSolution(status="infeasible", objective=None,
                          basis=list(tab.basis), pivots=tab.pivots)
    # drive any zero-level artificials out of the basis
    for i in range(m):
        if tab.basis[i] >= n:
            row = tab.T[i, :n]
            nz = np.flatnonzero(row != 0)
            if nz.size:
                tab.pivot(i, int(nz[0]))
            # else: the row is all zeros across structurals -> redundant
            # constraint satisfied exactly; the artificial stays at level 0
    # phase 2 on the real objective, artificials barred
    tab.set_cost_row(tab.c_int)
    allowed = np.zeros(n + m, dtype=bool)
    allowed[:n] = True
    status = tab.run(allowed, max_pivots)
    if status == "stalled":
        raise LPError("phase 2 exceeded the pivot budget")
    if status == "unbounded":
        return LPSolution(status="unbounded", objective=None,
                          basis=list(tab.basis), pivots=tab.pivots)
    x = {j: v for j, v in tab.basic_solution().items() if j < n}
    obj = Fraction(0)
    for j, v in x.items():
        obj += Fraction(tab.c_int[j], tab.dc) * v
    return LPSolution(status="optimal", objective=obj, x=x,
                      basis=list(tab.basis), pivots=tab.pivots)


# ---------------------------------------------------------------------------
# revised simplex over montante solves (scales to the larger instances,
# where full-tableau updates on determinant-sized integers are too wide)


class RevisedSimplex:
    """Exact revised simplex with Bland's rule; every basis system is
    re-solved fraction-free, so iterates never accumulate error.

    The same instance data can be re-solved for many right-hand sides via
    warm starts: an optimal basis stays dual feasible when only b changes,
    so the dual simplex usually restores optimality in a few pivots.
    """

    def __init__(self, columns: Sequence[Column], m: int, c: Sequence[Fraction]):
        self.cols = list(columns)
        self.m = m
        self.n = len(columns)
        self.dc = lcm(*(v.denominator for v in c)) if c else 1
        self.c_int = [int(v * self.dc) for v in c]
        self.c_frac = list(c)

    # -- exact helpers ----------------------------------------------------

    def _basis_matrix(self, basis: list[int]) -> list[list[int]]:
        B = [[0] * self.m for _ in range(self.m)]
        for pos, j in enumerate(basis):
            for i, v in self.cols[j].items():
                B[i][pos] = v
        return B

    def _solve_B(self, basis: list[int], rhs_cols: list[list[int]]):
        sols, den = montante_solve(self._basis_matrix(basis), rhs_cols)
        if den < 0:
            den = -den
            sols = [[-v for v in s] for s in sols]
        return sols, den

    def _solve_Bt(self, basis: list[int], rhs_cols: list[list[int]]):
        Bt = [list(row) for row in zip(*self._basis_matrix(basis))]
        sols, den = montante_solve(Bt, rhs_cols)
        if den < 0:
            den = -den
            sols = [[-v for v in s] for s in sols]
        return sols, den

    def _price(self, basis: list[int]):
        """(y_nums, den) with y = y_nums/(den*dc) solving B^T y = c_B."""
        rhs = [self.c_int[j] for j in basis]
        sols, den = self._solve_Bt(basis, [rhs])
        return sols[0], den

    def _reduced_sign(self, j: int, y_nums: list[int], den: int) -> int:
        dot = 0
        for i, v in self.cols[j].items():
            dot += y_nums[i] * v
        val = self.c_int[j] * den - dot
        return (val > 0) - (val < 0)

    def _integerize_b(self, b: Sequence[Fraction]) -> tuple[list[int], int]:
        db = lcm(*(v.denominator for v in b)) if b else 1
        return [int(v * db) for v in b], db

    # -- primal simplex ----------------------------------------------------

    def primal_from_basis(self, basis: list[int], b: Sequence[Fraction],
                          max_pivots: int = 20000) -> LPSolution:
        basis = list(basis)
        b_int, db = self._integerize_b(b)
        pivots = 0
        while True:
            x_nums, x_den = (s := self._solve_B(basis, [b_int]))[0][0], s[1]
            if any(v < 0 for v in x_nums):
                raise LPError("basis is not primal feasible")
            y_nums, y_den = self._price(basis)
            basis_set = set(basis)
            entering = None
            for j in range(self.n):
                if j not in basis_set and self._reduced_sign(j, y_nums, y_den) < 0:
                    entering = j
                    break
            if entering is None:
                x = {}
                obj = Fraction(0)
                for pos, j in enumerate(basis):
                    v = Fraction(x_nums[pos], x_den * db)
                    if v:
                        x[j] = v
                        obj += self.c_frac[j] * v
                return LPSolution(status="optimal", objective=obj, x=x,
                                  basis=basis, pivots=pivots)
            w = self._solve_B(basis, [self._col_dense(entering)])[0][0]
            # same positive denominator as x, so ratios compare integerwise
            leave = None
            bn = bd = None
            for i in range(self.m):
                if w[i] <= 0:
                    continue
                if leave is None:
                    take = True
                else:
                    lhs = x_nums[i] * bd
                    rhs = bn * w[i]
                    take = lhs < rhs or (lhs == rhs and basis[i] < basis[leave])
                if take:
                    leave, bn, bd = i, x_nums[i], w[i]
            if leave is None:
                return LPSolution(status="unbounded", objective=None,
                                  basis=basis, pivots=pivots)
            basis[leave] = entering
            pivots += 1
            if pivots > max_pivots:
                raise LPError("primal pivot limit exceeded")

    def _col_dense(self, j: int) -> list[int]:
        out = [0] * self.m
        for i, v in self.cols[j].items():
            out[i] = v
        return out

    # -- dual simplex (for warm starts across right-hand sides) -----------

    def dual_from_basis(self, basis: list[int], b: Sequence[Fraction],
                        max_pivots: int = 4000) -> list[int]:
        """From a dual-feasible basis, pivot until primal feasible.

        Returns the feasible (hence optimal) basis; raises LPError on
        infeasible instances or pivot budget exhaustion.
        """
        basis = list(basis)
        b_int, db = self._integerize_b(b)
        pivots = 0
        while True:
            x_nums, x_den = (s := self._solve_B(basis, [b_int]))[0][0], s[1]
            leave = None
            for i in range(self.m):
                if x_nums[i] < 0 and (leave is None or basis[i] < basis[leave]):
                    leave = i
            if leave is None:
                return basis
            e = [0] * self.m
            e[leave] = 1
            z = self._solve_Bt(basis, [e])[0][0]
            y_nums, y_den = self._price(basis)
            basis_set = set(basis)
            entering = None
            best_d = best_a = None
            for j in range(self.n):
                if j in basis_set:
                    continue
                alpha = 0
                for i, v in self.cols[j].items():
                    alpha += z[i] * v
                if alpha >= 0:
                    continue
                dot = 0
                for i, v in self.cols[j].items():
                    dot += y_nums[i] * v
                d = self.c_int[j] * y_den - dot  # nonnegative by dual feasibility
                if entering is None:
                    take = True
                else:
                    take = d * (-best_a) < best_d * (-alpha)
                if take:
                    entering, best_d, best_a = j, d, alpha
            if entering is None:
                raise LPError("infeasible")
            basis[leave] = entering
            pivots += 1
            if pivots > max_pivots:
                raise LPError("dual pivot limit exceeded")


class FamilyLP:
    """Solves min c.x : A x = b, x >= 0 for a stream of right-hand sides.

    The first solve is cold; later solves warm-start the dual simplex from
    the previous optimal basis, which stays dual feasible because A and c
    are shared.  Falls back to a cold solve whenever the warm path fails.
    """

    def __init__(self, columns: Sequence[Column], m: int, c: Sequence[Fraction]):
        self.columns = list(columns)
        self.m = m
        self.c = list(c)
        self.engine = RevisedSimplex(columns, m, c)
        self.last_basis: list[int] | None = None

    def solve(self, b: Sequence[Fraction]) -> LPSolution:
        if self.last_basis is not None:
            try:
                basis = self.engine.dual_from_basis(self.last_basis, b)
                sol = self.engine.primal_from_basis(basis, b)
                if sol.status == "optimal":
                    self.last_basis = sol.basis
                    return sol
            except (LPError, SingularMatrixError):
                pass
        sol = solve_lp(self.columns, self.m, b, self.c)
        if sol.status == "optimal":
            self.last_basis = sol.basis
        return sol


_TABLEAU_ROW_LIMIT = 70


def solve_lp(columns: Sequence[Column], m: int, b: Sequence[Fraction],
             c: Sequence[Fraction], max_pivots: int = 200000) -> LPSolution:
    """Exact optimum of  min c.x : A x = b, x >= 0  (integer column data)."""
    if m == 0:
        if any(v < 0 for v in c):
            return LPSolution(status="unbounded", objective=None)
        return LPSolution(status="optimal", objective=Fraction(0))
    if m <= _TABLEAU_ROW_LIMIT:
        return _tableau_solve(columns, m, b, c, max_pivots)
    # larger instances: exact phase 1 via the revised engine
    engine = RevisedSimplex(columns, m, c)
    basis = _phase1_revised(engine, b, max_pivots)
    if basis is None:
        return LPSolution(status="infeasible", objective=None)
    return engine.primal_from_basis(basis, b, max_pivots)


def _phase1_revised(engine: RevisedSimplex, b: Sequence[Fraction],
                    max_pivots: int) -> list[int] | None:
    """Feasible basis over the real columns, or None if infeasible."""
    m = engine.m
    n = engine.n
    b_int, db = engine._integerize_b(b)
    cols = []
    for col in engine.cols:
        cols.append({i: (-v if b_int[i] < 0 else v) for i, v in col.items()})
    art_start = n
    for i in range(m):
        cols.append({i: 1})
    c1 = [Fraction(0)] * n + [Fraction(1)] * m
    p1 = RevisedSimplex(cols, m, c1)
    b1 = [Fraction(abs(v), db) for v in b_int]
    sol = p1.primal_from_basis(list(range(art_start, art_start + m)), b1, max_pivots)
    if sol.status != "optimal" or sol.objective != 0:
        return None
    basis = list(sol.basis)
    for pos in range(m):
        if basis[pos] >= n:
            for j in range(n):
                if j in basis:
                    continue
                trial = list(basis)
                trial[pos] = j
                try:
                    x_nums, _ = (s := p1._solve_B(trial, [[abs(v) for v in b_int]]))[0][0], s[1]
                except SingularMatrixError:
                    continue
                if all(v >= 0 for v in x_nums):
                    basis = trial
                    break
            else:
                raise LPError("could not remove an artificial variable")
    return basis
