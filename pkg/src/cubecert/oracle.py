"""Certified reference intervals for the minimum and maximum on the cube.

Independent of the relaxation hierarchies: the lower end comes from the
Bernstein coefficient enclosure, the upper end from attained grid values,
both exact rationals, so the interval rigorously contains p_min (resp.
p_max).  Refinement is by doubling the Bernstein degree; no box subdivision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import bernstein
from .polyring import Polynomial


def effort_cap(n: int) -> int:
    """Maximum Bernstein elevation degree; keeps grids below ~3e5 points."""
    if n <= 2:
        return 512
    if n == 3:
        return 64
    return 16


@dataclass(frozen=True)
class Enclosure:
    """Certified interval [lo, hi] containing the target value."""

    lo: Fraction
    hi: Fraction
    method: str
    effort: int
    converged: bool

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo, self.method, self.effort, self.converged)

    def shift(self, c: Fraction) -> "Enclosure":
        return Enclosure(self.lo + c, self.hi + c, self.method, self.effort, self.converged)


def grid_upper_bound_on_min(p: Polynomial, d: int) -> Fraction:
    """min over the grid {0,1/d,...,1}^n of p: an upper bound on p_min."""
    lo, _ = bernstein.grid_values_range(p, d)
    return lo


def reference_min(p: Polynomial, width_tol: Fraction | float = Fraction(1, 1000),
                  d_cap: int | None = None) -> Enclosure:
    """Certified enclosure of p_min over [0,1]^n.

    lo = min Bernstein coefficient at degree d (below p_min), hi = min grid
    value at d (attained, hence above p_min); d doubles until the width
    drops below width_tol or the effort cap is hit.
    """
    width_tol = Fraction(width_tol) if not isinstance(width_tol, Fraction) else width_tol
    if width_tol <= 0:
        raise ValueError("width_tol must be positive")
    n = p.num_vars
    if p.is_zero() or p.degree() == 0:
        c = p.constant_term()
        return Enclosure(c, c, "bernstein", 1, True)
    cap = d_cap if d_cap is not None else effort_cap(n)
    d = max(1, p.degree())
    best_lo: Fraction | None = None
    best_hi: Fraction | None = None
    while True:
        lo, _ = bernstein.coefficient_enclosure(p, d)
        hi, _ = bernstein.grid_values_range(p, d)
        # Doubling refines the grid and elevates the degree, so successive
        # intervals are nested; intersecting is a cheap safety net.
        best_lo = lo if best_lo is None else max(best_lo, lo)
        best_hi = hi if best_hi is None else min(best_hi, hi)
        if best_hi - best_lo <= width_tol:
            return Enclosure(best_lo, best_hi, "bernstein", d, True)
        if 2 * d > cap:
            return Enclosure(best_lo, best_hi, "bernstein", d, False)
        d *= 2


def reference_max(p: Polynomial, width_tol: Fraction | float = Fraction(1, 1000),
                  d_cap: int | None = None) -> Enclosure:
    """Certified enclosure of p_max over [0,1]^n (reference_min on -p, negated)."""
    return -reference_min(-p, width_tol, d_cap)
