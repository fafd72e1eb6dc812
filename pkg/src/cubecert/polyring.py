"""Exact sparse multivariate polynomial arithmetic over the rationals.

A polynomial in n variables is a map from exponent tuples (one nonnegative
int per variable) to nonzero Fraction coefficients.  The zero polynomial is
the empty map.  All arithmetic is exact; floating point never enters this
layer, so polynomial identities can be tested reliably.

Variables are written x1..xn in the text format, e.g.

    3/2*x1^2*x2 - x3 + 1/8

Exponents are 0-indexed internally: x1 is position 0 of the exponent tuple.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence, Union

Exponent = tuple[int, ...]
RationalLike = Union[int, str, Fraction]


class DimensionMismatchError(ValueError):
    """Raised when operands disagree on the number of variables."""


class PolynomialSyntaxError(ValueError):
    """Raised on malformed polynomial text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _as_fraction(c: RationalLike) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients.

    Invariants: no zero coefficients are stored, every exponent tuple has
    length num_vars, and exponents are nonnegative ints.
    """

    __slots__ = ("num_vars", "terms", "_hash")

    def __init__(self, num_vars: int, terms: Mapping[Exponent, RationalLike] = ()):
        if num_vars < 1:
            raise ValueError(f"num_vars must be positive, got {num_vars}")
        clean: dict[Exponent, Fraction] = {}
        for exps, coeff in dict(terms).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != num_vars:
                raise DimensionMismatchError(
                    f"exponent tuple {exps} has length {len(exps)}, expected {num_vars}"
                )
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = _as_fraction(coeff)
            if c != 0:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if clean[exps] == 0:
                    del clean[exps]
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls(num_vars, {})

    @classmethod
    def constant(cls, num_vars: int, c: RationalLike) -> "Polynomial":
        return cls(num_vars, {(0,) * num_vars: _as_fraction(c)})

    @classmethod
    def variable(cls, num_vars: int, index: int) -> "Polynomial":
        """The polynomial x_{index+1} (index is 0-based)."""
        if not 0 <= index < num_vars:
            raise IndexError(f"variable index {index} out of range for n={num_vars}")
        exps = [0] * num_vars
        exps[index] = 1
        return cls(num_vars, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff: RationalLike = 1) -> "Polynomial":
        return cls(len(exps), {tuple(exps): _as_fraction(coeff)})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.num_vars, Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __hash__(self):
        h = object.__getattribute__(self, "_hash")
        if h is None:
            h = hash((self.num_vars, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- ring arithmetic ---------------------------------------------------

    def _check_dims(self, other: "Polynomial") -> None:
        if self.num_vars != other.num_vars:
            raise DimensionMismatchError(
                f"mixing polynomials in {self.num_vars} and {other.num_vars} variables"
            )

    def __add__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.num_vars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_dims(other)
        out = dict(self.terms)
        for exps, c in other.terms.items():
            s = out.get(exps, Fraction(0)) + c
            if s:
                out[exps] = s
            else:
                out.pop(exps, None)
        return Polynomial(self.num_vars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.num_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.num_vars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_dims(other)
        out: dict[Exponent, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                key = tuple(a + b for a, b in zip(ea, eb))
                s = out.get(key, Fraction(0)) + ca * cb
                if s:
                    out[key] = s
                else:
                    del out[key]
        return Polynomial(self.num_vars, out)

    __rmul__ = __mul__

    def scale(self, c: RationalLike) -> "Polynomial":
        c = _as_fraction(c)
        if c == 0:
            return Polynomial.zero(self.num_vars)
        return Polynomial(self.num_vars, {e: c * v for e, v in self.terms.items()})

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.num_vars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    # -- evaluation and substitution ----------------------------------------

    def evaluate(self, point: Sequence[RationalLike]) -> Fraction:
        """Exact value of the polynomial at a rational point."""
        if len(point) != self.num_vars:
            raise DimensionMismatchError(
                f"point has {len(point)} coordinates, expected {self.num_vars}"
            )
        pt = [_as_fraction(v) for v in point]
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            term = coeff
            for e, v in zip(exps, pt):
                if e:
                    term *= v ** e
            total += term
        return total

    def substitute(self, var: int, replacement: Union["Polynomial", RationalLike]) -> "Polynomial":
        """Substitute x_{var+1} := replacement (0-based index), exactly.

        The replacement is either a constant or a polynomial in the same
        variable space.  Powers of the replacement are cached since the same
        exponent tends to recur across terms.
        """
        if not 0 <= var < self.num_vars:
            raise IndexError(f"variable index {var} out of range for n={self.num_vars}")
        if not isinstance(replacement, Polynomial):
            replacement = Polynomial.constant(self.num_vars, replacement)
        self._check_dims(replacement)
        powers: dict[int, Polynomial] = {0: Polynomial.constant(self.num_vars, 1)}

        def rep_pow(k: int) -> Polynomial:
            if k not in powers:
                powers[k] = rep_pow(k - 1) * replacement
            return powers[k]

        out = Polynomial.zero(self.num_vars)
        for exps, coeff in self.terms.items():
            rest = list(exps)
            e = rest[var]
            rest[var] = 0
            out = out + Polynomial(self.num_vars, {tuple(rest): coeff}) * rep_pow(e)
        return out

    def extend_vars(self, new_num_vars: int) -> "Polynomial":
        """Reinterpret in a larger variable space (new variables unused)."""
        if new_num_vars < self.num_vars:
            raise ValueError("cannot shrink the variable space")
        pad = (0,) * (new_num_vars - self.num_vars)
        return Polynomial(new_num_vars, {e + pad: c for e, c in self.terms.items()})

    # -- norms --------------------------------------------------------------

    def l_norm(self) -> Fraction:
        """The coefficient norm max_k |p_k| * k! / |k|!.

        This is the norm entering every error bound; it weights each
        coefficient by the inverse multinomial of its exponent.
        """
        if not self.terms:
            raise ValueError("l_norm is undefined for the zero polynomial")
        best = Fraction(0)
        for exps, coeff in self.terms.items():
            kfact = 1
            for e in exps:
                kfact *= factorial(e)
            val = abs(coeff) * Fraction(kfact, factorial(sum(exps)))
            if val > best:
                best = val
        return best

    # -- text format ----------------------------------------------------------

    def to_text(self) -> str:
        """Render in the parseable ASCII grammar, graded-lex term order."""
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda t: (sum(t[0]), tuple(-e for e in t[0])))
        parts: list[str] = []
        for exps, coeff in items:
            mono = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}"
                for i, e in enumerate(exps)
                if e
            )
            mag = abs(coeff)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(body if coeff > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Polynomial({self.num_vars}, {self.to_text()!r})"


# -- parsing ------------------------------------------------------------------


def parse_polynomial(text: str, num_vars: int) -> Polynomial:
    """Parse the ASCII grammar: +/- separated terms, each an optional
    rational coefficient with '*'-separated powers xI^E.

    Raises PolynomialSyntaxError with the character position on bad input,
    including variable indices above num_vars.
    """
    if num_vars < 1:
        raise ValueError("num_vars must be positive")
    s = text
    n = len(s)
    pos = 0
    terms: dict[Exponent, Fraction] = {}

    def skip_ws():
        nonlocal pos
        while pos < n and s[pos].isspace():
            pos += 1

    def read_int() -> int:
        nonlocal pos
        start = pos
        while pos < n and s[pos].isdigit():
            pos += 1
        if pos == start:
            raise PolynomialSyntaxError("expected a digit", pos)
        return int(s[start:pos])

    def read_rational() -> Fraction:
        nonlocal pos
        num = read_int()
        skip_ws()
        if pos < n and s[pos] == "/":
            pos += 1
            skip_ws()
            den = read_int()
            if den == 0:
                raise PolynomialSyntaxError("zero denominator", pos)
            return Fraction(num, den)
        return Fraction(num)

    def read_power() -> tuple[int, int]:
        nonlocal pos
        if pos >= n or s[pos] not in "xX":
            raise PolynomialSyntaxError("expected a variable like x1", pos)
        pos += 1
        idx = read_int()
        if idx < 1 or idx > num_vars:
            raise PolynomialSyntaxError(
                f"variable x{idx} out of range 1..{num_vars}", pos
            )
        exp = 1
        skip_ws()
        if pos < n and s[pos] == "^":
            pos += 1
            skip_ws()
            exp = read_int()
        return idx - 1, exp

    skip_ws()
    if pos >= n:
        raise PolynomialSyntaxError("empty polynomial text", pos)
    first = True
    while pos < n:
        sign = 1
        skip_ws()
        if pos < n and s[pos] in "+-":
            if first and s[pos] == "+":
                raise PolynomialSyntaxError("unexpected leading '+'", pos)
            sign = -1 if s[pos] == "-" else 1
            pos += 1
            skip_ws()
        elif not first:
            raise PolynomialSyntaxError("expected '+' or '-' between terms", pos)
        if pos >= n:
            raise PolynomialSyntaxError("dangling sign", pos)
        coeff = Fraction(sign)
        exps = [0] * num_vars
        saw_factor = False
        if s[pos].isdigit():
            coeff *= read_rational()
            saw_factor = True
            skip_ws()
            if pos < n and s[pos] == "*":
                pos += 1
                skip_ws()
                i, e = read_power()
                exps[i] += e
                skip_ws()
        elif s[pos] in "xX":
            i, e = read_power()
            exps[i] += e
            saw_factor = True
            skip_ws()
        else:
            raise PolynomialSyntaxError(f"unexpected character {s[pos]!r}", pos)
        while pos < n and s[pos] == "*":
            pos += 1
            skip_ws()
            i, e = read_power()
            exps[i] += e
            skip_ws()
        if not saw_factor:
            raise PolynomialSyntaxError("empty term", pos)
        key = tuple(exps)
        acc = terms.get(key, Fraction(0)) + coeff
        if acc:
            terms[key] = acc
        else:
            terms.pop(key, None)
        first = False
        skip_ws()
    return Polynomial(num_vars, terms)


def monomials_upto(n: int, d: int) -> list[Exponent]:
    """All exponent tuples in n variables of total degree <= d, graded lex.

    Within a degree level, x1-heavy monomials come first, matching the
    written convention 1, x1, x2, x1^2, x1*x2, x2^2, ...
    """
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    out: list[Exponent] = []

    def fill(prefix: list[int], remaining_vars: int, budget: int):
        if remaining_vars == 1:
            out.append(tuple(prefix + [budget]))
            return
        for e in range(budget, -1, -1):
            fill(prefix + [e], remaining_vars - 1, budget - e)

    for level in range(d + 1):
        fill([], n, level)
    return out


def random_polynomial(rng, n: int, max_degree: int, coeff_range: tuple[int, int] = (-5, 5)) -> Polynomial:
    """Random integer-coefficient polynomial over all monomials of degree
    <= max_degree; the zero polynomial is rejected and redrawn."""
    lo, hi = coeff_range
    monos = monomials_upto(n, max_degree)
    while True:
        terms = {m: Fraction(rng.randint(lo, hi)) for m in monos}
        p = Polynomial(n, terms)
        if not p.is_zero():
            return p
