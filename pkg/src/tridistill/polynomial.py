"""Exact univariate polynomials and truncated power series over the rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence


def _trim(coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class ExactPolynomial:
    """``sum_i coefficients[i] * p**i`` with rational coefficients."""

    coefficients: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", _trim([Fraction(c) for c in self.coefficients])
        )

    @classmethod
    def constant(cls, c) -> "ExactPolynomial":
        return cls((Fraction(c),))

    @classmethod
    def binomial_power(cls, a, b, w: int) -> "ExactPolynomial":
        """Expansion of ``(a + b p)**w``."""
        a, b = Fraction(a), Fraction(b)
        return cls(tuple(comb(w, j) * a ** (w - j) * b**j for j in range(w + 1)))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.coefficients):
            return self.coefficients[i]
        return Fraction(0)

    def __add__(self, other: "ExactPolynomial") -> "ExactPolynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        return ExactPolynomial(tuple(self[i] + other[i] for i in range(n)))

    def __neg__(self) -> "ExactPolynomial":
        return ExactPolynomial(tuple(-c for c in self.coefficients))

    def __sub__(self, other: "ExactPolynomial") -> "ExactPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "ExactPolynomial":
        if not isinstance(other, ExactPolynomial):
            return ExactPolynomial(tuple(c * Fraction(other) for c in self.coefficients))
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return ExactPolynomial()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return ExactPolynomial(tuple(out))

    __rmul__ = __mul__

    def truncate(self, order: int) -> "ExactPolynomial":
        """Drop every power above ``order``."""
        return ExactPolynomial(self.coefficients[: order + 1])

    def series_div(self, other: "ExactPolynomial", order: int) -> "ExactPolynomial":
        """Power series of ``self / other`` through ``p**order``."""
        if other[0] == 0:
            raise ZeroDivisionError("series divisor has zero constant term")
        inv0 = 1 / other[0]
        out: list[Fraction] = []
        for i in range(order + 1):
            acc = self[i]
            for j in range(1, min(i, other.degree) + 1):
                acc -= other[j] * out[i - j]
            out.append(acc * inv0)
        return ExactPolynomial(tuple(out))

    def __call__(self, p):
        acc = Fraction(0) if isinstance(p, (int, Fraction)) else 0.0
        for c in reversed(self.coefficients):
            acc = acc * p + (c if isinstance(acc, Fraction) else float(c))
        return acc

    def leading_term(self) -> tuple[int, Fraction] | None:
        """Lowest power with a nonzero coefficient."""
        for i, c in enumerate(self.coefficients):
            if c:
                return i, c
        return None

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coefficients):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*p^{i}")
        return " + ".join(terms) or "0"


def from_weight_counts(counts: Sequence[int] | Iterable[int]) -> ExactPolynomial:
    """``sum_w counts[w] * (1 - 2p)**w`` expanded in powers of ``p``."""
    counts = list(counts)
    out = [0] * len(counts)
    for w, c in enumerate(counts):
        if not c:
            continue
        for j in range(w + 1):
            out[j] += c * comb(w, j) * (-2) ** j
    return ExactPolynomial(tuple(Fraction(x) for x in out))
