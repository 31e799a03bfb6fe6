"""Error analysis of the CSS code induced by a triorthogonal matrix.

For a triorthogonal ``G`` with odd rows ``f^1..f^k`` the distillation
subroutine accepts with probability

    P_s(p) = |G0|^-1 * sum_{f in G0} (1 - 2p)^|f|

and leaves an error on output ``a`` with probability

    q_a(p) = 1 - (1/2) * W_{G0 + (f^a)}(1 - 2p) / W_{G0}(1 - 2p).

Enumerators are exact integers.  Float evaluation of ``q_a`` works from the
numerator ``W_{G0}(y) - W_{f^a + G0}(y)`` expanded in powers of ``p`` when
``p`` is small, since its low-order terms cancel exactly and the direct
``1 - ratio`` form would lose all precision below ``p ~ 1e-8``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb
from typing import Sequence

from . import gf2
from .gf2 import BinaryMatrix, LimitExceeded
from .polynomial import ExactPolynomial, from_weight_counts
from .triortho import TriorthogonalMatrix

__all__ = [
    "WeightEnumerator",
    "RateReport",
    "CodeView",
    "DistanceResult",
    "LimitExceeded",
    "FInSpan",
    "InconsistentInput",
    "BudgetExceeded",
    "NoThreshold",
    "enumerator",
    "coset_enumerator",
    "macwilliams",
    "success_probability",
    "success_probability_primal",
    "output_error",
    "output_errors",
    "worst_output_error",
    "rates",
    "ps_series",
    "q_series",
    "distance_z",
    "min_logical",
    "logical_weight_count",
    "weight2_logical_count",
    "threshold",
    "code_view",
]

DEFAULT_DISTANCE_BUDGET = 10**8


class FInSpan(ValueError):
    pass


class InconsistentInput(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class NoThreshold(ValueError):
    pass


@dataclass(frozen=True)
class WeightEnumerator:
    """Weight distribution ``c_0..c_n`` of a binary code of length ``n``."""

    length: int
    coefficients: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        if len(coeffs) < self.length + 1:
            coeffs += (0,) * (self.length + 1 - len(coeffs))
        if len(coeffs) != self.length + 1 or any(c < 0 for c in coeffs):
            raise ValueError("bad coefficient vector")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def size(self) -> int:
        return sum(self.coefficients)

    def __getitem__(self, w: int) -> int:
        return self.coefficients[w] if 0 <= w <= self.length else 0

    def terms(self) -> dict[int, int]:
        return {w: c for w, c in enumerate(self.coefficients) if c}

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        parts = []
        for w, c in self.terms().items():
            if w == 0:
                parts.append(str(c))
            else:
                mono = "x" if w == 1 else f"x^{w}"
                parts.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(parts)


def enumerator(generators: BinaryMatrix, *, limit: int = gf2.DEFAULT_SPAN_LIMIT) -> WeightEnumerator:
    """Exact weight enumerator of the span of ``generators``."""
    return WeightEnumerator(generators.n, tuple(gf2.span_weight_distribution(generators, limit=limit)))


def coset_enumerator(
    G0: BinaryMatrix, f: int, *, limit: int = gf2.DEFAULT_SPAN_LIMIT
) -> WeightEnumerator:
    """Weight enumerator of ``span(G0) ∪ (f + span(G0))``."""
    if gf2.in_span(f, G0):
        raise FInSpan("f already lies in span(G0)")
    if gf2.rank(G0) + 1 > limit:
        raise LimitExceeded(f"rank {gf2.rank(G0) + 1} > limit {limit}")
    base = gf2.span_weight_distribution(G0, limit=limit)
    shifted = gf2.span_weight_distribution(G0, offset=f, limit=limit)
    return WeightEnumerator(G0.n, tuple(a + b for a, b in zip(base, shifted)))


def macwilliams(W: WeightEnumerator, n: int | None = None, code_size: int | None = None) -> WeightEnumerator:
    """Dual enumerator ``|C|^-1 (1+x)^n W((1-x)/(1+x))`` in exact integers."""
    n = W.length if n is None else n
    code_size = W.size if code_size is None else code_size
    if n != W.length or W.size != code_size or code_size <= 0:
        raise InconsistentInput("enumerator does not match the stated code size/length")
    out = [0] * (n + 1)
    for w, c in enumerate(W.coefficients):
        if not c:
            continue
        # (1 - x)^w (1 + x)^(n - w)
        for i in range(w + 1):
            a = c * comb(w, i) * (-1) ** i
            for j in range(n - w + 1):
                out[i + j] += a * comb(n - w, j)
    dual = []
    for v in out:
        q, r = divmod(v, code_size)
        if r:
            raise InconsistentInput("coefficients are not a linear code's distribution")
        dual.append(q)
    return WeightEnumerator(n, tuple(dual))


# --------------------------------------------------------------------------
# Rates


def _horner(coeffs: Sequence[float], x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class RateModel:
    """Precomputed enumerators of one matrix, with fast float rate evaluation."""

    def __init__(self, G: TriorthogonalMatrix, limit: int = gf2.DEFAULT_SPAN_LIMIT):
        self.G = G
        self.n = G.n
        self.k = G.k
        G0 = G.G0
        self.w0 = gf2.span_weight_distribution(G0, limit=limit)
        self.size0 = sum(self.w0)
        self.w1 = [
            gf2.span_weight_distribution(G0, offset=G.odd_row(a), limit=limit)
            for a in range(1, G.k + 1)
        ]
        self.w0_poly = from_weight_counts(self.w0)
        self.diff_poly = [
            from_weight_counts([x - y for x, y in zip(self.w0, w1)]) for w1 in self.w1
        ]
        self._w0_f = [float(c) for c in self.w0]
        self._diff_f = [[float(x - y) for x, y in zip(self.w0, w1)] for w1 in self.w1]
        self._w0p_f = [float(c) for c in self.w0_poly.coefficients]
        self._diffp_f = [[float(c) for c in d.coefficients] for d in self.diff_poly]
        # below this the expanded-in-p form is both stable and accurate
        self._small_p = min(0.02, 2.0 / max(self.n, 1))
        # outputs sharing a coset distribution share q_a
        self._distinct = sorted({tuple(w1): a for a, w1 in enumerate(self.w1, 1)}.values())

    def success_probability(self, p):
        if isinstance(p, (int, Fraction)):
            y = 1 - 2 * Fraction(p)
            return sum(c * y**w for w, c in enumerate(self.w0)) / self.size0
        return _horner(self._w0_f, 1.0 - 2.0 * p) / self.size0

    def output_error(self, a: int, p):
        """``q_a(p)`` for ``1 <= a <= k``."""
        if isinstance(p, (int, Fraction)):
            y = 1 - 2 * Fraction(p)
            num = sum((x - z) * y**w for w, (x, z) in enumerate(zip(self.w0, self.w1[a - 1])))
            den = sum(c * y**w for w, c in enumerate(self.w0))
            return num / (2 * den)
        if p < self._small_p:
            num = _horner(self._diffp_f[a - 1], p)
            den = _horner(self._w0p_f, p)
        else:
            y = 1.0 - 2.0 * p
            num = _horner(self._diff_f[a - 1], y)
            den = _horner(self._w0_f, y)
        return num / (2.0 * den)

    def q_max(self, p):
        return max(self.output_error(a, p) for a in self._distinct)


@lru_cache(maxsize=256)
def rate_model(G: TriorthogonalMatrix) -> RateModel:
    return RateModel(G)


def _check_p(p) -> None:
    if not 0 <= p <= 0.5:
        raise ValueError(f"p = {p} outside [0, 1/2]")


def success_probability(G: TriorthogonalMatrix, p):
    """Acceptance probability from the G0 enumerator (dual form).

    Exact ``Fraction`` in, exact ``Fraction`` out; floats otherwise.
    """
    _check_p(p)
    return rate_model(G).success_probability(p)


def success_probability_primal(G: TriorthogonalMatrix, p, *, limit: int = 24):
    """Acceptance probability summed directly over ``G0^⊥``."""
    _check_p(p)
    perp = gf2.nullspace(G.G0)
    counts = gf2.span_weight_distribution(perp, limit=limit)
    n = G.n
    if isinstance(p, (int, Fraction)):
        p = Fraction(p)
    return sum(c * (1 - p) ** (n - w) * p**w for w, c in enumerate(counts))


def output_error(G: TriorthogonalMatrix, a: int, p):
    """Output error rate on logical qubit ``a`` (1-based) after acceptance."""
    _check_p(p)
    G.odd_row(a)
    return rate_model(G).output_error(a, p)


def output_errors(G: TriorthogonalMatrix, p) -> list:
    _check_p(p)
    model = rate_model(G)
    return [model.output_error(a, p) for a in range(1, G.k + 1)]


def worst_output_error(G: TriorthogonalMatrix, p):
    _check_p(p)
    return rate_model(G).q_max(p)


@dataclass(frozen=True)
class RateReport:
    p: float
    P_s: float
    q_per_qubit: list[float]
    q_max: float


def rates(G: TriorthogonalMatrix, p: float) -> RateReport:
    qs = output_errors(G, p)
    return RateReport(p, success_probability(G, p), qs, max(qs) if qs else 0.0)


def ps_series(G: TriorthogonalMatrix, order: int) -> ExactPolynomial:
    """Taylor coefficients of ``P_s`` about ``p = 0`` through ``p**order``."""
    model = rate_model(G)
    return (model.w0_poly * Fraction(1, model.size0)).truncate(order)


def q_series(G: TriorthogonalMatrix, a: int, order: int) -> ExactPolynomial:
    """Taylor coefficients of ``q_a`` about ``p = 0`` through ``p**order``."""
    if order < 1:
        raise ValueError("order must be at least 1")
    G.odd_row(a)
    model = rate_model(G)
    return model.diff_poly[a - 1].series_div(model.w0_poly * 2, order)


# --------------------------------------------------------------------------
# Z-distance


@dataclass(frozen=True)
class DistanceResult:
    distance: int
    witness: int
    candidates: int
    """Number of weight-``w`` supports covered, summed over the weights scanned."""


def _column_syndromes(G: TriorthogonalMatrix) -> tuple[list[int], list[int]]:
    cols = G.matrix.columns()
    mask0 = ((1 << G.m) - 1) ^ ((1 << G.k) - 1)
    s0 = [(c & mask0) >> G.k for c in cols]
    s1 = [c & ((1 << G.k) - 1) for c in cols]
    return s0, s1


def min_logical(
    G: TriorthogonalMatrix, *, budget: int = DEFAULT_DISTANCE_BUDGET, max_weight: int | None = None
) -> DistanceResult:
    """Minimum weight of ``f`` in ``G0^⊥ \\ G^⊥`` by increasing-weight search.

    For ``w = 1, 2, ...`` every weight-``w`` support is considered: the
    first ``w - 1`` columns are walked depth-first carrying their partial
    G0 syndrome, and the last column is looked up among the columns whose G0
    syndrome cancels it.  The first support whose G1 syndrome is nonzero is
    returned as the witness (lexicographically smallest column set).
    """
    n = G.n
    if G.k == 0:
        raise ValueError("no logical qubits")
    s0, s1 = _column_syndromes(G)
    buckets: dict[int, list[int]] = {}
    for j, s in enumerate(s0):
        buckets.setdefault(s, []).append(j)
    max_weight = n if max_weight is None else max_weight
    covered = 0

    def search(w: int):
        chosen: list[int] = []

        def rec(start: int, depth: int, acc0: int, acc1: int):
            if depth == w - 1:
                cols = buckets.get(acc0, ())
                i = bisect.bisect_left(cols, start)
                for j in cols[i:]:
                    if s1[j] != acc1:
                        return chosen + [j]
                return None
            for c in range(start, n - (w - 1 - depth) + 1):
                chosen.append(c)
                hit = rec(c + 1, depth + 1, acc0 ^ s0[c], acc1 ^ s1[c])
                chosen.pop()
                if hit is not None:
                    return hit
            return None

        return rec(0, 0, 0, 0)

    for w in range(1, max_weight + 1):
        if covered + comb(n, w) > budget:
            raise BudgetExceeded(
                f"weight {w} needs {comb(n, w)} candidates; budget {budget} (used {covered})"
            )
        covered += comb(n, w)
        hit = search(w)
        if hit is not None:
            return DistanceResult(w, gf2.vector_from_bits(1 if j in hit else 0 for j in range(n)), covered)
    raise BudgetExceeded(f"no logical operator up to weight {max_weight}")


def distance_z(G: TriorthogonalMatrix, *, budget: int = DEFAULT_DISTANCE_BUDGET) -> int:
    """Distance of the code against Z errors."""
    return min_logical(G, budget=budget).distance


def logical_weight_count(G: TriorthogonalMatrix, a: int, w: int) -> int:
    """Count weight-``w`` vectors in ``G0^⊥`` with odd overlap with ``f^a``.

    Scans all ``C(n, w)`` supports (prefix walk plus bucket lookup).
    """
    fa = G.odd_row(a)
    n = G.n
    s0, _ = _column_syndromes(G)
    par = [(fa >> j) & 1 for j in range(n)]
    buckets: dict[tuple[int, int], list[int]] = {}
    for j in range(n):
        buckets.setdefault((s0[j], par[j]), []).append(j)
    total = 0

    def rec(start: int, depth: int, acc0: int, acc1: int):
        nonlocal total
        if depth == w - 1:
            cols = buckets.get((acc0, acc1 ^ 1), ())
            total += len(cols) - bisect.bisect_left(cols, start)
            return
        for c in range(start, n - (w - 1 - depth) + 1):
            rec(c + 1, depth + 1, acc0 ^ s0[c], acc1 ^ par[c])

    if w >= 1:
        rec(0, 0, 0, 0)
    return total


def weight2_logical_count(G: TriorthogonalMatrix, a: int) -> int:
    return logical_weight_count(G, a, 2)


# --------------------------------------------------------------------------
# Threshold


def threshold(G: TriorthogonalMatrix, *, tol: float = 1e-8, grid: int = 500) -> float:
    """Largest ``p*`` in ``(0, 1/2]`` with ``q_max(p) < p`` on ``(0, p*)``.

    A uniform grid locates the first sign change of ``q_max(p) - p`` and
    bisection refines it to ``tol``.  Since ``q(1/2) = 1/2`` for every code,
    a matrix that improves the error on the whole grid returns ``0.5``.
    """
    model = rate_model(G)

    def gap(p: float) -> float:
        return model.q_max(p) - p

    step = 0.5 / grid
    lo = None
    for i in range(1, grid):
        p = i * step
        if gap(p) < 0:
            lo = p
            continue
        if lo is None:
            raise NoThreshold("q_max(p) >= p near p = 0")
        hi = p
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if gap(mid) < 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    if lo is None:
        raise NoThreshold("q_max(p) >= p throughout (0, 1/2)")
    return 0.5


# --------------------------------------------------------------------------
# Code view


@dataclass(frozen=True)
class CodeView:
    """The stabilizer code CSS(X, G0; Z, G^⊥) with spans stored as bases."""

    G: TriorthogonalMatrix
    budget: int = field(default=DEFAULT_DISTANCE_BUDGET, compare=False)

    @cached_property
    def G0(self) -> BinaryMatrix:
        return gf2.row_basis(self.G.G0)

    @cached_property
    def G1(self) -> BinaryMatrix:
        return gf2.row_basis(self.G.G1)

    @cached_property
    def span(self) -> BinaryMatrix:
        return gf2.row_basis(self.G.matrix)

    @cached_property
    def span_perp(self) -> BinaryMatrix:
        return gf2.nullspace(self.G.matrix)

    @cached_property
    def G0_perp(self) -> BinaryMatrix:
        return gf2.nullspace(self.G.G0)

    @property
    def logical_qubits(self) -> int:
        return self.G0_perp.m - self.span_perp.m

    def logical_x(self, a: int) -> int:
        return self.G.odd_row(a)

    logical_z = logical_x

    @cached_property
    def distance(self) -> int:
        return distance_z(self.G, budget=self.budget)


def code_view(G: TriorthogonalMatrix) -> CodeView:
    return CodeView(G)
