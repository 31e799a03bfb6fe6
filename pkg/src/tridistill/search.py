"""Triorthogonal matrices as solutions of a linear system over F2.

A matrix with ``m`` rows and no repeated columns is the same thing as a
0/1 vector ``N`` indexed by the nonzero column patterns ``x`` in F2^m.
Pair overlaps, triple overlaps and row weights are all linear in ``N``,
so demanding even pairs, even triples, ``k`` odd rows and no column that
vanishes on the last ``m - k`` rows gives an affine system.

Indexing: row ``a`` (1-based) is bit ``a - 1`` of the pattern integer
``x``, and variable ``x`` sits at bit ``x - 1`` of ``N``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Literal

import numpy as np

from . import gf2
from .gf2 import AffineSolution, BinaryMatrix
from .triortho import TriorthogonalMatrix, validate

log = logging.getLogger(__name__)

MAX_ROWS = 22
EXHAUSTIVE_MAX_DIM = 26


class SystemRejected(ValueError):
    pass


class ValidationFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class TriorthoSystem:
    m: int
    k: int
    A: BinaryMatrix
    b: int
    census: dict[str, int]

    @property
    def variables(self) -> int:
        return (1 << self.m) - 1


@dataclass(frozen=True)
class ColumnCountVector:
    """Which column patterns are present; ``bits`` has variable ``x`` at bit ``x - 1``."""

    m: int
    bits: int

    @property
    def n(self) -> int:
        return self.bits.bit_count()

    def patterns(self) -> list[int]:
        return [j + 1 for j in gf2.bits(self.bits)]

    def __contains__(self, x: int) -> bool:
        return x > 0 and bool((self.bits >> (x - 1)) & 1)


@dataclass(frozen=True)
class SearchResult:
    N: ColumnCountVector
    weight: int
    exhaustive: bool
    budget_exceeded: bool = False
    evaluated: int = 0
    weight_counts: tuple[int, ...] | None = None
    """Full weight distribution of the solution coset (exhaustive only)."""


def _mask_all(m: int, rows: tuple[int, ...]) -> int:
    """Variables ``x`` whose pattern has every bit in ``rows`` set."""
    need = 0
    for a in rows:
        need |= 1 << a
    v = 0
    for x in range(1, 1 << m):
        if x & need == need:
            v |= 1 << (x - 1)
    return v


def build_system(m: int, k: int) -> TriorthoSystem:
    """Pair, triple, weight and zero-column constraints for ``m`` rows, ``k`` odd."""
    if not 0 <= k <= m:
        raise SystemRejected(f"need 0 <= k <= m, got m={m}, k={k}")
    if m - k < 3:
        raise SystemRejected(
            f"m - k = {m - k} < 3: with fewer than three even rows G0 has a zero "
            "column, so the Z-distance is 1"
        )
    if m > MAX_ROWS:
        raise SystemRejected(f"m = {m} exceeds the limit {MAX_ROWS}")
    rows: list[int] = []
    rhs = 0
    pairs = list(combinations(range(m), 2))
    triples = list(combinations(range(m), 3))
    for pr in pairs:
        rows.append(_mask_all(m, pr))
    for tr in triples:
        rows.append(_mask_all(m, tr))
    for a in range(m):
        if a < k:
            rhs |= 1 << len(rows)
        rows.append(_mask_all(m, (a,)))
    for x in range(1, 1 << k):
        rows.append(1 << (x - 1))
    census = {
        "pair": len(pairs),
        "triple": len(triples),
        "weight": m,
        "zero_column": (1 << k) - 1,
    }
    return TriorthoSystem(m, k, BinaryMatrix(tuple(rows), (1 << m) - 1), rhs, census)


def solve(system: TriorthoSystem) -> AffineSolution | None:
    return gf2.solve_affine(system.A, system.b)


def is_solution(system: TriorthoSystem, N: int) -> bool:
    return system.A.apply(N) == system.b


def min_weight_solution(
    system: TriorthoSystem,
    strategy: Literal["exhaustive", "randomized"] = "exhaustive",
    *,
    budget: int = 10_000,
    seed: int = 0,
    solution: AffineSolution | None = None,
) -> SearchResult:
    """Minimum-weight nonzero ``N`` solving the system.

    ``exhaustive`` sweeps the whole solution coset; ``randomized`` draws
    ``budget`` random coset members and improves each by greedy descent,
    moving only by nullspace vectors so every visited point is a solution.
    Ties go to the smallest ``N`` as an integer.
    """
    sol = solve(system) if solution is None else solution
    if sol is None:
        raise SystemRejected("system is infeasible")
    nvars = system.variables
    if strategy == "exhaustive":
        if sol.dimension > EXHAUSTIVE_MAX_DIM:
            raise SystemRejected(
                f"nullspace dimension {sol.dimension} > {EXHAUSTIVE_MAX_DIM}; use randomized"
            )
        w, v, counts = gf2.coset_min_weight(
            sol.particular, sol.nullspace_basis, nvars, limit=EXHAUSTIVE_MAX_DIM
        )
        if w < 0:
            raise SystemRejected("only the zero solution exists")
        return SearchResult(
            ColumnCountVector(system.m, v),
            w,
            True,
            evaluated=1 << sol.dimension,
            weight_counts=tuple(int(c) for c in counts),
        )
    if strategy == "randomized":
        return _randomized(system, sol, budget, seed)
    raise ValueError(f"unknown strategy {strategy!r}")


def _descend(v: int, basis: tuple[int, ...]) -> int:
    w = v.bit_count()
    improved = True
    while improved:
        improved = False
        for b in basis:
            u = v ^ b
            uw = u.bit_count()
            if uw and (uw < w or (uw == w and u < v)):
                v, w = u, uw
                improved = True
    return v


def _randomized(system: TriorthoSystem, sol: AffineSolution, budget: int, seed: int) -> SearchResult:
    rng = np.random.default_rng(seed)
    basis = sol.nullspace_basis
    d = len(basis)
    best = None
    for _ in range(max(budget, 1)):
        coeffs = int(rng.integers(0, 1 << 62)) if d else 0
        if d > 62:
            coeffs = int.from_bytes(rng.bytes((d + 7) // 8), "little")
        coeffs &= (1 << d) - 1
        v = _descend(sol.member(coeffs), basis)
        if v == 0:
            continue
        if best is None or (v.bit_count(), v) < (best.bit_count(), best):
            best = v
    if best is None:
        raise SystemRejected("no nonzero solution found")
    return SearchResult(
        ColumnCountVector(system.m, best), best.bit_count(), False, budget_exceeded=True, evaluated=budget
    )


def random_solution(sol: AffineSolution, rng: np.random.Generator) -> int:
    d = sol.dimension
    coeffs = int.from_bytes(rng.bytes((d + 7) // 8 or 1), "little") & ((1 << d) - 1)
    return sol.member(coeffs)


def materialize(N: ColumnCountVector, k: int) -> TriorthogonalMatrix:
    """One column per present pattern, columns sorted by pattern value."""
    if N.n == 0:
        raise ValidationFailed("N has no columns")
    pats = N.patterns()
    rows = []
    for a in range(N.m):
        r = 0
        for j, x in enumerate(pats):
            if (x >> a) & 1:
                r |= 1 << j
        rows.append(r)
    M = BinaryMatrix(tuple(rows), len(pats))
    rep = validate(M)
    if not rep.is_triorthogonal or rep.odd_rows != list(range(1, k + 1)):
        raise ValidationFailed(f"materialized matrix fails validation: {rep}")
    return TriorthogonalMatrix(M, k)
