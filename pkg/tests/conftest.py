from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from tridistill import search
from tridistill.gf2 import BinaryMatrix
from tridistill.triortho import TriorthogonalMatrix

# criterion number -> list of outcomes, filled by the report hook below
_CRITERIA: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    num = getattr(report, "criterion", None)
    if num is not None:
        _CRITERIA.setdefault(num, []).append(report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        results = _CRITERIA[num]
        status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {status} ({sum(results)}/{len(results)} checks)")


# --------------------------------------------------------------------------
# Independent brute-force oracles. They avoid the library's linear algebra.


def brute_span(rows) -> set[int]:
    """Every XOR combination of ``rows``."""
    out = set()
    for coeffs in itertools.product((0, 1), repeat=len(rows)):
        v = 0
        for c, r in zip(coeffs, rows):
            if c:
                v ^= r
        out.add(v)
    return out


def brute_dual(rows, n: int) -> list[int]:
    """All length-``n`` vectors orthogonal to every row."""
    return [v for v in range(1 << n) if all((v & r).bit_count() % 2 == 0 for r in rows)]


def brute_weight_counts(vectors, n: int) -> list[int]:
    counts = [0] * (n + 1)
    for v in vectors:
        counts[v.bit_count()] += 1
    return counts


def brute_accept_and_errors(G: TriorthogonalMatrix, p):
    """Probability of trivial G0 syndrome, and of each logical flip, by summing over all 2^n errors."""
    n, k = G.n, G.k
    rows = G.matrix.rows
    accept = 0
    flips = [0] * k
    for f in range(1 << n):
        if any((f & r).bit_count() & 1 for r in rows[k:]):
            continue
        w = f.bit_count()
        pr = p**w * (1 - p) ** (n - w)
        accept += pr
        for a in range(k):
            if (f & rows[a]).bit_count() & 1:
                flips[a] += pr
    return accept, [x / accept for x in flips]


def brute_distance(G: TriorthogonalMatrix) -> int:
    n, k = G.n, G.k
    rows = G.matrix.rows
    best = n + 1
    for f in range(1, 1 << n):
        w = f.bit_count()
        if w >= best:
            continue
        if any((f & r).bit_count() & 1 for r in rows[k:]):
            continue
        if any((f & r).bit_count() & 1 for r in rows[:k]):
            best = w
    return best


def random_pipeline_matrix(rng: np.random.Generator, m: int, k: int) -> TriorthogonalMatrix | None:
    """A random member of the solution coset for ``(m, k)``, materialized."""
    system = search.build_system(m, k)
    sol = search.solve(system)
    if sol is None:
        return None
    N = search.random_solution(sol, rng)
    if N == 0:
        return None
    return search.materialize(search.ColumnCountVector(m, N), k)


def pipeline_matrices(count: int, *, seed: int, max_m: int = 8, max_n: int | None = None):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        m = int(rng.integers(3, max_m + 1))
        k = int(rng.integers(0, m - 2))
        G = random_pipeline_matrix(rng, m, k)
        if G is None or (max_n is not None and G.n > max_n):
            continue
        out.append(G)
    return out


def exact(p: str) -> Fraction:
    return Fraction(p)


@pytest.fixture(scope="session")
def example14() -> TriorthogonalMatrix:
    from tridistill.triortho import EXAMPLE_14

    return TriorthogonalMatrix(EXAMPLE_14, 2)


def flip(M: BinaryMatrix, i: int, j: int) -> BinaryMatrix:
    rows = list(M.rows)
    rows[i] ^= 1 << j
    return BinaryMatrix(tuple(rows), M.n)
