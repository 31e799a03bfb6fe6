from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    brute_accept_and_errors,
    brute_distance,
    brute_dual,
    brute_span,
    brute_weight_counts,
    pipeline_matrices,
)
from tridistill import analysis, gf2
from tridistill.gf2 import BinaryMatrix
from tridistill.triortho import EXAMPLE_14, TriorthogonalMatrix, builtin, generate_gk


@st.composite
def codes(draw, max_m=6, max_n=12):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    rows = draw(st.lists(st.integers(0, (1 << n) - 1), min_size=m, max_size=m))
    return BinaryMatrix(tuple(rows), n)


@given(codes())
def test_macwilliams_matches_brute_dual(M):
    W = analysis.enumerator(M)
    dual = analysis.macwilliams(W)
    assert list(dual.coefficients) == brute_weight_counts(brute_dual(M.rows, M.n), M.n)


@given(codes())
def test_macwilliams_involution(M):
    W = analysis.enumerator(M)
    assert analysis.macwilliams(analysis.macwilliams(W)) == W


def test_macwilliams_rejects_inconsistent():
    with pytest.raises(analysis.InconsistentInput):
        analysis.macwilliams(analysis.WeightEnumerator(3, (1, 3, 0, 0)))
    with pytest.raises(analysis.InconsistentInput):
        analysis.macwilliams(analysis.WeightEnumerator(3, (1, 0, 1, 0)), code_size=4)


def test_coset_enumerator_rejects_member():
    G = generate_gk(2)
    with pytest.raises(analysis.FInSpan):
        analysis.coset_enumerator(G.G0, G.G0.rows[0])


SMALL = [
    ("EX14", TriorthogonalMatrix(EXAMPLE_14, 2)),
    ("G0", generate_gk(0)),
    ("G2", generate_gk(2)),
    ("G4", generate_gk(4)),
    ("RM15", builtin("RM15")),
]


@pytest.mark.parametrize("name,G", [c for c in SMALL if c[1].n <= 15], ids=lambda v: v if isinstance(v, str) else "")
def test_rates_match_brute_force(name, G):
    for p in (Fraction(1, 50), Fraction(1, 5)):
        ps_b, qs_b = brute_accept_and_errors(G, p)
        assert analysis.success_probability(G, p) == ps_b
        assert analysis.output_errors(G, p) == qs_b
        # the float path agrees with the exact one
        assert analysis.success_probability(G, float(p)) == pytest.approx(float(ps_b), rel=1e-12)
        for a in range(1, G.k + 1):
            assert analysis.output_error(G, a, float(p)) == pytest.approx(float(qs_b[a - 1]), rel=1e-9)


@pytest.mark.parametrize("name,G", SMALL[:1] + SMALL[2:], ids=[s for s, _ in SMALL[:1] + SMALL[2:]])
def test_distance_matches_brute_force(name, G):
    assert analysis.distance_z(G) == brute_distance(G)


def test_float_path_small_p_is_stable():
    G = builtin("BH49")
    p = 1e-6
    q = analysis.output_error(G, 1, p)
    assert q == pytest.approx(1411 * p**5, rel=1e-3)
    exact = analysis.output_error(G, 1, Fraction(p))
    assert q == pytest.approx(float(exact), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 12).map(lambda k: 2 * (k // 2)), st.fractions(Fraction(0), Fraction(1, 2)))
def test_full_ps_series_is_the_polynomial(k, p):
    G = generate_gk(k)
    full = analysis.ps_series(G, G.n)
    assert full(p) == analysis.success_probability(G, p)
    assert analysis.ps_series(G, 3).coefficients == full.truncate(3).coefficients


@pytest.mark.parametrize("G", [generate_gk(2), generate_gk(10), builtin("RM15")], ids=["G2", "G10", "RM15"])
def test_q_series_remainder_shrinks(G):
    order = 6
    q = analysis.q_series(G, 1, order)
    ratios = []
    for p in (Fraction(1, 10**4), Fraction(1, 10**5)):
        ratios.append(abs(q(p) - analysis.output_error(G, 1, p)) / p ** (order + 1))
    # the scaled remainder tends to the next coefficient, so it stays bounded
    assert ratios[1] <= 2 * ratios[0] + 1


def test_weight2_logical_count_matches_brute_force():
    G = generate_gk(4)
    k, rows = G.k, G.matrix.rows
    want = 0
    for f in range(1 << G.n):
        if f.bit_count() != 2:
            continue
        if any((f & r).bit_count() & 1 for r in rows[k:]):
            continue
        want += (f & rows[0]).bit_count() & 1
    assert analysis.weight2_logical_count(G, 1) == want == 13


def test_min_logical_budget():
    with pytest.raises(analysis.BudgetExceeded):
        analysis.min_logical(builtin("BH49"), budget=1000)


def test_threshold_is_a_crossing():
    for G in (generate_gk(2), builtin("RM15"), builtin("BH49")):
        t = analysis.threshold(G)
        assert analysis.worst_output_error(G, t * 0.999) < t * 0.999
        assert analysis.worst_output_error(G, t * 1.001) > t * 1.001


def test_g2_threshold_by_direct_bisection():
    # independent of the library's grid: plain bisection on the brute-force q
    G = generate_gk(2)
    lo, hi = 0.05, 0.2
    for _ in range(30):
        mid = (lo + hi) / 2
        _, qs = brute_accept_and_errors(G, mid)
        lo, hi = (mid, hi) if max(qs) < mid else (lo, mid)
    assert analysis.threshold(G) == pytest.approx(lo, abs=1e-6)


def test_code_view():
    G = builtin("RM15")
    view = analysis.code_view(G)
    assert view.logical_qubits == 1
    assert view.distance == 3
    assert gf2.rank(view.G0_perp) == G.n - gf2.rank(G.G0)


def test_primal_dual_on_pipeline_matrices():
    for G in pipeline_matrices(20, seed=3, max_n=18):
        p = Fraction(1, 9)
        assert analysis.success_probability(G, p) == analysis.success_probability_primal(G, p)


def test_enumerator_str():
    W = analysis.enumerator(builtin("BH49").G0)
    assert str(W) == "1 + 32x^8 + 442x^16 + 6696x^24 + 1021x^32"
