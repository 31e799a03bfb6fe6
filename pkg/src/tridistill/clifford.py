"""Diagonal Clifford correction that turns transversal T into logical T.

Work in units of ``pi/4``.  For ``f = sum_a x_a g^a`` over the rows of a
triorthogonal ``G`` (rows independent), ``T^n |f> = w^|f| |f>`` with
``w = exp(i pi/4)``.  The correction multiplies ``|f>`` by
``i^(-sum_p L_p f_p) * (-1)^(sum_{p<q} L_pq f_p f_q)``, so it is a product
of ``S^dagger``-type gates (``L_p`` mod 4) and controlled-Z gates
(``L_pq`` mod 2), and the combined phase must satisfy

    |f| - 2 sum_p L_p f_p + 4 sum_{p<q} L_pq f_p f_q = sum_{a<=k} x_a  (mod 8).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import gf2
from .gf2 import BinaryMatrix
from .triortho import TriorthogonalMatrix

EXHAUSTIVE_MAX_ROWS = 24
DEFAULT_TRIALS = 100_000


class DependentRows(ValueError):
    pass


@dataclass(frozen=True)
class CliffordCorrection:
    n: int
    lambda_p: tuple[int, ...]
    lambda_pq: tuple[tuple[int, int], ...]
    """Pairs ``(p, q)``, ``p < q`` (0-based), whose CZ exponent is 1."""

    def __post_init__(self):
        if len(self.lambda_p) != self.n:
            raise ValueError("lambda_p has the wrong length")
        object.__setattr__(self, "lambda_p", tuple(int(v) % 4 for v in self.lambda_p))
        pairs = sorted({(min(p, q), max(p, q)) for p, q in self.lambda_pq})
        if any(p == q or q >= self.n or p < 0 for p, q in pairs):
            raise ValueError("bad CZ pair")
        object.__setattr__(self, "lambda_pq", tuple(pairs))

    @classmethod
    def zero(cls, n: int) -> "CliffordCorrection":
        return cls(n, (0,) * n, ())

    def cz_matrix(self) -> np.ndarray:
        """Strictly upper-triangular 0/1 matrix of CZ exponents."""
        U = np.zeros((self.n, self.n), dtype=np.int64)
        for p, q in self.lambda_pq:
            U[p, q] = 1
        return U

    def with_lambda_p(self, p: int, value: int) -> "CliffordCorrection":
        lp = list(self.lambda_p)
        lp[p] = value
        return CliffordCorrection(self.n, tuple(lp), self.lambda_pq)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "lambda_p": list(self.lambda_p),
            "lambda_pq": [[p + 1, q + 1] for p, q in self.lambda_pq],
        }

    def to_text(self) -> str:
        lines = ["lambda_p " + " ".join(str(v) for v in self.lambda_p)]
        lines.append(f"cz {len(self.lambda_pq)}")
        lines += [f"{p + 1} {q + 1}" for p, q in self.lambda_pq]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PhaseLedger:
    """Integer halves of row weights and pairwise overlaps."""

    gamma_a: tuple[int, ...]
    gamma_ab: dict[tuple[int, int], int]


def phase_ledger(G: TriorthogonalMatrix) -> PhaseLedger:
    rows = G.matrix.rows
    gamma_a = tuple((r.bit_count() - (1 if i < G.k else 0)) // 2 for i, r in enumerate(rows))
    gamma_ab = {}
    for a in range(len(rows)):
        for b in range(a + 1, len(rows)):
            gamma_ab[(a, b)] = (rows[a] & rows[b]).bit_count() // 2
    return PhaseLedger(gamma_a, gamma_ab)


def independent_rows(G: TriorthogonalMatrix) -> TriorthogonalMatrix:
    """Drop dependent even rows; any subset of rows stays triorthogonal."""
    keep = gf2.independent_subset(G.matrix.rows)
    return TriorthogonalMatrix(G.matrix.take_rows(keep), G.k)


def decoding_matrix(G: TriorthogonalMatrix, *, reduce: bool = False) -> BinaryMatrix:
    """A matrix ``B`` with ``B G^T = I``, so ``x = B f`` recovers coefficients.

    Takes the pivot columns of the echelon form of ``G``; on those columns
    ``G`` is an invertible ``m x m`` block ``H`` and ``B`` carries
    ``(H^T)^-1`` there and zeros elsewhere.
    """
    if reduce:
        G = independent_rows(G)
    M = G.matrix
    m = M.m
    _, pivots = gf2.echelon(M.rows)
    if len(pivots) < m:
        raise DependentRows(f"rank {len(pivots)} < {m} rows")
    H = M.take_columns(pivots)  # m x m, H[a][t] = G[a][pivots[t]]
    # invert H^T: solve H^T y = e_t by row-reducing [H^T | I]
    Ht = H.transpose()
    aug = [Ht.rows[t] | (1 << (m + t)) for t in range(m)]
    basis, piv = gf2.echelon(aug)
    inv = [0] * m
    for row, p in zip(basis, piv):
        inv[p] = row >> m
    # inv[a] is row a of (H^T)^-1, as a bitset over t
    B = []
    for a in range(m):
        v = 0
        for t in gf2.bits(inv[a]):
            v |= 1 << pivots[t]
        B.append(v)
    return BinaryMatrix(tuple(B), M.n)


def correction(G: TriorthogonalMatrix, *, B: BinaryMatrix | None = None) -> CliffordCorrection:
    """Exponents of the S-type and CZ gates from the row weights and ``B``.

    L_p  = sum_a Γ_a B_ap - 2 sum_{a<b} Γ_ab B_ap B_bp          (mod 4)
    L_pq = sum_a Γ_a B_ap B_aq + sum_{a<b} Γ_ab (B_ap B_bq + B_bp B_aq)  (mod 2)
    """
    if B is None:
        B = decoding_matrix(G)
    led = phase_ledger(G)
    n, m = G.n, G.m
    Barr = B.to_array().astype(np.int64)
    gam = np.array(led.gamma_a, dtype=np.int64)
    lam_p = gam @ Barr
    lam_pq = Barr.T @ (gam[:, None] * Barr)
    for (a, b), g in led.gamma_ab.items():
        if g == 0:
            continue
        lam_p -= 2 * g * Barr[a] * Barr[b]
        outer = np.outer(Barr[a], Barr[b])
        lam_pq += g * (outer + outer.T)
    lam_p %= 4
    lam_pq %= 2
    iu = np.argwhere(np.triu(lam_pq, k=1) == 1)
    return CliffordCorrection(n, tuple(int(v) for v in lam_p), tuple((int(p), int(q)) for p, q in iu))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    checked: int
    witness: tuple[int, ...] | None = None
    """Coefficient vector ``x`` (x_1..x_m) of the first violation found."""

    def __bool__(self) -> bool:
        return self.ok


def _phase_residues(G: TriorthogonalMatrix, C: CliffordCorrection, X: np.ndarray) -> np.ndarray:
    """Left minus right side of the mod-8 congruence for each row of ``X``."""
    # float matmuls hit BLAS; every intermediate is an integer below 2**53
    Garr = G.matrix.to_array().astype(np.float64)
    F = np.mod(X.astype(np.float64) @ Garr, 2.0)
    lam = np.array(C.lambda_p, dtype=np.float64)
    lhs = F.sum(axis=1) - 2.0 * (F @ lam)
    if C.lambda_pq:
        U = C.cz_matrix().astype(np.float64)
        lhs += 4.0 * ((F @ U) * F).sum(axis=1)
    rhs = X[:, : G.k].sum(axis=1)
    return (lhs.astype(np.int64) - rhs) % 8


def _x_block(start: int, stop: int, m: int) -> np.ndarray:
    """Rows are the coefficient vectors for integers start..stop-1, x_1 most significant."""
    idx = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] >> shifts) & 1


def verify_phase_identity(
    G: TriorthogonalMatrix,
    C: CliffordCorrection,
    mode: Literal["exhaustive", "sampled"] = "exhaustive",
    *,
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
    chunk: int = 1 << 14,
) -> Verdict:
    """Check the mod-8 phase congruence on every (or a sample of) ``x``.

    Exhaustive mode walks ``x`` in lexicographic order and reports the
    smallest violating ``x``; sampled mode draws ``trials`` uniform ``x``
    from a seeded generator and reports the lexicographically smallest
    violation among them.
    """
    if C.n != G.n:
        raise ValueError("correction and matrix lengths differ")
    m = G.m
    if gf2.rank(G.matrix) < m:
        raise DependentRows("rows of G must be independent")
    if mode == "exhaustive":
        if m > EXHAUSTIVE_MAX_ROWS:
            raise ValueError(f"exhaustive mode needs m <= {EXHAUSTIVE_MAX_ROWS}, got {m}")
        total = 1 << m
        for start in range(0, total, chunk):
            X = _x_block(start, min(total, start + chunk), m)
            bad = np.flatnonzero(_phase_residues(G, C, X))
            if bad.size:
                return Verdict(False, start + int(bad[0]) + 1, tuple(int(v) for v in X[bad[0]]))
        return Verdict(True, total)
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        witness = None
        done = 0
        while done < trials:
            size = min(chunk, trials - done)
            X = rng.integers(0, 2, size=(size, m), dtype=np.int64)
            bad = np.flatnonzero(_phase_residues(G, C, X))
            for i in bad.tolist():
                cand = tuple(int(v) for v in X[i])
                if witness is None or cand < witness:
                    witness = cand
            done += size
        return Verdict(witness is None, trials, witness)
    raise ValueError(f"unknown mode {mode!r}")


def gate_counts(C: CliffordCorrection) -> dict[str, int]:
    return {
        "s_gates": sum(1 for v in C.lambda_p if v % 4),
        "cz_gates": len(C.lambda_pq),
    }
