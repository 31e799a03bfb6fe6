"""Triorthogonal matrices: validation, structural checks and built-in families."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from . import gf2
from .gf2 import BinaryMatrix


class NotTriorthogonal(ValueError):
    pass


class UnknownName(KeyError):
    pass


@dataclass(frozen=True)
class ValidationReport:
    is_triorthogonal: bool
    pair_violations: list[tuple[int, int]]
    triple_violations: list[tuple[int, int, int]]
    odd_rows: list[int]
    even_rows: list[int]
    zero_columns_in_G0: list[int]

    @property
    def odd_rows_first(self) -> bool:
        """Odd-weight rows form a prefix of the matrix."""
        return self.odd_rows == list(range(1, len(self.odd_rows) + 1))

    def as_dict(self) -> dict:
        return {
            "is_triorthogonal": self.is_triorthogonal,
            "pair_violations": [list(v) for v in self.pair_violations],
            "triple_violations": [list(v) for v in self.triple_violations],
            "odd_rows": self.odd_rows,
            "even_rows": self.even_rows,
            "zero_columns_in_G0": self.zero_columns_in_G0,
        }


def validate(M: BinaryMatrix) -> ValidationReport:
    """Exhaustively check every pair and triple of rows for even overlap.

    Row and column indices in the report are 1-based.
    """
    rows = M.rows
    m = len(rows)
    pairs = []
    triples = []
    for a, b in combinations(range(m), 2):
        ab = rows[a] & rows[b]
        if ab.bit_count() & 1:
            pairs.append((a + 1, b + 1))
        for c in range(b + 1, m):
            if (ab & rows[c]).bit_count() & 1:
                triples.append((a + 1, b + 1, c + 1))
    odd = [i + 1 for i, r in enumerate(rows) if r.bit_count() & 1]
    even = [i + 1 for i, r in enumerate(rows) if not r.bit_count() & 1]
    support = 0
    for i in even:
        support |= rows[i - 1]
    zero_cols = [j + 1 for j in range(M.n) if not (support >> j) & 1]
    return ValidationReport(not pairs and not triples, pairs, triples, odd, even, zero_cols)


@dataclass(frozen=True)
class TriorthogonalMatrix:
    """A triorthogonal matrix whose first ``k`` rows are the odd-weight ones."""

    matrix: BinaryMatrix
    k: int
    report: ValidationReport = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rep = validate(self.matrix)
        if not rep.is_triorthogonal:
            raise NotTriorthogonal(
                f"pair violations {rep.pair_violations[:5]}, "
                f"triple violations {rep.triple_violations[:5]}"
            )
        if rep.odd_rows != list(range(1, self.k + 1)):
            raise NotTriorthogonal(
                f"expected odd-weight rows 1..{self.k}, found {rep.odd_rows}"
            )
        object.__setattr__(self, "report", rep)

    @classmethod
    def from_matrix(cls, M: BinaryMatrix, k: int | None = None) -> "TriorthogonalMatrix":
        """Wrap ``M``; ``k`` defaults to the number of odd-weight rows."""
        if k is None:
            k = sum(1 for r in M.rows if r.bit_count() & 1)
        return cls(M, k)

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def m(self) -> int:
        return self.matrix.m

    @property
    def G1(self) -> BinaryMatrix:
        return BinaryMatrix(self.matrix.rows[: self.k], self.n)

    @property
    def G0(self) -> BinaryMatrix:
        return BinaryMatrix(self.matrix.rows[self.k :], self.n)

    def odd_row(self, a: int) -> int:
        """The ``a``-th odd-weight row, ``1 <= a <= k``."""
        if not 1 <= a <= self.k:
            raise IndexError(f"qubit index {a} outside 1..{self.k}")
        return self.matrix.rows[a - 1]

    def to_text(self) -> str:
        return gf2.format_matrix(self.matrix, self.k)

    def with_duplicated_column(self, j: int) -> "TriorthogonalMatrix":
        """Append two copies of column ``j`` (0-based)."""
        cols = list(range(self.n)) + [j, j]
        return TriorthogonalMatrix(self.matrix.take_columns(cols), self.k)


# --------------------------------------------------------------------------
# Span identities and usefulness


@dataclass(frozen=True)
class StructuralReport:
    g1_independent: bool
    g0_g1_trivial_intersection: bool
    g0_is_radical: bool
    g0_dual_dimension: bool

    @property
    def all_pass(self) -> bool:
        return (
            self.g1_independent
            and self.g0_g1_trivial_intersection
            and self.g0_is_radical
            and self.g0_dual_dimension
        )


def structural_check(G: TriorthogonalMatrix) -> StructuralReport:
    """Check the four span identities that follow from pairwise orthogonality.

    (i)   the odd rows are independent;
    (ii)  span(G0) ∩ span(G1) = 0;
    (iii) span(G0) = span(G) ∩ span(G)^⊥;
    (iv)  span(G0)^⊥ = span(G1) ⊕ span(G)^⊥, checked as containment plus
          dimension count.
    """
    M, G0, G1 = G.matrix, G.G0, G.G1
    r0, r1, r = gf2.rank(G0), gf2.rank(G1), gf2.rank(M)
    c1 = r1 == G.k
    c2 = r == r0 + r1
    radical = gf2.intersection(M, gf2.nullspace(M))
    c3 = gf2.same_span(radical, G0)
    G0_perp = gf2.nullspace(G0)
    G_perp = gf2.nullspace(M)
    sum_space = G1.stack(G_perp)
    contained = all(G0.apply(v) == 0 for v in sum_space.rows)
    c4 = (
        contained
        and gf2.rank(sum_space) == G.k + G_perp.m
        and G0_perp.m == G.k + G_perp.m
    )
    return StructuralReport(c1, c2, c3, c4)


@dataclass(frozen=True)
class UsefulnessReport:
    g0_rows_ok: bool
    no_zero_column_in_G0: bool

    @property
    def useful(self) -> bool:
        return self.g0_rows_ok and self.no_zero_column_in_G0


def usefulness_check(G: TriorthogonalMatrix) -> UsefulnessReport:
    """Necessary conditions for Z-distance at least 2.

    A zero column in G0 gives a weight-one logical Z, and with fewer than
    three even rows such a column always exists.
    """
    return UsefulnessReport(G.m - G.k >= 3, not G.report.zero_columns_in_G0)


# --------------------------------------------------------------------------
# Built-in matrices

_L = ["1111", "1111"]
_M = ["111000", "000111"]
_S1 = ["0101", "0011", "1111"]
_S2 = ["101101", "011011", "000000"]


def generate_gk(k: int) -> TriorthogonalMatrix:
    """The ``(k+3) x (3k+8)`` matrix G(k) with ``k`` odd rows of weight 7.

    Column blocks left to right: a width-4 block that is zero on the odd rows
    and S1 on the even rows, a width-4 block with L on every pair of odd rows
    and S1 below, then ``k/2`` width-6 blocks each holding M on one pair of
    odd rows and S2 below.
    """
    if k < 0 or k % 2:
        raise ValueError(f"k must be a nonnegative even integer, got {k}")
    h = k // 2
    lines = []
    for pair in range(h):
        for t in range(2):
            blocks = ["0000", _L[t]]
            blocks += [_M[t] if j == pair else "000000" for j in range(h)]
            lines.append("".join(blocks))
    for t in range(3):
        lines.append(_S1[t] + _S1[t] + _S2[t] * h)
    return TriorthogonalMatrix(BinaryMatrix.from_strings(lines), k)


# 5x14 example with two odd rows; the last three rows form G0.
EXAMPLE_14 = BinaryMatrix.from_strings(
    [
        "11111110000000",
        "00000001111111",
        "10101011010101",
        "01100110110011",
        "00011110001111",
    ]
)

# G0 of the 49-qubit distance-5 code; G adds an all-ones row on top.
_BH49_G0 = [
    "1111111111111110101010101010101010101010101010101",
    "0000000000000000000111100110011000011001100110011",
    "0000000000000001100000011001100110000000000000000",
    "0000000000000000000000000000000001111000000001111",
    "0000000000000000011110000000000000000111100000000",
    "0000000000000000000001111000011110000000000000000",
    "0000000000000000000000000111111110000000000000000",
    "0000000000000000000000000000000001111111100000000",
    "0000000000000000000000000000000000000000011111111",
    "1010101010101010000000000000000000000000000000000",
    "0110011001100110000000000000000000000000000000000",
    "0001111000011110000000000000000000000000000000000",
    "0000000111111110000000000000000000000000000000000",
]


def bh49() -> TriorthogonalMatrix:
    rows = ["1" * 49] + _BH49_G0
    return TriorthogonalMatrix(BinaryMatrix.from_strings(rows), 1)


def rm15() -> TriorthogonalMatrix:
    """Punctured Reed-Muller code: all-ones row over the binary digits of 1..15."""
    rows = [(1 << 15) - 1]
    for bit in range(4):
        rows.append(gf2.vector_from_bits((c >> bit) & 1 for c in range(1, 16)))
    return TriorthogonalMatrix(BinaryMatrix(tuple(rows), 15), 1)


BUILTIN_NAMES = ("BH49", "RM15", "G{k}")


def builtin(name: str) -> TriorthogonalMatrix:
    """Look up ``"BH49"``, ``"RM15"`` or ``"G<k>"`` for even ``k``."""
    key = name.strip().upper()
    if key == "BH49":
        return bh49()
    if key == "RM15":
        return rm15()
    if key.startswith("G") and key[1:].isdigit():
        k = int(key[1:])
        if k % 2 == 0:
            return generate_gk(k)
    raise UnknownName(name)
