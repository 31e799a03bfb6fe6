"""Linear algebra over GF(2) on bit-packed rows.

Vectors are plain Python ints: bit ``j`` holds coordinate ``j`` (0-based),
so XOR is addition, AND is the coordinatewise product and ``int.bit_count``
is the Hamming weight.  A :class:`BinaryMatrix` is a tuple of such rows plus
the common length ``n``.

Bulk enumeration of spans (weight distributions, minimum-weight cosets)
goes through numpy with ``uint64`` words and ``np.bitwise_count``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_SPAN_LIMIT = 28


class LimitExceeded(ValueError):
    """A span is too large to enumerate under the configured limit."""


class MatrixFormatError(ValueError):
    pass


def weight(v: int) -> int:
    return v.bit_count()


def inner(u: int, v: int) -> int:
    """Inner product over F2."""
    return (u & v).bit_count() & 1


def bits(v: int) -> Iterator[int]:
    """Indices of the set bits of ``v`` in increasing order."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def vector_from_bits(values: Iterable[int]) -> int:
    v = 0
    for j, b in enumerate(values):
        if b & 1:
            v |= 1 << j
    return v


def vector_to_string(v: int, n: int) -> str:
    return "".join("1" if (v >> j) & 1 else "0" for j in range(n))


def vector_from_string(s: str) -> int:
    s = s.replace(" ", "")
    if any(ch not in "01" for ch in s):
        raise MatrixFormatError(f"not a binary row: {s!r}")
    return vector_from_bits(int(ch) for ch in s)


@dataclass(frozen=True)
class BinaryMatrix:
    """An ``m x n`` matrix over F2 stored as ``m`` bit-packed rows."""

    rows: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        if self.n < 0:
            raise ValueError("negative column count")
        limit = 1 << self.n
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row {r:#x} does not fit in {self.n} columns")

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[int]:
        return iter(self.rows)

    def __getitem__(self, i: int) -> int:
        return self.rows[i]

    @classmethod
    def from_strings(cls, lines: Sequence[str]) -> "BinaryMatrix":
        rows = [line.replace(" ", "") for line in lines]
        n = len(rows[0]) if rows else 0
        if any(len(r) != n for r in rows):
            raise MatrixFormatError("rows have unequal length")
        return cls(tuple(vector_from_string(r) for r in rows), n)

    @classmethod
    def from_array(cls, a) -> "BinaryMatrix":
        a = np.asarray(a, dtype=np.int64) & 1
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls(tuple(vector_from_bits(row) for row in a.tolist()), a.shape[1])

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls(tuple(1 << j for j in range(n)), n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "BinaryMatrix":
        return cls((0,) * m, n)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.m, self.n), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in bits(r):
                out[i, j] = 1
        return out

    def to_strings(self) -> list[str]:
        return [vector_to_string(r, self.n) for r in self.rows]

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def column(self, j: int) -> int:
        """Column ``j`` as a bit vector over the row index."""
        c = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                c |= 1 << i
        return c

    def columns(self) -> list[int]:
        cols = [0] * self.n
        for i, r in enumerate(self.rows):
            for j in bits(r):
                cols[j] |= 1 << i
        return cols

    def transpose(self) -> "BinaryMatrix":
        return BinaryMatrix(tuple(self.columns()), self.m)

    def take_rows(self, idx: Iterable[int]) -> "BinaryMatrix":
        return BinaryMatrix(tuple(self.rows[i] for i in idx), self.n)

    def take_columns(self, idx: Sequence[int]) -> "BinaryMatrix":
        rows = []
        for r in self.rows:
            v = 0
            for t, j in enumerate(idx):
                if (r >> j) & 1:
                    v |= 1 << t
            rows.append(v)
        return BinaryMatrix(tuple(rows), len(idx))

    def stack(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if other.n != self.n:
            raise ValueError("column counts differ")
        return BinaryMatrix(self.rows + other.rows, self.n)

    def hconcat(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if other.m != self.m:
            raise ValueError("row counts differ")
        return BinaryMatrix(
            tuple(a | (b << self.n) for a, b in zip(self.rows, other.rows)),
            self.n + other.n,
        )

    def apply(self, v: int) -> int:
        """Syndrome ``M v``: bit ``i`` is the inner product of row ``i`` with ``v``."""
        s = 0
        for i, r in enumerate(self.rows):
            if (r & v).bit_count() & 1:
                s |= 1 << i
        return s

    def combine(self, x: int) -> int:
        """Row combination ``sum_i x_i M_i``."""
        v = 0
        for i in bits(x):
            v ^= self.rows[i]
        return v

    def __matmul__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if self.n != other.m:
            raise ValueError("shape mismatch")
        return BinaryMatrix(tuple(other.combine(r) for r in self.rows), other.n)

    def row_weights(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    def rank(self) -> int:
        return rank(self)

    def __str__(self) -> str:
        return "\n".join(self.to_strings())


@dataclass(frozen=True)
class AffineSolution:
    """Solution set ``particular + span(nullspace_basis)`` of ``A x = b``."""

    particular: int
    nullspace_basis: tuple[int, ...]
    n: int

    @property
    def dimension(self) -> int:
        return len(self.nullspace_basis)

    def member(self, coeffs: int) -> int:
        v = self.particular
        for i in bits(coeffs):
            v ^= self.nullspace_basis[i]
        return v


def echelon(rows: Iterable[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form with leftmost (lowest-bit) pivots.

    Returns ``(basis, pivots)`` where ``basis[i]`` is the only basis row with
    bit ``pivots[i]`` set; ``pivots`` is increasing.  Zero rows are dropped.
    """
    basis: list[int] = []
    pivots: list[int] = []
    for r in rows:
        for b, p in zip(basis, pivots):
            if (r >> p) & 1:
                r ^= b
        if not r:
            continue
        p = (r & -r).bit_length() - 1
        for i, b in enumerate(basis):
            if (b >> p) & 1:
                basis[i] = b ^ r
        # keep pivots sorted
        pos = 0
        while pos < len(pivots) and pivots[pos] < p:
            pos += 1
        basis.insert(pos, r)
        pivots.insert(pos, p)
    return basis, pivots


def rank(M: BinaryMatrix | Iterable[int]) -> int:
    rows = M.rows if isinstance(M, BinaryMatrix) else M
    return len(echelon(rows)[0])


def row_basis(M: BinaryMatrix) -> BinaryMatrix:
    """Canonical (reduced echelon) basis of the row space."""
    return BinaryMatrix(tuple(echelon(M.rows)[0]), M.n)


def independent_subset(rows: Sequence[int]) -> list[int]:
    """Indices of a maximal independent subset, greedily from the front."""
    keep = []
    basis: list[int] = []
    pivots: list[int] = []
    for i, r in enumerate(rows):
        v = r
        for b, p in zip(basis, pivots):
            if (v >> p) & 1:
                v ^= b
        if v:
            keep.append(i)
            basis.append(v)
            pivots.append((v & -v).bit_length() - 1)
    return keep


def in_span(v: int, M: BinaryMatrix | Sequence[int]) -> bool:
    rows = M.rows if isinstance(M, BinaryMatrix) else M
    basis, pivots = echelon(rows)
    for b, p in zip(basis, pivots):
        if (v >> p) & 1:
            v ^= b
    return v == 0


def solve_affine(A: BinaryMatrix, b: int) -> AffineSolution | None:
    """Solve ``A x = b`` over F2.

    ``b`` is a bit vector over the rows of ``A``.  Returns ``None`` when the
    system is inconsistent.
    """
    if b >> A.m:
        raise ValueError("right-hand side longer than the number of equations")
    n = A.n
    flag = 1 << n
    aug = [r | (flag if (b >> i) & 1 else 0) for i, r in enumerate(A.rows)]
    basis, pivots = echelon(aug)
    if pivots and pivots[-1] == n:
        return None
    particular = 0
    pivot_mask = 0
    for row, p in zip(basis, pivots):
        pivot_mask |= 1 << p
        if row & flag:
            particular |= 1 << p
    null = []
    free = ((1 << n) - 1) & ~pivot_mask
    for c in bits(free):
        v = 1 << c
        for row, p in zip(basis, pivots):
            if (row >> c) & 1:
                v |= 1 << p
        null.append(v)
    return AffineSolution(particular, tuple(null), n)


def nullspace(M: BinaryMatrix) -> BinaryMatrix:
    """Basis (as rows) of ``{v : M v = 0}``, i.e. the dual of the row space."""
    sol = solve_affine(M, 0)
    assert sol is not None
    return BinaryMatrix(sol.nullspace_basis, M.n)


dual = nullspace


def intersection(U: BinaryMatrix, V: BinaryMatrix) -> BinaryMatrix:
    """Basis of ``span(U) ∩ span(V)`` computed as ``(U^⊥ + V^⊥)^⊥``."""
    return nullspace(nullspace(U).stack(nullspace(V)))


def same_span(U: BinaryMatrix, V: BinaryMatrix) -> bool:
    ru, rv = rank(U), rank(V)
    return ru == rv and rank(U.rows + V.rows) == ru


# --------------------------------------------------------------------------
# Span enumeration


def span_enumerate(
    generators: BinaryMatrix | Sequence[int],
    *,
    limit: int = DEFAULT_SPAN_LIMIT,
    start: int = 0,
    stop: int | None = None,
) -> Iterator[int]:
    """Iterate over the span of ``generators`` in Gray-code order.

    The generators are first reduced to an echelon basis of rank ``r`` so
    each of the ``2**r`` vectors appears once.  ``start``/``stop`` select a
    slice of the Gray index range, which lets callers partition the work.
    """
    rows = generators.rows if isinstance(generators, BinaryMatrix) else generators
    basis, _ = echelon(rows)
    r = len(basis)
    if r > limit:
        raise LimitExceeded(f"span has rank {r} > limit {limit}")
    total = 1 << r
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    gray = start ^ (start >> 1)
    v = 0
    for j in bits(gray):
        v ^= basis[j]
    i = start
    while True:
        yield v
        i += 1
        if i >= stop:
            return
        v ^= basis[(i & -i).bit_length() - 1]


def _to_words(v: int, nwords: int) -> np.ndarray:
    return np.array(
        [(v >> (64 * w)) & 0xFFFFFFFFFFFFFFFF for w in range(nwords)], dtype=np.uint64
    )


def _from_words(words: np.ndarray) -> int:
    v = 0
    for w, x in enumerate(words.tolist()):
        v |= int(x) << (64 * w)
    return v


class _SpanTable:
    """Split-table enumeration of ``offset + span(basis)``.

    The lowest ``L`` basis vectors are tabulated (``2**L`` rows of uint64
    words); the remaining ones are walked in Gray-code order and XORed onto
    the whole table at once.
    """

    def __init__(self, basis: Sequence[int], n: int, offset: int = 0, low: int = 14):
        self.basis = list(basis)
        self.n = n
        self.nwords = max(1, (n + 63) // 64)
        self.low = min(low, len(self.basis))
        table = np.zeros((1, self.nwords), dtype=np.uint64)
        table[0] = _to_words(offset, self.nwords)
        for b in self.basis[: self.low]:
            table = np.concatenate([table, table ^ _to_words(b, self.nwords)])
        self.table = table
        self.high = [_to_words(b, self.nwords) for b in self.basis[self.low :]]
        self.offset = offset

    def blocks(self) -> Iterator[tuple[int, np.ndarray]]:
        """Yield ``(gray_high, weights)`` for each block of the enumeration."""
        cur = self.table.copy()
        nh = len(self.high)
        for i in range(1 << nh):
            if i:
                cur ^= self.high[(i & -i).bit_length() - 1]
            w = np.bitwise_count(cur).sum(axis=1, dtype=np.int64)
            yield i ^ (i >> 1), w

    def vector(self, gray_high: int, low_index: int) -> int:
        v = self.offset
        for j in bits(low_index):
            v ^= self.basis[j]
        for j in bits(gray_high):
            v ^= self.basis[self.low + j]
        return v


def span_weight_distribution(
    generators: BinaryMatrix,
    *,
    offset: int = 0,
    limit: int = DEFAULT_SPAN_LIMIT,
) -> list[int]:
    """Count vectors of each weight in ``offset + span(generators)``.

    Returns a list of ``n + 1`` exact integer counts.
    """
    basis, _ = echelon(generators.rows)
    if len(basis) > limit:
        raise LimitExceeded(f"span has rank {len(basis)} > limit {limit}")
    n = generators.n
    counts = np.zeros(n + 1, dtype=np.int64)
    for _, w in _SpanTable(basis, n, offset).blocks():
        counts += np.bincount(w, minlength=n + 1)
    return [int(c) for c in counts]


def coset_min_weight(
    particular: int,
    basis: Sequence[int],
    n: int,
    *,
    exclude_zero: bool = True,
    limit: int = 26,
) -> tuple[int, int, np.ndarray]:
    """Minimum-weight member of ``particular + span(basis)``.

    Ties go to the smallest integer value.  With ``exclude_zero`` the zero
    vector is skipped (relevant only for homogeneous cosets).  Returns
    ``(weight, vector, counts)`` where ``counts`` is the full weight
    distribution of the coset, or ``(-1, 0, counts)`` if the only member is
    the excluded zero vector.
    """
    basis = list(basis)
    if len(basis) > limit:
        raise LimitExceeded(f"coset dimension {len(basis)} > limit {limit}")
    st = _SpanTable(basis, n, particular)
    counts = np.zeros(n + 1, dtype=np.int64)
    best_w, best_v = n + 1, 0
    for g, w in st.blocks():
        counts += np.bincount(w, minlength=n + 1)
        if exclude_zero:
            w = np.where(w == 0, n + 1, w)
        lo = int(w.min())
        if lo > best_w or lo > n:
            continue
        for idx in np.flatnonzero(w == lo).tolist():
            v = st.vector(g, idx)
            if lo < best_w or v < best_v:
                best_w, best_v = lo, v
    if best_w > n:
        return -1, 0, counts
    return best_w, best_v, counts


# --------------------------------------------------------------------------
# Text format


def parse_matrix(text: str) -> tuple[BinaryMatrix, int | None]:
    """Parse the ``0``/``1`` row format.

    One row per line, single spaces allowed between entries, ``#`` starts a
    comment.  A blank line separates the odd-weight block (first) from the
    even-weight block; when present, the size of the first block is returned
    as the second element, otherwise ``None``.
    """
    blocks: list[list[str]] = [[]]
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            if blocks[-1]:
                blocks.append([])
            continue
        blocks[-1].append(line)
    blocks = [b for b in blocks if b]
    if len(blocks) > 2:
        raise MatrixFormatError("more than one blank-line separator")
    lines = [ln for b in blocks for ln in b]
    if not lines:
        raise MatrixFormatError("empty matrix")
    for ln in lines:
        if "  " in ln:
            raise MatrixFormatError(f"multiple spaces in row {ln!r}")
    M = BinaryMatrix.from_strings(lines)
    k = len(blocks[0]) if len(blocks) == 2 else None
    return M, k


def format_matrix(M: BinaryMatrix, k: int | None = None) -> str:
    lines = M.to_strings()
    if k:
        lines = lines[:k] + [""] + lines[k:]
    return "\n".join(lines) + "\n"
