"""Monte Carlo model of one distillation round under i.i.d. Z errors.

Each input carries a Z error with probability ``p``.  The round accepts
when the error ``f`` has trivial syndrome against G0, and output ``a`` is
then flipped iff ``(f^a, f) = 1``.  Clifford operations are taken to be
perfect; there are no X or measurement errors in this model.

Randomness is counter based: shot ``i`` is drawn from a Philox stream keyed
by ``(seed, i // BLOCK)`` at offset ``i % BLOCK``.  Any split of a shot
range into sub-ranges therefore reproduces the serial counts exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from .triortho import TriorthogonalMatrix

BLOCK = 1 << 16


@dataclass(frozen=True)
class SimulationResult:
    shots: int
    accepted: int
    errors: tuple[int, ...]
    """Per output qubit, accepted shots whose output was flipped."""
    seed: int
    start: int = 0

    @property
    def P_s_hat(self) -> float:
        return self.accepted / self.shots

    @property
    def P_s_se(self) -> float:
        p = self.P_s_hat
        return math.sqrt(p * (1 - p) / self.shots)

    @property
    def q_hat(self) -> list[float]:
        if not self.accepted:
            return [float("nan")] * len(self.errors)
        return [e / self.accepted for e in self.errors]

    @property
    def q_se(self) -> list[float]:
        if not self.accepted:
            return [float("nan")] * len(self.errors)
        return [math.sqrt(q * (1 - q) / self.accepted) for q in self.q_hat]

    def merge(self, other: "SimulationResult") -> "SimulationResult":
        if other.seed != self.seed or len(other.errors) != len(self.errors):
            raise ValueError("cannot merge results from different runs")
        return SimulationResult(
            self.shots + other.shots,
            self.accepted + other.accepted,
            tuple(a + b for a, b in zip(self.errors, other.errors)),
            self.seed,
            min(self.start, other.start),
        )

    def as_dict(self) -> dict:
        d = asdict(self)
        d["errors"] = list(self.errors)
        d.update(
            P_s_hat=self.P_s_hat,
            P_s_se=self.P_s_se,
            q_hat=self.q_hat,
            q_se=self.q_se,
        )
        return d


def block_generator(seed: int, block: int) -> np.random.Generator:
    key = (seed & 0xFFFFFFFFFFFFFFFF) | (block << 64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_errors(seed: int, block: int, n: int, p: float) -> np.ndarray:
    """The ``BLOCK x n`` Bernoulli(p) error pattern of one block."""
    return block_generator(seed, block).random((BLOCK, n)) < p


def _block_counts(G: TriorthogonalMatrix, p: float, seed: int, block: int, lo: int, hi: int):
    E = sample_errors(seed, block, G.n, p)[lo:hi].astype(np.float32)
    checks = np.asarray(G.matrix.to_array(), dtype=np.float32).T
    parity = (E @ checks).astype(np.int64) & 1
    ok = ~parity[:, G.k :].any(axis=1)
    flips = parity[ok, : G.k].sum(axis=0)
    return int(ok.sum()), [int(v) for v in flips]


def simulate(
    G: TriorthogonalMatrix,
    p: float,
    shots: int,
    seed: int,
    *,
    start: int = 0,
    threads: int = 1,
) -> SimulationResult:
    """Simulate shots ``start .. start + shots - 1``."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if shots < 1:
        raise ValueError("shots must be positive")
    stop = start + shots
    jobs = []
    for block in range(start // BLOCK, (stop - 1) // BLOCK + 1):
        base = block * BLOCK
        jobs.append((block, max(start, base) - base, min(stop, base + BLOCK) - base))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda j: _block_counts(G, p, seed, *j), jobs))
    else:
        parts = [_block_counts(G, p, seed, *j) for j in jobs]
    accepted = sum(a for a, _ in parts)
    errors = [sum(e[i] for _, e in parts) for i in range(G.k)]
    return SimulationResult(shots, accepted, tuple(errors), seed, start)


@dataclass(frozen=True)
class ResourceProfile:
    variant: str
    extra_qubits: int
    pauli_measurements: int


def resources(G: TriorthogonalMatrix, variant: Literal["main", "appendixA"] = "main") -> ResourceProfile:
    """Qubit and measurement counts of the two equivalent subroutines.

    ``main`` encodes ``|+>^k`` on ``n`` fresh qubits and measures the ``n``
    outputs plus the ``m - k`` X stabilizers; ``appendixA`` works in place
    and measures a basis of ``G^⊥`` (Z type) and of ``G0`` (X type).
    """
    n, m, k = G.n, G.m, G.k
    if variant == "main":
        return ResourceProfile(variant, n, n + m - k)
    if variant == "appendixA":
        return ResourceProfile(variant, 0, n - k)
    raise ValueError(f"unknown variant {variant!r}")
