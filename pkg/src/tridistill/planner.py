"""Cost of concatenated distillation and search for the cheapest sequence.

A sequence of protocols is applied to inputs of error ``p0``.  Level ``m``
maps ``p_m -> p_{m+1} = q_m(p_m)`` and costs a factor
``n_m / (k_m * P_s_m(p_m))`` raw inputs per output, so the total cost is
the product of the factors and the final error is the last ``p``.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from . import analysis
from .polynomial import ExactPolynomial
from .triortho import TriorthogonalMatrix, builtin

MAX_ROUNDS = 5


class Unreachable(ValueError):
    pass


@dataclass(frozen=True)
class ProtocolSpec:
    name: str
    n: int
    k: int
    q: Callable[[float], float] = field(repr=False, compare=False)
    P_s: Callable[[float], float] = field(repr=False, compare=False)
    provenance: str = "matrix-derived"
    distance: int | None = None

    def factor(self, p: float) -> float:
        """Raw inputs consumed per output at input error ``p``."""
        return self.n / (self.k * self.P_s(p))


def protocol_from_matrix(G: TriorthogonalMatrix, name: str) -> ProtocolSpec:
    """Bind worst-case ``q`` and ``P_s`` of ``G`` to a protocol."""
    if G.k < 1:
        raise ValueError("protocol needs at least one odd row")
    d = analysis.distance_z(G)
    if d < 2:
        raise ValueError(f"protocol {name!r} has Z-distance 1 and cannot improve states")
    model = analysis.rate_model(G)
    return ProtocolSpec(name, G.n, G.k, model.q_max, model.success_probability, "matrix-derived", d)


def protocol_from_polynomials(name: str, n: int, k: int, q_coeffs: Sequence, ps_coeffs: Sequence) -> ProtocolSpec:
    """A protocol whose rates are given as power series in ``p``."""
    qp = ExactPolynomial(tuple(q_coeffs))
    pp = ExactPolynomial(tuple(ps_coeffs))
    qf = [float(c) for c in qp.coefficients]
    pf = [float(c) for c in pp.coefficients]

    def horner(cs, x):
        acc = 0.0
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    return ProtocolSpec(
        name, n, k, lambda p: horner(qf, p), lambda p: horner(pf, p), "external-config"
    )


def load_library(text: str) -> list[ProtocolSpec]:
    """Parse protocol stanzas.

    Each section is one protocol; ``q`` and ``P_s`` list polynomial
    coefficients in increasing powers of ``p``, separated by spaces or
    commas.  Values may be fractions such as ``35/4``::

        [5]
        n = 10
        k = 2
        q = 0 0 9
        P_s = 1 -10
    """
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp.read_string(text)
    out = []
    for name in cp.sections():
        sec = cp[name]
        try:
            n, k = int(sec["n"]), int(sec["k"])
            q = _coeffs(sec["q"])
            ps = _coeffs(sec["P_s"])
        except KeyError as exc:
            raise ValueError(f"protocol {name!r} is missing {exc}") from None
        out.append(protocol_from_polynomials(name, n, k, q, ps))
    return out


def _coeffs(s: str):
    from fractions import Fraction

    return [Fraction(tok) for tok in s.replace(",", " ").split()]


@lru_cache(maxsize=None)
def standard_library(include_49: bool = True) -> tuple[ProtocolSpec, ...]:
    """``15`` (RM15), ``2``..``40`` (G(k)) and optionally ``49`` (BH49)."""
    lib = [protocol_from_matrix(builtin("RM15"), "15")]
    lib += [protocol_from_matrix(builtin(f"G{k}"), str(k)) for k in range(2, 41, 2)]
    if include_49:
        lib.append(protocol_from_matrix(builtin("BH49"), "49"))
    return tuple(lib)


@dataclass(frozen=True)
class Level:
    protocol: str
    p_in: float
    p_out: float
    factor: float


@dataclass(frozen=True)
class DistillationPlan:
    sequence: tuple[str, ...]
    levels: tuple[Level, ...]
    p0: float
    final_error: float
    total_cost: float
    diverging: bool = False

    @property
    def above_threshold(self) -> bool:
        return bool(self.levels) and self.levels[0].p_out >= self.levels[0].p_in

    @property
    def label(self) -> str:
        return "-".join(self.sequence)

    @property
    def achieved_exponent(self) -> float:
        return -math.log10(self.final_error) if self.final_error > 0 else math.inf

    def as_dict(self) -> dict:
        return {
            "sequence": list(self.sequence),
            "label": self.label,
            "p0": self.p0,
            "final_error": self.final_error,
            "achieved_exponent": self.achieved_exponent,
            "total_cost": self.total_cost,
            "diverging": self.diverging,
            "levels": [vars(lv) for lv in self.levels],
        }


def evaluate_sequence(seq: Sequence[ProtocolSpec], p0: float) -> DistillationPlan:
    """Run the cost recursion along ``seq`` starting from error ``p0``."""
    p, cost = p0, 1.0
    levels = []
    diverging = False
    for proto in seq:
        f = proto.factor(p)
        q = proto.q(p)
        if q >= p:
            diverging = True
        levels.append(Level(proto.name, p, q, f))
        cost *= f
        p = q
    return DistillationPlan(tuple(s.name for s in seq), tuple(levels), p0, p, cost, diverging)


def optimize(
    p0: float,
    eps_target: float,
    max_rounds: int = MAX_ROUNDS,
    library: Iterable[ProtocolSpec] | None = None,
) -> DistillationPlan:
    """Cheapest sequence of at most ``max_rounds`` reaching ``eps_target``.

    Depth-first branch and bound.  Every level multiplies the cost by at
    least ``min n/k``, so a prefix that has not reached the target is cut
    once ``cost * min n/k`` exceeds the incumbent.  Rounds that do not lower
    the error are cut as well: with ``q`` increasing and ``P_s`` decreasing
    in ``p``, dropping such a round never makes the rest worse.  Ties on
    cost go to the shorter sequence, then to the lexicographically smaller
    tuple of names.
    """
    lib = list(standard_library() if library is None else library)
    if not lib:
        raise ValueError("empty protocol library")
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    min_factor = min(pr.n / pr.k for pr in lib)
    best: tuple | None = None  # (cost, len, names)

    def consider(cost: float, names: tuple[str, ...]):
        nonlocal best
        key = (cost, len(names), names)
        if best is None or key < best:
            best = key

    def rec(p: float, cost: float, names: tuple[str, ...]):
        for pr in lib:
            q = pr.q(p)
            if not q < p:
                continue
            c = cost * pr.factor(p)
            if best is not None and c > best[0]:
                continue
            nm = names + (pr.name,)
            if q <= eps_target:
                consider(c, nm)
            elif len(nm) < max_rounds and (best is None or c * min_factor <= best[0]):
                rec(q, c, nm)

    if p0 <= eps_target:
        return evaluate_sequence([], p0)
    rec(p0, 1.0, ())
    if best is None:
        raise Unreachable(f"no sequence of <= {max_rounds} rounds reaches {eps_target:g} from {p0:g}")
    by_name = {pr.name: pr for pr in lib}
    return evaluate_sequence([by_name[nm] for nm in best[2]], p0)


@dataclass(frozen=True)
class TableRow:
    target_exponent: float
    plan: DistillationPlan | None

    @property
    def reachable(self) -> bool:
        return self.plan is not None


def emit_table(
    p0: float,
    targets: Iterable[float],
    library: Iterable[ProtocolSpec] | None = None,
    max_rounds: int = MAX_ROUNDS,
) -> list[TableRow]:
    """One optimized plan per target exponent ``delta`` (target ``10**-delta``)."""
    lib = list(standard_library() if library is None else library)
    rows = []
    for delta in targets:
        try:
            plan = optimize(p0, 10.0 ** (-delta), max_rounds, lib)
        except Unreachable:
            plan = None
        rows.append(TableRow(delta, plan))
    return rows


def _fmt_exp(delta: float) -> str:
    return f"{delta:g}"


def table_csv(rows: Sequence[TableRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["target_exponent", "sequence", "achieved_exponent", "cost"])
    for r in rows:
        if r.plan is None:
            w.writerow([_fmt_exp(r.target_exponent), "Unreachable", "", ""])
        else:
            w.writerow(
                [_fmt_exp(r.target_exponent), r.plan.label, repr(r.plan.achieved_exponent), repr(r.plan.total_cost)]
            )
    return buf.getvalue()


def sig4(x: float) -> str:
    """Four significant digits, the way the cost table prints them."""
    if x == 0 or not math.isfinite(x):
        return str(x)
    digits = 3 - int(math.floor(math.log10(abs(x))))
    if digits <= 0:
        return f"{round(x, digits):.0f}."
    return f"{x:.{digits}f}"


def table_text(rows: Sequence[TableRow]) -> str:
    header = ("-log10 eps", "protocol", "achieved", "C")
    body = []
    for r in rows:
        if r.plan is None:
            body.append((_fmt_exp(r.target_exponent), "Unreachable", "-", "-"))
        else:
            body.append(
                (_fmt_exp(r.target_exponent), r.plan.label, sig4(r.plan.achieved_exponent), sig4(r.plan.total_cost))
            )
    widths = [max(len(x[i]) for x in [header] + body) for i in range(4)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in body]
    return "\n".join(lines) + "\n"


def scaling_exponent(protocol: ProtocolSpec) -> float:
    """``log(n/k) / log(d)``."""
    if protocol.distance is None or protocol.distance < 2:
        raise ValueError("scaling exponent needs a known distance d >= 2")
    return math.log(protocol.n / protocol.k) / math.log(protocol.distance)
