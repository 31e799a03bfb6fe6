"""Command-line interface: ``tridistill <subcommand> ...``.

Exit codes: 0 success, 1 domain failure (violations, infeasible system,
unreachable target, failed verification), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analysis, clifford, gf2, planner, search, simulate, triortho
from .planner import sig4


class UsageError(Exception):
    pass


def _read_source(src: str) -> tuple[gf2.BinaryMatrix, int | None]:
    if src == "-":
        return gf2.parse_matrix(sys.stdin.read())
    path = Path(src)
    if path.is_file():
        return gf2.parse_matrix(path.read_text())
    try:
        G = triortho.builtin(src)
    except triortho.UnknownName:
        raise UsageError(f"{src!r} is neither a readable file nor a builtin {triortho.BUILTIN_NAMES}")
    return G.matrix, G.k


def _load(src: str) -> triortho.TriorthogonalMatrix:
    M, k = _read_source(src)
    try:
        return triortho.TriorthogonalMatrix.from_matrix(M, k)
    except triortho.NotTriorthogonal as exc:
        raise DomainFailure(f"not a usable triorthogonal matrix: {exc}")


class DomainFailure(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# --------------------------------------------------------------------------


def cmd_validate(args) -> int:
    M, k = _read_source(args.source)
    rep = triortho.validate(M)
    ok = rep.is_triorthogonal and rep.odd_rows_first and (k is None or len(rep.odd_rows) == k)
    payload = rep.as_dict() | {"m": M.m, "n": M.n, "odd_rows_first": rep.odd_rows_first, "ok": ok}
    lines = [f"{M.m}x{M.n} matrix: {'triorthogonal' if rep.is_triorthogonal else 'NOT triorthogonal'}"]
    lines.append(f"odd rows: {rep.odd_rows}")
    lines.append(f"even rows: {rep.even_rows}")
    if rep.pair_violations:
        lines.append(f"pair violations: {rep.pair_violations}")
    if rep.triple_violations:
        lines.append(f"triple violations: {rep.triple_violations}")
    if not rep.odd_rows_first:
        lines.append("odd-weight rows are not the leading rows")
    if k is not None and len(rep.odd_rows) != k:
        lines.append(f"first block has {k} rows but {len(rep.odd_rows)} rows are odd")
    if rep.zero_columns_in_G0:
        lines.append(f"zero columns in G0: {rep.zero_columns_in_G0}")
    _emit(args, payload, "\n".join(lines))
    return 0 if ok else 1


def cmd_dump(args) -> int:
    try:
        G = triortho.builtin(args.name)
    except triortho.UnknownName:
        raise UsageError(f"unknown builtin {args.name!r}")
    sys.stdout.write(G.to_text())
    return 0


def _series_summary(G, order: int) -> dict:
    ps = analysis.ps_series(G, order)
    q_lead = {}
    for a in range(1, G.k + 1):
        lt = analysis.q_series(G, a, order).leading_term()
        q_lead[a] = None if lt is None else {"power": lt[0], "coefficient": str(lt[1])}
    return {"P_s": [str(c) for c in (ps[i] for i in range(order + 1))], "q_leading": q_lead}


def cmd_analyze(args) -> int:
    G = _load(args.source)
    if G.k == 0:
        raise DomainFailure("matrix has no odd-weight rows; nothing to distill")
    dres = analysis.min_logical(G, budget=args.budget)
    w0 = analysis.enumerator(G.G0)
    cosets = {a: str(analysis.coset_enumerator(G.G0, G.odd_row(a))) for a in range(1, G.k + 1)}
    series = _series_summary(G, args.order)
    try:
        thr = analysis.threshold(G)
    except analysis.NoThreshold:
        thr = None
    points = []
    for p in args.p or []:
        r = analysis.rates(G, p)
        points.append({"p": p, "P_s": r.P_s, "q": r.q_per_qubit, "q_max": r.q_max})
    use = triortho.usefulness_check(G)
    payload = {
        "n": G.n,
        "m": G.m,
        "k": G.k,
        "distance": dres.distance,
        "distance_witness": gf2.vector_to_string(dres.witness, G.n),
        "enumerator_G0": {str(w): c for w, c in w0.terms().items()},
        "enumerator_G0_str": str(w0),
        "coset_enumerators": cosets,
        "series": series,
        "threshold": thr,
        "usefulness": {"g0_rows_ok": use.g0_rows_ok, "no_zero_column_in_G0": use.no_zero_column_in_G0},
        "rates": points,
    }
    lines = [
        f"n = {G.n}, m = {G.m}, k = {G.k}, distance = {dres.distance}",
        f"W_G0(x) = {w0}",
    ]
    for a, s in cosets.items():
        if G.k <= 4 or a == 1:
            lines.append(f"W_G0+f{a}(x) = {s}")
    lead = series["q_leading"].get(1)
    if lead:
        lines.append(f"q_1(p) = {lead['coefficient']} p^{lead['power']} + ...")
    lines.append(f"P_s(p) = {series['P_s'][0]} + ({series['P_s'][1]}) p + ...")
    lines.append(f"threshold = {'none' if thr is None else f'{thr:.4f}'}")
    for pt in points:
        lines.append(f"p = {pt['p']:g}: P_s = {sig4(pt['P_s'])}, q_max = {sig4(pt['q_max'])}")
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_clifford(args) -> int:
    G = _load(args.source)
    if gf2.rank(G.matrix) < G.m:
        G = clifford.independent_rows(G)
    C = clifford.correction(G)
    mode = args.verify
    if mode is None:
        mode = "exhaustive" if G.m <= clifford.EXHAUSTIVE_MAX_ROWS else "sampled"
    verdict = clifford.verify_phase_identity(G, C, mode, seed=args.seed, trials=args.trials)
    counts = clifford.gate_counts(C)
    payload = C.as_dict() | counts | {
        "verify_mode": mode,
        "verified": verdict.ok,
        "checked": verdict.checked,
        "witness": list(verdict.witness) if verdict.witness else None,
    }
    text = C.to_text() + f"s_gates {counts['s_gates']}\ncz_gates {counts['cz_gates']}\n"
    text += f"verify {mode} {'PASS' if verdict.ok else 'FAIL'} ({verdict.checked} checked)\n"
    if verdict.witness:
        text += "witness x = " + "".join(map(str, verdict.witness)) + "\n"
    _emit(args, payload, text)
    return 0 if verdict.ok else 1


def cmd_search(args) -> int:
    try:
        system = search.build_system(args.m, args.k)
    except search.SystemRejected as exc:
        raise UsageError(str(exc))
    sol = search.solve(system)
    if sol is None:
        raise DomainFailure(f"no triorthogonal matrix with m={args.m}, k={args.k}")
    try:
        res = search.min_weight_solution(
            system, args.strategy, budget=args.budget, seed=args.seed, solution=sol
        )
    except search.SystemRejected as exc:
        raise DomainFailure(str(exc))
    G = search.materialize(res.N, args.k)
    summary = {
        "m": args.m,
        "k": args.k,
        "n": G.n,
        "weight": res.weight,
        "strategy": args.strategy,
        "exhaustive": res.exhaustive,
        "budget_exceeded": res.budget_exceeded,
        "nullspace_dimension": sol.dimension,
        "enumerator_G0": str(analysis.enumerator(G.G0)),
    }
    if G.k:
        summary["distance"] = analysis.distance_z(G)
    text = G.to_text()
    if args.out:
        Path(args.out).write_text(text)
        Path(args.out + ".json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if args.json:
        print(json.dumps(summary | {"matrix": G.matrix.to_strings()}, indent=2, sort_keys=True))
    else:
        sys.stdout.write(text)
        sys.stdout.write("# " + ", ".join(f"{k}={v}" for k, v in summary.items()) + "\n")
    return 0


def cmd_simulate(args) -> int:
    G = _load(args.source)
    res = simulate.simulate(G, args.p, args.shots, args.seed, threads=args.threads)
    payload = res.as_dict() | {"p": args.p}
    text = (
        f"shots {res.shots}, accepted {res.accepted}\n"
        f"P_s = {res.P_s_hat:.6g} +- {res.P_s_se:.2g}\n"
        + "".join(f"q_{a} = {q:.4g} +- {se:.2g}\n" for a, (q, se) in enumerate(zip(res.q_hat, res.q_se), 1))
    )
    _emit(args, payload, text)
    return 0


def _library(args) -> list[planner.ProtocolSpec]:
    lib = [] if args.no_builtin else list(planner.standard_library(include_49=True))
    if args.library:
        path = Path(args.library)
        if not path.is_file():
            raise UsageError(f"library file {args.library!r} not found")
        lib += planner.load_library(path.read_text())
    if not lib:
        raise UsageError("empty protocol library")
    return lib


def cmd_plan(args) -> int:
    lib = _library(args)
    try:
        plan = planner.optimize(args.p0, args.target, args.max_rounds, lib)
    except planner.Unreachable as exc:
        if args.json:
            print(json.dumps({"unreachable": True, "message": str(exc)}))
        else:
            print(f"Unreachable: {exc}")
        return 1
    text = f"sequence {plan.label or '(none)'}\ncost {sig4(plan.total_cost)}\n"
    text += f"final error {plan.final_error:.4g} (-log10 = {sig4(plan.achieved_exponent)})\n"
    for lv in plan.levels:
        text += f"  {lv.protocol:>4}: p {lv.p_in:.4g} -> {lv.p_out:.4g}, factor {sig4(lv.factor)}\n"
    _emit(args, plan.as_dict(), text)
    return 0


def _parse_targets(s: str) -> list[float]:
    out: list[float] = []
    for tok in s.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ".." in tok:
            a, b = tok.split("..")
            out += [float(x) for x in range(int(a), int(b) + 1)]
        else:
            out.append(float(tok))
    if not out:
        raise argparse.ArgumentTypeError("no targets given")
    return out


def cmd_table(args) -> int:
    lib = _library(args)
    rows = planner.emit_table(args.p0, args.targets, lib, args.max_rounds)
    if args.json:
        print(
            json.dumps(
                [
                    {
                        "target_exponent": r.target_exponent,
                        "sequence": r.plan.label if r.plan else None,
                        "achieved_exponent": r.plan.achieved_exponent if r.plan else None,
                        "cost": r.plan.total_cost if r.plan else None,
                    }
                    for r in rows
                ],
                indent=2,
            )
        )
    elif args.csv:
        sys.stdout.write(planner.table_csv(rows))
    else:
        sys.stdout.write(planner.table_text(rows))
    return 0 if all(r.reachable for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    parser = argparse.ArgumentParser(prog="tridistill", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check triorthogonality")
    p.add_argument("source", help="matrix file, '-' for stdin, or builtin name")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dump", parents=[common], help="print a builtin matrix")
    p.add_argument("name")
    p.set_defaults(func=cmd_dump)

    p = sub.add_parser("analyze", parents=[common], help="enumerators, distance, rates")
    p.add_argument("source")
    p.add_argument("--p", type=float, action="append", help="input error rate (repeatable)")
    p.add_argument("--order", type=int, default=8, help="series order")
    p.add_argument("--budget", type=int, default=analysis.DEFAULT_DISTANCE_BUDGET)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("clifford", parents=[common], help="Clifford correction and its check")
    p.add_argument("source")
    p.add_argument("--verify", choices=["exhaustive", "sampled"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=clifford.DEFAULT_TRIALS)
    p.set_defaults(func=cmd_clifford)

    p = sub.add_parser("search", parents=[common], help="search for triorthogonal matrices")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--strategy", choices=["exhaustive", "randomized"], default="exhaustive")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the matrix here and a JSON summary to OUT.json")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo check of one round")
    p.add_argument("source")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_simulate)

    for name, func in (("plan", cmd_plan), ("table", cmd_table)):
        p = sub.add_parser(name, parents=[common], help=f"{name} concatenated distillation")
        p.add_argument("--p0", type=float, required=True)
        if name == "plan":
            p.add_argument("--target", type=float, required=True, help="target error rate")
        else:
            p.add_argument("--targets", type=_parse_targets, required=True, help="exponents, e.g. 4,6,12 or 3..30")
            p.add_argument("--csv", action="store_true")
        p.add_argument("--max-rounds", type=int, default=planner.MAX_ROUNDS)
        p.add_argument("--library", help="protocol stanza file")
        p.add_argument("--no-builtin", action="store_true", help="use only the library file")
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, gf2.MatrixFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainFailure, analysis.BudgetExceeded, gf2.LimitExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
