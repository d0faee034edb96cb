"""Command-line entry point: ``python -m stabedp <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import edp, search
from .encoder import EncoderParams, ProtocolSpec
from .gf import enumerate_self_orthogonal, selforth_count, sp_order, standard_hyperbolic_bases

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def load_spec(path: str) -> ProtocolSpec:
    """A spec file holds one ProtocolSpec JSON object, or search records (first one wins)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    for line in text.splitlines() if "\n" in text.strip() else [text]:
        if not line.strip():
            continue
        rec = json.loads(line)
        if "spec" in rec:
            return ProtocolSpec.from_json(rec["spec"])
        return ProtocolSpec.from_dict(rec)
    raise UsageError(f"{path} holds no protocol")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _grid(args) -> list[float]:
    if args.fidelity is not None and args.f_min is None:
        return [args.fidelity]
    lo = args.f_min if args.f_min is not None else 0.5
    hi = args.f_max if args.f_max is not None else 1.0
    if args.f_step <= 0 or hi < lo:
        raise UsageError("need f-min <= f-max and f-step > 0")
    return edp.fidelity_grid(lo, hi, args.f_step)


# -- subcommands -----------------------------------------------------------------------

def cmd_count(args) -> int:
    n, k, p = args.n, args.k, args.p
    stab = selforth_count(n, k, p)
    classes = sp_order(k, p)
    total, red = search.candidate_count(n, k, p)
    rows = [("self-orthogonal stabilizers", stab), ("classes per stabilizer", classes),
            ("candidate protocols", total), ("reduction factor", red)]
    if args.exhaustive:
        rows.append(("stabilizers (enumerated)", sum(1 for _ in enumerate_self_orthogonal(n, k, p))))
        rows.append(("classes (enumerated)", len(standard_hyperbolic_bases(k, p)) if k else 1))
    width = max(len(r[0]) for r in rows)
    _emit("".join(f"{name:<{width}}  {val}\n" for name, val in rows), args.out)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    total, _ = search.candidate_count(args.n, args.k, args.p)
    if total > args.budget:
        print(f"{total} candidates exceed the budget of {args.budget}", file=sys.stderr)
        return EXIT_BUDGET
    lines = []
    for C in enumerate_self_orthogonal(args.n, args.k, args.p):
        for b in range(len(standard_hyperbolic_bases(args.k, args.p))):
            lines.append(search.class_spec(C, b, args.k).to_json())
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def verify_spec(spec: ProtocolSpec, seed: int, inputs: int = 3) -> list[tuple[str, bool]]:
    from . import oracle

    checks: list[tuple[str, bool]] = []
    params = oracle.resolved(EncoderParams.for_spec(spec))
    U = oracle.build_encoder(params)
    S = spec.stabilizer
    checks.append(("encoder unitary", oracle.is_unitary(U)))
    checks.append(("X/Z conjugation law", not oracle.conjugation_defects(params, U)))
    checks.append(("Clifford membership", oracle.is_clifford(U, spec.n, spec.p)))
    ok = all(oracle.verify_encoded_bell(params, (0,) * S.r, w[: S.k], w[S.k:])
             for w in itertools.product(range(spec.p), repeat=2 * S.k))
    checks.append(("encoded Bell states at e=0", ok))
    rng = np.random.default_rng(seed)
    good = True
    for _ in range(inputs):
        P = edp.BellDiagonal.normalized(spec.p, spec.n, rng.random(spec.p ** (2 * spec.n)))
        fast = edp.run_protocol(P, spec)
        dense = oracle.run_protocol_dense(P, spec, params)
        for a, b in zip(fast, dense):
            good &= abs(a.accept_prob - b.accept_prob) <= 1e-9
            if a.P_out is not None and b.P_out is not None:
                good &= a.P_out.allclose(b.P_out, 1e-9)
            else:
                good &= a.P_out is None and b.P_out is None
    checks.append(("dense protocol matches fast path", bool(good)))
    return checks


def cmd_verify(args) -> int:
    try:
        spec = load_spec(args.spec)
    except (ValueError, KeyError) as exc:
        print(f"FAIL  spec rejected: {exc}")
        return EXIT_FAIL
    try:
        checks = verify_spec(spec, args.seed)
    except ValueError as exc:
        print(f"FAIL  {exc}")
        return EXIT_FAIL
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_FAIL


def cmd_simulate(args) -> int:
    spec = load_spec(args.spec)
    F = args.fidelity if args.fidelity is not None else 0.85
    P = edp.werner_input(F, spec.n, spec.p)
    lines = [f"F={F!r}"]
    for br in edp.run_protocol(P, spec):
        if br.degenerate:
            lines.append(f"s={list(br.syndrome_diff)} accept=0 (degenerate)")
            continue
        lines.append(f"s={list(br.syndrome_diff)} accept={br.accept_prob!r} "
                     f"fidelity={br.P_out.fidelity!r} entropy_bits={br.P_out.entropy_bits()!r}")
    rows = edp.yield_table(spec, F, args.rounds)
    best = edp.best_point(rows)
    lines.append(f"best yield {best.yield_!r} after {best.rounds} rounds")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_curve(args) -> int:
    spec = load_spec(args.spec)
    points = []
    for F in _grid(args):
        rows = edp.yield_table(spec, F, args.rounds)
        points.extend([edp.best_point(rows)] if args.best_only else rows)
    _emit(edp.curve_csv(points), args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    F_star = args.fidelity if args.fidelity is not None else 0.85
    grid = _grid(args) if args.f_min is not None else [F_star]
    if F_star not in grid:
        grid = sorted(set(grid) | {F_star})
    cfg = search.SearchConfig(n=args.n, k=args.k, p=args.p, F_eval=tuple(grid), F_star=F_star,
                              r_max=args.rounds, objective=args.objective, top=args.top,
                              workers=args.workers, budget=args.budget, symmetry=args.symmetry,
                              checkpoint=args.checkpoint)
    try:
        result = search.search(cfg)
    except search.BudgetExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BUDGET
    _emit(search.results_text(result), args.out)
    print(search.summary_table(result), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def cmd_compare(args) -> int:
    if not args.spec:
        raise UsageError("compare needs at least one --spec")
    specs = [(Path(s).stem, load_spec(s)) for s in args.spec]
    if len({sp.p for _, sp in specs}) > 1:
        raise UsageError("protocols must share p")
    grid = _grid(args)
    lines = ["F," + ",".join(f"yield_{name}" for name, _ in specs)]
    for F in grid:
        ys = [edp.best_point(edp.yield_table(sp, F, args.rounds)).yield_ for _, sp in specs]
        lines.append(",".join([repr(F)] + [repr(y) for y in ys]))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-n", type=int, default=4)
    common.add_argument("-k", type=int, default=2)
    common.add_argument("-p", type=int, default=2)
    common.add_argument("--fidelity", type=float)
    common.add_argument("--f-min", type=float)
    common.add_argument("--f-max", type=float)
    common.add_argument("--f-step", type=float, default=0.05)
    common.add_argument("--rounds", type=int, default=8, help="maximum number of rounds r_max")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--top", type=int, default=100)
    common.add_argument("--out")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="stabedp", description="Stabilizer EDP enumeration and search.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="counting table")
    p.add_argument("--exhaustive", action="store_true", help="also count by enumeration")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("enumerate", parents=[common], help="emit every candidate spec")
    p.add_argument("--budget", type=int, default=100_000)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", parents=[common], help="dense checks of one spec")
    p.add_argument("--spec", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="one Werner run of a spec")
    p.add_argument("--spec", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("curve", parents=[common], help="yield rows over a fidelity grid")
    p.add_argument("--spec", required=True)
    p.add_argument("--best-only", action="store_true", help="one row per F at the best r")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("search", parents=[common], help="exhaustive search")
    p.add_argument("--objective", choices=search.OBJECTIVES, default="yield_at_F")
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--symmetry", action="store_true", help="evaluate one stabilizer per orbit")
    p.add_argument("--checkpoint", help="append-only progress log for resuming")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("compare", parents=[common], help="yield columns for several specs")
    p.add_argument("--spec", action="append", default=[])
    p.set_defaults(func=cmd_compare)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
