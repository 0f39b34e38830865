"""Command-line front end.

Exit codes: 0 success, 1 a checked property failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from . import bounds, directional, oracle, pkn
from ._validation import DomainError, InstanceTooLarge, as_rational, fmt_rational
from .formula import AND, OR, FormulaSpec

SCHEMA = 1


@dataclass
class RunConfig:
    subcommand: str
    k: Optional[int] = None
    n: Optional[int] = None
    depth: int = 0
    d_max: int = 5
    trials: int = 10_000
    seed: int = 0
    mode: str = "exact"
    fmt: str = "csv"
    out: Optional[str] = None


class UsageError(Exception):
    pass


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows: List[List[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps({"schema": SCHEMA, **obj}, indent=2, sort_keys=False) + "\n"


def _pkn_row(k: int, n: int, mode: str) -> dict:
    pv = pkn.p(k, n)
    row = {"k": k, "n": n, "P": str(pv)}
    if pv.is_infinite:
        row.update(P_float="inf", lower_bound="", equality="")
        return row
    approx = pkn.p_float(k, n) if mode == "float" and k < n else float(pv)
    low = pv.lower_bound()
    row.update(P_float=repr(approx), lower_bound=fmt_rational(low), equality=str(pv.value == low).lower())
    return row


def cmd_pkn(args, cfg: RunConfig) -> int:
    if args.n_max is not None:
        if args.n_max < 1:
            raise UsageError("--n-max must be >= 1")
        cells = [(k, n) for n in range(1, args.n_max + 1) for k in range(1, n + 1)]
    else:
        if cfg.k is None or cfg.n is None:
            raise UsageError("give --k and --n, or --n-max")
        if cfg.n < 1 or not 0 <= cfg.k <= cfg.n:
            raise UsageError(f"need 0 <= k <= n and n >= 1, got k={cfg.k}, n={cfg.n}")
        cells = [(cfg.k, cfg.n)]
    rows = [_pkn_row(k, n, cfg.mode) for k, n in cells]
    header = ["k", "n", "P", "P_float", "lower_bound", "equality"]
    if cfg.fmt == "json":
        _emit(_json({"command": "pkn", "mode": cfg.mode, "rows": rows}), cfg.out)
    else:
        _emit(_csv([header] + [[str(r[h]) for h in header] for r in rows]), cfg.out)
    return 0


def _formula_from(args, cfg: RunConfig) -> FormulaSpec:
    n = cfg.n if cfg.n is not None else (2 if args.andor else 3)
    if args.andor:
        return FormulaSpec.alternating(n, cfg.depth, args.root)
    k = cfg.k if cfg.k is not None else 2
    return FormulaSpec.constant(k, n, cfg.depth)


def cmd_bounds(args, cfg: RunConfig) -> int:
    exact_p = not args.generic_p
    extras = {}
    if args.andor:
        n = cfg.n if cfg.n is not None else 2
        rows = bounds.report_andor(n, cfg.d_max, args.root)
        first, second = bounds.closed_form_thm1(n)
        extras["lambda_two_levels"] = rows[0].lambda_upper.to_json()
        extras["closed_form"] = [first, second]
    else:
        if cfg.k is None or cfg.n is None or not 1 < cfg.k < cfg.n:
            raise UsageError("bounds needs 1 < k < n (or --andor)")
        rows = bounds.report_bounds(cfg.k, cfg.n, cfg.d_max)
        extras["lambda_upper_closed_form"] = bounds.closed_form_thm2(cfg.k, cfg.n)
        if args.thm3_check:
            chk = bounds.closed_form_thm3(cfg.k, cfg.n)
            extras["thm3"] = {"printed": chk.printed, "matrix_derived": chk.matrix_derived,
                              "consistent": chk.consistent}
    float_cols = cfg.mode == "float"
    if cfg.fmt == "json":
        out = []
        for r in rows:
            low = r.lower(exact_p)
            out.append({
                "d": r.d,
                "lower": low.to_json(),
                "scalar_lower": fmt_rational(r.scalar_lower(exact_p)),
                "upper": {"phi": fmt_rational(r.upper.c1), "psi": fmt_rational(r.upper.c0)},
                "lambda_lower": r.lambda_lower(exact_p).to_json(),
                "lambda_upper": r.lambda_upper.to_json(),
            })
        _emit(_json({"command": "bounds", "exact_p": exact_p, "rows": out, **extras}), cfg.out)
        return 0
    header = list(bounds.CSV_HEADER)
    if float_cols:
        header += [h + "_float" for h in header[1:6]]
    lines = [header] + [r.csv_row(exact_p, with_float=float_cols) for r in rows]
    text = _csv(lines)
    for key, val in extras.items():
        text += f"# {key}: {json.dumps(val)}\n"
    _emit(text, cfg.out)
    return 0


def cmd_simulate(args, cfg: RunConfig) -> int:
    if cfg.trials < 1:
        raise UsageError("--trials must be >= 1")
    f = _formula_from(args, cfg)
    report = directional.monte_carlo(f, cfg.trials, cfg.seed, args.condition)
    _emit(json.dumps({**report.to_json(), "command": "simulate"}, indent=2) + "\n", cfg.out)
    return 0 if report.within(4.0) else 1


def _verify_lines(args, cfg: RunConfig):
    """Yield (status, name, detail) with status in PASS / FAIL / WARN."""
    n_max = args.n_max
    for name, res in pkn.verify_pkn_properties(max(n_max, 2)).items():
        detail = f"checked {res.checked}" + (f"; e.g. {res.counterexamples[0]}" if res.counterexamples else "")
        yield ("PASS" if res.passed else "FAIL"), f"pkn.{name}", detail

    bad = []
    for n in range(3, n_max + 1):
        for k in range(2, n):
            if not bounds.gamma_exact(k, n) >= bounds.gamma_generic(k, n):
                bad.append(f"gamma_exact({k},{n}) does not dominate")
            up = bounds.largest_eigenvalue(directional.delta_matrix(k, n))
            for which in (bounds.gamma_generic, bounds.gamma_exact):
                if bounds.largest_eigenvalue(which(k, n)) > up:
                    bad.append(f"{which.__name__}({k},{n}) rate exceeds the upper rate")
            if abs(bounds.closed_form_thm2(k, n) - up.lam) > 1e-9:
                bad.append(f"upper closed form mismatch at ({k},{n})")
    for n in range(2, n_max + 1):
        if directional.delta_matrix(n, n) != bounds.gamma_exact(n, n) or \
                directional.delta_matrix(1, n) != bounds.gamma_exact(1, n):
            bad.append(f"AND/OR matrices differ at n={n}")
        _, _, lam = bounds.andor_product(n)
        first, second = bounds.closed_form_thm1(n)
        if abs(first - second) > 1e-9 * first or abs(first - lam.lam) > 1e-9 * first:
            bad.append(f"AND-OR closed forms disagree at n={n}")
    yield ("FAIL" if bad else "PASS"), "bounds.invariants", "; ".join(bad[:3]) or f"n <= {n_max}"

    if args.thm3:
        for n in range(3, max(n_max, 3) + 1):
            for k in range(2, n):
                chk = bounds.closed_form_thm3(k, n)
                if not chk.consistent:
                    yield "WARN", f"bounds.thm3({k},{n})", \
                        f"printed={chk.printed:.6f} matrix_derived={chk.matrix_derived:.6f}"

    if args.with_oracle:
        lim = min(n_max, oracle.MAX_SLICE)
        mism = []
        for n in range(1, lim + 1):
            for k in range(n + 1):
                for eta in (0, Fraction(1, 4), Fraction(1, 2), 1, 2):
                    if pkn.p_eta(k, n, eta) != oracle.optimal_tree_over_slice(k, n, eta):
                        mism.append(f"({k},{n},{eta})")
        yield ("FAIL" if mism else "PASS"), "oracle.slice_equivalence", ", ".join(mism[:5]) or f"n <= {lim}"

        mism = []
        for f in _small_formulae():
            if oracle.directional_exact_small(f) != tuple(directional.exact_cost(f).as_pair()):
                mism.append(str(f))
        yield ("FAIL" if mism else "PASS"), "oracle.directional_recurrence", ", ".join(mism) or "d <= 2, n <= 3"

        for cost in (oracle.UNIT, oracle.CostModel(c0=2, c1=1)):
            for n in range(3, lim + 1):
                for k in range(2, n):
                    rep = oracle.check_shrink_inequality(k, n, cost)
                    tag = f"oracle.shrink({k},{n};c0={cost.c0},c1={cost.c1})"
                    if not rep.passed_marginal:
                        yield "FAIL", tag, f"lhs={rep.lhs} < marginal rhs={rep.rhs_marginal}"
                    elif not rep.passed:
                        yield "WARN", tag, (f"uniform-marginal rhs={rep.rhs_average} exceeds lhs={rep.lhs}; "
                                            f"gate-marginal rhs={rep.rhs_marginal} holds")


def _small_formulae():
    for d in range(3):
        for n in (2, 3):
            for k in range(1, n + 1):
                yield FormulaSpec.constant(k, n, d)
            for root in (AND, OR):
                yield FormulaSpec.alternating(n, d, root)


def cmd_verify(args, cfg: RunConfig) -> int:
    failed = False
    lines = []
    for status, name, detail in _verify_lines(args, cfg):
        failed |= status == "FAIL"
        lines.append(f"{status} {name}: {detail}")
    _emit("\n".join(lines) + "\n", cfg.out)
    return 1 if failed else 0


def _parse_formula(text: str) -> FormulaSpec:
    """``k,n,d`` for a threshold tree, ``and,n,d`` / ``or,n,d`` for an alternating one."""
    parts = [p.strip().lower() for p in text.split(",")]
    if len(parts) != 3:
        raise UsageError(f"--formula expects three comma-separated fields, got {text!r}")
    try:
        if parts[0] in (AND, OR):
            return FormulaSpec.alternating(int(parts[1]), int(parts[2]), parts[0])
        return FormulaSpec.constant(int(parts[0]), int(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_oracle(args, cfg: RunConfig) -> int:
    f = _parse_formula(args.formula)
    if args.dist == "reluctant":
        dist = oracle.Reluctant()
    else:
        if args.ones is None:
            raise UsageError("--dist slice needs --ones")
        dist = oracle.SliceUniform(args.ones)
    cost = oracle.CostModel(c0=as_rational(args.c0, "c0"), c1=as_rational(args.c1, "c1"))
    res = oracle.optimal_expected_cost(f, dist, cost)
    payload = {"formula": str(f), "dist": args.dist, "c0": fmt_rational(cost.c0), "c1": fmt_rational(cost.c1),
               **res.to_json()}
    if cfg.fmt == "csv":
        header = ["formula", "dist", "c0", "c1", "value", "first_query", "states_explored"]
        _emit(_csv([header, [str(payload[h]) for h in header]]), cfg.out)
    else:
        _emit(_json({"command": "oracle", **payload}), cfg.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdt-threshold", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, fmt="csv"):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--mode", choices=("exact", "float"), default="exact")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=fmt)
        p.add_argument("--out")

    p = sub.add_parser("pkn", help="P(k, n) table")
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--n-max", type=int)
    common(p)
    p.set_defaults(func=cmd_pkn)

    p = sub.add_parser("bounds", help="lower/upper cost pairs and growth rates")
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--dmax", dest="d_max", type=int, default=5)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--exact-p", action="store_true", default=True)
    grp.add_argument("--generic-p", action="store_true")
    p.add_argument("--andor", action="store_true")
    p.add_argument("--root", choices=(AND, OR), default=AND)
    p.add_argument("--thm3-check", action="store_true")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="Monte Carlo run of the directional algorithm")
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--condition", type=int, choices=(0, 1))
    p.add_argument("--andor", action="store_true")
    p.add_argument("--root", choices=(AND, OR), default=AND)
    common(p, fmt="json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the property suites")
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--with-oracle", action="store_true")
    p.add_argument("--thm3", action="store_true")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force optimal expected cost")
    p.add_argument("--formula", required=True, help="'k,n,d' or 'and,n,d' / 'or,n,d'")
    p.add_argument("--dist", choices=("reluctant", "slice"), default="reluctant")
    p.add_argument("--ones", type=int, help="number of ones for --dist slice")
    p.add_argument("--c0", default="1")
    p.add_argument("--c1", default="1")
    common(p, fmt="json")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = args.seed
    if os.environ.get("RDT_SEED"):
        try:
            seed = int(os.environ["RDT_SEED"])
        except ValueError:
            parser.error("RDT_SEED must be an integer")
    cfg = RunConfig(
        subcommand=args.subcommand,
        k=getattr(args, "k", None),
        n=getattr(args, "n", None),
        depth=getattr(args, "depth", 0),
        d_max=getattr(args, "d_max", 5),
        trials=getattr(args, "trials", 1),
        seed=seed,
        mode=args.mode,
        fmt=args.fmt,
        out=args.out,
    )
    try:
        return args.func(args, cfg)
    except (UsageError, DomainError, InstanceTooLarge) as exc:
        print(f"{parser.prog} {args.subcommand}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
