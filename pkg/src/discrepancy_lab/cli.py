"""Command-line entry point: ``discrepancy-lab <command> [flags]``.

Exit codes: 0 ok, 1 a checked invariant failed, 2 usage or domain error,
3 work budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

from . import acceptance, bmo, haar, norms, riesz
from .discrepancy import eval_discrepancy, exact_mean
from .dyadic import DigitString, Dyadic, render
from .errors import BudgetError, DiscrepancyLabError
from .pointset import PointSet, generate_vdc, general_n_set, load_points, save_points

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

SWEEP_COLUMNS = ["n", "N", "mean", "linf", "linf/n", "l2", "l2/sqrt(n)",
                 "exp2_proxy/sqrt(n)", "bmo_global/sqrt(n)"]


class UsageError(Exception):
    pass


def parse_n(text: str) -> list[int]:
    """``"6"`` or an inclusive range ``"4..10"``."""
    try:
        if ".." in text:
            lo, hi = (int(t) for t in text.split("..", 1))
            if hi < lo:
                raise UsageError(f"empty range {text!r}")
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise UsageError(f"--n expects an integer or a range like 4..10, got {text!r}") from None


def parse_sigma(text: str, n: int, seed: int = 0) -> DigitString:
    """``zeros``, ``balanced``, ``random``, ``random:<seed>`` or an explicit bit string."""
    if text == "zeros":
        return DigitString.zeros(n)
    if text == "balanced":
        return DigitString.balanced(n)
    if text == "random":
        return DigitString.random(n, seed)
    if text.startswith("random:"):
        try:
            return DigitString.random(n, int(text[7:]))
        except ValueError:
            raise UsageError(f"bad random seed in {text!r}") from None
    if set(text) <= {"0", "1"} and len(text) == n:
        return DigitString.from_str(text)
    raise UsageError(f"--sigma {text!r} is not zeros, balanced, random[:seed] or a {n}-digit bit string")


def parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def parse_pgrid(text: str) -> list[float]:
    return [int(p) if float(p).is_integer() else p for p in parse_floats(text)]


def parse_coordinate(text: str) -> Dyadic:
    if "^" in text:
        return Dyadic.parse(text, strict=False)
    try:
        return Dyadic.coerce(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot read coordinate {text!r}") from None


def _point_set(args, n: int) -> PointSet:
    if getattr(args, "points", None):
        return load_points(args.points)
    if args.n is None:
        raise UsageError("give --n or --points")
    sigma = parse_sigma(args.sigma, n, args.seed)
    if getattr(args, "count", None):
        return general_n_set(n, sigma, args.count)
    return generate_vdc(n, sigma)


def _single_n(args) -> int:
    if args.n is None:
        return 0
    ns = parse_n(args.n)
    if len(ns) != 1:
        raise UsageError("this command takes a single --n")
    return ns[0]


class _Output:
    """Text sink for ``--out`` (a file) or standard output."""

    def __init__(self, path: str | None):
        self.path = path
        self.buf = io.StringIO()

    def write(self, text: str) -> None:
        self.buf.write(text)

    def close(self) -> None:
        text = self.buf.getvalue()
        if self.path and self.path != "-":
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


# -- commands --------------------------------------------------------------------

def cmd_gen(args, out: _Output) -> int:
    save_points(_point_set(args, _single_n(args)), out)
    return EXIT_OK


def cmd_eval(args, out: _Output) -> int:
    ps = _point_set(args, _single_n(args))
    rows = []
    for text in args.x:
        parts = text.split(",")
        if len(parts) != 2:
            raise UsageError(f"a point is 'x1,x2', got {text!r}")
        x = tuple(parse_coordinate(p) for p in parts)
        d = eval_discrepancy(ps, x)
        rows.append({"x1": str(x[0]), "x2": str(x[1]), "count": d.count,
                     "D": str(d.value), "D_float": float(d.value)})
    _emit(rows, args.format, out)
    return EXIT_OK


def cmd_mean(args, out: _Output) -> int:
    out.write(f"{exact_mean(_point_set(args, _single_n(args)))}\n")
    return EXIT_OK


def cmd_haar_scan(args, out: _Output) -> int:
    ps = _point_set(args, _single_n(args))
    depth = args.depth if args.depth is not None else 2 * ps.n
    shapes = haar.shapes_up_to(depth)
    mode = "sampled" if args.samples else "exhaustive"
    scan = haar.scan_coeffs(ps, shapes, mode, count=args.samples, seed=args.seed, budget=args.budget)
    if args.format == "csv":
        haar.write_scan_csv(scan.records(), out)
    else:
        agg = scan.aggregate()
        out.write(json.dumps({
            "N": ps.N, "depth": depth, "mode": mode, "count": agg.count,
            "max_abs": render(agg.max_abs), "scaled_max": render(agg.scaled_max),
            "argmax": None if agg.argmax is None else str(agg.argmax),
            # bucket b counts |N c_R| in [2^b, 2^(b+1)); exact zeros are listed apart
            "histogram": {("zero" if k is None else str(k)): v
                          for k, v in sorted(agg.histogram.items(), key=lambda kv: (kv[0] is not None, kv[0] or 0))},
        }, indent=2) + "\n")
    return EXIT_OK


def cmd_norms(args, out: _Output) -> int:
    ps = _point_set(args, _single_n(args))
    rep = norms.norm_report(ps, args.pgrid, args.alpha, orlicz=args.orlicz,
                            budget=args.budget, seed=args.seed)
    out.write(rep.to_json() + "\n")
    return EXIT_OK


def cmd_bmo(args, out: _Output) -> int:
    ps = _point_set(args, _single_n(args))
    depth = args.depth if args.depth is not None else 2 * ps.n
    rep = bmo.bmo_estimate(ps, depth=depth)
    out.write(rep.to_json(bitmap=args.bitmap) + "\n")
    return EXIT_OK


def cmd_certify(args, out: _Output) -> int:
    ps = _point_set(args, _single_n(args))
    if args.spacings:
        rows = riesz.sweep_spacing(ps, [int(a) for a in args.spacings])
        _emit(rows, args.format, out, ["a", "g", "pairing", "first_order", "higher_orders", "dominates"])
        return EXIT_OK
    run = riesz.riesz_run(ps, args.a, budget=args.budget)
    certs = [run.certificate(alpha).as_dict() for alpha in args.alpha]
    out.write(json.dumps(certs if len(certs) > 1 else certs[0], indent=2) + "\n")
    return EXIT_OK


def sweep_rows(ns, sigma_text: str, alphas, a: int = 3, seed: int = 0,
               budget: int | None = None) -> tuple[list[str], list[dict]]:
    """One row per ``n``; cells over budget are left empty."""
    riesz_cols = {alpha: (f"riesz_lower/n^{{1-1/{alpha:g}}}" if len(alphas) > 1
                          else "riesz_lower/n^{1-1/alpha}") for alpha in alphas}
    columns = SWEEP_COLUMNS + list(riesz_cols.values())
    rows = []
    for n in ns:
        ps = generate_vdc(n, parse_sigma(sigma_text, n, seed))
        row = {"n": n, "N": ps.N, "mean": render(exact_mean(ps))}
        root = math.sqrt(n)
        try:
            linf = norms.linf_norm(ps, budget)
            row["linf"] = render(linf)
            row["linf/n"] = _f(float(linf) / n)
            l2 = norms.lp_norm(ps, 2, budget=budget).value
            row["l2"] = _f(l2)
            row["l2/sqrt(n)"] = _f(l2 / root)
            row["exp2_proxy/sqrt(n)"] = _f(norms.exp_proxy(ps, 2.0, budget=budget) / root)
        except BudgetError:
            pass
        row["bmo_global/sqrt(n)"] = _f(math.sqrt(bmo.global_square_sum(ps, 2 * n)) / root)
        certifiable = [alpha for alpha in alphas if alpha >= 2]
        if certifiable:
            try:
                run = riesz.riesz_run(ps, a, budget=budget)
                for alpha in certifiable:
                    row[riesz_cols[alpha]] = _f(riesz.lower_bound_ratio(run.certificate(alpha), n))
            except BudgetError:
                pass
        rows.append(row)
    return columns, rows


def cmd_sweep(args, out: _Output) -> int:
    if args.n is None:
        raise UsageError("sweep needs --n")
    columns, rows = sweep_rows(parse_n(args.n), args.sigma, args.alpha, args.a, args.seed, args.budget)
    _emit(rows, args.format, out, columns)
    return EXIT_OK


def cmd_check(args, out: _Output) -> int:
    wanted = set(args.only) if args.only else None
    failed = 0
    for num, name, fn in acceptance.CRITERIA:
        if wanted is not None and num not in wanted:
            continue
        res = acceptance.run_criterion(num)
        out.write(res.line() + "\n")
        failed += not res.passed
    return EXIT_INVARIANT if failed else EXIT_OK


def _f(x: float) -> str:
    return repr(float(x)) if math.isfinite(x) else str(x)


def _emit(rows: list[dict], fmt: str, out: _Output, columns: list[str] | None = None) -> None:
    columns = columns or (list(rows[0]) if rows else [])
    if fmt == "csv":
        w = csv.DictWriter(out, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({c: row.get(c, "") for c in columns})
    else:
        out.write(json.dumps([{c: row.get(c) for c in columns} for row in rows], indent=2) + "\n")


COMMANDS = {
    "gen": cmd_gen, "eval": cmd_eval, "mean": cmd_mean, "haar-scan": cmd_haar_scan,
    "norms": cmd_norms, "bmo": cmd_bmo, "certify": cmd_certify, "sweep": cmd_sweep,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", help="digit depth, or an inclusive range like 4..10 for sweep")
    common.add_argument("--sigma", default="zeros",
                        help="zeros, balanced, random, random:<seed> or an explicit bit string")
    common.add_argument("--points", help="read the point set from a file instead of generating it")
    common.add_argument("--count", type=int, help="take the first COUNT+1 points (general N)")
    common.add_argument("--depth", type=int, help="finest level 2^-depth for scans and square sums")
    common.add_argument("--budget", type=int, help="work cap for this run (cells or rectangles)")
    common.add_argument("--pgrid", type=parse_pgrid, default=list(norms.DEFAULT_PGRID),
                        help="comma-separated exponents p")
    common.add_argument("--alpha", type=parse_floats, default=[2.0], help="comma-separated alphas")
    common.add_argument("--a", type=int, default=3, help="spacing of the Riesz product indices")
    common.add_argument("--out", help="output file (default standard output)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1,
                        help="accepted for interface stability; results never depend on it")

    parser = argparse.ArgumentParser(prog="discrepancy-lab",
                                     description="Exact discrepancy analysis of scrambled van der Corput sets.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("gen", parents=[common], help="write a point set")
    p = sub.add_parser("eval", parents=[common], help="evaluate D at points x1,x2")
    p.add_argument("x", nargs="+", help="points as x1,x2 (e.g. 1/2,3/2^3)")
    sub.add_parser("mean", parents=[common], help="exact integral of D")
    p = sub.add_parser("haar-scan", parents=[common], help="Haar coefficient scan")
    p.add_argument("--samples", type=int, default=0, help="sample this many rectangles instead")
    p = sub.add_parser("norms", parents=[common], help="L-infinity, L^p and exp(L^alpha) profile")
    p.add_argument("--orlicz", action="store_true", help="also compute the Orlicz norm itself")
    p = sub.add_parser("bmo", parents=[common], help="product BMO estimate")
    p.add_argument("--bitmap", action="store_true", help="include the maximising set")
    p = sub.add_parser("certify", parents=[common], help="Riesz-product lower-bound certificate")
    p.add_argument("--spacings", type=parse_floats,
                   help="instead report whether the first order dominates for each spacing a (e.g. 1,2,3,4,5,6)")
    sub.add_parser("sweep", parents=[common], help="growth table over a range of n")
    p = sub.add_parser("check", parents=[common], help="run the acceptance invariants")
    p.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.workers < 1:
        print("error: --workers must be positive", file=sys.stderr)
        return EXIT_USAGE
    saved = os.environ.get("DISCREPANCY_LAB_BUDGET")
    if args.budget is not None:
        os.environ["DISCREPANCY_LAB_BUDGET"] = str(args.budget)
    out = _Output(args.out)
    try:
        status = COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DiscrepancyLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        # main() may run inside a longer-lived process
        if saved is None:
            os.environ.pop("DISCREPANCY_LAB_BUDGET", None)
        else:
            os.environ["DISCREPANCY_LAB_BUDGET"] = saved
    out.close()
    return status


if __name__ == "__main__":
    sys.exit(main())
