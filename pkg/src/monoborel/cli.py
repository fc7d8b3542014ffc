"""Command-line front end: solve, directions, sum, gevrey.

Exit codes: 0 success, 1 input error, 2 singular B0, 3 singular direction,
4 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence

import numpy as np

from .errors import ExactModeError, InputError, MonoBorelError, SingularDirectionError
from .formatting import dumps
from .monomial import MonomialOrder, as_fraction, gevrey_fit
from .pde import PdeProblem, formal_solve, singular_directions
from .series import TruncatedSeries
from .summation import monomial_borel_sum


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _emit(text: str, out: str | None):
    if not text.endswith("\n"):
        text += "\n"
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


def _ints(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc


def _parse_point(text: str, names: Sequence[str]) -> np.ndarray:
    vals = {}
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise InputError(f"expected name=value in --at, got {part!r}")
        k, v = part.split("=", 1)
        try:
            vals[k.strip()] = complex(v.strip().replace(" ", ""))
        except ValueError as exc:
            raise InputError(f"bad number {v!r} in --at") from exc
    missing = [n for n in names if n not in vals]
    extra = [k for k in vals if k not in names]
    if missing or extra:
        raise InputError(f"--at must set exactly {', '.join(names)}")
    return np.array([vals[n] for n in names], dtype=complex)


def _load_problem(args) -> PdeProblem:
    return PdeProblem.from_json(_read(args.problem), exact=args.mode == "exact")


def cmd_solve(args) -> int:
    if args.order < 1:
        raise InputError("--order must be >= 1")
    p = _load_problem(args)
    sol = formal_solve(p, args.order)
    _emit(sol.to_csv(), args.out)
    return 0


def cmd_directions(args) -> int:
    p = _load_problem(args)
    p.check_B0()
    _emit(dumps(singular_directions(p).directions), args.out)
    return 0


def _angle_gap(a: float, b: float) -> float:
    d = (a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def cmd_sum(args) -> int:
    if args.mode == "exact":
        raise ExactModeError("summation is numeric; exact mode is not available for 'sum'")
    if not (0 < args.tol <= 1e-2):
        raise InputError("--tol must lie in (0, 1e-2]")
    if not args.at:
        raise InputError("at least one --at point is required")
    weights = None
    if args.weights:
        weights = [as_fraction(v) for v in args.weights.split(",")]
    if args.problem:
        p = _load_problem(args)
        p.check_B0()
        for th in singular_directions(p).directions:
            if _angle_gap(args.direction, th) <= 1e-6:
                raise SingularDirectionError(f"singular direction: theta={args.direction} matches {th:.17g}")
        series = formal_solve(p, args.order).series
        names = p.variable_names()
        mo = p.summation_order(weights)
    elif args.series:
        series, names, _ = TruncatedSeries.from_csv(_read(args.series))
        alpha = _ints(args.alpha) if args.alpha else [1] * series.dim
        mo = MonomialOrder(alpha, 1, weights)
    else:
        raise InputError("either --problem or --series is required")
    points = [_parse_point(a, names) for a in args.at]

    def run(x):
        return monomial_borel_sum(series, mo, x, args.direction, args.tol)

    with ThreadPoolExecutor(max_workers=min(8, len(points))) as pool:
        results = list(pool.map(run, points))
    payload = results[0].to_dict() if len(results) == 1 else [r.to_dict() for r in results]
    _emit(dumps(payload), args.out)
    return 0


def cmd_gevrey(args) -> int:
    if args.mode == "exact":
        raise ExactModeError("the Gevrey fit is a numeric regression; exact mode is not available")
    path = args.series_pos or args.series
    if not path:
        raise InputError("a series CSV is required")
    series, _, _ = TruncatedSeries.from_csv(_read(path))
    alpha = _ints(args.alpha) if args.alpha else [1] * series.dim
    _emit(gevrey_fit(series, alpha).to_json(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="monoborel", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--mode", choices=("exact", "numeric"), default="numeric")
        p.add_argument("--out", help="output file (default: stdout)")

    s = sub.add_parser("solve", help="formal solution coefficients as CSV")
    s.add_argument("--problem", required=True)
    s.add_argument("--order", type=int, default=10)
    common(s)
    s.set_defaults(func=cmd_solve)

    d = sub.add_parser("directions", help="singular directions as a JSON list")
    d.add_argument("--problem", required=True)
    common(d)
    d.set_defaults(func=cmd_directions)

    m = sub.add_parser("sum", help="numeric Borel sum at one or more points")
    m.add_argument("--problem")
    m.add_argument("--series", help="series CSV instead of a problem file")
    m.add_argument("--alpha", help="monomial exponents for --series input, e.g. 1,1")
    m.add_argument("--order", type=int, default=41)
    m.add_argument("--at", action="append", default=[], help='point, e.g. "x1=1,eps1=-0.1"')
    m.add_argument("--direction", type=float, required=True)
    m.add_argument("--tol", type=float, default=1e-10)
    m.add_argument("--weights", help="weight vector s, e.g. 1/2,1/2")
    common(m)
    m.set_defaults(func=cmd_sum)

    g = sub.add_parser("gevrey", help="Gevrey-order fit of a series CSV")
    g.add_argument("series_pos", nargs="?", metavar="SERIES")
    g.add_argument("--series")
    g.add_argument("--alpha")
    common(g)
    g.set_defaults(func=cmd_gevrey)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.func(args)
    except MonoBorelError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except (ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
