"""Command-line entry point: approxdeg {degree,scan,certify,verify,simulate,families}.

Exit codes: 0 success, 1 verification failure, 2 usage error (bad flags, malformed
rationals or bundles, size guard tripped).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from ._config import SizeError
from .functions import FAMILIES, PromiseFunction, format_rational, load_function, parse_rational

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEGREE_HEADER = ["family", "n", "r", "param", "eps_num", "eps_den", "sided", "degree",
                 "eps_star_num", "eps_star_den"]

FAMILY_HELP = {
    "and": "AND_n on D_{n,2}",
    "and_restricted": "AND_{n,alpha}: weight n or at most floor(alpha*n)",
    "ed": "element distinctness on D_{n,r} (r defaults to n)",
    "edk": "k-element distinctness on D_{n,n}: no column with k or more ones",
    "surj": "surjectivity on D_{n,r}",
    "ptp": "permutation testing PTP_{n,alpha}: bijection vs image <= alpha*n",
    "ptp_star": "far-from-permutation variant PTP*_{n,delta}",
}


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational_list(text: str) -> list[Fraction]:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty list of rationals")
    return [_rational(t) for t in items]


def _n_list(text: str) -> list[int]:
    """'128..8192' (doubling) or a comma list."""
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split(".."))
            if lo < 2 or hi < lo:
                raise ValueError
            out = []
            while lo <= hi:
                out.append(lo)
                lo *= 2
            return out
        out = [int(v) for v in text.split(",") if v.strip()]
        if not out:
            raise ValueError
        return out
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a..b' or a comma list of sizes: {text!r}") from None


# ---------------------------------------------------------------------------
# building functions from flags


def _function_from_args(args) -> tuple[PromiseFunction, str]:
    if args.function:
        f = load_function(args.function)
        return f, ""
    if args.family is None:
        raise UsageError("give --family or --function")
    ctor, fields = FAMILIES[args.family]
    values, param = [], []
    for name in fields:
        v = getattr(args, name)
        if name == "r" and v is None and args.family == "ed":
            v = args.n
        if v is None:
            raise UsageError(f"--{name} is required for family {args.family}")
        values.append(v)
        if name not in ("n", "r"):
            param.append(f"{name}={format_rational(v) if isinstance(v, Fraction) else v}")
    try:
        return ctor(*values), ";".join(param)
    except SizeError:
        raise
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _add_function_flags(p):
    p.add_argument("--family", choices=sorted(FAMILIES))
    p.add_argument("--function", help="PromiseFunction JSON file instead of --family")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--alpha", type=_rational)
    p.add_argument("--delta", type=_rational)
    p.add_argument("--sided", choices=["one", "two"], default="two")
    p.add_argument("--no-symmetry", action="store_true", help="solve the full LP, not the orbit LP")


def _degree_row(f, family, param, eps, sided, res) -> list:
    star = res.certificate.eps_star
    return [family, f.n, f.r, param, eps.numerator, eps.denominator, sided, res.degree,
            star.numerator, star.denominator]


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _family_label(args, f) -> str:
    return args.family if args.family else f.family


# ---------------------------------------------------------------------------
# commands


def cmd_degree(args) -> int:
    from .lp import approx_degree

    f, param = _function_from_args(args)
    sided = "one-sided" if args.sided == "one" else "two-sided"
    res = approx_degree(f, args.eps, sided, use_symmetry=not args.no_symmetry)
    _emit(_csv([DEGREE_HEADER, _degree_row(f, _family_label(args, f), param, args.eps, args.sided, res)]),
          args.out)
    if args.witness:
        w = res.witness
        payload = w.to_json() if w is not None else None
        with open(args.witness, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def cmd_scan(args) -> int:
    from .lp import min_error_at_degree

    eps_list = args.eps
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise UsageError("--eps must be strictly decreasing")
    if any(not 0 <= e < Fraction(1, 2) for e in eps_list):
        raise UsageError("every eps must lie in [0, 1/2)")
    f, param = _function_from_args(args)
    sided = "one-sided" if args.sided == "one" else "two-sided"
    # one LP per degree serves every eps
    cache = {}

    def star(d):
        if d not in cache:
            cache[d] = min_error_at_degree(f, d, sided, use_symmetry=not args.no_symmetry).eps_star
        return cache[d]

    rows = [DEGREE_HEADER]
    points = []
    d = 0
    for eps in eps_list:
        while star(d) > eps:
            d += 1
        s = star(d)
        rows.append([_family_label(args, f), f.n, f.r, param, eps.numerator, eps.denominator,
                     args.sided, d, s.numerator, s.denominator])
        points.append((eps, d))
    _emit(_csv(rows), args.out)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(render_svg(points, f"{_family_label(args, f)} n={f.n}"))
    return EXIT_OK


def render_svg(points, title: str) -> str:
    """Degree against log(1/eps) as one polyline; eps = 0 sits one step past the rest."""
    finite = [math.log(1 / float(e)) for e, _ in points if e > 0]
    right = (max(finite) if finite else 0.0) + 1.0
    xs = [math.log(1 / float(e)) if e > 0 else right for e, _ in points]
    ys = [d for _, d in points]
    W, H, pad = 480, 320, 50
    x0, x1 = min(xs), max(xs)
    y1 = max(max(ys), 1)
    sx = (W - 2 * pad) / ((x1 - x0) or 1.0)
    sy = (H - 2 * pad) / y1

    def px(x, y):
        return f"{pad + (x - x0) * sx:.2f},{H - pad - y * sy:.2f}"

    poly = " ".join(px(x, y) for x, y in zip(xs, ys))
    ticks = "".join(
        f'<text x="{pad + (x - x0) * sx:.2f}" y="{H - pad + 16}" font-size="10" '
        f'text-anchor="middle">{format_rational(e) if e else "0"}</text>'
        for x, (e, _) in zip(xs, points)
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">\n'
        f'<text x="{W / 2}" y="20" font-size="13" text-anchor="middle">{title}</text>\n'
        f'<line x1="{pad}" y1="{H - pad}" x2="{W - pad}" y2="{H - pad}" stroke="black"/>\n'
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{H - pad}" stroke="black"/>\n'
        f'<text x="{W / 2}" y="{H - 10}" font-size="12" text-anchor="middle">log(1/eps)</text>\n'
        f'<text x="14" y="{H / 2}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {H / 2})">degree</text>\n'
        f'<text x="{pad - 6}" y="{H - pad - y1 * sy + 4:.2f}" font-size="10" text-anchor="end">{y1}</text>\n'
        f'{ticks}\n'
        f'<polyline fill="none" stroke="steelblue" stroke-width="2" points="{poly}"/>\n'
        f"</svg>\n"
    )


def cmd_certify(args) -> int:
    from . import certify

    p = args.pipeline
    try:
        if p == "ed":
            bound = certify.certify_ed(args.n, args.k, args.base_eps)
        elif p == "ed_r":
            if args.r_param is None:
                raise UsageError("--r-param is required for ed_r")
            bound = certify.certify_ed_r(args.n, args.r_param, args.k, args.base_eps)
        elif p == "surj":
            if args.c is None:
                raise UsageError("--c is required for surj")
            bound = certify.certify_surj(args.n, args.c, args.k, args.base_eps)
        else:
            if args.alpha is None:
                raise UsageError("--alpha is required for ptp")
            bound = certify.certify_ptp(args.n, args.alpha, args.k, args.base_eps)
    except certify.PipelineError as exc:
        raise UsageError(str(exc)) from None
    report = bound.verify()
    text = json.dumps(bound.to_json(), indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(f"function={bound.function.family} n={bound.function.n} r={bound.function.r}")
    print(f"degree_lb={bound.degree_lb}")
    for line in report.lines():
        print(line)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    from .certify import CertifiedBound, replay

    try:
        with open(args.bundle) as fh:
            data = json.load(fh)
        bound = CertifiedBound.from_json(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError, IndexError) as exc:
        raise UsageError(f"cannot read bundle {args.bundle}: {exc}") from None
    report = bound.verify()
    for line in report.lines():
        print(line)
    if report.offending_point is not None:
        print(f"offending_point={list(report.offending_point)}")
    if not report.passed:
        return EXIT_FAIL
    if args.replay and bound.trace:
        if replay(bound.trace).values != bound.witness.values:
            print("replay=FAIL (trace does not reproduce the witness)")
            return EXIT_FAIL
        print("replay=PASS")
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .sim import sweep

    if args.trials < 1:
        raise UsageError("--trials must be positive")
    for e in args.eps:
        if not 0 < e <= Fraction(1, 3):
            raise UsageError("every eps must lie in (0, 1/3]")
    if not 0 < args.alpha < 1:
        raise UsageError("--alpha must lie in (0, 1)")
    if args.grid <= 1:
        raise UsageError("--grid must exceed 1")
    res = sweep(args.n, args.alpha, args.eps, args.trials, args.seed, grid=args.grid,
                backend=args.backend)
    lines = [res.csv_text()]
    for eps in res.exponents:
        best = [f"{n}:{res.optimum[(n, eps)].params.s}" if res.optimum[(n, eps)] else f"{n}:-"
                for n in args.n]
        lines.append(f"# eps={format_rational(eps)} optimal_s={','.join(best)}\n")
    for eps, slope in res.exponents.items():
        key = "fitted_exponent" if len(res.exponents) == 1 else f"fitted_exponent[eps={format_rational(eps)}]"
        lines.append(f"{key}={'nan' if slope is None else f'{slope:.6f}'}\n")
    _emit("".join(lines), args.out)
    return EXIT_OK


def cmd_families(args) -> int:
    for name in sorted(FAMILIES):
        _, fields = FAMILIES[name]
        print(f"{name}\t{','.join(fields)}\t{FAMILY_HELP[name]}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="approxdeg", description="Exact approximate degree toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degree", help="least eps-approximate degree of one function")
    _add_function_flags(p)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--witness", help="write the dual witness JSON here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("scan", help="degree for a decreasing list of eps values")
    _add_function_flags(p)
    p.add_argument("--eps", type=_rational_list, required=True, help="comma list, e.g. 1/3,1/9,0")
    p.add_argument("--svg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("certify", help="build a certified lower bound bundle")
    p.add_argument("--pipeline", choices=["ed", "ed_r", "surj", "ptp"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--base-eps", type=_rational, required=True)
    p.add_argument("--r-param", type=int)
    p.add_argument("--c", type=_rational)
    p.add_argument("--alpha", type=_rational)
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="re-check a bundle without any LP")
    p.add_argument("bundle")
    p.add_argument("--replay", action="store_true", help="also replay the construction trace")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte-Carlo sweep of the permutation tester")
    p.add_argument("--n", type=_n_list, default=_n_list("128..8192"))
    p.add_argument("--alpha", type=_rational, default=Fraction(1, 2))
    p.add_argument("--eps", type=_rational_list, default=[Fraction(1, 3)])
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", type=_rational, default=Fraction(5, 4), help="geometric s-grid ratio")
    p.add_argument("--backend", choices=["numba", "numpy"], default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("families", help="list the built-in function families")
    p.set_defaults(func=cmd_families)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, SizeError, ValueError) as exc:
        print(f"approxdeg {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
