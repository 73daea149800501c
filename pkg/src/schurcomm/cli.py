"""Command-line front end.

Exit status: 0 when every check passes, 1 when at least one inequality is
violated, 2 on configuration or usage errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import functions as fn
from .campaign import CAMPAIGN_THEOREMS, CampaignConfig, constants_table, dumps_canonical, run_campaign
from .errors import ConfigInvalid, SchurCommError
from .fourier import CircleModel, derivation_as_schur, exact_schur_identity, schur_threshold
from .operators import operator_norm

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def parse_function(text: str) -> dict:
    """``"Kind:key=value,key=value"`` -> ``{"kind": "Kind", "key": value, ...}``."""
    kind, _, rest = text.partition(":")
    out = {"kind": kind}
    for item in filter(None, rest.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigInvalid(f"expected key=value in function spec, got {item!r}")
        try:
            out[key] = float(value)
        except ValueError:
            out[key] = value
    return out


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text + ("" if text.endswith("\n") else "\n"))
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _table_csv(rows) -> str:
    lines = ["theorem,constant,params,value"]
    for r in rows:
        params = dumps_canonical(r["params"]).replace('"', '""')
        lines.append(f'{r["theorem"]},"{r["constant"]}","{params}",{format(r["value"], ".17g")}')
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    config = CampaignConfig(
        theorems=tuple(args.theorem or ("AbsFirst",)),
        trials=args.trials,
        dim_range=tuple(args.dim),
        spectral_radius=args.radius,
        positive_only=args.positive,
        kernel_fraction=args.kernel_frac,
        alpha=args.alpha, A=args.A, B=args.B,
        beta=args.beta, p=args.p, n=args.n,
        function=parse_function(args.function) if args.function else None,
        seed=args.seed,
        rtol=args.tol,
        atol=args.atol,
        ensemble=args.ensemble,
    ).validate()
    report = run_campaign(config, workers=args.workers)
    _write(report.to_csv() if args.format == "csv" else report.to_json(), args.out)
    s = report.summary
    print(f"{s['passed']}/{s['total']} passed, max slack ratio {s['max_slack_ratio']}",
          file=sys.stderr)
    return EXIT_OK if report.all_passed else EXIT_VIOLATION


def cmd_constants(args) -> int:
    try:
        rows = constants_table(args.alpha, args.A, args.B, args.beta, args.p, args.n)
    except (ValueError, SchurCommError) as exc:
        raise ConfigInvalid(str(exc)) from exc
    if not rows:
        raise ConfigInvalid("empty parameter grid")
    _write(_table_csv(rows) if args.format == "csv" else dumps_canonical(rows), args.out)
    return EXIT_OK


def cmd_fourier(args) -> int:
    if args.M < 1:
        raise ConfigInvalid("M must be a positive integer")
    if args.trials < 0:
        raise ConfigInvalid("trials must be non-negative")
    g = fn.function_from_config(parse_function(args.function))
    model = CircleModel.build(args.M)
    rows = []
    ok = True
    for k in range(args.trials):
        rng = np.random.default_rng([args.seed, k])
        y = rng.standard_normal((model.dim,) * 2) + 1j * rng.standard_normal((model.dim,) * 2)
        res_g = exact_schur_identity(model, g, y)
        res_d = derivation_as_schur(model, y)
        thr_g = schur_threshold(model, g, y)
        thr_d = 1e-12 * (1.0 + model.M) * operator_norm(y)
        passed = res_g <= thr_g and res_d <= thr_d
        ok &= passed
        rows.append({"trial": k, "schur_residual": res_g, "schur_threshold": thr_g,
                     "derivation_residual": res_d, "derivation_threshold": thr_d,
                     "passed": passed})
    out = {"M": args.M, "function": g.describe(), "seed": args.seed, "trials": rows,
           "all_passed": ok}
    _write(dumps_canonical(out), args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schurcomm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a randomised verification campaign")
    v.add_argument("--theorem", action="append", choices=CAMPAIGN_THEOREMS,
                   help="theorem to check (repeatable; default AbsFirst)")
    v.add_argument("--trials", type=int, default=200)
    v.add_argument("--dim", type=int, nargs=2, default=[2, 24], metavar=("MIN", "MAX"))
    v.add_argument("--radius", type=float, default=30.0, help="spectral radius")
    v.add_argument("--positive", action="store_true", help="positive spectra only")
    v.add_argument("--kernel-frac", type=float, default=0.0,
                   help="probability that a positive instance gets exact zero eigenvalues")
    v.add_argument("--alpha", type=float)
    v.add_argument("--A", type=float)
    v.add_argument("--B", type=float)
    v.add_argument("--beta", type=float)
    v.add_argument("--p", type=float)
    v.add_argument("--n", type=int)
    v.add_argument("--function", help="fixed function, e.g. 'Arctan:width=2,amplitude=1'")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-9, help="relative tolerance")
    v.add_argument("--atol", type=float, default=1e-12, help="absolute tolerance")
    v.add_argument("--ensemble", choices=("dense", "band"), default="dense")
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--out", help="output file (default stdout)")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("constants", help="tabulate right-hand-side constants")
    c.add_argument("--alpha", type=float, nargs="+", default=[1.0, 0.5, 0.25])
    c.add_argument("--A", type=float, nargs="+", default=[0.0, 1.0])
    c.add_argument("--B", type=float, nargs="+", default=[1.0, 2.0])
    c.add_argument("--beta", type=float, nargs="+", default=[0.125, 1.0, 8.0])
    c.add_argument("--p", type=float, nargs="+", default=[1.0, 1.5, 1.9])
    c.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    c.add_argument("--out")
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.set_defaults(func=cmd_constants)

    f = sub.add_parser("fourier", help="exact Schur identities on the circle model")
    f.add_argument("--M", type=int, default=16)
    f.add_argument("--function", default="AbsValue")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--trials", type=int, default=10)
    f.add_argument("--out")
    f.set_defaults(func=cmd_fourier)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigInvalid as exc:
        print(f"schurcomm: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
