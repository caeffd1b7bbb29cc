"""Command-line driver.

Reports are CSV by default: a first line ``# {json metadata}``, a header row,
data rows, and for commands with aggregate results a last line
``# {json summary}``. ``--format json`` emits one object with the keys
``meta``, ``columns``, ``rows`` and ``summary`` in that order.
"""
import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from . import globalformula as gf
from . import su2
from .errors import DomainError, InputError, NumericalError
from .pillowcase import evaluate_on_pillowcase, restrict
from .presentation import load_presentation
from .repvariety import TrefoilPath, find_representation, tangent_cocycle, trace_path
from .torsion import ONE, PeripheralFunction, integrate_path, torsion_at

EXIT_INPUT = 2
EXIT_NUMERIC = 3


# -- argument helpers -------------------------------------------------------

def _t_range(text):
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a:b:step") from None
    if step <= 0 or b < a:
        raise argparse.ArgumentTypeError("need step > 0 and b >= a")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [float(f"{a + i * step:.12g}") for i in range(count)]


def _lambdas(text):
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from None


def _function(text):
    try:
        return PeripheralFunction.parse(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _candidates(text):
    return [_function(chunk) for chunk in text.split(";") if chunk.strip()]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="su2torsion",
        description="Dubois torsion of SU(2) character varieties of knot groups.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--presentation", default="builtin:trefoil",
                        help="JSON presentation file or builtin:<name> (default builtin:trefoil)")
    common.add_argument("--path", choices=("auto", "closed-form", "continuation"), default="auto",
                        help="closed-form family (trefoil only) or numerical continuation")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", default="-", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("torsion", parents=[common], help="torsion along the path")
    grid = p.add_mutually_exclusive_group()
    grid.add_argument("--t", type=float, action="append", help="path parameter (repeatable)")
    grid.add_argument("--t-range", type=_t_range, help="a:b:step, inclusive")

    for name in ("total", "seminorm"):
        p = sub.add_parser(name, parents=[common],
                           help="integral of f against the torsion" if name == "total"
                           else "absolute value of that integral")
        p.add_argument("--f", type=_function, default=ONE,
                       help="peripheral function c:p:q[,c:p:q]* (default 0.5:0:0, the constant 1)")
        p.add_argument("--epsrel", type=float, default=1e-10)

    p = sub.add_parser("global", parents=[common], help="Monte-Carlo global formula")
    p.add_argument("--f", type=_function, default=ONE)
    p.add_argument("--lambdas", type=_lambdas, default=[200.0, 400.0, 800.0])
    p.add_argument("--n", type=int, default=200000)
    p.add_argument("--sampler", choices=gf.SAMPLERS, default="tube")
    p.add_argument("--kernel", choices=gf.KERNELS + ("both",), default="parametrix")
    p.add_argument("--workers", type=int, default=None,
                   help=f"worker processes (default ${gf.WORKERS_ENV} or all cores)")
    p.add_argument("--no-reference", action="store_true",
                   help="skip the path-quadrature reference value")

    p = sub.add_parser("pillowcase", parents=[common], help="image in the pillowcase")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--candidates", type=_candidates, default=[],
                   help="semicolon-separated peripheral functions")
    return parser


# -- shared plumbing --------------------------------------------------------

def resolve_path(pres, kind, seed):
    if kind == "closed-form" or (kind == "auto" and pres == load_presentation("builtin:trefoil")):
        if pres != load_presentation("builtin:trefoil"):
            raise InputError("the closed-form path exists only for the builtin trefoil")
        return TrefoilPath(), "closed-form"
    rep = find_representation(pres, np.random.default_rng(seed))
    return trace_path(pres, rep), "continuation"


def _config(args):
    out = {}
    for key, value in sorted(vars(args).items()):
        if key == "output":
            continue
        if isinstance(value, PeripheralFunction):
            value = value.spell()
        elif isinstance(value, list) and value and isinstance(value[0], PeripheralFunction):
            value = [f.spell() for f in value]
        out[key] = value
    return out


class Report:
    def __init__(self, args, columns):
        self.meta = {"command": args.command, "config": _config(args), "seed": args.seed,
                     "version": __version__}
        self.columns = list(columns)
        self.rows = []
        self.summary = None

    def add(self, *row):
        self.rows.append([_plain(x) for x in row])

    def render(self, fmt):
        if fmt == "json":
            return json.dumps({"meta": self.meta, "columns": self.columns, "rows": self.rows,
                               "summary": self.summary}) + "\n"
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.meta) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows([[repr(x) if isinstance(x, float) else x for x in r] for r in self.rows])
        if self.summary is not None:
            buf.write("# " + json.dumps(self.summary) + "\n")
        return buf.getvalue()


def _plain(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def _check_domain(path, t):
    lo, hi = path.domain
    if not lo < t < hi:
        raise DomainError(f"t={t} outside the open path domain ({lo}, {hi})")


# -- commands ---------------------------------------------------------------

def cmd_torsion(args, pres):
    path, kind = resolve_path(pres, args.path, args.seed)
    grid = args.t or args.t_range or [0.5 * sum(path.domain)]
    report = Report(args, ["t", "volume_det", "v_norm", "r_pseudodet", "tau"])
    report.meta["path"] = {"kind": kind, "domain": list(path.domain)}
    for t in grid:
        _check_domain(path, t)
        rep = path.point(t, pres)
        b = torsion_at(pres, rep, tangent_cocycle(pres, path, t))
        report.add(t, b.volume_det, b.v_norm, b.r_pseudodet, b.value)
    return report


def cmd_total_and_seminorm(args, pres):
    path, kind = resolve_path(pres, args.path, args.seed)
    absolute = args.command == "seminorm"
    report = Report(args, ["term", "value", "error_estimate"])
    report.meta["path"] = {"kind": kind, "domain": list(path.domain)}
    value, err = integrate_path(pres, path, args.f, epsrel=args.epsrel, full_output=True)
    report.add("total", abs(value) if absolute else value, err)
    if len(args.f.terms) > 1:
        for term in args.f.terms:
            part, perr = integrate_path(pres, path, PeripheralFunction((term,)),
                                        epsrel=args.epsrel, full_output=True)
            report.add(PeripheralFunction((term,)).spell(), part, perr)
    return report


def cmd_global(args, pres):
    if args.n < gf.MIN_SAMPLES:
        raise InputError(f"--n must be at least {gf.MIN_SAMPLES}")
    if not args.lambdas or any(lam <= 0 for lam in args.lambdas):
        raise InputError("--lambdas must be positive")
    kernels = gf.KERNELS if args.kernel == "both" else (args.kernel,)
    path = kind = None
    if args.sampler == "tube" or not args.no_reference:
        path, kind = resolve_path(pres, args.path, args.seed)
    sweep = gf.sweep_estimates(pres, args.f, args.lambdas, kernels, args.sampler, args.n,
                               args.seed, path, args.workers)
    report = Report(args, ["quantity", "lambda", "kernel", "sampler", "n", "value", "std_error"])
    report.meta["path"] = None if path is None else {"kind": kind, "domain": list(path.domain)}
    summary = {}
    for name in kernels:
        for e in sweep[name]["estimates"]:
            report.add("estimate", e.lam, name, e.sampler, e.n_samples, e.value, e.std_error)
        fit = sweep[name]["fit"]
        if fit is not None:
            report.add("extrapolated", "inf", name, args.sampler, args.n,
                       fit.extrapolated, fit.std_error)
    reference = None
    if path is not None and not args.no_reference:
        reference = gf.local_reference(pres, path, args.f)
        report.add("reference", "", "path-quadrature", "", "", reference, "")
        main = sweep[kernels[0]]
        best = main["fit"].extrapolated if main["fit"] is not None else main["estimates"][-1].value
        verdict = gf.normalization_verdict(best, reference, pres.k)
        summary["normalization_ratios"] = verdict
        summary["normalization_verdict"] = min(verdict, key=lambda c: abs(math.log(abs(verdict[c])))
                                               if verdict[c] else math.inf)
    if len(kernels) == 2:
        summary["kernel_agreement_sigma"] = [
            abs(a.value - b.value) / math.hypot(a.std_error, b.std_error)
            for a, b in zip(sweep["parametrix"]["estimates"], sweep["heat"]["estimates"])]
    report.summary = summary or None
    return report


def cmd_pillowcase(args, pres):
    if args.samples < 1:
        raise InputError("--samples must be positive")
    path, kind = resolve_path(pres, args.path, args.seed)
    lo, hi = path.domain
    cols = ["t", "theta_l", "theta_m", "corner"]
    cols += [f"residual_{i + 1}" for i in range(len(args.candidates))]
    report = Report(args, cols)
    report.meta["path"] = {"kind": kind, "domain": [lo, hi]}
    worst = [0.0] * len(args.candidates)
    for i in range(args.samples):
        t = lo + (hi - lo) * (i + 0.5) / args.samples
        pt = restrict(pres, path.point(t))
        res = [abs(evaluate_on_pillowcase(f, pt)) for f in args.candidates]
        worst = [max(w, r) for w, r in zip(worst, res)]
        report.add(t, pt.theta_l, pt.theta_m, int(pt.corner), *res)
    if args.candidates:
        report.summary = {"max_residuals": dict(zip((f.spell() for f in args.candidates), worst))}
    return report


COMMANDS = {
    "torsion": cmd_torsion,
    "total": cmd_total_and_seminorm,
    "seminorm": cmd_total_and_seminorm,
    "global": cmd_global,
    "pillowcase": cmd_pillowcase,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        pres = load_presentation(args.presentation)
        report = COMMANDS[args.command](args, pres)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = report.render(args.format)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
