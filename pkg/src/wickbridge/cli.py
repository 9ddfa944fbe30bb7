"""``wickbridge`` command-line front end.

Every subcommand writes one table (CSV or JSON) or one JSON report to stdout
or ``--out``.  Exit codes: 0 success, 1 usage, 2 validation or numerical
precondition, 3 identity check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import checks
from .dictionary import DictionaryMap
from .errors import WickBridgeError
from .ou_process import (
    conditional_density,
    extremal_path,
    one_gate_density,
    sample_paths,
    sliced_path_density,
)
from .params import OUParams, PhysParams
from .quantum import exact_propagator

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_CHECK_FAILED = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_values(text: str | None, default: Sequence[float]) -> np.ndarray:
    """Parse ``v``, ``v1,v2,...`` or ``start:stop:count`` into an array."""
    if text is None:
        return np.asarray(default, dtype=float)
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            n = int(count)
            if n < 1:
                raise ValueError
            return np.linspace(float(start), float(stop), n)
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse value list {text!r}") from None


def _scalar(text: str | None, default: float, name: str) -> float:
    vals = parse_values(text, [default])
    if vals.size != 1:
        raise UsageError(f"--{name} takes a single value here")
    return float(vals[0])


def _increasing(name: str, vals: np.ndarray) -> None:
    if vals.size > 1 and not np.all(np.diff(vals) > 0):
        raise UsageError(f"--{name} values must be strictly increasing")


def _fmt(v: float, precision: int) -> str:
    return f"{v:.{precision}g}"


def render_table(header: Sequence[str], rows, fmt: str, precision: int) -> str:
    rows = [list(r) for r in rows]
    if fmt == "json":
        data = {
            "columns": list(header),
            "rows": [[float(_fmt(float(v), precision)) for v in r] for r in rows],
        }
        return json.dumps(data, sort_keys=True) + "\n"
    lines = [",".join(header)]
    lines += [",".join(_fmt(float(v), precision) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def _phys(args) -> PhysParams:
    return PhysParams(m=args.m, hbar=args.hbar, omega=args.omega)


def _ou(args) -> OUParams:
    if args.gamma is not None:
        if args.R is not None:
            raise UsageError("give at most one of --gamma and --R")
        return OUParams.from_rate(args.gamma, s=args.s, kB=args.kB)
    return OUParams(R=1.0 if args.R is None else args.R, s=args.s, kB=args.kB)


def cmd_propagator(args) -> str:
    q = _phys(args)
    x1 = _scalar(args.x1, 0.0, "x1")
    x2 = parse_values(args.x2, np.linspace(-3.0, 3.0, 13))
    ts = parse_values(args.t, [1.0])
    _increasing("t", ts)
    kind = "free" if q.omega == 0 else "harmonic"
    rows = []
    for t in ts:
        K = exact_propagator(kind, q, 0.0, float(t))
        vals = np.atleast_1d(K(x2, x1))
        for xv, kv in zip(x2, vals):
            rows.append((xv, t, kv.real, kv.imag, abs(kv)))
    return render_table(["x2", "t", "re_K", "im_K", "abs_K"], rows, args.format, args.precision)


def cmd_ou(args) -> str:
    p = _ou(args)
    y1 = _scalar(args.y1, 1.0, "y1")
    tau1 = _scalar(args.tau1, 0.0, "tau1")
    y2 = parse_values(args.y2, np.linspace(-3.0, 3.0, 13))
    tau2 = parse_values(args.tau2, [tau1 + math.log(2.0)])
    scale = math.sqrt(p.s / p.kB) if args.convention == "paper" else 1.0
    rows = []
    for t2 in tau2:
        dtau = float(t2) - tau1
        if math.isinf(dtau):
            f = one_gate_density(p, y2) * scale
        else:
            f = conditional_density(p, y2, dtau, y1, convention=args.convention)
        for yv, fv in zip(y2, np.atleast_1d(f)):
            rows.append((yv, dtau, fv))
    return render_table(["y2", "delta_tau", "f1"], rows, args.format, args.precision)


def cmd_extremal(args) -> str:
    p = _ou(args)
    tau1 = _scalar(args.tau1, 0.0, "tau1")
    tau2 = _scalar(args.tau2, 1.0, "tau2")
    y1 = _scalar(args.y1, 1.0, "y1")
    y2 = _scalar(args.y2, 0.5, "y2")
    n = args.n or 1001
    semi = math.isinf(tau1) and tau1 < 0
    if semi:
        # grid starts ten relaxation times before tau2
        tau1 = tau2 - 10.0 / p.gamma
    exact = extremal_path(p, tau1, y1, tau2, y2, n=n, method="analytic", semi_infinite=semi)
    numeric = extremal_path(p, tau1, y1, tau2, y2, n=n, method="numeric", semi_infinite=semi)
    err = np.abs(exact.y - numeric.y)
    rows = zip(exact.tau, exact.y, numeric.y, err)
    return render_table(["tau", "y_analytic", "y_numeric", "abs_err"], rows, args.format, args.precision)


def cmd_langevin(args) -> str:
    p = _ou(args)
    y0 = _scalar(args.y1, 1.0, "y1")
    tau_max = _scalar(args.tau2, 1.0, "tau2")
    ens = sample_paths(
        p,
        y0,
        tau_max,
        args.dt if args.dt is not None else 1e-3,
        args.paths,
        args.seed,
        scheme=args.scheme,
    )
    if args.bins:
        edges, counts, density = ens.histogram(args.bins)
        rows = zip(edges[:-1], edges[1:], counts, density)
        return render_table(["bin_lo", "bin_hi", "count", "density"], rows, args.format, args.precision)
    return render_table(["tau", "mean", "var", "p05", "p50", "p95"], ens.stats_table(), args.format, args.precision)


def cmd_slice(args) -> str:
    p = _ou(args)
    tau1 = _scalar(args.tau1, 0.0, "tau1")
    tau2 = _scalar(args.tau2, 1.0, "tau2")
    y1 = _scalar(args.y1, 1.0, "y1")
    y2 = _scalar(args.y2, 0.5, "y2")
    if args.n is not None and args.n_list is not None:
        raise UsageError("give at most one of --n and --slices")
    default = [args.n] if args.n is not None else [1, 4, 16, 64, 256, 1024, 4096]
    ns = parse_values(args.n_list, default)
    exact = float(conditional_density(p, y2, tau2 - tau1, y1))
    rows = []
    for n in ns:
        if n != int(n) or n < 1:
            raise UsageError("slice counts must be positive integers")
        n = int(n)
        euler = float(sliced_path_density(p, y1, tau1, y2, tau2, n, "euler"))
        ex = float(sliced_path_density(p, y1, tau1, y2, tau2, n, "exact"))
        rows.append((n, euler, ex, exact, (euler - exact) / exact, (ex - exact) / exact))
    header = ["n", "f1_euler", "f1_exact_slices", "f1_closed", "rel_err_euler", "rel_err_exact"]
    return render_table(header, rows, args.format, args.precision)


def cmd_check(args) -> tuple[str, bool]:
    name = args.identity
    if name not in checks.CHECKS:
        raise UsageError(f"unknown identity {name!r}; choose from {', '.join(checks.CHECKS)}")
    kw = {}
    if name == "slicing":
        kw["n"] = args.n or 1024
    elif name in ("free", "harmonic", "chapman"):
        kw["seed"] = args.seed
    if args.tol is not None:
        if name == "slicing":
            raise UsageError("the slicing tolerance is fixed by its tier; --tol is not accepted")
        kw["tol"] = args.tol
    report = checks.CHECKS[name](**kw)
    return report.to_json(), report.passed


def cmd_dictionary(args) -> str:
    q = _phys(args)
    mapping = DictionaryMap(length_scale=args.length_scale)
    p = mapping.to_thermo(q, kB=args.kB)
    back = mapping.to_quantum(p, hbar=q.hbar)
    out = {
        "quantum": {"m": q.m, "hbar": q.hbar, "omega": q.omega},
        "thermo": {"R": p.R, "s": p.s, "kB": p.kB, "gamma": p.gamma},
        "round_trip": {"m": back.m, "hbar": back.hbar, "omega": back.omega},
        "length_scale": mapping.length_scale,
    }

    def rounded(d):
        return {k: rounded(v) if isinstance(v, dict) else float(_fmt(v, args.precision)) for k, v in d.items()}

    return json.dumps(rounded(out), sort_keys=True, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("parameters")
    g.add_argument("--m", type=float, default=1.0, help="mass")
    g.add_argument("--hbar", type=float, default=1.0)
    g.add_argument("--omega", type=float, default=0.0, help="0 selects the free particle")
    g.add_argument("--R", type=float, default=None, help="resistance (inverse conductance)")
    g.add_argument("--s", type=float, default=1.0, help="entropy curvature")
    g.add_argument("--kB", type=float, default=1.0)
    g.add_argument("--gamma", type=float, default=None, help="relaxation rate s/R (instead of --R)")
    g.add_argument("--x1", default=None)
    g.add_argument("--x2", default=None, help="value, list a,b,c or range start:stop:count")
    g.add_argument("--t", default=None, help="times, strictly increasing")
    g.add_argument("--y1", default=None)
    g.add_argument("--y2", default=None)
    g.add_argument("--tau1", default=None, help="-inf selects the semi-infinite extremal")
    g.add_argument("--tau2", default=None, help="inf gives the one-gate (aged) density")
    g.add_argument("--n", type=int, default=None, help="grid points or slice count")
    g.add_argument("--dt", type=float, default=None)
    g.add_argument("--paths", type=int, default=10000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--convention", choices=["normalized", "paper"], default="normalized")
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=["csv", "json"], default="csv")
    o.add_argument("--out", default=None, help="output file (default stdout)")
    o.add_argument("--tol", type=float, default=None, help="override a check tolerance")
    o.add_argument("--precision", type=int, default=12, help="significant digits")

    parser = _Parser(prog="wickbridge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("propagator", parents=[common], help="free or harmonic propagator table")
    sub.add_parser("ou", parents=[common], help="OU transition or one-gate density table")
    sub.add_parser("extremal", parents=[common], help="analytic vs numeric extremal path")
    lg = sub.add_parser("langevin", parents=[common], help="Langevin ensemble statistics")
    lg.add_argument("--scheme", choices=["euler", "exact"], default="euler")
    lg.add_argument("--bins", type=int, default=0, help="emit a final-time histogram instead")
    sl = sub.add_parser("slice", parents=[common], help="time-sliced density vs closed form")
    sl.add_argument("--slices", dest="n_list", default=None, help="slice counts, list or range")
    ck = sub.add_parser("check", parents=[common], help="run a verification scan")
    ck.add_argument("identity", help=", ".join(checks.CHECKS))
    dc = sub.add_parser("dictionary", parents=[common], help="parameter map round trip")
    dc.add_argument("--length-scale", type=float, default=1.0)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head); not an error
            sys.stdout = None
    else:
        Path(out).write_bytes(text.encode())


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.precision < 1 or args.precision > 17:
        print("wickbridge: error: --precision must be in 1..17", file=sys.stderr)
        return EXIT_USAGE
    handlers = {
        "propagator": cmd_propagator,
        "ou": cmd_ou,
        "extremal": cmd_extremal,
        "langevin": cmd_langevin,
        "slice": cmd_slice,
        "check": cmd_check,
        "dictionary": cmd_dictionary,
    }
    code = EXIT_OK
    try:
        result = handlers[args.command](args)
        if isinstance(result, tuple):
            result, passed = result
            code = EXIT_OK if passed else EXIT_CHECK_FAILED
    except UsageError as exc:
        print(f"wickbridge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WickBridgeError, ValueError, ArithmeticError) as exc:
        print(f"wickbridge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(result, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
