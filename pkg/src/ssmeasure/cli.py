"""Command-line interface.

Usage::

    ssmeasure <family> [--r R] <command> ...
    ssmeasure config PATH <command> ...

Families are ``cantor``, ``sierpinski`` and ``planar``.  Commands:

``dimension``
    similarity dimension and the constants c, R.
``measure {packing,centered} --k A..B``
    one CSV row per level plus a stabilization summary.
``sweep {packing,centered} --k K (--r-values ... | --r-from A --r-to B --points N)``
    plot data: r, lower, estimate, upper, closed_form.
``test {packing,centered} {g1..g5|ALPHA} --k K``
    interval test of a candidate value.

Exit status: 0 ok or consistent, 2 infeasible window or capacity, 3 rejected,
1 for bad input or usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal

import numpy as np

from .chausdorff import estimate_centered
from .cloud import DEFAULT_BUDGET, render_code
from .config import load_config
from .errors import CapacityExceeded, MeasureError, WindowInfeasible
from .formulas import MEASURE_OF, closed_form, test_hypothesis
from .ifs import FAMILIES, window_feasible
from .oracle import brute_centered, brute_packing
from .packing import CENTERED, PACKING, detect_stabilization, estimate_packing, levels

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_REJECTED = 0, 1, 2, 3
DECIMALS = 12

MEASURE_COLUMNS = ["k", "estimate", "epsilon", "interval_lo", "interval_hi", "witness_center",
                   "witness_partner", "witness_radius", "q_or_qk", "Q", "elapsed_ms",
                   "witness_mass"]
SWEEP_COLUMNS = ["r", "lower", "estimate", "upper", "closed_form"]
# formula compared against each family's estimate in a sweep
SWEEP_FORMULA = {("cantor", PACKING): "g1", ("sierpinski", PACKING): "g1",
                 ("planar", PACKING): "g2", ("cantor", CENTERED): "g3",
                 ("sierpinski", CENTERED): "g4", ("planar", CENTERED): "g5"}


class _Fmt:
    def __init__(self, full: bool):
        self.full = full

    def num(self, x: float) -> str:
        return repr(float(x)) if self.full else f"{x:.{DECIMALS}f}"

    def small(self, x: float) -> str:
        return repr(float(x)) if self.full else f"{x:.6e}"

    def outward(self, x: float, up: bool) -> str:
        """Round away from the enclosed value so printed intervals stay valid."""
        if self.full:
            return repr(float(x))
        q = Decimal(1).scaleb(-DECIMALS)
        return str(Decimal(float(x)).quantize(q, rounding=ROUND_CEILING if up else ROUND_FLOOR))


def parse_k_range(text: str) -> tuple:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected K or A..B, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"need 1 <= A <= B, got {text!r}")
    return lo, hi


def _point(coords, code, fmt) -> str:
    return render_code(code) + ":" + ";".join(fmt.num(v) for v in coords)


def _bound_fields(est):
    b = est.bound
    return (b.q_k, b.Q) if est.kind == PACKING else (b.q, b.Qc)


def estimate_row(est, fmt: _Fmt) -> dict:
    lo, hi = est.interval
    q, Q = _bound_fields(est)
    return {
        "k": est.level,
        "estimate": fmt.num(est.value),
        "epsilon": fmt.small(est.epsilon),
        "interval_lo": fmt.outward(lo, up=False),
        "interval_hi": fmt.outward(hi, up=True),
        "witness_center": _point(est.witness_center, est.witness_center_code, fmt),
        "witness_partner": _point(est.witness_partner, est.witness_partner_code, fmt),
        "witness_radius": fmt.num(est.witness_radius),
        "q_or_qk": q,
        "Q": fmt.num(Q),
        "elapsed_ms": f"{est.elapsed * 1e3:.1f}",
        "witness_mass": repr(float(est.witness_mass)),
    }


def estimate_record(est) -> dict:
    q, Q = _bound_fields(est)
    return {
        "k": est.level, "kind": est.kind, "estimate": est.value, "epsilon": est.epsilon,
        "interval": list(est.interval),
        "witness_center": {"coords": est.witness_center.tolist(),
                           "code": render_code(est.witness_center_code)},
        "witness_partner": {"coords": est.witness_partner.tolist(),
                            "code": render_code(est.witness_partner_code)},
        "witness_radius": est.witness_radius, "witness_mass": est.witness_mass,
        "q_or_qk": q, "Q": Q, "elapsed_ms": est.elapsed * 1e3, "s": est.s,
    }


def _note(msg: str):
    print(f"# {msg}", file=sys.stderr)


def _estimator(kind: str, oracle: bool):
    if kind == PACKING:
        return (lambda system, k, cloud: brute_packing(system, k)) if oracle else \
            (lambda system, k, cloud: estimate_packing(system, k, cloud))
    return (lambda system, k, cloud: brute_centered(system, k)) if oracle else \
        (lambda system, k, cloud: estimate_centered(system, k, cloud))


def _system(args):
    if args.family == "config":
        return load_config(args.path)
    if args.r is None:
        raise MeasureError(f"--r is required for the {args.family} family")
    return FAMILIES[args.family](args.r)


# -- commands ----------------------------------------------------------------

def cmd_dimension(args, out) -> int:
    system = _system(args)
    C = system.constants
    rec = {"system": system.name, "m": system.m, "dim": system.ambient_dim, "s": C.s,
           "c": [C.c_lo, C.c_hi], "R": [C.R_lo, C.R_hi], "r_min": C.r_min, "r_max": C.r_max}
    if args.json:
        json.dump(rec, out, indent=2)
        out.write("\n")
    else:
        def br(lo, hi):
            return f"{lo!r}" if lo == hi else f"[{lo!r}, {hi!r}]"
        out.write(f"{system.name}: s={C.s!r} c={br(C.c_lo, C.c_hi)} R={br(C.R_lo, C.R_hi)} "
                  f"r_min={C.r_min!r} r_max={C.r_max!r}\n")
    return EXIT_OK


def cmd_measure(args, out) -> int:
    system = _system(args)
    fmt = _Fmt(args.full_precision)
    k_min, k_max = args.k
    ks = list(range(k_min, k_max + 1))
    if args.kind == PACKING:
        feasible = [k for k in ks if window_feasible(system, k)]
        for k in ks:
            if k not in feasible:
                _note(f"k={k} skipped: radius window infeasible")
        ks = feasible
    run = _estimator(args.kind, args.oracle)
    estimates, status = [], EXIT_OK
    try:
        for k, cloud in levels(system, ks, args.budget):
            estimates.append(run(system, k, cloud))
    except CapacityExceeded as exc:
        _note(f"stopped at k={exc.level}: {exc}")
        status = EXIT_INFEASIBLE
    if not ks:
        status = EXIT_INFEASIBLE

    k_stb = detect_stabilization(estimates) if len(estimates) >= 2 else None
    if args.json:
        json.dump({"system": system.name, "kind": args.kind,
                   "rows": [estimate_record(e) for e in estimates], "k_stb": k_stb}, out, indent=2)
        out.write("\n")
        return status
    writer = csv.DictWriter(out, MEASURE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for est in estimates:
        writer.writerow(estimate_row(est, fmt))
    out.write(f"# k_stb={k_stb}\n" if k_stb is not None else "# not stabilized\n")
    return status


def _r_grid(args):
    if args.r_values:
        return [float(v) for v in args.r_values.split(",") if v.strip()]
    if args.r_from is None or args.r_to is None:
        raise MeasureError("sweep needs --r-values or --r-from/--r-to")
    return np.linspace(args.r_from, args.r_to, args.points).tolist()


def cmd_sweep(args, out) -> int:
    if args.family == "config":
        raise MeasureError("sweep runs over a built-in family")
    fmt = _Fmt(args.full_precision)
    name = SWEEP_FORMULA[(args.family, args.kind)]
    run = _estimator(args.kind, args.oracle)
    rows = []
    for r in _r_grid(args):
        row = {"r": repr(r), "lower": "", "estimate": "", "upper": "", "closed_form": ""}
        try:
            row["closed_form"] = fmt.num(closed_form(name, r, args.family).value)
            system = FAMILIES[args.family](r)
            est = run(system, args.k, None)
            lo, hi = est.interval
            row.update(lower=fmt.outward(lo, False), estimate=fmt.num(est.value),
                       upper=fmt.outward(hi, True))
        except MeasureError as exc:
            _note(f"r={r!r}: {type(exc).__name__}: {exc}")
        rows.append(row)
    if args.json:
        json.dump({"family": args.family, "kind": args.kind, "k": args.k, "formula": name,
                   "rows": rows}, out, indent=2)
        out.write("\n")
        return EXIT_OK
    writer = csv.DictWriter(out, SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return EXIT_OK


def cmd_test(args, out) -> int:
    system = _system(args)
    target = args.alpha.lower()
    if target in MEASURE_OF:
        if system.family is None:
            raise MeasureError("closed forms need a built-in family")
        alpha = closed_form(target, system.r, system.family).value
    else:
        try:
            alpha = float(args.alpha)
        except ValueError:
            raise MeasureError(f"expected g1..g5 or a number, got {args.alpha!r}") from None
    run = _estimator(args.kind, args.oracle)
    est = run(system, args.k, None)
    v = test_hypothesis(alpha, est)
    rec = {"alpha": alpha, "k": args.k, "estimate": est.value, "epsilon": est.epsilon,
           "interval": list(v.interval), "verdict": v.verdict, "slack": v.slack,
           "guaranteed": v.guaranteed}
    if args.json:
        json.dump(rec, out, indent=2)
        out.write("\n")
    else:
        fmt = _Fmt(args.full_precision)
        lo, hi = v.interval
        line = (f"{v.verdict}: alpha={fmt.num(alpha)} I_{args.k}=[{fmt.outward(lo, False)}, "
                f"{fmt.outward(hi, True)}] slack={fmt.small(v.slack)}")
        if v.guaranteed is not None:
            line += f" |measure-alpha|<={fmt.small(v.guaranteed)}"
        out.write(line + "\n")
    return EXIT_REJECTED if v.rejected else EXIT_OK


# -- parser ------------------------------------------------------------------

def _common(parser, top=False):
    d = {} if top else {"default": argparse.SUPPRESS}
    parser.add_argument("--json", action="store_true", help="structured output", **d)
    parser.add_argument("--threads", type=int, help="worker threads (default: all)", **d)
    parser.add_argument("--full-precision", action="store_true",
                        help="print 17 significant digits", **d)
    parser.add_argument("--oracle", action="store_true",
                        help="use the brute-force reference (small k only)", **d)
    parser.add_argument("--budget", type=int, help="point budget per level", **d)


def _kind(parser):
    parser.add_argument("kind", choices=[PACKING, CENTERED])


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse would exit with 2, which is reserved for infeasible runs
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ssmeasure",
                                description="Certified packing and centered Hausdorff "
                                            "measure estimates for self-similar sets.")
    _common(p, top=True)
    p.set_defaults(budget=DEFAULT_BUDGET)
    fams = p.add_subparsers(dest="family", required=True, metavar="family",
                            parser_class=_Parser)
    for name in list(FAMILIES) + ["config"]:
        fp = fams.add_parser(name, help="config file" if name == "config" else f"{name} family")
        if name == "config":
            fp.add_argument("path")
        else:
            fp.add_argument("--r", type=float, help="contraction ratio in (0, 1/2)")
        _common(fp)
        cmds = fp.add_subparsers(dest="command", required=True, metavar="command",
                                 parser_class=_Parser)

        c = cmds.add_parser("dimension", help="dimension and constants")
        _common(c)
        c.set_defaults(func=cmd_dimension)

        c = cmds.add_parser("measure", help="estimates over a range of levels")
        _kind(c)
        c.add_argument("--k", type=parse_k_range, required=True, help="level or range A..B")
        _common(c)
        c.set_defaults(func=cmd_measure)

        c = cmds.add_parser("sweep", help="plot data over a grid of ratios")
        _kind(c)
        c.add_argument("--k", type=int, required=True)
        c.add_argument("--r-values", help="comma-separated ratios")
        c.add_argument("--r-from", type=float)
        c.add_argument("--r-to", type=float)
        c.add_argument("--points", type=int, default=34)
        _common(c)
        c.set_defaults(func=cmd_sweep)

        c = cmds.add_parser("test", help="interval test of a candidate value")
        _kind(c)
        c.add_argument("alpha", help="g1..g5 or a number")
        c.add_argument("--k", type=int, required=True)
        _common(c)
        c.set_defaults(func=cmd_test)
    return p


def _set_threads(n):
    import numba
    limit = numba.config.NUMBA_NUM_THREADS
    if n is None:
        return
    if n < 1:
        raise MeasureError("--threads must be positive")
    if n > limit:
        _note(f"--threads {n} exceeds the {limit} available; using {limit}")
        n = limit
    numba.set_num_threads(n)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:   # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        _set_threads(args.threads)
        return args.func(args, out)
    except (WindowInfeasible, CapacityExceeded) as exc:
        print(f"ssmeasure: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except MeasureError as exc:
        print(f"ssmeasure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
