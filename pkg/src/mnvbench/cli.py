"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check fails (or output
cannot be written), 2 on usage or parse errors.  Time is given as
``--s = C - t``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Sequence

from . import __version__
from .errors import SingularPoint, ToleranceNotMet, VerificationError
from .reports import ProbeSeries, QuadratureReport, VerificationReport

CHECKS = ("pde", "dbar", "denominator", "realness", "geometry", "singularity")
FIELDS = ("U", "V", "Q", "gamma", "delta")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# certificate runners (module level so worker processes can import them)


def _run_single(name: str) -> list[VerificationReport]:
    from . import solution

    b = solution.build_solution()
    fn: dict[str, Callable] = {
        "pde": solution.verify_mnv,
        "dbar": solution.verify_dbar_constraint,
        "denominator": solution.verify_denominator_identity,
        "realness": solution.verify_realness,
        "singularity": solution.singular_point_audit,
    }
    if name == "geometry":
        return _run_geometry(b)
    try:
        return [fn[name](b)]
    except VerificationError as exc:
        return [_failed(name, exc)]


def _failed(name: str, exc: VerificationError) -> VerificationReport:
    if isinstance(exc.report, VerificationReport):
        report = exc.report
        report.status = "fail"
    else:
        report = VerificationReport(check=name, status="fail", degree=-1, terms=0)
    report.extra.setdefault("error", str(exc))
    return report


def _run_geometry(b) -> list[VerificationReport]:
    import time

    from . import geometry

    t0 = time.perf_counter()
    try:
        parts = geometry.structural_certificates()
        ok = all(p.passed for p in parts)
    except VerificationError as exc:
        parts, ok = [_failed("geometry:conformal", exc)], False
    conformal = VerificationReport(
        check="geometry:conformal",
        status="pass" if ok else "fail",
        degree=max(p.degree for p in parts),
        terms=max(p.terms for p in parts),
        millis=round((time.perf_counter() - t0) * 1000, 3),
        extra={p.check: p.passed for p in parts},
    )
    try:
        inv = geometry.invert_immersion(geometry.enneper_immersion())
        rep = geometry.verify_potential_matches_U(inv, geometry.fundamental_form(inv), b)
        potential = rep.potential_certificate
    except VerificationError as exc:
        potential = _failed("geometry:potential", exc)
    return [conformal, potential]


def run_checks(which: str, workers: int = 1) -> list[VerificationReport]:
    names = ["dbar", "pde", "denominator", "realness", "singularity", "geometry"] if which == "all" else [which]
    if workers > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_single, names))
    else:
        batches = [_run_single(n) for n in names]
    return [r for batch in batches for r in batch]


# ---------------------------------------------------------------------------
# formatting


def _num(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def _csv(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([_num(v) for v in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, allow_nan=False) + "\n"


def format_verify(reports: list[VerificationReport], fmt: str, timings: bool) -> str:
    if fmt == "json":
        return _json([r.to_dict(timings) for r in reports])
    if fmt == "csv":
        cols = ["check", "status", "degree", "terms", "millis"]
        return _csv([cols] + [[r.to_dict(timings)[c] for c in cols] for r in reports])
    lines = []
    for r in reports:
        t = f" millis={r.millis}" if timings and r.millis is not None else ""
        lines.append(f"{r.status.upper():4} {r.check:22} degree={r.degree} terms={r.terms}{t}")
    passed = sum(r.passed for r in reports)
    lines.append(f"{passed}/{len(reports)} certificates pass")
    return "\n".join(lines) + "\n"


def format_flat(d: dict, fmt: str) -> str:
    if fmt == "json":
        return _json(d)
    if fmt == "csv":
        return _csv([list(d), list(d.values())])
    return "".join(f"{k}: {_num(v)}\n" for k, v in d.items())


def format_probe(p: ProbeSeries, fmt: str) -> str:
    d = p.to_dict()
    if fmt == "json":
        return _json(d)
    if fmt == "csv":
        return _csv([["r", "value"], *zip(p.abscissae, p.values)])
    lines = [f"{p.kind_name} probe of {p.field} at phi={p.phi!r}, s={p.s!r}"]
    lines += [f"  r={r!r:<24} value={v!r}" for r, v in zip(p.abscissae, p.values)]
    lines.append(f"extrapolated limit: {p.extrapolated_limit:.6f} ({p.method})")
    if p.reference is not None:
        lines.append(f"reference: {p.reference:.6f}  deviation: {p.deviation:.3e}")
    if p.sup is not None:
        lines.append(f"sup |r^2 {p.field}|: {p.sup!r} ({'stable' if p.sup_stable else 'unstable'})")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a real or rational number: {text!r}") from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def cmd_verify(args) -> tuple[str, int]:
    reports = run_checks(args.check, args.workers)
    code = 0 if all(r.passed for r in reports) else 1
    return format_verify(reports, args.format, not args.no_timings), code


def cmd_integrate(args) -> tuple[str, int]:
    from .numerics import integrate_U2

    try:
        report = integrate_U2(float(args.s), args.tol, workers=args.workers)
    except ToleranceNotMet as exc:
        sys.stderr.write(f"ToleranceNotMet: {exc}\n")
        return "", 1
    targets = {"3pi": 3 * math.pi, "2pi": 2 * math.pi}
    verdict = min(targets, key=lambda k: abs(report.value - targets[k]))
    deviation = abs(report.value - targets[verdict])
    d = {**report.to_dict(), "verdict": verdict, "deviation": deviation}
    return format_flat(d, args.format), 0 if deviation <= 10 * args.tol else 1


def cmd_probe(args) -> tuple[str, int]:
    from .numerics import decay_probe, ray_limit_probe

    s = float(args.s)
    if args.kind == "ray":
        if s != 0:
            raise UsageError("ray probes are defined at s = 0 only")
        if args.field != "U":
            raise UsageError("ray probes support field U only")
        p = ray_limit_probe(args.phi)
        ok = p.deviation <= 1e-6
    else:
        p = decay_probe(args.phi, s, args.field)
        ok = p.sup_stable and (p.reference is None or p.deviation <= 1e-2)
    return format_probe(p, args.format), 0 if ok else 1


def export_grid(nx: int, ny: int, bounds: tuple[float, float, float, float], s: float, field: str) -> str:
    from .numerics import compiled

    xmin, xmax, ymin, ymax = bounds
    cf = compiled(field)

    def axis(lo, hi, n):
        return [lo if k == 0 else hi if k == n - 1 else lo + (hi - lo) * k / (n - 1) for k in range(n)]

    rows = [["x", "y", "re", "im"]]
    for yv in axis(ymin, ymax, ny):
        for xv in axis(xmin, xmax, nx):
            try:
                v = cf.scalar(xv, yv, s)
                re_s, im_s = format(v.real, ".17g"), format(v.imag, ".17g")
            except SingularPoint:
                re_s = im_s = ""
            rows.append([format(xv, ".17g"), format(yv, ".17g"), re_s, im_s])
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def cmd_export(args) -> tuple[str, int]:
    if args.nx < 2 or args.ny < 2:
        raise UsageError("grid needs nx, ny >= 2")
    try:
        bounds = tuple(float(v) for v in args.range.split(","))
    except ValueError:
        raise UsageError(f"bad --range {args.range!r}") from None
    if len(bounds) != 4 or not bounds[0] < bounds[1] or not bounds[2] < bounds[3]:
        raise UsageError("--range must be xmin,xmax,ymin,ymax with xmin<xmax and ymin<ymax")
    if args.field not in ("U", "V", "Q"):
        raise UsageError("export supports fields U, V, Q")
    return export_grid(args.nx, args.ny, bounds, float(args.s), args.field), 0


def cmd_eval(args) -> tuple[str, int]:
    from .algebra import format_gauss
    from .expr import ParseError, parse_rational
    from .numerics import default_bundle, eval_field
    from .solution import field_by_name

    name = args.field or (args.expr.strip() if args.expr and args.expr.strip() in FIELDS else None)
    if name is not None:
        f = field_by_name(default_bundle(), name)
        label = name
    elif args.expr is not None:
        try:
            f = parse_rational(args.expr)
        except ParseError as exc:
            raise UsageError(f"ParseError: {exc}") from None
        label = args.expr
    else:
        raise UsageError("eval needs --expr or --field")
    x, y, s = args.x, args.y, args.s
    try:
        if args.exact:
            value = f.evaluate(x, y, s)
            d = {"expr": label, "x": str(x), "y": str(y), "s": str(s), "value": format_gauss(value)}
        else:
            v = eval_field(f, float(x), float(y), float(s))
            d = {"expr": label, "x": float(x), "y": float(y), "s": float(s), "re": v.real, "im": v.imag}
    except (SingularPoint, ZeroDivisionError):
        sys.stderr.write("SingularPoint: denominator vanishes at the requested point\n")
        return "", 1
    return format_flat(d, args.format), 0


# ---------------------------------------------------------------------------
# argument parsing


def _shared(p: argparse.ArgumentParser, s_default: str = "0") -> None:
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--s", type=_rational, default=Fraction(s_default), help="s = C - t (real or a/b)")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--workers", type=_positive_int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mnvbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run exact certificates")
    p.add_argument("--check", choices=(*CHECKS, "all"), default="all")
    p.add_argument("--no-timings", action="store_true", help="emit millis as null")
    p.add_argument("--tol", type=float, default=None, help="unused; accepted for uniformity")
    _shared(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("integrate", help="integral of U^2 over the plane")
    p.add_argument("--tol", type=float, default=1e-6)
    _shared(p, "1")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("probe", help="ray-limit or decay probe")
    p.add_argument("kind", choices=("ray", "decay"))
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--field", choices=("U", "V"), default="U")
    p.add_argument("--tol", type=float, default=None, help="unused; accepted for uniformity")
    _shared(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("export", help="CSV grid of a field (x,y,re,im)")
    p.add_argument("--nx", type=int, default=101)
    p.add_argument("--ny", type=int, default=101)
    p.add_argument("--range", default="-3,3,-3,3", help="xmin,xmax,ymin,ymax")
    p.add_argument("--field", default="U")
    p.add_argument("--tol", type=float, default=None, help="unused; accepted for uniformity")
    _shared(p, "1")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("eval", help="evaluate an expression or a named field")
    p.add_argument("--expr", default=None)
    p.add_argument("--field", choices=FIELDS, default=None)
    p.add_argument("--x", type=_rational, required=True)
    p.add_argument("--y", type=_rational, required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--tol", type=float, default=None, help="unused; accepted for uniformity")
    _shared(p)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, code = args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            sys.stderr.write(f"cannot write {args.out}: {exc}\n")
            return 1
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
