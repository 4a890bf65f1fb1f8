"""Command-line front end: ``slabiso <q3|gauss|cube-nd|unduloid> <verb> [flags]``.

Every float is written with 17 significant digits and no locale, so re-running
a command with the same flags reproduces its output byte for byte. Exit codes:
0 success, 1 usage or numeric error, 2 certification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import cube3, cube_nd, gauss_slab, unduloid
from .errors import CertificationError, SlabisoError
from .profile import profile_by_name, torus_density, gaussian_density
from .special_fn import Tolerances

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CERT = 2


@dataclass
class RunConfig:
    command: str
    tolerances: Tolerances = field(default_factory=Tolerances)
    output_path: Path | None = None
    format: str = "json"
    threads: int = 0


# ---------------------------------------------------------------------------
# serialisation


def fmt(x: float) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def to_json(obj, indent: int = 0) -> str:
    """JSON text with 17-significant-digit floats and stable key order."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, (bool, int, float)):
        return fmt(obj)
    if hasattr(obj, "item") and not isinstance(obj, (list, tuple, dict)):
        return fmt(obj.item())
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{to_json(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) or v is None for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        items = [pad + to_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def to_csv(header: list, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) if isinstance(x, (int, float)) else ("" if x is None else x)
                         for x in row])
    return buf.getvalue()


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        output.write_text(text if text.endswith("\n") else text + "\n")


def _gnuplot(output: Path | None, script: str) -> None:
    if output is None:
        raise SlabisoError("--gnuplot needs --output so the script can reference the data file")
    target = output.with_suffix(".gp")
    target.write_text(script.replace("@DATA@", output.name))


_GP_HEAD = 'set datafile separator ","\nset key outside\n'


# ---------------------------------------------------------------------------
# commands


def cmd_q3_verify(args) -> int:
    report = cube3.verify_appendix(args.eps, threads=args.threads or None, timing=args.timing)
    if report["verdict"] == "VERIFIED":
        value, v0, v1 = cube3.free_min_P(tuple(report["argmin"]))
        report["free_min_P"] = {"value": value, "v0": v0, "v1": v1}
    x0, xi0, v_min = cube3.solve_vmin()
    report["one_sided"] = {"x0": x0, "xi0": xi0, "v_min": v_min}
    report["mesh_v0_max_increment"] = cube3.build_mesh_v0(args.eps).max_increment()
    _emit(to_json(report), args.output)
    if args.gnuplot:
        _write_p_curves(args.output, report["argmin"])
    return EXIT_OK if report["verdict"] == "VERIFIED" else EXIT_CERT


def _write_p_curves(output: Path | None, argmin) -> None:
    """CSV of the three lower pieces along their own variables, plus a plot script."""
    if output is None:
        raise SlabisoError("--gnuplot needs --output so the script can reference the data file")
    curves = output.with_name(output.stem + "_curves.csv")
    n = 200
    v0_best, v1_best = argmin
    rows = []
    for i in range(n + 1):
        v0 = cube3.SPHERE_END * i / n
        v1 = cube3.CYL_END + (cube3.PLANE_END - cube3.CYL_END) * i / n
        rows.append([v0, cube3.p1(v0), v1, cube3.p2(v1), cube3.p3(v0_best, v1)])
    curves.write_text(to_csv(["v0", "p1", "v1", "p2", "p3_at_best_v0"], rows))
    script = _GP_HEAD + (
        'set multiplot layout 1,3\n'
        'plot "@DATA@" using 1:2 with lines title "p1(v0)"\n'
        'plot "@DATA@" using 3:4 with lines title "p2(v1)"\n'
        'plot "@DATA@" using 3:5 with lines title "p3(v0*, v1)"\n'
        'unset multiplot\n')
    _gnuplot(curves, script)




def cmd_q3_ranges(args) -> int:
    if args.sweep:
        rows = []
        for i in range(1, args.sweep + 1):
            beta = i / args.sweep
            r = cube3.q3_ranges(beta)
            rows.append([
                beta,
                r.sphere[1] if r.sphere else None,
                r.cylinder[0] if r.cylinder else None,
                r.cylinder[1] if r.cylinder else None,
                r.plane[0] if r.plane else None,
                r.uncertainty[0],
                r.uncertainty[1],
            ])
        header = ["beta", "sphere_hi", "cylinder_lo", "cylinder_hi", "plane_lo",
                  "gap_lo", "gap_hi"]
        _emit(to_csv(header, rows), args.output)
        if args.gnuplot:
            _gnuplot(args.output, _GP_HEAD + (
                'set xlabel "beta"\nset ylabel "volume"\n'
                'plot "@DATA@" using 1:2 with lines title "sphere",'
                ' "" using 1:4 with lines title "cylinder",'
                ' "" using 1:5 with lines title "plane"\n'))
        return EXIT_OK
    ranges = cube3.q3_ranges(args.beta)
    out = ranges.as_dict()
    out["sphere_beta_threshold"] = cube3.sphere_threshold_beta()
    out["plane_beta_threshold"] = cube3.plane_threshold_beta()
    _emit(to_json(out), args.output)
    return EXIT_OK


def cmd_q3_one_sided(args) -> int:
    x0, xi0, v_min = cube3.solve_vmin()
    if args.output is not None and args.samples:
        top = 5.0 / 3.0
        rows = [[top * i / args.samples, cube3.one_sided_volume(top * i / args.samples)]
                for i in range(1, args.samples + 1)]
        _emit(to_csv(["xi", "F"], rows), args.output)
        if args.gnuplot:
            _gnuplot(args.output, _GP_HEAD + (
                'set xlabel "xi"\nset ylabel "F"\n'
                f'plot "@DATA@" using 1:2 with lines title "F", {fmt(v_min)} title "v_min"\n'))
        return EXIT_OK
    out = {"x0": x0, "xi0": xi0, "v_min": v_min, "F_at_5_3": cube3.one_sided_volume(5.0 / 3.0),
           "lambda_floor": cube3.lambda_floor()}
    _emit(to_json(out), args.output)
    return EXIT_OK


def cmd_gauss_profile(args) -> int:
    rows = []
    for point in gauss_slab.profile_table(args.T, args.samples):
        params = point.params or (None, None, None)
        rows.append([point.vbar, point.area, point.kind, *params])
    _emit(to_csv(["vbar", "area", "kind", "v0", "v1", "lambda"], rows), args.output)
    if args.gnuplot:
        _gnuplot(args.output, _GP_HEAD + (
            'set xlabel "vbar"\nset ylabel "area"\n'
            'phi(s) = exp(-s*s/2)/sqrt(2*pi)\n'
            f'plot "@DATA@" using 1:2 with lines title "profile T={fmt(args.T)}",'
            f' 1/{fmt(args.T)} title "vertical"\n'))
    return EXIT_OK


def cmd_gauss_thresholds(args) -> int:
    report = gauss_slab.phase_report(args.T)
    out = {
        "T": report.T,
        "v_v_plus": report.v_v_plus,
        "v_v_plus_plus": report.v_v_plus_plus,
        "v_h_estimate": report.v_h_estimate,
        "v_v_estimate": report.v_v_estimate,
        "regime": report.regime,
        "note": report.note,
    }
    _emit(to_json(out), args.output)
    return EXIT_OK


def cmd_cube_nd(args) -> int:
    try:
        report = cube_nd.refutation_report(args.n_max)
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_CERT
    _emit(to_json([v.as_dict() for v in report]), args.output)
    if args.csv is not None:
        args.csv.write_text(cube_nd.report_csv(report))
        if args.gnuplot:
            _gnuplot(args.csv, _GP_HEAD + (
                'set xlabel "k"\nset ylabel "tube area"\nset logscale y\n'
                'plot for [n=10:11] "@DATA@" using ($1==n ? $2 : 1/0):3 '
                'with linespoints title sprintf("n=%d", n)\n'))
    elif args.gnuplot:
        raise SlabisoError("--gnuplot needs --csv for cube-nd check")
    return EXIT_OK


def cmd_unduloid_shape(args) -> int:
    prof = profile_by_name(args.profile)
    sh = unduloid.shape(prof, args.v0, args.v1, args.samples)
    text = unduloid.write_shape_csv(sh, None)
    _emit(text, args.output)
    if args.gnuplot:
        _gnuplot(args.output, _GP_HEAD + (
            'set xlabel "t"\nset ylabel "s"\n'
            'plot "@DATA@" using 1:2 with lines title "branch"\n'))
    if args.residual:
        density = torus_density() if prof.name.startswith("torus") else gaussian_density()
        print(f"cmc_residual {fmt(unduloid.cmc_residual(sh, density))}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", "-o", type=Path, default=None, help="write here instead of stdout")
    p.add_argument("--gnuplot", action="store_true", help="also write a .gp script next to the data")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="slabiso", description="Isoperimetric profiles on weighted slabs.")
    parser.add_argument("--threads", type=int, default=0,
                        help="worker threads (0 = auto; SLABISO_THREADS overrides)")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    q3 = groups.add_parser("q3", help="box [0,beta] x [0,1]^2")
    q3_verbs = q3.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = q3_verbs.add_parser("verify-appendix", help="certified positivity of the volume functional")
    p.add_argument("--eps", type=_positive, default=cube3.DEFAULT_EPS)
    p.add_argument("--timing", action="store_true", help="record wall time in the report")
    _common(p)
    p.set_defaults(func=cmd_q3_verify)
    p = q3_verbs.add_parser("ranges", help="verified volume ranges for edge length beta")
    p.add_argument("--beta", type=_positive, default=1.0)
    p.add_argument("--sweep", type=int, default=0, help="CSV over beta = 1/N .. 1 instead")
    _common(p)
    p.set_defaults(func=cmd_q3_ranges)
    p = q3_verbs.add_parser("one-sided", help="one-sided volume minimum")
    p.add_argument("--samples", type=int, default=0, help="with --output: CSV of F on (0, 5/3]")
    _common(p)
    p.set_defaults(func=cmd_q3_one_sided)

    gauss = groups.add_parser("gauss", help="Gaussian slab [0,T] x R")
    g_verbs = gauss.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = g_verbs.add_parser("profile", help="numerical profile table")
    p.add_argument("--T", type=_positive, required=True)
    p.add_argument("--samples", type=int, default=19)
    _common(p)
    p.set_defaults(func=cmd_gauss_profile)
    p = g_verbs.add_parser("thresholds", help="regime and phase thresholds")
    p.add_argument("--T", type=_positive, required=True)
    _common(p)
    p.set_defaults(func=cmd_gauss_thresholds)

    nd = groups.add_parser("cube-nd", help="high-dimensional unit cube")
    nd_verbs = nd.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = nd_verbs.add_parser("check", help="tube-area monotonicity report")
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--csv", type=Path, default=None, help="also write n,k,value rows here")
    _common(p)
    p.set_defaults(func=cmd_cube_nd)

    und = groups.add_parser("unduloid", help="generalized unduloid branches")
    u_verbs = und.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = u_verbs.add_parser("shape", help="sample one monotone branch")
    p.add_argument("--profile", default="torus2")
    p.add_argument("--v0", type=float, required=True)
    p.add_argument("--v1", type=float, required=True)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--residual", action="store_true", help="report the CMC residual on stderr")
    _common(p)
    p.set_defaults(func=cmd_unduloid_shape)
    return parser


def _validate(args) -> None:
    for name in ("samples", "sweep"):
        if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
            raise SlabisoError(f"--{name} must be non-negative")
    if getattr(args, "group", None) == "unduloid" and args.samples < 2:
        raise SlabisoError("--samples must be at least 2")
    if getattr(args, "group", None) == "gauss" and getattr(args, "verb", "") == "profile" \
            and args.samples < 1:
        raise SlabisoError("--samples must be at least 1")


def main(argv: list | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.threads = getattr(args, "threads", 0)
    try:
        _validate(args)
        return args.func(args)
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_CERT
    except (SlabisoError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
