"""Command-line front end.

Every command writes one table, as CSV (header row, LF endings) or as JSON
(an object of named column arrays). Floats carry 12 significant digits and
divergences are written as the token ``inf``.

Exit codes: 0 ok, 2 usage error, 3 domain error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError
from .experiment import CountRecord, fit_model, synthesize_counts
from .metrology import (
    FourPhotonModel,
    MESModel,
    TwinFockModel,
    TwoPhotonModel,
    beating_region,
    limits,
    phase_uncertainty,
    scan_photon_number,
    uncertainty_curve,
)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 2, 3, 4
OUTPUT_DIR_ENV = "TWINFOCK_OUTPUT_DIR"

_ANGLE = re.compile(r"^([+-]?)((?:\d+\.?\d*|\.\d+)(?:e[+-]?\d+)?)?\*?pi(?:/(\d+\.?\d*))?$")


def parse_angle(text: str) -> float:
    """Radians, or a multiple of pi such as ``pi``, ``-0.5pi``, ``2*pi``, ``pi/4``."""
    s = text.strip().lower().replace(" ", "")
    m = _ANGLE.match(s)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        k = float(m.group(2)) if m.group(2) else 1.0
        div = float(m.group(3)) if m.group(3) else 1.0
        if div == 0:
            raise argparse.ArgumentTypeError(f"bad angle {text!r}")
        return sign * k * math.pi / div
    try:
        value = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad angle {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"angle must be finite, got {text!r}")
    return value


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:points`` with at least two points and ``stop > start``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:points, got {text!r}")
    start, stop = parse_angle(parts[0]), parse_angle(parts[1])
    try:
        points = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid point count must be an integer, got {parts[2]!r}") from None
    if points < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 points")
    if not stop > start:
        raise argparse.ArgumentTypeError("grid stop must exceed start")
    return np.linspace(start, stop, points)


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        raise DomainError("refusing to serialize NaN")
    # drop the sign of negative zero
    return format(x + 0.0, ".12g")


def _json_value(x):
    if x is None or isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        raise DomainError("refusing to serialize NaN")
    return float(format(x + 0.0, ".12g"))


def render(columns: list[str], rows: list[tuple], fmt: str) -> str:
    if fmt == "json":
        table = {c: [_json_value(r[i]) for r in rows] for i, c in enumerate(columns)}
        return json.dumps(table, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([v if isinstance(v, str) else format_number(v) for v in r])
    return buf.getvalue()


def _build_model(args):
    kind = args.model
    if kind in ("twin-fock", "mes"):
        if args.n is None:
            raise DomainError(f"--n is required for model {kind}")
        return TwinFockModel(args.n) if kind == "twin-fock" else MESModel(args.n)
    if kind == "p2":
        if args.v is None:
            raise DomainError("--v is required for model p2")
        return TwoPhotonModel(args.v)
    if args.r is None:
        raise DomainError("--r is required for model p4")
    return FourPhotonModel(args.r)


def _cmd_curve(args):
    model = _build_model(args)
    phi = args.grid
    p, dp, _ = uncertainty_curve(model, phi)
    return ["phi", "p", "dp_dphi"], list(zip(phi, p, dp))


def _cmd_uncertainty(args):
    model = _build_model(args)
    if not 0.0 < args.eta <= 1.0:
        raise DomainError(f"--eta must lie in (0, 1], got {args.eta}")
    phi = args.grid
    p, dp, dphi = uncertainty_curve(model, phi, success_scale=args.eta**2)
    lim = limits(model.n_total)
    rows = [(f, a, b, c, lim.sql, lim.hl) for f, a, b, c in zip(phi, p, dp, dphi)]
    return ["phi", "p", "dp_dphi", "delta_phi", "sql", "hl"], rows


def _cmd_scan(args):
    rows = [(r.n, r.n_total, r.delta_phi, r.sql, r.hl) for r in scan_photon_number(args.n_max)]
    return ["n", "n_total", "delta_phi", "sql", "hl"], rows


def _cmd_region(args):
    model = _build_model(args)
    n_total = args.n_total if args.n_total is not None else model.n_total
    lim = limits(n_total)
    boundary = beating_region(model, n_total)
    d0 = phase_uncertainty(model, 0.0).delta_phi
    return ["n_total", "sql", "delta_phi_zero", "boundary"], [
        (lim.n_total, lim.sql, d0, "none" if boundary is None else boundary)
    ]


def _cmd_limits(args):
    lim = limits(args.n_total)
    return ["n_total", "sql", "hl"], [(lim.n_total, lim.sql, lim.hl)]


def _cmd_simulate(args):
    model = _build_model(args)
    records = synthesize_counts(model, args.peak_rate, args.grid, args.exposure, args.seed)
    return ["phi", "counts", "exposure"], [(r.phi, r.counts, r.exposure) for r in records]


def read_records(path: str) -> list[CountRecord]:
    """Load ``phi, counts, exposure`` rows from a CSV or JSON file written by ``simulate``."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        if text.lstrip().startswith("{"):
            table = json.loads(text)
            rows = zip(table["phi"], table["counts"], table.get("exposure", [1.0] * len(table["phi"])))
        else:
            reader = csv.DictReader(io.StringIO(text))
            rows = [(r["phi"], r["counts"], r.get("exposure") or 1.0) for r in reader]
        return [CountRecord(float(f), int(float(c)), float(e)) for f, c, e in rows]
    except (KeyError, ValueError, TypeError) as exc:
        raise DomainError(f"malformed count file {path}: {exc}") from exc


def _cmd_fit(args):
    records = read_records(args.input)
    shape, rate = fit_model(records, args.kind, weighting=args.weighting)
    rows = [
        (f.parameter_name, f.estimate, f.std_error, f.reduced_chi_square, f.n_points, f.out_of_range)
        for f in (shape, rate)
    ]
    return ["parameter", "estimate", "std_error", "reduced_chi_square", "n_points", "out_of_range"], rows


def _add_model_args(p, kinds=("twin-fock", "mes", "p2", "p4")):
    p.add_argument("--model", required=True, choices=kinds)
    p.add_argument("--n", type=int, help="photon number N (twin-fock: N per mode; mes: total)")
    p.add_argument("--v", type=float, help="two-photon visibility V")
    p.add_argument("--r", type=float, help="four-photon distinguishability ratio E/A")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twinfock", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", parents=[common], help="probability fringe P(phi)")
    _add_model_args(p)
    p.add_argument("--grid", type=parse_grid, required=True, help="start:stop:points, e.g. 0:pi:181")
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("uncertainty", parents=[common], help="phase uncertainty against phase")
    _add_model_args(p)
    p.add_argument("--grid", type=parse_grid, required=True)
    p.add_argument("--eta", type=float, default=1.0, help="detection efficiency; rate scales as eta**2")
    p.set_defaults(func=_cmd_uncertainty)

    p = sub.add_parser("scan", parents=[common], help="uncertainty at phi=0 against photon number")
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("region", parents=[common], help="half-width of the SQL-beating window")
    _add_model_args(p)
    p.add_argument("--n-total", type=int, help="photon number for the SQL (default: the model's)")
    p.set_defaults(func=_cmd_region)

    p = sub.add_parser("limits", parents=[common], help="SQL and Heisenberg limit")
    p.add_argument("--n-total", type=int, required=True)
    p.set_defaults(func=_cmd_limits)

    p = sub.add_parser("simulate", parents=[common], help="synthetic Poisson coincidence counts")
    _add_model_args(p)
    p.add_argument("--grid", type=parse_grid, required=True)
    p.add_argument("--peak-rate", type=float, required=True, help="counts per unit exposure at P=1")
    p.add_argument("--exposure", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", parents=[common], help="least-squares fit of count data")
    p.add_argument("--input", required=True, help="CSV or JSON file with phi, counts, exposure")
    p.add_argument("--kind", choices=("p2", "p4"), required=True)
    p.add_argument("--weighting", choices=("model", "counts"), default="model")
    p.set_defaults(func=_cmd_fit)
    return parser


def _resolve_output(path: str) -> Path:
    out = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not out.is_absolute():
        out = Path(base) / out
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        columns, rows = args.func(args)
        text = render(columns, rows, args.format)
    except DomainError as exc:
        print(f"twinfock: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"twinfock: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.output is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        out = _resolve_output(args.output)
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"twinfock: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
