"""Command-line front end.

Every command writes one JSON document (CSV for sweeps) to stdout and
diagnostics to stderr. Exit codes: 0 ok, 2 invalid input, 3 numerical or
convergence failure, 4 resource guard.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .bounds import (
    parallel_area,
    parallel_volume,
    pinch_bounds,
    tube_area_bounds,
    tube_breakdown_radius,
    tube_polynomial,
    tube_volume_bounds,
)
from .core import Box, Ellipsoid, ellipsoid_volume, make_ellipsoid
from .errors import DomainError, GeometryError
from .grassmann import hit_measure_ratio
from .john import containment_chain, john_sandwich
from .lattice import SWEEP_COLUMNS, dilation_sweep, lattice_discrepancy, slope_trend
from .measures import (
    box_mean_curvatures,
    ellipsoid_mean_curvatures_quadrature,
    probe_box,
    probe_ellipsoid,
    sphere_mean_curvatures,
    steiner_fit_mean_curvatures,
)
from .serialize import dumps, rows_to_csv

SCHEMA_VERSION = 1
COMMANDS = ("measures", "bounds", "tube", "grassmann", "lattice", "john", "sweep", "acceptance")


@dataclass
class RunConfig:
    command: str
    input_path: Optional[str] = None
    seed: int = 0
    rel_tol: float = 1e-10
    trials: int = 100_000
    output_format: str = "json"


class UsageError(DomainError):
    pass


# ---------------------------------------------------------------------------
# parsing helpers


def _floats(text: str, name: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--{name} must be a comma-separated list of numbers, got {text!r}") from None


def _load_input(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read input file {path}: {exc}") from None


def _ellipsoid(args, payload: dict, axes_attr: str = "axes") -> Ellipsoid:
    axes_text = getattr(args, axes_attr, None)
    if axes_text is None:
        if "semi_axes" in payload:
            return Ellipsoid.from_dict(payload)
        raise UsageError(f"--{axes_attr.replace('_', '-')} is required (or an --input file with semi_axes)")
    axes = _floats(axes_text, axes_attr)
    n = len(axes)
    if getattr(args, "dim", None) is not None and args.dim != n:
        raise UsageError(f"--dim {args.dim} does not match the {n} values given in --axes")
    if any(not a > 0 for a in axes):
        raise UsageError(f"semi_axes must be strictly positive (positivity invariant violated): {axes}")
    frame = None
    if getattr(args, "frame", None):
        vals = _floats(args.frame, "frame")
        if len(vals) != n * n:
            raise UsageError(f"--frame needs {n * n} row-major values, got {len(vals)}")
        frame = np.array(vals).reshape(n, n)
    center = _floats(args.center, "center") if getattr(args, "center", None) else None
    return make_ellipsoid(axes, frame, center)


def _read_points(path: str) -> np.ndarray:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read points file {path}: {exc}") from None
    try:
        if p.suffix.lower() == ".json" or text.lstrip().startswith("["):
            pts = json.loads(text)
        else:
            pts = [[float(x) for x in row] for row in csv.reader(text.splitlines()) if row]
        return np.asarray(pts, dtype=float)
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"points file {path} is not a JSON array or numeric CSV: {exc}") from None


# ---------------------------------------------------------------------------
# commands


def cmd_measures(args, payload):
    body = args.body
    if body == "box":
        sides = _floats(args.axes, "axes") if args.axes else payload.get("side_lengths")
        if not sides:
            raise UsageError("--axes (side lengths) is required for --body box")
        b = Box(sides, _floats(args.center, "center") if args.center else None)
        if args.method == "steiner":
            m = steiner_fit_mean_curvatures(probe_box(b), b.dim, args.samples, args.seed)
        else:
            m = box_mean_curvatures(b)
        return {"body": b.to_dict(), "mean_curvatures": m.to_dict()}
    e = _ellipsoid(args, payload)
    if args.method == "steiner":
        m = steiner_fit_mean_curvatures(probe_ellipsoid(e), e.dim, args.samples, args.seed)
    elif args.method == "closed":
        if not np.all(e.semi_axes == e.semi_axes[0]):
            raise UsageError("--method closed applies only to balls (all semi-axes equal)")
        m = sphere_mean_curvatures(float(e.semi_axes[0]), e.dim)
    else:
        scheme = "angular" if args.method == "angular" else "radial"
        m = ellipsoid_mean_curvatures_quadrature(e, args.rel_tol, scheme=scheme)
    return {"body": e.to_dict(), "volume": ellipsoid_volume(e), "mean_curvatures": m.to_dict()}


def cmd_bounds(args, payload):
    e = _ellipsoid(args, payload)
    idx = range(e.dim) if args.index is None else [args.index]
    m = ellipsoid_mean_curvatures_quadrature(e, args.rel_tol)
    return {
        "body": e.to_dict(),
        "bounds": [pinch_bounds(e, i).to_dict() for i in idx],
        "quadrature": [float(m.values[i]) for i in idx],
    }


def cmd_tube(args, payload):
    e = _ellipsoid(args, payload)
    if args.rho is None:
        raise UsageError("--rho is required")
    m = ellipsoid_mean_curvatures_quadrature(e, args.rel_tol)
    rho = args.rho
    return {
        "body": e.to_dict(),
        "rho": rho,
        "tube_polynomial": tube_polynomial(e).to_dict(),
        "f": float(tube_polynomial(e)(rho)),
        "area_bounds": tube_area_bounds(e, rho).to_dict(),
        "volume_bounds": tube_volume_bounds(e, rho).to_dict(),
        "parallel_area": parallel_area(m, rho),
        "parallel_volume": parallel_volume(ellipsoid_volume(e), m, rho),
        "breakdown_radius": tube_breakdown_radius(e, m),
    }


def cmd_grassmann(args, payload):
    e1 = _ellipsoid(args, payload)
    if args.axes2:
        e2 = make_ellipsoid(_floats(args.axes2, "axes2"), None, e1.center)
    else:
        e2 = make_ellipsoid(np.ones(e1.dim), None, e1.center)
    if e2.dim != e1.dim:
        raise UsageError("--axes and --axes2 must have the same length")
    r = args.r_flat
    ratio, se, (h1, h2) = hit_measure_ratio(e1, e2, r, args.trials, args.seed, workers=args.workers)
    q1 = ellipsoid_mean_curvatures_quadrature(e1, args.rel_tol).values[r - 1]
    q2 = ellipsoid_mean_curvatures_quadrature(e2, args.rel_tol).values[r - 1]
    return {
        "body": e1.to_dict(),
        "reference_body": e2.to_dict(),
        "r_flat": r,
        "hits": h1.to_dict(),
        "reference_hits": h2.to_dict(),
        "ratio": ratio,
        "std_error": se,
        "quadrature_ratio": float(q1 / q2),
    }


def cmd_lattice(args, payload):
    e = _ellipsoid(args, payload)
    if e.dim < 2:
        raise UsageError("lattice discrepancy needs dimension >= 2")
    rep = lattice_discrepancy(e, workers=args.workers)
    return {"body": e.to_dict(), "report": rep.to_dict()}


def cmd_john(args, payload):
    if not args.points:
        raise UsageError("--points FILE is required")
    pts = _read_points(args.points)
    js = john_sandwich(pts, centrally_symmetric=args.symmetric, epsilon=args.epsilon, rel_tol=args.rel_tol)
    out = js.to_dict()
    if pts.shape[0] > pts.shape[1]:
        out["containment"] = containment_chain(pts, js.mvee, seed=args.seed)
    return out


def cmd_sweep(args, payload):
    """Returns (rows, columns, extra) for CSV, or a dict for JSON."""
    from .sweeps import dilation_family, pinch_batch, tube_batch

    kind = args.kind
    lam_max = args.lambda_max
    if kind == "dilation" and args.axes:
        e = _ellipsoid(args, payload)
        lam = [float(x) for x in range(1, lam_max + 1)]
        rows = dilation_sweep(e, lam, workers=args.workers)
        trend = slope_trend(lam, [r["ratio"] for r in rows])
        return {"rows": rows, "columns": SWEEP_COLUMNS, "trend": trend.to_dict(), "figure_rows": {"body": rows}}
    if kind == "dilation":
        fam = dilation_family(args.count, dims=(args.dim or 2,), lambdas=range(1, lam_max + 1), seed=args.seed)
        rows = []
        for label, v in fam.items():
            for r in v["rows"] or []:
                rows.append(dict(r, body=label))
        cols = ("body",) + SWEEP_COLUMNS
        trends = {k: v["trend"].to_dict() for k, v in fam.items()}
        figs = {k: v["rows"] for k, v in fam.items() if v["rows"] is not None}
        return {"rows": rows, "columns": cols, "trend": trends, "figure_rows": figs}
    if kind == "pinch":
        dims = (args.dim,) if args.dim else (2, 3, 4, 5)
        rows = pinch_batch(args.count, dims=dims, seed=args.seed, rel_tol=args.rel_tol)
        for r in rows:
            r["semi_axes"] = ";".join(format(x, ".17g") for x in r["semi_axes"])
        cols = ("body", "dim", "index", "semi_axes", "value", "lower", "upper", "inside", "ratio")
        return {"rows": rows, "columns": cols}
    rows = tube_batch(args.count, dims=(args.dim,) if args.dim else (2, 3, 4), seed=args.seed, rel_tol=args.rel_tol)
    cols = ("body", "dim", "rho", "area", "lower", "upper", "inside", "breakdown_over_s1")
    return {"rows": rows, "columns": cols}


def cmd_acceptance(args, payload):
    from .acceptance import run_all

    numbers = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_all(numbers, out_dir=args.out, stream=sys.stderr)
    return {"passed": all(c.passed for c in results), "criteria": [c.to_dict() for c in results]}


HANDLERS = {
    "measures": cmd_measures,
    "bounds": cmd_bounds,
    "tube": cmd_tube,
    "grassmann": cmd_grassmann,
    "lattice": cmd_lattice,
    "john": cmd_john,
    "sweep": cmd_sweep,
    "acceptance": cmd_acceptance,
}


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", dest="input_path", help="JSON file with the body (ellipsoid or box dict)")
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for Monte Carlo streams (default 0)")
    common.add_argument("--rel-tol", type=float, default=1e-10, help="quadrature relative tolerance (default 1e-10)")
    common.add_argument("--trials", type=int, default=100_000, help="Monte Carlo flats (default 1e5)")
    common.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="directory for report files and figures")
    common.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo / lattice partitions")

    body = argparse.ArgumentParser(add_help=False)
    body.add_argument("--axes", help="comma-separated semi-axes (side lengths for --body box)")
    body.add_argument("--dim", type=int, help="ambient dimension (checked against --axes)")
    body.add_argument("--frame", help="row-major orthonormal frame, n*n comma-separated values")
    body.add_argument("--center", help="comma-separated centre")

    p = argparse.ArgumentParser(prog="ellipsoid-measures", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("measures", parents=[common, body], help="integral mean curvatures")
    s.add_argument("--body", choices=("ellipsoid", "box"), default="ellipsoid")
    s.add_argument("--method", choices=("quadrature", "angular", "steiner", "closed"), default="quadrature")
    s.add_argument("--samples", type=int, default=200_000, help="Monte Carlo points for --method steiner")

    s = sub.add_parser("bounds", parents=[common, body], help="pinch bounds on M_i")
    s.add_argument("--index", type=int, help="single index i (default: all)")

    s = sub.add_parser("tube", parents=[common, body], help="tube polynomial and parallel-body bounds")
    s.add_argument("--rho", type=float)

    s = sub.add_parser("grassmann", parents=[common, body], help="flat-hit ratio Monte Carlo")
    s.add_argument("--axes2", help="reference ellipsoid semi-axes (default unit ball)")
    s.add_argument("--r-flat", type=int, default=1, help="flat dimension r (estimates M_{r-1})")

    sub.add_parser("lattice", parents=[common, body], help="lattice count and discrepancy")

    s = sub.add_parser("john", parents=[common], help="MVEE and John sandwich of a point set")
    s.add_argument("--points", help="JSON array or CSV file of points")
    s.add_argument("--symmetric", action="store_true", help="assert the set is centrally symmetric")
    s.add_argument("--epsilon", type=float, default=1e-8)

    s = sub.add_parser("sweep", parents=[common, body], help="batch studies (CSV by default)")
    s.add_argument("--kind", choices=("dilation", "pinch", "tube"), default="dilation")
    s.add_argument("--lambda-max", type=int, default=50)
    s.add_argument("--count", type=int, default=10, help="random bodies per dimension")
    s.set_defaults(output_format=None)

    s = sub.add_parser("acceptance", parents=[common], help="run every exit criterion")
    s.add_argument("--only", help="comma-separated criterion numbers")
    return p


def _config_echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if v is not None}


def _write(text: str, args, name: str):
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text, encoding="utf-8")


def run(config: RunConfig, args) -> int:
    payload = _load_input(config.input_path)
    result = HANDLERS[config.command](args, payload)
    if config.command == "sweep":
        fmt = config.output_format or "csv"
        if args.out and result.get("figure_rows"):
            from .plotting import plot_dilation

            plot_dilation(result["figure_rows"], Path(args.out) / "dilation_ratio.png")
        if fmt == "csv":
            _write(rows_to_csv(result["rows"], result["columns"]), args, f"sweep_{args.kind}.csv")
            return 0
        result = {k: v for k, v in result.items() if k != "figure_rows"}
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": config.command,
        "config_echo": _config_echo(args),
        "result": result,
    }
    _write(dumps(doc), args, f"{config.command}.json")
    if config.command == "acceptance" and not result["passed"]:
        return 1
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = RunConfig(
        command=args.command,
        input_path=args.input_path,
        seed=args.seed,
        rel_tol=args.rel_tol,
        trials=args.trials,
        output_format=args.output_format,
    )
    try:
        return run(config, args)
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
