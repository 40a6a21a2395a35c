"""Batch drivers over random ellipsoid families."""
from __future__ import annotations

import math

import numpy as np

from .bounds import (
    parallel_area,
    pinch_bounds,
    tube_area_bounds,
    tube_breakdown_radius,
    tube_constants,
    tube_polynomial,
)
from .core import make_ellipsoid, random_rotation
from .lattice import dilation_sweep, slope_trend
from .measures import ellipsoid_mean_curvatures_quadrature
from .rng import stream_rng


def random_ellipsoid(rng: np.random.Generator, n: int, low: float = 0.1, high: float = 10.0, rotate: bool = True):
    """Semi-axes log-uniform in [low, high], Haar-random frame."""
    a = np.exp(rng.uniform(math.log(low), math.log(high), n))
    frame = random_rotation(n, rng) if rotate else None
    return make_ellipsoid(a, frame)


def pinch_batch(count: int, dims=(2, 3, 4, 5), seed: int = 0, rel_tol: float = 1e-10) -> list:
    """Quadrature M_i against pinch bounds for ``count`` random ellipsoids."""
    rows = []
    for j in range(count):
        rng = stream_rng(seed, 1, j)
        n = int(dims[j % len(dims)])
        e = random_ellipsoid(rng, n)
        m = ellipsoid_mean_curvatures_quadrature(e, rel_tol)
        for i in range(n):
            b = pinch_bounds(e, i)
            slack = rel_tol * m.values[i] + m.error_estimate[i]
            rows.append(
                {
                    "body": j,
                    "dim": n,
                    "index": i,
                    "semi_axes": e.semi_axes.tolist(),
                    "value": float(m.values[i]),
                    "lower": b.lower,
                    "upper": b.upper,
                    "inside": bool(b.lower - slack <= m.values[i] <= b.upper + slack),
                    "ratio": b.ratio,
                    "ratio_expected": b.constants_used["ratio_bound"],
                    "stated_ratio": b.constants_used["stated_ratio"],
                }
            )
    return rows


def tube_batch(count: int, dims=(2, 3, 4), fractions=(0.1, 0.5, 1.0), seed: int = 0, rel_tol: float = 1e-10) -> list:
    """Parallel area against the tube interval at rho = fraction * s_1(a) / n."""
    rows = []
    for j in range(count):
        rng = stream_rng(seed, 2, j)
        n = int(dims[j % len(dims)])
        e = random_ellipsoid(rng, n)
        m = ellipsoid_mean_curvatures_quadrature(e, rel_tol)
        s1 = float(np.sum(e.semi_axes))
        breakdown = tube_breakdown_radius(e, m)
        for fr in fractions:
            rho = fr * s1 / n
            b = tube_area_bounds(e, rho)
            area = parallel_area(m, rho)
            rows.append(
                {
                    "body": j,
                    "dim": n,
                    "rho": rho,
                    "area": area,
                    "lower": b.lower,
                    "upper": b.upper,
                    "inside": bool(b.lower <= area <= b.upper),
                    "breakdown_over_s1": breakdown / s1,
                }
            )
    return rows


def tube_curves(count: int = 4, n: int = 3, seed: int = 0, points: int = 200) -> tuple:
    """(curves, constants) for plotting area / f(rho) across radii."""
    curves = []
    for j in range(count):
        e = random_ellipsoid(stream_rng(seed, 3, j), n)
        m = ellipsoid_mean_curvatures_quadrature(e)
        f = tube_polynomial(e)
        s1 = float(np.sum(e.semi_axes))
        x = np.geomspace(1e-2, 1e2, points)
        y = [parallel_area(m, r * s1) / float(f(r * s1)) for r in x]
        curves.append((f"a={np.round(e.semi_axes, 2).tolist()}", x, np.array(y)))
    return curves, tube_constants(n)


def dilation_family(count: int, dims=(2, 3), lambdas=range(1, 51), seed: int = 0, low=0.5, high=2.0) -> dict:
    """Dilation sweeps for ``count`` random ellipsoids per dimension.

    Returns {label: {"rows": [...], "trend": TrendTest, "max_ratio": float}}
    plus an "n{n}_max" entry testing the per-lambda maximum over the family.
    """
    out = {}
    lam = [float(x) for x in lambdas]
    for n in dims:
        per_lambda = np.zeros(len(lam))
        for j in range(count):
            e = random_ellipsoid(stream_rng(seed, 4, n, j), n, low, high)
            rows = dilation_sweep(e, lam)
            ratios = np.array([r["ratio"] for r in rows])
            per_lambda = np.maximum(per_lambda, ratios)
            out[f"n{n}_e{j}"] = {
                "semi_axes": e.semi_axes.tolist(),
                "rows": rows,
                "trend": slope_trend(lam, ratios),
                "max_ratio": float(ratios.max()),
            }
        out[f"n{n}_max"] = {"rows": None, "trend": slope_trend(lam, per_lambda), "max_ratio": float(per_lambda.max())}
    return out
