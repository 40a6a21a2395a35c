"""Exit criteria of the library, each checked against an independent oracle.

``run_all`` returns one :class:`Criterion` per check; the ``acceptance`` CLI
subcommand and ``tests/test_acceptance.py`` both call into this module.
"""
from __future__ import annotations

import itertools
import math
import subprocess
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import comb, ellipe

from .core import Box, ball, make_ellipsoid, random_rotation, sym_elem_all, unit_ball_volume
from .grassmann import hit_measure_ratio, inclusion_violations
from .john import (
    boundary_points,
    containment_chain,
    john_sandwich,
    mvee,
    quadratic_form_distance,
    steiner_circumellipse,
)
from .lattice import lattice_count
from .measures import box_mean_curvatures, ellipsoid_mean_curvatures_quadrature, sphere_mean_curvatures
from .rng import stream_rng
from .sweeps import dilation_family, pinch_batch, tube_batch

PROLATE_112 = 21.4784
ELLIPSE_21 = 9.6884


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.number:2d}. {self.title} ({self.seconds:.1f} s)"

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "seconds": self.seconds,
            "details": self.details,
        }


# independent oracles -------------------------------------------------------


def prolate_area(a: float, c: float) -> float:
    """Surface area of the spheroid with equatorial radius a < polar c."""
    e = math.sqrt(1 - a * a / (c * c))
    return 2 * math.pi * a * a * (1 + c / (a * e) * math.asin(e))


def ellipse_perimeter(a: float, b: float) -> float:
    """4 a E(m), m = 1 - b^2/a^2, for a >= b."""
    return 4 * a * ellipe(1 - b * b / (a * a))


def gauss_circle_count(r: int) -> int:
    """Integer points in the disk of integer radius r, via r_2 as a divisor sum."""
    r2 = r * r
    return 1 + 4 * sum(r2 // (4 * j + 1) - r2 // (4 * j + 3) for j in range(r2 + 1))


# criteria -------------------------------------------------------------------


def criterion_sphere(rel_tol: float = 1e-10) -> dict:
    worst = 0.0
    for n in range(2, 6):
        for r in (0.5, 1.0, 3.0):
            q = ellipsoid_mean_curvatures_quadrature(ball(r, n), rel_tol).values
            exact = sphere_mean_curvatures(r, n).values
            worst = max(worst, float(np.max(np.abs(q / exact - 1))))
    return {"passed": worst <= 1e-8, "max_rel_error": worst, "tolerance": 1e-8}


def criterion_spheroid(rel_tol: float = 1e-12) -> dict:
    m3 = ellipsoid_mean_curvatures_quadrature(make_ellipsoid([1, 1, 2]), rel_tol)[0]
    m2 = ellipsoid_mean_curvatures_quadrature(make_ellipsoid([2, 1]), rel_tol)[0]
    o3, o2 = prolate_area(1, 2), ellipse_perimeter(2, 1)
    e3, e2 = abs(m3 / o3 - 1), abs(m2 / o2 - 1)
    return {
        "passed": e3 <= 1e-6 and e2 <= 1e-8 and abs(o3 - PROLATE_112) < 1e-4 and abs(o2 - ELLIPSE_21) < 1e-4,
        "prolate_quadrature": m3,
        "prolate_oracle": o3,
        "prolate_rel_error": e3,
        "ellipse_quadrature": m2,
        "ellipse_oracle": o2,
        "ellipse_rel_error": e2,
    }


def steiner_coefficients(side_lengths):
    """(box-side expansion, mean-curvature expansion) of vol(P_rho) in powers of rho."""
    l = np.asarray(side_lengths, float)
    n = l.size
    s = sym_elem_all(l)
    direct = np.array([s[n - k] * unit_ball_volume(k) for k in range(n + 1)])
    m = box_mean_curvatures(Box(l)).values
    via_m = np.zeros(n + 1)
    via_m[0] = float(np.prod(l))
    for k in range(n):
        via_m[k + 1] = comb(n - 1, k, exact=True) * m[k] / (k + 1)
    return direct, via_m


def criterion_box(count: int = 50, seed: int = 0) -> dict:
    worst = 0.0
    for j in range(count):
        rng = stream_rng(seed, 5, j)
        n = 2 + j % 5
        direct, via_m = steiner_coefficients(rng.uniform(0.1, 10.0, n))
        worst = max(worst, float(np.max(np.abs(direct - via_m) / np.abs(direct))))
    return {"passed": worst <= 1e-12, "max_rel_coefficient_error": worst, "boxes": count}


def criterion_pinch(count: int = 200, seed: int = 0) -> dict:
    rows = pinch_batch(count, seed=seed)
    inside = all(r["inside"] for r in rows)
    ratio_err = max(abs(r["ratio"] / r["ratio_expected"] - 1) for r in rows)
    claim_ok = all(r["ratio_expected"] <= r["stated_ratio"] for r in rows)
    claim_all = all(
        math.sqrt(n) ** (n - 1 - i) <= n ** ((n - i) / 2) for n in range(1, 34) for i in range(n)
    )
    positions = [
        math.log(r["value"] / r["lower"]) / math.log(r["upper"] / r["lower"])
        for r in rows
        if r["upper"] / r["lower"] > 1 + 1e-9
    ]
    return {
        "passed": inside and ratio_err <= 1e-12 and claim_ok and claim_all,
        "ellipsoids": count,
        "entries": len(rows),
        "all_inside": inside,
        "max_ratio_rel_error": ratio_err,
        "ratio_within_claim": claim_ok and claim_all,
        "_positions": positions,
    }


def criterion_monotone(pairs: int = 100, flats: int = 100_000, seed: int = 0, rel_tol: float = 1e-10) -> dict:
    worst_excess = -math.inf
    top_err = 0.0
    violations = 0
    for j in range(pairs):
        rng = stream_rng(seed, 6, j)
        n = 2 + j % 4
        a = np.exp(rng.uniform(math.log(0.1), math.log(10), n))
        b = a * (1 + rng.uniform(0, 1, n))
        frame = random_rotation(n, rng)
        ea, eb = make_ellipsoid(a, frame), make_ellipsoid(b, frame)
        ma = ellipsoid_mean_curvatures_quadrature(ea, rel_tol).values
        mb = ellipsoid_mean_curvatures_quadrature(eb, rel_tol).values
        worst_excess = max(worst_excess, float(np.max((ma - mb) / mb)))
        top_err = max(top_err, abs(ma[-1] / mb[-1] - 1))
        r = 1 + j % (n - 1)
        violations += inclusion_violations(ea, eb, r, flats, seed=j)
    ok = worst_excess <= 2 * rel_tol and top_err <= 2 * rel_tol and violations == 0
    return {
        "passed": ok,
        "pairs": pairs,
        "max_relative_excess": worst_excess,
        "top_index_rel_diff": top_err,
        "flats_per_pair": flats,
        "hit_violations": violations,
    }


def criterion_grassmann(trials: int = 1_000_000, seed: int = 0) -> dict:
    q = ellipsoid_mean_curvatures_quadrature(make_ellipsoid([1, 1, 2]), 1e-12)[0]
    target = q / (4 * math.pi)
    ratio, se, _ = hit_measure_ratio(make_ellipsoid([1, 1, 2]), ball(1, 3), 1, trials, seed)
    ratio_b, se_b, _ = hit_measure_ratio(ball(2, 3), ball(1, 3), 1, trials, seed + 1)
    z1, z2 = (ratio - target) / se, (ratio_b - 4) / se_b
    return {
        "passed": abs(z1) <= 3 and abs(z2) <= 3,
        "spheroid_ratio": ratio,
        "spheroid_std_error": se,
        "spheroid_target": target,
        "spheroid_z": z1,
        "balls_ratio": ratio_b,
        "balls_std_error": se_b,
        "balls_z": z2,
    }


def criterion_tube(count: int = 100, seed: int = 0) -> dict:
    rows = tube_batch(count, seed=seed)
    inside = all(r["inside"] for r in rows)
    br = np.array([r["breakdown_over_s1"] for r in rows])
    return {
        "passed": inside,
        "checks": len(rows),
        "all_inside": inside,
        "report_breakdown_over_s1": {
            "min": float(br.min()),
            "median": float(np.median(br)),
            "max": float(br.max()),
        },
    }


def criterion_lattice(count: int = 10, seed: int = 0) -> dict:
    hand = {
        "disk_r2": lattice_count(ball(2, 2)),
        "ellipse_2_1": lattice_count(make_ellipsoid([1, 2])),
        "ball3_r1": lattice_count(ball(1, 3)),
    }
    hand_ok = hand == {"disk_r2": 13, "ellipse_2_1": 7, "ball3_r1": 7}
    gauss_ok = all(lattice_count(ball(r, 2)) == gauss_circle_count(r) for r in range(1, 51))
    fam = dilation_family(count, seed=seed)
    trends = {k: v["trend"] for k, v in fam.items()}
    maxima = {k: v["max_ratio"] for k, v in fam.items()}
    trend_ok = all(t.non_increasing for t in trends.values())
    finite = all(math.isfinite(x) for x in maxima.values())
    return {
        "passed": hand_ok and gauss_ok and trend_ok and finite,
        "hand_counts": hand,
        "divisor_sum_match": gauss_ok,
        "family_max_ratio": {k: maxima[k] for k in maxima if k.endswith("_max")},
        "family_trend": {k: trends[k].to_dict() for k in trends if k.endswith("_max")},
        "bodies_non_increasing": sum(t.non_increasing for t in trends.values()),
        "bodies": len(trends),
        "_family": fam,
    }


def criterion_john(epsilon: float = 1e-8) -> dict:
    square = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], float)
    cross = np.array([[1, 0], [-1, 0], [0, 2], [0, -2]], float)
    tri = np.array([[0, 0], [1, 0], [0, 1]], float)
    d_square = quadratic_form_distance(mvee(square, epsilon).ellipsoid, ball(math.sqrt(2), 2))
    d_cross = quadratic_form_distance(mvee(cross, epsilon).ellipsoid, make_ellipsoid([1, 2]))
    d_tri = quadratic_form_distance(mvee(tri, epsilon).ellipsoid, steiner_circumellipse(tri))
    oracle_ok = max(d_square, d_cross, d_tri) <= epsilon

    cube = np.array(list(itertools.product([-1.0, 1.0], repeat=3)))
    js = john_sandwich(cube, centrally_symmetric=True, epsilon=epsilon)
    quad0 = js.mean_curvature_quadrature[0]
    cube_ok = (
        24.0 in quad0
        and 24.0 in js.mean_curvature[0]
        and abs(quad0.lower - 4 * math.pi) < 1e-6
        and abs(quad0.upper - 12 * math.pi) < 1e-6
    )

    sphere_pts = boundary_points(ball(1, 3), 1000, np.random.default_rng(0))
    sphere_pts = np.vstack([sphere_pts, -sphere_pts])
    jsph = john_sandwich(sphere_pts, centrally_symmetric=True, epsilon=epsilon)
    sphere_ok = 4 * math.pi in jsph.mean_curvature[0]

    chains = {
        "cube": containment_chain(cube, js.mvee),
        "sphere_samples": containment_chain(sphere_pts, jsph.mvee),
    }
    rng = np.random.default_rng(1)
    cloud = rng.standard_normal((300, 3))
    chains["gaussian_cloud"] = containment_chain(cloud, mvee(cloud, epsilon))
    chain_ok = all(c["outer"] and c["inner"] for c in chains.values())
    return {
        "passed": oracle_ok and cube_ok and sphere_ok and chain_ok,
        "square_form_error": d_square,
        "cross_form_error": d_cross,
        "triangle_form_error": d_tri,
        "cube_M0_quadrature_interval": [quad0.lower, quad0.upper],
        "cube_M0_pinch_interval": [js.mean_curvature[0].lower, js.mean_curvature[0].upper],
        "sphere_M0_pinch_interval": [jsph.mean_curvature[0].lower, jsph.mean_curvature[0].upper],
        "containment": chains,
    }


DETERMINISM_COMMANDS = [
    ["measures", "--axes", "1,1,2", "--rel-tol", "1e-8"],
    ["measures", "--axes", "2,2,2", "--body", "box", "--method", "steiner", "--seed", "7"],
    ["bounds", "--axes", "3,2,1"],
    ["tube", "--axes", "1,2,3", "--rho", "0.5"],
    ["grassmann", "--axes", "1,1,2", "--trials", "20000", "--seed", "3"],
    ["lattice", "--axes", "2,2", "--dim", "2"],
    ["sweep", "--kind", "dilation", "--axes", "2,1", "--lambda-max", "10", "--format", "csv"],
]


def criterion_determinism(commands=DETERMINISM_COMMANDS) -> dict:
    diffs = []
    for cmd in commands:
        outs = [
            subprocess.run([sys.executable, "-m", "ellipsoid_measures", *cmd], capture_output=True, check=False)
            for _ in range(2)
        ]
        same = outs[0].stdout == outs[1].stdout and outs[0].returncode == outs[1].returncode == 0
        if not same:
            diffs.append(" ".join(cmd))
    return {"passed": not diffs, "commands": len(commands), "mismatched": diffs}


CRITERIA = [
    (1, "sphere closed form vs quadrature (1e-8 rel)", criterion_sphere),
    (2, "spheroid / ellipse oracles (1e-6, 1e-8 rel)", criterion_spheroid),
    (3, "corrected box formula Steiner identity (1e-12)", criterion_box),
    (4, "pinch sandwich on 200 random ellipsoids", criterion_pinch),
    (5, "monotonicity: quadrature and flat-hit implication", criterion_monotone),
    (6, "Grassmann hit ratios within 3 standard errors", criterion_grassmann),
    (7, "tube area bounds for rho <= s_1(a)/n", criterion_tube),
    (8, "lattice counts, divisor sums, dilation trend", criterion_lattice),
    (9, "MVEE oracles, John sandwich, containment", criterion_john),
    (10, "seeded CLI runs are byte-identical", criterion_determinism),
]


def run_criterion(number: int) -> Criterion:
    num, title, fn = next(c for c in CRITERIA if c[0] == number)
    t0 = time.perf_counter()
    details = fn()
    return Criterion(num, title, bool(details.pop("passed")), details, time.perf_counter() - t0)


def run_all(numbers=None, out_dir=None, stream=None) -> list:
    results = []
    for num, _, _ in CRITERIA:
        if numbers and num not in numbers:
            continue
        c = run_criterion(num)
        if stream is not None:
            print(c.line(), file=stream, flush=True)
        results.append(c)
    if out_dir is not None:
        write_figures(results, Path(out_dir))
    for c in results:
        for key in [k for k in c.details if k.startswith("_")]:
            del c.details[key]
    return results


def write_figures(results, out_dir: Path) -> list:
    from .plotting import plot_dilation, plot_pinch, plot_tube
    from .sweeps import tube_curves

    paths = []
    by_num = {c.number: c for c in results}
    if 4 in by_num:
        paths.append(plot_pinch(by_num[4].details["_positions"], out_dir / "pinch_positions.png"))
    if 7 in by_num:
        curves, consts = tube_curves()
        paths.append(plot_tube(curves, consts, out_dir / "tube_breakdown.png"))
    if 8 in by_num:
        fam = by_num[8].details["_family"]
        sweeps = {k: v["rows"] for k, v in fam.items() if v["rows"] is not None}
        paths.append(plot_dilation(sweeps, out_dir / "dilation_ratio.png"))
    return paths
