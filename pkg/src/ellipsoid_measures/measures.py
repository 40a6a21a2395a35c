"""Integral mean curvatures M_0..M_{n-1} of spheres, boxes and ellipsoids.

Convention: binom(n-1, k) m_k = s_k(k_1, ..., k_{n-1}) and M_k is the surface
integral of m_k, so M_0 is the surface area and M_{n-1} = omega_{n-1} for
every convex body.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import comb, roots_legendre

from .core import (
    Box,
    Ellipsoid,
    ellipsoid_volume,
    sphere_area,
    sym_elem_all,
    sym_elem_leave_one_out,
    unit_ball_volume,
)
from .errors import ConvergenceError, DomainError, NumericalError
from .rng import batch_sizes, map_batches, stream_rng, uniform_ball

MAX_ASPECT = 1e6


class Method(str, enum.Enum):
    CLOSED_FORM_SPHERE = "ClosedFormSphere"
    BOX_FORMULA = "BoxFormula"
    QUADRATURE = "Quadrature"
    STEINER_MONTE_CARLO = "SteinerMonteCarlo"


@dataclass(frozen=True, eq=False)
class MeanCurvatures:
    dim: int
    values: np.ndarray
    method: Method
    error_estimate: Optional[np.ndarray] = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size != self.dim:
            raise DomainError(f"expected {self.dim} mean curvatures, got {v.size}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "method", Method(self.method))
        if self.error_estimate is not None:
            object.__setattr__(self, "error_estimate", np.array(self.error_estimate, dtype=float).reshape(-1))

    def __getitem__(self, i):
        return self.values[i]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "values": self.values.tolist(),
            "method": self.method.value,
            "error_estimate": None if self.error_estimate is None else self.error_estimate.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MeanCurvatures":
        return cls(int(d["dim"]), d["values"], d["method"], d.get("error_estimate"))


# ---------------------------------------------------------------------------
# closed forms


def sphere_mean_curvatures(radius: float, dim: int) -> MeanCurvatures:
    if radius <= 0:
        raise DomainError(f"radius must be positive, got {radius}")
    if dim < 2:
        raise DomainError(f"dimension must be >= 2, got {dim}")
    w = sphere_area(dim - 1)
    vals = [w * radius ** (dim - 1 - i) for i in range(dim)]
    return MeanCurvatures(dim, vals, Method.CLOSED_FORM_SPHERE)


def box_mean_curvatures(b: Box) -> MeanCurvatures:
    """binom(n-1, i) M_i = omega_i s_{n-1-i}(l).

    The binomial factor comes from summing length * exterior angle over the
    (n-1-i)-dimensional faces; dropping it breaks the Steiner polynomial of
    the box.
    """
    n = b.dim
    s = sym_elem_all(b.side_lengths)
    vals = [sphere_area(i) * s[n - 1 - i] / comb(n - 1, i, exact=True) for i in range(n)]
    return MeanCurvatures(n, vals, Method.BOX_FORMULA)


# ---------------------------------------------------------------------------
# ellipsoid quadrature


def _check_quadrature_input(e: Ellipsoid, rel_tol: float):
    if e.dim < 2:
        raise DomainError(f"quadrature needs dimension >= 2, got {e.dim}")
    if not 1e-12 <= rel_tol <= 1e-2:
        raise DomainError(f"rel_tol must lie in [1e-12, 1e-2], got {rel_tol}")
    aspect = e.semi_axes[0] / e.semi_axes[-1]
    if aspect > MAX_ASPECT:
        raise DomainError(f"aspect ratio a_1/a_n = {aspect:.3g} exceeds the 1e6 guard")


def _radial_integrand(a: np.ndarray, i: int, t: np.ndarray) -> np.ndarray:
    """Integrand in t of the one-dimensional representation of M_i.

    On the unit sphere y -> diag(a) y the density of s_i(curvatures) dA is
    homogeneous in y; writing |diag(1/a) y|^-(i+1) as a Gamma integral turns
    the Gaussian average over y into this product form.
    """
    a2 = a * a
    loo = sym_elem_leave_one_out(1.0 / a2, i)
    beta = 1.0 / (a2 + 2.0 * t[:, None])
    # prod (1/2 + t/a_k^2)^(-1/2), kept in log form against overflow
    logp = -0.5 * np.sum(np.log(0.5 + t[:, None] / a2), axis=1)
    return t ** ((i + 1) / 2) * np.exp(logp) * (beta @ loo)


def _radial_prefactor(a: np.ndarray, i: int) -> float:
    n = a.size
    radial_moment = 2.0 ** ((n - i - 1) / 2) * math.gamma((n - i + 1) / 2)
    return float(np.prod(a)) * math.pi ** (n / 2) / (
        comb(n - 1, i, exact=True) * radial_moment * math.gamma((i + 1) / 2)
    )


def _quadrature_radial(a: np.ndarray, rel_tol: float, max_level: int):
    n = a.size
    lo = math.log(a[-1] ** 2) - 80.0
    hi = math.log(a[0] ** 2) + 80.0
    values, errors = np.empty(n), np.empty(n)
    for i in range(n):
        pref = _radial_prefactor(a, i)
        h = 1.0
        s = np.arange(lo, hi + h, h)
        total = np.sum(_radial_integrand(a, i, np.exp(s)))
        est = pref * h * total
        for _ in range(max_level):
            h /= 2
            mid = s[:-1] + h
            total += np.sum(_radial_integrand(a, i, np.exp(mid)))
            s = np.sort(np.concatenate([s, mid]))
            new = pref * h * total
            err = abs(new - est)
            est = new
            # roundoff floor: a few ulps per summed node
            err = max(err, 4 * np.finfo(float).eps * abs(est))
            if err <= rel_tol * abs(est):
                break
        else:
            raise ConvergenceError(f"radial quadrature for M_{i} did not reach rel_tol={rel_tol}", best=est)
        values[i], errors[i] = est, err
    return values, errors


def _sym_rows(x: np.ndarray) -> np.ndarray:
    """Row-wise elementary symmetric functions s_0..s_n of an (m, n) array."""
    m, n = x.shape
    e = np.zeros((m, n + 1))
    e[:, 0] = 1.0
    for j in range(n):
        e[:, 1 : j + 2] = e[:, 1 : j + 2] + x[:, j : j + 1] * e[:, : j + 1]
    return e


def shape_operator_sym(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """s_0..s_{n-1} of the principal curvatures at boundary points ``x``.

    The shape operator is P H P / |grad F| with F(x) = sum x_i^2 / a_i^2,
    H its Hessian and P the tangent projector; its extra zero eigenvalue along
    the normal does not change s_k for k < n.
    """
    g = 2.0 * x / a**2
    gn = np.linalg.norm(g, axis=1)
    nu = g / gn[:, None]
    n = a.size
    proj = np.eye(n)[None] - nu[:, :, None] * nu[:, None, :]
    hess = np.diag(2.0 / a**2)
    w = proj @ hess @ proj / gn[:, None, None]
    k = np.linalg.eigvalsh(w)
    return _sym_rows(k)[:, :n]


def _orthant_nodes(n: int, nodes: int):
    """Gauss-Legendre nodes for hyperspherical angles covering one orthant."""
    t, w = roots_legendre(nodes)
    theta = (t + 1) * math.pi / 4
    wt = w * math.pi / 4
    grids = np.meshgrid(*([theta] * (n - 1)), indexing="ij")
    wgrids = np.meshgrid(*([wt] * (n - 1)), indexing="ij")
    ang = np.stack([g.ravel() for g in grids], axis=1)
    weight = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    y = np.ones((ang.shape[0], n))
    for k in range(n - 1):
        y[:, k] *= np.cos(ang[:, k])
        y[:, k + 1 :] *= np.sin(ang[:, k])[:, None]
        # surface element of S^{n-1}: prod_k sin^{n-2-k}(theta_k)
        weight = weight * np.sin(ang[:, k]) ** (n - 2 - k)
    return y, weight


def _quadrature_angular(a: np.ndarray, rel_tol: float, max_points: int):
    n = a.size
    est = None
    nodes = 4
    while True:
        if nodes ** (n - 1) > max_points:
            raise ConvergenceError(
                f"angular quadrature exhausted its {max_points}-point budget before rel_tol={rel_tol}",
                best=est,
            )
        y, w = _orthant_nodes(n, nodes)
        x = a * y
        jac = np.prod(a) * np.linalg.norm(y / a, axis=1)
        total = np.zeros(n)
        chunk = 1 << 15
        for start in range(0, len(y), chunk):
            sl = slice(start, start + chunk)
            sk = shape_operator_sym(a, x[sl])
            total += (w[sl] * jac[sl]) @ sk
        vals = 2.0**n * total / np.array([comb(n - 1, i, exact=True) for i in range(n)])
        if est is not None:
            err = np.maximum(np.abs(vals - est), 4 * np.finfo(float).eps * np.abs(vals))
            if np.all(err <= rel_tol * np.abs(vals)):
                return vals, err
        est = vals
        nodes *= 2


def ellipsoid_mean_curvatures_quadrature(
    e: Ellipsoid,
    rel_tol: float = 1e-10,
    scheme: str = "radial",
    max_level: int = 14,
    max_points: int = 1 << 22,
) -> MeanCurvatures:
    """M_0..M_{n-1} of the boundary of ``e`` by numerical quadrature.

    ``scheme="radial"`` (default) integrates a one-dimensional reduction of
    the surface integral with a trapezoid rule in log t, halving the step
    until two levels agree to ``rel_tol``; it is fast for any dimension and
    aspect ratio. ``scheme="angular"`` integrates s_i of the shape-operator
    eigenvalues directly over hyperspherical angles with tensor
    Gauss-Legendre rules, doubling the node count per level; it is
    independent of the reduction and practical for n <= 4.

    ``error_estimate`` holds the last refinement difference per entry.
    Only the semi-axes matter: M_i is invariant under rigid motions.
    """
    _check_quadrature_input(e, rel_tol)
    a = e.semi_axes
    if scheme == "radial":
        vals, err = _quadrature_radial(a, rel_tol, max_level)
    elif scheme == "angular":
        vals, err = _quadrature_angular(a, rel_tol, max_points)
    else:
        raise DomainError(f"unknown quadrature scheme {scheme!r}")
    return MeanCurvatures(e.dim, vals, Method.QUADRATURE, err)


# ---------------------------------------------------------------------------
# Monte Carlo Steiner fit


def distance_to_ellipsoid(points, e: Ellipsoid, tol: float = 1e-13, max_iter: int = 200) -> np.ndarray:
    """Euclidean distance from each point to the solid ellipsoid (0 inside).

    Solves sum (a_i y_i / (a_i^2 + t))^2 = 1 for the Lagrange multiplier t by
    Newton's method, falling back to bisection whenever a step leaves the
    current bracket.
    """
    p = np.atleast_2d(np.asarray(points, dtype=float))
    y = np.abs((p - e.center) @ e.frame)
    a2 = e.semi_axes**2
    out = np.sum(y * y / a2, axis=1) > 1.0
    dist = np.zeros(len(p))
    if not np.any(out):
        return dist
    yo = y[out]
    ay2 = a2 * yo * yo
    lo = np.zeros(len(yo))
    hi = e.semi_axes[0] * np.linalg.norm(yo, axis=1)
    t = lo.copy()
    for _ in range(max_iter):
        d = a2 + t[:, None]
        phi = np.sum(ay2 / d**2, axis=1) - 1.0
        dphi = -2.0 * np.sum(ay2 / d**3, axis=1)
        lo = np.where(phi > 0, t, lo)
        hi = np.where(phi <= 0, t, hi)
        step = t - phi / dphi
        bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        new = np.where(bad, 0.5 * (lo + hi), step)
        done = np.abs(new - t) <= tol * (1.0 + t)
        t = new
        if np.all(done):
            break
    z = a2 * yo / (a2 + t[:, None])
    dist[out] = np.linalg.norm(yo - z, axis=1)
    return dist


@dataclass(frozen=True)
class ConvexBodyProbe:
    """Black-box convex body for the Monte Carlo oracles.

    ``membership`` maps an (m, n) array to booleans. ``distance`` (optional)
    maps points to their Euclidean distance from the body; without it the
    distance is measured along the ray to ``interior_point`` by bisection,
    which is exact only for balls centred there and otherwise overestimates.
    """

    membership: Callable
    bounding_radius: float
    volume_hint: Optional[float] = None
    distance: Optional[Callable] = None
    interior_point: Optional[np.ndarray] = None

    def distances(self, points: np.ndarray) -> np.ndarray:
        if self.distance is not None:
            return np.asarray(self.distance(points), dtype=float)
        return self._ray_distance(points)

    def _ray_distance(self, points, iters: int = 60) -> np.ndarray:
        c = np.zeros(points.shape[1]) if self.interior_point is None else np.asarray(self.interior_point, float)
        inside = np.asarray(self.membership(points), dtype=bool)
        lo = np.zeros(len(points))
        hi = np.ones(len(points))
        d = points - c
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            m = np.asarray(self.membership(c + mid[:, None] * d), dtype=bool)
            lo = np.where(m, mid, lo)
            hi = np.where(m, hi, mid)
        dist = (1.0 - lo) * np.linalg.norm(d, axis=1)
        return np.where(inside, 0.0, dist)


def probe_ellipsoid(e: Ellipsoid) -> ConvexBodyProbe:
    return ConvexBodyProbe(
        membership=e.contains,
        bounding_radius=float(np.linalg.norm(e.center) + e.semi_axes[0]),
        volume_hint=ellipsoid_volume(e),
        distance=lambda p: distance_to_ellipsoid(p, e),
        interior_point=e.center,
    )


def probe_box(b: Box) -> ConvexBodyProbe:
    half = b.side_lengths / 2

    def dist(p):
        q = np.maximum(np.abs(np.atleast_2d(p) - b.center) - half, 0.0)
        return np.linalg.norm(q, axis=1)

    return ConvexBodyProbe(
        membership=b.contains,
        bounding_radius=float(np.linalg.norm(b.center) + np.linalg.norm(half)),
        volume_hint=b.volume(),
        distance=dist,
        interior_point=b.center,
    )


def _steiner_design(n: int, radii: np.ndarray, with_volume: bool) -> np.ndarray:
    cols = [np.ones_like(radii)] if with_volume else []
    for k in range(n):
        cols.append(comb(n - 1, k, exact=True) * radii ** (k + 1) / (k + 1))
    return np.stack(cols, axis=1)


@dataclass(frozen=True, eq=False)
class SteinerFit:
    """Raw material of a Steiner fit, kept for diagnostics."""

    radii: np.ndarray
    counts: np.ndarray
    samples: int
    sampling_radius: float
    volume: float
    volume_std_error: float
    condition_number: float


def steiner_fit_mean_curvatures(
    body: ConvexBodyProbe,
    dim: int,
    samples: int = 200_000,
    seed: int = 0,
    radii=None,
    use_volume_hint: bool = False,
    workers: int = 1,
    return_fit: bool = False,
):
    """Estimate M_0..M_{n-1} by fitting the Steiner polynomial of vol(K_rho).

    One uniform sample in the ball of radius ``bounding_radius + max(radii)``
    gives nested hit counts {d(x, K) <= rho_j} for every radius at once; the
    volume polynomial vol K + sum binom(n-1,k) M_k rho^{k+1}/(k+1) is then
    solved exactly through those n+1 points. ``error_estimate`` is one
    standard error per entry, from the multinomial covariance of the nested
    counts pushed through the linear solve.
    """
    n = int(dim)
    if samples < 100_000:
        raise DomainError(f"samples must be >= 1e5, got {samples}")
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    with_volume = not (use_volume_hint and body.volume_hint is not None)
    if radii is None:
        r0 = body.bounding_radius
        radii = r0 * np.arange(0 if with_volume else 1, n + 1) / n
    radii = np.asarray(radii, dtype=float)
    need = n + 1 if with_volume else n
    if radii.size != need or len(np.unique(radii)) != need or np.any(radii < 0):
        raise DomainError(f"need {need} distinct non-negative radii, got {radii.tolist()}")

    phi = _steiner_design(n, radii, with_volume)
    rmax = radii.max()
    scale = np.array(([1.0] if with_volume else []) + [rmax ** (k + 1) for k in range(n)])
    cond = np.linalg.cond(phi / scale)
    if cond > 1e8:
        raise NumericalError(f"Steiner fit is ill-conditioned (condition number {cond:.3g} > 1e8)")

    big = body.bounding_radius + rmax

    def batch(stream, size):
        rng = stream_rng(seed, stream)
        pts = uniform_ball(rng, size, n, big)
        d = body.distances(pts)
        return np.array([np.count_nonzero(d <= r) for r in radii], dtype=np.int64)

    counts = np.sum(map_batches(batch, batch_sizes(samples), workers), axis=0)
    vball = unit_ball_volume(n) * big**n
    p = counts / samples
    pmin = np.minimum.outer(p, p)
    cov_v = vball**2 * (pmin - np.outer(p, p)) / samples
    target = vball * p
    if not with_volume:
        target = target - body.volume_hint
    inv = np.linalg.inv(phi)
    x = inv @ target
    cov_x = inv @ cov_v @ inv.T
    se = np.sqrt(np.maximum(np.diag(cov_x), 0.0))
    if with_volume:
        vol, vol_se = x[0], se[0]
        mvals, mse = x[1:], se[1:]
    else:
        vol, vol_se = body.volume_hint, 0.0
        mvals, mse = x, se
    result = MeanCurvatures(n, mvals, Method.STEINER_MONTE_CARLO, mse)
    if return_fit:
        fit = SteinerFit(radii, counts, int(samples), big, float(vol), float(vol_se), float(cond))
        return result, fit
    return result
