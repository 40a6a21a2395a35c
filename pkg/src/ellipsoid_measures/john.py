"""Minimum-volume enclosing ellipsoids of point sets and the John sandwich.

For a convex body K with Loewner-John ellipsoid E_K, t*E_K is contained in K
and K in E_K, with t = 1/n in general and t = 1/sqrt(n) when K = -K. By
monotonicity of mean curvatures under inclusion this pins every M_i(K), and
read the other way pins the symmetric functions of the semi-axes of E_K.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from .bounds import pinch_bounds, pinch_upper_constant
from .core import Ellipsoid, make_ellipsoid, sym_elem_all
from .errors import ConvergenceError, DegeneracyError, DomainError, SymmetryError
from .measures import ellipsoid_mean_curvatures_quadrature

FEASIBILITY_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class MveeResult:
    ellipsoid: Ellipsoid
    weights: np.ndarray
    iterations: int
    gap: float
    centrally_symmetric: bool = False

    def to_dict(self) -> dict:
        return {
            "ellipsoid": self.ellipsoid.to_dict(),
            "weights": self.weights.tolist(),
            "iterations": self.iterations,
            "gap": self.gap,
            "centrally_symmetric": self.centrally_symmetric,
        }


def _check_points(points) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    if p.ndim != 2:
        raise DomainError(f"points must be an (m, n) array, got shape {p.shape}")
    m, n = p.shape
    if m < n + 1:
        raise DegeneracyError(f"need at least n+1 = {n + 1} points, got {m}")
    if not np.all(np.isfinite(p)):
        raise DomainError("points must be finite")
    sv = np.linalg.svd(p - p.mean(axis=0), compute_uv=False)
    if sv[-1] <= 1e-12 * max(sv[0], 1e-300):
        raise DegeneracyError("points do not affinely span the ambient space (rank-deficient)")
    return p


def _weighted_ascent(q: np.ndarray, d: int, epsilon: float, max_iterations: int):
    """Todd-Yildirim ascent on log det(sum u_i q_i q_i^T) with away steps.

    Returns weights u with max_i q_i^T X(u)^-1 q_i <= (1 + epsilon) d, plus
    iteration count and final relative gap.
    """
    m = q.shape[0]
    u = np.full(m, 1.0 / m)
    for it in range(max_iterations + 1):
        x = (q * u[:, None]).T @ q
        w = np.einsum("ij,ij->i", q @ np.linalg.inv(x), q)
        jp = int(np.argmax(w))
        active = np.nonzero(u > 0)[0]
        jm = int(active[np.argmin(w[active])])
        eps_plus = w[jp] / d - 1.0
        eps_minus = 1.0 - w[jm] / d
        gap = max(eps_plus, eps_minus)
        if eps_plus <= epsilon and eps_minus <= epsilon:
            return u, it, gap
        if it == max_iterations:
            break
        if eps_plus > eps_minus:
            step = (w[jp] - d) / (d * (w[jp] - 1.0))
            u *= 1.0 - step
            u[jp] += step
        else:
            # away step, capped so the weight of jm does not go negative;
            # for w <= 1 the objective rises all the way to dropping jm
            drop = u[jm] / (1.0 - u[jm])
            step = min((d - w[jm]) / (d * (w[jm] - 1.0)), drop) if w[jm] > 1.0 else drop
            u *= 1.0 + step
            u[jm] -= step
            u[jm] = max(u[jm], 0.0)
        u /= u.sum()
    raise ConvergenceError(f"MVEE did not converge in {max_iterations} iterations (gap {gap:.3g})", best=u)


def _symmetric_centre(p: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Centroid of ``p`` after checking the set is closed under reflection in it."""
    c = p.mean(axis=0)
    scale = max(1.0, float(np.max(np.abs(p - c))))
    reflected = 2 * c - p
    dist, _ = cKDTree(p).query(reflected)
    if np.max(dist) > tol * scale:
        raise SymmetryError(
            "points are not centrally symmetric: some reflection about the centroid "
            f"is {np.max(dist):.3g} away from every input point"
        )
    return c


def mvee(points, epsilon: float = 1e-8, max_iterations: int = 100_000, centrally_symmetric: bool = False) -> MveeResult:
    """(1 + epsilon)-approximate minimum-volume enclosing ellipsoid.

    General sets use the lifted points (p, 1) in n+1 dimensions; centrally
    symmetric sets are solved about their centre directly, which is the
    standard reduction for K = -K.
    """
    if not 1e-10 <= epsilon <= 1e-2:
        raise DomainError(f"epsilon must lie in [1e-10, 1e-2], got {epsilon}")
    p = _check_points(points)
    m, n = p.shape
    if centrally_symmetric:
        c = _symmetric_centre(p)
        q = p - c
        u, it, gap = _weighted_ascent(q, n, epsilon, max_iterations)
        shape = np.linalg.inv((q * u[:, None]).T @ q) / n
    else:
        q = np.hstack([p, np.ones((m, 1))])
        u, it, gap = _weighted_ascent(q, n + 1, epsilon, max_iterations)
        c = u @ p
        cov = (p * u[:, None]).T @ p - np.outer(c, c)
        shape = np.linalg.inv(cov) / n
    # the ascent certificate guarantees containment only up to (1 + gap)
    y = p - c
    worst = float(np.max(np.einsum("ij,jk,ik->i", y, shape, y)))
    if worst > 1.0:
        shape = shape / worst
    lam, vec = np.linalg.eigh((shape + shape.T) / 2)
    e = make_ellipsoid(1.0 / np.sqrt(lam), vec, c)
    return MveeResult(e, u, it, float(gap), centrally_symmetric)


def quadratic_form_distance(e1: Ellipsoid, e2: Ellipsoid) -> float:
    """Max-abs difference of (shape matrix, centre) pairs; frame-free comparison."""
    return float(max(np.max(np.abs(e1.shape_matrix - e2.shape_matrix)), np.max(np.abs(e1.center - e2.center))))


# ---------------------------------------------------------------------------
# sandwich


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float

    def __contains__(self, x):
        return self.lower <= x <= self.upper

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper}


@dataclass(frozen=True, eq=False)
class JohnSandwich:
    mvee: MveeResult
    shrink: float
    mean_curvature: list  # pinch-based, conservative
    mean_curvature_quadrature: list  # [M_i(t E_K), M_i(E_K)] by quadrature
    semi_axes_sym: list  # intervals for s_k(John semi-axes), k = 0..n-1
    john_semi_axes_sym: np.ndarray = field(default=None)

    def to_dict(self) -> dict:
        return {
            "mvee": self.mvee.to_dict(),
            "shrink": self.shrink,
            "mean_curvature": [iv.to_dict() for iv in self.mean_curvature],
            "mean_curvature_quadrature": [iv.to_dict() for iv in self.mean_curvature_quadrature],
            "semi_axes_sym": [iv.to_dict() for iv in self.semi_axes_sym],
            "john_semi_axes_sym": self.john_semi_axes_sym.tolist(),
        }


def shrink_factor(n: int, centrally_symmetric: bool) -> float:
    return 1.0 / math.sqrt(n) if centrally_symmetric else 1.0 / n


def semi_axes_sym_bounds(mean_curvatures, n: int, centrally_symmetric: bool) -> list:
    """Intervals for s_k(a) of the John ellipsoid given M_i(K), k = n-1-i.

    From M_i(K) <= M_i(E_K) <= C_{n,i} s_k(a) and
    M_i(K) >= M_i(t E_K) >= t^k C_{n,i} s_k(a) / sqrt(n)^k. Each entry of
    ``mean_curvatures`` may be a number or an (lower, upper) pair.
    """
    t = shrink_factor(n, centrally_symmetric)
    out = [None] * n
    for i in range(n):
        mi = mean_curvatures[i]
        lo_m, hi_m = (mi, mi) if np.isscalar(mi) else (mi[0], mi[1])
        k = n - 1 - i
        cu = pinch_upper_constant(n, i)
        lower = lo_m / cu
        upper = hi_m * math.sqrt(n) ** k / (cu * t**k)
        out[k] = Interval(float(np.nextafter(lower, -np.inf)), float(np.nextafter(upper, np.inf)))
    return out


def john_sandwich(
    points,
    centrally_symmetric: bool = False,
    epsilon: float = 1e-8,
    mean_curvatures=None,
    rel_tol: float = 1e-10,
) -> JohnSandwich:
    """Bracket M_i(conv(points)) and the John semi-axis symmetric functions.

    ``mean_curvature[i]`` is [pinch lower of M_i(t E_K), pinch upper of
    M_i(E_K)]. ``semi_axes_sym`` inverts the same chain using
    ``mean_curvatures`` when given (numbers or intervals), else the
    quadrature bracket.
    """
    res = mvee(points, epsilon=epsilon, centrally_symmetric=centrally_symmetric)
    e = res.ellipsoid
    n = e.dim
    t = shrink_factor(n, centrally_symmetric)
    inner = e.scaled(t)
    pinch = []
    for i in range(n):
        lo = pinch_bounds(inner, i).lower
        hi = pinch_bounds(e, i).upper
        pinch.append(Interval(lo, hi))
    m_out = ellipsoid_mean_curvatures_quadrature(e, rel_tol).values
    m_in = ellipsoid_mean_curvatures_quadrature(inner, rel_tol).values
    quad = [Interval(float(m_in[i] * (1 - rel_tol)), float(m_out[i] * (1 + rel_tol))) for i in range(n)]
    if mean_curvatures is None:
        mean_curvatures = [(iv.lower, iv.upper) for iv in quad]
    sym = semi_axes_sym_bounds(mean_curvatures, n, centrally_symmetric)
    return JohnSandwich(res, t, pinch, quad, sym, sym_elem_all(e.semi_axes)[:n])


def boundary_points(e: Ellipsoid, count: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((count, e.dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return e.center + (g * e.semi_axes) @ e.frame.T


def containment_chain(points, result: MveeResult, samples: int = 1000, seed: int = 0, tol: float = 1e-9) -> dict:
    """Check t E_K in conv(points) in E_K.

    Outer: every input point inside E_K inflated by 1e-9. Inner: ``samples``
    boundary points of t E_K satisfy all facet inequalities of the hull.
    """
    p = np.asarray(points, dtype=float)
    e = result.ellipsoid
    outer_ok = bool(np.all(e.contains(p, tol=FEASIBILITY_EPS)))
    t = shrink_factor(e.dim, result.centrally_symmetric)
    rng = np.random.default_rng(seed)
    bp = boundary_points(e.scaled(t), samples, rng)
    hull = ConvexHull(p)
    slack = bp @ hull.equations[:, :-1].T + hull.equations[:, -1]
    scale = max(1.0, float(np.max(np.abs(p))))
    inner_ok = bool(np.all(slack <= tol * scale))
    return {"outer": outer_ok, "inner": inner_ok, "max_inner_slack": float(np.max(slack))}


def support_residuals(points, result: MveeResult, threshold: float = 1e-8) -> np.ndarray:
    """|q(p) - 1| for every point carrying weight above ``threshold``."""
    e = result.ellipsoid
    y = ((np.asarray(points, float) - e.center) @ e.frame) / e.semi_axes
    q = np.einsum("ij,ij->i", y, y)
    return np.abs(q[result.weights > threshold] - 1.0)


def steiner_circumellipse(triangle) -> Ellipsoid:
    """Ellipse through the vertices of a triangle centred at its centroid.

    Built from the conjugate semi-diameters (C - G) and (A - B)/sqrt(3).
    """
    a, b, c = (np.asarray(v, float) for v in triangle)
    g = (a + b + c) / 3
    m = np.column_stack([c - g, (a - b) / math.sqrt(3)])
    shape = np.linalg.inv(m @ m.T)
    lam, vec = np.linalg.eigh(shape)
    return make_ellipsoid(1.0 / np.sqrt(lam), vec, g)
