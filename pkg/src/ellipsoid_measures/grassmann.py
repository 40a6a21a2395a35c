"""Monte Carlo sampling of affine r-flats and hit tests against ellipsoids.

Flats are drawn from the motion-invariant measure conditioned on meeting a
reference ball. Under that law the probability of hitting a convex body is
proportional to its (r-1)-th integral mean curvature, so ratios of hit
frequencies estimate ratios of M_{r-1} without fixing the measure's
normalization.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Ellipsoid
from .errors import DomainError, NumericalError
from .rng import batch_sizes, map_batches, stream_rng

REFERENCE_INFLATION = 1e-9


@dataclass(frozen=True, eq=False)
class AffineFlat:
    basepoint: np.ndarray
    directions: np.ndarray  # (r, n), orthonormal rows

    @property
    def dim_ambient(self) -> int:
        return self.directions.shape[1]

    @property
    def dim_flat(self) -> int:
        return self.directions.shape[0]

    def distance_to_origin(self) -> float:
        return float(np.linalg.norm(self.basepoint))

    def rotated(self, rotation) -> "AffineFlat":
        r = np.asarray(rotation, dtype=float)
        return AffineFlat(r @ self.basepoint, self.directions @ r.T)


@dataclass(frozen=True)
class HitEstimate:
    hits: int
    trials: int
    reference_radius: float

    @property
    def estimate(self) -> float:
        return self.hits / self.trials

    @property
    def std_error(self) -> float:
        p = self.estimate
        return float(np.sqrt(p * (1 - p) / self.trials))

    def to_dict(self) -> dict:
        return {
            "hits": self.hits,
            "trials": self.trials,
            "reference_radius": self.reference_radius,
            "estimate": self.estimate,
            "std_error": self.std_error,
        }


def _check_dims(n, r, reference_radius):
    if not 1 <= r <= n - 1:
        raise DomainError(f"flat dimension r must satisfy 1 <= r <= n-1 = {n - 1}, got {r}")
    if not reference_radius > 0:
        raise DomainError(f"reference_radius must be positive, got {reference_radius}")


def sample_flats(n: int, r: int, reference_radius: float, count: int, rng: np.random.Generator):
    """Draw ``count`` flats as (basepoints (m, n), directions (m, r, n)).

    Directions come from QR of Gaussian matrices (sign-fixed, so Haar); the
    basepoint is uniform in the (n-r)-ball of the given radius inside the
    orthogonal complement of the directions.
    """
    _check_dims(n, r, reference_radius)
    g = rng.standard_normal((count, n, r))
    q, rr = np.linalg.qr(g)
    q = q * np.sign(np.diagonal(rr, axis1=1, axis2=2))[:, None, :]
    dirs = np.swapaxes(q, 1, 2)
    z = rng.standard_normal((count, n))
    z = z - np.einsum("mrn,mr->mn", dirs, np.einsum("mrn,mn->mr", dirs, z))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    k = n - r
    rad = reference_radius * rng.random(count) ** (1.0 / k)
    return z * rad[:, None], dirs


def sample_flat(n: int, r: int, reference_radius: float, rng: np.random.Generator) -> AffineFlat:
    base, dirs = sample_flats(n, r, reference_radius, 1, rng)
    return AffineFlat(base[0], dirs[0])


def hits_ellipsoid(basepoints, directions, e: Ellipsoid) -> np.ndarray:
    """Vectorized hit test: min over each flat of the quadratic form <= 1.

    The restricted form is minimized exactly through the r x r normal
    equations; boundary contact counts as a hit.
    """
    q = e.shape_matrix
    d = np.atleast_2d(basepoints) - e.center
    v = directions if directions.ndim == 3 else directions[None]
    qd = d @ q
    vqd = np.einsum("mrn,mn->mr", v, qd)
    vqv = np.einsum("mrn,nk,msk->mrs", v, q, v)
    t = np.linalg.solve(vqv, vqd[..., None])[..., 0]
    val = np.einsum("mn,mn->m", qd, d) - np.einsum("mr,mr->m", vqd, t)
    return val <= 1.0


def flat_hits_ellipsoid(flat: AffineFlat, e: Ellipsoid) -> bool:
    if flat.dim_ambient != e.dim:
        raise DomainError(f"flat lives in {flat.dim_ambient}-space but ellipsoid in {e.dim}-space")
    return bool(hits_ellipsoid(flat.basepoint[None], flat.directions[None], e)[0])


def reference_ball(*bodies: Ellipsoid):
    """Centre (first body's centre) and radius of a ball containing all bodies."""
    c = bodies[0].center
    rad = max(float(np.linalg.norm(b.center - c)) + b.semi_axes[0] for b in bodies)
    return c, rad * (1.0 + REFERENCE_INFLATION)


def hit_counts(bodies, r: int, trials: int, seed: int, rotation=None, workers: int = 1, reference=None):
    """Joint hit counts of shared flats against several ellipsoids.

    Returns (counts per body, count hitting all bodies pairwise as an
    (k, k) matrix, reference radius). Flats are drawn in batches keyed by
    (seed, batch index), so the counts do not depend on ``workers``.
    ``rotation`` applies a fixed rotation to every sampled flat.
    """
    n = bodies[0].dim
    if any(b.dim != n for b in bodies):
        raise DomainError("all bodies must share the ambient dimension")
    center, rad = reference_ball(*bodies) if reference is None else reference
    _check_dims(n, r, rad)

    def batch(stream, size):
        rng = stream_rng(seed, stream)
        base, dirs = sample_flats(n, r, rad, size, rng)
        if rotation is not None:
            rot = np.asarray(rotation, dtype=float)
            base = base @ rot.T
            dirs = dirs @ rot.T
        base = base + center
        h = np.stack([hits_ellipsoid(base, dirs, b) for b in bodies], axis=1).astype(np.int64)
        return h.T @ h

    joint = np.sum(map_batches(batch, batch_sizes(trials), workers), axis=0)
    return np.diag(joint).copy(), joint, rad


def hit_estimate(e: Ellipsoid, r: int, trials: int, seed: int, reference_radius: float = None) -> HitEstimate:
    ref = None if reference_radius is None else (e.center, reference_radius)
    if ref is not None and reference_radius < e.semi_axes[0]:
        raise DomainError("reference ball must contain the ellipsoid")
    counts, _, rad = hit_counts([e], r, trials, seed, reference=ref)
    return HitEstimate(int(counts[0]), int(trials), float(rad))


def hit_measure_ratio(e1: Ellipsoid, e2: Ellipsoid, r: int, trials: int, seed: int, workers: int = 1):
    """Estimate M_{r-1}(e1) / M_{r-1}(e2) from shared random flats.

    Both ellipsoids see the same flats, so the delta-method error uses the
    paired covariance of the two hit indicators.
    Returns (ratio, std_error, (HitEstimate for e1, HitEstimate for e2)).
    """
    if trials < 10_000:
        raise DomainError(f"trials must be >= 1e4, got {trials}")
    counts, joint, rad = hit_counts([e1, e2], r, trials, seed, workers=workers)
    if counts[1] == 0:
        raise NumericalError("no flat hit the second ellipsoid; the ratio is undefined")
    n = float(trials)
    p1, p2, p12 = counts[0] / n, counts[1] / n, joint[0, 1] / n
    ratio = p1 / p2
    var = ((p1 - p1 * p1) - 2 * ratio * (p12 - p1 * p2) + ratio**2 * (p2 - p2 * p2)) / (n * p2 * p2)
    ests = (HitEstimate(int(counts[0]), trials, rad), HitEstimate(int(counts[1]), trials, rad))
    return float(ratio), float(np.sqrt(max(var, 0.0))), ests


def inclusion_violations(inner: Ellipsoid, outer: Ellipsoid, r: int, trials: int, seed: int) -> int:
    """Number of sampled flats hitting ``inner`` but missing ``outer``."""
    counts, joint, _ = hit_counts([inner, outer], r, trials, seed)
    return int(counts[0] - joint[0, 1])
