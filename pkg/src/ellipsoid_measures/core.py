"""Ellipsoids, boxes, ball/sphere constants and elementary symmetric functions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DegeneracyError, DomainError

ORTHONORMAL_TOL = 1e-12


# ---------------------------------------------------------------------------
# dimensional constants


@lru_cache(maxsize=None)
def unit_ball_volume(k: int) -> float:
    """Volume kappa_k of the unit ball in k-space.

    Uses the exact recurrence kappa_k = 2*pi/k * kappa_{k-2} rather than a
    Gamma evaluation, so half-integer cases carry no approximation error
    beyond rounding.
    """
    if k < 0:
        raise DomainError(f"ball dimension must be >= 0, got {k}")
    if k == 0:
        return 1.0
    if k == 1:
        return 2.0
    return 2.0 * math.pi / k * unit_ball_volume(k - 2)


def sphere_area(k: int) -> float:
    """omega_k: surface area of the unit sphere in (k+1)-space (omega_0 = 2)."""
    if k < 0:
        raise DomainError(f"sphere dimension must be >= 0, got {k}")
    return (k + 1) * unit_ball_volume(k + 1)


@dataclass(frozen=True)
class DimensionalConstants:
    dim: int
    kappa: tuple  # kappa_1 .. kappa_n
    omega: tuple  # omega_0 .. omega_{n-1}

    @classmethod
    def for_dim(cls, n: int) -> "DimensionalConstants":
        if n < 1:
            raise DomainError(f"dimension must be positive, got {n}")
        return cls(
            dim=n,
            kappa=tuple(unit_ball_volume(k) for k in range(1, n + 1)),
            omega=tuple(sphere_area(k) for k in range(n)),
        )


# ---------------------------------------------------------------------------
# elementary symmetric functions


def sym_elem_all(values) -> np.ndarray:
    """All elementary symmetric functions s_0..s_n of ``values``.

    Coefficients of prod(x + v_i), built one factor at a time; this is the
    stable recurrence, never a subset enumeration.
    """
    v = np.asarray(values, dtype=float).ravel()
    e = np.zeros(v.size + 1)
    e[0] = 1.0
    for j, x in enumerate(v, start=1):
        e[1 : j + 1] = e[1 : j + 1] + x * e[:j]
    return e


def sym_elem(values, k: int) -> float:
    """k-th elementary symmetric function s_k(values)."""
    n = len(values)
    if not 0 <= k <= n:
        raise DomainError(f"sym_elem index k must satisfy 0 <= k <= {n}, got {k}")
    return float(sym_elem_all(values)[k])


def sym_elem_leave_one_out(values, k: int) -> np.ndarray:
    """s_k of ``values`` with entry j removed, for every j (length-n array)."""
    v = np.asarray(values, dtype=float)
    if k < 0:
        return np.zeros(v.shape[-1])
    return np.array([sym_elem_all(np.delete(v, j))[k] if k <= v.size - 1 else 0.0
                     for j in range(v.size)])


# ---------------------------------------------------------------------------
# bodies


def _as_vector(x, n, name):
    arr = np.array(x, dtype=float).reshape(-1)
    if arr.size != n:
        raise DomainError(f"{name} must have length {n}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """Solid ellipsoid {x : sum_i <x - center, frame[:, i]>^2 / a_i^2 <= 1}.

    ``semi_axes`` are sorted non-increasing and the columns of ``frame`` are
    the matching principal directions. Use :func:`make_ellipsoid` to build one
    from unsorted axes.
    """

    semi_axes: np.ndarray
    frame: np.ndarray = None
    center: np.ndarray = None
    dim: int = field(init=False)

    def __post_init__(self):
        a = np.array(self.semi_axes, dtype=float).reshape(-1)
        n = a.size
        if n < 1:
            raise DomainError("an ellipsoid needs at least one semi-axis")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise DomainError(f"semi_axes must be strictly positive, got {a.tolist()}")
        if np.any(np.diff(a) > 0):
            raise DomainError("semi_axes must be sorted non-increasing")
        frame = np.eye(n) if self.frame is None else np.array(self.frame, dtype=float)
        if frame.shape != (n, n):
            raise DomainError(f"frame must be {n}x{n}, got shape {frame.shape}")
        if np.max(np.abs(frame.T @ frame - np.eye(n))) > ORTHONORMAL_TOL:
            raise DomainError("frame must be orthonormal (frame^T frame = I within 1e-12)")
        center = np.zeros(n) if self.center is None else _as_vector(self.center, n, "center")
        for arr in (a, frame, center):
            arr.setflags(write=False)
        object.__setattr__(self, "semi_axes", a)
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "dim", n)

    # derived accessors
    @property
    def singular_values(self) -> np.ndarray:
        return 1.0 / self.semi_axes

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.semi_axes ** -2

    @property
    def shape_matrix(self) -> np.ndarray:
        """Q with the ellipsoid written as (x - c)^T Q (x - c) <= 1."""
        return (self.frame * self.eigenvalues) @ self.frame.T

    def volume(self) -> float:
        return ellipsoid_volume(self)

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float)) - self.center
        y = (p @ self.frame) / self.semi_axes
        return np.einsum("ij,ij->i", y, y) <= 1.0 + tol

    def scaled(self, factor: float) -> "Ellipsoid":
        """Homothety about the center."""
        if factor <= 0:
            raise DomainError(f"scale factor must be positive, got {factor}")
        return Ellipsoid(self.semi_axes * factor, self.frame, self.center)

    def rotated(self, rotation) -> "Ellipsoid":
        """Image under x -> R x (rotation about the origin)."""
        r = np.asarray(rotation, dtype=float)
        return Ellipsoid(self.semi_axes, r @ self.frame, r @ self.center)

    def translated(self, shift) -> "Ellipsoid":
        return Ellipsoid(self.semi_axes, self.frame, self.center + _as_vector(shift, self.dim, "shift"))

    def is_axis_aligned(self) -> bool:
        return bool(np.all(np.sum(np.abs(self.frame) > 0, axis=0) == 1))

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "center": self.center.tolist(),
            "frame": self.frame.reshape(-1).tolist(),
            "semi_axes": self.semi_axes.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Ellipsoid":
        n = int(d["dim"])
        frame = d.get("frame")
        if frame is not None:
            frame = np.asarray(frame, dtype=float).reshape(n, n)
        return make_ellipsoid(d["semi_axes"], frame=frame, center=d.get("center"))


def make_ellipsoid(axes, frame=None, center=None) -> Ellipsoid:
    """Build an Ellipsoid from axes in any order, permuting frame columns to match."""
    a = np.array(axes, dtype=float).reshape(-1)
    n = a.size
    if np.any(~np.isfinite(a)) or np.any(a <= 0):
        raise DomainError(f"semi_axes must be strictly positive, got {a.tolist()}")
    f = np.eye(n) if frame is None else np.asarray(frame, dtype=float)
    if f.shape != (n, n):
        raise DomainError(f"frame must be {n}x{n}, got shape {f.shape}")
    order = np.argsort(-a, kind="stable")
    return Ellipsoid(a[order], f[:, order], center)


def ball(radius: float, dim: int, center=None) -> Ellipsoid:
    return Ellipsoid(np.full(dim, float(radius)), None, center)


def ellipsoid_from_matrix(A) -> Ellipsoid:
    """The origin-centred ellipsoid {x : |A x| <= 1}.

    Semi-axes are reciprocals of the singular values of A; principal
    directions are its right singular vectors.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"A must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("A must be finite")
    _, sv, vt = np.linalg.svd(A)
    if sv[-1] <= 1e-12 * sv[0]:
        raise DegeneracyError(
            f"A is singular or near-singular (sigma_min/sigma_max = {sv[-1] / sv[0]:.3g} <= 1e-12)"
        )
    # svd returns sigma descending, so 1/sigma ascending: reverse to sort axes.
    return Ellipsoid(1.0 / sv[::-1], vt[::-1].T)


def ellipsoid_volume(e: Ellipsoid) -> float:
    return unit_ball_volume(e.dim) * float(np.prod(e.semi_axes))


@dataclass(frozen=True, eq=False)
class Box:
    """Rectangular box with sides parallel to the coordinate axes."""

    side_lengths: np.ndarray
    center: np.ndarray = None
    dim: int = field(init=False)

    def __post_init__(self):
        l = np.array(self.side_lengths, dtype=float).reshape(-1)
        if l.size < 1 or np.any(~np.isfinite(l)) or np.any(l <= 0):
            raise DomainError(f"side_lengths must be strictly positive, got {l.tolist()}")
        c = np.zeros(l.size) if self.center is None else _as_vector(self.center, l.size, "center")
        l.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "side_lengths", l)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "dim", l.size)

    def volume(self) -> float:
        return float(np.prod(self.side_lengths))

    def contains(self, points) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float)) - self.center
        return np.all(np.abs(p) <= self.side_lengths / 2, axis=1)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "center": self.center.tolist(), "side_lengths": self.side_lengths.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Box":
        return cls(d["side_lengths"], d.get("center"))


def circumscribed_box(e: Ellipsoid) -> Box:
    """Box with sides 2*a_i (in the ellipsoid's own frame)."""
    return Box(2.0 * e.semi_axes)


def random_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))
