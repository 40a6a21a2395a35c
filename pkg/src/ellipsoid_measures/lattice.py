"""Exact integer-lattice point counts in solid ellipsoids and the discrepancy
|N(E) - vol E| relative to the tube polynomial evaluated at sqrt(n)."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

from .bounds import tube_polynomial
from .core import Ellipsoid, ellipsoid_volume
from .errors import DomainError, ResourceError

MAX_CANDIDATES = 10**9
BOUNDARY_MARGIN = 1e-9


def candidate_count(e: Ellipsoid) -> int:
    """Number of integer points in the axis-aligned bounding box of ``e``."""
    q_inv = (e.frame * e.semi_axes**2) @ e.frame.T
    half = np.sqrt(np.diag(q_inv))
    lo = np.ceil(e.center - half)
    hi = np.floor(e.center + half)
    return int(np.prod(np.maximum(hi - lo + 1, 0).astype(object)))


def _exact_inside(x, e: Ellipsoid) -> bool:
    """Membership of the integer point ``x`` in rational arithmetic.

    Exact for the ellipsoid as stored (floats read as exact rationals).
    """
    n = e.dim
    d = [Fraction(int(x[j])) - Fraction(float(e.center[j])) for j in range(n)]
    total = Fraction(0)
    for i in range(n):
        proj = sum(Fraction(float(e.frame[j, i])) * d[j] for j in range(n))
        total += proj * proj / Fraction(float(e.semi_axes[i])) ** 2
    return total <= 1


class _Counter:
    """Enumerates lattice points slab by slab.

    With Q = R^T R (R upper triangular) the form splits as
    sum_k R_kk^2 (y_k + mu_k)^2 where mu_k depends only on y_{k+1..n-1}, so
    fixing the trailing coordinates leaves an interval for the next one.
    """

    def __init__(self, e: Ellipsoid):
        self.e = e
        self.n = e.dim
        q = e.shape_matrix
        r = np.linalg.cholesky(q).T  # q = r^T r, r upper triangular
        self.diag = np.diag(r).copy()
        self.coupling = r / self.diag[:, None]
        self.c = e.center
        self.delta = BOUNDARY_MARGIN * max(1.0, float(e.semi_axes[0]))

    def _mu(self, k, ys):
        # ys columns are y_{k+1}, ..., y_{n-1}
        return ys @ self.coupling[k, k + 1 :] if ys.shape[1] else np.zeros(len(ys))

    def top_values(self):
        k = self.n - 1
        w = 1.0 / self.diag[k]
        return np.arange(math.ceil(self.c[k] - w - self.delta), math.floor(self.c[k] + w + self.delta) + 1)

    def count_slab(self, top_values) -> int:
        n = self.n
        xs = np.asarray(top_values, dtype=float).reshape(-1, 1)
        resid = np.ones(len(xs))
        # xs holds integer coordinates x_k..x_{n-1}; walk down to level 0
        for k in range(n - 1, 0, -1):
            ys = xs - self.c[k:]
            t = ys[:, 0] + self._mu(k, ys[:, 1:])
            resid = resid - (self.diag[k] * t) ** 2
            keep = resid > -self.delta
            xs, resid = xs[keep], np.maximum(resid[keep], 0.0)
            ys = xs - self.c[k:]
            mu = self._mu(k - 1, ys)
            w = np.sqrt(resid) / self.diag[k - 1]
            lo = np.ceil(self.c[k - 1] - mu - w - self.delta).astype(np.int64)
            hi = np.floor(self.c[k - 1] - mu + w + self.delta).astype(np.int64)
            cnt = np.maximum(hi - lo + 1, 0)
            if k == 1:
                return self._count_last(xs, resid, mu, w, lo, hi, cnt)
            rep = np.repeat(np.arange(len(xs)), cnt)
            offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            newcol = (np.repeat(lo, cnt) + offs).astype(float)
            xs = np.column_stack([newcol, xs[rep]])
            resid = resid[rep]
        # n == 1: the top values are the candidates themselves
        w = 1.0 / self.diag[0]
        return sum(1 for x in top_values if self._sure_or_exact([int(x)], abs(x - self.c[0]), w))

    def _sure_or_exact(self, point, dist, w):
        if dist <= w - self.delta:
            return True
        return _exact_inside(point, self.e)

    def _count_last(self, xs, resid, mu, w, lo, hi, cnt) -> int:
        centre = self.c[0] - mu
        sure_lo = np.ceil(centre - w + self.delta).astype(np.int64)
        sure_hi = np.floor(centre + w - self.delta).astype(np.int64)
        sure = np.maximum(sure_hi - sure_lo + 1, 0)
        total = int(sure.sum())
        # integers in [lo, hi] but outside [sure_lo, sure_hi] are within the
        # margin band of the boundary: decide them exactly
        edge = np.nonzero(cnt > sure)[0]
        for idx in edge:
            s_lo, s_hi = int(sure_lo[idx]), int(sure_hi[idx])
            for x0 in range(int(lo[idx]), int(hi[idx]) + 1):
                if s_lo <= x0 <= s_hi and s_lo <= s_hi:
                    continue
                point = [x0] + [int(v) for v in xs[idx]]
                if _exact_inside(point, self.e):
                    total += 1
        return total


def lattice_count(e: Ellipsoid, workers: int = 1, max_candidates: int = MAX_CANDIDATES) -> int:
    """Exact number of integer points in the solid ellipsoid ``e``.

    Points within a 1e-9 band of the boundary are decided in rational
    arithmetic. ``workers`` splits the outermost coordinate range; the total
    is an integer sum and does not depend on the split.
    """
    est = candidate_count(e)
    if est > max_candidates:
        raise ResourceError(
            f"bounding box holds {est} candidate points, above the guard of {max_candidates}", estimate=est
        )
    counter = _Counter(e)
    top = counter.top_values()
    chunks = [c for c in np.array_split(top, max(1, min(len(top), 64))) if len(c)]
    if workers <= 1:
        return int(sum(counter.count_slab(c) for c in chunks))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return int(sum(pool.map(counter.count_slab, chunks)))


def brute_force_count(e: Ellipsoid) -> int:
    """Reference count: test every point of the bounding box."""
    q_inv = (e.frame * e.semi_axes**2) @ e.frame.T
    half = np.sqrt(np.diag(q_inv))
    axes = [np.arange(math.ceil(c - h - 1e-9), math.floor(c + h + 1e-9) + 1) for c, h in zip(e.center, half)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, e.dim)
    y = ((grid - e.center) @ e.frame) / e.semi_axes
    q = np.einsum("ij,ij->i", y, y)
    sure = q <= 1 - 1e-9
    near = np.abs(q - 1) < 1e-9
    return int(sure.sum()) + sum(_exact_inside(p, e) for p in grid[near])


@dataclass(frozen=True)
class LatticeReport:
    count: int
    volume: float
    discrepancy: float
    tube_value: float
    tube_integral: float
    ratio: float
    tube_value_half: float
    ratio_half: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def lattice_discrepancy(e: Ellipsoid, workers: int = 1) -> LatticeReport:
    """Count, volume and Delta(E), with Delta / f(sqrt n) and Delta / f(sqrt(n)/2)."""
    n = e.dim
    if n < 2:
        raise DomainError("lattice discrepancy needs dimension >= 2 (the tube polynomial vanishes for n = 1)")
    count = lattice_count(e, workers=workers)
    vol = ellipsoid_volume(e)
    disc = abs(count - vol)
    f = tube_polynomial(e)
    r = math.sqrt(n)
    fv = float(f(r))
    fh = float(f(r / 2))
    return LatticeReport(
        count=count,
        volume=vol,
        discrepancy=disc,
        tube_value=fv,
        tube_integral=f.integral(r),
        ratio=disc / fv,
        tube_value_half=fh,
        ratio_half=disc / fh,
    )


SWEEP_COLUMNS = ("lambda", "count", "volume", "discrepancy", "f_sqrt_n", "ratio", "f_half_sqrt_n", "ratio_half")


def dilation_sweep(e: Ellipsoid, lambdas, workers: int = 1) -> list:
    """One row per dilation factor, columns as in ``SWEEP_COLUMNS``."""
    rows = []
    for lam in lambdas:
        rep = lattice_discrepancy(e.scaled(float(lam)), workers=workers)
        rows.append(
            {
                "lambda": float(lam),
                "count": rep.count,
                "volume": rep.volume,
                "discrepancy": rep.discrepancy,
                "f_sqrt_n": rep.tube_value,
                "ratio": rep.ratio,
                "f_half_sqrt_n": rep.tube_value_half,
                "ratio_half": rep.ratio_half,
            }
        )
    return rows


@dataclass(frozen=True)
class TrendTest:
    slope: float
    std_error: float
    lower_95: float  # one-sided lower confidence bound on the slope
    non_increasing: bool  # slope > 0 is not supported at the 95% level

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def slope_trend(x, y) -> TrendTest:
    """Least-squares slope with a one-sided 95% test against growth."""
    res = stats.linregress(np.asarray(x, float), np.asarray(y, float))
    dof = len(x) - 2
    lower = res.slope - stats.t.ppf(0.95, dof) * res.stderr
    return TrendTest(float(res.slope), float(res.stderr), float(lower), bool(lower <= 0.0))
