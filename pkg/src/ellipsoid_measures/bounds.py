"""Two-sided estimates for ellipsoid mean curvatures and their parallel bodies.

Pinch: the box with sides 2*a_i contains E and its shrink by sqrt(n) is
contained in E, so monotonicity of M_i under inclusion sandwiches M_i(E)
between the two box values. Everything else here (tube area and volume
bounds) is built from those term-wise estimates and the Steiner polynomial.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb

from .core import Box, Ellipsoid, ellipsoid_volume, sphere_area, sym_elem_all
from .errors import DomainError
from .measures import MeanCurvatures, box_mean_curvatures


def _down(x: float) -> float:
    return float(np.nextafter(x, -np.inf))


def _up(x: float) -> float:
    return float(np.nextafter(x, np.inf))


@dataclass(frozen=True)
class BoundInterval:
    lower: float
    upper: float
    quantity: str
    constants_used: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}] for {self.quantity}")

    def __contains__(self, x) -> bool:
        return self.lower <= x <= self.upper

    @property
    def ratio(self) -> float:
        return self.upper / self.lower

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "lower": self.lower,
            "upper": self.upper,
            "constants_used": dict(self.constants_used),
        }


def pinch_ratio(n: int, i: int) -> float:
    """(sqrt n)^(n-1-i), the realized upper/lower ratio of the pinch."""
    return math.sqrt(n) ** (n - 1 - i)


def pinch_upper_constant(n: int, i: int) -> float:
    """C_{n,i} with M_i(E) <= C_{n,i} * s_{n-1-i}(a)."""
    return sphere_area(i) * 2.0 ** (n - 1 - i) / comb(n - 1, i, exact=True)


def pinch_bounds(e: Ellipsoid, i: int) -> BoundInterval:
    n = e.dim
    if not 0 <= i <= n - 1:
        raise DomainError(f"index i must satisfy 0 <= i <= {n - 1}, got {i}")
    upper = float(box_mean_curvatures(Box(2.0 * e.semi_axes)).values[i])
    ratio = pinch_ratio(n, i)
    lower = upper / ratio
    c_upper = pinch_upper_constant(n, i)
    return BoundInterval(
        _down(lower),
        _up(upper),
        f"MeanCurvature({i})",
        {"c": c_upper / ratio, "C": c_upper, "ratio_bound": ratio, "stated_ratio": n ** ((n - i) / 2)},
    )


def parallel_area(m: MeanCurvatures, rho: float) -> float:
    """Area of the boundary of the outer parallel body at distance rho."""
    if rho < 0:
        raise DomainError(f"rho must be >= 0, got {rho}")
    n = m.dim
    return float(sum(comb(n - 1, k, exact=True) * m.values[k] * rho**k for k in range(n)))


def parallel_volume(vol0: float, m: MeanCurvatures, rho: float) -> float:
    """Volume of the outer parallel body (term-wise integral of the area)."""
    if rho < 0:
        raise DomainError(f"rho must be >= 0, got {rho}")
    n = m.dim
    return float(vol0 + sum(comb(n - 1, k, exact=True) * m.values[k] * rho ** (k + 1) / (k + 1) for k in range(n)))


# ---------------------------------------------------------------------------
# tube polynomial


@dataclass(frozen=True, eq=False)
class TubePolynomial:
    """f(rho) = (prod(rho + 2 l_i) - rho^n - 2^n prod l_i) / rho with l_i = a_i.

    ``coefficients[k]`` is the rho^k coefficient of prod(rho + 2 l_i).
    """

    dim: int
    coefficients: np.ndarray

    @property
    def f_coefficients(self) -> np.ndarray:
        """rho^j coefficients of f, j = 0..n-2."""
        return self.coefficients[1 : self.dim]

    def __call__(self, rho) -> np.ndarray:
        return np.polynomial.polynomial.polyval(rho, self.f_coefficients)

    def integral(self, rho: float) -> float:
        """Integral of f over [0, rho]."""
        c = self.f_coefficients
        return float(sum(c[j] * rho ** (j + 1) / (j + 1) for j in range(c.size)))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "coefficients": self.coefficients.tolist()}


def tube_polynomial(e: Ellipsoid) -> TubePolynomial:
    s = sym_elem_all(2.0 * e.semi_axes)
    # rho^k coefficient of prod(rho + 2a_i) is s_{n-k}(2a)
    return TubePolynomial(e.dim, s[::-1].copy())


def tube_constants(n: int) -> dict:
    """Constants c_n <= C_n for c_n f(rho) <= area(d E_rho) <= C_n f(rho).

    Each Steiner term binom(n-1,k) M_k rho^k is pinched between
    omega_k s_{n-1-k}(2a) rho^k / sqrt(n)^(n-1-k) and omega_k s_{n-1-k}(2a) rho^k.
    f drops the top term omega_{n-1} rho^(n-1); for rho <= s_1(a) it is at
    most omega_{n-1}/2 * s_1(2a) rho^(n-2), which is folded into C_n. The
    lower constant needs no radius restriction.
    """
    w = [sphere_area(k) for k in range(n)]
    upper_terms = w[: n - 1]
    upper_terms[n - 2] += w[n - 1] / 2
    big = max(upper_terms)
    small = min(w[k] / math.sqrt(n) ** (n - 1 - k) for k in range(n - 1))
    stated = math.sqrt(n) ** (n - 1) * math.gamma((n + 1) / 2) / (2 * math.pi ** ((n + 1) / 2))
    return {
        "c": small,
        "C": big,
        "ratio_bound": big / small,
        "stated_ratio": stated,
    }


def _tube_checks(e: Ellipsoid, rho: float):
    if e.dim < 2:
        raise DomainError(f"tube bounds need dimension >= 2, got {e.dim}")
    if not rho > 0:
        raise DomainError(f"rho must be > 0, got {rho}")


def tube_area_bounds(e: Ellipsoid, rho: float) -> BoundInterval:
    """Bounds on the area of the outer parallel surface at distance rho.

    The upper constant is proven only for rho <= s_1(a); ``constants_used``
    records that radius as ``valid_radius``.
    """
    _tube_checks(e, rho)
    f = tube_polynomial(e)
    k = tube_constants(e.dim)
    val = float(f(rho))
    consts = dict(k, f=val, valid_radius=float(np.sum(e.semi_axes)))
    return BoundInterval(_down(k["c"] * val), _up(k["C"] * val), f"TubeArea({rho!r})", consts)


def tube_volume_bounds(e: Ellipsoid, rho: float) -> BoundInterval:
    _tube_checks(e, rho)
    f = tube_polynomial(e)
    k = tube_constants(e.dim)
    vol = ellipsoid_volume(e)
    fint = f.integral(rho)
    consts = dict(k, f_integral=fint, volume=vol, valid_radius=float(np.sum(e.semi_axes)))
    return BoundInterval(_down(vol + k["c"] * fint), _up(vol + k["C"] * fint), f"TubeVolume({rho!r})", consts)


def tube_breakdown_radius(e: Ellipsoid, m: MeanCurvatures, rho_max: float = None, grid: int = 4000) -> float:
    """Smallest rho at which the true parallel area leaves the tube interval.

    Scans a geometric grid up to ``rho_max`` (default 1e3 * s_1(a)) and
    bisects the first crossing; returns inf if none is found.
    """
    s1 = float(np.sum(e.semi_axes))
    rho_max = 1e3 * s1 if rho_max is None else rho_max
    f = tube_polynomial(e)
    k = tube_constants(e.dim)

    def outside(r):
        area = parallel_area(m, r)
        val = float(f(r))
        return area > k["C"] * val or area < k["c"] * val

    rs = np.geomspace(1e-3 * s1, rho_max, grid)
    prev = rs[0]
    for r in rs:
        if outside(r):
            lo, hi = prev, r
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                lo, hi = (lo, mid) if outside(mid) else (mid, hi)
            return hi
        prev = r
    return math.inf
