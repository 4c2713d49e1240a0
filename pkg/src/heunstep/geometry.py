"""Potential step V(x) = V0 + V1/z(x) and its coordinate transform.

``z(x)`` is the real root z > 1 of ``(z+2)^2 (z-1) = 4 exp((x-x0)/sigma)``.
All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysicalConfig",
    "TransformPoint",
    "coordinate_z",
    "coordinate_z_minus_one",
    "cubic_residual",
    "jacobian_rho",
    "potential_v",
    "solve_cubic_z",
    "transform_point",
]

# beyond this |(x-x0)/sigma| the exponential is replaced by the asymptotes
EXP_GUARD = 600.0
_CBRT4 = 2.0 ** (2.0 / 3.0)


@dataclass(frozen=True)
class PhysicalConfig:
    """Potential and particle parameters.

    Attributes
    ----------
    V0 : float
        Energy origin (potential far on the ``z -> inf`` side).
    V1 : float
        Step height.
    sigma : float
        Steepness length; its sign sets the step direction.
    x0 : float
        Position of the step.
    m, hbar : float
        Mass and reduced Planck constant.
    """

    V0: float = 0.0
    V1: float = 1.0
    sigma: float = -1.0
    x0: float = 0.0
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        vals = (self.V0, self.V1, self.sigma, self.x0, self.m, self.hbar)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite parameter in {self}")
        if self.m <= 0 or self.hbar <= 0:
            raise ValueError("m and hbar must be positive")
        if self.sigma == 0:
            raise ValueError("sigma must be nonzero")

    @property
    def kfactor(self) -> float:
        """2m/hbar^2, converts an energy difference into k^2."""
        return 2.0 * self.m / self.hbar**2


@dataclass(frozen=True)
class TransformPoint:
    x: float
    z: float
    rho: float


def _reduced(x, cfg: PhysicalConfig):
    return (np.asarray(x, dtype=float) - cfg.x0) / cfg.sigma


def _zm1_from_t(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    mid = np.abs(t) <= EXP_GUARD
    hi = t > EXP_GUARD
    lo = t < -EXP_GUARD

    tm = t[mid]
    e = np.exp(tm)
    # u = e^{t/2} + sqrt(1 + e^t); z - 1 = (s - 1)^2 / s with s = u^{2/3}
    um1 = np.exp(0.5 * tm) + e / (1.0 + np.sqrt(1.0 + e))
    sm1 = np.expm1((2.0 / 3.0) * np.log1p(um1))
    out[mid] = sm1 * sm1 / (1.0 + sm1)

    with np.errstate(over="ignore"):
        # (z+2)^2 (z-1) = c^3 with c = (4e^t)^{1/3} gives z = c - 1 + O(1/c)
        out[hi] = _CBRT4 * np.exp(t[hi] / 3.0) - 1.0
    out[lo] = (4.0 / 9.0) * np.exp(t[lo])
    return out


def _scalar_or_array(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def coordinate_z_minus_one(x, cfg: PhysicalConfig):
    """``z(x) - 1`` without cancellation; tends to ``(4/9) exp((x-x0)/sigma)`` on the z -> 1 side."""
    t = _reduced(x, cfg)
    return _scalar_or_array(_zm1_from_t(np.atleast_1d(t)).reshape(np.shape(t)), x)


def coordinate_z(x, cfg: PhysicalConfig):
    """Transformed coordinate z(x) > 1.

    Closed form for ``|x-x0| <= 600 |sigma|``; outside, the leading
    asymptotes ``2^{2/3} e^{t/3}`` and ``1 + (4/9) e^{t}`` with
    ``t = (x-x0)/sigma``.
    """
    t = _reduced(x, cfg)
    z = 1.0 + _zm1_from_t(np.atleast_1d(t)).reshape(np.shape(t))
    return _scalar_or_array(z, x)


def solve_cubic_z(x, cfg: PhysicalConfig, tol: float = 1e-15, maxiter: int = 200):
    """Root of the cubic by safeguarded Newton on ``log((z+2)^2 (z-1)) = log 4 + t``.

    Works in log form so it never overflows; an independent route to
    :func:`coordinate_z`.
    """
    t = np.atleast_1d(_reduced(x, cfg)).astype(float)
    out = np.empty_like(t)
    log4 = math.log(4.0)
    for i, ti in enumerate(t.flat):
        target = log4 + ti
        # f(w) = 2 log(e^w + 3) + w - target is increasing in w = log(z - 1);
        # the root lies within 1.4 below min(target - 2 log 3, target / 3)
        top = min(target - 2.0 * math.log(3.0), target / 3.0)
        lo, hi = top - 2.0, top + 1e-12
        w = top - 0.5
        for _ in range(maxiter):
            ew = math.exp(w)
            f = 2.0 * math.log(ew + 3.0) + w - target
            if f > 0:
                hi = w
            else:
                lo = w
            df = 2.0 * ew / (ew + 3.0) + 1.0
            step = f / df
            w_new = w - step
            if not lo < w_new < hi:
                w_new = 0.5 * (lo + hi)
            if abs(w_new - w) <= tol * max(1.0, abs(w)):
                w = w_new
                break
            w = w_new
        out.flat[i] = 1.0 + math.exp(w)
    out = out.reshape(np.shape(_reduced(x, cfg)))
    return _scalar_or_array(out, x)


def cubic_residual(z, x, cfg: PhysicalConfig):
    """Relative residual ``|(z+2)^2(z-1) - 4e^t| / (1 + 4e^t)``."""
    z = np.asarray(z, dtype=float)
    t = np.asarray(_reduced(x, cfg), dtype=float)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        e4 = 4.0 * np.exp(np.minimum(t, EXP_GUARD))
        direct = np.abs((z + 2.0) ** 2 * (z - 1.0) - e4) / (1.0 + e4)
        # large z: compare logarithms, the scale 1 + 4e^t is then 4e^t to double precision
        logged = np.abs(np.expm1(2.0 * np.log(z + 2.0) + np.log(z - 1.0) - math.log(4.0) - t))
    return np.where(t > EXP_GUARD, logged, direct)


def jacobian_rho(z, cfg: PhysicalConfig):
    """dz/dx = (z+2)(z-1) / (3 sigma z)."""
    z = np.asarray(z, dtype=float)
    rho = (z + 2.0) * (z - 1.0) / (3.0 * cfg.sigma * z)
    return float(rho) if rho.ndim == 0 else rho


def potential_v(x, cfg: PhysicalConfig):
    """V(x) = V0 + V1 / z(x)."""
    return cfg.V0 + cfg.V1 / coordinate_z(x, cfg)


def transform_point(x: float, cfg: PhysicalConfig) -> TransformPoint:
    z = coordinate_z(float(x), cfg)
    return TransformPoint(x=float(x), z=z, rho=jacobian_rho(z, cfg))
