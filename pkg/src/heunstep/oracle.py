"""Direct numerical integration of the stationary Schrodinger equation.

This is deliberately independent of the hypergeometric machinery: it uses
only the potential and a fixed-step classical Runge-Kutta scheme. A unit
transmitted wave is imposed on the right edge and the solution is carried
leftwards, where it is decomposed into incident and reflected waves.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import DecompositionUnstable, StepTooLarge
from .geometry import PhysicalConfig, coordinate_z_minus_one

__all__ = [
    "IntegrationGrid",
    "OracleResult",
    "default_grid",
    "extract_rt",
    "integrate_schrodinger",
    "local_wavenumber",
    "solve_scattering",
]

FLAT_TOL = 1e-12
MIN_HALF_WIDTH = 40.0  # in units of |sigma|
STEP_SCALE = 0.01
CONVERGENCE_TOL = 1e-6
DECOMPOSITION_TOL = 1e-4


@dataclass
class IntegrationGrid:
    """Integration interval and, once filled, the sampled solution."""

    x_left: float
    x_right: float
    step: float
    x: np.ndarray = field(default=None, repr=False)
    psi: np.ndarray = field(default=None, repr=False)
    dpsi: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not self.x_left < self.x_right:
            raise ValueError("x_left must be below x_right")
        if not self.step > 0:
            raise ValueError("step must be positive")

    @property
    def filled(self) -> bool:
        return self.psi is not None

    def current(self, cfg: PhysicalConfig) -> np.ndarray:
        """Probability current (hbar/m) Im(psi* psi') along the grid."""
        return cfg.hbar / cfg.m * np.imag(np.conj(self.psi) * self.dpsi)


@dataclass(frozen=True)
class OracleResult:
    R: float
    T: float
    A: complex
    B: complex
    grid: IntegrationGrid = field(repr=False)
    delta_T: Optional[float] = None


def _potential(x: np.ndarray, cfg: PhysicalConfig) -> np.ndarray:
    # V0 + V1/z written through z - 1 so the approach to V0 + V1 keeps full precision
    zm1 = coordinate_z_minus_one(x, cfg)
    return cfg.V0 + cfg.V1 - cfg.V1 * zm1 / (1.0 + zm1)


def local_wavenumber(cfg: PhysicalConfig, E: float, V: float) -> complex:
    """sqrt(2m(E - V))/hbar; positive imaginary below the local potential."""
    return cmath.sqrt(cfg.kfactor * (E - V))


def default_grid(cfg: PhysicalConfig, E: float, step: Optional[float] = None) -> IntegrationGrid:
    """Interval around the step, at least ``x0 +- 40|sigma|``, widened until V is flat to 1e-12.

    The ``z -> inf`` tail decays only like ``e^{-|x|/(3|sigma|)}`` and sets
    the width on that side.
    """
    s = abs(cfg.sigma)
    scale = max(abs(cfg.V0), abs(cfg.V1), 1.0)
    amp = abs(cfg.V1) / (FLAT_TOL * scale)
    # tails: |V - V0| ~ |V1| 2^{-2/3} e^{-t/3}  and  |V - V0 - V1| ~ |V1| (4/9) e^{-t}
    far_z = 3.0 * math.log(max(amp * 2.0 ** (-2.0 / 3.0), 1.0)) + 1.0
    near_z = math.log(max(amp * 4.0 / 9.0, 1.0)) + 1.0
    w_big_z = max(MIN_HALF_WIDTH, far_z) * s
    w_small_z = max(MIN_HALF_WIDTH, near_z) * s
    if cfg.sigma < 0:  # z -> inf as x -> -inf
        left, right = cfg.x0 - w_big_z, cfg.x0 + w_small_z
    else:
        left, right = cfg.x0 - w_small_z, cfg.x0 + w_big_z
    if step is None:
        kmax = max(abs(local_wavenumber(cfg, E, cfg.V0)),
                   abs(local_wavenumber(cfg, E, cfg.V0 + cfg.V1)), 1.0 / s)
        step = STEP_SCALE / kmax
    return IntegrationGrid(x_left=left, x_right=right, step=step)


def integrate_schrodinger(cfg: PhysicalConfig, E: float,
                          grid: Optional[IntegrationGrid] = None) -> IntegrationGrid:
    """Fill ``grid`` with psi, psi' by classical RK4 from ``x_right`` down to ``x_left``.

    Starts from ``psi = e^{i k x}``, ``psi' = i k psi`` with ``k`` the local
    wavenumber at ``x_right`` (the transmitted wave). The step is adjusted
    down so that an integer number of steps spans the interval.
    """
    grid = default_grid(cfg, E) if grid is None else grid
    n = max(1, int(math.ceil((grid.x_right - grid.x_left) / grid.step)))
    h = (grid.x_right - grid.x_left) / n
    # potential at every half step, walking leftwards
    xh = grid.x_right - 0.5 * h * np.arange(2 * n + 1)
    xh[-1] = grid.x_left
    kk = (cfg.kfactor * (E - _potential(xh, cfg))).tolist()

    k_right = local_wavenumber(cfg, E, float(_potential(np.array([grid.x_right]), cfg)[0]))
    psi = cmath.exp(1j * k_right * grid.x_right)
    dpsi = 1j * k_right * psi

    psis = [psi]
    dpsis = [dpsi]
    hh = -h
    half = 0.5 * hh
    sixth = hh / 6.0
    for j in range(n):
        k0, km, k1 = kk[2 * j], kk[2 * j + 1], kk[2 * j + 2]
        # y' = (psi', -k^2 psi)
        a_p, a_d = dpsi, -k0 * psi
        b_p, b_d = dpsi + half * a_d, -km * (psi + half * a_p)
        c_p, c_d = dpsi + half * b_d, -km * (psi + half * b_p)
        d_p, d_d = dpsi + hh * c_d, -k1 * (psi + hh * c_p)
        psi = psi + sixth * (a_p + 2.0 * b_p + 2.0 * c_p + d_p)
        dpsi = dpsi + sixth * (a_d + 2.0 * b_d + 2.0 * c_d + d_d)
        psis.append(psi)
        dpsis.append(dpsi)

    grid.x = xh[::2].copy()
    grid.psi = np.array(psis)
    grid.dpsi = np.array(dpsis)
    grid.step = h
    return grid


def _decompose(psi: complex, dpsi: complex, x: float, k: complex) -> Tuple[complex, complex]:
    A = cmath.exp(-1j * k * x) * (psi + dpsi / (1j * k)) / 2.0
    B = cmath.exp(1j * k * x) * (psi - dpsi / (1j * k)) / 2.0
    return A, B


def extract_rt(grid: IntegrationGrid, cfg: PhysicalConfig, E: float) -> Tuple[float, float, complex, complex]:
    """Plane-wave decomposition at the left edge; returns ``(R, T, A, B)``.

    The transmitted wave has unit amplitude, so ``T = (k_right / k_left) / |A|^2``
    (zero when the right side is classically forbidden) and ``R = |B/A|^2``.
    Raises :class:`DecompositionUnstable` if A or B (relative to |A|)
    moves by more than 1e-4 between the two leftmost samples.
    """
    if not grid.filled:
        raise ValueError("grid has not been integrated")
    V_left = float(_potential(np.array([grid.x_left]), cfg)[0])
    V_right = float(_potential(np.array([grid.x_right]), cfg)[0])
    k_left = local_wavenumber(cfg, E, V_left)
    k_right = local_wavenumber(cfg, E, V_right)
    if abs(k_left.imag) > 0:
        raise ValueError("no propagating incident wave: E below the left asymptote")
    A, B = _decompose(complex(grid.psi[-1]), complex(grid.dpsi[-1]), grid.x[-1], k_left)
    A2, B2 = _decompose(complex(grid.psi[-2]), complex(grid.dpsi[-2]), grid.x[-2], k_left)
    drift = max(abs(A - A2), abs(B - B2)) / abs(A)
    if drift > DECOMPOSITION_TOL:
        raise DecompositionUnstable(f"plane-wave amplitudes drift by {drift:.2e} at the left edge")
    R = abs(B) ** 2 / abs(A) ** 2
    T = 0.0 if k_right.imag > 0 else k_right.real / k_left.real / abs(A) ** 2
    return R, T, A, B


def solve_scattering(cfg: PhysicalConfig, E: float, grid: Optional[IntegrationGrid] = None,
                     check_convergence: bool = True) -> OracleResult:
    """Integrate, extract (R, T), and confirm convergence by halving the step.

    Raises :class:`StepTooLarge` when halving changes T (or R, below the
    barrier) by more than 1e-6. The returned result is the finer run.
    """
    grid = default_grid(cfg, E) if grid is None else grid
    coarse = integrate_schrodinger(cfg, E, IntegrationGrid(grid.x_left, grid.x_right, grid.step))
    R, T, A, B = extract_rt(coarse, cfg, E)
    if not check_convergence:
        return OracleResult(R=R, T=T, A=A, B=B, grid=coarse)
    fine = integrate_schrodinger(cfg, E, IntegrationGrid(grid.x_left, grid.x_right, coarse.step / 2))
    R2, T2, A2, B2 = extract_rt(fine, cfg, E)
    delta = max(abs(T2 - T), abs(R2 - R))
    if delta > CONVERGENCE_TOL:
        raise StepTooLarge(f"step halving changed T by {abs(T2 - T):.2e}, R by {abs(R2 - R):.2e}")
    return OracleResult(R=R2, T=T2, A=A2, B=B2, grid=fine, delta_T=abs(T2 - T))
