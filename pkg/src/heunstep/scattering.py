"""Above-barrier scattering: wavefunctions, asymptotic amplitudes, T and R.

For ``sigma < 0`` the step rises from ``V0`` (x -> -inf, ``z -> inf``) to
``V0 + V1`` (x -> +inf, ``z -> 1``). A wave incident from the left is
described by ``c1 = 0``: near ``z = 1`` only the transmitted ``e^{i k2 x}``
survives.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import RegimeError
from .geometry import PhysicalConfig, coordinate_z, coordinate_z_minus_one, potential_v
from .heun import HeunParameters, Sign, build_heun_parameters, fundamental_u1, fundamental_u2
from .special import loggamma

__all__ = [
    "ScatteringAmplitudes",
    "WaveNumbers",
    "abrupt_step_t",
    "amplitudes",
    "log_reflection",
    "log_transmission",
    "reflection",
    "schrodinger_residual",
    "transmission",
    "wavefunction_psi",
    "wavenumbers",
]

_LOG2 = math.log(2.0)
_LOG3 = math.log(3.0)


@dataclass(frozen=True)
class WaveNumbers:
    k1: float  # x -> -inf side (V = V0 for sigma < 0)
    k2: float  # x -> +inf side (V = V0 + V1 for sigma < 0)
    kh: complex  # auxiliary, energy measured from V0 - V1/2; imaginary for deep negative steps


@dataclass(frozen=True)
class ScatteringAmplitudes:
    A: complex
    B: complex
    C: complex
    T: float
    R: float
    k: WaveNumbers

    def flux_residual(self) -> float:
        """Relative mismatch of k1(|A|^2 - |B|^2) = k2 |C|^2."""
        lhs = self.k.k1 * (abs(self.A) ** 2 - abs(self.B) ** 2)
        rhs = self.k.k2 * abs(self.C) ** 2
        return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def wavenumbers(cfg: PhysicalConfig, E: float) -> WaveNumbers:
    """Asymptotic wavenumbers; only the above-barrier regime ``E > V0 + V1`` is accepted."""
    if not E > cfg.V0 + cfg.V1 or not E > cfg.V0:
        raise RegimeError(f"E = {E} is not above both asymptotic levels {cfg.V0}, {cfg.V0 + cfg.V1}")
    kf = cfg.kfactor
    return WaveNumbers(
        k1=math.sqrt(kf * (E - cfg.V0)),
        k2=math.sqrt(kf * (E - cfg.V0 - cfg.V1)),
        kh=_sqrt_real_or_imag(kf * (E - cfg.V0 + cfg.V1 / 2.0)),
    )


def _sqrt_real_or_imag(v: float):
    return math.sqrt(v) if v >= 0 else complex(0.0, math.sqrt(-v))


def _log_sinh(u: float) -> float:
    """log sinh(u) for u > 0, safe for tiny and huge u; -inf at 0."""
    if u == 0:
        return -math.inf
    return u + math.log(-math.expm1(-2.0 * u)) - _LOG2


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    hi, lo = max(a, b), min(a, b)
    return hi + math.log1p(math.exp(lo - hi))


def _log_sinh_pair(s: float, c: float, kh) -> float:
    """log of sinh(s(c - 2kh)) sinh(s(c + 2kh)) = sinh^2(sc) - sinh^2(2 s kh).

    For imaginary ``kh`` this is ``sinh^2(sc) + sin^2(2 s |kh|)``, which has
    no cancellation.
    """
    if isinstance(kh, complex):
        sin_b = abs(math.sin(2.0 * s * kh.imag))
        log_sin2 = 2.0 * math.log(sin_b) if sin_b > 0 else -math.inf
        return _logaddexp(2.0 * _log_sinh(abs(s * c)), log_sin2)
    raise TypeError("real kh is handled by the callers' stable factorisations")


def log_transmission(cfg: PhysicalConfig, E: float) -> float:
    """Natural log of the closed-form transmission coefficient.

    Evaluated with ``|sigma|``: every sinh argument carries one factor of
    sigma, so numerator and denominator flip sign together. The small
    denominator factor uses ``3k1 + k2 - 2kh = 3 (k1 + k2)^2 / (3k1 + k2 + 2kh)``.
    """
    k = wavenumbers(cfg, E)
    s = abs(cfg.sigma) * math.pi
    num = _log_sinh(6.0 * s * k.k1) + _log_sinh(2.0 * s * k.k2)
    if isinstance(k.kh, complex):
        return num - _log_sinh_pair(s, 3.0 * k.k1 + k.k2, k.kh)
    big = 3.0 * k.k1 + k.k2 + 2.0 * k.kh
    small = 3.0 * (k.k1 + k.k2) ** 2 / big
    return num - _log_sinh(s * small) - _log_sinh(s * big)


def transmission(cfg: PhysicalConfig, E: float) -> float:
    """Transmission coefficient

    T = sinh(6 pi s k1) sinh(2 pi s k2) / (sinh(pi s (3k1 + k2 - 2kh)) sinh(pi s (3k1 + k2 + 2kh)))

    with ``s = |sigma|``, computed in log space so large ``s k`` cannot overflow.
    Near full transmission it is returned as ``1 - R`` with R from its own
    product form, which is accurate to the last bit there.
    """
    log_r = log_reflection(cfg, E)
    if log_r < -_LOG2:
        return -math.expm1(log_r)
    return min(1.0, math.exp(log_transmission(cfg, E)))


def log_reflection(cfg: PhysicalConfig, E: float) -> float:
    """Natural log of R; ``-inf`` for a flat potential.

    Uses ``den - num = sinh(pi s (3k1 - k2 + 2kh)) sinh(pi s (3k1 - k2 - 2kh))``
    so R keeps full relative precision even when it is far below 1e-16.
    The small factor is rewritten as ``3 v^2 / ((k1 + k2)^2 (3k1 - k2 + 2kh))``
    with ``v = (2m/hbar^2) V1`` to avoid cancellation.
    """
    k = wavenumbers(cfg, E)
    if cfg.V1 == 0:
        return -math.inf
    s = abs(cfg.sigma) * math.pi
    log_t = log_transmission(cfg, E)
    num_t = _log_sinh(6.0 * s * k.k1) + _log_sinh(2.0 * s * k.k2)
    log_den = num_t - log_t
    if isinstance(k.kh, complex):
        return _log_sinh_pair(s, 3.0 * k.k1 - k.k2, k.kh) - log_den
    v = cfg.kfactor * cfg.V1
    big = 3.0 * k.k1 - k.k2 + 2.0 * k.kh
    small = 3.0 * v * v / ((k.k1 + k.k2) ** 2 * big)
    return _log_sinh(s * big) + _log_sinh(s * small) - log_den


def reflection(cfg: PhysicalConfig, E: float) -> float:
    """Reflection coefficient R = 1 - T, evaluated from its own product form."""
    return min(1.0, math.exp(log_reflection(cfg, E)))


def abrupt_step_t(k1: float, k2: float) -> float:
    """Transmission over a sharp step: 4 k1 k2 / (k1 + k2)^2."""
    if k1 <= 0 or k2 < 0:
        raise ValueError("wavenumbers must be positive")
    return 4.0 * k1 * k2 / (k1 + k2) ** 2


def amplitudes(cfg: PhysicalConfig, E: float, c2: complex = 1.0) -> ScatteringAmplitudes:
    """Closed-form asymptotic amplitudes of the ``c1 = 0`` solution.

    ``psi ~ A e^{i k1 x} + B e^{-i k1 x}`` for x -> -inf and
    ``psi ~ C e^{i k2 x}`` for x -> +inf. The three share a common
    normalisation that differs from :func:`wavefunction_psi` with the same
    ``c2`` by a constant factor; every ratio (hence T and R) is unaffected.
    Requires ``sigma < 0`` and ``V1 != 0``. A shift ``x0`` enters only as
    the plane-wave phases ``e^{-i k x0}``.
    """
    if cfg.sigma >= 0:
        raise RegimeError("closed-form amplitudes are derived for sigma < 0 only")
    if cfg.V1 == 0:
        raise RegimeError("amplitude normalisation is singular for V1 = 0")
    k = wavenumbers(cfg, E)
    p = build_heun_parameters(cfg, E, Sign.PLUS, Sign.PLUS)
    a1, a2, s = p.alpha1, p.alpha2, cfg.sigma
    c2 = complex(c2)
    ik = 1j * k.k1 * s

    log_c = (2 * a2 * _LOG2 + (1 + a1 - 2 * a2) * _LOG3
             + math.log(cfg.m * s * s * abs(cfg.V1) / cfg.hbar**2))
    C = cmath.exp(log_c) * math.copysign(1.0, cfg.V1) / (a2 * (-a1 + 2 * a2)) * c2

    def _side(sgn: int) -> complex:
        t = sgn * ik
        log_mag = (2 * t * _LOG2 + (1 + a1 + a2 - 3 * t) * _LOG3
                   + loggamma(2 * a2) + loggamma(6 * t)
                   - loggamma(3 * t - a1 + a2) - loggamma(3 * t + a1 + a2))
        return -(a2 - t) / (a1 - 2 * a2) * cmath.exp(log_mag) * c2

    A = _side(+1) * cmath.exp(-1j * k.k1 * cfg.x0)
    B = _side(-1) * cmath.exp(1j * k.k1 * cfg.x0)
    C = C * cmath.exp(-1j * k.k2 * cfg.x0)
    T = transmission(cfg, E)
    return ScatteringAmplitudes(A=A, B=B, C=C, T=T, R=reflection(cfg, E), k=k)


def wavefunction_psi(x, cfg: PhysicalConfig, E: float, c1: complex = 0.0, c2: complex = 1.0,
                     params: HeunParameters = None):
    """General solution ``(z+2)^alpha1 (z-1)^alpha2 (c1 u1 + c2 u2)`` at ``x``.

    Accepts a scalar or an array of coordinates. ``params`` may be passed
    to reuse parameters built with non-default signs.
    """
    p = build_heun_parameters(cfg, E) if params is None else params
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    zs = np.atleast_1d(coordinate_z(xs, cfg))
    zm1s = np.atleast_1d(coordinate_z_minus_one(xs, cfg))
    out = np.empty(xs.shape, dtype=complex)
    c1, c2 = complex(c1), complex(c2)
    for i, (z, zm1) in enumerate(zip(zs.flat, zm1s.flat)):
        pref = cmath.exp(p.alpha1 * math.log(z + 2.0) + p.alpha2 * math.log(zm1))
        u = 0j
        if c1 != 0:
            u += c1 * fundamental_u1(p, z, zm1)
        if c2 != 0:
            u += c2 * fundamental_u2(p, z, zm1)
        out.flat[i] = pref * u
    return complex(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


def schrodinger_residual(cfg: PhysicalConfig, E: float, xs, h: float = 1e-4,
                         c1: complex = 0.0, c2: complex = 1.0):
    """Scaled residual of psi'' + (2m/hbar^2)(E - V) psi by a 5-point stencil.

    Returns (psi, residual / max|k^2 psi|) on ``xs``.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    stencil = np.array([-2, -1, 0, 1, 2])
    X = xs[:, None] + stencil[None, :] * h
    P = wavefunction_psi(X, cfg, E, c1, c2)
    d2 = (-P[:, 0] + 16 * P[:, 1] - 30 * P[:, 2] + 16 * P[:, 3] - P[:, 4]) / (12 * h * h)
    k2 = cfg.kfactor * (E - potential_v(xs, cfg))
    scale = np.max(np.abs(P[:, 2] * k2))
    return P[:, 2], np.abs(d2 + k2 * P[:, 2]) / scale
