"""Heun-equation reduction of the step potential and its finite 2F1 solutions.

With ``psi = (z+2)^alpha1 (z-1)^alpha2 u(z)`` the Schrodinger equation
becomes the general Heun equation with singularities at ``z = -2, 1, 0``::

    u'' + (gamma/(z+2) + delta/(z-1) + eps/z) u' + (ab z - q) u / ((z+2)(z-1)z) = 0

with ``eps = -1``. Because the exponent ``1 - eps = 2`` at ``z = 0`` is a
positive integer and ``q`` satisfies the quadratic termination condition,
the expansion in ``2F1(alpha, beta; gamma - n; y)`` stops after two terms.

Two parametrisations share :class:`HeunParameters`:

* ``form="physical"``: singularities ``(-2, 1, 0)``, accessory ``q``.
* ``form="canonical"``: ``y = (z+2)/3``, singularities ``(0, 1, a)`` with
  ``a = 2/3`` and accessory ``q0 = (q + 2 ab)/3``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Tuple

from .errors import DegenerateCoefficient, DegenerateGamma, NonConvergence
from .geometry import PhysicalConfig
from .special import BranchedArgument, clausen_3f2, gauss_2f1

__all__ = [
    "HeunParameters",
    "SeriesExpansion",
    "Sign",
    "a17_coefficient",
    "build_heun_parameters",
    "canonical_map",
    "canonical_termination_residual",
    "expand_series",
    "fundamental_u1",
    "fundamental_u2",
    "heun_operator",
    "inverse_canonical_map",
    "recurrence_coefficients",
    "termination_residual",
    "u1_clausen",
    "u1_from_series",
    "u2_clausen",
]

CANONICAL_A = 2.0 / 3.0
DENOM_TOL = 1e-12
GAMMA_INT_TOL = 1e-10
TERMINATION_RTOL = 1e-10


class Sign(Enum):
    PLUS = 1
    MINUS = -1

    @classmethod
    def coerce(cls, value) -> "Sign":
        if isinstance(value, cls):
            return value
        if value in ("+", "plus", 1):
            return cls.PLUS
        if value in ("-", "minus", -1):
            return cls.MINUS
        raise ValueError(f"cannot interpret {value!r} as a sign")


@dataclass(frozen=True)
class HeunParameters:
    """Parameters of the Heun equation together with the pre-factor exponents.

    ``alpha_beta`` is stored separately from ``alpha * beta`` so that the
    quantity entering the equation is exactly the one built from the
    physics, independent of how the individual roots were split.
    """

    alpha: complex
    beta: complex
    gamma_: complex
    delta: complex
    epsilon: complex
    q: complex
    alpha_beta: complex
    alpha1: complex = 0j
    alpha2: complex = 0j
    sign1: Sign = Sign.PLUS
    sign2: Sign = Sign.PLUS
    form: str = "physical"
    a: Optional[float] = None
    q0: Optional[complex] = None

    @classmethod
    def canonical(cls, alpha, beta, gamma_, delta, epsilon, a, q0) -> "HeunParameters":
        """Canonical-form parameters not derived from a physical configuration."""
        alpha, beta = complex(alpha), complex(beta)
        return cls(alpha=alpha, beta=beta, gamma_=complex(gamma_), delta=complex(delta),
                   epsilon=complex(epsilon), q=complex("nan"), alpha_beta=alpha * beta,
                   form="canonical", a=float(a), q0=complex(q0))

    def fuchs_residual(self) -> complex:
        return 1 + self.alpha + self.beta - self.gamma_ - self.delta - self.epsilon


@dataclass
class SeriesExpansion:
    """Coefficients c_n of ``u = sum c_n 2F1(alpha, beta; gamma - n; y)``, gauge c_0 = 1."""

    coefficients: List[complex]
    terminated_at: Optional[int] = None
    params: Optional[HeunParameters] = field(default=None, repr=False)

    def max_abs(self) -> float:
        return max(abs(c) for c in self.coefficients)


def _split_product(total: complex, product: complex) -> Tuple[complex, complex]:
    """Roots of t^2 - total t + product, ordered by (real, imag)."""
    disc = cmath.sqrt(total * total - 4 * product)
    big = (total + disc) / 2 if abs(total + disc) >= abs(total - disc) else (total - disc) / 2
    small = product / big if big != 0 else total - big
    r1, r2 = sorted((big, small), key=lambda v: (v.real, v.imag))
    return r1, r2


def build_heun_parameters(cfg: PhysicalConfig, E: float, sign1=Sign.PLUS,
                          sign2=Sign.PLUS) -> HeunParameters:
    """Heun parameters for energy ``E``.

    ``sign1``/``sign2`` choose the branch of the pre-factor exponents
    ``alpha1 = +-2 i sigma k_h`` and ``alpha2 = +-i sigma k_2``. Complex
    square roots make the construction valid at any real energy.
    """
    s1, s2 = Sign.coerce(sign1), Sign.coerce(sign2)
    kf = cfg.kfactor
    sigma = cfg.sigma
    kh = cmath.sqrt(kf * (E - cfg.V0 + cfg.V1 / 2.0))
    k2 = cmath.sqrt(kf * (E - cfg.V0 - cfg.V1))
    alpha1 = s1.value * 2j * sigma * kh
    alpha2 = s2.value * 1j * sigma * k2
    gamma_ = 1 + 2 * alpha1
    delta = 1 + 2 * alpha2
    epsilon = -1 + 0j
    alpha_beta = (alpha1 + alpha2) ** 2 + 9.0 * kf * sigma**2 * (E - cfg.V0)
    q = -alpha1 + 2 * alpha2
    alpha, beta = _split_product(gamma_ + delta + epsilon - 1, alpha_beta)
    return HeunParameters(alpha=alpha, beta=beta, gamma_=gamma_, delta=delta,
                          epsilon=epsilon, q=q, alpha_beta=alpha_beta,
                          alpha1=alpha1, alpha2=alpha2, sign1=s1, sign2=s2)


def termination_residual(p: HeunParameters) -> complex:
    """q^2 + q (1 + gamma - 2 delta) - 2 ab; zero when the 2F1 expansion terminates."""
    q = p.q
    return q * q + q * (1 + p.gamma_ - 2 * p.delta) - 2 * p.alpha_beta


def canonical_map(p: HeunParameters) -> HeunParameters:
    """Rewrite in terms of ``y = (z+2)/3``: ``a = 2/3``, ``q0 = (q + 2 ab)/3``."""
    if p.form != "physical":
        raise ValueError("canonical_map expects physical-form parameters")
    q0 = (p.q + 2 * p.alpha_beta) / 3.0
    return replace(p, form="canonical", a=CANONICAL_A, q0=q0)


def inverse_canonical_map(p: HeunParameters) -> HeunParameters:
    if p.form != "canonical" or p.a != CANONICAL_A:
        raise ValueError("inverse_canonical_map expects canonical parameters with a = 2/3")
    q = 3.0 * p.q0 - 2 * p.alpha_beta
    return replace(p, form="physical", a=None, q0=None, q=q)


def canonical_termination_residual(p: HeunParameters) -> complex:
    """Quadratic in q0 whose roots terminate the canonical expansion at N = 1 (eps = -1)."""
    a, q0, ab = p.a, p.q0, p.alpha_beta
    s = p.alpha + p.beta
    return (q0 * q0 + q0 * (p.gamma_ - 1 - a * s - 2 * a * ab)
            + a * ab * (a * (1 + s) - p.gamma_ + a * ab))


def _check_gamma(gamma_: complex, n: int):
    if abs(gamma_.imag) <= GAMMA_INT_TOL:
        k = round(gamma_.real)
        if 0 <= k <= n and abs(gamma_.real - k) <= GAMMA_INT_TOL:
            raise DegenerateGamma(f"gamma = {gamma_} is the integer {k} <= n = {n}")


def recurrence_coefficients(n: int, p: HeunParameters) -> Tuple[complex, complex, complex]:
    """(R_n, Q_n, P_n) of ``R_n c_n + Q_{n-1} c_{n-1} + P_{n-2} c_{n-2} = 0``."""
    if p.form != "canonical":
        raise ValueError("recurrence needs canonical parameters")
    _check_gamma(complex(p.gamma_), n)
    a, g, al, be, eps = p.a, p.gamma_, p.alpha, p.beta, p.epsilon
    R = a * n * (al - g + n) * (be - g + n) / (g - n)
    P = (a - 1) * (eps + n) * (g - n - 1)
    Q = -P + a * n * (al + be - g + n) + a * p.alpha_beta - p.q0
    return R, Q, P


def expand_series(p: HeunParameters, n_max: int = 12) -> SeriesExpansion:
    """Run the three-term recurrence from ``c_0 = 1``.

    Index convention: the relation at index ``n`` links ``c_n`` (through
    ``R_n``), ``c_{n-1}`` (through ``Q_{n-1}``) and ``c_{n-2}`` (through
    ``P_{n-2}``), with ``c_{-1} = 0``. Hence ``c_1 = -Q_0 / R_1``.
    The expansion is marked terminated at the first ``N`` with
    ``|c_{N+1}|, |c_{N+2}| <= 1e-10 max|c|``.
    """
    if n_max < 3:
        raise ValueError("n_max must be at least 3")
    _check_gamma(complex(p.gamma_), n_max)
    coeffs = [1 + 0j]
    for n in range(1, n_max + 1):
        R, _, _ = recurrence_coefficients(n, p)
        _, Qm1, _ = recurrence_coefficients(n - 1, p)
        acc = Qm1 * coeffs[n - 1]
        if n >= 2:
            acc += recurrence_coefficients(n - 2, p)[2] * coeffs[n - 2]
        if R == 0:
            raise DegenerateCoefficient(f"R_{n} vanishes")
        coeffs.append(-acc / R)
    scale = max(abs(c) for c in coeffs)
    terminated = None
    for N in range(0, n_max - 1):
        if (abs(coeffs[N + 1]) <= TERMINATION_RTOL * scale
                and abs(coeffs[N + 2]) <= TERMINATION_RTOL * scale):
            terminated = N
            break
    return SeriesExpansion(coefficients=coeffs, terminated_at=terminated, params=p)


def u1_from_series(series: SeriesExpansion, y, cut_side: str = "above") -> complex:
    """Sum the terminated expansion ``sum_{n<=N} c_n 2F1(alpha, beta; gamma - n; y)``."""
    if series.terminated_at is None:
        raise NonConvergence("expansion does not terminate; general Heun evaluation is not provided")
    p = series.params
    return sum(c * gauss_2f1(p.alpha, p.beta, p.gamma_ - n, y, cut_side)
               for n, c in enumerate(series.coefficients[: series.terminated_at + 1]))


def a17_coefficient(p: HeunParameters) -> complex:
    """Closed-form c_1 for a = 2/3: (gamma-1)(q+gamma-1) / (2(1+alpha-gamma)(1+beta-gamma)).

    Here ``q`` is the accessory parameter of the physical form, not ``q0``;
    this is what the recurrence yields after substituting a = 2/3.
    """
    g = p.gamma_
    den = 2 * (1 + p.alpha - g) * (1 + p.beta - g)
    if abs(den) < DENOM_TOL:
        raise DegenerateCoefficient("(1+alpha-gamma)(1+beta-gamma) vanishes")
    return (g - 1) * (p.q + g - 1) / den


def _u1_coefficient(p: HeunParameters) -> complex:
    den = p.q - 2 * (p.delta - 1)
    if abs(den) < DENOM_TOL:
        raise DegenerateCoefficient(f"q - 2(delta-1) = {den} vanishes")
    return (p.gamma_ - 1) / den


def _u2_coefficient(p: HeunParameters) -> complex:
    den = p.alpha_beta - p.q * (1 - p.delta)
    if abs(den) < DENOM_TOL:
        raise DegenerateCoefficient(f"ab - q(1-delta) = {den} vanishes")
    return p.q * (1 - p.delta) / den


def _check_z(z: float):
    if not z >= 1.0:
        raise ValueError(f"z must be >= 1, got {z}")


def fundamental_u1(p: HeunParameters, z: float, zm1: Optional[float] = None,
                   cut_side: str = "above") -> complex:
    """First fundamental solution, built at the singularity z = -2.

    ``u1 = F(alpha, beta; gamma; y) + (gamma-1)/(q - 2(delta-1)) F(alpha, beta; gamma-1; y)``
    with ``y = (z+2)/3``, which lies on the 2F1 cut for z > 1. ``zm1``
    optionally supplies ``z - 1`` to full relative precision.
    """
    _check_z(z)
    zm1 = z - 1.0 if zm1 is None else zm1
    y = BranchedArgument((z + 2.0) / 3.0, cut_side, complement=-zm1 / 3.0)
    coef = _u1_coefficient(p)
    return (gauss_2f1(p.alpha, p.beta, p.gamma_, y)
            + coef * gauss_2f1(p.alpha, p.beta, p.gamma_ - 1, y))


def fundamental_u2(p: HeunParameters, z: float, zm1: Optional[float] = None) -> complex:
    """Second fundamental solution, built at the singularity z = 1.

    ``u2 = F(alpha, beta; delta; y) + q(1-delta)/(ab - q(1-delta)) F(alpha, beta; delta-1; y)``
    with ``y = (1-z)/3 <= 0``.
    """
    _check_z(z)
    zm1 = z - 1.0 if zm1 is None else zm1
    y = BranchedArgument(-zm1 / 3.0, complement=(z + 2.0) / 3.0)
    coef = _u2_coefficient(p)
    return (gauss_2f1(p.alpha, p.beta, p.delta, y)
            + coef * gauss_2f1(p.alpha, p.beta, p.delta - 1, y))


def u1_clausen(p: HeunParameters, z: float, cut_side: str = "above") -> complex:
    """u1 as 3F2(alpha, beta, 1 + 2ab/q; 2ab/q, gamma; (z+2)/3)."""
    e = 2 * p.alpha_beta / p.q
    return clausen_3f2(p.alpha, p.beta, 1 + e, e, p.gamma_, (z + 2.0) / 3.0, cut_side)


def u2_clausen(p: HeunParameters, z: float) -> complex:
    """u2 as 3F2(alpha, beta, 1 - ab/q; -ab/q, delta; (1-z)/3)."""
    e = -p.alpha_beta / p.q
    return clausen_3f2(p.alpha, p.beta, 1 + e, e, p.delta, (1.0 - z) / 3.0)


def heun_operator(p: HeunParameters, z: complex, u: complex, du: complex,
                  d2u: complex) -> complex:
    """Left-hand side of the physical-form Heun equation for given u, u', u''."""
    return (d2u + (p.gamma_ / (z + 2) + p.delta / (z - 1) + p.epsilon / z) * du
            + (p.alpha_beta * z - p.q) * u / ((z + 2) * (z - 1) * z))
