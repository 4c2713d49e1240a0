"""Complex special functions: gamma, Gauss 2F1 and Clausen 3F2.

Everything here works on Python ``complex`` scalars in double precision.
The hypergeometric function is continued to the whole cut plane by the
standard linear fractional transformations; on the cut ``[1, inf)`` the
side is chosen explicitly through :class:`BranchedArgument`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import NonConvergence, ParameterDegeneracy, PoleError

__all__ = [
    "BranchedArgument",
    "ROUTES",
    "clausen_3f2",
    "gamma",
    "gauss_2f1",
    "loggamma",
    "rgamma",
    "select_route",
]

Number = Union[int, float, complex]

# Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficients).
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEF = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)

POLE_TOL = 1e-12
PARAM_INT_TOL = 1e-8
C_POLE_TOL = 1e-10
SERIES_RTOL = 1e-16
SERIES_HITS = 3
SERIES_CAP = 20000
NUDGE = 1e-9 * (1 + 1j)
# A non-degenerate route is preferred over a degenerate one as long as its
# transformed argument stays below this modulus.
_ROUTE_FALLBACK_MAX = 0.9
# Cancellation factor above which the other usable routes are also tried.
_CANCEL_RETRY = 1e3


def _near_nonpositive_int(z: complex, tol: float) -> bool:
    if abs(z.imag) > tol or z.real > 0.5:
        return False
    return abs(z.real - round(z.real)) <= tol


def _near_int(z: complex, tol: float) -> bool:
    return abs(z.imag) <= tol and abs(z.real - round(z.real)) <= tol


def _sin_pi(z: complex) -> complex:
    # reduce the real part first so sin(pi z) keeps relative accuracy near integers
    n = round(z.real)
    s = cmath.sin(math.pi * complex(z.real - n, z.imag))
    return -s if n % 2 else s


def _log_sin_pi(z: complex) -> complex:
    """log sin(pi z) modulo 2 pi i, without overflow for large |Im z|."""
    y = z.imag
    if abs(y) < 20.0:
        return cmath.log(_sin_pi(z))
    n = round(z.real)
    r = complex(z.real - n, y)
    shift = 1j * math.pi * n
    if y > 0:
        # sin(pi r) = exp(-i pi r) (exp(2 i pi r) - 1) / (2i)
        out = -1j * math.pi * r + cmath.log((cmath.exp(2j * math.pi * r) - 1) / 2j)
    else:
        out = 1j * math.pi * r + cmath.log((1 - cmath.exp(-2j * math.pi * r)) / 2j)
    return out + shift


def loggamma(z: Number) -> complex:
    """Logarithm of the gamma function (branch irrelevant; only ``exp`` is meaningful).

    Raises :class:`PoleError` at non-positive integers.
    """
    z = complex(z)
    if _near_nonpositive_int(z, POLE_TOL):
        raise PoleError(f"gamma has a pole at {z}")
    if z.real < 0.5:
        return _LOG_PI - _log_sin_pi(z) - loggamma(1 - z)
    zz = z - 1
    t = zz + _LANCZOS_G + 0.5
    acc = complex(_LANCZOS_COEF[0])
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (zz + k)
    return _HALF_LOG_2PI + (zz + 0.5) * cmath.log(t) - t + cmath.log(acc)


def gamma(z: Number) -> complex:
    """Euler gamma function for complex argument.

    Relative error is about 1e-14 for ``|z| <= 50``; the reflection formula
    handles ``Re z < 1/2``.

    >>> abs(gamma(5) - 24) < 1e-12
    True
    """
    z = complex(z)
    if z.imag == 0.0 and z.real > 0 and z.real == int(z.real) and z.real < 30:
        return complex(math.factorial(int(z.real) - 1))
    return cmath.exp(loggamma(z))


def rgamma(z: Number) -> complex:
    """Reciprocal gamma, entire: returns 0 at the poles of gamma."""
    z = complex(z)
    if _near_nonpositive_int(z, POLE_TOL):
        return 0j
    return cmath.exp(-loggamma(z))


def _gamma_ratio(num: Sequence[complex], den: Sequence[complex]) -> complex:
    """prod Gamma(num) / prod Gamma(den), zero if any denominator sits on a pole."""
    for d in den:
        if _near_nonpositive_int(complex(d), POLE_TOL):
            return 0j
    log_val = sum(loggamma(n) for n in num) - sum(loggamma(d) for d in den)
    return cmath.exp(log_val)


@dataclass(frozen=True)
class BranchedArgument:
    """Argument of 2F1 with the side of the cut ``[1, inf)`` made explicit.

    ``complement`` optionally carries ``1 - value`` computed without
    cancellation by the caller; it is used in place of ``1 - value``.
    """

    value: complex
    cut_side: str = "above"
    complement: Optional[complex] = None

    def __post_init__(self):
        if self.cut_side not in ("above", "below"):
            raise ValueError(f"cut_side must be 'above' or 'below', got {self.cut_side!r}")

    @property
    def on_cut(self) -> bool:
        v = complex(self.value)
        return v.imag == 0.0 and v.real >= 1.0

    @property
    def one_minus(self) -> complex:
        if self.complement is not None:
            return complex(self.complement)
        return 1 - complex(self.value)


def _as_branched(y, cut_side: str) -> BranchedArgument:
    if isinstance(y, BranchedArgument):
        return y
    return BranchedArgument(complex(y), cut_side)


def _clog(w: complex, tilt: int) -> complex:
    """Principal log, except on the negative axis where ``tilt`` picks the side."""
    out = cmath.log(w)
    if w.imag == 0.0 and w.real < 0.0 and tilt:
        out = complex(out.real, math.copysign(math.pi, tilt))
    return out


def _pfq_series_mag(num: Sequence[complex], den: Sequence[complex], w: complex) -> tuple:
    """Series sum at ``w`` together with the sum of the moduli of its terms."""
    if w == 0:
        return 1 + 0j, 1.0
    total = 1 + 0j
    term = 1 + 0j
    mag = 1.0
    hits = 0
    for n in range(SERIES_CAP):
        fac = w / (n + 1)
        for a in num:
            fac *= a + n
        for b in den:
            fac /= b + n
        term *= fac
        if term == 0:
            return total, mag
        total += term
        mag += abs(term)
        if abs(term) <= SERIES_RTOL * abs(total):
            hits += 1
            if hits >= SERIES_HITS:
                return total, mag
        else:
            hits = 0
    raise NonConvergence(f"series at |w|={abs(w):.3g} did not converge in {SERIES_CAP} terms")


def _pfq_series(num: Sequence[complex], den: Sequence[complex], w: complex) -> complex:
    """Sum of the generalized hypergeometric power series at ``w``."""
    return _pfq_series_mag(num, den, w)[0]


ROUTES = (
    "direct",  # w = y
    "pfaff",  # w = y/(y-1)
    "one_minus",  # w = 1-y
    "inverse",  # w = 1/y
    "inverse_one_minus",  # w = 1/(1-y)
    "one_minus_inverse",  # w = 1-1/y
)
_NEEDS_CAB = ("one_minus", "one_minus_inverse")
_NEEDS_AMB = ("inverse", "inverse_one_minus")


def _route_arguments(arg: BranchedArgument) -> dict:
    y = complex(arg.value)
    omy = arg.one_minus
    out = {
        "direct": y,
        "one_minus": omy,
        "inverse": 1 / y,
        "inverse_one_minus": 1 / omy if omy != 0 else complex(math.inf),
        "one_minus_inverse": -omy / y,
    }
    if not arg.on_cut:
        out["pfaff"] = -y / omy if omy != 0 else complex(math.inf)
    else:
        # w stays on the cut for these two
        del out["direct"]
    return out


def select_route(a: Number, b: Number, c: Number, y, cut_side: str = "above") -> tuple:
    """Return ``(route, w, nudge)`` used by :func:`gauss_2f1` for these inputs."""
    a, b, c = complex(a), complex(b), complex(c)
    arg = _as_branched(y, cut_side)
    cands = _route_arguments(arg)
    if "direct" in cands and abs(cands["direct"]) <= 0.5:
        return "direct", cands["direct"], False
    cab_bad = _near_int(c - a - b, PARAM_INT_TOL)
    amb_bad = _near_int(a - b, PARAM_INT_TOL)

    def degenerate(route):
        return (route in _NEEDS_CAB and cab_bad) or (route in _NEEDS_AMB and amb_bad)

    ranked = sorted(cands.items(), key=lambda kv: (abs(kv[1]), ROUTES.index(kv[0])))
    best_route, best_w = ranked[0]
    if not degenerate(best_route):
        return best_route, best_w, False
    for route, w in ranked:
        if not degenerate(route) and abs(w) <= _ROUTE_FALLBACK_MAX:
            return route, w, False
    return best_route, best_w, True


def _usable_routes(a: complex, b: complex, c: complex, arg: BranchedArgument) -> list:
    """Non-degenerate routes with ``|w| <= 0.9``, closest transformation first."""
    cab_bad = _near_int(c - a - b, PARAM_INT_TOL)
    amb_bad = _near_int(a - b, PARAM_INT_TOL)
    ranked = sorted(_route_arguments(arg).items(), key=lambda kv: (abs(kv[1]), ROUTES.index(kv[0])))
    return [r for r, w in ranked if abs(w) <= _ROUTE_FALLBACK_MAX
            and not ((r in _NEEDS_CAB and cab_bad) or (r in _NEEDS_AMB and amb_bad))]


def _route_terms(route: str, a: complex, b: complex, c: complex, arg: BranchedArgument) -> list:
    """Terms ``(prefactor, num, den, w)`` whose series sum to 2F1 along ``route``."""
    y = complex(arg.value)
    omy = arg.one_minus
    # side of the negative axis on which 1-y and -y sit when y is on the cut
    tilt = (-1 if arg.cut_side == "above" else 1) if arg.on_cut else 0
    if route == "direct":
        return [(1.0, (a, b), (c,), y)]
    if route == "pfaff":
        # both Pfaff forms are exact; the one with the smaller numerator
        # parameters has smaller intermediate terms and less cancellation
        if abs(b) * abs(c - a) < abs(a) * abs(c - b):
            a, b = b, a
        return [(cmath.exp(-a * _clog(omy, tilt)), (a, c - b), (c,), -y / omy)]
    terms = []
    if route == "one_minus":
        g1 = _gamma_ratio((c, c - a - b), (c - a, c - b))
        g2 = _gamma_ratio((c, a + b - c), (a, b))
        terms.append((g1, (a, b), (a + b - c + 1,), omy))
        if g2 != 0:
            terms.append((g2 * cmath.exp((c - a - b) * _clog(omy, tilt)), (c - a, c - b), (c - a - b + 1,), omy))
    elif route == "one_minus_inverse":
        w = -omy / y
        log_y = _clog(y, 0)
        g1 = _gamma_ratio((c, c - a - b), (c - a, c - b))
        g2 = _gamma_ratio((c, a + b - c), (a, b))
        if g1 != 0:
            terms.append((g1 * cmath.exp(-a * log_y), (a, a - c + 1), (a + b - c + 1,), w))
        if g2 != 0:
            pref = cmath.exp((c - a - b) * _clog(omy, tilt) + (a - c) * log_y)
            terms.append((g2 * pref, (c - a, 1 - a), (c - a - b + 1,), w))
    elif route in ("inverse", "inverse_one_minus"):
        g1 = _gamma_ratio((c, b - a), (b, c - a))
        g2 = _gamma_ratio((c, a - b), (a, c - b))
        if route == "inverse":
            w, log_s = 1 / y, _clog(-y, tilt)
            num1, num2 = (a, a - c + 1), (b, b - c + 1)
        else:
            w, log_s = 1 / omy, _clog(omy, tilt)
            num1, num2 = (a, c - b), (b, c - a)
        if g1 != 0:
            terms.append((g1 * cmath.exp(-a * log_s), num1, (a - b + 1,), w))
        if g2 != 0:
            terms.append((g2 * cmath.exp(-b * log_s), num2, (b - a + 1,), w))
    else:
        raise ValueError(f"unknown route {route!r}")
    return terms


def _evaluate_route(route: str, a: complex, b: complex, c: complex, arg: BranchedArgument) -> tuple:
    """Value along ``route`` and its cancellation factor (sum of |terms| over |value|)."""
    value = 0j
    mag = 0.0
    for pref, num, den, w in _route_terms(route, a, b, c, arg):
        f, m = _pfq_series_mag(num, den, w)
        value += pref * f
        mag += abs(pref) * m
    cond = mag / abs(value) if value != 0 else math.inf
    return value, cond


def gauss_2f1(a: Number, b: Number, c: Number, y, cut_side: str = "above",
              route: Optional[str] = None, nudge: bool = True) -> complex:
    """Gauss hypergeometric function 2F1(a, b; c; y) for complex parameters.

    The automatic route is the transformation with the smallest argument.
    If its terms cancel by more than three digits, the other usable
    transformations are evaluated too and the best-conditioned one wins.

    Parameters
    ----------
    a, b, c : complex
        Parameters; ``c`` must not be a non-positive integer.
    y : complex or BranchedArgument
        Argument. Real values in ``[1, inf)`` are taken as the limit from
        ``cut_side`` (``"above"`` means ``y + i0``).
    route : str, optional
        Force one of :data:`ROUTES` instead of the automatic choice. Meant
        for consistency checks; the forced route must converge at ``y``.
    nudge : bool
        When every usable transformation is degenerate (``c-a-b`` or
        ``a-b`` within 1e-8 of an integer), shift ``b`` by ``1e-9 (1+i)``
        instead of raising :class:`ParameterDegeneracy`. The induced error
        is roughly ``1e-9 |dF/db|`` plus the cancellation between the two
        nearly singular terms (up to ~1e-7 relative).

    Returns
    -------
    complex
    """
    a, b, c = complex(a), complex(b), complex(c)
    if _near_nonpositive_int(c, C_POLE_TOL):
        raise ParameterDegeneracy(f"c = {c} is a non-positive integer")
    arg = _as_branched(y, cut_side)
    yv = complex(arg.value)
    if yv == 0:
        return 1 + 0j
    if arg.one_minus == 0:
        if (c - a - b).real <= 0:
            raise NonConvergence("2F1 diverges at y = 1 when Re(c-a-b) <= 0")
        return _gamma_ratio((c, c - a - b), (c - a, c - b))
    if route is not None:
        if route not in ROUTES:
            raise ValueError(f"unknown route {route!r}")
        return _evaluate_route(route, a, b, c, arg)[0]
    route, _, needs_nudge = select_route(a, b, c, arg)
    if needs_nudge:
        if not nudge:
            raise ParameterDegeneracy(
                f"c-a-b = {c - a - b} / a-b = {a - b} near integer for route {route}")
        return _evaluate_route(route, a, b + NUDGE, c, arg)[0]
    value, cond = _evaluate_route(route, a, b, c, arg)
    if cond > _CANCEL_RETRY:
        # large parameters can make the closest transformation cancel badly
        for other in _usable_routes(a, b, c, arg):
            if other == route:
                continue
            v, k = _evaluate_route(other, a, b, c, arg)
            if k < cond:
                value, cond = v, k
            if cond <= _CANCEL_RETRY:
                break
    return value


def clausen_3f2(a1: Number, a2: Number, a3: Number, b1: Number, b2: Number, y,
                cut_side: str = "above") -> complex:
    """Clausen's 3F2(a1, a2, a3; b1, b2; y).

    Inside the unit disk the power series is summed directly. Outside it
    only two reducible cases are handled: an upper parameter equal to a
    lower one (plain 2F1), and an upper parameter exceeding a lower one by
    exactly one, where

        3F2(a, b, e+1; e, d; y) = 2F1(a, b; d; y) + a b y / (e d) 2F1(a+1, b+1; d+1; y).

    Anything else raises :class:`NonConvergence`.
    """
    ups = [complex(v) for v in (a1, a2, a3)]
    lows = [complex(v) for v in (b1, b2)]
    for bv in lows:
        if _near_nonpositive_int(bv, C_POLE_TOL):
            raise ParameterDegeneracy(f"lower parameter {bv} is a non-positive integer")
    arg = _as_branched(y, cut_side)
    yv = complex(arg.value)
    if abs(yv) < 1:
        return _pfq_series(ups, lows, yv)
    for i, up in enumerate(ups):
        for j, lo in enumerate(lows):
            rest_up = [u for k, u in enumerate(ups) if k != i]
            other_lo = lows[1 - j]
            if abs(up - lo) <= 1e-14 * (1 + abs(lo)):
                return gauss_2f1(rest_up[0], rest_up[1], other_lo, arg)
            if abs(up - lo - 1) <= 1e-12 * (1 + abs(lo)):
                p, r = rest_up
                head = gauss_2f1(p, r, other_lo, arg)
                tail = gauss_2f1(p + 1, r + 1, other_lo + 1, arg)
                return head + p * r * yv / (lo * other_lo) * tail
    raise NonConvergence(f"3F2 series diverges at |y| = {abs(yv):.3g} and no reduction applies")
