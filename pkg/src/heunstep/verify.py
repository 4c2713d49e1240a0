"""Self-check suite behind ``heunstep verify``.

Each check returns a :class:`CheckResult` with the measured residual and
the tolerance it was compared against. Sizes are smaller than in the test
suite so the command finishes in seconds.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, replace
from typing import Callable, Dict, List, Optional

import numpy as np

from .geometry import PhysicalConfig, coordinate_z, cubic_residual
from .heun import (
    HeunParameters,
    build_heun_parameters,
    expand_series,
    fundamental_u1,
    fundamental_u2,
    termination_residual,
    u1_clausen,
    u1_from_series,
    u2_clausen,
    canonical_map,
)
from .oracle import solve_scattering
from .scattering import (abrupt_step_t, amplitudes, schrodinger_residual, transmission,
                         wavenumbers)
from .special import gamma, gauss_2f1

__all__ = ["CheckResult", "DEFAULT_TOLERANCES", "run_checks"]

SIGMA_GRID = (-0.1, -0.25, -0.6, -1.0)
ENERGY_GRID = (1.1, 1.5, 2.0, 3.0, 5.0)

DEFAULT_TOLERANCES: Dict[str, float] = {
    "termination_identity": 1e-10,
    "series_termination": 1e-10,
    "solution_equivalence": 1e-8,
    "psi_ode_residual": 1e-6,
    "flux_identity": 1e-8,
    "oracle_transmission": 1e-4,
    "oracle_unitarity": 1e-6,
    "abrupt_step_limit": 1e-3,
    "transparency_limit": 1e-3,
    "smoothness_bound": 0.0,
    "geometry_checkpoints": 1e-12,
    "cubic_residual": 1e-10,
    "gamma_recurrence": 1e-12,
    "gauss_summation": 1e-10,
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""


def random_physical(rng: random.Random, sigma_range=(-3.0, -0.05)):
    """Random above-barrier configuration and energy."""
    cfg = PhysicalConfig(
        V0=rng.uniform(-2.0, 2.0),
        V1=rng.choice((-1, 1)) * rng.uniform(0.1, 3.0),
        sigma=rng.uniform(*sigma_range),
        x0=rng.uniform(-1.0, 1.0),
        m=rng.uniform(0.5, 2.0),
        hbar=rng.uniform(0.5, 2.0),
    )
    E = max(cfg.V0, cfg.V0 + cfg.V1) + rng.uniform(0.01, 5.0)
    return cfg, E


def random_canonical(rng: random.Random, root: int = 0) -> HeunParameters:
    """Random canonical parameters with eps = -1 and q0 a root of the termination quadratic."""
    def rc(scale):
        return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))

    alpha, beta, gamma_ = rc(3), rc(3), rc(3) + 0.5
    a = rng.uniform(-3.0, 3.0)
    if abs(a - 1.0) < 0.1:
        a += 0.5
    delta = 1 + alpha + beta - gamma_ + 1  # Fuchs with eps = -1
    ab = alpha * beta
    s = alpha + beta
    # q0^2 + b1 q0 + b0 = 0
    b1 = gamma_ - 1 - a * s - 2 * a * ab
    b0 = a * ab * (a * (1 + s) - gamma_ + a * ab)
    disc = np.sqrt(complex(b1 * b1 - 4 * b0))
    q0 = (-b1 + (disc if root == 0 else -disc)) / 2
    return HeunParameters.canonical(alpha, beta, gamma_, delta, -1, a, q0)


def _check(name, residual, tol, detail="", mode="le") -> CheckResult:
    ok = residual <= tol if mode == "le" else residual < tol
    if not math.isfinite(residual):
        ok = False
    return CheckResult(name, bool(ok), float(residual), float(tol), detail)


def _termination(tols, fault, rng):
    worst = 0.0
    for _ in range(200):
        cfg, E = random_physical(rng)
        p = build_heun_parameters(cfg, E)
        if fault == "q":
            p = replace(p, q=p.q + 1e-3)
        worst = max(worst, abs(termination_residual(p)) / (1 + abs(p.alpha_beta)))
    return _check("termination_identity", worst, tols["termination_identity"])


def _series(tols, fault, rng):
    worst = 0.0
    for i in range(50):
        p = random_canonical(rng, root=i % 2)
        if fault == "q":
            p = replace(p, q0=p.q0 + 1e-3)
        s = expand_series(p, n_max=6)
        c = s.coefficients
        worst = max(worst, max(abs(c[2]), abs(c[3])) / s.max_abs())
    return _check("series_termination", worst, tols["series_termination"])


def _equivalence(tols, fault, rng):
    worst = 0.0
    for _ in range(5):
        cfg, E = random_physical(rng, sigma_range=(-1.0, -0.1))
        p = build_heun_parameters(cfg, E)
        series = expand_series(canonical_map(p))
        norm1 = 1 + (p.gamma_ - 1) / (p.q - 2 * (p.delta - 1))
        norm2 = p.alpha_beta / (p.alpha_beta - p.q * (1 - p.delta))
        for z in np.linspace(1.05, 2.95, 8):
            u1 = fundamental_u1(p, z)
            u1s = u1_from_series(series, (z + 2) / 3)
            u1c = norm1 * u1_clausen(p, z)
            u2 = fundamental_u2(p, z)
            u2c = norm2 * u2_clausen(p, z)
            worst = max(worst, abs(u1 - u1s) / abs(u1), abs(u1 - u1c) / abs(u1),
                        abs(u2 - u2c) / abs(u2))
    return _check("solution_equivalence", worst, tols["solution_equivalence"])


def _psi_ode(tols, fault, rng):
    worst = 0.0
    for sigma in (-0.25, -1.0):
        for E in (1.5, 4.0):
            cfg = PhysicalConfig(sigma=sigma)
            xs = np.linspace(-10 * abs(sigma), 10 * abs(sigma), 41)
            _, r = schrodinger_residual(cfg, E, xs)
            worst = max(worst, float(r.max()))
    return _check("psi_ode_residual", worst, tols["psi_ode_residual"])


def _flux(tols, fault, rng):
    worst = 0.0
    for s in SIGMA_GRID:
        for E in ENERGY_GRID:
            worst = max(worst, amplitudes(PhysicalConfig(sigma=s), E).flux_residual())
    return _check("flux_identity", worst, tols["flux_identity"])


def _oracle(tols, fault, rng):
    dT = 0.0
    unit = 0.0
    for s in SIGMA_GRID:
        for E in ENERGY_GRID:
            cfg = PhysicalConfig(sigma=s)
            res = solve_scattering(cfg, E)
            dT = max(dT, abs(res.T - transmission(cfg, E)))
            unit = max(unit, abs(res.R + res.T - 1))
    return [_check("oracle_transmission", dT, tols["oracle_transmission"]),
            _check("oracle_unitarity", unit, tols["oracle_unitarity"])]


def _limits(tols, fault, rng):
    cfg = PhysicalConfig(sigma=-1e-4)
    abrupt = 12 * math.sqrt(2) - 16
    r1 = abs(transmission(cfg, 2.0) - abrupt)
    r2 = 1.0 - transmission(PhysicalConfig(sigma=-10.0), 2.0)
    margin = -math.inf
    for s in SIGMA_GRID:
        for E in ENERGY_GRID:
            cfg = PhysicalConfig(sigma=s)
            k = wavenumbers(cfg, E)
            margin = max(margin, abrupt_step_t(k.k1, k.k2) - transmission(cfg, E))
    return [_check("abrupt_step_limit", r1, tols["abrupt_step_limit"]),
            _check("transparency_limit", r2, tols["transparency_limit"], mode="lt"),
            _check("smoothness_bound", margin, tols["smoothness_bound"], mode="lt",
                   detail="max of T_abrupt - T; must be negative")]


def _geometry(tols, fault, rng):
    worst_cp = 0.0
    worst_cubic = 0.0
    for s in (-2.0, -1.0, -0.5, 0.7):
        cfg = PhysicalConfig(sigma=s, x0=0.3)
        worst_cp = max(worst_cp, abs(coordinate_z(cfg.x0 + s * math.log(4), cfg) - 2),
                       abs(coordinate_z(cfg.x0 + 3 * s * math.log(3), cfg) - 4) / 4)
        xs = cfg.x0 + np.linspace(-60, 60, 2001) * abs(s)
        worst_cubic = max(worst_cubic, float(np.max(cubic_residual(coordinate_z(xs, cfg), xs, cfg))))
    return [_check("geometry_checkpoints", worst_cp, tols["geometry_checkpoints"]),
            _check("cubic_residual", worst_cubic, tols["cubic_residual"])]


def _special(tols, fault, rng):
    worst = 0.0
    for _ in range(200):
        z = complex(rng.uniform(-20, 20), rng.uniform(-20, 20))
        if abs(z) > 19 or abs(z.imag) < 1e-3:
            continue
        worst = max(worst, abs(gamma(z + 1) - z * gamma(z)) / abs(gamma(z + 1)))
    gs = 0.0
    for _ in range(50):
        a = complex(rng.uniform(-1, 1), rng.uniform(-2, 2))
        b = complex(rng.uniform(-1, 1), rng.uniform(-2, 2))
        c = a + b + complex(rng.uniform(0.5, 3), rng.uniform(-2, 2))
        exact = gamma(c) * gamma(c - a - b) / (gamma(c - a) * gamma(c - b))
        gs = max(gs, abs(gauss_2f1(a, b, c, 1.0) - exact) / abs(exact))
    return [_check("gamma_recurrence", worst, tols["gamma_recurrence"]),
            _check("gauss_summation", gs, tols["gauss_summation"])]


_CHECKS: List[Callable] = [_termination, _series, _equivalence, _psi_ode, _flux,
                           _oracle, _limits, _geometry, _special]


def run_checks(tolerances: Optional[Dict[str, float]] = None, fault: Optional[str] = None,
               seed: int = 20240601) -> dict:
    """Run every check; returns ``{"passed": bool, "checks": [...]}``.

    ``fault="q"`` perturbs the accessory parameter by 1e-3 before the
    termination checks (negative control).
    """
    tols = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tols)
        if unknown:
            raise KeyError(f"unknown tolerance names: {sorted(unknown)}")
        tols.update(tolerances)
    rng = random.Random(seed)
    results: List[CheckResult] = []
    for fn in _CHECKS:
        out = fn(tols, fault, rng)
        results.extend(out if isinstance(out, list) else [out])
    return {"passed": all(r.passed for r in results), "checks": [asdict(r) for r in results]}
