import cmath
import math
import random
from dataclasses import replace

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heunstep.errors import DegenerateGamma
from heunstep.geometry import PhysicalConfig
from heunstep.heun import (
    HeunParameters,
    Sign,
    a17_coefficient,
    build_heun_parameters,
    canonical_map,
    canonical_termination_residual,
    expand_series,
    fundamental_u1,
    fundamental_u2,
    heun_operator,
    inverse_canonical_map,
    recurrence_coefficients,
    termination_residual,
    u1_clausen,
    u1_from_series,
    u2_clausen,
)
from heunstep.verify import random_canonical, random_physical



@pytest.fixture(autouse=True)
def _mp_precision():
    with mpmath.workdps(30):
        yield


def test_hand_substituted_parameters():
    p = build_heun_parameters(PhysicalConfig(), 2.0)
    r5, r2 = math.sqrt(5), math.sqrt(2)
    assert abs(p.alpha1 - (-2j * r5)) < 1e-14
    assert abs(p.alpha2 - (-1j * r2)) < 1e-14
    assert abs(p.gamma_ - (1 - 4j * r5)) < 1e-14
    assert abs(p.delta - (1 - 2j * r2)) < 1e-14
    assert p.epsilon == -1
    assert abs(p.alpha_beta - (14 - 4 * math.sqrt(10))) < 1e-13
    assert abs(p.q - (2 * r5 - 2 * r2) * 1j) < 1e-14


def test_roots_are_the_closed_form_exponent_combinations():
    # alpha, beta = i sigma (2 kh + k2 +- 3 k1)
    cfg = PhysicalConfig(V0=0.2, V1=0.7, sigma=-0.6, m=1.3, hbar=0.9)
    E = 2.4
    p = build_heun_parameters(cfg, E)
    k = [math.sqrt(cfg.kfactor * d) for d in (E - cfg.V0, E - cfg.V0 - cfg.V1, E - cfg.V0 + cfg.V1 / 2)]
    expect = sorted([1j * cfg.sigma * (2 * k[2] + k[1] + sgn * 3 * k[0]) for sgn in (1, -1)],
                    key=lambda v: (v.real, v.imag))
    assert abs(p.alpha - expect[0]) < 1e-13 and abs(p.beta - expect[1]) < 1e-13


@pytest.mark.parametrize("s1,s2", [(1, 1), (1, -1), (-1, 1), (-1, -1)])
def test_sign_choices_keep_fuchs_and_termination(s1, s2):
    p = build_heun_parameters(PhysicalConfig(sigma=-0.4), 3.0, s1, s2)
    assert p.sign1 is Sign.coerce(s1) and p.sign2 is Sign.coerce(s2)
    assert abs(p.fuchs_residual()) < 1e-12
    assert abs(termination_residual(p)) < 1e-10 * (1 + abs(p.alpha_beta))


def test_below_threshold_energies_are_accepted():
    p = build_heun_parameters(PhysicalConfig(), 0.3)
    assert abs(p.fuchs_residual()) < 1e-12
    assert abs(p.alpha2.imag) < 1e-15  # evanescent side: alpha2 is real


physical = st.builds(
    lambda V0, V1, s, m, hb, dE: (PhysicalConfig(V0=V0, V1=V1, sigma=s, m=m, hbar=hb),
                                  max(V0, V0 + V1) + dE),
    st.floats(-2, 2), st.floats(0.1, 3) | st.floats(-3, -0.1), st.floats(-3, -0.05),
    st.floats(0.5, 2), st.floats(0.5, 2), st.floats(1e-3, 6),
)


@settings(max_examples=300, deadline=None)
@given(physical)
def test_fuchs_and_termination_property(case):
    cfg, E = case
    p = build_heun_parameters(cfg, E)
    assert abs(p.fuchs_residual()) <= 1e-12 * (1 + abs(p.gamma_) + abs(p.delta))
    assert abs(termination_residual(p)) <= 1e-10 * (1 + abs(p.alpha_beta))
    # the termination relation is equivalent to ab = -q^2 / 2 for these parameters
    assert abs(p.alpha_beta + p.q ** 2 / 2) <= 1e-10 * (1 + abs(p.alpha_beta))


@settings(max_examples=100, deadline=None)
@given(physical)
def test_canonical_map_roundtrip_and_quadratic(case):
    cfg, E = case
    p = build_heun_parameters(cfg, E)
    c = canonical_map(p)
    assert c.a == 2 / 3
    back = inverse_canonical_map(c)
    assert abs(back.q - p.q) <= 1e-12 * (1 + abs(p.q) + abs(p.alpha_beta))
    scale = 1 + abs(c.q0) ** 2 + abs(p.alpha_beta) ** 2
    assert abs(canonical_termination_residual(c)) <= 1e-12 * scale


def test_canonical_map_rejects_wrong_form():
    p = build_heun_parameters(PhysicalConfig(), 2.0)
    with pytest.raises(ValueError):
        inverse_canonical_map(p)
    with pytest.raises(ValueError):
        canonical_map(canonical_map(p))


def test_first_coefficient_matches_closed_form():
    for E in (1.3, 2.0, 5.0):
        p = build_heun_parameters(PhysicalConfig(sigma=-0.7), E)
        s = expand_series(canonical_map(p))
        R1, _, _ = recurrence_coefficients(1, canonical_map(p))
        _, Q0, _ = recurrence_coefficients(0, canonical_map(p))
        assert abs(s.coefficients[1] + Q0 / R1) < 1e-14 * abs(Q0 / R1)
        assert abs(s.coefficients[1] - a17_coefficient(p)) < 1e-11 * abs(s.coefficients[1])
        # the same number is the u1 combination coefficient (gamma-1)/(q - 2(delta-1))
        assert abs(s.coefficients[1] - (p.gamma_ - 1) / (p.q - 2 * (p.delta - 1))) < 1e-11 * abs(
            s.coefficients[1])


def test_physical_series_terminates_after_two_terms():
    p = build_heun_parameters(PhysicalConfig(sigma=-0.25), 1.5)
    s = expand_series(canonical_map(p))
    assert s.terminated_at == 1
    assert max(abs(c) for c in s.coefficients[2:]) <= 1e-10 * s.max_abs()


def test_series_without_termination_is_flagged():
    p = random_canonical(random.Random(3))
    s = expand_series(replace(p, q0=p.q0 + 0.1))
    assert s.terminated_at is None
    with pytest.raises(Exception):
        u1_from_series(s, 0.3)


def test_integer_gamma_raises():
    p = HeunParameters.canonical(0.3, 0.7, 2.0, 0.0, -1, 2 / 3, 0.1)
    with pytest.raises(DegenerateGamma):
        expand_series(p)


def test_n_max_validation():
    p = random_canonical(random.Random(1))
    with pytest.raises(ValueError):
        expand_series(p, n_max=2)


def _mp_canonical_heun_residual(p, coeffs, y):
    """Canonical Heun operator applied to sum c_n 2F1(al, be; ga - n; y), all in mpmath."""
    al, be, ga, de, ep, a, q0 = (mpmath.mpc(v) for v in (p.alpha, p.beta, p.gamma_, p.delta,
                                                          p.epsilon, p.a, p.q0))
    cs = [mpmath.mpc(c) for c in coeffs]
    u = lambda t: sum(c * mpmath.hyp2f1(al, be, ga - n, t) for n, c in enumerate(cs))
    y = mpmath.mpc(y)
    u0, u1, u2 = mpmath.diff(u, y, 0), mpmath.diff(u, y, 1), mpmath.diff(u, y, 2)
    res = (u2 + (ga / y + de / (y - 1) + ep / (y - a)) * u1
           + (al * be * y - q0) / (y * (y - 1) * (y - a)) * u0)
    scale = abs(u2) + abs((ga / y + de / (y - 1) + ep / (y - a)) * u1) + abs(
        (al * be * y - q0) / (y * (y - 1) * (y - a)) * u0)
    return float(abs(res) / scale)


@pytest.mark.parametrize("seed", range(5))
def test_terminated_series_solves_canonical_heun(seed):
    p = random_canonical(random.Random(seed), root=seed % 2)
    s = expand_series(p, n_max=6)
    assert s.terminated_at is not None and s.terminated_at <= 1
    coeffs = s.coefficients[: s.terminated_at + 1]
    for y in (0.21 + 0.1j, -0.35, 0.4 - 0.3j):
        assert _mp_canonical_heun_residual(p, coeffs, y) < 1e-12


def _heun_fd_residual(p, u, z, h=1e-3):
    vals = [u(z + k * h) for k in (-2, -1, 0, 1, 2)]
    d1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * h)
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h * h)
    P = abs(p.gamma_ / (z + 2) + p.delta / (z - 1) + p.epsilon / z)
    Q = abs((p.alpha_beta * z - p.q) / ((z + 2) * (z - 1) * z))
    scale = abs(vals[2]) * max(P * P, Q, 1.0)
    return abs(heun_operator(p, z, vals[2], d1, d2)) / scale


def test_fundamental_solutions_satisfy_heun_equation():
    rng = random.Random(7)
    worst = 0.0
    for _ in range(10):
        cfg, E = random_physical(rng, sigma_range=(-1.0, -0.1))
        cfg = replace(cfg, m=1.0, hbar=1.0)
        p = build_heun_parameters(cfg, E)
        for z in np.linspace(1.2, 3.0, 7):
            worst = max(worst, _heun_fd_residual(p, lambda t: fundamental_u1(p, t), z),
                        _heun_fd_residual(p, lambda t: fundamental_u2(p, t), z))
    assert worst < 1e-7


def test_u1_matches_mpmath_on_the_cut():
    p = build_heun_parameters(PhysicalConfig(sigma=-0.5), 2.5)
    coef = (p.gamma_ - 1) / (p.q - 2 * (p.delta - 1))
    for z in (1.01, 1.7, 2.9, 12.0):
        y = mpmath.mpc((z + 2) / 3, 1e-25)
        ref = mpmath.hyp2f1(p.alpha, p.beta, p.gamma_, y) + coef * mpmath.hyp2f1(
            p.alpha, p.beta, p.gamma_ - 1, y)
        assert abs(fundamental_u1(p, z) - complex(ref)) < 1e-10 * abs(complex(ref))


def test_u2_value_at_singular_point():
    p = build_heun_parameters(PhysicalConfig(sigma=-0.5), 2.5)
    expect = p.alpha_beta / (p.alpha_beta - p.q * (1 - p.delta))
    assert abs(fundamental_u2(p, 1.0) - expect) < 1e-14 * abs(expect)
    assert abs(u2_clausen(p, 1.0) - 1) < 1e-15


def test_three_function_forms_carry_the_combination_normalisation():
    p = build_heun_parameters(PhysicalConfig(sigma=-0.8, V1=0.6), 1.9)
    n1 = 1 + (p.gamma_ - 1) / (p.q - 2 * (p.delta - 1))
    n2 = p.alpha_beta / (p.alpha_beta - p.q * (1 - p.delta))
    for z in (1.1, 2.0, 2.8):
        u1 = fundamental_u1(p, z)
        assert abs(u1 - n1 * u1_clausen(p, z)) < 1e-10 * abs(u1)
        assert abs(u1 - u1_from_series(expand_series(canonical_map(p)), (z + 2) / 3)) < 1e-10 * abs(u1)
        u2 = fundamental_u2(p, z)
        assert abs(u2 - n2 * u2_clausen(p, z)) < 1e-10 * abs(u2)


def test_z_below_one_rejected():
    p = build_heun_parameters(PhysicalConfig(), 2.0)
    with pytest.raises(ValueError):
        fundamental_u1(p, 0.5)
    with pytest.raises(ValueError):
        fundamental_u2(p, 0.99)
