"""Exact scattering off a smooth potential step via Heun-to-hypergeometric reduction."""

from .errors import (
    DecompositionUnstable,
    DegenerateCoefficient,
    DegenerateGamma,
    HeunStepError,
    NonConvergence,
    ParameterDegeneracy,
    PoleError,
    RegimeError,
    StepTooLarge,
)
from .geometry import (
    PhysicalConfig,
    TransformPoint,
    coordinate_z,
    coordinate_z_minus_one,
    cubic_residual,
    jacobian_rho,
    potential_v,
    solve_cubic_z,
    transform_point,
)
from .heun import (
    HeunParameters,
    SeriesExpansion,
    Sign,
    build_heun_parameters,
    canonical_map,
    expand_series,
    fundamental_u1,
    fundamental_u2,
    termination_residual,
)
from .oracle import OracleResult, solve_scattering
from .scattering import (
    ScatteringAmplitudes,
    WaveNumbers,
    abrupt_step_t,
    amplitudes,
    reflection,
    transmission,
    wavefunction_psi,
    wavenumbers,
)
from .special import clausen_3f2, gamma, gauss_2f1, loggamma, rgamma

__version__ = "0.1.0"
