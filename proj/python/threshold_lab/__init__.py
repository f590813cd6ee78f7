"""Threshold behaviour of three-body bound states near a two-body resonance."""

from ._core import (
    AdmissibilityError,
    ConfigError,
    ConvergenceError,
    PairPotential,
    PotentialFamily,
    SystemSpec,
    WaveFunction,
    admissibility,
    critical_coupling,
    d_theta_n,
    ground_state,
    oscillator_ground_state,
    pde_check,
    radial_integral,
    run_suite,
    t_integral,
    theta_n,
    theta_norm,
    threshold_sequence,
    twobody_sequence,
    universal_limit,
    w_kernel,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
