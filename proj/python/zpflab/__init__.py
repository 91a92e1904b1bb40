"""Python interface to the zpflab C++ core."""

from ._core import (  # noqa: F401
    ConfigError,
    DivergenceError,
    DomainError,
    Error,
    OscillatorParams,
    Potential,
    ResolutionError,
    SpectrumConfig,
    bohr_check,
    chi,
    chi_time,
    commutator,
    continuum_correlation,
    ensemble_moments,
    evaluate_field,
    heisenberg_check,
    integrate,
    kk_scan,
    matrices,
    psd,
    q_factor,
    run_scenario,
    sample_zpf,
    solve_states,
    stationary_moments,
    transition_data,
    trk_converged,
    trk_sum,
)

__version__ = "0.1.0"
