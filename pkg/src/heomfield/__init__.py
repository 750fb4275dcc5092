"""Numerically exact dynamics of a driven two-level system in a composite
environment: a high-temperature bosonic bath plus Ornstein-Uhlenbeck
stochastic fields, solved through a hierarchy of auxiliary density matrices,
with a Markovian baseline, a Monte Carlo oracle and spectrum tools."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateSteadyStateError,
    HeomFieldError,
    HierarchyTooLargeError,
    NumericalError,
    NumericalInstabilityError,
    SpectrumNormalizationError,
    SteadyStateNotConvergedError,
)
from .heom import (
    AdmStack,
    BathParams,
    ChannelCoeffs,
    FieldChannel,
    HeomGenerator,
    HighTemperatureValidityWarning,
    OuProcess,
    bath_channel_coeffs,
    enumerate_indices,
    field_channel_coeffs,
)
from .lindblad import (
    MarkovParams,
    Picture,
    bath_rates,
    correlation_integral,
    lamb_shift,
    markovian_evolve,
    markovian_rhs,
    markovian_steady_state,
    spectral_density,
)
from .montecarlo import (
    McTrajectory,
    OuPath,
    dephasing_envelope,
    mc_evolve,
    sample_ou_path,
)
from .operators import (
    CouplingMode,
    TlsBasis,
    commutator_super,
    coupling_ops,
    excited_state,
    ground_state,
    left_super,
    maximally_mixed_state,
    plus_state,
    right_super,
    tls_basis,
    unvec,
    vec,
)
from .propagate import (
    SimConfig,
    SteadyMethod,
    StochasticField,
    SweepPoint,
    SweepReduce,
    Trajectory,
    build_generator,
    evolve,
    set_config_value,
    steady_state,
    sweep,
)
from .spectrum import (
    CorrelationSeries,
    EmissionSpectrum,
    SpectrumConfig,
    compute_spectrum,
    emission_spectrum,
    two_time_correlation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
