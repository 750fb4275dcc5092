"""Two-time dipole correlations and the emission spectrum.

The correlation is computed directly in the hierarchy: propagate the full
stack to the anchor time (or to stationarity), lower every auxiliary matrix
from the left, then propagate the resulting non-hermitian stack over the
delay and read off the raising-operator expectation.  The spectrum is the
real part of the finite-time Fourier transform of that correlation,
normalized to its maximum over the requested frequency grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalInstabilityError, SpectrumNormalizationError
from .heom import AdmStack
from .operators import JMINUS
from .propagate import (
    INSTABILITY_GROWTH,
    SimConfig,
    SteadyMethod,
    _check_step,
    _has_dissipation,
    _rk4_step,
    build_generator,
    steady_state,
)

#: Above this many delay samples the correlation run is refused outright.
MAX_TAU_SAMPLES = 2_000_000


@dataclass(frozen=True, eq=False)
class SpectrumConfig:
    """Inputs of a correlation and spectrum run.

    ``t1`` anchors the first operator: None means the stationary state of
    the configured dynamics, a number means propagation from the configured
    initial state for that long.  ``substeps`` refines the integrator
    between delay samples when dtau alone would be too coarse.
    """

    sim: SimConfig
    tau_max: float
    dtau: float
    omega_grid: np.ndarray
    t1: float | None = None
    window_rate: float | None = None
    substeps: int = 1
    steady_method: SteadyMethod = SteadyMethod.PROPAGATE

    def __post_init__(self):
        if self.tau_max <= 0:
            raise ConfigError(f"tau_max must be > 0, got {self.tau_max}")
        if self.dtau <= 0:
            raise ConfigError(f"dtau must be > 0, got {self.dtau}")
        if self.tau_max / self.dtau > MAX_TAU_SAMPLES:
            raise ConfigError(
                f"tau grid would hold more than {MAX_TAU_SAMPLES} samples"
            )
        if self.substeps < 1:
            raise ConfigError(f"substeps must be >= 1, got {self.substeps}")
        if self.t1 is not None and self.t1 < 0:
            raise ConfigError(f"t1 must be >= 0, got {self.t1}")
        if self.window_rate is not None and self.window_rate < 0:
            raise ConfigError(f"window_rate must be >= 0, got {self.window_rate}")
        grid = np.asarray(self.omega_grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ConfigError("omega_grid must be a 1d array with at least 2 points")
        if not np.all(np.isfinite(grid)):
            raise ConfigError("omega_grid contains non-finite values")
        object.__setattr__(self, "omega_grid", grid)


#: Tolerance on the physical bound |C| <= 1 for the computed correlation.
BOUND_TOL = 1e-6


@dataclass
class CorrelationSeries:
    """Correlation of the lowering and raising dipole operators over delay."""

    taus: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        peak = float(np.max(np.abs(self.values))) if len(self.values) else 0.0
        if not np.isfinite(peak):
            raise NumericalInstabilityError("correlation contains non-finite values")
        if peak > 1.0 + BOUND_TOL:
            raise NumericalInstabilityError(
                f"correlation magnitude reached {peak:.6g}, above the physical "
                "bound; the hierarchy depth is likely too small"
            )


def _anchor_stack(cfg: SpectrumConfig) -> AdmStack:
    sim = cfg.sim
    if cfg.t1 is None:
        if not _has_dissipation(sim):
            raise ConfigError(
                "stationary anchoring needs a dissipative channel; "
                "pass an explicit t1 for free or pure-dephasing dynamics"
            )
        _, stack = steady_state(sim, cfg.steady_method, return_stack=True)
        return stack
    gen = build_generator(sim)
    stack = AdmStack.from_density_matrix(gen, sim.initial_state)
    if cfg.t1 == 0:
        return stack
    n_steps = max(1, int(round(cfg.t1 / sim.dt)))
    _check_step(sim, gen)
    y = stack.values.reshape(-1)
    matrix = gen.matrix
    for _ in range(n_steps):
        y = _rk4_step(matrix, y, sim.dt)
    return AdmStack(generator=gen, values=y.reshape((-1, 4)))


def two_time_correlation(cfg: SpectrumConfig) -> CorrelationSeries:
    """Correlation of the dipole at the anchor time and a delay later.

    For the bare system prepared excited this equals exp(-i omega0 tau);
    every environment effect shows up as decay and distortion of that
    oscillation.
    """
    stack = _anchor_stack(cfg)
    gen = stack.generator
    lowered = stack.apply_left(JMINUS)
    n_tau = int(round(cfg.tau_max / cfg.dtau))
    if n_tau < 1:
        raise ConfigError("tau_max must cover at least one dtau step")
    step = cfg.dtau / cfg.substeps
    _check_step(cfg.sim, gen, dt=step)
    matrix = gen.matrix
    y = lowered.values.reshape(-1)
    scale0 = max(1.0, float(np.max(np.abs(y))))
    values = np.empty(n_tau + 1, dtype=complex)
    # tr(J+ X) is the (ground, excited) entry, slot 1 of the vectorized block
    values[0] = np.conj(y[1])
    for j in range(1, n_tau + 1):
        for _ in range(cfg.substeps):
            y = _rk4_step(matrix, y, step)
        values[j] = np.conj(y[1])
        if j % 50 == 0:
            peak = np.max(np.abs(y))
            if not np.isfinite(peak) or peak > INSTABILITY_GROWTH * scale0:
                raise NumericalInstabilityError(
                    f"stack norm grew to {peak:.3g} during the delay propagation; "
                    "reduce dtau or increase the truncation depth"
                )
    taus = cfg.dtau * np.arange(n_tau + 1)
    return CorrelationSeries(taus=taus, values=values)


@dataclass
class EmissionSpectrum:
    """Spectrum on the requested grid, normalized and raw."""

    omega: np.ndarray
    s_normalized: np.ndarray
    s_raw: np.ndarray


def emission_spectrum(corr: CorrelationSeries, cfg: SpectrumConfig) -> EmissionSpectrum:
    """Finite-time cosine-sine transform of the correlation.

    Trapezoid quadrature of Re integral_0^tau_max exp(i omega tau) C(tau)
    w(tau) dtau with an optional exponential window w.  The result is
    normalized to its maximum over the grid, which must be positive.
    """
    taus = corr.taus
    values = corr.values
    if len(taus) != len(values):
        raise ValueError("correlation grids disagree")
    if np.all(values == 0):
        raise SpectrumNormalizationError(
            "correlation is identically zero, nothing to normalize"
        )
    if cfg.window_rate:
        values = values * np.exp(-cfg.window_rate * taus)
    omega = cfg.omega_grid
    raw = np.empty(len(omega))
    chunk = max(1, int(4e6 / max(len(taus), 1)))
    for start in range(0, len(omega), chunk):
        block = omega[start : start + chunk, None]
        kernel = np.exp(1j * block * taus[None, :])
        raw[start : start + chunk] = np.trapezoid(
            (kernel * values[None, :]).real, taus, axis=1
        )
    peak = raw.max()
    if peak <= 0:
        raise SpectrumNormalizationError(
            f"spectrum maximum over the grid is {peak:.3g}, normalization undefined"
        )
    return EmissionSpectrum(omega=omega, s_normalized=raw / peak, s_raw=raw)


def compute_spectrum(cfg: SpectrumConfig) -> tuple[CorrelationSeries, EmissionSpectrum]:
    """Run the correlation and transform it in one call."""
    corr = two_time_correlation(cfg)
    return corr, emission_spectrum(corr, cfg)
