"""Markovian master equation used as a baseline for the hierarchy.

The generator keeps the field processes through their time-integrated
autocorrelations and the bath through golden-rule rates evaluated at the
level splitting, plus the corresponding shift of the splitting itself.
It is exact in the limit of short environment correlation times and serves
as the reference every non-Markovian effect is measured against.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalInstabilityError
from .heom import BathParams, FieldChannel, OuProcess
from .operators import J0, JMINUS, JPLUS, check_density_matrix
from .propagate import INSTABILITY_GROWTH, StochasticField, Trajectory, _sample_times


class Picture(enum.Enum):
    """Frame the master equation is written in.

    The interaction picture drops the coherent rotation at the level
    splitting; the Schroedinger picture keeps it, which is what direct
    comparisons against the hierarchy need.
    """

    INTERACTION = "interaction"
    SCHROEDINGER = "schroedinger"


@dataclass(frozen=True, eq=False)
class MarkovParams:
    """Inputs of the Markovian baseline."""

    bath: BathParams
    field: StochasticField
    picture: Picture = Picture.SCHROEDINGER
    omega0: float = 1.0

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ConfigError(f"omega0 must be > 0, got {self.omega0}")


def correlation_integral(t, proc: OuProcess):
    """Time integral of the process autocovariance from 0 to t.

    Equals (delta**2 / gamma) * (1 - exp(-gamma t)); it is the decay-rate
    coefficient the Markovian treatment assigns to the process at time t and
    saturates at delta**2 / gamma once t exceeds the correlation time.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("correlation integral is defined for t >= 0")
    if not proc.enabled:
        return np.zeros_like(t) if t.ndim else 0.0
    value = -(proc.delta_sq / proc.gamma) * np.expm1(-proc.gamma * t)
    return value if t.ndim else float(value)


def thermal_occupation_scaled(beta: float, omega: float) -> float:
    """The product beta * n(omega) with its finite beta -> 0 limit.

    n is the Bose occupation; the product stays finite at infinite
    temperature, which keeps every rate formula well defined at beta = 0.
    """
    if omega <= 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    if beta == 0.0:
        return 1.0 / omega
    return beta / math.expm1(beta * omega)


def spectral_density(omega, bath: BathParams):
    """Bath spectral density, gamma * delta_sq / pi * beta * omega / (gamma**2 + omega**2)."""
    omega = np.asarray(omega, dtype=float)
    value = bath.spectral_prefactor * bath.beta * omega / (bath.gamma**2 + omega**2)
    return value if omega.ndim else float(value)


def bath_rates(bath: BathParams, omega0: float) -> tuple[float, float]:
    """Golden-rule (downward, upward) transition rates at the splitting.

    Written through beta * n(omega0) so the infinite-temperature limit is
    exact: both rates then equal 2 * gamma * delta_sq / (gamma**2 + omega0**2).
    """
    if not bath.enabled:
        return 0.0, 0.0
    lorentz = bath.spectral_prefactor * omega0 / (bath.gamma**2 + omega0**2)
    occ = thermal_occupation_scaled(bath.beta, omega0)
    rate_up = 2.0 * math.pi * lorentz * occ
    rate_down = 2.0 * math.pi * lorentz * (occ + bath.beta)
    return rate_down, rate_up


def lamb_shift(omega: float, bath: BathParams) -> float:
    """Shift of the level splitting induced by the bath.

    High-temperature closed form; odd in omega at beta = 0 and finite
    everywhere except omega = 0, which is rejected.
    """
    if omega == 0:
        raise ValueError("the shift is undefined at omega = 0")
    gamma = bath.gamma
    numerator = 2.0 * math.pi * omega + bath.beta * gamma * (
        2.0 * omega * math.log(gamma / abs(omega)) - math.pi * gamma
    )
    return bath.spectral_prefactor * numerator / (2.0 * gamma * (gamma**2 + omega**2))


_JPJM = JPLUS @ JMINUS
_JMJP = JMINUS @ JPLUS


def _dissipator(op: np.ndarray, op_dag: np.ndarray, rho: np.ndarray) -> np.ndarray:
    anti = op_dag @ op
    return op @ rho @ op_dag - 0.5 * (anti @ rho + rho @ anti)


def markovian_rhs(rho: np.ndarray, t: float, p: MarkovParams) -> np.ndarray:
    """Time derivative of the state under the Markovian generator."""
    out = np.zeros((2, 2), dtype=complex)
    k_deph = correlation_integral(t, p.field.dephasing)
    if k_deph:
        out += 2.0 * k_deph * _dissipator(J0, J0, rho)
    k_relax = correlation_integral(t, p.field.relax_re) + correlation_integral(
        t, p.field.relax_im
    )
    if k_relax:
        out += 2.0 * k_relax * (
            _dissipator(JMINUS, JPLUS, rho) + _dissipator(JPLUS, JMINUS, rho)
        )
    shift = 0.0
    if p.bath.enabled:
        rate_down, rate_up = bath_rates(p.bath, p.omega0)
        out += rate_down * _dissipator(JMINUS, JPLUS, rho)
        out += rate_up * _dissipator(JPLUS, JMINUS, rho)
        shift += lamb_shift(p.omega0, p.bath)
    h_coherent = shift * J0
    if p.picture is Picture.SCHROEDINGER:
        h_coherent = h_coherent + p.omega0 * J0
    out += -1j * (h_coherent @ rho - rho @ h_coherent)
    return out


def markovian_evolve(
    p: MarkovParams,
    rho0: np.ndarray,
    t_max: float,
    dt: float,
    *,
    sample_stride: int = 1,
) -> Trajectory:
    """Fixed-step integration of the Markovian master equation."""
    rho = np.asarray(check_density_matrix(rho0), dtype=complex)
    if dt <= 0 or t_max <= 0:
        raise ConfigError("dt and t_max must be > 0")
    n_steps = max(1, int(round(t_max / dt)))
    picks = set(range(0, n_steps + 1, sample_stride))
    picks.add(n_steps)
    times = _sample_times(n_steps, dt, sample_stride)
    population = np.empty(len(picks))
    coherence = np.empty(len(picks), dtype=complex)
    trace_error = np.empty(len(picks))
    herm_defect = np.empty(len(picks))
    out = 0
    for step in range(n_steps + 1):
        if step in picks:
            population[out] = rho[0, 0].real
            coherence[out] = rho[0, 1]
            trace_error[out] = abs(rho[0, 0] + rho[1, 1] - 1.0)
            herm_defect[out] = np.max(np.abs(rho - rho.conj().T))
            out += 1
            if not np.all(np.isfinite(rho)) or np.max(np.abs(rho)) > INSTABILITY_GROWTH:
                raise NumericalInstabilityError(
                    f"state norm blew up at t = {step * dt:g}; reduce dt"
                )
        if step < n_steps:
            t = step * dt
            k1 = markovian_rhs(rho, t, p)
            k2 = markovian_rhs(rho + 0.5 * dt * k1, t + 0.5 * dt, p)
            k3 = markovian_rhs(rho + 0.5 * dt * k2, t + 0.5 * dt, p)
            k4 = markovian_rhs(rho + dt * k3, t + dt, p)
            rho = rho + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    return Trajectory(times, population, coherence, trace_error, herm_defect)


def markovian_steady_state(p: MarkovParams) -> np.ndarray:
    """Stationary state from the saturated rates.

    Requires at least one relaxation channel (bath or transverse field);
    pure dephasing alone leaves every diagonal state stationary.
    """
    rate_down, rate_up = bath_rates(p.bath, p.omega0) if p.bath.enabled else (0.0, 0.0)
    relax = 2.0 * (
        _saturated(p.field.relax_re) + _saturated(p.field.relax_im)
    )
    total_up = rate_up + relax
    total_down = rate_down + relax
    if total_up + total_down <= 0:
        raise ConfigError(
            "steady state requires a relaxation channel; "
            "pure dephasing leaves populations untouched"
        )
    population = total_up / (total_up + total_down)
    return np.array([[population, 0.0], [0.0, 1.0 - population]], dtype=complex)


def _saturated(proc: OuProcess) -> float:
    if not proc.enabled:
        return 0.0
    return proc.delta_sq / proc.gamma
