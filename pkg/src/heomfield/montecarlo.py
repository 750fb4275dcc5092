"""Monte Carlo reference dynamics for the classical field channels.

Averages unitary trajectories over exactly sampled Ornstein-Uhlenbeck
paths.  Slow compared to the hierarchy but free of truncation error, which
makes it the independent check the hierarchy is validated against wherever
the environment is purely classical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .heom import FieldChannel, OuProcess
from .propagate import StochasticField, _sample_times


@dataclass
class OuPath:
    """One exactly sampled process realization on a uniform grid."""

    times: np.ndarray
    values: np.ndarray
    seed: int


def _ou_update_coeffs(proc: OuProcess, dt: float) -> tuple[float, float]:
    decay = math.exp(-proc.gamma * dt)
    kick = proc.delta * math.sqrt(max(0.0, 1.0 - decay * decay))
    return decay, kick


def sample_ou_path(proc: OuProcess, dt: float, n_steps: int, seed: int) -> OuPath:
    """Sample the process at n_steps + 1 uniformly spaced times.

    Uses the exact one-step transition kernel, so the statistics are
    independent of dt: the draw starts in the stationary distribution and
    each update preserves it.
    """
    if dt <= 0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    if n_steps < 1:
        raise ConfigError(f"n_steps must be >= 1, got {n_steps}")
    rng = np.random.default_rng(seed)
    decay, kick = _ou_update_coeffs(proc, dt)
    normals = rng.standard_normal(n_steps + 1)
    values = np.empty(n_steps + 1)
    values[0] = proc.delta * normals[0]
    for j in range(n_steps):
        values[j + 1] = decay * values[j] + kick * normals[j + 1]
    times = dt * np.arange(n_steps + 1)
    return OuPath(times=times, values=values, seed=seed)


def _batch_paths(
    procs: tuple[OuProcess, ...],
    dt: float,
    n_steps: int,
    seed: int,
    traj_indices: np.ndarray,
) -> np.ndarray:
    """Paths for a batch of trajectories, shape (batch, n_steps + 1, n_procs).

    Each trajectory derives its own generator from (seed, index), so the
    realization depends only on the trajectory index, never on how the work
    is split into batches.
    """
    n_traj = len(traj_indices)
    n_procs = len(procs)
    z = np.empty((n_traj, n_steps + 1, n_procs))
    for b, k in enumerate(traj_indices):
        rng = np.random.default_rng((seed, int(k)))
        z[b] = rng.standard_normal((n_steps + 1, n_procs))
    decays = np.empty(n_procs)
    kicks = np.empty(n_procs)
    deltas = np.empty(n_procs)
    for i, proc in enumerate(procs):
        decays[i], kicks[i] = _ou_update_coeffs(proc, dt)
        deltas[i] = proc.delta
    z[:, 0, :] *= deltas
    for j in range(n_steps):
        z[:, j + 1, :] *= kicks
        z[:, j + 1, :] += decays * z[:, j, :]
    return z


@dataclass
class McTrajectory:
    """Trajectory-averaged observables with their standard errors."""

    times: np.ndarray
    population: np.ndarray
    population_stderr: np.ndarray
    coherence: np.ndarray
    coherence_re_stderr: np.ndarray
    coherence_im_stderr: np.ndarray
    n_traj: int


def _batched_hamiltonian_rhs(rho, omega_term, off_term):
    # H = [[omega_term, off_term], [conj(off_term), -omega_term]] per batch
    h = np.empty(rho.shape, dtype=complex)
    h[:, 0, 0] = omega_term
    h[:, 1, 1] = -omega_term
    h[:, 0, 1] = off_term
    h[:, 1, 0] = np.conj(off_term)
    return -1j * (h @ rho - rho @ h)


def mc_evolve(
    field: StochasticField,
    rho0: np.ndarray,
    t_max: float,
    dt: float,
    n_traj: int,
    seed: int,
    *,
    omega0: float = 1.0,
    batch_size: int = 2000,
    sample_stride: int = 1,
) -> McTrajectory:
    """Average the unitary dynamics over process realizations.

    The noise is sampled on a half-step grid so every Runge-Kutta stage sees
    the process at its own time.  Results for a given (seed, n_traj) are
    reproducible bit for bit at fixed batch_size and do not depend on how
    many batches the work is split into beyond summation order.
    """
    if n_traj < 100:
        raise ConfigError(f"n_traj must be >= 100 for meaningful errors, got {n_traj}")
    if dt <= 0 or t_max <= 0:
        raise ConfigError("dt and t_max must be > 0")
    rho0 = np.asarray(rho0, dtype=complex)
    n_steps = max(1, int(round(t_max / dt)))
    procs = field.enabled_processes()
    times = _sample_times(n_steps, dt, sample_stride)
    picks = sorted(set(range(0, n_steps + 1, sample_stride)) | {n_steps})
    pick_pos = {step: i for i, step in enumerate(picks)}
    n_out = len(picks)

    pop_sum = np.zeros(n_out)
    pop_sumsq = np.zeros(n_out)
    coh_sum = np.zeros(n_out, dtype=complex)
    coh_re_sumsq = np.zeros(n_out)
    coh_im_sumsq = np.zeros(n_out)

    slot = {proc.kind: i for i, proc in enumerate(procs)}

    for start in range(0, n_traj, batch_size):
        idx = np.arange(start, min(start + batch_size, n_traj))
        batch = len(idx)
        nu = (
            _batch_paths(procs, 0.5 * dt, 2 * n_steps, seed, idx)
            if procs
            else np.zeros((batch, 2 * n_steps + 1, 0))
        )
        rho = np.broadcast_to(rho0, (batch, 2, 2)).copy()

        def stage_terms(half_index):
            omega_term = np.full(batch, 0.5 * omega0)
            off_term = np.zeros(batch, dtype=complex)
            if FieldChannel.DEPHASING in slot:
                omega_term = omega_term + 0.5 * nu[:, half_index, slot[FieldChannel.DEPHASING]]
            if FieldChannel.RELAX_RE in slot:
                off_term = off_term + nu[:, half_index, slot[FieldChannel.RELAX_RE]]
            if FieldChannel.RELAX_IM in slot:
                off_term = off_term + 1j * nu[:, half_index, slot[FieldChannel.RELAX_IM]]
            return omega_term, off_term

        def record(step, rho):
            i = pick_pos[step]
            pop = rho[:, 0, 0].real
            coh = rho[:, 0, 1]
            pop_sum[i] += pop.sum()
            pop_sumsq[i] += np.sum(pop * pop)
            coh_sum[i] += coh.sum()
            coh_re_sumsq[i] += np.sum(coh.real**2)
            coh_im_sumsq[i] += np.sum(coh.imag**2)

        record(0, rho)
        for step in range(n_steps):
            om0, off0 = stage_terms(2 * step)
            om1, off1 = stage_terms(2 * step + 1)
            om2, off2 = stage_terms(2 * step + 2)
            k1 = _batched_hamiltonian_rhs(rho, om0, off0)
            k2 = _batched_hamiltonian_rhs(rho + 0.5 * dt * k1, om1, off1)
            k3 = _batched_hamiltonian_rhs(rho + 0.5 * dt * k2, om1, off1)
            k4 = _batched_hamiltonian_rhs(rho + dt * k3, om2, off2)
            rho = rho + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            if (step + 1) in pick_pos:
                record(step + 1, rho)

    def stderr(sumsq, mean_times_n):
        # unbiased sample variance of the mean from accumulated moments
        var = (sumsq - mean_times_n**2 / n_traj) / (n_traj - 1)
        return np.sqrt(np.maximum(var, 0.0) / n_traj)

    population = pop_sum / n_traj
    coherence = coh_sum / n_traj
    return McTrajectory(
        times=times,
        population=population,
        population_stderr=stderr(pop_sumsq, pop_sum),
        coherence=coherence,
        coherence_re_stderr=stderr(coh_re_sumsq, coh_sum.real),
        coherence_im_stderr=stderr(coh_im_sumsq, coh_sum.imag),
        n_traj=n_traj,
    )


def dephasing_envelope(t, proc: OuProcess):
    """Exact coherence envelope under pure longitudinal noise.

    For a process on the splitting alone, the coherence magnitude decays as
    exp(-(delta/gamma)**2 * (gamma t - 1 + exp(-gamma t))), Gaussian at
    short times and exponential once t exceeds the correlation time.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("the envelope is defined for t >= 0")
    g = proc.gamma * t
    exponent = (proc.delta / proc.gamma) ** 2 * (g + np.expm1(-g))
    value = np.exp(-exponent)
    return value if t.ndim else float(value)
