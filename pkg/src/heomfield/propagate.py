"""Time evolution, steady states and parameter sweeps for the hierarchy."""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .errors import (
    ConfigError,
    DegenerateSteadyStateError,
    NumericalInstabilityError,
    SteadyStateNotConvergedError,
)
from .heom import (
    AdmStack,
    BathParams,
    FieldChannel,
    HeomGenerator,
    OuProcess,
    bath_channel_coeffs,
    field_channel_coeffs,
)
from .operators import J0, check_density_matrix, excited_state

#: Largest dt * spectral-radius-estimate the fixed-step integrator accepts.
RK4_STABILITY_LIMIT = 2.5
#: Relative norm growth treated as a blow-up during propagation.
INSTABILITY_GROWTH = 1e3


@dataclass(frozen=True)
class StochasticField:
    """The three Ornstein-Uhlenbeck processes driving the system."""

    dephasing: OuProcess
    relax_re: OuProcess
    relax_im: OuProcess

    def __post_init__(self):
        expected = {
            "dephasing": FieldChannel.DEPHASING,
            "relax_re": FieldChannel.RELAX_RE,
            "relax_im": FieldChannel.RELAX_IM,
        }
        for name, kind in expected.items():
            proc = getattr(self, name)
            if proc.kind is not kind:
                raise ConfigError(f"field slot {name} holds a {proc.kind.value} process")

    @classmethod
    def disabled(cls) -> "StochasticField":
        return cls(
            dephasing=OuProcess.disabled(FieldChannel.DEPHASING),
            relax_re=OuProcess.disabled(FieldChannel.RELAX_RE),
            relax_im=OuProcess.disabled(FieldChannel.RELAX_IM),
        )

    @classmethod
    def uniform(cls, *, gamma: float, delta_sq: float) -> "StochasticField":
        """All three processes enabled with a common amplitude and cutoff."""
        delta = math.sqrt(delta_sq)
        return cls(
            dephasing=OuProcess(FieldChannel.DEPHASING, delta, gamma),
            relax_re=OuProcess(FieldChannel.RELAX_RE, delta, gamma),
            relax_im=OuProcess(FieldChannel.RELAX_IM, delta, gamma),
        )

    def processes(self) -> tuple[OuProcess, OuProcess, OuProcess]:
        return (self.dephasing, self.relax_re, self.relax_im)

    def enabled_processes(self) -> tuple[OuProcess, ...]:
        return tuple(p for p in self.processes() if p.enabled)


@dataclass(frozen=True, eq=False)
class SimConfig:
    """Full description of one hierarchy simulation.

    Everything is expressed in units of the level splitting: omega0 is the
    energy reference (kept as a field so tests can scale it), dt and t_max
    are times in 1/omega0, depth is the truncation level of the hierarchy.
    """

    bath: BathParams
    field: StochasticField
    depth: int
    omega0: float = 1.0
    dt: float = 0.02
    t_max: float = 50.0
    steady_tol: float = 1e-9
    sample_stride: int = 1
    initial_state: np.ndarray = field(default_factory=excited_state)
    rescale: bool = True
    max_indices: int | None = None

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ConfigError(f"omega0 must be > 0, got {self.omega0}")
        if self.dt <= 0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.t_max <= 0:
            raise ConfigError(f"t_max must be > 0, got {self.t_max}")
        if self.depth < 0:
            raise ConfigError(f"depth must be >= 0, got {self.depth}")
        if self.steady_tol <= 0:
            raise ConfigError(f"steady_tol must be > 0, got {self.steady_tol}")
        if self.sample_stride < 1:
            raise ConfigError(f"sample_stride must be >= 1, got {self.sample_stride}")
        try:
            state = check_density_matrix(self.initial_state)
        except ValueError as exc:
            raise ConfigError(f"initial_state: {exc}") from exc
        state.setflags(write=False)
        object.__setattr__(self, "initial_state", state)

    def hamiltonian(self) -> np.ndarray:
        return self.omega0 * J0


def build_generator(sim: SimConfig) -> HeomGenerator:
    """Assemble the hierarchy generator for the enabled channels.

    Channel order is fixed: dephasing, the two transverse field quadratures,
    then the two bath branches.  With nothing enabled the generator reduces
    to free evolution of the bare system.
    """
    channels = [field_channel_coeffs(p) for p in sim.field.enabled_processes()]
    if sim.bath.enabled:
        channels.extend(bath_channel_coeffs(sim.bath))
    return HeomGenerator(
        sim.hamiltonian(),
        channels,
        sim.depth,
        rescale=sim.rescale,
        max_indices=sim.max_indices,
    )


@dataclass
class Trajectory:
    """Observables of the physical element sampled along a propagation."""

    times: np.ndarray
    population: np.ndarray
    coherence: np.ndarray
    trace_error: np.ndarray
    herm_defect: np.ndarray
    states: np.ndarray | None = None


def _check_step(sim: SimConfig, gen: HeomGenerator, dt: float | None = None) -> None:
    dt = sim.dt if dt is None else dt
    bound = gen.gershgorin_bound()
    if dt * bound > RK4_STABILITY_LIMIT:
        raise ConfigError(
            f"dt = {dt:g} is too large for this generator "
            f"(spectral radius estimate {bound:.3g}); "
            f"use dt <= {RK4_STABILITY_LIMIT / bound:.3g}"
        )


def _rk4_step(matrix, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = matrix @ y
    k2 = matrix @ (y + 0.5 * dt * k1)
    k3 = matrix @ (y + 0.5 * dt * k2)
    k4 = matrix @ (y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def _sample_times(n_steps: int, dt: float, stride: int) -> np.ndarray:
    picks = list(range(0, n_steps + 1, stride))
    if picks[-1] != n_steps:
        picks.append(n_steps)
    return np.asarray(picks, dtype=np.int64) * dt


def evolve(sim: SimConfig, *, store_states: bool = False) -> Trajectory:
    """Propagate the hierarchy from the configured initial state.

    Fixed-step fourth-order Runge-Kutta over [0, t_max]; observables are
    recorded every ``sample_stride`` steps and at the final time.
    """
    gen = build_generator(sim)
    return evolve_generator(gen, sim, store_states=store_states)


def evolve_generator(
    gen: HeomGenerator, sim: SimConfig, *, store_states: bool = False
) -> Trajectory:
    """Same as :func:`evolve` but with a prebuilt generator."""
    _check_step(sim, gen)
    n_steps = max(1, int(round(sim.t_max / sim.dt)))
    stride = sim.sample_stride
    matrix = gen.matrix
    y = AdmStack.from_density_matrix(gen, sim.initial_state).values.reshape(-1)
    scale0 = max(1.0, float(np.max(np.abs(y))))

    picks = set(range(0, n_steps + 1, stride))
    picks.add(n_steps)
    n_out = len(picks)
    times = _sample_times(n_steps, sim.dt, stride)
    population = np.empty(n_out)
    coherence = np.empty(n_out, dtype=complex)
    trace_error = np.empty(n_out)
    herm_defect = np.empty(n_out)
    states = np.empty((n_out, 2, 2), dtype=complex) if store_states else None

    out = 0
    for step in range(n_steps + 1):
        if step in picks:
            rho = y[:4].reshape((2, 2), order="F")
            population[out] = rho[0, 0].real
            coherence[out] = rho[0, 1]
            trace_error[out] = abs(rho[0, 0] + rho[1, 1] - 1.0)
            herm_defect[out] = np.max(np.abs(rho - rho.conj().T))
            if store_states:
                states[out] = rho
            out += 1
            peak = np.max(np.abs(y))
            if not np.isfinite(peak) or peak > INSTABILITY_GROWTH * scale0:
                raise NumericalInstabilityError(
                    f"hierarchy norm grew to {peak:.3g} at t = {step * sim.dt:g}; "
                    "reduce dt or increase the truncation depth"
                )
        if step < n_steps:
            y = _rk4_step(matrix, y, sim.dt)
    return Trajectory(times, population, coherence, trace_error, herm_defect, states)


class SteadyMethod(enum.Enum):
    """How to extract the stationary state of the hierarchy."""

    #: Integrate until the time derivative falls below steady_tol.
    PROPAGATE = "propagate"
    #: Solve the rank-completed linear system with a trace constraint.
    NULLSPACE = "nullspace"


def _has_dissipation(sim: SimConfig) -> bool:
    if any(p.delta > 0 for p in sim.field.enabled_processes()):
        return True
    return sim.bath.enabled and sim.bath.delta_sq > 0


def steady_state(
    sim: SimConfig,
    method: SteadyMethod = SteadyMethod.PROPAGATE,
    *,
    return_stack: bool = False,
):
    """Stationary physical state, and optionally the full stationary stack."""
    if not _has_dissipation(sim):
        raise ConfigError("steady state requires at least one dissipative channel")
    gen = build_generator(sim)
    if method is SteadyMethod.PROPAGATE:
        stack = _steady_by_propagation(gen, sim)
    elif method is SteadyMethod.NULLSPACE:
        stack = _steady_by_nullspace(gen)
    else:
        raise ValueError(f"unknown steady-state method: {method!r}")
    rho = stack.physical()
    return (rho, stack) if return_stack else rho


def _steady_by_propagation(gen: HeomGenerator, sim: SimConfig) -> AdmStack:
    _check_step(sim, gen)
    matrix = gen.matrix
    y = AdmStack.from_density_matrix(gen, sim.initial_state).values.reshape(-1)
    scale0 = max(1.0, float(np.max(np.abs(y))))
    n_steps = max(1, int(round(sim.t_max / sim.dt)))
    check_every = 10
    residual = math.inf
    for step in range(n_steps):
        k1 = matrix @ y
        if step % check_every == 0:
            residual = float(np.max(np.abs(k1)))
            norm = float(np.max(np.abs(y)))
            if not np.isfinite(residual) or norm > INSTABILITY_GROWTH * scale0:
                raise NumericalInstabilityError(
                    f"hierarchy norm grew to {norm:.3g} during steady-state "
                    "propagation; reduce dt or increase the truncation depth"
                )
            if residual < sim.steady_tol * max(norm, 1e-300):
                return AdmStack(generator=gen, values=y.reshape((-1, 4)))
        k2 = matrix @ (y + 0.5 * sim.dt * k1)
        k3 = matrix @ (y + 0.5 * sim.dt * k2)
        k4 = matrix @ (y + sim.dt * k3)
        y = y + (sim.dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    raise SteadyStateNotConvergedError(
        f"steady-state residual {residual:.3g} above tolerance "
        f"{sim.steady_tol:g} after t = {sim.t_max:g}; raise t_max or loosen steady_tol"
    )


def _solve_with_trace_row(gen: HeomGenerator, constrained_row: int) -> np.ndarray:
    # Replace one scalar equation by the trace constraint on the physical
    # element.  Rows 0 and 3 hold the time derivatives of its diagonal.
    matrix = gen.matrix.tolil()
    matrix.rows[constrained_row] = [0, 3]
    matrix.data[constrained_row] = [1.0 + 0.0j, 1.0 + 0.0j]
    rhs = np.zeros(gen.dim, dtype=complex)
    rhs[constrained_row] = 1.0
    with warnings.catch_warnings():
        # A singular matrix here means a non-unique stationary state; the
        # probe below reports that as an error, so the solver warning is noise.
        warnings.simplefilter("ignore", sparse.linalg.MatrixRankWarning)
        solution = spsolve(matrix.tocsc(), rhs)
    if not np.all(np.isfinite(solution)):
        raise DegenerateSteadyStateError(
            "linear solve for the stationary state returned non-finite entries"
        )
    return solution


def _steady_by_nullspace(gen: HeomGenerator) -> AdmStack:
    first = _solve_with_trace_row(gen, 0)
    second = _solve_with_trace_row(gen, 3)
    scale = max(1.0, float(np.max(np.abs(first))))
    mismatch = float(np.max(np.abs(first - second))) / scale
    if mismatch > 1e-6:
        raise DegenerateSteadyStateError(
            f"stationary state is not unique (probe mismatch {mismatch:.3g}); "
            "the generator conserves more than the trace"
        )
    residual = float(np.max(np.abs(gen.matrix @ first)))
    bound = max(1.0, gen.gershgorin_bound())
    if residual > 1e-7 * bound * scale:
        raise DegenerateSteadyStateError(
            f"stationary solve left residual {residual:.3g}, matrix is near singular"
        )
    return AdmStack(generator=gen, values=first.reshape((-1, 4)))


class SweepReduce(enum.Enum):
    """What to record at each sweep point."""

    STEADY_POPULATION = "steady"
    TRAJECTORY = "trajectory"


#: Axis paths addressing scalar knobs of a :class:`SimConfig`.
_AXIS_LEAVES = {
    "bath.gamma",
    "bath.delta_sq",
    "bath.beta",
    "depth",
    "dt",
    "t_max",
    "omega0",
}
_FIELD_SLOTS = ("dephasing", "relax_re", "relax_im")
_FIELD_LEAVES = {"gamma", "delta", "delta_sq"}
_COMMON_AXES = {"field.gamma_common", "field.delta_common", "field.delta_sq_common"}


def axis_paths() -> list[str]:
    """All dotted parameter paths :func:`set_config_value` understands."""
    paths = sorted(_AXIS_LEAVES | _COMMON_AXES)
    for slot in _FIELD_SLOTS:
        paths.extend(f"field.{slot}.{leaf}" for leaf in sorted(_FIELD_LEAVES))
    return sorted(paths)


def _replace_process(proc: OuProcess, leaf: str, value: float) -> OuProcess:
    if leaf == "gamma":
        return replace(proc, gamma=value)
    if leaf == "delta":
        return replace(proc, delta=value)
    if leaf == "delta_sq":
        if value < 0:
            raise ConfigError(f"delta_sq must be >= 0, got {value}")
        return replace(proc, delta=math.sqrt(value))
    raise ConfigError(f"unknown field parameter {leaf!r}")


def set_config_value(sim: SimConfig, path: str, value: float) -> SimConfig:
    """Return a copy of ``sim`` with one dotted parameter path replaced.

    The ``field.*_common`` paths update every enabled process at once, which
    is how families of curves sharing a single field parameter are produced.
    """
    parts = path.split(".")
    if path in _COMMON_AXES:
        leaf = parts[1].removesuffix("_common")
        updates = {}
        for slot in _FIELD_SLOTS:
            proc = getattr(sim.field, slot)
            if proc.enabled:
                updates[slot] = _replace_process(proc, leaf, value)
        if not updates:
            raise ConfigError(f"{path}: no enabled field processes to update")
        return replace(sim, field=replace(sim.field, **updates))
    if len(parts) == 3 and parts[0] == "field":
        slot, leaf = parts[1], parts[2]
        if slot not in _FIELD_SLOTS or leaf not in _FIELD_LEAVES:
            raise ConfigError(
                f"unknown sweep axis {path!r}; valid axes: {', '.join(axis_paths())}"
            )
        proc = _replace_process(getattr(sim.field, slot), leaf, value)
        return replace(sim, field=replace(sim.field, **{slot: proc}))
    if path not in _AXIS_LEAVES:
        raise ConfigError(
            f"unknown sweep axis {path!r}; valid axes: {', '.join(axis_paths())}"
        )
    if path.startswith("bath."):
        return replace(sim, bath=replace(sim.bath, **{parts[1]: value}))
    if path == "depth":
        return replace(sim, depth=int(value))
    return replace(sim, **{path: value})


@dataclass
class SweepPoint:
    """Result of one sweep evaluation; ``error`` is set when it failed."""

    value: float
    payload: Any = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _sweep_eval(args) -> SweepPoint:
    sim, axis, value, reduce_, method = args
    try:
        point = set_config_value(sim, axis, value)
        if reduce_ is SweepReduce.STEADY_POPULATION:
            rho = steady_state(point, method)
            payload = float(rho[0, 0].real)
        else:
            payload = evolve(point)
        return SweepPoint(value=value, payload=payload)
    except Exception as exc:  # recorded per point, the sweep itself continues
        return SweepPoint(value=value, error=f"{type(exc).__name__}: {exc}")


def sweep(
    base: SimConfig,
    axis: str,
    values,
    reduce: SweepReduce = SweepReduce.STEADY_POPULATION,
    *,
    method: SteadyMethod = SteadyMethod.NULLSPACE,
    threads: int = 1,
) -> list[SweepPoint]:
    """Evaluate one reduction along a parameter axis, one point per value.

    Points fail independently: an exception at one value is recorded in its
    row and the sweep moves on.  Rows come back in the order of ``values``
    no matter how many workers are used.
    """
    set_config_value(base, axis, 1.0 if "delta" not in axis else 0.0)  # validate axis
    jobs = [(base, axis, float(v), reduce, method) for v in values]
    if not jobs:
        return []
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_sweep_eval, jobs))
    return [_sweep_eval(job) for job in jobs]
