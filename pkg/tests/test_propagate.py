"""Checks for time evolution, steady states, and parameter sweeps."""

from __future__ import annotations

import numpy as np
import pytest

from heomfield.errors import ConfigError, DegenerateSteadyStateError
from heomfield.heom import BathParams, CouplingMode, FieldChannel, OuProcess
from heomfield.propagate import (
    SimConfig,
    SteadyMethod,
    StochasticField,
    SweepReduce,
    axis_paths,
    evolve,
    steady_state,
    sweep,
)

NO_BATH = BathParams(0.0, 1.0, enabled=False)


def dephasing_only(delta_sq, gamma):
    return StochasticField(
        dephasing=OuProcess(FieldChannel.DEPHASING, np.sqrt(delta_sq), gamma),
        relax_re=OuProcess(FieldChannel.RELAX_RE, 0.0, 1.0, enabled=False),
        relax_im=OuProcess(FieldChannel.RELAX_IM, 0.0, 1.0, enabled=False),
    )


def first_local_min(values):
    for k in range(1, len(values) - 1):
        if values[k] < values[k - 1] and values[k] <= values[k + 1]:
            return k
    return None


def first_local_max(values, start=0):
    for k in range(max(start, 1), len(values) - 1):
        if values[k] > values[k - 1] and values[k] >= values[k + 1]:
            return k
    return None


def test_free_evolution_keeps_population():
    sim = SimConfig(bath=NO_BATH, field=StochasticField.disabled(), depth=0, t_max=20.0)
    traj = evolve(sim)
    assert np.max(np.abs(traj.population - 1.0)) < 1e-12


def test_dephasing_only_preserves_diagonal_states():
    rho0 = np.diag([0.7, 0.3]).astype(complex)
    sim = SimConfig(
        bath=NO_BATH,
        field=dephasing_only(0.4, 0.2),
        depth=6,
        t_max=20.0,
        initial_state=rho0,
    )
    traj = evolve(sim, store_states=True)
    diffs = [np.max(np.abs(s - rho0)) for s in traj.states]
    assert max(diffs) < 1e-10


def test_dephasing_only_damps_coherence():
    rho0 = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    sim = SimConfig(
        bath=NO_BATH,
        field=dephasing_only(0.4, 0.2),
        depth=8,
        t_max=30.0,
        initial_state=rho0,
    )
    traj = evolve(sim)
    assert abs(traj.coherence[-1]) < 0.05 * abs(traj.coherence[0])
    assert np.max(np.abs(traj.population - 0.5)) < 1e-10


def test_strong_field_population_dips_then_revives():
    sim = SimConfig(
        bath=NO_BATH,
        field=StochasticField.uniform(delta_sq=1.6, gamma=0.4),
        depth=14,
        dt=0.01,
        t_max=30.0,
    )
    traj = evolve(sim)
    kmin = first_local_min(traj.population)
    assert kmin is not None
    kmax = first_local_max(traj.population, start=kmin + 1)
    assert kmax is not None
    assert traj.population[kmax] > traj.population[kmin]
    assert abs(traj.population[-1] - 0.5) < 0.02


def test_field_only_steady_population_is_half():
    for delta_sq, gamma in ((0.4, 0.1), (0.2, 0.6), (0.8, 1.0)):
        sim = SimConfig(
            bath=NO_BATH,
            field=StochasticField.uniform(delta_sq=delta_sq, gamma=gamma),
            depth=8,
            t_max=500.0,
        )
        rho = steady_state(sim, SteadyMethod.NULLSPACE)
        assert abs(rho[0, 0].real - 0.5) < 1e-3


def test_bath_only_infinite_temperature_steady_is_half():
    for mode in (CouplingMode.FULL, CouplingMode.RWA):
        sim = SimConfig(
            bath=BathParams(0.4, 0.2, beta=0.0, mode=mode),
            field=StochasticField.disabled(),
            depth=8,
            t_max=500.0,
        )
        rho = steady_state(sim, SteadyMethod.NULLSPACE)
        assert abs(rho[0, 0].real - 0.5) < 1e-3


def test_bath_finite_temperature_population_ordering():
    pops = {}
    for mode in (CouplingMode.FULL, CouplingMode.RWA):
        sim = SimConfig(
            bath=BathParams(0.4, 0.2, beta=0.32, mode=mode),
            field=StochasticField.disabled(),
            depth=10,
            t_max=500.0,
        )
        rho = steady_state(sim, SteadyMethod.NULLSPACE)
        pops[mode] = rho[0, 0].real
    assert pops[CouplingMode.RWA] < pops[CouplingMode.FULL] < 0.5


def test_steady_methods_agree():
    sim = SimConfig(
        bath=BathParams(0.4, 0.2, beta=0.32),
        field=StochasticField.uniform(delta_sq=0.4, gamma=0.2),
        depth=8,
        t_max=800.0,
    )
    rho_prop = steady_state(sim, SteadyMethod.PROPAGATE)
    rho_null = steady_state(sim, SteadyMethod.NULLSPACE)
    assert np.max(np.abs(rho_prop - rho_null)) < 1e-6


def test_propagate_steady_reports_nonconvergence():
    from heomfield.errors import SteadyStateNotConvergedError

    sim = SimConfig(
        bath=NO_BATH,
        field=StochasticField.uniform(delta_sq=0.4, gamma=0.05),
        depth=8,
        t_max=2.0,
        steady_tol=1e-12,
    )
    with pytest.raises(SteadyStateNotConvergedError):
        steady_state(sim, SteadyMethod.PROPAGATE)


def test_nullspace_rejects_dephasing_only_degeneracy():
    sim = SimConfig(bath=NO_BATH, field=dephasing_only(0.4, 0.2), depth=6)
    with pytest.raises(DegenerateSteadyStateError):
        steady_state(sim, SteadyMethod.NULLSPACE)


def test_sweep_zero_field_coupling_matches_bath_only():
    base = SimConfig(
        bath=BathParams(0.4, 0.2, beta=0.32),
        field=StochasticField.uniform(delta_sq=0.4, gamma=0.2),
        depth=8,
        t_max=500.0,
    )
    pts = sweep(base, "field.delta_sq_common", [0.0], method=SteadyMethod.NULLSPACE)
    assert len(pts) == 1
    assert pts[0].error is None
    bath_only = SimConfig(
        bath=BathParams(0.4, 0.2, beta=0.32),
        field=StochasticField.disabled(),
        depth=8,
        t_max=500.0,
    )
    rho = steady_state(bath_only, SteadyMethod.NULLSPACE)
    assert abs(pts[0].payload - rho[0, 0].real) < 1e-9


def test_sweep_empty_grid_returns_empty_table():
    base = SimConfig(bath=NO_BATH, field=StochasticField.uniform(delta_sq=0.4, gamma=0.2), depth=4)
    assert sweep(base, "field.gamma_common", []) == []


def test_sweep_records_failures_in_row():
    base = SimConfig(
        bath=NO_BATH,
        field=StochasticField.uniform(delta_sq=0.4, gamma=0.2),
        depth=4,
        dt=0.02,
        t_max=3.0,
    )
    pts = sweep(base, "dt", [0.02, 50.0], reduce=SweepReduce.TRAJECTORY)
    assert pts[0].error is None
    assert pts[0].payload is not None
    assert pts[1].payload is None
    assert "dt" in pts[1].error


def test_sweep_axis_registry_rejects_unknown_path():
    base = SimConfig(bath=NO_BATH, field=StochasticField.uniform(delta_sq=0.4, gamma=0.2), depth=4)
    assert "field.gamma_common" in axis_paths()
    with pytest.raises(ConfigError):
        sweep(base, "field.cutoff", [0.1])


def test_trajectory_invariants():
    sim = SimConfig(
        bath=BathParams(0.4, 0.2, beta=0.32),
        field=StochasticField.uniform(delta_sq=0.4, gamma=0.2),
        depth=8,
        t_max=50.0,
    )
    traj = evolve(sim)
    assert np.max(traj.herm_defect) <= 1e-9
    assert np.max(traj.trace_error) <= 1e-8
    assert traj.population.min() > -1e-8
    assert traj.population.max() < 1.0 + 1e-8


def test_step_halving_self_check():
    base = dict(
        bath=NO_BATH,
        field=StochasticField.uniform(delta_sq=0.8, gamma=0.4),
        depth=10,
        t_max=30.0,
    )
    coarse = evolve(SimConfig(dt=0.02, **base))
    fine = evolve(SimConfig(dt=0.01, **base))
    assert np.allclose(fine.times[::2], coarse.times, atol=1e-12)
    assert np.max(np.abs(fine.population[::2] - coarse.population)) < 1e-6


def test_rwa_first_minimum_is_deeper_than_full():
    mins = {}
    for mode in (CouplingMode.FULL, CouplingMode.RWA):
        sim = SimConfig(
            bath=BathParams(1.6, 0.4, beta=0.1, mode=mode),
            field=StochasticField.disabled(),
            depth=14,
            dt=0.01,
            t_max=12.0,
        )
        traj = evolve(sim)
        k = first_local_min(traj.population)
        assert k is not None
        mins[mode] = traj.population[k]
    assert mins[CouplingMode.RWA] < mins[CouplingMode.FULL]


def test_composite_steady_scan_has_interior_maximum():
    gammas = [0.05, 0.3, 0.7, 1.0, 1.4, 1.7, 2.1, 2.5]
    for mode in (CouplingMode.FULL, CouplingMode.RWA):
        base = SimConfig(
            bath=BathParams(0.4, 0.2, beta=0.32, mode=mode),
            field=StochasticField.uniform(delta_sq=0.4, gamma=0.2),
            depth=8,
            t_max=800.0,
        )
        pts = sweep(base, "field.gamma_common", gammas, method=SteadyMethod.NULLSPACE)
        pops = np.array([p.payload for p in pts])
        assert all(p.error is None for p in pts)
        k = int(np.argmax(pops))
        assert 0 < k < len(gammas) - 1


def test_stability_guard_rejects_oversized_step():
    sim = SimConfig(
        bath=NO_BATH,
        field=StochasticField.uniform(delta_sq=0.4, gamma=0.2),
        depth=4,
        dt=50.0,
        t_max=100.0,
    )
    with pytest.raises(ConfigError):
        evolve(sim)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
