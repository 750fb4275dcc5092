"""Checks for the Markovian baseline: rates, Lamb shift, and evolution."""

from __future__ import annotations

import math

import numpy as np
import pytest

from heomfield.errors import ConfigError
from heomfield.heom import BathParams, FieldChannel, OuProcess
from heomfield.lindblad import (
    MarkovParams,
    Picture,
    StochasticField,
    bath_rates,
    correlation_integral,
    lamb_shift,
    markovian_evolve,
    markovian_rhs,
    markovian_steady_state,
    spectral_density,
)

EXCITED = np.diag([1.0, 0.0]).astype(complex)


def transverse_only(delta_sq, gamma):
    return StochasticField(
        dephasing=OuProcess(FieldChannel.DEPHASING, 0.0, 1.0, enabled=False),
        relax_re=OuProcess(FieldChannel.RELAX_RE, np.sqrt(delta_sq), gamma),
        relax_im=OuProcess(FieldChannel.RELAX_IM, np.sqrt(delta_sq), gamma),
    )


def test_rate_integral_starts_at_zero():
    proc = OuProcess(FieldChannel.DEPHASING, np.sqrt(0.4), 0.2)
    assert correlation_integral(0.0, proc) == 0.0


def test_rate_integral_saturates_at_variance_over_cutoff():
    proc = OuProcess(FieldChannel.DEPHASING, np.sqrt(0.4), 0.2)
    assert correlation_integral(1000.0, proc) == pytest.approx(2.0, abs=1e-12)


def test_rate_integral_monotone():
    proc = OuProcess(FieldChannel.RELAX_RE, 0.7, 0.3)
    ts = np.linspace(0.0, 40.0, 200)
    ks = np.array([correlation_integral(t, proc) for t in ts])
    assert np.all(np.diff(ks) >= 0)


def test_rate_integral_disabled_channel_is_zero():
    proc = OuProcess(FieldChannel.DEPHASING, 0.5, 0.2, enabled=False)
    assert correlation_integral(3.0, proc) == 0.0


def test_lamb_shift_reference_value():
    bath = BathParams(delta_sq=0.4, gamma=0.2, beta=0.0)
    assert lamb_shift(1.0, bath) == pytest.approx(0.4 / 1.04, abs=1e-12)


def test_lamb_shift_log_term_vanishes_at_cutoff():
    beta, gamma, delta_sq = 0.3, 0.2, 0.4
    bath = BathParams(delta_sq=delta_sq, gamma=gamma, beta=beta)
    c_jd = gamma * delta_sq / math.pi
    expected = c_jd * (2 * math.pi * gamma - beta * gamma * math.pi * gamma) / (
        2 * gamma * (gamma**2 + gamma**2)
    )
    assert lamb_shift(gamma, bath) == pytest.approx(expected, abs=1e-12)


def test_lamb_shift_odd_at_infinite_temperature():
    bath = BathParams(delta_sq=0.4, gamma=0.2, beta=0.0)
    for omega in (0.3, 1.0, 2.5):
        assert lamb_shift(-omega, bath) == pytest.approx(-lamb_shift(omega, bath), abs=1e-12)


def test_lamb_shift_rejects_zero_frequency():
    with pytest.raises(ValueError):
        lamb_shift(0.0, BathParams(0.4, 0.2))


def test_bath_rates_infinite_temperature_are_equal():
    bath = BathParams(delta_sq=0.4, gamma=0.2, beta=0.0)
    down, up = bath_rates(bath, 1.0)
    expected = 2.0 * 0.2 * 0.4 / (0.2**2 + 1.0)
    assert down == pytest.approx(expected, abs=1e-12)
    assert up == pytest.approx(expected, abs=1e-12)


def test_bath_rates_detailed_balance_gap():
    bath = BathParams(delta_sq=0.4, gamma=0.2, beta=0.32)
    down, up = bath_rates(bath, 1.0)
    c_jd = 0.2 * 0.4 / math.pi
    lorentz = c_jd * 1.0 / (0.2**2 + 1.0)
    assert down > up
    assert down - up == pytest.approx(2.0 * math.pi * lorentz * 0.32, abs=1e-12)


def test_spectral_density_shape():
    bath = BathParams(delta_sq=0.4, gamma=0.2, beta=0.32)
    c_jd = 0.2 * 0.4 / math.pi
    omega = 0.7
    expected = c_jd * 0.32 * omega / (0.2**2 + omega**2)
    assert spectral_density(omega, bath) == pytest.approx(expected, abs=1e-14)
    assert spectral_density(-omega, bath) == pytest.approx(-expected, abs=1e-14)
    assert spectral_density(omega, BathParams(0.4, 0.2, beta=0.0)) == 0.0


def test_rhs_zero_map_when_everything_off():
    p = MarkovParams(
        bath=BathParams(0.0, 1.0, enabled=False),
        field=StochasticField.disabled(),
        picture=Picture.INTERACTION,
    )
    rng = np.random.default_rng(9)
    for _ in range(10):
        rho = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = rho + rho.conj().T
        assert np.max(np.abs(markovian_rhs(rho, 1.3, p))) < 1e-14


def test_rhs_is_trace_free():
    p = MarkovParams(
        bath=BathParams(0.4, 0.2, beta=0.32),
        field=StochasticField.uniform(delta_sq=0.4, gamma=0.2),
    )
    rng = np.random.default_rng(13)
    for _ in range(20):
        rho = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = rho + rho.conj().T
        assert abs(np.trace(markovian_rhs(rho, 0.8, p))) < 1e-13


def test_bath_infinite_temperature_steady_is_half():
    p = MarkovParams(
        bath=BathParams(0.4, 0.2, beta=0.0),
        field=StochasticField.disabled(),
    )
    rho = markovian_steady_state(p)
    assert rho[0, 0].real == pytest.approx(0.5, abs=1e-12)


def test_field_only_population_relaxes_to_half():
    p = MarkovParams(
        bath=BathParams(0.0, 1.0, enabled=False),
        field=StochasticField.uniform(delta_sq=0.4, gamma=0.2),
    )
    traj = markovian_evolve(p, EXCITED, 200.0, 0.02)
    assert abs(traj.population[-1] - 0.5) < 1e-3


def test_strong_bath_markovian_population_is_monotone():
    p = MarkovParams(
        bath=BathParams(1.6, 0.8, beta=0.1),
        field=StochasticField.disabled(),
    )
    traj = markovian_evolve(p, EXCITED, 30.0, 0.01)
    assert np.all(np.diff(traj.population) <= 1e-12)
    steady = markovian_steady_state(p)
    assert abs(traj.population[-1] - steady[0, 0].real) < 1e-6


def test_dt_halving_self_check():
    p = MarkovParams(
        bath=BathParams(0.4, 0.2, beta=0.32),
        field=StochasticField.uniform(delta_sq=0.4, gamma=0.2),
    )
    coarse = markovian_evolve(p, EXCITED, 30.0, 0.02)
    fine = markovian_evolve(p, EXCITED, 30.0, 0.01)
    assert np.max(np.abs(fine.population[::2] - coarse.population)) < 1e-6


def test_eigenvalues_stay_nearly_positive():
    p = MarkovParams(
        bath=BathParams(0.4, 0.2, beta=0.32),
        field=StochasticField.uniform(delta_sq=0.8, gamma=0.4),
    )
    rho0 = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    traj = markovian_evolve(p, rho0, 60.0, 0.02)
    radius = np.sqrt((2.0 * traj.population - 1.0) ** 2 + 4.0 * np.abs(traj.coherence) ** 2)
    min_eig = 0.5 * (1.0 - radius)
    assert min_eig.min() >= -1e-9


def test_steady_state_matches_time_dependent_evolution():
    p = MarkovParams(
        bath=BathParams(0.4, 0.2, beta=0.32),
        field=StochasticField.uniform(delta_sq=0.4, gamma=0.2),
    )
    traj = markovian_evolve(p, EXCITED, 400.0, 0.02)
    steady = markovian_steady_state(p)
    assert abs(traj.population[-1] - steady[0, 0].real) < 1e-6


def test_steady_state_needs_a_relaxation_channel():
    dephasing = StochasticField(
        dephasing=OuProcess(FieldChannel.DEPHASING, 0.5, 0.2),
        relax_re=OuProcess(FieldChannel.RELAX_RE, 0.0, 1.0, enabled=False),
        relax_im=OuProcess(FieldChannel.RELAX_IM, 0.0, 1.0, enabled=False),
    )
    for field in (StochasticField.disabled(), dephasing):
        p = MarkovParams(bath=BathParams(0.0, 1.0, enabled=False), field=field)
        with pytest.raises(ConfigError):
            markovian_steady_state(p)


def test_transverse_field_steady_is_half():
    p = MarkovParams(
        bath=BathParams(0.0, 1.0, enabled=False),
        field=transverse_only(0.4, 0.2),
    )
    rho = markovian_steady_state(p)
    assert rho[0, 0].real == pytest.approx(0.5, abs=1e-12)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
