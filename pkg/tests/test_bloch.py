"""Density-matrix dynamics, steady states, and the probe susceptibility."""

import numpy as np
import pytest

from eitlab.atomcore import DriveFields, Populations
from eitlab.bloch import (
    ObeState,
    chi_probe,
    ground_loss_populations,
    integrate_obe,
    obe_rhs,
    steady_state_full,
    steady_state_unsaturated,
)
from eitlab.pulse import N_P_COLD, internal_scheme


def _random_fields(rng):
    return DriveFields(
        rabi_pump=rng.uniform(0.2, 1.5),
        rabi_probe=rng.uniform(0.05, 0.8),
        detuning_probe=rng.uniform(-2.0, 2.0),
        detuning_pump=rng.uniform(-1.0, 1.0),
    )


def _state_from_matrix(rho):
    return ObeState(
        rho31=rho[2, 0], rho32=rho[2, 1], rho21=rho[1, 0],
        rho33=rho[2, 2].real, rho22=rho[1, 1].real, rho11=rho[0, 0].real,
    )


def test_steady_state_is_stationary():
    rng = np.random.default_rng(3)
    for _ in range(10):
        scheme = internal_scheme(gamma_1=rng.uniform(0.005, 0.2))
        fields = _random_fields(rng)
        rho = steady_state_full(scheme, fields)
        rhs = obe_rhs(_state_from_matrix(rho), scheme, fields)
        assert np.max(np.abs(rhs.to_vector()[:8])) < 1e-10


def test_steady_state_is_physical():
    rng = np.random.default_rng(5)
    for _ in range(10):
        scheme = internal_scheme(gamma_1=rng.uniform(0.005, 0.2))
        rho = steady_state_full(scheme, _random_fields(rng))
        m = np.array([[rho[i, j] for j in range(3)] for i in range(3)])
        assert np.max(np.abs(m - m.conj().T)) < 1e-10
        assert np.trace(m).real == pytest.approx(1.0, abs=1e-10)
        assert np.min(np.linalg.eigvalsh(m)) > -1e-10


def test_coherent_population_trapping():
    # both fields resonant, no ground dephasing: all population ends dark
    scheme = internal_scheme(gamma_1=0.0)
    fields = DriveFields(rabi_pump=0.6, rabi_probe=0.6)
    rho = steady_state_full(scheme, fields)
    assert rho[2, 2].real < 1e-10
    # the remaining ground coherence is that of the dark superposition
    assert rho[1, 0].real == pytest.approx(-0.5, abs=1e-8)


def test_eit_null_at_resonance():
    scheme = internal_scheme(gamma_1=0.0)
    chi = chi_probe(0.0, Populations(1.0, 0.0, 0.0), scheme, 0.8, N_P_COLD)
    assert abs(chi) < 1e-12


def test_absorption_and_gain_signs():
    scheme = internal_scheme(gamma_1=0.01)
    # red-positive detuning convention: Im chi > 0 means absorption
    chi_abs = chi_probe(0.0, Populations(1.0, 0.0, 0.0), scheme, 0.0, N_P_COLD)
    assert chi_abs.imag > 0
    chi_gain = chi_probe(0.0, Populations(0.7, 0.3, 0.0), scheme, 0.8, N_P_COLD)
    assert chi_gain.imag < 0


def test_unsaturated_formula_matches_full_solver():
    # weak probe: the fixed-population coherence reproduces the full solve
    scheme = internal_scheme(gamma_1=0.02)
    probe = 1e-4
    for delta in (-1.3, -0.2, 0.05, 0.6, 2.0):
        fields = DriveFields(rabi_pump=0.8, rabi_probe=probe, detuning_probe=delta)
        rho = steady_state_full(scheme, fields)
        n1, n2 = rho[0, 0].real, rho[1, 1].real
        pops = Populations(n1, n2, 1.0 - n1 - n2)
        r31 = steady_state_unsaturated(pops, scheme, fields)
        assert rho[2, 0] == pytest.approx(r31, rel=1e-3, abs=1e-12)


def test_ground_loss_populations_structure():
    pops = ground_loss_populations(0.05, 0.8)
    assert pops.n1 + pops.n2 + pops.n3 == pytest.approx(1.0)
    assert pops.n1 > pops.n2 > pops.n3 >= 0
    # pumped fraction grows with the exchange rate
    prev = 0.0
    for g1 in (0.01, 0.05, 0.1, 0.2):
        p = ground_loss_populations(g1, 0.8)
        ratio = p.n2 / p.n1
        assert ratio > prev
        prev = ratio


def test_ground_loss_populations_rate_balance():
    # independent rate-balance solution: pump rate W = Omega^2 / (2 gamma_3),
    # branch rate R = Gamma_1 W / (W + 2 gamma_3), exchange flux 2 gamma_1
    g1, op = 0.05, 0.8
    w = op**2 / 2.0
    r = 1.0 * w / (w + 2.0)
    n2 = 1.0 / (2.0 + r / (2.0 * g1) + w / (w + 2.0))
    pops = ground_loss_populations(g1, op)
    assert pops.n2 == pytest.approx(n2, abs=1e-12)
    assert pops.n3 == pytest.approx(w * n2 / (w + 2.0), abs=1e-12)


def test_integration_relaxes_to_steady_state():
    rng = np.random.default_rng(11)
    for _ in range(4):
        scheme = internal_scheme(gamma_1=rng.uniform(0.05, 0.2))
        fields = _random_fields(rng)
        target = steady_state_full(scheme, fields)
        start = ObeState(rho31=0, rho32=0, rho21=0, rho33=0, rho22=0, rho11=1)
        traj = integrate_obe(start, scheme, fields, t_end=2000.0, tol=1e-11)
        final = traj.final
        ref = _state_from_matrix(target)
        assert np.max(np.abs(final.to_vector() - ref.to_vector())) < 1e-6


def test_integration_tolerance_validation():
    scheme = internal_scheme(0.01)
    start = ObeState(rho31=0, rho32=0, rho21=0, rho33=0, rho22=0, rho11=1)
    with pytest.raises(ValueError):
        integrate_obe(start, scheme, DriveFields(), t_end=1.0, tol=1.0)


def test_chi_probe_vectorized():
    scheme = internal_scheme(0.01)
    grid = np.linspace(-2, 2, 11)
    chi = chi_probe(grid, Populations(1.0, 0.0, 0.0), scheme, 0.8, N_P_COLD)
    assert chi.shape == grid.shape
    for i, d in enumerate(grid):
        single = chi_probe(float(d), Populations(1.0, 0.0, 0.0), scheme, 0.8, N_P_COLD)
        assert chi[i] == pytest.approx(single)
