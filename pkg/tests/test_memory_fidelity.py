"""State-overlap measures and collective-memory error fidelities."""

import itertools
import math

import numpy as np
import pytest

from eitlab.memory_fidelity import (
    MemoryErrorModel,
    classical_fidelity,
    decoherence_fidelity,
    error_rate,
    motion_fidelity,
    pure_state_fidelity,
    uhlmann_fidelity,
)


def _random_density(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def test_uhlmann_properties():
    rng = np.random.default_rng(61)
    for dim in (2, 3, 5):
        for _ in range(5):
            r = _random_density(rng, dim)
            s = _random_density(rng, dim)
            f = uhlmann_fidelity(r, s)
            assert 0.0 <= f <= 1.0
            assert uhlmann_fidelity(s, r) == pytest.approx(f, abs=1e-10)
            assert uhlmann_fidelity(r, r) == pytest.approx(1.0, abs=1e-10)


def test_uhlmann_equals_classical_on_commuting_states():
    rng = np.random.default_rng(67)
    for dim in (2, 4, 6):
        p = rng.dirichlet(np.ones(dim))
        q = rng.dirichlet(np.ones(dim))
        assert uhlmann_fidelity(np.diag(p), np.diag(q)) == pytest.approx(
            classical_fidelity(p, q), abs=1e-10
        )


def test_uhlmann_pure_states():
    v = np.array([1.0, 0.0])
    w = np.array([0.0, 1.0])
    assert uhlmann_fidelity(v, v) == pytest.approx(1.0)
    assert uhlmann_fidelity(v, w) == pytest.approx(0.0, abs=1e-12)
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    assert uhlmann_fidelity(v, plus) == pytest.approx(0.5, abs=1e-12)
    assert pure_state_fidelity(plus, np.outer(v, v)) == pytest.approx(0.5)


def test_input_validation():
    with pytest.raises(ValueError):
        uhlmann_fidelity(np.array([1.0, 1.0]), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        uhlmann_fidelity(np.eye(2), np.eye(3) / 3.0)
    with pytest.raises(ValueError):
        classical_fidelity([0.5, 0.6], [0.5, 0.5])


def _dicke(n_atoms, n_exc):
    """Symmetric state of n_atoms qubits with n_exc excitations."""
    dim = 2**n_atoms
    v = np.zeros(dim)
    for bits in itertools.product((0, 1), repeat=n_atoms):
        if sum(bits) == n_exc:
            idx = int("".join(map(str, bits)), 2)
            v[idx] = 1.0
    return v / np.linalg.norm(v)


def test_atom_loss_brute_force():
    # trace out one qubit of a symmetric state and overlap with the
    # symmetric state of the remaining atoms: exactly 1 - n/N
    for n_atoms in (3, 4, 6):
        for n_exc in (1, 2):
            v = _dicke(n_atoms, n_exc).reshape(2, 2 ** (n_atoms - 1))
            reduced = v.T @ v  # state of the remaining atoms
            target = _dicke(n_atoms - 1, n_exc)
            overlap = float(target @ reduced @ target)
            assert overlap == pytest.approx(1.0 - n_exc / n_atoms, abs=1e-12)
            model = MemoryErrorModel(kind="atom_loss", n_atoms=n_atoms, fock_n=n_exc)
            assert decoherence_fidelity(model) == pytest.approx(overlap, abs=1e-12)


def test_asymmetric_flip_forms():
    model = MemoryErrorModel(kind="spin_flip_asym", n_atoms=50, fock_n=3)
    assert decoherence_fidelity(model) == pytest.approx(1.0 - 4.0 / 50.0)
    exact = decoherence_fidelity(model, mode="exact_ratio")
    assert exact == pytest.approx((1.0 - 1.0 / 50.0) / (1.0 - 3.0 / 50.0))
    # the two printed forms disagree; the ratio form may exceed 1 and is
    # deliberately not clamped
    assert exact > 1.0


def test_exact_ratio_pole():
    model = MemoryErrorModel(kind="spin_flip_asym", n_atoms=5, fock_n=5)
    with pytest.raises(ZeroDivisionError):
        decoherence_fidelity(model, mode="exact_ratio")


def test_coherent_state_forms():
    n_atoms, alpha = 200, 1.5
    a2 = alpha**2
    asym = MemoryErrorModel(kind="spin_flip_asym", n_atoms=n_atoms,
                            coherent_alpha=alpha)
    assert decoherence_fidelity(asym) == pytest.approx(
        (1.0 - 1.0 / n_atoms + a2 / n_atoms) / (1.0 + a2 / n_atoms)
    )
    sym = MemoryErrorModel(kind="spin_flip_sym", n_atoms=n_atoms,
                           coherent_alpha=alpha)
    assert decoherence_fidelity(sym) == pytest.approx(1.0 - 1.0 / n_atoms)
    # coherent states are eigenstates of the loss operator: no infidelity
    loss = MemoryErrorModel(kind="atom_loss", n_atoms=n_atoms,
                            coherent_alpha=alpha)
    assert decoherence_fidelity(loss) == pytest.approx(1.0)


def test_phase_flip_and_symmetric_flip():
    sym = MemoryErrorModel(kind="spin_flip_sym", n_atoms=100, fock_n=2)
    assert decoherence_fidelity(sym) == pytest.approx(1.0 - 5.0 / 100.0)
    phase = MemoryErrorModel(kind="phase_flip", n_atoms=100, mean_number=3.0)
    assert decoherence_fidelity(phase) == pytest.approx(1.0 - 6.0 / 100.0)
    vacuum = MemoryErrorModel(kind="phase_flip", n_atoms=100, fock_n=0)
    assert decoherence_fidelity(vacuum) == pytest.approx(1.0)


def test_atom_loss_general_moments():
    # F = 1 - (<n> - |<Psi>|^2) / N for states known only by moments
    model = MemoryErrorModel(kind="atom_loss", n_atoms=80, mean_number=4.0,
                             mean_amplitude_sq=1.0)
    assert decoherence_fidelity(model) == pytest.approx(1.0 - 3.0 / 80.0)


def test_motion_fidelity_limits():
    assert motion_fidelity(50, 0.3, 0.0) == pytest.approx(1.0)
    assert motion_fidelity(50, 0.3, 1e9) == pytest.approx(1.0 / 50.0)
    assert motion_fidelity(50, 0.3, 2.0, n=0) == pytest.approx(1.0)
    f1 = motion_fidelity(50, 0.3, 2.0, n=1)
    f2 = motion_fidelity(50, 0.3, 2.0, n=2)
    assert f2 < f1 < 1.0
    model = MemoryErrorModel(kind="motion", n_atoms=50, diffusion_rate=0.3,
                             time=2.0)
    assert decoherence_fidelity(model) == pytest.approx(f1)


def test_leading_order_clamped():
    # expansions outside their validity clamp to [0, 1]
    model = MemoryErrorModel(kind="spin_flip_sym", n_atoms=5, fock_n=4)
    assert decoherence_fidelity(model) == 0.0


def test_model_validation():
    with pytest.raises(ValueError):
        MemoryErrorModel(kind="unknown", n_atoms=10, fock_n=1)
    with pytest.raises(ValueError):
        MemoryErrorModel(kind="atom_loss", n_atoms=10)
    with pytest.raises(ValueError):
        MemoryErrorModel(kind="atom_loss", n_atoms=10, fock_n=1, mean_number=2.0)
    with pytest.raises(ValueError):
        MemoryErrorModel(kind="atom_loss", n_atoms=3, fock_n=4)


def test_error_rate():
    assert error_rate(0.97) == pytest.approx(0.03)
