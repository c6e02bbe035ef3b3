"""Fidelity analytics for collective quantum memories.

General state-overlap measures (Uhlmann, classical, pure-state) plus the
closed-form fidelities of an N-atom collective memory after a single-atom
error: asymmetric/symmetric spin flips, phase flips, loss of one atom, and
phase diffusion from atomic motion.  The single-error fidelities are leading
order in 1/N (except atom loss on a Fock state, which is exact).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


_ERROR_KINDS = ("spin_flip_asym", "spin_flip_sym", "phase_flip", "atom_loss", "motion")


def _as_density(state) -> np.ndarray:
    s = np.asarray(state, dtype=complex)
    if s.ndim == 1:
        n = np.linalg.norm(s)
        if abs(n - 1.0) > 1e-10:
            raise ValueError("pure state must be normalized")
        return np.outer(s, s.conj())
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("state must be a vector or a square matrix")
    if np.max(np.abs(s - s.conj().T)) > 1e-10:
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(s).real - 1.0) > 1e-10:
        raise ValueError("density matrix must have unit trace")
    if np.min(np.linalg.eigvalsh(s)) < -1e-10:
        raise ValueError("density matrix must be positive semidefinite")
    return s


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    """Hermitian square root with tiny negative eigenvalues clipped to 0."""
    vals, vecs = np.linalg.eigh(rho)
    vals = np.where(vals < 0.0, 0.0, vals)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def uhlmann_fidelity(rho, sigma) -> float:
    """(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, symmetric in its arguments."""
    r = _as_density(rho)
    s = _as_density(sigma)
    if r.shape != s.shape:
        raise ValueError("states must share a dimension")
    root = _psd_sqrt(r)
    inner = root @ s @ root
    vals = np.linalg.eigvalsh(inner)
    vals = np.where(vals < 0.0, 0.0, vals)
    f = float(np.sum(np.sqrt(vals)) ** 2)
    return min(1.0, max(0.0, f))


def classical_fidelity(p, q) -> float:
    """Bhattacharyya overlap (sum sqrt(p_x q_x))^2 of two distributions."""
    pa = np.asarray(p, dtype=float)
    qa = np.asarray(q, dtype=float)
    if pa.shape != qa.shape:
        raise ValueError("distributions must share a length")
    for name, d in (("p", pa), ("q", qa)):
        if np.min(d) < 0 or abs(np.sum(d) - 1.0) > 1e-10:
            raise ValueError(f"{name} is not a probability distribution")
    return float(np.sum(np.sqrt(pa * qa)) ** 2)


def pure_state_fidelity(psi, rho) -> float:
    """<psi|rho|psi> for a unit vector against a density matrix."""
    v = np.asarray(psi, dtype=complex)
    if v.ndim != 1:
        raise ValueError("psi must be a vector")
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ValueError("psi must be normalized")
    r = _as_density(rho)
    if r.shape[0] != v.size:
        raise ValueError("dimension mismatch")
    return float(np.real(v.conj() @ r @ v))


def error_rate(fidelity: float) -> float:
    """Memory error probability 1 - F."""
    return 1.0 - fidelity


@dataclass(frozen=True)
class MemoryErrorModel:
    """Single-atom error acting on an N-atom collective storage state.

    The stored excitation is described by exactly one of:
      - `fock_n`: a number state with n polaritons,
      - `coherent_alpha`: a coherent state amplitude,
      - `mean_number` (with optional `mean_amplitude_sq` = <Psi†><Psi>)
        for a generic state where only moments are known.
    """

    kind: str
    n_atoms: int
    fock_n: int | None = None
    coherent_alpha: complex | None = None
    mean_number: float | None = None
    mean_amplitude_sq: float | None = None
    diffusion_rate: float = 0.0
    time: float = 0.0

    def __post_init__(self):
        if self.kind not in _ERROR_KINDS:
            raise ValueError(f"kind must be one of {_ERROR_KINDS}")
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be at least 1")
        given = [
            x is not None
            for x in (self.fock_n, self.coherent_alpha, self.mean_number)
        ]
        if self.kind != "motion" and sum(given) != 1:
            raise ValueError("specify exactly one state descriptor")
        if self.fock_n is not None:
            if self.fock_n < 0:
                raise ValueError("fock_n must be non-negative")
            if self.fock_n > self.n_atoms:
                raise ValueError("more excitations than atoms")
        if self.diffusion_rate < 0 or self.time < 0:
            raise ValueError("diffusion_rate and time must be non-negative")

    @property
    def excitation_mean(self) -> float:
        if self.fock_n is not None:
            return float(self.fock_n)
        if self.coherent_alpha is not None:
            return abs(self.coherent_alpha) ** 2
        return float(self.mean_number)


def decoherence_fidelity(model: MemoryErrorModel, mode: str = "leading_order") -> float:
    """Memory fidelity after one single-atom error of `model.kind`.

    `mode` selects between the leading-order 1/N expansions (default) and
    the `exact_ratio` closed form available for the asymmetric spin flip on
    a Fock state; for every other case the two modes coincide.
    Leading-order results are clamped to [0, 1] (the expansions go negative
    once n is comparable to N, outside their validity); the exact-ratio
    value is returned as-is, even where it exceeds 1, so the two forms can
    be compared without any silent correction.
    """
    if mode not in ("leading_order", "exact_ratio"):
        raise ValueError("mode must be 'leading_order' or 'exact_ratio'")
    n_at = model.n_atoms
    kind = model.kind

    if kind == "motion":
        return motion_fidelity(n_at, model.diffusion_rate, model.time)

    if kind == "spin_flip_asym":
        if model.fock_n is not None:
            n = model.fock_n
            if mode == "exact_ratio":
                if n == n_at:
                    raise ZeroDivisionError("exact ratio undefined at n = N")
                return (1.0 - 1.0 / n_at) / (1.0 - n / n_at)
            value = 1.0 - (n + 1.0) / n_at
        elif model.coherent_alpha is not None:
            a2 = abs(model.coherent_alpha) ** 2
            value = (1.0 - 1.0 / n_at + a2 / n_at) / (1.0 + a2 / n_at)
        else:
            raise ValueError("asymmetric spin flip needs a Fock or coherent state")
    elif kind == "spin_flip_sym":
        if model.fock_n is not None:
            value = 1.0 - (2.0 * model.fock_n + 1.0) / n_at
        elif model.coherent_alpha is not None:
            value = 1.0 - 1.0 / n_at
        else:
            raise ValueError("symmetric spin flip needs a Fock or coherent state")
    elif kind == "phase_flip":
        value = 1.0 - 2.0 * model.excitation_mean / n_at
    else:  # atom_loss
        if model.fock_n is not None:
            value = 1.0 - model.fock_n / n_at
        else:
            mean_n = model.excitation_mean
            if model.coherent_alpha is not None:
                amp2 = abs(model.coherent_alpha) ** 2
            elif model.mean_amplitude_sq is not None:
                amp2 = model.mean_amplitude_sq
            else:
                amp2 = 0.0
            value = 1.0 - (mean_n - amp2) / n_at
    return min(1.0, max(0.0, value))


def motion_fidelity(n_atoms: int, diffusion_rate: float, time: float, n: int = 1) -> float:
    """Fidelity under phase diffusion of the atomic positions.

    For the single-excitation state f = (1 + (N-1) e^{-D t})/N, approaching
    e^{-D t} for large N (no collective enhancement of the decay); an
    n-excitation Fock state decays with the factor e^{-n D t}.
    """
    if n_atoms < 1:
        raise ValueError("n_atoms must be at least 1")
    if diffusion_rate < 0 or time < 0:
        raise ValueError("diffusion_rate and time must be non-negative")
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 1.0
    decay = math.exp(-n * diffusion_rate * time)
    return (1.0 + (n_atoms - 1) * decay) / n_atoms
