"""Core domain types for the three-level Lambda system.

Two long-lived ground states |1>, |2> are coupled to a common excited state
|3> by a probe field (1-3 transition) and a pump field (2-3 transition).
Everything downstream (Bloch dynamics, susceptibility, pulse propagation)
consumes these records.

Internally most computations run in scaled units where the optical coherence
decay gamma_3 = 1 and c = 1; :class:`UnitSystem` handles the conversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as C_LIGHT


@dataclass(frozen=True)
class LambdaScheme:
    """Atomic parameters of the Lambda scheme (all rates in rad/s).

    gamma_1_decay, gamma_2_decay : population decay rates of |3> into |1>, |2>.
    gamma_12_decay : loss/dephasing rate between the two ground states.
    omega_31, omega_32 : optical transition frequencies.
    probe_wavelength : wavelength of the 1-3 (probe) transition, meters.
    """

    gamma_1_decay: float
    gamma_2_decay: float
    gamma_12_decay: float
    omega_31: float
    omega_32: float
    probe_wavelength: float

    def __post_init__(self):
        for name in ("gamma_1_decay", "gamma_2_decay", "gamma_12_decay"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.omega_31 <= 0 or self.omega_32 <= 0:
            raise ValueError("transition frequencies must be positive")
        if self.probe_wavelength <= 0:
            raise ValueError("probe_wavelength must be positive")

    @property
    def gamma_3(self) -> float:
        """Optical coherence decay rate (Gamma1 + Gamma2)/2."""
        return 0.5 * (self.gamma_1_decay + self.gamma_2_decay)

    @property
    def gamma_1(self) -> float:
        """Ground-state coherence decay rate Gamma12/2."""
        return 0.5 * self.gamma_12_decay


@dataclass(frozen=True)
class DriveFields:
    """Pump and probe field parameters (rad/s, rad).

    Detunings follow the red-positive convention delta_p = omega_31 - omega_p,
    delta_P = omega_32 - omega_P; the two-photon detuning is their difference.
    """

    rabi_pump: float = 0.0
    rabi_probe: float = 0.0
    phase_pump: float = 0.0
    phase_probe: float = 0.0
    detuning_probe: float = 0.0
    detuning_pump: float = 0.0

    def __post_init__(self):
        if self.rabi_pump < 0 or self.rabi_probe < 0:
            raise ValueError("Rabi frequencies must be real and >= 0")

    @property
    def detuning_two_photon(self) -> float:
        return self.detuning_probe - self.detuning_pump


@dataclass(frozen=True)
class Populations:
    """Normalized level populations n1, n2, n3."""

    n1: float
    n2: float = 0.0
    n3: float = 0.0

    def __post_init__(self):
        for v in (self.n1, self.n2, self.n3):
            if not -1e-12 <= v <= 1.0 + 1e-12:
                raise ValueError("populations must lie in [0, 1]")
        if abs(self.n1 + self.n2 + self.n3 - 1.0) > 1e-12:
            raise ValueError("populations must sum to 1 within 1e-12")


class DensityMatrix3:
    """3x3 complex Hermitian unit-trace density matrix."""

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (3, 3):
            raise ValueError("density matrix must be 3x3")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValueError("density matrix must be Hermitian within 1e-10")
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise ValueError("density matrix must have unit trace within 1e-10")
        if np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))) < -1e-9:
            raise ValueError("density matrix must be positive semidefinite")
        self.matrix = m

    def __getitem__(self, idx):
        return self.matrix[idx]

    @property
    def populations(self) -> Populations:
        d = self.matrix.diagonal().real
        d = np.clip(d, 0.0, 1.0)
        d = d / d.sum()
        return Populations(n1=d[0], n2=d[1], n3=d[2])


@dataclass(frozen=True)
class UnitSystem:
    """Conversion between SI and internal units with gamma_3 = 1 and c = 1.

    The internal time unit is 1/gamma_3 and the length unit c/gamma_3.
    """

    gamma_3_si: float

    def __post_init__(self):
        if self.gamma_3_si <= 0:
            raise ValueError("gamma_3_si must be positive")

    # -- angular frequencies / rates -------------------------------------
    def rate_to_internal(self, omega_si: float) -> float:
        return omega_si / self.gamma_3_si

    def rate_to_si(self, omega_int: float) -> float:
        return omega_int * self.gamma_3_si

    # -- times -----------------------------------------------------------
    def time_to_internal(self, t_si: float) -> float:
        return t_si * self.gamma_3_si

    def time_to_si(self, t_int: float) -> float:
        return t_int / self.gamma_3_si

    # -- lengths ---------------------------------------------------------
    def length_to_internal(self, x_si: float) -> float:
        return x_si * self.gamma_3_si / C_LIGHT

    def length_to_si(self, x_int: float) -> float:
        return x_int * C_LIGHT / self.gamma_3_si


def make_scheme_rb87() -> LambdaScheme:
    """Rb87 D1-line Lambda scheme.

    Gamma1 = Gamma2 = 2*pi*5.75 MHz, ground-state loss Gamma12 = 2*pi*1 kHz,
    probe wavelength 795 nm.  The ground hyperfine splitting (6.835 GHz)
    separates omega_31 from omega_32.
    """
    gamma = 2.0 * math.pi * 5.75e6
    gamma12 = 2.0 * math.pi * 1.0e3
    lam = 795e-9
    omega_31 = 2.0 * math.pi * C_LIGHT / lam
    omega_32 = omega_31 - 2.0 * math.pi * 6.834682e9
    return LambdaScheme(
        gamma_1_decay=gamma,
        gamma_2_decay=gamma,
        gamma_12_decay=gamma12,
        omega_31=omega_31,
        omega_32=omega_32,
        probe_wavelength=lam,
    )


def generalized_rabi(dipole_field_product: float, detuning: float) -> float:
    """Generalized Rabi frequency sqrt((mu*E/hbar)^2 + delta^2)."""
    return math.hypot(dipole_field_product, detuning)


def dark_bright_states(rabi_probe: float, rabi_pump: float):
    """Uncoupled (dark) and coupled (bright) ground-state superpositions.

    Returns (nc, c) as 2-component vectors over {|1>, |2>}:

        |C>  = (Omega_p |1> + Omega_P |2>) / sqrt(Omega_p^2 + Omega_P^2)
        |NC> = (Omega_P |1> - Omega_p |2>) / sqrt(Omega_p^2 + Omega_P^2)

    |NC> has zero matrix element with the excited state for any field pair.
    """
    norm = math.hypot(rabi_probe, rabi_pump)
    if norm == 0.0:
        raise ValueError("dark/bright states are degenerate when both Rabi frequencies vanish")
    nc = np.array([rabi_pump, -rabi_probe]) / norm
    c = np.array([rabi_probe, rabi_pump]) / norm
    return nc, c


def lambda_interaction_matrix(rabi_probe: float, rabi_pump: float) -> np.ndarray:
    """Interaction Hamiltonian over {|1>, |2>, |3>} in units of hbar/2.

    Couples |1>-|3> with the probe and |2>-|3> with the pump (RWA, resonant).
    Useful for verifying that the dark state does not couple to |3>.
    """
    h = np.zeros((3, 3))
    h[0, 2] = h[2, 0] = rabi_probe
    h[1, 2] = h[2, 1] = rabi_pump
    return h
