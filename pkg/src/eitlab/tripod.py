"""Four-level tripod medium: double EIT and two-polariton transport.

Three ground states |1>, |2>, |3> couple to a common excited state |0>
through a weak probe (Omega_P), a strong pump (Omega), and a weak trigger
(Omega_T).  Two dark states survive, so probe and trigger each see an EIT
window; the corresponding dark-state polaritons propagate independently in
the low-intensity regime and can be stored and released together, which is
the basis of a polarization-preserving memory.

Basis order everywhere: (|0>, |1>, |2>, |3>).  Units: c = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polariton import MixingSchedule, PolaritonField, evolve_ideal


class DegenerateCouplingError(Exception):
    """All three Rabi frequencies vanish; the eigenbasis is undefined."""


class ResonantDenominatorError(Exception):
    """A steady-state denominator vanished; carries the offending factor."""


@dataclass(frozen=True)
class TripodScheme:
    """Drive and relaxation parameters of the tripod system.

    Rabi frequencies multiply the coherences directly (no factor 1/2): the
    three-level limit Omega_T = 0 maps onto the Lambda convention with
    probe Rabi frequency 2*rabi_probe.

    Rates come in two groups: `gamma_11/22/33` are population-decay branches
    of the excited state |0> into each ground state, while `gamma_j0` and
    `gamma_ij` are the dephasing rates of the corresponding coherences,
    entering through Delta_j0 = delta_j + i gamma_j0 and
    Delta_ij = delta_j - delta_i - i gamma_ij.
    """

    rabi_pump: float
    rabi_probe: float
    rabi_trigger: float
    delta_1: float = 0.0
    delta_2: float = 0.0
    delta_3: float = 0.0
    gamma_11: float = 0.0
    gamma_22: float = 0.0
    gamma_33: float = 0.0
    gamma_10: float = 0.0
    gamma_20: float = 0.0
    gamma_30: float = 0.0
    gamma_12: float = 0.0
    gamma_13: float = 0.0
    gamma_23: float = 0.0

    def __post_init__(self):
        for name in (
            "gamma_11", "gamma_22", "gamma_33",
            "gamma_10", "gamma_20", "gamma_30",
            "gamma_12", "gamma_13", "gamma_23",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def delta_j0(self, j: int) -> complex:
        delta = (self.delta_1, self.delta_2, self.delta_3)[j - 1]
        gamma = (self.gamma_10, self.gamma_20, self.gamma_30)[j - 1]
        return delta + 1j * gamma

    def delta_ij(self, i: int, j: int) -> complex:
        deltas = {1: self.delta_1, 2: self.delta_2, 3: self.delta_3}
        gammas = {(1, 2): self.gamma_12, (1, 3): self.gamma_13, (2, 3): self.gamma_23}
        return deltas[j] - deltas[i] - 1j * gammas[(min(i, j), max(i, j))]


@dataclass(frozen=True)
class TripodState:
    """4x4 density matrix over (|0>, |1>, |2>, |3>)."""

    matrix: np.ndarray
    check: bool = True

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError("state must be 4x4")
        if self.check:
            if np.max(np.abs(m - m.conj().T)) > 1e-10:
                raise ValueError("state must be Hermitian within 1e-10")
            if abs(np.trace(m).real - 1.0) > 1e-10 or abs(np.trace(m).imag) > 1e-10:
                raise ValueError("state must have unit trace within 1e-10")
        object.__setattr__(self, "matrix", m)

    @staticmethod
    def pure(vector) -> "TripodState":
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return TripodState(np.outer(v, v.conj()))


def interaction_matrix(rabi_pump, rabi_probe, rabi_trigger) -> np.ndarray:
    """Resonant coupling Hamiltonian: Omega_j (|0><j| + |j><0|)."""
    h = np.zeros((4, 4), dtype=complex)
    for j, omega in ((1, rabi_probe), (2, rabi_pump), (3, rabi_trigger)):
        h[0, j] = omega
        h[j, 0] = np.conj(omega)
    return h


def tripod_eigenstates(rabi_pump, rabi_probe, rabi_trigger):
    """Dark and bright eigenstates of the resonant tripod coupling.

    Returns (e1, e2, e_plus, e_minus, energies) with energies
    (0, 0, +W, -W), W = sqrt(Omega_P^2 + Omega^2 + Omega_T^2).  e1 and e2
    are the two dark states (no |0> component); the bright pair carries the
    |0> admixture with weight W, normalized so all four are orthonormal.
    """
    op, o, ot = float(rabi_probe), float(rabi_pump), float(rabi_trigger)
    w2 = op**2 + o**2 + ot**2
    if w2 == 0.0:
        raise DegenerateCouplingError("all Rabi frequencies vanish")
    w = np.sqrt(w2)
    s = op**2 + ot**2
    if s > 0:
        e1 = np.array([0.0, ot, 0.0, -op]) / np.sqrt(s)
        e2 = np.array([0.0, o * op, -s, o * ot]) / np.sqrt(s * w2)
    else:
        # pump only: the probe/trigger ground states are trivially dark
        e1 = np.array([0.0, 1.0, 0.0, 0.0])
        e2 = np.array([0.0, 0.0, 0.0, 1.0])
    e_plus = np.array([w, op, o, ot]) / (np.sqrt(2.0) * w)
    e_minus = np.array([-w, op, o, ot]) / (np.sqrt(2.0) * w)
    energies = np.array([0.0, 0.0, w, -w])
    return e1, e2, e_plus, e_minus, energies


def tripod_obe_rhs(state: TripodState, scheme: TripodScheme) -> np.ndarray:
    """Mean-field Bloch derivative of the full 4x4 density matrix.

    The ten displayed equations (four populations, six coherences); the
    remaining elements follow by Hermiticity.  Population decay branches
    gamma_11/22/33 empty |0>; gamma_12, gamma_13, gamma_23 additionally
    redistribute ground populations as printed.
    """
    r = state.matrix
    s = scheme
    op, o, ot = s.rabi_probe, s.rabi_pump, s.rabi_trigger
    d = np.zeros((4, 4), dtype=complex)

    d[0, 0] = -(s.gamma_11 + s.gamma_22 + s.gamma_33) * r[0, 0] - 1j * (
        np.conj(op) * r[1, 0] - op * r[0, 1]
        + np.conj(o) * r[2, 0] - o * r[0, 2]
        + np.conj(ot) * r[3, 0] - ot * r[0, 3]
    )
    d[1, 1] = (
        s.gamma_11 * r[0, 0] + s.gamma_12 * r[2, 2] + s.gamma_13 * r[3, 3]
        - 1j * (op * r[0, 1] - np.conj(op) * r[1, 0])
    )
    d[2, 2] = (
        s.gamma_22 * r[0, 0] - s.gamma_12 * r[2, 2] + s.gamma_23 * r[3, 3]
        - 1j * (o * r[0, 2] - np.conj(o) * r[2, 0])
    )
    d[3, 3] = (
        s.gamma_33 * r[0, 0] - (s.gamma_13 + s.gamma_23) * r[3, 3]
        - 1j * (ot * r[0, 3] - np.conj(ot) * r[3, 0])
    )
    d[1, 0] = -1j * (
        -s.delta_j0(1) * r[1, 0] + op * (r[0, 0] - r[1, 1]) - o * r[1, 2] - ot * r[1, 3]
    )
    d[2, 0] = -1j * (
        -s.delta_j0(2) * r[2, 0] + o * (r[0, 0] - r[2, 2]) - op * r[2, 1] - ot * r[2, 3]
    )
    d[3, 0] = -1j * (
        -s.delta_j0(3) * r[3, 0] + ot * (r[0, 0] - r[3, 3]) - op * r[3, 1] - o * r[3, 2]
    )
    d[1, 2] = -1j * (-s.delta_ij(1, 2) * r[1, 2] + op * r[0, 2] - np.conj(o) * r[1, 0])
    d[1, 3] = -1j * (-s.delta_ij(1, 3) * r[1, 3] + op * r[0, 3] - np.conj(ot) * r[1, 0])
    d[2, 3] = -1j * (-s.delta_ij(2, 3) * r[2, 3] + o * r[0, 3] - np.conj(ot) * r[2, 0])

    d[0, 1] = np.conj(d[1, 0])
    d[0, 2] = np.conj(d[2, 0])
    d[0, 3] = np.conj(d[3, 0])
    d[2, 1] = np.conj(d[1, 2])
    d[3, 1] = np.conj(d[1, 3])
    d[3, 2] = np.conj(d[2, 3])
    return d


def integrate_tripod(
    state: TripodState, scheme: TripodScheme, t_end: float, steps: int = 2000
) -> TripodState:
    """Fixed-step RK4 integration of the mean-field tripod equations."""
    r = state.matrix.copy()
    h = t_end / steps
    for _ in range(steps):
        k1 = tripod_obe_rhs(TripodState(r, check=False), scheme)
        k2 = tripod_obe_rhs(TripodState(r + 0.5 * h * k1, check=False), scheme)
        k3 = tripod_obe_rhs(TripodState(r + 0.5 * h * k2, check=False), scheme)
        k4 = tripod_obe_rhs(TripodState(r + h * k3, check=False), scheme)
        r = r + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return TripodState(r, check=False)


def rho10_steady(scheme: TripodScheme) -> complex:
    """Steady-state probe coherence (rho_10)_ss / Omega_P.

    Closed form in the symmetric strong-pump regime (|Omega|^2 much larger
    than the probe/trigger intensities, half the population in each of |1>
    and |3>).  At full resonance with small dephasings the magnitude is
    deeply suppressed relative to a bare absorber: the double-EIT window.
    """
    s = scheme
    o2 = abs(s.rabi_pump) ** 2
    op2 = abs(s.rabi_probe) ** 2
    ot2 = abs(s.rabi_trigger) ** 2
    d10 = s.delta_j0(1)
    d30 = s.delta_j0(3)
    d12 = s.delta_ij(1, 2)
    d13 = s.delta_ij(1, 3)
    d23 = s.delta_ij(2, 3)

    den_a = d10 * d12 * d13 - d13 * o2 - d12 * ot2
    den_b = np.conj(d30) * d13 * d23 - d13 * o2 - d23 * op2
    den_pref1 = d10 * d12 - o2
    den_pref2 = np.conj(d30) * d23 - o2
    for name, val in (
        ("Delta_13", d13),
        ("probe-branch denominator", den_a),
        ("trigger-branch denominator", den_b),
        ("Delta_10*Delta_12 - |Omega|^2", den_pref1),
        ("Delta_30^* * Delta_23 - |Omega|^2", den_pref2),
    ):
        if abs(val) < 1e-300:
            raise ResonantDenominatorError(f"vanishing factor: {name}")
    pref = 1.0 + 0.25 * (d12 * d23 / d13**2) * op2 * ot2 / (den_pref1 * den_pref2)
    if abs(pref) < 1e-300:
        raise ResonantDenominatorError("vanishing factor: overall prefactor")
    brace = -0.5 * d12 * d13 / den_a - 0.5 * d12 * d13 * d23 * ot2 / den_b
    return complex(brace / pref)


@dataclass(frozen=True)
class TwoPolaritonField:
    """Probe and trigger dark-state polaritons sharing one mixing schedule."""

    probe: PolaritonField
    trigger: PolaritonField

    def __post_init__(self):
        if self.probe.x.shape != self.trigger.x.shape or np.max(
            np.abs(self.probe.x - self.trigger.x)
        ) > 0:
            raise ValueError("probe and trigger must share the spatial grid")


def copropagate(
    fields: TwoPolaritonField,
    schedule: MixingSchedule,
    t0: float,
    t1: float,
    tol: float = 1e-10,
) -> TwoPolaritonField:
    """Advance both polaritons through the shared store/release schedule.

    In the low-intensity regime the cross-coupling between probe and trigger
    vanishes, so each field follows its own characteristics with the common
    velocity c cos^2 theta(t): the two pulses emerge shape-preserved
    (solitonic pass-through).
    """
    return TwoPolaritonField(
        probe=evolve_ideal(fields.probe, schedule, t0, t1, tol),
        trigger=evolve_ideal(fields.trigger, schedule, t0, t1, tol),
    )
