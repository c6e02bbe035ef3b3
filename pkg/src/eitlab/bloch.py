"""Optical Bloch equations for the Lambda system.

Slowly-varying density-matrix dynamics (time integration and linear
steady-state solution), the fixed-population closed-form coherence, and the
first-order probe susceptibility.

All rates/frequencies are used consistently; functions are unit-agnostic
(pass SI rad/s or scaled units where gamma_3 = 1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .atomcore import DensityMatrix3, DriveFields, LambdaScheme, Populations


class SteadyStateError(Exception):
    """No unique steady state (singular linear system)."""


class StiffnessError(Exception):
    """Integrator step-size underflow; carries the failure time."""

    def __init__(self, t_fail):
        super().__init__(f"integration failed near t = {t_fail:g}")
        self.t_fail = t_fail


@dataclass(frozen=True)
class ObeState:
    """The six independent slowly-varying density-matrix elements."""

    rho31: complex = 0.0
    rho32: complex = 0.0
    rho21: complex = 0.0
    rho33: float = 0.0
    rho22: float = 0.0
    rho11: float = 1.0

    @property
    def trace(self) -> float:
        return self.rho11 + self.rho22 + self.rho33

    def to_vector(self) -> np.ndarray:
        return np.array(
            [
                self.rho31.real, self.rho31.imag,
                self.rho32.real, self.rho32.imag,
                self.rho21.real, self.rho21.imag,
                self.rho33, self.rho22, self.rho11,
            ]
        )

    @staticmethod
    def from_vector(y) -> "ObeState":
        return ObeState(
            rho31=complex(y[0], y[1]),
            rho32=complex(y[2], y[3]),
            rho21=complex(y[4], y[5]),
            rho33=float(y[6]),
            rho22=float(y[7]),
            rho11=float(y[8]),
        )

    def to_density_matrix(self) -> DensityMatrix3:
        m = np.array(
            [
                [self.rho11, np.conj(self.rho21), np.conj(self.rho31)],
                [self.rho21, self.rho22, np.conj(self.rho32)],
                [self.rho31, self.rho32, self.rho33],
            ],
            dtype=complex,
        )
        return DensityMatrix3(m)


def _rhs_vector(y: np.ndarray, scheme: LambdaScheme, fields: DriveFields) -> np.ndarray:
    """Right-hand side of the slowly-varying Bloch system on the real 9-vector."""
    g3 = scheme.gamma_3
    g1 = scheme.gamma_1
    gamma2 = scheme.gamma_2_decay
    dp = fields.detuning_probe
    dP = fields.detuning_pump
    d2 = fields.detuning_two_photon
    wp = fields.rabi_probe * cmath.exp(-1j * fields.phase_probe)
    wP = fields.rabi_pump * cmath.exp(-1j * fields.phase_pump)

    r31 = complex(y[0], y[1])
    r32 = complex(y[2], y[3])
    r21 = complex(y[4], y[5])
    r33, r22, r11 = y[6], y[7], y[8]
    r12 = np.conj(r21)
    r13 = np.conj(r31)
    r23 = np.conj(r32)

    d31 = -(g1 + g3 + 1j * dp) * r31 + 0.5j * wP * r21 - 0.5j * wp * (r33 - r11)
    d32 = -(g3 + 1j * dP) * r32 + 0.5j * wp * r12 - 0.5j * wP * (r33 - r22)
    d21 = -(g1 + 1j * d2) * r21 + 0.5j * wP * r31 - 0.5j * wp * r23
    d33 = 2.0 * (0.5j * wp * r13 + 0.5j * wP * r23).real - 2.0 * g3 * r33
    d22 = 2.0 * (-0.5j * wP * r23).real + gamma2 * r33 + 2.0 * g1 * r11
    d11 = -d22 - d33

    return np.array(
        [d31.real, d31.imag, d32.real, d32.imag, d21.real, d21.imag, d33, d22, d11]
    )


def obe_rhs(state: ObeState, scheme: LambdaScheme, fields: DriveFields) -> ObeState:
    """Time derivative of the six slowly-varying Bloch variables."""
    return ObeState.from_vector(_rhs_vector(state.to_vector(), scheme, fields))


@dataclass(frozen=True)
class ObeTrajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), 9) real vectors

    def state_at(self, i: int) -> ObeState:
        return ObeState.from_vector(self.states[i])

    @property
    def final(self) -> ObeState:
        return ObeState.from_vector(self.states[-1])


def integrate_obe(
    initial: ObeState,
    scheme: LambdaScheme,
    fields: DriveFields,
    t_end: float,
    tol: float = 1e-9,
    sample_times=None,
) -> ObeTrajectory:
    """Adaptive stiff integration of the Bloch system to t_end.

    The rates can span four orders of magnitude (gamma_1 vs gamma_3), so an
    implicit method with dense output is used.
    """
    if not 1e-14 < tol < 1e-3:
        raise ValueError("tol must lie in (1e-14, 1e-3)")
    if sample_times is None:
        sample_times = np.linspace(0.0, t_end, 101)
    sol = solve_ivp(
        lambda t, y: _rhs_vector(y, scheme, fields),
        (0.0, t_end),
        initial.to_vector(),
        method="BDF",
        rtol=tol,
        atol=tol * 1e-2,
        t_eval=np.asarray(sample_times, dtype=float),
    )
    if not sol.success:
        raise StiffnessError(sol.t[-1] if len(sol.t) else 0.0)
    return ObeTrajectory(times=sol.t, states=sol.y.T.copy())


def steady_state_full(scheme: LambdaScheme, fields: DriveFields) -> DensityMatrix3:
    """Steady state of the Bloch system via a linear solve.

    The population-closure row is replaced by the unit-trace constraint.
    """
    if scheme.gamma_3 == 0.0 and scheme.gamma_1 == 0.0:
        raise SteadyStateError("all decay rates vanish; steady state is not unique")

    n = 9
    a = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        a[:, j] = _rhs_vector(e, scheme, fields)
    b = np.zeros(n)
    # replace the rho11 row (index 8) with the trace constraint
    a[8, :] = 0.0
    a[8, 6] = a[8, 7] = a[8, 8] = 1.0
    b[8] = 1.0
    try:
        y = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SteadyStateError(str(exc)) from None
    residual = _rhs_vector(y, scheme, fields)
    if np.max(np.abs(residual[:8])) > 1e-8 * max(scheme.gamma_3, 1.0):
        raise SteadyStateError("linear solve left a nonzero residual")
    return ObeState.from_vector(y).to_density_matrix()


def steady_state_unsaturated(
    populations: Populations,
    scheme: LambdaScheme,
    fields: DriveFields,
) -> complex:
    """Closed-form probe coherence at fixed (caller-supplied) populations.

    Valid when the populations are treated as external parameters; exact in
    the probe Rabi frequency at that level of approximation.
    """
    g3 = scheme.gamma_3
    g1 = scheme.gamma_1
    dp = fields.detuning_probe
    dP = fields.detuning_pump
    d2 = fields.detuning_two_photon
    op = fields.rabi_probe
    oP = fields.rabi_pump
    ep = cmath.exp(-1j * fields.phase_probe)

    gden = g1 + g3 + 1j * dp
    q = 4.0 * (g3 - 1j * dP) * (g1 + 1j * d2) + op**2
    front = -1j * op * ep / (2.0 * gden)
    denom = 1.0 + oP**2 * (g3 - 1j * dP) / (gden * q)
    n1, n2, n3 = populations.n1, populations.n2, populations.n3
    return front / denom * ((n3 - n1) - oP**2 / q * (n3 - n2))


def ground_loss_populations(
    gamma_1: float,
    rabi_pump: float,
    gamma_3: float = 1.0,
    branching_1: float = 0.5,
) -> Populations:
    """Steady populations of a pumped Lambda atom with incoherent ground mixing.

    Models a warm-cell configuration where an incoherent field exchanges
    population between the two ground states at rate 2*gamma_1 in each
    direction while the (resonant) pump cycles |2> -> |3> at the saturation
    rate W = rabi_pump^2 / (2*gamma_3) and the excited state decays back with
    branching fraction `branching_1` into |1>.

    The coherence dephasing accompanying the mixing is gamma_1 itself, so the
    same number feeds both this function and the susceptibility.
    """
    if gamma_1 < 0 or rabi_pump < 0 or gamma_3 <= 0:
        raise ValueError("rates must be non-negative and gamma_3 positive")
    w = rabi_pump**2 / (2.0 * gamma_3)
    gamma_1_decay = branching_1 * 2.0 * gamma_3
    repump = gamma_1_decay * w / (w + 2.0 * gamma_3)
    n2 = 1.0
    n3 = w * n2 / (w + 2.0 * gamma_3)
    if gamma_1 == 0.0:
        # no mixing: everything is optically pumped into |1>
        return Populations(n1=1.0, n2=0.0, n3=0.0)
    n1 = n2 * (1.0 + repump / (2.0 * gamma_1))
    total = n1 + n2 + n3
    return Populations(n1=n1 / total, n2=n2 / total, n3=n3 / total)


@dataclass(frozen=True)
class Susceptibility:
    value: complex
    scaled_density: float
    detuning_probe: float


def chi_probe(
    delta_p,
    populations: Populations,
    scheme: LambdaScheme,
    rabi_pump: float,
    scaled_density: float,
    orientation_factor: float = 1.0,
):
    """First-order probe susceptibility, vectorized over delta_p.

    chi = 3*pi*N_p*Gamma1 * [ (dp - i*g1)(n1-n3) - (i/g3)(OmegaP/2)^2 (n3-n2) ]
          / [ (dp - i*g3)(dp - i*g1) - (OmegaP/2)^2 ]

    with the pump exactly on resonance.  `orientation_factor` multiplies the
    scaled density (dipole-orientation averaging).
    """
    dp = np.asarray(delta_p, dtype=float)
    g3 = scheme.gamma_3
    g1 = scheme.gamma_1
    gamma1 = scheme.gamma_1_decay
    n1, n2, n3 = populations.n1, populations.n2, populations.n3
    half_pump_sq = (0.5 * rabi_pump) ** 2
    den = (dp - 1j * g3) * (dp - 1j * g1) - half_pump_sq
    num = (dp - 1j * g1) * (n1 - n3) - (1j / g3) * half_pump_sq * (n3 - n2)
    pref = 3.0 * math.pi * scaled_density * orientation_factor * gamma1
    chi = pref * num / den
    if np.isscalar(delta_p):
        return complex(chi)
    return chi


def susceptibility(
    populations: Populations,
    scheme: LambdaScheme,
    fields: DriveFields,
    scaled_density: float,
    orientation_factor: float = 1.0,
) -> Susceptibility:
    """Probe susceptibility at the probe detuning carried by `fields`."""
    value = chi_probe(
        fields.detuning_probe,
        populations,
        scheme,
        fields.rabi_pump,
        scaled_density,
        orientation_factor,
    )
    return Susceptibility(
        value=complex(value),
        scaled_density=scaled_density,
        detuning_probe=fields.detuning_probe,
    )
