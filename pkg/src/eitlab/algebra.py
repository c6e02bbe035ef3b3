"""Generalized deformed oscillators on truncated Fock spaces.

A deformation scheme is fixed by its structure function Phi with Phi(0) = 0:
the ladder operators obey a|n> = sqrt(Phi(n))|n-1>, a†|n> = sqrt(Phi(n+1))
|n+1>, so a†a = Phi(N) and the commutator/anticommutator diagonals are
Phi(n+1) -/+ Phi(n).  The slowed-light polariton realizes the linear
deformation Phi(x) = x (1 - 2 eta sin^2 theta): its spectrum compresses as
the mixing angle approaches pi/2 and recovers on release.

Energies are reported in units of the mode quantum (hbar*omega = omega).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class PositivityError(Exception):
    """Structure function negative inside the requested representation."""


class NonInvertibleMapError(Exception):
    """Bosonization undefined: Phi vanishes at an occupied level."""


@dataclass(frozen=True)
class StructureFunction:
    """Named deformation scheme Phi(x) with its parameters."""

    name: str
    fn: Callable[[float], float]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if abs(self.fn(0.0)) > 1e-12:
            raise ValueError(f"{self.name}: Phi(0) must vanish")

    def __call__(self, x: float) -> float:
        return float(self.fn(x))


def harmonic() -> StructureFunction:
    return StructureFunction("harmonic", lambda x: float(x))


def q_deformed(q: float) -> StructureFunction:
    """Symmetric q-oscillator: Phi(x) = (q^x - q^-x)/(q - q^-1)."""
    if q <= 0 or q == 1.0:
        raise ValueError("q must be positive and different from 1")
    den = q - 1.0 / q
    return StructureFunction(
        "q_deformed", lambda x: (q**x - q ** (-x)) / den, {"q": q}
    )


def arik_coon(q: float) -> StructureFunction:
    """Q-oscillator: Phi(x) = (q^x - 1)/(q - 1)."""
    if q <= 0 or q == 1.0:
        raise ValueError("q must be positive and different from 1")
    return StructureFunction("arik_coon", lambda x: (q**x - 1.0) / (q - 1.0), {"q": q})


def parafermionic(p: int) -> StructureFunction:
    """Order-p parafermion: Phi(x) = x (p + 1 - x); truncates at x = p + 1."""
    if not isinstance(p, int) or p < 1:
        raise ValueError("p must be a positive integer")
    return StructureFunction("parafermionic", lambda x: x * (p + 1.0 - x), {"p": p})


def parabosonic(p: int) -> StructureFunction:
    """Order-p paraboson: x cos^2(pi x/2) + (x + p - 1) sin^2(pi x/2)."""
    if not isinstance(p, int) or p < 1:
        raise ValueError("p must be a positive integer")
    return StructureFunction(
        "parabosonic",
        lambda x: x * math.cos(math.pi * x / 2) ** 2
        + (x + p - 1.0) * math.sin(math.pi * x / 2) ** 2,
        {"p": p},
    )


def fermionic() -> StructureFunction:
    """Two-level fermion: Phi(x) = sin^2(pi x / 2)."""
    return StructureFunction("fermionic", lambda x: math.sin(math.pi * x / 2) ** 2)


def parapolariton_structure(eta: float, theta: float) -> StructureFunction:
    """Linear polariton deformation Phi(x) = x (1 - 2 eta sin^2 theta).

    eta must stay below 1/2 so the slope (and hence Phi on the positive
    axis) remains positive.
    """
    if not 0.0 <= eta < 0.5:
        raise PositivityError("eta must lie in [0, 1/2) for a positive Phi")
    if not 0.0 <= theta <= math.pi / 2:
        raise ValueError("theta must lie in [0, pi/2]")
    slope = 1.0 - 2.0 * eta * math.sin(theta) ** 2
    return StructureFunction(
        "parapolariton", lambda x: slope * x, {"eta": eta, "theta": theta, "slope": slope}
    )


REGISTRY = {
    "harmonic": harmonic,
    "q_deformed": q_deformed,
    "arik_coon": arik_coon,
    "parafermionic": parafermionic,
    "parabosonic": parabosonic,
    "fermionic": fermionic,
    "parapolariton": parapolariton_structure,
}


@dataclass(frozen=True)
class OscillatorRep:
    """Truncated Fock-space matrices of a deformed oscillator.

    The top level dim-1 cannot satisfy the ladder identities (its raising
    element is cut off); `faithful_dim` = dim - 1 is the largest block on
    which the algebra holds exactly.
    """

    phi: StructureFunction
    dim: int
    a: np.ndarray
    a_dagger: np.ndarray
    number: np.ndarray

    @property
    def faithful_dim(self) -> int:
        return self.dim - 1


def build_rep(phi: StructureFunction, dim: int) -> OscillatorRep:
    """Matrix representation on the first `dim` Fock levels."""
    if dim < 2:
        raise ValueError("dim must be at least 2")
    values = [phi(k) for k in range(dim + 1)]
    for k, v in enumerate(values[: dim]):
        if v < -1e-12:
            raise PositivityError(f"Phi({k}) = {v:g} is negative")
    a = np.zeros((dim, dim))
    for n in range(1, dim):
        a[n - 1, n] = math.sqrt(max(values[n], 0.0))
    return OscillatorRep(
        phi=phi, dim=dim, a=a, a_dagger=a.T.copy(), number=np.diag(np.arange(dim, dtype=float))
    )


@dataclass(frozen=True)
class CommutatorDiagonals:
    """Diagonals of [a, a†] and {a, a†} below truncation, plus the cut level."""

    commutator: np.ndarray
    anticommutator: np.ndarray
    top_commutator: float
    top_anticommutator: float


def commutators(rep: OscillatorRep) -> CommutatorDiagonals:
    comm = rep.a @ rep.a_dagger - rep.a_dagger @ rep.a
    anti = rep.a @ rep.a_dagger + rep.a_dagger @ rep.a
    dc = np.real(np.diag(comm))
    da = np.real(np.diag(anti))
    return CommutatorDiagonals(
        commutator=dc[:-1].copy(),
        anticommutator=da[:-1].copy(),
        top_commutator=float(dc[-1]),
        top_anticommutator=float(da[-1]),
    )


def energy_spectrum(phi: StructureFunction, omega: float, n_max: int) -> np.ndarray:
    """Level energies E(n) = (omega/2) (Phi(n) + Phi(n+1)), n = 0..n_max."""
    return np.array(
        [0.5 * omega * (phi(n) + phi(n + 1)) for n in range(n_max + 1)]
    )


def bosonization(rep: OscillatorRep) -> tuple[np.ndarray, np.ndarray]:
    """Undeform the ladder: b = a sqrt(N/Phi(N)) with the vacuum element 0.

    Requires Phi > 0 at every occupied level; the result satisfies
    b|n> = sqrt(n)|n-1> and the canonical commutator below truncation.
    """
    for k in range(1, rep.dim):
        if rep.phi(k) <= 1e-12:
            raise NonInvertibleMapError(f"Phi({k}) = {rep.phi(k):g}; cannot rescale")
    b = np.zeros((rep.dim, rep.dim))
    for n in range(1, rep.dim):
        b[n - 1, n] = math.sqrt(n)
    return b, b.T.copy()


@dataclass(frozen=True)
class SpectrumTrace:
    """Polariton level energies along a storage schedule."""

    times: np.ndarray
    energies: np.ndarray  # shape (len(times), n_max + 1)
    spacings: np.ndarray  # shape (len(times), n_max)


def spectrum_compression_trace(
    theta_of_t: Callable[[float], float],
    eta: float,
    omega: float,
    n_max: int,
    t_grid=None,
) -> SpectrumTrace:
    """E(n, t) for the linear polariton deformation along theta(t).

    The ladder stays equidistant at all times; the spacing contracts from
    omega to omega (1 - 2 eta) as theta sweeps 0 -> pi/2 and recovers on the
    way back.
    """
    if t_grid is None:
        t_grid = np.linspace(0.0, 160.0, 321)
    t = np.asarray(t_grid, dtype=float)
    energies = np.empty((t.size, n_max + 1))
    for i, ti in enumerate(t):
        phi = parapolariton_structure(eta, theta_of_t(ti))
        energies[i] = energy_spectrum(phi, omega, n_max)
    return SpectrumTrace(times=t, energies=energies, spacings=np.diff(energies, axis=1))
