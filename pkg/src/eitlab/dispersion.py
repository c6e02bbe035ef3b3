"""Optical response of the medium: index, group velocity, dispersion, slab
transmission, transparency bandwidth, and radiative-rate formulas.

Everything here is unit-agnostic: pass rad/s and meters consistently, or work
in scaled units (gamma_3 = 1, c = 1) by leaving `c_light` at its default.
Detunings follow the red-positive convention delta_p = omega_31 - omega_p, so
frequency derivatives pick up a sign relative to detuning derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as C_SI, epsilon_0, hbar

from .atomcore import DriveFields, LambdaScheme, Populations
from .bloch import chi_probe


class ResolutionError(Exception):
    """Grid too coarse for the requested derivative stencil."""


class EtalonSingularityError(Exception):
    """Slab transmission denominator vanished (perfect etalon resonance)."""


def refractive_index(chi):
    """Real index and extinction coefficient from the susceptibility.

    Returns (eta, kappa) with n = eta + i*kappa the principal square root of
    1 + chi, so that eta^2 - kappa^2 = 1 + Re chi and 2*eta*kappa = Im chi.
    kappa < 0 (gain) occurs exactly when Im chi < 0.
    """
    chi_arr = np.asarray(chi, dtype=complex)
    arg = 1.0 + chi_arr
    if np.any(arg == 0):
        raise ValueError("1 + chi vanishes; refractive index undefined")
    n = np.sqrt(arg)
    # principal branch keeps Re >= 0; on the negative real axis numpy picks
    # +i*|..|, i.e. the kappa >= 0 convention
    if np.isscalar(chi):
        return float(n.real), float(n.imag)
    return n.real, n.imag


@dataclass(frozen=True)
class SlabGeometry:
    """One-dimensional uniform slab of thickness d (normal incidence)."""

    thickness: float

    def __post_init__(self):
        if self.thickness < 0:
            raise ValueError("thickness must be >= 0")


@dataclass(frozen=True)
class OpticalResponse:
    """Susceptibility sampled on a uniform detuning grid, plus the derived
    index, extinction and complex wavevector.

    detuning : ascending uniform grid of probe detunings (red-positive).
    omega_31 : probe transition frequency in the same units.
    """

    detuning: np.ndarray
    chi: np.ndarray
    omega_31: float
    c_light: float = 1.0
    eta: np.ndarray = field(init=False)
    kappa: np.ndarray = field(init=False)
    k: np.ndarray = field(init=False)

    def __post_init__(self):
        grid = np.asarray(self.detuning, dtype=float)
        chi = np.asarray(self.chi, dtype=complex)
        if grid.ndim != 1 or grid.size < 5:
            raise ResolutionError("need a 1-D detuning grid with >= 5 points")
        steps = np.diff(grid)
        if not np.all(steps > 0) or np.ptp(steps) > 1e-9 * steps[0]:
            raise ValueError("detuning grid must be uniform and ascending")
        if chi.shape != grid.shape:
            raise ValueError("chi must be sampled on the detuning grid")
        eta, kappa = refractive_index(chi)
        omega = self.omega_31 - grid
        object.__setattr__(self, "detuning", grid)
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "k", omega * (eta + 1j * kappa) / self.c_light)

    @property
    def step(self) -> float:
        return float(self.detuning[1] - self.detuning[0])

    def index_of(self, omega: float) -> int:
        """Grid index for probe frequency omega, with stencil margin."""
        delta = self.omega_31 - omega
        i = int(round((delta - self.detuning[0]) / self.step))
        if not 2 <= i <= self.detuning.size - 3:
            raise ResolutionError(
                "frequency outside the interior of the detuning grid"
            )
        return i

    def eta_derivatives(self, i: int):
        """(d eta/d omega, d^2 eta/d omega^2) at grid index i (5-point)."""
        if not 2 <= i <= self.detuning.size - 3:
            raise ResolutionError("5-point stencil needs two points of margin")
        h = self.step
        f = self.eta
        d1 = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h)
        d2 = (-f[i - 2] + 16 * f[i - 1] - 30 * f[i] + 16 * f[i + 1] - f[i + 2]) / (
            12 * h * h
        )
        # delta = omega_31 - omega: odd derivatives change sign
        return -d1, d2


def response_from_susceptibility(
    populations: Populations,
    scheme: LambdaScheme,
    fields: DriveFields,
    scaled_density: float,
    omega_31: float,
    span: float = 3.0,
    points: int = 4001,
    orientation_factor: float = 1.0,
    c_light: float = 1.0,
) -> OpticalResponse:
    """Sample the weak-probe susceptibility over [-span, span] (in units of
    gamma_3) and package it as an OpticalResponse."""
    grid = np.linspace(-span * scheme.gamma_3, span * scheme.gamma_3, points)
    chi = chi_probe(
        grid, populations, scheme, fields.rabi_pump, scaled_density,
        orientation_factor,
    )
    return OpticalResponse(detuning=grid, chi=chi, omega_31=omega_31, c_light=c_light)


def group_velocity(response: OpticalResponse, omega: float) -> float:
    """Group velocity c / (eta + omega * d eta/d omega); negative allowed."""
    i = response.index_of(omega)
    d1, _ = response.eta_derivatives(i)
    den = response.eta[i] + omega * d1
    if abs(den) < 1e-12:
        return math.inf if den >= 0 else -math.inf
    return response.c_light / den


def gvd_dg(response: OpticalResponse, omega: float) -> float:
    """Group-velocity dispersion d_g = -(v_g^2/c)(omega*eta'' + 2*eta')."""
    i = response.index_of(omega)
    d1, d2 = response.eta_derivatives(i)
    vg = group_velocity(response, omega)
    if math.isinf(vg):
        return -math.inf
    return -(vg**2 / response.c_light) * (omega * d2 + 2.0 * d1)


def gvd_function(
    response: OpticalResponse, omega: float, gamma_1_decay: float = 1.0
) -> float:
    """Reciprocal-velocity dispersion function D = -Gamma1 * d_g / v_g^2.

    Equivalent to (Gamma1/c)(omega*eta'' + 2*eta'), which stays finite where
    v_g diverges.  `gamma_1_decay` is the rate that normalizes the plot units.
    """
    i = response.index_of(omega)
    d1, d2 = response.eta_derivatives(i)
    return gamma_1_decay / response.c_light * (omega * d2 + 2.0 * d1)


def gvd_zero_crossings(
    response: OpticalResponse, gamma_1_decay: float = 1.0
) -> np.ndarray:
    """Detunings where the dispersion function D changes sign.

    Located by a sign change on the grid refined with linear interpolation.
    """
    idx = np.arange(2, response.detuning.size - 2)
    omegas = response.omega_31 - response.detuning[idx]
    vals = np.array(
        [gvd_function(response, w, gamma_1_decay) for w in omegas]
    )
    out = []
    for j in range(vals.size - 1):
        a, b = vals[j], vals[j + 1]
        if a == 0.0:
            out.append(response.detuning[idx[j]])
        elif a * b < 0:
            x0, x1 = response.detuning[idx[j]], response.detuning[idx[j + 1]]
            out.append(x0 + (x1 - x0) * a / (a - b))
    return np.array(out)


def slab_transmission(n, omega, d: float, c_light: float = 1.0):
    """Complex transmission amplitude of a uniform slab (normal incidence).

    T = 4n e^{i(n-1) omega d/c} / [ (n+1)^2 - (n-1)^2 e^{2 i n omega d/c} ]

    including the multiple-reflection (etalon) denominator exactly.
    """
    if d < 0:
        raise ValueError("slab thickness must be >= 0")
    n_arr = np.asarray(n, dtype=complex)
    phase = np.asarray(omega, dtype=float) * d / c_light
    num = 4.0 * n_arr * np.exp(1j * (n_arr - 1.0) * phase)
    den = (n_arr + 1.0) ** 2 - (n_arr - 1.0) ** 2 * np.exp(2j * n_arr * phase)
    if np.any(np.abs(den) < 1e-300):
        raise EtalonSingularityError("slab transmission denominator vanished")
    t = num / den
    if np.isscalar(n) and np.isscalar(omega):
        return complex(t)
    return t


@dataclass(frozen=True)
class VgExtrema:
    """Closed-form group-velocity extrema for all population in |1>."""

    cvg_min_positive: float        # c/v_g at the line-center positive minimum
    cvg_min_negative: float        # c/v_g at the negative minima
    delta_positive: float          # detuning of the positive minimum (0)
    delta_negative: float          # |detuning| of the negative minima (~2*delta_inf)
    delta_infinity: float          # |detuning| where v_g diverges


def vg_extrema(
    scheme: LambdaScheme, fields: DriveFields, scaled_density: float,
    omega_31: float,
) -> VgExtrema:
    """Analytic extrema of the group velocity for n1 = 1 (weak probe).

    The positive minimum sits at line center; v_g diverges at
    delta_inf = +-(gamma_3 - sqrt(gamma_3^2 + Omega_P^2))/2 and the negative
    minima occur near twice that detuning.
    """
    g3 = scheme.gamma_3
    g1 = scheme.gamma_1
    gamma1 = scheme.gamma_1_decay
    op = fields.rabi_pump
    pref = 3.0 * math.pi * scaled_density * omega_31 * gamma1 / (2.0 * g3**2)
    cvg_pos = 1.0 - pref * (g1**2 - op**2 / 4.0) / (g1 + op**2 / (4.0 * g3)) ** 2
    r = 1.0 - math.sqrt(1.0 + (op / g3) ** 2)
    u = 1.0 - op**2 / (4.0 * r**2 * g3**2)
    cvg_neg = (
        -pref
        * (1.0 + op**2 / (4.0 * r**2 * g3**2))
        * (1.0 - r**2 * u**2)
        / (1.0 + r**2 * u**2) ** 2
    )
    delta_inf = abs(g3 - math.sqrt(g3**2 + op**2)) / 2.0
    return VgExtrema(
        cvg_min_positive=cvg_pos,
        cvg_min_negative=cvg_neg,
        delta_positive=0.0,
        delta_negative=2.0 * delta_inf,
        delta_infinity=delta_inf,
    )


def transparency_bandwidth(
    scheme: LambdaScheme, fields: DriveFields, scaled_density: float,
    omega_31: float, d: float, c_light: float = 1.0,
) -> float:
    """EIT transmission bandwidth Gamma_G of a slab of thickness d.

    Gamma_G ~ 0.06 * (Omega_P^2 / sqrt(gamma_3*Gamma_1)) * sqrt(c/(omega_31*d*N_p)).
    """
    if fields.rabi_pump <= 0:
        raise ValueError("transparency bandwidth requires a pump field")
    op = fields.rabi_pump
    return (
        0.06
        * op**2
        / math.sqrt(scheme.gamma_3 * scheme.gamma_1_decay)
        * math.sqrt(c_light / (omega_31 * d * scaled_density))
    )


def gaussian_transmission(delta_p, gamma_g: float):
    """Small-detuning gaussian approximation exp(-delta_p^2 / 2 Gamma_G^2)
    of the slab transmission intensity."""
    return np.exp(-np.asarray(delta_p, dtype=float) ** 2 / (2.0 * gamma_g**2))


def kk_real_from_imag(detuning: np.ndarray, im_chi: np.ndarray) -> np.ndarray:
    """Reconstruct Re chi from Im chi on a uniform detuning grid.

    Causality fixes Re chi(delta) = (1/pi) PV int Im chi(delta') /
    (delta - delta') d delta' in the red-positive detuning variable.  The
    principal value is taken by trapezoid summation with the singular node
    dropped (its neighborhood cancels by odd symmetry on a uniform grid).
    """
    x = np.asarray(detuning, dtype=float)
    f = np.asarray(im_chi, dtype=float)
    if x.ndim != 1 or x.shape != f.shape:
        raise ValueError("grids must be matching 1-D arrays")
    h = x[1] - x[0]
    out = np.empty_like(f)
    block = max(1, 2_000_000 // max(x.size, 1))
    for start in range(0, x.size, block):
        stop = min(start + block, x.size)
        diff = x[start:stop, None] - x[None, :]
        with np.errstate(divide="ignore"):
            kern = np.where(diff == 0.0, 0.0, 1.0 / diff)
        out[start:stop] = kern @ f
    return out * (h / math.pi)


def einstein_coefficients(omega: float, dipole: float):
    """Spontaneous (A) and stimulated (B) emission coefficients, SI units.

    A = omega^3 |mu|^2 / (3 pi eps0 hbar c^3);  B = A * pi^2 c^3 / (hbar omega^3).
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    a = omega**3 * abs(dipole) ** 2 / (3.0 * math.pi * epsilon_0 * hbar * C_SI**3)
    b = a * math.pi**2 * C_SI**3 / (hbar * omega**3)
    return a, b


def lwi_threshold_power(
    cavity_loss: float,
    omega: float,
    lineshape_width: float = 0.0,
    broadening: str = "natural",
    dipole: float = 0.0,
    reference_omega: float = 0.0,
) -> float:
    """Threshold pump power of an inversionless laser.

    P_th = 2 kappa_cav hbar omega^3 / (pi^2 c^3 g(omega)) with the lineshape
    normalized as g(omega) = 1/Delta_omega.  For `broadening="natural"` the
    width is the spontaneous rate A(omega, dipole), giving P_th ~ omega^6; for
    `broadening="doppler"` the width scales linearly with omega from the value
    `lineshape_width` quoted at `reference_omega` (default: omega itself),
    giving P_th ~ omega^4.
    """
    if cavity_loss <= 0 or omega <= 0:
        raise ValueError("cavity loss and omega must be positive")
    if broadening == "natural":
        if dipole == 0.0:
            raise ValueError("natural broadening needs the transition dipole")
        width, _ = einstein_coefficients(omega, dipole)
    elif broadening == "doppler":
        if lineshape_width <= 0:
            raise ValueError("doppler broadening needs a positive lineshape width")
        ref = reference_omega if reference_omega > 0 else omega
        width = lineshape_width * (omega / ref)
    else:
        raise ValueError("broadening must be 'natural' or 'doppler'")
    g_omega = 1.0 / width
    return 2.0 * cavity_loss * hbar * omega**3 / (math.pi**2 * C_SI**3 * g_omega)
