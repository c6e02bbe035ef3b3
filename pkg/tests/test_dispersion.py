"""Refractive index, group velocity, causality, and slab transmission."""

import math

import numpy as np
import pytest
from scipy.constants import c as C_SI, hbar

from eitlab.atomcore import DriveFields, Populations
from eitlab.dispersion import (
    einstein_coefficients,
    gaussian_transmission,
    group_velocity,
    gvd_function,
    gvd_zero_crossings,
    kk_real_from_imag,
    lwi_threshold_power,
    refractive_index,
    response_from_susceptibility,
    slab_transmission,
    transparency_bandwidth,
    vg_extrema,
)
from eitlab.pulse import N_P_COLD, cold_cloud_preset, internal_scheme


def _cold_response(populations=Populations(1.0, 0.0, 0.0), span=1.0, points=4001):
    preset = cold_cloud_preset(populations=populations)
    return preset, response_from_susceptibility(
        populations, preset.scheme, preset.fields, preset.scaled_density,
        preset.omega_31, span=span, points=points,
    )


def test_refractive_index_limits():
    eta, kappa = refractive_index(np.array([0.0 + 0.0j]))
    assert eta[0] == pytest.approx(1.0)
    assert kappa[0] == pytest.approx(0.0)
    # weak-response expansion: eta = 1 + Re chi / 2, kappa = Im chi / 2
    chi = np.array([1e-6 + 2e-6j])
    eta, kappa = refractive_index(chi)
    assert eta[0] == pytest.approx(1.0 + 0.5e-6, rel=1e-6)
    assert kappa[0] == pytest.approx(1e-6, rel=1e-6)


def test_kramers_kronig_lorentzian_pair():
    # analytic Hilbert pair: Im = 1/(1+d^2)  <->  Re = d/(1+d^2)
    grid = np.linspace(-60.0, 60.0, 12001)
    rec = kk_real_from_imag(grid, 1.0 / (1.0 + grid**2))
    expect = grid / (1.0 + grid**2)
    mask = np.abs(grid) < 5.0
    assert np.max(np.abs(rec[mask] - expect[mask])) < 5e-3


def test_kramers_kronig_on_eit_profile():
    preset = cold_cloud_preset()
    grid = np.linspace(-40.0, 40.0, 40001)
    from eitlab.bloch import chi_probe

    chi = chi_probe(grid, preset.populations, preset.scheme,
                    preset.fields.rabi_pump, preset.scaled_density)
    rec = kk_real_from_imag(grid, chi.imag)
    mask = np.abs(grid) < 3.0
    scale = np.max(np.abs(chi.real))
    assert np.max(np.abs(rec[mask] - chi.real[mask])) < 0.03 * scale


def test_group_velocity_matches_closed_form():
    preset, resp = _cold_response()
    extrema = vg_extrema(preset.scheme, preset.fields, preset.scaled_density,
                         preset.omega_31)
    cvg = 1.0 / group_velocity(resp, preset.omega_31)
    assert cvg == pytest.approx(extrema.cvg_min_positive, rel=1e-4)
    assert extrema.cvg_min_positive > 1.0          # slow light at line center
    assert extrema.cvg_min_negative < 0.0          # negative-velocity window
    assert extrema.delta_positive == pytest.approx(0.0, abs=1e-12)


def test_group_velocity_slows_with_weaker_pump():
    slow = cold_cloud_preset(rabi_pump=0.4)
    fast = cold_cloud_preset(rabi_pump=0.8)
    vals = []
    for preset in (slow, fast):
        resp = response_from_susceptibility(
            preset.populations, preset.scheme, preset.fields,
            preset.scaled_density, preset.omega_31, span=0.5, points=2001,
        )
        vals.append(group_velocity(resp, preset.omega_31))
    assert vals[0] < vals[1]


def test_slab_transmission_vacuum_and_absorption():
    omega = np.array([10.0, 20.0])
    t_vac = slab_transmission(np.ones(2, dtype=complex), omega, 3.0)
    assert np.max(np.abs(t_vac - 1.0)) < 1e-12
    t_abs = slab_transmission(np.full(2, 1.0 + 0.05j), omega, 3.0)
    assert np.all(np.abs(t_abs) < 1.0)


def test_gvd_zero_crossings_bracket_line_center():
    preset, resp = _cold_response(span=1.0)
    crossings = gvd_zero_crossings(resp, preset.scheme.gamma_1_decay)
    assert crossings.size >= 2
    assert np.any(crossings < 0) and np.any(crossings > 0)
    for d in crossings:
        omega = preset.omega_31 - d
        assert abs(gvd_function(resp, omega, preset.scheme.gamma_1_decay)) < 5e-3 * np.max(
            np.abs([gvd_function(resp, preset.omega_31 - x, preset.scheme.gamma_1_decay)
                    for x in (0.05, 0.1)])
        )


def test_transparency_bandwidth_scaling():
    preset = cold_cloud_preset()
    strong = transparency_bandwidth(
        preset.scheme, DriveFields(rabi_pump=0.8), preset.scaled_density,
        preset.omega_31, preset.thickness,
    )
    weak = transparency_bandwidth(
        preset.scheme, DriveFields(rabi_pump=0.4), preset.scaled_density,
        preset.omega_31, preset.thickness,
    )
    assert strong > 0
    assert strong / weak == pytest.approx(4.0, rel=1e-10)


def test_gaussian_lineshape():
    t0 = gaussian_transmission(0.0, 1.0)
    t2 = gaussian_transmission(2.0, 1.0)
    t5 = gaussian_transmission(5.0, 1.0)
    assert t0 == pytest.approx(1.0)
    assert abs(t0) > abs(t2) > abs(t5)


def test_einstein_coefficient_ratio():
    omega, dipole = 2.4e15, 2.5e-29
    a, b = einstein_coefficients(omega, dipole)
    assert a / b == pytest.approx(hbar * omega**3 / (math.pi**2 * C_SI**3), rel=1e-12)


def test_lwi_threshold_broadening_dependence():
    p_nat = lwi_threshold_power(1e6, 2.4e15, dipole=2.5e-29)
    p_dop = lwi_threshold_power(1e6, 2.4e15, lineshape_width=1e9,
                                broadening="doppler", dipole=2.5e-29,
                                reference_omega=2.4e15)
    assert p_nat > 0 and p_dop > 0
    assert p_dop != pytest.approx(p_nat)


def test_response_index_lookup():
    preset, resp = _cold_response(points=801)
    i = resp.index_of(preset.omega_31)
    assert resp.detuning[i] == pytest.approx(0.0, abs=resp.step)
