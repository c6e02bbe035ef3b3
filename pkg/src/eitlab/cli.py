"""Command-line front end: figure presets, CSV/SVG emission, self-test.

Every preset maps to one figure-style computation; outputs are deterministic
(fixed scientific formatting, LF line endings) and each run writes a JSON
manifest recording the resolved parameters and the SHA-256 of every file.

Exit codes: 0 success, 2 validation error, 3 numerical-convergence error,
4 self-test failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .atomcore import DriveFields, Populations, UnitSystem, make_scheme_rb87
from .bloch import (
    SteadyStateError,
    StiffnessError,
    chi_probe,
    ground_loss_populations,
    steady_state_full,
    steady_state_unsaturated,
)
from . import algebra
from .dispersion import (
    ResolutionError,
    group_velocity,
    gvd_function,
    kk_real_from_imag,
    refractive_index,
    response_from_susceptibility,
    slab_transmission,
    vg_extrema,
)
from .memory_fidelity import MemoryErrorModel, decoherence_fidelity, uhlmann_fidelity
from .polariton import (
    GainSetting,
    GridExtensionError,
    PolaritonField,
    commutator_deficit,
    field_from_components,
    gaussian_envelope,
    mixing_angle,
    store_release_experiment,
    tanh_control_schedule,
)
from .pulse import (
    D_HOT_M,
    N_P_HOT,
    QuadratureConvergenceError,
    ScenarioPreset,
    advance_detuning,
    centerline_gain_ratio,
    cold_cloud_preset,
    gain_vs_dephasing,
    hot_cell_preset,
    run_scenario,
    transmitted_power,
)
from .tripod import (
    TripodScheme,
    TwoPolaritonField,
    copropagate,
    rho10_steady,
    tripod_eigenstates,
)


class ValidationError(Exception):
    """Bad preset name or config content; names the offending key."""


CONVERGENCE_ERRORS = (
    QuadratureConvergenceError,
    ResolutionError,
    StiffnessError,
    GridExtensionError,
    SteadyStateError,
)


# ---------------------------------------------------------------------------
# Preset framework
# ---------------------------------------------------------------------------

@dataclass
class PresetOutput:
    name: str
    parameters: dict
    tables: dict                 # table name -> list of (header, ndarray)


def _check_params(name: str, params: dict, allowed: dict) -> dict:
    """Merge user params over defaults, rejecting unknown keys."""
    resolved = dict(allowed)
    for key, value in params.items():
        if key not in allowed:
            raise ValidationError(f"unknown key params.{key} for preset {name}")
        resolved[key] = value
    return resolved


_COLD_POPS = [
    ("n1_100", Populations(1.0, 0.0, 0.0)),
    ("n1_90", Populations(0.9, 0.1, 0.0)),
    ("n1_70", Populations(0.7, 0.3, 0.0)),
]


def _cold_response(populations, rabi_pump, span=3.0, points=2001):
    preset = cold_cloud_preset(populations=populations, rabi_pump=rabi_pump)
    return preset, response_from_susceptibility(
        populations, preset.scheme, preset.fields, preset.scaled_density,
        preset.omega_31, span=span, points=points,
    )


def _chi_from_coherence(rho31, rabi_probe, scaled_density, gamma_1_decay):
    """Susceptibility from the steady probe coherence (weak-probe link)."""
    return 3.0 * math.pi * scaled_density * gamma_1_decay * 2.0 * rho31 / rabi_probe


def preset_fig1_3(params: dict) -> PresetOutput:
    """Susceptibility: full density-matrix treatment vs fixed-population form."""
    p = _check_params("fig1_3", params, {"rabi_pump": 0.8, "rabi_probe": 0.2,
                                         "span": 3.0, "points": 401})
    preset = cold_cloud_preset(rabi_pump=p["rabi_pump"])
    scheme = preset.scheme
    grid = np.linspace(-p["span"], p["span"], int(p["points"]))
    chi_unsat = chi_probe(grid, Populations(1.0, 0.0, 0.0), scheme,
                          p["rabi_pump"], preset.scaled_density)
    chi_full = np.empty_like(chi_unsat)
    for i, d in enumerate(grid):
        fields = DriveFields(rabi_pump=p["rabi_pump"], rabi_probe=p["rabi_probe"],
                             detuning_probe=d)
        rho = steady_state_full(scheme, fields)
        chi_full[i] = _chi_from_coherence(
            rho[2, 0], p["rabi_probe"], preset.scaled_density, scheme.gamma_1_decay
        )
    return PresetOutput("fig1_3", p, {
        "susceptibility": [
            ("detuning[gamma3]", grid),
            ("re_chi_full[1]", chi_full.real),
            ("im_chi_full[1]", chi_full.imag),
            ("re_chi_unsaturated[1]", chi_unsat.real),
            ("im_chi_unsaturated[1]", chi_unsat.imag),
        ]
    })


def _index_tables(rabi_pump, which):
    cols_eta = []
    cols_kappa = []
    grid = None
    for label, pops in _COLD_POPS:
        _, resp = _cold_response(pops, rabi_pump)
        grid = resp.detuning
        cols_eta.append((f"eta_{label}[1]", resp.eta))
        cols_kappa.append((f"kappa_{label}[1]", resp.kappa))
    cols = cols_eta if which == "eta" else cols_kappa
    return [("detuning[gamma3]", grid)] + cols


def preset_fig2_5(params: dict) -> PresetOutput:
    p = _check_params("fig2_5", params, {"rabi_pump": 0.0})
    return PresetOutput("fig2_5", p, {"index": _index_tables(p["rabi_pump"], "eta")})


def preset_fig2_6(params: dict) -> PresetOutput:
    p = _check_params("fig2_6", params, {"rabi_pump": 0.0})
    return PresetOutput("fig2_6", p, {"absorption": _index_tables(p["rabi_pump"], "kappa")})


def preset_fig2_7(params: dict) -> PresetOutput:
    """Absorbing cloud, pump off: the resonant pulse disappears."""
    p = _check_params("fig2_7", params, {"points": 1501, "nodes": 1024})
    cols = []
    x = None
    for label, pops in [("n1_100", Populations(1.0, 0.0, 0.0))] + _COLD_POPS[1:]:
        preset = cold_cloud_preset(populations=pops, rabi_pump=0.0)
        sigma = preset.pulse.sigma
        width = 1.0 / (2.0 * sigma)
        u = np.linspace(-6 * width, 6 * width, int(p["points"]))
        s = transmitted_power(preset, u, 0.0, nodes=int(p["nodes"]))
        if x is None:
            x = preset.units.length_to_si(u)
            vac = transmitted_power(preset, u, 0.0, nodes=int(p["nodes"]), vacuum=True)
            cols.append(("x[m]", x))
            cols.append(("power_vacuum[S0]", vac))
        cols.append((f"power_{label}[S0]", s))
    return PresetOutput("fig2_7", p, {"profiles": cols})


def preset_fig2_8(params: dict) -> PresetOutput:
    p = _check_params("fig2_8", params, {"rabi_pump": 0.8})
    return PresetOutput("fig2_8", p, {"index": _index_tables(p["rabi_pump"], "eta")})


def preset_fig2_9(params: dict) -> PresetOutput:
    p = _check_params("fig2_9", params, {"rabi_pump": 0.8})
    return PresetOutput("fig2_9", p, {"absorption": _index_tables(p["rabi_pump"], "kappa")})


def _velocity_tables(rabi_pump, fn, points=2001):
    from scipy.constants import c as C_SI

    cols = []
    grid_out = None
    for label, pops in _COLD_POPS:
        preset, resp = _cold_response(pops, rabi_pump, points=points)
        grid = resp.detuning[5:-5:4]
        vals = np.array([fn(preset, resp, preset.omega_31 - d) for d in grid])
        if grid_out is None:
            grid_out = grid
            cols.append(("detuning[gamma3]", grid_out))
        cols.append((label, vals / C_SI))
    return cols


def preset_fig2_10(params: dict) -> PresetOutput:
    p = _check_params("fig2_10", params, {"rabi_pump": 0.8})

    def inv_vg(preset, resp, omega):
        vg = group_velocity(resp, omega)
        return 0.0 if math.isinf(vg) else 1.0 / vg

    cols = _velocity_tables(p["rabi_pump"], inv_vg)
    cols = [cols[0]] + [(f"inv_vg_{lab}[s/m]", v) for (lab, v) in cols[1:]]
    return PresetOutput("fig2_10", p, {"reciprocal_velocity": cols})


def preset_fig2_11(params: dict) -> PresetOutput:
    p = _check_params("fig2_11", params, {"rabi_pump": 0.8})

    def disp(preset, resp, omega):
        return gvd_function(resp, omega, preset.scheme.gamma_1_decay)

    cols = _velocity_tables(p["rabi_pump"], disp)
    cols = [cols[0]] + [(f"dispersion_{lab}[s/m]", v) for (lab, v) in cols[1:]]
    return PresetOutput("fig2_11", p, {"dispersion": cols})


def _scenario_profiles(name, cases, points, nodes, carrier=None):
    cols = []
    metrics = {}
    for label, preset in cases:
        result = run_scenario(preset, points=points, nodes=nodes)
        if not cols:
            cols.append(("x[m]", result.profile.x))
            cols.append(("power_vacuum[S0]", result.profile.vacuum))
        cols.append((f"power_{label}[S0]", result.profile.medium))
        metrics[f"delta_x_{label}_m"] = result.delta_x
        metrics[f"peak_ratio_{label}"] = result.peak_ratio
    return cols, metrics


def preset_fig2_12(params: dict) -> PresetOutput:
    p = _check_params("fig2_12", params, {"points": 2001, "nodes": 2048})
    cases = [
        ("n1_100", cold_cloud_preset()),
        ("n1_70", cold_cloud_preset(populations=Populations(0.7, 0.3, 0.0))),
    ]
    cols, metrics = _scenario_profiles("fig2_12", cases, int(p["points"]), int(p["nodes"]))
    gain = centerline_gain_ratio(cases[1][1])
    out = dict(p)
    out.update(metrics)
    out["centerline_gain_ratio_n1_70"] = gain
    return PresetOutput("fig2_12", out, {"profiles": cols})


def _population_sweep(carrier, points, nodes):
    n1_values = np.linspace(0.5, 1.0, 6)
    shifts = np.empty_like(n1_values)
    ratios = np.empty_like(n1_values)
    for i, n1 in enumerate(n1_values):
        preset = cold_cloud_preset(
            populations=Populations(n1, 1.0 - n1, 0.0), carrier_detuning=carrier
        )
        result = run_scenario(preset, points=points, nodes=nodes)
        shifts[i] = result.delta_x
        ratios[i] = result.peak_ratio
    ref = shifts[-1]
    return n1_values, shifts / ref, ratios


def preset_fig2_13(params: dict) -> PresetOutput:
    p = _check_params("fig2_13", params, {"points": 1501, "nodes": 1024})
    n1, shifts, ratios = _population_sweep(0.0, int(p["points"]), int(p["nodes"]))
    return PresetOutput("fig2_13", p, {"sweep": [
        ("population_difference[1]", 2 * n1 - 1),
        ("shift_normalized[1]", shifts),
        ("peak_ratio[1]", ratios),
    ]})


def preset_fig2_14(params: dict) -> PresetOutput:
    p = _check_params("fig2_14", params, {"points": 2001, "nodes": 2048})
    carrier = advance_detuning(cold_cloud_preset())
    cases = [
        ("n1_90", cold_cloud_preset(Populations(0.9, 0.1, 0.0), carrier)),
        ("n1_70", cold_cloud_preset(Populations(0.7, 0.3, 0.0), carrier)),
        ("n2_100", cold_cloud_preset(Populations(0.0, 1.0, 0.0), carrier)),
    ]
    cols, metrics = _scenario_profiles("fig2_14", cases, int(p["points"]), int(p["nodes"]))
    out = dict(p)
    out["carrier_detuning"] = carrier
    out.update(metrics)
    return PresetOutput("fig2_14", out, {"profiles": cols})


def preset_fig2_15(params: dict) -> PresetOutput:
    p = _check_params("fig2_15", params, {"points": 1501, "nodes": 1024})
    carrier = advance_detuning(cold_cloud_preset())
    n1, shifts, ratios = _population_sweep(carrier, int(p["points"]), int(p["nodes"]))
    out = dict(p)
    out["carrier_detuning"] = carrier
    return PresetOutput("fig2_15", out, {"sweep": [
        ("population_difference[1]", 2 * n1 - 1),
        ("shift_normalized[1]", shifts),
        ("peak_ratio[1]", ratios),
    ]})


def preset_fig2_16(params: dict) -> PresetOutput:
    p = _check_params("fig2_16", params, {"points": 2001, "nodes": 2048})
    base = cold_cloud_preset(populations=Populations(0.0, 1.0, 0.0))
    carrier = advance_detuning(base)
    preset = cold_cloud_preset(Populations(0.0, 1.0, 0.0), carrier)
    cols, metrics = _scenario_profiles("fig2_16", [("n2_100", preset)],
                                       int(p["points"]), int(p["nodes"]))
    out = dict(p)
    out["carrier_detuning"] = carrier
    out.update(metrics)
    return PresetOutput("fig2_16", out, {"profiles": cols})


def preset_fig2_20(params: dict) -> PresetOutput:
    p = _check_params("fig2_20", params, {"rabi_pump": 0.8, "points": 201})
    g1 = np.linspace(1e-4, 0.25, int(p["points"]))
    r21 = np.empty_like(g1)
    r31 = np.empty_like(g1)
    for i, g in enumerate(g1):
        pops = ground_loss_populations(g, p["rabi_pump"])
        r21[i] = pops.n2 / pops.n1
        r31[i] = pops.n3 / pops.n1
    return PresetOutput("fig2_20", p, {"ratios": [
        ("gamma_1[gamma3]", g1),
        ("n2_over_n1[1]", r21),
        ("n3_over_n1[1]", r31),
    ]})


def preset_fig2_21(params: dict) -> PresetOutput:
    """Warm cell: gain line shape and probe transmission."""
    p = _check_params("fig2_21", params, {"gamma_1": 0.05, "rabi_pump": 0.8,
                                          "rabi_probe": 0.1, "span": 3.0,
                                          "points": 801})
    pops = ground_loss_populations(p["gamma_1"], p["rabi_pump"])
    preset = hot_cell_preset(gamma_1=p["gamma_1"], rabi_pump=p["rabi_pump"])
    scheme = preset.scheme
    grid = np.linspace(-p["span"], p["span"], int(p["points"]))
    chi_formula = chi_probe(grid, pops, scheme, p["rabi_pump"], N_P_HOT)
    chi_full = np.empty_like(chi_formula)
    for i, d in enumerate(grid):
        fields = DriveFields(rabi_pump=p["rabi_pump"], rabi_probe=p["rabi_probe"],
                             detuning_probe=d)
        rho = steady_state_full(scheme, fields)
        chi_full[i] = _chi_from_coherence(rho[2, 0], p["rabi_probe"], N_P_HOT,
                                          scheme.gamma_1_decay)
    d_int = preset.thickness
    trans = {}
    for label, pp in (("n1_100", Populations(1.0, 0.0, 0.0)), ("pumped", pops)):
        chi = chi_probe(grid, pp, scheme, p["rabi_pump"], N_P_HOT)
        eta, kappa = refractive_index(chi)
        t = slab_transmission(eta + 1j * kappa, preset.omega_31 - grid, d_int)
        trans[label] = np.abs(t) ** 2
    out = dict(p)
    out["populations"] = [pops.n1, pops.n2, pops.n3]
    return PresetOutput("fig2_21", out, {
        "susceptibility": [
            ("detuning[gamma3]", grid),
            ("im_chi_full[1]", chi_full.imag),
            ("im_chi_formula[1]", chi_formula.imag),
        ],
        "transmission": [
            ("detuning[gamma3]", grid),
            ("transmission_n1_100[1]", trans["n1_100"]),
            ("transmission_pumped[1]", trans["pumped"]),
        ],
    })


def preset_fig2_22(params: dict) -> PresetOutput:
    p = _check_params("fig2_22", params, {"rabi_pump": 0.8, "points": 6})
    curve = gain_vs_dephasing(np.linspace(0.0, 0.25, int(p["points"])),
                              rabi_pump=p["rabi_pump"])
    return PresetOutput("fig2_22", p, {"gain": [
        ("gamma_1[gamma3]", curve.gamma_1),
        ("gain[percent]", curve.gain_percent),
    ]})


def preset_fig2_23(params: dict) -> PresetOutput:
    p = _check_params("fig2_23", params, {"gamma_1": 0.05, "rabi_pump": 0.8,
                                          "points": 1201})
    from scipy.constants import c as C_SI

    cases = [
        ("n1_100", 0.0, Populations(1.0, 0.0, 0.0)),
        ("pumped", p["gamma_1"], ground_loss_populations(p["gamma_1"], p["rabi_pump"])),
    ]
    cols = []
    for label, g1, pops in cases:
        preset = hot_cell_preset(gamma_1=g1, rabi_pump=p["rabi_pump"],
                                 populations=pops)
        resp = response_from_susceptibility(
            pops, preset.scheme, preset.fields, N_P_HOT, preset.omega_31,
            span=1.5, points=int(p["points"]),
        )
        grid = resp.detuning[5:-5:2]
        inv = np.empty_like(grid)
        disp = np.empty_like(grid)
        for i, d in enumerate(grid):
            omega = preset.omega_31 - d
            vg = group_velocity(resp, omega)
            inv[i] = 0.0 if math.isinf(vg) else 1.0 / vg / C_SI
            disp[i] = gvd_function(resp, omega, preset.scheme.gamma_1_decay) / C_SI
        if not cols:
            cols.append(("detuning[gamma3]", grid))
        cols.append((f"inv_vg_{label}[s/m]", inv))
        cols.append((f"dispersion_{label}[s/m]", disp))
    return PresetOutput("fig2_23", p, {"velocity": cols})


def preset_fig2_24(params: dict) -> PresetOutput:
    """Warm-cell pulse propagation: retarded (resonant) and advanced."""
    p = _check_params("fig2_24", params, {"gamma_1": 0.0158, "points": 2001,
                                          "nodes": 2048, "rabi_pump_advance": 0.42})
    pops = ground_loss_populations(p["gamma_1"], 0.8)
    delay_cases = [
        ("n1_100", hot_cell_preset()),
        ("pumped", hot_cell_preset(gamma_1=p["gamma_1"], populations=pops)),
    ]
    cols_d, metrics_d = _scenario_profiles("fig2_24", delay_cases,
                                           int(p["points"]), int(p["nodes"]))
    opa = p["rabi_pump_advance"]
    pops_a = ground_loss_populations(p["gamma_1"], opa)
    adv_cases = []
    for label, g1, pp in (("n1_100", 0.0, Populations(1.0, 0.0, 0.0)),
                          ("pumped", p["gamma_1"], pops_a)):
        base = hot_cell_preset(gamma_1=g1, rabi_pump=opa, populations=pp)
        carrier = advance_detuning(base)
        adv_cases.append((label, hot_cell_preset(
            gamma_1=g1, rabi_pump=opa, populations=pp, carrier_detuning=carrier)))
    cols_a, metrics_a = _scenario_profiles("fig2_24", adv_cases,
                                           int(p["points"]), int(p["nodes"]))
    out = dict(p)
    out.update({f"delay_{k}": v for k, v in metrics_d.items()})
    out.update({f"advance_{k}": v for k, v in metrics_a.items()})
    return PresetOutput("fig2_24", out, {"delay": cols_d, "advance": cols_a})


def preset_fig2_25(params: dict) -> PresetOutput:
    p = _check_params("fig2_25", params, {"points": 6, "rabi_pump_advance": 0.42})
    g1s = np.linspace(0.0, 0.25, int(p["points"]))
    curve = gain_vs_dephasing(g1s)
    advances = np.empty_like(g1s)
    opa = p["rabi_pump_advance"]
    for i, g1 in enumerate(g1s):
        pops = ground_loss_populations(g1, opa)
        preset = hot_cell_preset(gamma_1=g1, rabi_pump=opa, populations=pops)
        carrier = advance_detuning(preset)
        resp = response_from_susceptibility(
            pops, preset.scheme, preset.fields, N_P_HOT, preset.omega_31,
            span=1.0, points=2001,
        )
        cvg = 1.0 / group_velocity(resp, preset.omega_31 - carrier)
        advances[i] = (1.0 - cvg) * D_HOT_M
    return PresetOutput("fig2_25", p, {"shifts": [
        ("gamma_1[gamma3]", g1s),
        ("delay[m]", -curve.delay_m),
        ("advance[m]", advances),
    ]})


def _storage_tables(run, prefix=""):
    tables = {}
    for t, fld in run.snapshots:
        tables[f"{prefix}snapshot_t{int(round(t))}"] = [
            ("x[c/gamma3]", fld.x),
            ("e_field_abs[1]", np.abs(fld.e_field)),
            ("spin_abs[1]", np.abs(fld.spin)),
            ("polariton_abs[1]", np.abs(fld.psi)),
        ]
    return tables


def preset_fig3_5(params: dict) -> PresetOutput:
    """Control schedule and storage snapshots of a single polariton."""
    p = _check_params("fig3_5", params, {"coupling": 1e-2, "amplitude": 0.8})
    sched = tanh_control_schedule(coupling=p["coupling"], amplitude=p["amplitude"])
    t = np.linspace(0.0, 160.0, 641)
    cot = np.array([sched.control(ti) / math.sqrt(p["coupling"]) for ti in t])
    theta = np.array([mixing_angle(sched, ti) for ti in t])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        run = store_release_experiment(sched)
    out = dict(p)
    out["shape_fidelity"] = run.shape_fidelity
    out["displacement"] = run.displacement
    tables = {"schedule": [
        ("t[1/gamma3]", t),
        ("cot_theta[1]", cot),
        ("theta[rad]", theta),
        ("velocity[c]", np.cos(theta) ** 2),
    ]}
    tables.update(_storage_tables(run))
    return PresetOutput("fig3_5", out, tables)


def preset_fig3_6(params: dict) -> PresetOutput:
    """Storage/release snapshots in the weak-coupling regime."""
    p = _check_params("fig3_6", params, {"coupling": 1e-4})
    sched = tanh_control_schedule(coupling=p["coupling"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        run = store_release_experiment(sched)
    out = dict(p)
    out["shape_fidelity"] = run.shape_fidelity
    out["stored_peak"] = run.stored_peak
    out["norm_ratio"] = run.norm_ratio
    return PresetOutput("fig3_6", out, _storage_tables(run))


def preset_fig3_7(params: dict) -> PresetOutput:
    """Released-peak intensity vs ground dephasing with inversionless gain."""
    p = _check_params("fig3_7", params, {"coupling": 1e-2})
    sched = tanh_control_schedule(coupling=p["coupling"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ideal = store_release_experiment(sched)
        g1s = np.concatenate(([0.0], np.logspace(-5, 0, 21)))
        peaks = np.empty_like(g1s)
        for i, g1 in enumerate(g1s):
            gain = GainSetting(gamma_1=g1, eta_rule="steady_state")
            run = store_release_experiment(sched, gain=gain)
            peaks[i] = run.released_peak
    return PresetOutput("fig3_7", p, {"gain_sweep": [
        ("gamma_1[gamma3]", g1s),
        ("released_peak[1]", peaks),
        ("released_over_ideal[1]", peaks / ideal.released_peak),
    ]})


def preset_fig4_1(params: dict) -> PresetOutput:
    """Compression of the polariton energy ladder during storage."""
    p = _check_params("fig4_1", params, {"eta": 0.25, "coupling": 1e-2,
                                         "n_max": 10, "omega": 1.0})
    sched = tanh_control_schedule(coupling=p["coupling"])
    trace = algebra.spectrum_compression_trace(
        lambda t: mixing_angle(sched, t), p["eta"], p["omega"], int(p["n_max"])
    )
    n = np.arange(int(p["n_max"]) + 1, dtype=float)
    tables = {"spacing": [
        ("t[1/gamma3]", trace.times),
        ("level_spacing[hbar_omega]", trace.spacings[:, 0]),
    ]}
    for t_slice in (0.0, 70.0, 160.0):
        i = int(np.argmin(np.abs(trace.times - t_slice)))
        tables[f"levels_t{int(t_slice)}"] = [
            ("n[1]", n),
            ("energy[hbar_omega]", trace.energies[i]),
        ]
    return PresetOutput("fig4_1", p, tables)


def preset_fig5_2(params: dict) -> PresetOutput:
    """Tripod probe coherence: double resonance vs detuning mismatch."""
    p = _check_params("fig5_2", params, {"rabi_pump": 1.0, "rabi_probe": 0.1,
                                         "rabi_trigger": 0.1, "mismatch": 0.3,
                                         "span": 2.0, "points": 1001})
    grid = np.linspace(-p["span"], p["span"], int(p["points"]))
    tables = {}
    for label, d3 in (("resonant", 0.0), ("mismatch", p["mismatch"])):
        vals = np.empty(grid.size, dtype=complex)
        for i, d1 in enumerate(grid):
            scheme = TripodScheme(
                rabi_pump=p["rabi_pump"], rabi_probe=p["rabi_probe"],
                rabi_trigger=p["rabi_trigger"], delta_1=d1, delta_3=d3,
                gamma_10=0.5, gamma_20=0.5, gamma_30=0.5,
                gamma_12=1e-3, gamma_13=1e-3, gamma_23=1e-3,
            )
            vals[i] = rho10_steady(scheme)
        tables[label] = [
            ("detuning_probe[gamma]", grid),
            ("re_rho10[1/rabi_probe]", vals.real),
            ("im_rho10[1/rabi_probe]", vals.imag),
        ]
    return PresetOutput("fig5_2", p, tables)


def preset_fig5_3(params: dict) -> PresetOutput:
    """Two dark-state polaritons stored and released together."""
    p = _check_params("fig5_3", params, {"coupling": 1e-2, "offset": -15.0})
    sched = tanh_control_schedule(coupling=p["coupling"])
    x = np.linspace(-64.0, 128.0, 3072)
    th0 = mixing_angle(sched, 0.0)
    probe = PolaritonField(x=x, psi=gaussian_envelope(10.0, 0.0)(x).astype(complex),
                           theta=th0)
    trigger = PolaritonField(x=x, psi=gaussian_envelope(10.0, p["offset"])(x).astype(complex),
                             theta=th0)
    fields = TwoPolaritonField(probe=probe, trigger=trigger)
    tables = {}
    current = fields
    t_prev = 0.0
    for t in (0.0, 70.0, 160.0):
        if t > t_prev:
            current = copropagate(current, sched, t_prev, t)
            t_prev = t
        tables[f"snapshot_t{int(t)}"] = [
            ("x[c/gamma3]", x),
            ("e_probe_abs[1]", np.abs(current.probe.e_field)),
            ("e_trigger_abs[1]", np.abs(current.trigger.e_field)),
        ]
    return PresetOutput("fig5_3", p, tables)


PRESETS = {
    "fig1_3": preset_fig1_3,
    "fig2_5": preset_fig2_5,
    "fig2_6": preset_fig2_6,
    "fig2_7": preset_fig2_7,
    "fig2_8": preset_fig2_8,
    "fig2_9": preset_fig2_9,
    "fig2_10": preset_fig2_10,
    "fig2_11": preset_fig2_11,
    "fig2_12": preset_fig2_12,
    "fig2_13": preset_fig2_13,
    "fig2_14": preset_fig2_14,
    "fig2_15": preset_fig2_15,
    "fig2_16": preset_fig2_16,
    "fig2_20": preset_fig2_20,
    "fig2_21": preset_fig2_21,
    "fig2_22": preset_fig2_22,
    "fig2_23": preset_fig2_23,
    "fig2_24": preset_fig2_24,
    "fig2_25": preset_fig2_25,
    "fig3_5": preset_fig3_5,
    "fig3_6": preset_fig3_6,
    "fig3_7": preset_fig3_7,
    "fig4_1": preset_fig4_1,
    "fig5_2": preset_fig5_2,
    "fig5_3": preset_fig5_3,
}


# ---------------------------------------------------------------------------
# Output emission
# ---------------------------------------------------------------------------

def format_value(v: float) -> str:
    """Deterministic scientific notation with 17 significant digits."""
    return f"{float(v):.16e}"


def write_csv(path: str, columns) -> None:
    headers = [h for h, _ in columns]
    arrays = [np.asarray(a, dtype=float) for _, a in columns]
    n = arrays[0].size
    for h, a in zip(headers, arrays):
        if a.size != n:
            raise ValidationError(f"column {h} length mismatch")
    lines = [",".join(headers)]
    for i in range(n):
        lines.append(",".join(format_value(a[i]) for a in arrays))
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("ascii"))


_SVG_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
               "#8c564b", "#e377c2", "#7f7f7f"]


def render_svg(title: str, columns) -> str:
    """Self-contained SVG line plot of every column against the first."""
    width, height = 720, 480
    ml, mr, mt, mb = 70, 20, 30, 50
    pw, ph = width - ml - mr, height - mt - mb
    x = np.asarray(columns[0][1], dtype=float)
    ys = [(h, np.asarray(a, dtype=float)) for h, a in columns[1:]]
    x0, x1 = float(np.min(x)), float(np.max(x))
    ally = np.concatenate([a for _, a in ys])
    ally = ally[np.isfinite(ally)]
    y0, y1 = float(np.min(ally)), float(np.max(ally))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return mt + ph - (v - y0) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        'stroke="black" stroke-width="1"/>',
        f'<text x="{width/2:.1f}" y="{mt-10:.1f}" text-anchor="middle" '
        f'font-family="monospace" font-size="13">{title}</text>',
        f'<text x="{width/2:.1f}" y="{height-12:.1f}" text-anchor="middle" '
        f'font-family="monospace" font-size="12">{columns[0][0]}</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv = x0 + frac * (x1 - x0)
        yv = y0 + frac * (y1 - y0)
        parts.append(
            f'<text x="{sx(xv):.1f}" y="{mt+ph+18:.1f}" text-anchor="middle" '
            f'font-family="monospace" font-size="10">{xv:.4g}</text>'
        )
        parts.append(
            f'<text x="{ml-6:.1f}" y="{sy(yv)+4:.1f}" text-anchor="end" '
            f'font-family="monospace" font-size="10">{yv:.4g}</text>'
        )
    for i, (label, a) in enumerate(ys):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        good = np.isfinite(a)
        pts = " ".join(
            f"{sx(xv):.2f},{sy(yv):.2f}" for xv, yv in zip(x[good], a[good])
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>'
        )
        ly = mt + 16 + 14 * i
        parts.append(
            f'<line x1="{ml+pw-150}" y1="{ly-4}" x2="{ml+pw-130}" y2="{ly-4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{ml+pw-125}" y="{ly}" font-family="monospace" '
            f'font-size="10">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _json_safe(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_json_safe(x) for x in v]
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    return v


def emit(output: PresetOutput, out_dir: str, fmt: str) -> list:
    os.makedirs(out_dir, exist_ok=True)
    files = []
    for table, columns in sorted(output.tables.items()):
        base = f"{output.name}_{table}"
        if fmt in ("csv", "both"):
            path = os.path.join(out_dir, base + ".csv")
            write_csv(path, columns)
            files.append(path)
        if fmt in ("svg", "both"):
            path = os.path.join(out_dir, base + ".svg")
            svg = render_svg(base, columns)
            with open(path, "wb") as fh:
                fh.write(svg.encode("ascii"))
            files.append(path)
    manifest = {
        "preset": output.name,
        "version": __version__,
        "parameters": _json_safe(output.parameters),
        "outputs": {os.path.basename(f): _sha256(f) for f in files},
    }
    mpath = os.path.join(out_dir, f"{output.name}_manifest.json")
    with open(mpath, "wb") as fh:
        fh.write((json.dumps(manifest, sort_keys=True, indent=2) + "\n").encode("ascii"))
    files.append(mpath)
    return files


# ---------------------------------------------------------------------------
# Self-test
# ---------------------------------------------------------------------------

def _selftest_checks():
    checks = []

    def check(name, tol, value):
        checks.append((name, tol, value))

    scheme = make_scheme_rb87()
    from .pulse import internal_scheme

    ischeme = internal_scheme(1e-4)
    fields = DriveFields(rabi_pump=0.8, rabi_probe=0.1)
    rho = steady_state_full(ischeme, fields)
    from .bloch import _rhs_vector, ObeState

    state = ObeState(
        rho31=rho[2, 0], rho32=rho[2, 1], rho21=rho[1, 0],
        rho33=rho[2, 2].real, rho22=rho[1, 1].real, rho11=rho[0, 0].real,
    )
    check("steady-state residual", 1e-8,
          float(np.max(np.abs(_rhs_vector(state.to_vector(), ischeme, fields)[:8]))))

    perfect = internal_scheme(0.0)
    chi0 = chi_probe(0.0, Populations(1.0, 0.0, 0.0), perfect, 0.8, 2.9e-3)
    check("resonant transparency (gamma_1 = 0)", 1e-12, abs(chi0))

    grid = np.linspace(-40.0, 40.0, 8001)
    lor_im = 1.0 / (1.0 + grid**2)
    lor_re = grid / (1.0 + grid**2)
    rec = kk_real_from_imag(grid, lor_im)
    mask = np.abs(grid) < 5
    check("Kramers-Kronig reconstruction", 3e-2,
          float(np.max(np.abs(rec[mask] - lor_re[mask]))))

    cold = cold_cloud_preset()
    resp = response_from_susceptibility(
        cold.populations, cold.scheme, cold.fields, cold.scaled_density,
        cold.omega_31, span=1.0, points=4001,
    )
    extrema = vg_extrema(cold.scheme, cold.fields, cold.scaled_density, cold.omega_31)
    cvg_numeric = 1.0 / group_velocity(resp, cold.omega_31)
    check("closed-form group velocity", 1e-2,
          abs(cvg_numeric / extrema.cvg_min_positive - 1.0))

    x = np.linspace(-10, 10, 256)
    psi = np.exp(-(x / 3) ** 2) * np.exp(0.25j * x)
    f = PolaritonField(x=x, psi=psi, theta=0.7, delta_k=0.1)
    g = field_from_components(x, f.e_field, f.spin, 0.7, 0.1)
    check("polariton round trip", 1e-12, float(np.max(np.abs(g.psi - psi))))

    rep = algebra.build_rep(algebra.harmonic(), 6)
    comm = algebra.commutators(rep)
    check("boson commutator", 1e-12, float(np.max(np.abs(comm.commutator - 1.0))))

    check("uhlmann diagonal example", 1e-12,
          abs(uhlmann_fidelity(np.diag([0.5, 0.5]), np.diag([0.25, 0.75]))
              - (math.sqrt(0.125) + math.sqrt(0.375)) ** 2))

    check("atom-loss fidelity", 1e-12,
          abs(decoherence_fidelity(
              MemoryErrorModel(kind="atom_loss", n_atoms=100, fock_n=5)) - 0.95))

    e1, e2, ep, em, en = tripod_eigenstates(1.0, 0.3, 0.4)
    basis = np.array([e1, e2, ep, em])
    check("tripod eigenbasis completeness", 1e-12,
          float(np.max(np.abs(basis @ basis.conj().T - np.eye(4)))))

    t = TripodScheme(rabi_pump=1.0, rabi_probe=0.05, rabi_trigger=0.05,
                     gamma_10=0.5, gamma_20=0.5, gamma_30=0.5,
                     gamma_12=1e-4, gamma_13=1e-4, gamma_23=1e-4)
    check("tripod double-EIT suppression", 1e-3, abs(rho10_steady(t)))

    hot = hot_cell_preset()
    resp_h = response_from_susceptibility(
        hot.populations, hot.scheme, hot.fields, N_P_HOT, hot.omega_31,
        span=1.0, points=4001,
    )
    cvg = 1.0 / group_velocity(resp_h, hot.omega_31)
    delay = (cvg - 1.0) * D_HOT_M
    check("warm-cell line-center delay", 0.15, abs(delay / 18.9 - 1.0))

    gain = centerline_gain_ratio(
        cold_cloud_preset(populations=Populations(0.7, 0.3, 0.0)))
    check("cold-cloud centerline gain ratio", 0.03, abs(gain - 0.28))

    return checks


def selftest(stream=sys.stdout) -> int:
    start = time.time()
    failures = 0
    rows = []
    for name, tol, value in _selftest_checks():
        ok = value <= tol
        failures += 0 if ok else 1
        rows.append((name, tol, value, "pass" if ok else "FAIL"))
    width = max(len(r[0]) for r in rows)
    stream.write(f"{'check'.ljust(width)}  tolerance   value       result\n")
    for name, tol, value, verdict in rows:
        stream.write(f"{name.ljust(width)}  {tol:<10.3g}  {value:<10.3g}  {verdict}\n")
    stream.write(f"{len(rows)} checks, {failures} failed, {time.time()-start:.1f} s\n")
    return failures


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def load_config(path: str) -> dict:
    import tomli

    try:
        with open(path, "rb") as fh:
            cfg = tomli.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config: {exc}") from None
    except tomli.TOMLDecodeError as exc:
        raise ValidationError(f"invalid TOML: {exc}") from None
    allowed = {"preset", "presets", "out", "format", "jobs", "params", "sweep"}
    for key in cfg:
        if key not in allowed:
            raise ValidationError(f"unknown config key: {key}")
    return cfg


def _resolve_presets(names) -> list:
    out = []
    for name in names:
        if name not in PRESETS:
            raise ValidationError(f"unknown preset: {name}")
        out.append(name)
    return out


def run_presets(names, out_dir, fmt, jobs, params) -> list:
    def one(name):
        output = PRESETS[name](dict(params))
        return emit(output, out_dir, fmt)

    files = []
    if jobs > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for result in pool.map(one, names):
                files.extend(result)
    else:
        for name in names:
            files.extend(one(name))
    return files


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="eitlab",
        description="Slow-light and quantum-memory figure presets",
    )
    parser.add_argument("--preset", help="preset name (comma-separated for several)")
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--out", help="output directory (default: EITLAB_OUT or .)")
    parser.add_argument("--format", choices=["csv", "svg", "both"], default=None)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--list-presets", action="store_true")
    parser.add_argument("--selftest", action="store_true")
    args = parser.parse_args(argv)

    if args.list_presets:
        for name in sorted(PRESETS):
            print(name)
        return 0
    if args.selftest:
        return 4 if selftest() else 0

    try:
        names = []
        params = {}
        out_dir = args.out or os.environ.get("EITLAB_OUT") or "."
        fmt = args.format
        jobs = args.jobs
        if args.config:
            cfg = load_config(args.config)
            if "presets" in cfg:
                names.extend(cfg["presets"])
            elif "preset" in cfg:
                names.append(cfg["preset"])
            params = cfg.get("params", {})
            if not isinstance(params, dict):
                raise ValidationError("params must be a table")
            sweep = cfg.get("sweep", {})
            if sweep:
                for key in sweep:
                    raise ValidationError(f"unsupported sweep key: sweep.{key}")
            if args.out is None and "out" in cfg:
                out_dir = cfg["out"]
            if fmt is None and "format" in cfg:
                fmt = cfg["format"]
            if "jobs" in cfg and args.jobs == 1:
                jobs = int(cfg["jobs"])
        if args.preset:
            names.extend(args.preset.split(","))
        if not names:
            parser.error("nothing to do: pass --preset, --config or --selftest")
        fmt = fmt or "csv"
        if fmt not in ("csv", "svg", "both"):
            raise ValidationError(f"unknown format: {fmt}")
        names = _resolve_presets(names)
        files = run_presets(names, out_dir, fmt, jobs, params)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CONVERGENCE_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
