"""End-to-end acceptance checks.

Each test covers one headline result at its stated tolerance and prints a
single pass/fail line (visible with `pytest -s` or in captured output).
"""

import itertools
import math
import warnings

import numpy as np
import pytest

from eitlab import algebra
from eitlab.atomcore import DriveFields, Populations
from eitlab.bloch import (
    ObeState,
    chi_probe,
    ground_loss_populations,
    integrate_obe,
    steady_state_full,
)
from eitlab.dispersion import kk_real_from_imag
from eitlab.memory_fidelity import (
    MemoryErrorModel,
    classical_fidelity,
    decoherence_fidelity,
    uhlmann_fidelity,
)
from eitlab.polariton import (
    GainSetting,
    PolaritonField,
    cos2_theta,
    gaussian_envelope,
    mixing_angle,
    store_release_experiment,
    tanh_control_schedule,
)
from eitlab.pulse import (
    N_P_HOT,
    advance_detuning,
    centerline_gain_ratio,
    centerline_transmission,
    cold_cloud_preset,
    gain_vs_dephasing,
    hot_cell_preset,
    internal_scheme,
    run_scenario,
)
from eitlab.tripod import (
    TwoPolaritonField,
    copropagate,
    interaction_matrix,
    tripod_eigenstates,
)


def _report(num, ok, detail):
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def _within(value, target, rel):
    return abs(value - target) <= rel * abs(target)


def test_criterion_01_ideal_eit_null():
    chi = chi_probe(0.0, Populations(1.0, 0.0, 0.0), internal_scheme(0.0),
                    0.8, 2.9e-3)
    trans = centerline_transmission(cold_cloud_preset(gamma_1=0.0))
    ok = abs(chi.imag) < 1e-12 and abs(trans - 1.0) < 1e-10
    _report(1, ok, f"Im chi(0) = {chi.imag:.2e}, G_T(0) - 1 = {trans - 1.0:.2e}")


def test_criterion_02_gain_without_inversion():
    preset = cold_cloud_preset(populations=Populations(0.7, 0.3, 0.0))
    gain = 100.0 * centerline_gain_ratio(preset)
    result = run_scenario(preset, points=2001, nodes=2048)
    amp = 100.0 * (result.peak_ratio - 1.0)
    ok = (abs(gain - 28.0) <= 3.0
          and abs(amp - 90.0) <= 10.0
          and _within(result.delta_x, -55.0, 0.15))
    _report(2, ok, f"gain {gain:.1f}% (28±3), amplification {amp:.1f}% (90±10), "
                   f"dx {result.delta_x:.1f} m (-55±15%)")


def test_criterion_03_cold_cloud_advance():
    carrier = advance_detuning(cold_cloud_preset())
    targets = [(Populations(0.9, 0.1, 0.0), 19.8),
               (Populations(0.7, 0.3, 0.0), 17.5),
               (Populations(0.0, 1.0, 0.0), 10.6)]
    values = []
    ok = True
    for pops, target in targets:
        result = run_scenario(cold_cloud_preset(pops, carrier),
                              points=2001, nodes=2048)
        values.append(result.delta_x)
        ok = ok and _within(result.delta_x, target, 0.15)
    inverted = cold_cloud_preset(populations=Populations(0.0, 1.0, 0.0))
    own_min = advance_detuning(inverted)
    result = run_scenario(cold_cloud_preset(Populations(0.0, 1.0, 0.0), own_min),
                          points=2001, nodes=2048)
    ok = (ok and _within(result.delta_x, 9.4, 0.15)
          and abs(result.peak_ratio - 1.19) <= 0.05)
    _report(3, ok, "advances " + "/".join(f"{v:+.1f}" for v in values)
            + f" m (19.8/17.5/10.6±15%), inverted {result.delta_x:+.1f} m (9.4±15%)"
            + f" ratio {result.peak_ratio:.2f} (1.19±0.05)")


def test_criterion_04_hot_cell_delay():
    cold_pop = run_scenario(hot_cell_preset(), points=2001, nodes=2048)
    delay_1 = -cold_pop.delta_x
    pops = ground_loss_populations(0.05, 0.8)
    pumped = run_scenario(hot_cell_preset(gamma_1=0.05, populations=pops),
                          points=2001, nodes=2048)
    delay_2 = -pumped.delta_x
    ok = _within(delay_1, 18.9, 0.15) and _within(delay_2, 12.2, 0.15)
    _report(4, ok, f"delays {delay_1:.1f} m (18.9±15%) and {delay_2:.1f} m "
                   f"(12.2±15%, gamma_1 = 0.05)")


def test_criterion_05_hot_cell_advance():
    rabi = 0.42
    base = hot_cell_preset(rabi_pump=rabi)
    adv_1 = run_scenario(
        hot_cell_preset(rabi_pump=rabi, carrier_detuning=advance_detuning(base)),
        points=2001, nodes=2048,
    ).delta_x
    g1 = 0.0158
    pops = ground_loss_populations(g1, rabi)
    pumped = hot_cell_preset(gamma_1=g1, rabi_pump=rabi, populations=pops)
    adv_2 = run_scenario(
        hot_cell_preset(gamma_1=g1, rabi_pump=rabi, populations=pops,
                        carrier_detuning=advance_detuning(pumped)),
        points=2001, nodes=2048,
    ).delta_x
    ok = _within(adv_1, 13.3, 0.15) and _within(adv_2, 8.6, 0.15)
    _report(5, ok, f"advances {adv_1:+.1f} m (13.3±15%) and {adv_2:+.1f} m "
                   f"(8.6±15%, n2 = {pops.n2:.2f})")


def test_criterion_06_gain_curve_shape():
    curve = gain_vs_dephasing()
    g = curve.gain_percent
    peak = int(np.argmax(g))
    ok = (abs(g[0]) < 0.5 and 0 < peak < g.size - 1 and g[-1] <= 0.0)
    _report(6, ok, f"gain(0) = {g[0]:.2f}%, max {g[peak]:.1f}% at gamma_1 = "
                   f"{curve.gamma_1[peak]:.2f}, gain(0.25) = {g[-1]:.1f}%")


def test_criterion_07_polariton_storage():
    sched = tanh_control_schedule(coupling=1e-4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        run = store_release_experiment(sched)
    ok = (run.shape_fidelity >= 0.999
          and abs(run.norm_ratio - 1.0) < 1e-6
          and run.stored_peak < 1e-3 * run.input_peak)
    _report(7, ok, f"fidelity {run.shape_fidelity:.6f} (>=0.999), "
                   f"norm ratio - 1 = {run.norm_ratio - 1.0:.1e} (<1e-6), "
                   f"stored |E| / input = {run.stored_peak / run.input_peak:.1e} (<1e-3)")


def test_criterion_08_gain_compensated_storage():
    sched = tanh_control_schedule(coupling=1e-2)
    gammas = [0.0, 2e-5, 1e-4, 1e-3, 1e-2, 0.1]
    peaks = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for g1 in gammas:
            gain = None if g1 == 0.0 else GainSetting(gamma_1=g1,
                                                      eta_rule="steady_state")
            peaks.append(store_release_experiment(sched, gain=gain).released_peak)
    ideal = peaks[0]
    peak_i = int(np.argmax(peaks))
    exceeds = peaks[peak_i] > ideal
    non_monotone = 0 < peak_i < len(peaks) - 1 and peaks[-1] < ideal
    ok = exceeds and non_monotone
    _report(8, ok, f"released/ideal max {peaks[peak_i] / ideal:.4f} at gamma_1 = "
                   f"{gammas[peak_i]:g}, endpoint {peaks[-1] / ideal:.3f}")


def test_criterion_09_tripod_scattering():
    e1, e2, _, _, _ = tripod_eigenstates(1.0, 0.3, 0.4)
    h = interaction_matrix(1.0, 0.3, 0.4)
    excited = np.zeros(4)
    excited[0] = 1.0
    dark_ok = (abs(excited @ h @ e1) < 1e-14 and abs(excited @ h @ e2) < 1e-14)

    sched = tanh_control_schedule(coupling=1e-2)
    x = np.linspace(-64.0, 128.0, 3072)
    theta = mixing_angle(sched, 0.0)
    probe = PolaritonField(x=x, psi=gaussian_envelope(10.0, 0.0)(x).astype(complex),
                           theta=theta)
    trigger = PolaritonField(x=x, psi=gaussian_envelope(10.0, -15.0)(x).astype(complex),
                             theta=theta)
    out = copropagate(TwoPolaritonField(probe=probe, trigger=trigger),
                      sched, 0.0, 160.0)
    t_fine = np.linspace(0.0, 160.0, 8001)
    displacement = np.trapezoid([cos2_theta(sched, t) for t in t_fine], t_fine)
    xcorrs = []
    for field, reference in ((out.probe, probe), (out.trigger, trigger)):
        expect = np.interp(x - displacement, x, np.abs(reference.psi),
                           left=0.0, right=0.0)
        got = np.abs(field.psi)
        xcorrs.append(float(np.dot(expect, got)
                            / (np.linalg.norm(expect) * np.linalg.norm(got))))
    ok = dark_ok and all(c >= 0.999 for c in xcorrs)
    _report(9, ok, f"dark decoupling <1e-14: {dark_ok}, cross-correlations "
                   f"{xcorrs[0]:.6f}/{xcorrs[1]:.6f} (>=0.999)")


def test_criterion_10_algebra_suite():
    cases = [
        (algebra.harmonic(), 6),
        (algebra.q_deformed(1.3), 6),
        (algebra.arik_coon(0.7), 6),
        (algebra.parafermionic(3), 5),
        (algebra.parabosonic(2), 6),
        (algebra.fermionic(), 4),
        (algebra.parapolariton_structure(0.25, 1.0), 6),
    ]
    worst = 0.0
    for phi, dim in cases:
        rep = algebra.build_rep(phi, dim)
        number = np.diag(rep.a_dagger @ rep.a)
        c = algebra.commutators(rep)
        for n in range(rep.faithful_dim):
            worst = max(worst, abs(number[n] - phi(n)))
            worst = max(worst, abs(c.commutator[n] - (phi(n + 1) - phi(n))))
    eta, theta, omega = 0.25, 1.1, 2.0
    levels = algebra.energy_spectrum(
        algebra.parapolariton_structure(eta, theta), omega, 6)
    factor = 1.0 - 2.0 * eta * math.sin(theta) ** 2
    spec_dev = max(abs(e - omega * (n + 0.5) * factor)
                   for n, e in enumerate(levels))
    q_dev = max(abs(algebra.q_deformed(q)(n) - n)
                for q in (1.0 + 1e-4, 1.0 - 1e-4) for n in range(1, 8))
    ok = worst < 1e-12 and spec_dev < 1e-12 and q_dev < 1e-6
    _report(10, ok, f"ladder identities {worst:.1e} (<1e-12), spectrum "
                    f"{spec_dev:.1e} (<1e-12), q->1 deviation {q_dev:.1e}")


def test_criterion_11_fidelity_suite():
    rng = np.random.default_rng(71)
    commuting_dev = 0.0
    for dim in (2, 4, 6):
        p = rng.dirichlet(np.ones(dim))
        q = rng.dirichlet(np.ones(dim))
        commuting_dev = max(commuting_dev, abs(
            uhlmann_fidelity(np.diag(p), np.diag(q)) - classical_fidelity(p, q)
        ))

    def dicke(n_atoms, n_exc):
        v = np.zeros(2**n_atoms)
        for bits in itertools.product((0, 1), repeat=n_atoms):
            if sum(bits) == n_exc:
                v[int("".join(map(str, bits)), 2)] = 1.0
        return v / np.linalg.norm(v)

    loss_dev = 0.0
    for n_atoms in (3, 4, 6):
        for n_exc in (1, 2):
            v = dicke(n_atoms, n_exc).reshape(2, 2 ** (n_atoms - 1))
            reduced = v.T @ v
            target = dicke(n_atoms - 1, n_exc)
            brute = float(target @ reduced @ target)
            model = MemoryErrorModel(kind="atom_loss", n_atoms=n_atoms,
                                     fock_n=n_exc)
            loss_dev = max(loss_dev,
                           abs(brute - (1.0 - n_exc / n_atoms)),
                           abs(decoherence_fidelity(model) - brute))
    closed_dev = max(
        abs(decoherence_fidelity(MemoryErrorModel(
            kind="spin_flip_asym", n_atoms=50, fock_n=3)) - (1.0 - 4.0 / 50.0)),
        abs(decoherence_fidelity(MemoryErrorModel(
            kind="spin_flip_sym", n_atoms=50, fock_n=3)) - (1.0 - 7.0 / 50.0)),
        abs(decoherence_fidelity(MemoryErrorModel(
            kind="phase_flip", n_atoms=50, mean_number=2.0)) - (1.0 - 4.0 / 50.0)),
    )
    ok = commuting_dev < 1e-10 and loss_dev < 1e-12 and closed_dev < 1e-12
    _report(11, ok, f"Uhlmann vs classical {commuting_dev:.1e} (<1e-10), "
                    f"brute-force loss {loss_dev:.1e} (<1e-12), "
                    f"closed forms {closed_dev:.1e}")


def test_criterion_12_cross_oracles():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(50):
        scheme = internal_scheme(gamma_1=rng.uniform(0.02, 0.2))
        fields = DriveFields(
            rabi_pump=rng.uniform(0.2, 1.2),
            rabi_probe=rng.uniform(0.05, 0.6),
            detuning_probe=rng.uniform(-2.0, 2.0),
            detuning_pump=rng.uniform(-1.0, 1.0),
        )
        rho = steady_state_full(scheme, fields)
        ref = ObeState(
            rho31=rho[2, 0], rho32=rho[2, 1], rho21=rho[1, 0],
            rho33=rho[2, 2].real, rho22=rho[1, 1].real, rho11=rho[0, 0].real,
        )
        start = ObeState(rho31=0, rho32=0, rho21=0, rho33=0, rho22=0, rho11=1)
        traj = integrate_obe(start, scheme, fields, t_end=2000.0, tol=1e-11)
        worst = max(worst, float(np.max(np.abs(
            traj.final.to_vector() - ref.to_vector()))))

    kk_worst = 0.0
    grid = np.linspace(-40.0, 40.0, 40001)
    mask = np.abs(grid) < 3.0
    configs = [
        (Populations(1.0, 0.0, 0.0), internal_scheme(), 0.8, 2.9e-3),
        (Populations(0.9, 0.1, 0.0), internal_scheme(), 0.8, 2.9e-3),
        (Populations(0.7, 0.3, 0.0), internal_scheme(), 0.8, 2.9e-3),
        (ground_loss_populations(0.05, 0.8), internal_scheme(0.05), 0.8, N_P_HOT),
    ]
    for pops, scheme, rabi, density in configs:
        chi = chi_probe(grid, pops, scheme, rabi, density)
        rec = kk_real_from_imag(grid, chi.imag)
        scale = np.max(np.abs(chi.real))
        kk_worst = max(kk_worst,
                       float(np.max(np.abs(rec[mask] - chi.real[mask])) / scale))
    ok = worst < 1e-6 and kk_worst < 0.03
    _report(12, ok, f"steady vs integrated OBE {worst:.1e} (<1e-6, 50 draws), "
                    f"Kramers-Kronig {100 * kk_worst:.2f}% (<3%)")
