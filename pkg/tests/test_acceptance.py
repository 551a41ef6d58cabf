"""Acceptance suite: one test per release criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -s` to see the PASS/FAIL lines and
timings directly.
"""

import math
import time

import numpy as np

from jclattice import (
    Boundary,
    DecoherenceRates,
    Drive,
    IntegratorConfig,
    RampSchedule,
    assemble_hr,
    couplings_at,
    embed_pure_state,
    energy_cost,
    evolve_blockwise,
    evolve_lindblad,
    evolve_schrodinger,
    exact_cd_matrix,
    ground_energy_ht,
    ground_fidelity_mixed,
    ground_fidelity_pure,
    initial_ground_state,
    jacobi_eigensystem,
    load_preset,
    local_cd_matrix,
    local_cd_params_at,
    make_lattice_spec,
    parse_config,
)
from jclattice.observables import drive_mode_blocks
from jclattice.runner import PRESET_NAMES
from jclattice.spectrum import analytic_eigensystem

HALF_PI = 0.5 * math.pi
GAMMA = 5.0 / math.pi * 1e-5

PBC4 = make_lattice_spec(4, Boundary.PBC, 1.0)
OBC4 = make_lattice_spec(4, Boundary.OBC, 1.0)
HOPPING_RAMP = RampSchedule(1.0, 1.0, 0.0, 2.0, HALF_PI)
W_STATE_RAMP = RampSchedule(0.0, 1.0, 2.0, 0.0, HALF_PI)


def _report(number: int, name: str, ok: bool, detail: str, started: float):
    status = "PASS" if ok else "FAIL"
    print(f"{status} criterion {number} ({name}): {detail} [{time.perf_counter() - started:.2f}s]")
    assert ok, f"criterion {number} ({name}): {detail}"


def test_criterion_1_spectral_oracle_equivalence():
    started = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(3, 9))
        boundary = Boundary.PBC if rng.random() < 0.5 else Boundary.OBC
        spec = make_lattice_spec(n, boundary, float(rng.uniform(-2.0, 2.0)))
        g = float(rng.uniform(0.1, 3.0))
        j = float(rng.uniform(0.0, 3.0))
        analytic = np.sort(analytic_eigensystem(spec, g, j)[0])
        oracle = jacobi_eigensystem(assemble_hr(spec, g, j)).eigenvalues
        worst = max(worst, float(np.max(np.abs(analytic - oracle))))
    _report(1, "spectral oracle equivalence", worst <= 1e-10,
            f"200 draws, max |analytic - jacobi| = {worst:.3e} <= 1e-10", started)


def test_criterion_2_cd_construction_equivalence():
    started = time.perf_counter()
    worst = 0.0
    for spec in (PBC4, OBC4):
        for schedule in (HOPPING_RAMP, W_STATE_RAMP):
            for t in np.linspace(0.0, schedule.total_time, 64):
                cs = couplings_at(schedule, t)
                blocks = exact_cd_matrix(spec, cs.g, cs.j, cs.dg, cs.dj, method="mode_blocks")
                literal = exact_cd_matrix(spec, cs.g, cs.j, cs.dg, cs.dj, method="spectral_sum")
                worst = max(worst, float(np.max(np.abs(blocks - literal))))
    _report(2, "CD construction equivalence", worst <= 1e-10,
            f"max |spectral-sum - mode-blocks| = {worst:.3e} <= 1e-10 over 4x64 points", started)


def test_criterion_3_local_equals_exact_dynamics():
    started = time.perf_counter()
    worst = 0.0
    cfg = IntegratorConfig()
    for spec, schedule in ((PBC4, HOPPING_RAMP), (OBC4, HOPPING_RAMP), (PBC4, W_STATE_RAMP)):
        psi0 = initial_ground_state(spec, schedule)
        exact = evolve_schrodinger(spec, schedule, Drive.EXACT_CD, psi0, cfg)
        local = evolve_schrodinger(spec, schedule, Drive.LOCAL_CD, psi0, cfg)
        worst = max(worst, float(np.max(np.abs(exact.states - local.states))))
    _report(3, "local equals exact dynamics", worst <= 1e-10,
            f"max trajectory amplitude difference = {worst:.3e} <= 1e-10", started)


def test_criterion_4_cd_effectiveness():
    started = time.perf_counter()
    psi0 = initial_ground_state(PBC4, HOPPING_RAMP)
    driven = evolve_blockwise(PBC4, HOPPING_RAMP, Drive.LOCAL_CD, psi0)
    driven_infidelity = max(
        1.0 - ground_fidelity_pure(PBC4, driven.g[i], driven.j[i], driven.states[i])
        for i in range(len(driven.times))
    )
    plain = evolve_blockwise(PBC4, HOPPING_RAMP, Drive.NONE, psi0)
    plain_final = 1.0 - ground_fidelity_pure(PBC4, plain.g[-1], plain.j[-1], plain.states[-1])
    ratio = plain_final / max(driven_infidelity, 1e-300)
    ok = driven_infidelity <= 1e-6 and ratio >= 100.0
    _report(4, "CD effectiveness", ok,
            f"driven max infidelity {driven_infidelity:.3e} <= 1e-6, "
            f"undriven/driven final ratio {ratio:.1e} >= 100", started)


def test_criterion_5_w_state_with_decoherence():
    started = time.perf_counter()
    psi0 = initial_ground_state(PBC4, W_STATE_RAMP)
    rho0 = embed_pure_state(PBC4, psi0)
    noisy = evolve_lindblad(
        PBC4, W_STATE_RAMP, Drive.LOCAL_CD, rho0, DecoherenceRates(GAMMA, 5e-5)
    )
    noisy_infidelity = 1.0 - ground_fidelity_mixed(PBC4, noisy.g[-1], noisy.j[-1], noisy.states[-1])
    clean = evolve_lindblad(
        PBC4, W_STATE_RAMP, Drive.LOCAL_CD, rho0, DecoherenceRates(0.0, 0.0)
    )
    clean_infidelity = 1.0 - ground_fidelity_mixed(PBC4, clean.g[-1], clean.j[-1], clean.states[-1])
    ok = noisy_infidelity <= 1.5e-4 and clean_infidelity <= 1e-6
    _report(5, "W-state with decoherence", ok,
            f"noisy final infidelity {noisy_infidelity:.3e} <= 1.5e-4, "
            f"closed {clean_infidelity:.3e} <= 1e-6", started)


def test_criterion_6_energy_cost_contract():
    started = time.perf_counter()
    psi0 = initial_ground_state(PBC4, HOPPING_RAMP)
    undriven_start = energy_cost(PBC4, HOPPING_RAMP, Drive.NONE, psi0, 0.0).delta_e
    driven_start = energy_cost(PBC4, HOPPING_RAMP, Drive.LOCAL_CD, psi0, 0.0).delta_e
    traj = evolve_blockwise(PBC4, HOPPING_RAMP, Drive.LOCAL_CD, psi0)
    min_cost = min(
        energy_cost(PBC4, HOPPING_RAMP, Drive.LOCAL_CD, traj.states[i], traj.times[i]).delta_e
        for i in range(len(traj.times))
    )
    worst_eg = 0.0
    for drive in Drive:
        for t in np.linspace(0.0, HOPPING_RAMP.total_time, 16):
            cs = couplings_at(HOPPING_RAMP, t)
            closed_form = ground_energy_ht(
                PBC4, cs.g, cs.j, drive_mode_blocks(PBC4, HOPPING_RAMP, drive, t)
            )
            h_t = assemble_hr(PBC4, cs.g, cs.j).astype(complex)
            if drive is Drive.EXACT_CD:
                h_t += exact_cd_matrix(PBC4, cs.g, cs.j, cs.dg, cs.dj)
            elif drive is Drive.LOCAL_CD:
                h_t += local_cd_matrix(PBC4, local_cd_params_at(PBC4, HOPPING_RAMP, t))
            dense = jacobi_eigensystem(h_t).eigenvalues[0]
            worst_eg = max(worst_eg, abs(closed_form - dense))
    ok = (
        abs(undriven_start) <= 1e-10
        and driven_start > 0.0
        and min_cost >= -1e-10
        and worst_eg <= 1e-10
    )
    _report(6, "energy cost contract", ok,
            f"dE(0) undriven {undriven_start:.1e}, driven {driven_start:.3e} > 0, "
            f"min dE {min_cost:.1e} >= -1e-10, E_G dev {worst_eg:.3e} <= 1e-10", started)


def test_criterion_7_open_system_integrity():
    started = time.perf_counter()
    psi0 = initial_ground_state(PBC4, W_STATE_RAMP)
    rho0 = embed_pure_state(PBC4, psi0)
    runs = [
        evolve_lindblad(PBC4, W_STATE_RAMP, Drive.LOCAL_CD, rho0, DecoherenceRates(GAMMA, 5e-5)),
        evolve_lindblad(PBC4, W_STATE_RAMP, Drive.NONE, rho0, DecoherenceRates(GAMMA, 5e-4)),
    ]
    closed = evolve_lindblad(PBC4, W_STATE_RAMP, Drive.LOCAL_CD, rho0, DecoherenceRates(0.0, 0.0))
    runs.append(closed)
    trace_dev = herm_dev = neg = 0.0
    for traj in runs:
        traces = np.trace(traj.states, axis1=1, axis2=2)
        trace_dev = max(trace_dev, float(np.max(np.abs(traces - 1.0))))
        herm_dev = max(
            herm_dev, float(np.max(np.abs(traj.states - traj.states.conj().transpose(0, 2, 1))))
        )
        smallest = min(jacobi_eigensystem(rho).eigenvalues[0] for rho in traj.states)
        neg = max(neg, max(0.0, -float(smallest)))
    pure = evolve_schrodinger(PBC4, W_STATE_RAMP, Drive.LOCAL_CD, psi0)
    projectors = np.einsum("ri,rj->rij", pure.states, pure.states.conj())
    closed_dev = float(np.max(np.abs(closed.states[:, 1:, 1:] - projectors)))
    kappa = 5e-5
    decay = evolve_lindblad(
        PBC4,
        RampSchedule(0.0, 0.0, 0.0, 0.0, HALF_PI),
        Drive.NONE,
        _photon_site_one(),
        DecoherenceRates(0.0, kappa),
    )
    decay_dev = float(
        np.max(np.abs(decay.states[:, 1, 1].real - np.exp(-kappa * decay.times)))
    )
    ok = (
        trace_dev <= 1e-9
        and herm_dev <= 1e-10
        and neg <= 1e-9
        and closed_dev <= 1e-9
        and decay_dev <= 1e-8
    )
    _report(7, "open-system integrity", ok,
            f"trace {trace_dev:.1e} <= 1e-9, hermiticity {herm_dev:.1e} <= 1e-10, "
            f"negativity {neg:.1e} <= 1e-9, closed-limit {closed_dev:.1e} <= 1e-9, "
            f"decay {decay_dev:.1e} <= 1e-8", started)


def _photon_site_one():
    rho = np.zeros((9, 9), dtype=complex)
    rho[1, 1] = 1.0
    return rho


def test_criterion_8_fast_path_equivalence():
    started = time.perf_counter()
    worst = 0.0
    for name in PRESET_NAMES:
        config = parse_config(load_preset(name))
        psi0 = initial_ground_state(config.spec, config.schedule)
        cfg = IntegratorConfig(config.integrator.steps, config.integrator.record_every)
        dense = evolve_schrodinger(config.spec, config.schedule, config.drive, psi0, cfg)
        block = evolve_blockwise(config.spec, config.schedule, config.drive, psi0, cfg)
        worst = max(worst, float(np.max(np.abs(dense.states - block.states))))
    _report(8, "fast-path equivalence", worst <= 1e-10,
            f"max dense/block difference {worst:.3e} <= 1e-10 over {len(PRESET_NAMES)} presets",
            started)
