import math

import numpy as np
import pytest

from jclattice import (
    Boundary,
    Branch,
    Drive,
    NumericalIntegrityError,
    SizeError,
    assemble_hr,
    couplings_at,
    eigenstate,
    energy_cost,
    exact_cd_matrix,
    ground_energy_ht,
    ground_fidelity_mixed,
    ground_fidelity_pure,
    initial_ground_state,
    jacobi_eigensystem,
    local_cd_matrix,
    local_cd_params_at,
    make_lattice_spec,
    mode_spectrum,
    w_state_reference,
)
from jclattice.observables import drive_mode_blocks
from jclattice.spectrum import analytic_eigensystem


def embed(spec, psi):
    rho = np.zeros((spec.dim + 1, spec.dim + 1), dtype=complex)
    rho[1:, 1:] = np.outer(psi, psi.conj())
    return rho


# ---------------------------------------------------------------------------
# Fidelity
# ---------------------------------------------------------------------------


def test_pure_fidelity_of_eigenstates(pbc4):
    ground = eigenstate(pbc4, 1.0, 2.0, 0, Branch.MINUS)
    excited = eigenstate(pbc4, 1.0, 2.0, 0, Branch.PLUS)
    assert ground_fidelity_pure(pbc4, 1.0, 2.0, ground) == pytest.approx(1.0, abs=1e-12)
    assert ground_fidelity_pure(pbc4, 1.0, 2.0, excited) == pytest.approx(0.0, abs=1e-12)
    mix = (ground + excited) / math.sqrt(2.0)
    assert ground_fidelity_pure(pbc4, 1.0, 2.0, mix) == pytest.approx(0.5, abs=1e-12)


def test_mixed_fidelity_linearity(pbc4):
    ground = eigenstate(pbc4, 1.0, 2.0, 0, Branch.MINUS)
    pure = embed(pbc4, ground)
    assert ground_fidelity_mixed(pbc4, 1.0, 2.0, pure) == pytest.approx(1.0, abs=1e-12)
    vacuum = np.zeros((9, 9), dtype=complex)
    vacuum[0, 0] = 1.0
    assert ground_fidelity_mixed(pbc4, 1.0, 2.0, vacuum) == 0.0
    mixture = 0.9 * pure + 0.1 * vacuum
    assert ground_fidelity_mixed(pbc4, 1.0, 2.0, mixture) == pytest.approx(0.9, abs=1e-12)


def test_fidelity_clamping_policy(pbc4):
    ground = eigenstate(pbc4, 1.0, 2.0, 0, Branch.MINUS)
    slightly_over = (1.0 + 5e-10) * embed(pbc4, ground)
    assert ground_fidelity_mixed(pbc4, 1.0, 2.0, slightly_over) == 1.0
    far_over = (1.0 + 5e-9) * embed(pbc4, ground)
    with pytest.raises(NumericalIntegrityError):
        ground_fidelity_mixed(pbc4, 1.0, 2.0, far_over)


def test_overlaps_with_all_eigenstates_are_complete(pbc4):
    rng = np.random.default_rng(41)
    _, vectors = analytic_eigensystem(pbc4, 1.0, 2.0)
    for _ in range(10):
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi /= np.linalg.norm(psi)
        total = ground_fidelity_pure(pbc4, 1.0, 2.0, psi)
        # Skip the ground column (k=0, minus branch) when summing the rest.
        for col in range(8):
            if col == 1:
                continue
            total += abs(np.vdot(vectors[:, col], psi)) ** 2
        assert total == pytest.approx(1.0, abs=1e-10)


# ---------------------------------------------------------------------------
# Ground energy of the driven Hamiltonian
# ---------------------------------------------------------------------------


def test_ground_energy_undriven_endpoint(pbc4, hopping_ramp):
    value = ground_energy_ht(pbc4, 1.0, 2.0, None)
    assert value == pytest.approx(-3.3027756, abs=1e-7)
    dense = jacobi_eigensystem(assemble_hr(pbc4, 1.0, 2.0)).eigenvalues[0]
    assert value == pytest.approx(dense, abs=1e-10)


def test_ground_energy_with_local_drive(pbc4, w_state_ramp):
    blocks = drive_mode_blocks(pbc4, w_state_ramp, Drive.LOCAL_CD, 0.0)
    value = ground_energy_ht(pbc4, 0.0, 2.0, blocks)
    mu = 2.0 / (3.0 * math.pi)
    assert value == pytest.approx(-1.5 - math.hypot(1.5, mu), abs=1e-12)
    assert value == pytest.approx(-3.0149, abs=1e-4)
    h_t = assemble_hr(pbc4, 0.0, 2.0).astype(complex)
    h_t += local_cd_matrix(pbc4, local_cd_params_at(pbc4, w_state_ramp, 0.0))
    dense = jacobi_eigensystem(h_t).eigenvalues[0]
    assert value == pytest.approx(dense, abs=1e-10)


def test_ground_energy_decoupled_zero(pbc4):
    spec = make_lattice_spec(4, Boundary.PBC, 1.5)
    assert ground_energy_ht(spec, 0.0, 0.0, None) == pytest.approx(0.0, abs=1e-14)


def test_ground_energy_matches_jacobi_over_random_drives():
    rng = np.random.default_rng(42)
    from jclattice import RampSchedule

    for _ in range(100):
        n = int(rng.integers(3, 7))
        boundary = Boundary.PBC if rng.random() < 0.5 else Boundary.OBC
        spec = make_lattice_spec(n, boundary, float(rng.uniform(-2, 2)))
        schedule = RampSchedule(
            float(rng.uniform(0.1, 2.0)),
            float(rng.uniform(0.1, 2.0)),
            float(rng.uniform(0.0, 2.0)),
            float(rng.uniform(0.0, 2.0)),
            float(rng.uniform(0.5, 5.0)),
        )
        drive = [Drive.NONE, Drive.EXACT_CD, Drive.LOCAL_CD][int(rng.integers(0, 3))]
        t = float(rng.uniform(0.0, schedule.total_time))
        cs = couplings_at(schedule, t)
        closed_form = ground_energy_ht(
            spec, cs.g, cs.j, drive_mode_blocks(spec, schedule, drive, t)
        )
        h_t = assemble_hr(spec, cs.g, cs.j).astype(complex)
        if drive is Drive.EXACT_CD:
            h_t += exact_cd_matrix(spec, cs.g, cs.j, cs.dg, cs.dj)
        elif drive is Drive.LOCAL_CD:
            h_t += local_cd_matrix(spec, local_cd_params_at(spec, schedule, t))
        dense = jacobi_eigensystem(h_t).eigenvalues[0]
        assert abs(closed_form - dense) <= 1e-10


# ---------------------------------------------------------------------------
# Energy cost
# ---------------------------------------------------------------------------


def test_energy_cost_vanishes_at_start_without_drive(pbc4, hopping_ramp):
    psi0 = initial_ground_state(pbc4, hopping_ramp)
    sample = energy_cost(pbc4, hopping_ramp, Drive.NONE, psi0, 0.0)
    assert abs(sample.delta_e) <= 1e-10


def test_energy_cost_is_positive_at_start_with_drive(pbc4, w_state_ramp):
    psi0 = initial_ground_state(pbc4, w_state_ramp)
    sample = energy_cost(pbc4, w_state_ramp, Drive.LOCAL_CD, psi0, 0.0)
    mu = 2.0 / (3.0 * math.pi)
    assert sample.delta_e == pytest.approx(math.hypot(1.5, mu) - 1.5, abs=1e-10)
    assert sample.delta_e == pytest.approx(0.0149, abs=1e-4)
    assert sample.delta_e > 0.0


def test_energy_cost_never_negative(pbc4, hopping_ramp):
    rng = np.random.default_rng(43)
    for _ in range(25):
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi /= np.linalg.norm(psi)
        t = float(rng.uniform(0.0, hopping_ramp.total_time))
        drive = [Drive.NONE, Drive.EXACT_CD, Drive.LOCAL_CD][int(rng.integers(0, 3))]
        sample = energy_cost(pbc4, hopping_ramp, drive, psi, t)
        assert sample.delta_e >= -1e-10


def test_energy_cost_is_gauge_consistent(pbc4, hopping_ramp):
    # Shifting every mode block by c*I moves <H_t> and E_G together.
    psi0 = initial_ground_state(pbc4, hopping_ramp)
    t = 0.3
    cs = couplings_at(hopping_ramp, t)
    blocks = drive_mode_blocks(pbc4, hopping_ramp, Drive.LOCAL_CD, t)
    h_t = assemble_hr(pbc4, cs.g, cs.j).astype(complex)
    h_t += local_cd_matrix(pbc4, local_cd_params_at(pbc4, hopping_ramp, t))
    for shift in (-1.7, 2.4):
        shifted_blocks = [b + shift * np.eye(2) for b in blocks]
        mean = np.real(np.vdot(psi0, (h_t + shift * np.eye(8)) @ psi0))
        ground = ground_energy_ht(pbc4, cs.g, cs.j, shifted_blocks)
        base = energy_cost(pbc4, hopping_ramp, Drive.LOCAL_CD, psi0, t)
        assert (mean - ground) == pytest.approx(base.delta_e, abs=1e-10)


# ---------------------------------------------------------------------------
# W-state reference
# ---------------------------------------------------------------------------


def test_w_state_reference_amplitudes():
    np.testing.assert_allclose(
        w_state_reference(4), [0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.5], atol=1e-15
    )
    np.testing.assert_allclose(
        w_state_reference(2), [0.0, 1.0 / math.sqrt(2.0), 0.0, 1.0 / math.sqrt(2.0)], atol=1e-15
    )
    for n in (2, 3, 7):
        assert np.linalg.norm(w_state_reference(n)) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(SizeError):
        w_state_reference(1)


def test_final_ground_state_qubit_pattern_is_the_w_state(pbc4):
    # At g = 1, J = 0 the qubit-flavor amplitudes of the instantaneous ground
    # state are uniform: normalizing them recovers the W state exactly.
    ground = eigenstate(pbc4, 1.0, 0.0, 0, Branch.MINUS)
    qubit_part = np.zeros(8, dtype=complex)
    qubit_part[1::2] = ground[1::2]
    qubit_part /= np.linalg.norm(qubit_part)
    assert np.max(np.abs(qubit_part - w_state_reference(4))) <= 1e-12


def test_w_state_overlap_equals_mixing_angle(pbc4):
    ground = eigenstate(pbc4, 1.0, 0.0, 0, Branch.MINUS)
    overlap = abs(np.vdot(w_state_reference(4), ground))
    assert overlap == pytest.approx(math.cos(mode_spectrum(pbc4, 1.0, 0.0, 0).theta_k), abs=1e-12)
