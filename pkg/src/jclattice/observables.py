"""Fidelity, energy cost, and the W-state reference vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cd import cd_strength, exact_cd_matrix, local_cd_matrix, local_cd_params_at
from .errors import DimensionError, NumericalIntegrityError, SizeError
from .evolve import Drive
from .lattice import LatticeSpec, RampSchedule, assemble_hr, couplings_at
from .spectrum import GROUND_MODE, Branch, eigenstate, mode_spectrum

FIDELITY_SLACK = 1e-9


@dataclass(frozen=True)
class EnergyCostSample:
    """Mean energy above the instantaneous ground energy of the driven Hamiltonian."""

    t: float
    delta_e: float
    ground_energy: float


def _clamp_fidelity(value: float) -> float:
    if -FIDELITY_SLACK <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + FIDELITY_SLACK:
        return 1.0
    if not 0.0 <= value <= 1.0:
        raise NumericalIntegrityError(f"fidelity {value} outside [0, 1] beyond roundoff slack")
    return value


def ground_fidelity_pure(spec: LatticeSpec, g: float, j: float, psi: np.ndarray) -> float:
    """|<w_ground(g, J) | psi>|^2 against the instantaneous ground state."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (spec.dim,):
        raise DimensionError(f"state must have shape ({spec.dim},), got {psi.shape}")
    ground = eigenstate(spec, g, j, GROUND_MODE, Branch.MINUS)
    return _clamp_fidelity(float(abs(np.vdot(ground, psi)) ** 2))


def ground_fidelity_mixed(spec: LatticeSpec, g: float, j: float, rho: np.ndarray) -> float:
    """<w_ground | rho_excitation | w_ground> with the vacuum sector excluded."""
    rho = np.asarray(rho, dtype=complex)
    dim = spec.dim + 1
    if rho.shape != (dim, dim):
        raise DimensionError(f"density matrix must have shape ({dim}, {dim}), got {rho.shape}")
    ground = eigenstate(spec, g, j, GROUND_MODE, Branch.MINUS)
    return _clamp_fidelity(float(np.real(ground.conj() @ rho[1:, 1:] @ ground)))


def drive_mode_blocks(
    spec: LatticeSpec, schedule: RampSchedule, drive: Drive, t: float
) -> list[np.ndarray]:
    """Per-mode 2x2 drive blocks in the instantaneous eigenbasis (+,- ordering)."""
    zero = np.zeros((2, 2), dtype=complex)
    if drive is Drive.NONE:
        return [zero.copy() for _ in range(spec.n_sites)]
    cs = couplings_at(schedule, t)
    if drive is Drive.LOCAL_CD:
        g_l = cd_strength(spec, cs.g, cs.j, cs.dg, cs.dj, GROUND_MODE)
        block = np.array([[0.0, g_l], [np.conj(g_l), 0.0]])
        return [block.copy() for _ in range(spec.n_sites)]
    blocks = []
    for k in range(spec.n_sites):
        strength = cd_strength(spec, cs.g, cs.j, cs.dg, cs.dj, k)
        blocks.append(np.array([[0.0, strength], [np.conj(strength), 0.0]]))
    return blocks


def ground_energy_ht(
    spec: LatticeSpec, g: float, j: float, blocks: list[np.ndarray] | None
) -> float:
    """Minimum eigenvalue of the driven Hamiltonian from closed-form 2x2 blocks.

    Each mode contributes diag(lambda_+, lambda_-) plus its drive block; the
    block minimum is mean - sqrt((half gap)^2 + |off diagonal|^2).
    """
    best = np.inf
    for k in range(spec.n_sites):
        ms = mode_spectrum(spec, g, j, k)
        block = np.zeros((2, 2), dtype=complex) if blocks is None else blocks[k]
        upper = ms.lambda_plus + block[0, 0].real
        lower = ms.lambda_minus + block[1, 1].real
        mean = 0.5 * (upper + lower)
        radius = np.hypot(0.5 * (upper - lower), abs(block[0, 1]))
        best = min(best, mean - radius)
    return float(best)


def energy_cost(
    spec: LatticeSpec, schedule: RampSchedule, drive: Drive, psi: np.ndarray, t: float
) -> EnergyCostSample:
    """<psi| H_t(t) |psi> minus the ground energy of H_t(t)."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (spec.dim,):
        raise DimensionError(f"state must have shape ({spec.dim},), got {psi.shape}")
    cs = couplings_at(schedule, t)
    h_t = assemble_hr(spec, cs.g, cs.j).astype(complex)
    if drive is Drive.EXACT_CD:
        h_t += exact_cd_matrix(spec, cs.g, cs.j, cs.dg, cs.dj)
    elif drive is Drive.LOCAL_CD:
        h_t += local_cd_matrix(spec, local_cd_params_at(spec, schedule, t))
    mean_energy = float(np.real(np.vdot(psi, h_t @ psi)))
    ground = ground_energy_ht(spec, cs.g, cs.j, drive_mode_blocks(spec, schedule, drive, t))
    return EnergyCostSample(t=float(t), delta_e=mean_energy - ground, ground_energy=ground)


def w_state_reference(n: int) -> np.ndarray:
    """Uniform qubit-flavor W state in the 2N real-space basis."""
    n = int(n)
    if n < 2:
        raise SizeError(f"W state needs at least 2 sites, got {n}")
    vec = np.zeros(2 * n)
    vec[1::2] = 1.0 / np.sqrt(n)
    return vec
