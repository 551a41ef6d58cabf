"""Time evolution: pure-state dynamics (dense and per-mode) and the master equation.

All integrators use classical RK4 on a uniform grid with the Hamiltonian
rebuilt exactly at every stage time (t, t+dt/2, t+dt). The total Hamiltonian
is a fixed linear combination H(t) = sum_i c_i(t) M_i, so stage coefficients
are evaluated vectorized up front and each stage matrix is one contraction.
No renormalization is applied anywhere; norm and trace drift are kept as
integrator-error witnesses and checked against hard tolerances.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateModeError,
    DimensionError,
    PositivityWarning,
    RangeError,
)
from .lattice import LatticeSpec, RampSchedule, couplings_at, hr_components
from .spectrum import (
    GROUND_MODE,
    MAX_ORACLE_DIM,
    Branch,
    eigenstate,
    jacobi_eigensystem,
    mode_cosine,
    mode_matrix,
)

NORM_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-9
HERMITICITY_TOLERANCE = 1e-10
POSITIVITY_FLOOR = -1e-9
CONVERGENCE_TOLERANCE = 1e-10


class Drive(Enum):
    """Which counterdiabatic term is added to the adiabatic Hamiltonian.

    Values are the short names used in configs and CSV drive columns.
    """

    NONE = "none"
    EXACT_CD = "exact"
    LOCAL_CD = "local"


@dataclass(frozen=True)
class DecoherenceRates:
    """Uniform qubit damping rate gamma and cavity decay rate kappa."""

    gamma: float
    kappa: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "kappa", float(self.kappa))
        if self.gamma < 0.0 or self.kappa < 0.0:
            raise RangeError(f"decoherence rates must be nonnegative, got {self}")

    @property
    def closed(self) -> bool:
        return self.gamma == 0.0 and self.kappa == 0.0


@dataclass(frozen=True)
class IntegratorConfig:
    """Uniform-grid RK4 settings.

    steps must be a power of two (>= 256) so halving checks stay on-grid;
    record_every defaults to steps/512 and must divide steps.
    """

    steps: int = 16384
    record_every: int | None = None
    convergence_check: bool = False

    def __post_init__(self):
        steps = int(self.steps)
        object.__setattr__(self, "steps", steps)
        if steps < 256 or steps & (steps - 1):
            raise RangeError(f"steps must be a power of two >= 256, got {steps}")
        cadence = max(1, steps // 512) if self.record_every is None else int(self.record_every)
        object.__setattr__(self, "record_every", cadence)
        if cadence < 1 or steps % cadence:
            raise RangeError(f"record_every={cadence} must divide steps={steps}")


@dataclass(frozen=True)
class Trajectory:
    """Recorded pure states with the coupling samples that produced them."""

    times: np.ndarray
    states: np.ndarray
    g: np.ndarray
    j: np.ndarray
    im_g_local: np.ndarray


@dataclass(frozen=True)
class DensityTrajectory:
    """Recorded density matrices with the coupling samples that produced them."""

    times: np.ndarray
    states: np.ndarray
    g: np.ndarray
    j: np.ndarray
    im_g_local: np.ndarray


def initial_ground_state(spec: LatticeSpec, schedule: RampSchedule) -> np.ndarray:
    """Ground eigenstate of the adiabatic Hamiltonian at the t=0 couplings."""
    cs = couplings_at(schedule, 0.0)
    return eigenstate(spec, cs.g, cs.j, GROUND_MODE, Branch.MINUS)


# ---------------------------------------------------------------------------
# Stage grids and drive coefficients
# ---------------------------------------------------------------------------


def _stage_times(total_time: float, steps: int) -> np.ndarray:
    """RK4 stage times: grid points at even slots, midpoints at odd slots."""
    dt = total_time / steps
    ts = np.empty(2 * steps + 1)
    ts[0::2] = np.arange(steps + 1) * dt
    ts[1::2] = (np.arange(steps) + 0.5) * dt
    return ts


class _Ramp:
    def __init__(self, schedule: RampSchedule):
        self.g0 = schedule.g0
        self.dg = schedule.dg
        self.j0 = schedule.j0
        self.dj = schedule.dj

    def g(self, times: np.ndarray) -> np.ndarray:
        return self.g0 + times * self.dg

    def j(self, times: np.ndarray) -> np.ndarray:
        return self.j0 + times * self.dj


def _mode_strengths(
    spec: LatticeSpec, ramp: _Ramp, times: np.ndarray, cos_a: np.ndarray
) -> np.ndarray:
    """Im[g_CD^(k)] for every mode at every time; shape (len(times), N)."""
    g = ramp.g(times)[:, None]
    j = ramp.j(times)[:, None]
    delta_k = spec.delta - 2.0 * j * cos_a[None, :]
    chi_sq = delta_k * delta_k + 4.0 * g * g
    if np.any(chi_sq == 0.0):
        raise DegenerateModeError("chi_k = 0 along the protocol: CD drive undefined")
    return -(delta_k * ramp.dg + 2.0 * g * cos_a[None, :] * ramp.dj) / chi_sq


class _DenseBasis:
    """Fixed matrices and time coefficients with H_t(t) = coefficients(t) . matrices."""

    def __init__(self, spec: LatticeSpec, schedule: RampSchedule, drive: Drive):
        self.spec = spec
        self.ramp = _Ramp(schedule)
        self.drive = drive
        self.cos_a = np.array([mode_cosine(spec, k) for k in range(spec.n_sites)])
        d_mat, v_g, v_j = hr_components(spec)
        mats = [spec.delta * d_mat, v_g, v_j]
        if drive is not Drive.NONE:
            pattern = np.array([[0.0, 1j], [-1j, 0.0]])
            r = mode_matrix(spec)
            mode_mats = [
                np.kron(np.outer(r[:, k], r[:, k].conj()), pattern)
                for k in range(spec.n_sites)
            ]
            if drive is Drive.LOCAL_CD:
                # The k-sum of the mode couplers collapses to onsite blocks.
                mats.append(sum(mode_mats))
            else:
                mats.extend(mode_mats)
        self.matrices = np.stack([m.astype(complex) for m in mats])

    def coefficients(self, times: np.ndarray) -> np.ndarray:
        cols = [np.ones_like(times), self.ramp.g(times), self.ramp.j(times)]
        if self.drive is Drive.LOCAL_CD:
            cols.append(_mode_strengths(self.spec, self.ramp, times, self.cos_a)[:, GROUND_MODE])
        elif self.drive is Drive.EXACT_CD:
            cols = cols + list(_mode_strengths(self.spec, self.ramp, times, self.cos_a).T)
        return np.column_stack(cols)


# ---------------------------------------------------------------------------
# Dense pure-state path
# ---------------------------------------------------------------------------


def _validate_pure_state(spec: LatticeSpec, psi0: np.ndarray) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (spec.dim,):
        raise DimensionError(f"state must have shape ({spec.dim},), got {psi0.shape}")
    if abs(np.linalg.norm(psi0) - 1.0) > NORM_TOLERANCE:
        raise ValueError(f"initial state norm {np.linalg.norm(psi0)} is not 1")
    return psi0


def _record_grid(total_time: float, steps: int, record_every: int) -> np.ndarray:
    dt = total_time / steps
    times = np.arange(0, steps + 1, record_every) * dt
    times[-1] = total_time
    return times


def _rk4_state_run(basis: _DenseBasis, psi0, total_time, steps, record_every):
    coeffs = basis.coefficients(_stage_times(total_time, steps))
    mats = basis.matrices
    dt = total_time / steps
    states = np.empty((steps // record_every + 1, psi0.shape[0]), dtype=complex)
    psi = psi0.copy()
    rec = 0
    h_next = np.tensordot(coeffs[0], mats, axes=1)
    for n in range(steps):
        if n % record_every == 0:
            states[rec] = psi
            rec += 1
        h0 = h_next
        h_mid = np.tensordot(coeffs[2 * n + 1], mats, axes=1)
        h_next = np.tensordot(coeffs[2 * n + 2], mats, axes=1)
        k1 = -1j * (h0 @ psi)
        k2 = -1j * (h_mid @ (psi + (0.5 * dt) * k1))
        k3 = -1j * (h_mid @ (psi + (0.5 * dt) * k2))
        k4 = -1j * (h_next @ (psi + dt * k3))
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    states[rec] = psi
    return states


def _check_norms(states: np.ndarray):
    norms = np.linalg.norm(states, axis=-1)
    drift = float(np.max(np.abs(norms - 1.0)))
    if drift > NORM_TOLERANCE:
        raise ConvergenceError(
            f"norm drift {drift:.3e} exceeds {NORM_TOLERANCE}; increase steps"
        )


def _check_step_halving(coarse: np.ndarray, fine: np.ndarray):
    diff = float(np.max(np.abs(coarse - fine)))
    if diff > CONVERGENCE_TOLERANCE:
        raise ConvergenceError(
            f"step-halving check failed: doubling steps moves the trajectory by "
            f"{diff:.3e} (> {CONVERGENCE_TOLERANCE}); increase steps"
        )


def _finish_pure(spec, ramp, drive, cos_a, times, states, cfg, rerun) -> Trajectory:
    _check_norms(states)
    if cfg.convergence_check:
        _check_step_halving(states, rerun())
    im_gl = np.zeros_like(times)
    if drive is not Drive.NONE:
        im_gl = _mode_strengths(spec, ramp, times, cos_a)[:, GROUND_MODE]
    return Trajectory(
        times=times,
        states=states,
        g=ramp.g(times),
        j=ramp.j(times),
        im_g_local=im_gl,
    )


def evolve_schrodinger(
    spec: LatticeSpec,
    schedule: RampSchedule,
    drive: Drive,
    psi0: np.ndarray,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """Integrate d psi/dt = -i H_t(t) psi with the dense 2N x 2N Hamiltonian."""
    psi0 = _validate_pure_state(spec, psi0)
    basis = _DenseBasis(spec, schedule, drive)
    total_time = schedule.total_time
    states = _rk4_state_run(basis, psi0, total_time, cfg.steps, cfg.record_every)
    times = _record_grid(total_time, cfg.steps, cfg.record_every)
    return _finish_pure(
        spec,
        basis.ramp,
        drive,
        basis.cos_a,
        times,
        states,
        cfg,
        rerun=lambda: _rk4_state_run(
            basis, psi0, total_time, 2 * cfg.steps, 2 * cfg.record_every
        ),
    )


# ---------------------------------------------------------------------------
# Block-diagonal (mode basis) pure-state path
# ---------------------------------------------------------------------------


def _mode_block_stack(
    spec: LatticeSpec, ramp: _Ramp, drive: Drive, times: np.ndarray, cos_a: np.ndarray
) -> np.ndarray:
    """All per-mode 2x2 Hamiltonian blocks for every stage time; shape (S, N, 2, 2)."""
    g = ramp.g(times)
    j = ramp.j(times)
    blocks = np.zeros((len(times), spec.n_sites, 2, 2), dtype=complex)
    blocks[:, :, 0, 0] = spec.delta - 2.0 * j[:, None] * cos_a[None, :]
    coupling = np.broadcast_to(g[:, None], (len(times), spec.n_sites)).astype(complex)
    if drive is not Drive.NONE:
        mu = _mode_strengths(spec, ramp, times, cos_a)
        if drive is Drive.LOCAL_CD:
            mu = np.broadcast_to(mu[:, GROUND_MODE][:, None], mu.shape)
        coupling = coupling + 1j * mu
    blocks[:, :, 0, 1] = coupling
    blocks[:, :, 1, 0] = coupling.conj()
    return blocks


def _rk4_block_run(spec, ramp, drive, cos_a, psi0_modes, total_time, steps, record_every):
    blocks = _mode_block_stack(spec, ramp, drive, _stage_times(total_time, steps), cos_a)
    dt = total_time / steps
    n_rec = steps // record_every + 1
    states = np.empty((n_rec, spec.n_sites, 2), dtype=complex)
    psi = psi0_modes.copy()
    rec = 0
    for n in range(steps):
        if n % record_every == 0:
            states[rec] = psi
            rec += 1
        h0 = blocks[2 * n]
        h_mid = blocks[2 * n + 1]
        h1 = blocks[2 * n + 2]
        k1 = -1j * np.matmul(h0, psi[:, :, None])[:, :, 0]
        k2 = -1j * np.matmul(h_mid, (psi + (0.5 * dt) * k1)[:, :, None])[:, :, 0]
        k3 = -1j * np.matmul(h_mid, (psi + (0.5 * dt) * k2)[:, :, None])[:, :, 0]
        k4 = -1j * np.matmul(h1, (psi + dt * k3)[:, :, None])[:, :, 0]
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    states[rec] = psi
    return states


def evolve_blockwise(
    spec: LatticeSpec,
    schedule: RampSchedule,
    drive: Drive,
    psi0: np.ndarray,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """Same dynamics as :func:`evolve_schrodinger` via N independent 2x2 systems.

    The spatial profiles R_k are time independent, so the total Hamiltonian
    stays block diagonal in the fixed mode basis for every drive choice.
    """
    psi0 = _validate_pure_state(spec, psi0)
    ramp = _Ramp(schedule)
    cos_a = np.array([mode_cosine(spec, k) for k in range(spec.n_sites)])
    r = mode_matrix(spec)
    psi0_modes = (r.conj().T @ psi0.reshape(spec.n_sites, 2)).astype(complex)
    total_time = schedule.total_time

    def run(steps, record_every):
        mode_states = _rk4_block_run(
            spec, ramp, drive, cos_a, psi0_modes, total_time, steps, record_every
        )
        return np.einsum("nk,rkf->rnf", r, mode_states).reshape(mode_states.shape[0], spec.dim)

    states = run(cfg.steps, cfg.record_every)
    times = _record_grid(total_time, cfg.steps, cfg.record_every)
    return _finish_pure(
        spec, ramp, drive, cos_a, times, states, cfg,
        rerun=lambda: run(2 * cfg.steps, 2 * cfg.record_every),
    )


# ---------------------------------------------------------------------------
# Lindblad master equation (vacuum + single-excitation space)
# ---------------------------------------------------------------------------


def vacuum_projector(spec: LatticeSpec) -> np.ndarray:
    """Density matrix of the empty lattice in the (2N+1)-dimensional space."""
    rho = np.zeros((spec.dim + 1, spec.dim + 1), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def embed_pure_state(spec: LatticeSpec, psi: np.ndarray) -> np.ndarray:
    """|psi><psi| embedded with a zero vacuum row and column."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (spec.dim,):
        raise DimensionError(f"state must have shape ({spec.dim},), got {psi.shape}")
    rho = np.zeros((spec.dim + 1, spec.dim + 1), dtype=complex)
    rho[1:, 1:] = np.outer(psi, psi.conj())
    return rho


def _validate_density(spec: LatticeSpec, rho0: np.ndarray) -> np.ndarray:
    rho0 = np.asarray(rho0, dtype=complex)
    dim = spec.dim + 1
    if rho0.shape != (dim, dim):
        raise DimensionError(f"density matrix must have shape ({dim}, {dim}), got {rho0.shape}")
    if np.max(np.abs(rho0 - rho0.conj().T)) > HERMITICITY_TOLERANCE:
        raise ValueError("initial density matrix is not Hermitian")
    if abs(np.trace(rho0).real - 1.0) > TRACE_TOLERANCE:
        raise ValueError(f"initial density matrix trace {np.trace(rho0).real} is not 1")
    return rho0


def _rk4_density_run(basis, rates, rho0, total_time, steps, record_every):
    dim = rho0.shape[0]
    coeffs = basis.coefficients(_stage_times(total_time, steps))
    # Embed the excitation-block matrices with a zero vacuum row and column.
    mats = np.zeros((basis.matrices.shape[0], dim, dim), dtype=complex)
    mats[:, 1:, 1:] = basis.matrices
    # Jump operators are |vac><m| with rate kappa on photon slots and gamma on
    # qubit slots, so the dissipator reduces to diagonal damping plus a pump
    # of the summed decayed population into the vacuum element.
    gam = np.zeros(dim)
    gam[1::2] = rates.kappa
    gam[2::2] = rates.gamma
    damp = -0.5 * (gam[:, None] + gam[None, :])
    dissipative = rates.kappa != 0.0 or rates.gamma != 0.0

    def rhs(h: np.ndarray, rho: np.ndarray) -> np.ndarray:
        out = -1j * (h @ rho - rho @ h)
        if dissipative:
            out += damp * rho
            out[0, 0] += np.dot(gam, rho.diagonal())
        return out

    dt = total_time / steps
    states = np.empty((steps // record_every + 1, dim, dim), dtype=complex)
    rho = rho0.copy()
    rec = 0
    h_next = np.tensordot(coeffs[0], mats, axes=1)
    for n in range(steps):
        if n % record_every == 0:
            states[rec] = rho
            rec += 1
        h0 = h_next
        h_mid = np.tensordot(coeffs[2 * n + 1], mats, axes=1)
        h_next = np.tensordot(coeffs[2 * n + 2], mats, axes=1)
        k1 = rhs(h0, rho)
        k2 = rhs(h_mid, rho + (0.5 * dt) * k1)
        k3 = rhs(h_mid, rho + (0.5 * dt) * k2)
        k4 = rhs(h_next, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    states[rec] = rho
    return states


def _check_density_integrity(states: np.ndarray):
    traces = np.trace(states, axis1=1, axis2=2)
    trace_drift = float(np.max(np.abs(traces - 1.0)))
    if trace_drift > TRACE_TOLERANCE:
        raise ConvergenceError(
            f"trace drift {trace_drift:.3e} exceeds {TRACE_TOLERANCE}; increase steps"
        )
    herm_drift = float(np.max(np.abs(states - states.conj().transpose(0, 2, 1))))
    if herm_drift > HERMITICITY_TOLERANCE:
        raise ConvergenceError(
            f"Hermiticity drift {herm_drift:.3e} exceeds {HERMITICITY_TOLERANCE}"
        )


def _monitor_positivity(times: np.ndarray, states: np.ndarray):
    if states.shape[1] > MAX_ORACLE_DIM:
        return
    for t, rho in zip(times, states):
        smallest = jacobi_eigensystem(rho).eigenvalues[0]
        if smallest < POSITIVITY_FLOOR:
            warnings.warn(
                PositivityWarning(
                    f"density matrix eigenvalue {smallest:.3e} below {POSITIVITY_FLOOR} "
                    f"at t={t:.6f}"
                ),
                stacklevel=3,
            )
            return


def evolve_lindblad(
    spec: LatticeSpec,
    schedule: RampSchedule,
    drive: Drive,
    rho0: np.ndarray,
    rates: DecoherenceRates,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> DensityTrajectory:
    """Integrate the master equation with uniform qubit damping and cavity decay.

    The Hamiltonian acts on the excitation block and annihilates the vacuum;
    each site contributes two rank-one jump channels into the vacuum.
    """
    rho0 = _validate_density(spec, rho0)
    basis = _DenseBasis(spec, schedule, drive)
    total_time = schedule.total_time
    states = _rk4_density_run(basis, rates, rho0, total_time, cfg.steps, cfg.record_every)
    times = _record_grid(total_time, cfg.steps, cfg.record_every)
    _check_density_integrity(states)
    if cfg.convergence_check:
        fine = _rk4_density_run(
            basis, rates, rho0, total_time, 2 * cfg.steps, 2 * cfg.record_every
        )
        _check_step_halving(states, fine)
    _monitor_positivity(times, states)
    im_gl = np.zeros_like(times)
    if drive is not Drive.NONE:
        im_gl = _mode_strengths(spec, basis.ramp, times, basis.cos_a)[:, GROUND_MODE]
    return DensityTrajectory(
        times=times,
        states=states,
        g=basis.ramp.g(times),
        j=basis.ramp.j(times),
        im_g_local=im_gl,
    )
