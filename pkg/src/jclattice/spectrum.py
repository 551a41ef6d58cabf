"""Closed-form eigensystem of the lattice Hamiltonian and a Jacobi oracle.

The Hamiltonian is block circulant (PBC) or block tridiagonal Toeplitz (OBC),
so its eigenvectors factor as R_k (x) v_{k,+-} with a boundary-specific
spatial profile R_k and a two-component doublet vector v. The Jacobi solver
at the bottom is a deliberately independent cross-check: it never calls the
closed forms and uses only elementary unitary rotations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConvergenceError, DegenerateModeError, DimensionError
from .lattice import Boundary, LatticeSpec

GROUND_MODE = 0


class Branch(Enum):
    """Upper (+) or lower (-) member of a mode doublet."""

    PLUS = "+"
    MINUS = "-"


@dataclass(frozen=True)
class ModeSpectrum:
    """Per-mode analytic quantities at fixed couplings (g, J).

    chi_k is the doublet splitting, theta_k in [0, pi/2] the mixing angle,
    and v_plus/v_minus the orthonormal doublet vectors (photon, qubit)
    with the sign convention v_minus[0] <= 0.
    """

    delta_k: float
    chi_k: float
    theta_k: float
    lambda_plus: float
    lambda_minus: float
    v_plus: np.ndarray
    v_minus: np.ndarray


def _check_mode(spec: LatticeSpec, k: int) -> int:
    k = int(k)
    if not 0 <= k < spec.n_sites:
        raise DimensionError(f"mode index {k} outside [0, {spec.n_sites - 1}]")
    return k


def mode_cosine(spec: LatticeSpec, k: int) -> float:
    """cos(alpha_k) for the bond phase alpha_k of mode k."""
    k = _check_mode(spec, k)
    if spec.boundary is Boundary.PBC:
        return math.cos(2.0 * math.pi * k / spec.n_sites)
    return math.cos(math.pi * (k + 1) / (spec.n_sites + 1))


def mode_detuning(spec: LatticeSpec, j: float, k: int) -> float:
    """Effective detuning Delta_k = Delta - 2*J*cos(alpha_k)."""
    return spec.delta - 2.0 * float(j) * mode_cosine(spec, k)


def mode_spectrum(spec: LatticeSpec, g: float, j: float, k: int) -> ModeSpectrum:
    """Doublet energies and vectors of mode k; requires chi_k > 0."""
    g = float(g)
    delta_k = mode_detuning(spec, j, k)
    chi = math.hypot(delta_k, 2.0 * g)
    if chi == 0.0:
        raise DegenerateModeError(
            f"mode k={k} is degenerate (g=0 and Delta_k=0): doublet undefined"
        )
    # Clamp tiny negative arguments produced by roundoff when |delta_k| ~ chi.
    cos_t = math.sqrt(max((chi + delta_k) / (2.0 * chi), 0.0))
    sin_t = math.sqrt(max((chi - delta_k) / (2.0 * chi), 0.0))
    return ModeSpectrum(
        delta_k=delta_k,
        chi_k=chi,
        theta_k=math.atan2(sin_t, cos_t),
        lambda_plus=0.5 * (delta_k + chi),
        lambda_minus=0.5 * (delta_k - chi),
        v_plus=np.array([cos_t, sin_t]),
        v_minus=np.array([-sin_t, cos_t]),
    )


def mode_vector(spec: LatticeSpec, k: int) -> np.ndarray:
    """Unit-norm spatial profile R_k (complex plane waves for PBC, real sines for OBC)."""
    k = _check_mode(spec, k)
    n = spec.n_sites
    sites = np.arange(n)
    if spec.boundary is Boundary.PBC:
        return np.exp(2j * math.pi * k * sites / n) / math.sqrt(n)
    return np.sqrt(2.0 / (n + 1)) * np.sin(math.pi * (k + 1) * (sites + 1) / (n + 1)) + 0j


def mode_matrix(spec: LatticeSpec) -> np.ndarray:
    """N x N unitary with columns R_0 .. R_{N-1}."""
    return np.column_stack([mode_vector(spec, k) for k in range(spec.n_sites)])


def eigenstate(spec: LatticeSpec, g: float, j: float, k: int, branch: Branch) -> np.ndarray:
    """Eigenvector R_k (x) v_{k,branch} of H_r in the real-space basis."""
    ms = mode_spectrum(spec, g, j, k)
    v = ms.v_plus if branch is Branch.PLUS else ms.v_minus
    return np.kron(mode_vector(spec, k), v)


def to_mode_basis(spec: LatticeSpec, state: np.ndarray) -> np.ndarray:
    """Unitary map to mode coordinates ordered (k=0 photon, k=0 qubit, k=1 photon, ...)."""
    state = np.asarray(state, dtype=complex)
    if state.shape != (spec.dim,):
        raise DimensionError(f"state must have shape ({spec.dim},), got {state.shape}")
    return (mode_matrix(spec).conj().T @ state.reshape(spec.n_sites, 2)).ravel()


def from_mode_basis(spec: LatticeSpec, state: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_mode_basis`."""
    state = np.asarray(state, dtype=complex)
    if state.shape != (spec.dim,):
        raise DimensionError(f"state must have shape ({spec.dim},), got {state.shape}")
    return (mode_matrix(spec) @ state.reshape(spec.n_sites, 2)).ravel()


def analytic_eigensystem(
    spec: LatticeSpec, g: float, j: float
) -> tuple[np.ndarray, np.ndarray]:
    """All 2N closed-form eigenpairs: (energies, eigenvector columns).

    Ordering is (k=0,+), (k=0,-), (k=1,+), ... — unsorted, so callers can
    keep track of which column belongs to which mode and branch.
    """
    energies = np.empty(spec.dim)
    vectors = np.empty((spec.dim, spec.dim), dtype=complex)
    for k in range(spec.n_sites):
        ms = mode_spectrum(spec, g, j, k)
        r_k = mode_vector(spec, k)
        energies[2 * k] = ms.lambda_plus
        energies[2 * k + 1] = ms.lambda_minus
        vectors[:, 2 * k] = np.kron(r_k, ms.v_plus)
        vectors[:, 2 * k + 1] = np.kron(r_k, ms.v_minus)
    return energies, vectors


# ---------------------------------------------------------------------------
# Brute-force Jacobi eigensolver (oracle)
# ---------------------------------------------------------------------------

MAX_ORACLE_DIM = 64
_JACOBI_TOL_FACTOR = 1e-13
_JACOBI_MAX_SWEEPS = 50


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (ascending) and the matching unitary of eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _round_robin_rounds(n: int) -> list[list[tuple[int, int]]]:
    """Partition all index pairs of range(n) into rounds of disjoint pairs."""
    players = list(range(n)) + ([n] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                pairs.append((min(a, b), max(a, b)))
        rounds.append(pairs)
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigensystem(h: np.ndarray, max_sweeps: int = _JACOBI_MAX_SWEEPS) -> EigenDecomposition:
    """Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.

    Each pair (p, q) is annihilated once per sweep; pairs are scheduled in
    round-robin rounds of disjoint pivots so every round can be applied as a
    single unitary built from 2x2 rotations. Iterates until the off-diagonal
    Frobenius norm falls below 1e-13 * ||H||_F.
    """
    a = np.array(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_ORACLE_DIM:
        raise DimensionError(f"oracle caps at dimension {MAX_ORACLE_DIM}, got {n}")
    if np.max(np.abs(a - a.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
        raise ValueError("jacobi_eigensystem requires a Hermitian matrix")
    a = 0.5 * (a + a.conj().T)

    w = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    target = _JACOBI_TOL_FACTOR * norm
    if n == 1 or norm == 0.0 or _off_norm(a) <= target:
        order = np.argsort(np.diag(a).real, kind="stable")
        return EigenDecomposition(np.diag(a).real[order], w[:, order])

    rounds = _round_robin_rounds(n)
    for _ in range(max_sweeps):
        for pairs in rounds:
            q_mat = np.eye(n, dtype=complex)
            rotated = False
            for p, q in pairs:
                apq = a[p, q]
                m = abs(apq)
                if m == 0.0:
                    continue
                # Reduce the 2x2 subproblem to the real symmetric case via the
                # phase u, then pick the smaller rotation angle (|t| <= 1).
                u = apq / m
                tau = (a[q, q].real - a[p, p].real) / (2.0 * m)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(tau, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                q_mat[p, p] = u * c
                q_mat[p, q] = u * s
                q_mat[q, p] = -s
                q_mat[q, q] = c
                rotated = True
            if rotated:
                a = q_mat.conj().T @ a @ q_mat
                w = w @ q_mat
        a = 0.5 * (a + a.conj().T)
        if _off_norm(a) <= target:
            order = np.argsort(np.diag(a).real, kind="stable")
            return EigenDecomposition(np.diag(a).real[order], w[:, order])
    raise ConvergenceError(
        f"Jacobi sweeps exceeded {max_sweeps} without reaching off-norm {target:.3e}"
    )
