"""Lattice geometry, coupling ramps, and the single-excitation Hamiltonian.

A lattice of N sites hosts one excitation that is either a cavity photon or a
qubit flip, giving a 2N-dimensional real-space basis ordered site-major:
index 2(j-1) is the photon on site j, index 2(j-1)+1 the qubit on site j.
All quantities are dimensionless (hbar = 1, energies in units of the
reference coupling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NonFiniteError, RangeError, SizeError


class Boundary(Enum):
    """Boundary condition; the enum value is the boundary index b."""

    PBC = 1
    OBC = 0

    @property
    def b(self) -> int:
        return self.value


class Flavor(Enum):
    """Which kind of excitation a basis state carries on its site."""

    PHOTON = 0
    QUBIT = 1


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice size, boundary condition, and constant qubit-cavity detuning.

    PBC needs at least 3 sites: on a 2-site ring both hopping bonds coincide
    and would silently double the effective hopping, so that case is rejected.
    """

    n_sites: int
    boundary: Boundary
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "delta", float(self.delta))
        n_min = 3 if self.boundary is Boundary.PBC else 2
        if self.n_sites < n_min:
            raise SizeError(
                f"{self.boundary.name} lattice needs at least {n_min} sites, got {self.n_sites}"
            )
        if not math.isfinite(self.delta):
            raise NonFiniteError(f"detuning must be finite, got {self.delta}")

    @property
    def dim(self) -> int:
        """Dimension of the single-excitation space (2N)."""
        return 2 * self.n_sites


def make_lattice_spec(n: int, boundary: Boundary, delta: float) -> LatticeSpec:
    """Validating constructor for :class:`LatticeSpec`."""
    return LatticeSpec(n, boundary, delta)


@dataclass(frozen=True)
class RampSchedule:
    """Linear ramps g(t) = g0 + t*dg and J(t) = j0 + t*dj over t in [0, T]."""

    g0: float
    gf: float
    j0: float
    jf: float
    total_time: float

    def __post_init__(self):
        for name in ("g0", "gf", "j0", "jf", "total_time"):
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            if not math.isfinite(value):
                raise NonFiniteError(f"{name} must be finite, got {value}")
        if self.total_time <= 0.0:
            raise RangeError(f"total_time must be positive, got {self.total_time}")

    @property
    def dg(self) -> float:
        return (self.gf - self.g0) / self.total_time

    @property
    def dj(self) -> float:
        return (self.jf - self.j0) / self.total_time


@dataclass(frozen=True)
class CouplingSample:
    """Instantaneous couplings and their constant ramp rates at time t."""

    g: float
    j: float
    dg: float
    dj: float
    t: float


def couplings_at(schedule: RampSchedule, t: float) -> CouplingSample:
    """Evaluate the linear ramps at time t in [0, T]."""
    t = float(t)
    if not 0.0 <= t <= schedule.total_time:
        raise RangeError(f"t={t} outside [0, {schedule.total_time}]")
    return CouplingSample(
        g=schedule.g0 + t * schedule.dg,
        j=schedule.j0 + t * schedule.dj,
        dg=schedule.dg,
        dj=schedule.dj,
        t=t,
    )


def basis_index(spec: LatticeSpec, site: int, flavor: Flavor) -> int:
    """Linear index of the (site, flavor) basis state; sites are 1-based."""
    if not 1 <= site <= spec.n_sites:
        raise RangeError(f"site {site} outside [1, {spec.n_sites}]")
    return 2 * (site - 1) + flavor.value


def basis_site_flavor(spec: LatticeSpec, index: int) -> tuple[int, Flavor]:
    """Inverse of :func:`basis_index`."""
    if not 0 <= index < spec.dim:
        raise RangeError(f"basis index {index} outside [0, {spec.dim - 1}]")
    return index // 2 + 1, Flavor(index % 2)


def hr_components(spec: LatticeSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Constant matrices (D, V_g, V_J) with H_r = delta*D + g*V_g + J*V_J.

    D holds the photon number term, V_g the onsite qubit-cavity coupling,
    and V_J the photon hopping including the boundary bond scaled by b.
    """
    n = spec.n_sites
    dim = spec.dim
    d_mat = np.zeros((dim, dim))
    v_g = np.zeros((dim, dim))
    v_j = np.zeros((dim, dim))
    for j in range(n):
        p = 2 * j
        d_mat[p, p] = 1.0
        v_g[p, p + 1] = 1.0
        v_g[p + 1, p] = 1.0
    for j in range(n - 1):
        v_j[2 * j, 2 * (j + 1)] = -1.0
        v_j[2 * (j + 1), 2 * j] = -1.0
    if spec.boundary is Boundary.PBC:
        v_j[0, 2 * (n - 1)] = -1.0
        v_j[2 * (n - 1), 0] = -1.0
    return d_mat, v_g, v_j


def assemble_hr(spec: LatticeSpec, g: float, j: float) -> np.ndarray:
    """Dense 2N x 2N single-excitation Hamiltonian at couplings (g, J).

    Block structure: onsite blocks [[delta, g], [g, 0]] and hopping blocks
    [[-J, 0], [0, 0]] between nearest-neighbour sites, with the corner bond
    present only under PBC.
    """
    d_mat, v_g, v_j = hr_components(spec)
    return spec.delta * d_mat + float(g) * v_g + float(j) * v_j


def is_hermitian(matrix: np.ndarray, tol: float = 1e-12) -> bool:
    """Entrywise Hermiticity check used by matrix-valued contracts."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.max(np.abs(matrix - matrix.conj().T)) <= tol)
