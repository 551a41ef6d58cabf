"""Config-driven experiment runner: traces, sweeps, and the oracle suite.

Configs are flat JSON documents with exactly the known field names; unknown
keys are a hard error so typos in physics parameters cannot pass silently.
All CSV numerics are written with 17 significant digits so files round-trip
losslessly and identical configs produce byte-identical output.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .cd import exact_cd_matrix, local_cd_matrix, local_cd_params_at
from .errors import ConfigError, SimulationError
from .evolve import (
    DecoherenceRates,
    DensityTrajectory,
    Drive,
    IntegratorConfig,
    Trajectory,
    embed_pure_state,
    evolve_blockwise,
    evolve_lindblad,
    evolve_schrodinger,
    initial_ground_state,
)
from .lattice import Boundary, LatticeSpec, RampSchedule, assemble_hr, couplings_at
from .observables import (
    drive_mode_blocks,
    energy_cost,
    ground_energy_ht,
    ground_fidelity_mixed,
    ground_fidelity_pure,
)
from .spectrum import analytic_eigensystem, jacobi_eigensystem

PRESET_NAMES = ("fig2-pbc", "fig2-obc", "fig3", "fig4a", "fig4b")

_REQUIRED_KEYS = (
    "n_sites",
    "boundary",
    "delta",
    "g0",
    "gf",
    "j0",
    "jf",
    "total_time",
    "drive",
    "gamma",
    "kappa",
    "steps",
)
_OPTIONAL_KEYS = ("record_every", "time_sweep", "kappa_sweep", "output")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment parameters; every module precondition checked at load."""

    spec: LatticeSpec
    schedule: RampSchedule
    drive: Drive
    rates: DecoherenceRates
    integrator: IntegratorConfig
    time_sweep: tuple[float, ...] | None = None
    kappa_sweep: tuple[float, ...] | None = None
    output: str | None = None


def _parse_sweep(name: str, values, minimum: float) -> tuple[float, ...]:
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(f"{name} must be a nonempty list")
    out = tuple(float(v) for v in values)
    if any(v < minimum for v in out):
        raise ConfigError(f"{name} entries must be >= {minimum}")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError(f"{name} must be strictly increasing")
    return out


def parse_config(raw: dict) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from a flat config dictionary."""
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = set(raw) - set(_REQUIRED_KEYS) - set(_OPTIONAL_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = [key for key in _REQUIRED_KEYS if key not in raw]
    if missing:
        raise ConfigError(f"missing config keys: {missing}")
    try:
        boundary = Boundary[str(raw["boundary"]).upper()]
    except KeyError:
        raise ConfigError(f"boundary must be 'PBC' or 'OBC', got {raw['boundary']!r}") from None
    try:
        drive = Drive(str(raw["drive"]).lower())
    except ValueError:
        raise ConfigError(
            f"drive must be one of 'none', 'exact', 'local', got {raw['drive']!r}"
        ) from None
    try:
        spec = LatticeSpec(raw["n_sites"], boundary, raw["delta"])
        schedule = RampSchedule(raw["g0"], raw["gf"], raw["j0"], raw["jf"], raw["total_time"])
        rates = DecoherenceRates(raw["gamma"], raw["kappa"])
        integrator = IntegratorConfig(raw["steps"], raw.get("record_every"))
    except SimulationError as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    time_sweep = None
    if "time_sweep" in raw:
        time_sweep = _parse_sweep("time_sweep", raw["time_sweep"], minimum=1e-12)
    kappa_sweep = None
    if "kappa_sweep" in raw:
        kappa_sweep = _parse_sweep("kappa_sweep", raw["kappa_sweep"], minimum=0.0)
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a string path")
    return ExperimentConfig(
        spec=spec,
        schedule=schedule,
        drive=drive,
        rates=rates,
        integrator=integrator,
        time_sweep=time_sweep,
        kappa_sweep=kappa_sweep,
        output=output,
    )


def load_config_file(path: str | Path) -> dict:
    """Read a JSON config document from disk."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc


def load_preset(name: str) -> dict:
    """Return the raw dictionary of a shipped preset."""
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    text = resources.files("jclattice.presets").joinpath(f"{name}.json").read_text("utf-8")
    return json.loads(text)


def with_steps_override(raw: dict, steps: int) -> dict:
    """Replace the step count and drop any stale recording cadence."""
    out = dict(raw)
    out["steps"] = int(steps)
    out.pop("record_every", None)
    return out


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------


def format_real(value: float) -> str:
    """Scientific notation with 17 significant digits (lossless round trip)."""
    return format(float(value), ".16e")


@dataclass(frozen=True)
class CsvTable:
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError("ragged CSV row")

    def to_text(self) -> str:
        lines = [",".join(self.header)]
        lines.extend(",".join(row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path | None):
        """Write to a file path, or to standard output when path is None."""
        if path is None:
            sys.stdout.write(self.to_text())
        else:
            Path(path).write_text(self.to_text(), encoding="utf-8")


# ---------------------------------------------------------------------------
# Experiment operations
# ---------------------------------------------------------------------------


def _closed_trajectory(config: ExperimentConfig, schedule, drive) -> Trajectory:
    psi0 = initial_ground_state(config.spec, schedule)
    return evolve_blockwise(config.spec, schedule, drive, psi0, config.integrator)


def _open_trajectory(
    config: ExperimentConfig, schedule, drive, rates, integrator=None
) -> DensityTrajectory:
    rho0 = embed_pure_state(config.spec, initial_ground_state(config.spec, schedule))
    return evolve_lindblad(
        config.spec, schedule, drive, rho0, rates, integrator or config.integrator
    )


def run_trace(config: ExperimentConfig) -> CsvTable:
    """Single run; one row per recorded time with couplings and infidelity.

    Closed-system configs evolve a pure state and report the energy cost as
    well; configs with nonzero rates use the master equation and omit it.
    """
    spec, schedule, drive = config.spec, config.schedule, config.drive
    total_time = schedule.total_time
    rows = []
    if config.rates.closed:
        traj = _closed_trajectory(config, schedule, drive)
        header = ("t", "t_over_T", "g", "J", "Im_gL", "infidelity", "delta_E")
        for i, t in enumerate(traj.times):
            fidelity = ground_fidelity_pure(spec, traj.g[i], traj.j[i], traj.states[i])
            cost = energy_cost(spec, schedule, drive, traj.states[i], t)
            rows.append(
                tuple(
                    format_real(v)
                    for v in (
                        t,
                        t / total_time,
                        traj.g[i],
                        traj.j[i],
                        traj.im_g_local[i],
                        1.0 - fidelity,
                        cost.delta_e,
                    )
                )
            )
    else:
        traj = _open_trajectory(config, schedule, drive, config.rates)
        header = ("t", "t_over_T", "g", "J", "Im_gL", "infidelity")
        for i, t in enumerate(traj.times):
            fidelity = ground_fidelity_mixed(spec, traj.g[i], traj.j[i], traj.states[i])
            rows.append(
                tuple(
                    format_real(v)
                    for v in (
                        t,
                        t / total_time,
                        traj.g[i],
                        traj.j[i],
                        traj.im_g_local[i],
                        1.0 - fidelity,
                    )
                )
            )
    return CsvTable(header, tuple(rows))


def _final_infidelity(
    config: ExperimentConfig, total_time: float, drive: Drive, rates: DecoherenceRates
) -> float:
    schedule = RampSchedule(
        config.schedule.g0, config.schedule.gf, config.schedule.j0, config.schedule.jf, total_time
    )
    # Sweep points only need the endpoint state.
    integrator = IntegratorConfig(config.integrator.steps, config.integrator.steps)
    spec = config.spec
    if rates.closed:
        psi0 = initial_ground_state(spec, schedule)
        traj = evolve_blockwise(spec, schedule, drive, psi0, integrator)
        fidelity = ground_fidelity_pure(spec, traj.g[-1], traj.j[-1], traj.states[-1])
    else:
        traj = _open_trajectory(config, schedule, drive, rates, integrator)
        fidelity = ground_fidelity_mixed(spec, traj.g[-1], traj.j[-1], traj.states[-1])
    return 1.0 - fidelity


def _sweep_drives(config: ExperimentConfig) -> tuple[Drive, ...]:
    # Sweeps always carry the undriven baseline so one table contrasts the
    # drive against plain adiabatic evolution, mirroring the trace plots.
    if config.drive is Drive.NONE:
        return (Drive.NONE,)
    return (Drive.NONE, config.drive)


def run_time_sweep(config: ExperimentConfig) -> CsvTable:
    """Final infidelity versus total ramp time, per drive and decay rate."""
    if config.time_sweep is None:
        raise ConfigError("time sweep requires a 'time_sweep' list in the config")
    kappas = config.kappa_sweep or (config.rates.kappa,)
    rows = []
    for drive in _sweep_drives(config):
        for total_time in config.time_sweep:
            for kappa in kappas:
                rates = DecoherenceRates(config.rates.gamma, kappa)
                infidelity = _final_infidelity(config, total_time, drive, rates)
                rows.append(
                    (
                        format_real(total_time),
                        drive.value,
                        format_real(rates.gamma),
                        format_real(kappa),
                        format_real(infidelity),
                    )
                )
    return CsvTable(("T", "drive", "gamma", "kappa", "final_infidelity"), tuple(rows))


def run_kappa_sweep(config: ExperimentConfig) -> CsvTable:
    """Final infidelity versus cavity decay rate, per drive and ramp time."""
    if config.kappa_sweep is None:
        raise ConfigError("kappa sweep requires a 'kappa_sweep' list in the config")
    total_times = config.time_sweep or (config.schedule.total_time,)
    rows = []
    for drive in _sweep_drives(config):
        for kappa in config.kappa_sweep:
            for total_time in total_times:
                rates = DecoherenceRates(config.rates.gamma, kappa)
                infidelity = _final_infidelity(config, total_time, drive, rates)
                rows.append(
                    (
                        format_real(kappa),
                        format_real(total_time),
                        drive.value,
                        format_real(infidelity),
                    )
                )
    return CsvTable(("kappa", "T", "drive", "final_infidelity"), tuple(rows))


# ---------------------------------------------------------------------------
# Oracle validation suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float
    passed: bool
    note: str = ""

    def format(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"{status}  {self.name}: max deviation {self.deviation:.3e} (tol {self.tolerance:.1e})"
        if self.note:
            line += f" [{self.note}]"
        return line


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def format(self) -> str:
        lines = [check.format() for check in self.checks]
        lines.append("all checks passed" if self.passed else "validation FAILED")
        return "\n".join(lines)


def _guarded(name: str, tolerance: float, compute) -> CheckResult:
    try:
        deviation = float(compute())
    except SimulationError as exc:
        return CheckResult(name, float("inf"), tolerance, False, note=str(exc))
    return CheckResult(name, deviation, tolerance, deviation <= tolerance)


def validate(config: ExperimentConfig) -> ValidationReport:
    """Run every analytic-versus-brute-force consistency check on this config."""
    spec, schedule = config.spec, config.schedule
    drive = config.drive
    sample_times = np.linspace(0.0, schedule.total_time, 9)

    def spectrum_check():
        rng = np.random.default_rng(20240801)
        points = [(couplings_at(schedule, t).g, couplings_at(schedule, t).j) for t in sample_times]
        points += [(rng.uniform(0.1, 3.0), rng.uniform(0.0, 3.0)) for _ in range(12)]
        worst = 0.0
        for g, j in points:
            analytic = np.sort(analytic_eigensystem(spec, g, j)[0])
            oracle = jacobi_eigensystem(assemble_hr(spec, g, j)).eigenvalues
            worst = max(worst, float(np.max(np.abs(analytic - oracle))))
        return worst

    def cd_check():
        worst = 0.0
        for t in np.linspace(0.0, schedule.total_time, 64):
            cs = couplings_at(schedule, t)
            blocks = exact_cd_matrix(spec, cs.g, cs.j, cs.dg, cs.dj, method="mode_blocks")
            literal = exact_cd_matrix(spec, cs.g, cs.j, cs.dg, cs.dj, method="spectral_sum")
            worst = max(worst, float(np.max(np.abs(blocks - literal))))
        return worst

    def dense_vs_block_check():
        psi0 = initial_ground_state(spec, schedule)
        dense = evolve_schrodinger(spec, schedule, drive, psi0, config.integrator)
        block = evolve_blockwise(spec, schedule, drive, psi0, config.integrator)
        return float(np.max(np.abs(dense.states - block.states)))

    def exact_vs_local_check():
        psi0 = initial_ground_state(spec, schedule)
        exact = evolve_schrodinger(spec, schedule, Drive.EXACT_CD, psi0, config.integrator)
        local = evolve_schrodinger(spec, schedule, Drive.LOCAL_CD, psi0, config.integrator)
        return float(np.max(np.abs(exact.states - local.states)))

    def convergence_check():
        psi0 = initial_ground_state(spec, schedule)
        coarse = evolve_blockwise(spec, schedule, drive, psi0, config.integrator)
        fine_cfg = IntegratorConfig(
            2 * config.integrator.steps, 2 * config.integrator.record_every
        )
        fine = evolve_blockwise(spec, schedule, drive, psi0, fine_cfg)
        return float(np.max(np.abs(coarse.states - fine.states)))

    try:
        lindblad_traj = _open_trajectory(config, schedule, drive, config.rates)
        lindblad_error = None
    except SimulationError as exc:
        lindblad_traj = None
        lindblad_error = exc

    def _require_lindblad() -> DensityTrajectory:
        if lindblad_traj is None:
            raise lindblad_error
        return lindblad_traj

    def lindblad_trace_check():
        traces = np.trace(_require_lindblad().states, axis1=1, axis2=2)
        return float(np.max(np.abs(traces - 1.0)))

    def lindblad_hermiticity_check():
        states = _require_lindblad().states
        return float(np.max(np.abs(states - states.conj().transpose(0, 2, 1))))

    def lindblad_positivity_check():
        smallest = min(
            jacobi_eigensystem(rho).eigenvalues[0] for rho in _require_lindblad().states
        )
        return float(max(0.0, -smallest))

    def ground_energy_check():
        worst = 0.0
        for t in np.linspace(0.0, schedule.total_time, 16):
            cs = couplings_at(schedule, t)
            blocks = drive_mode_blocks(spec, schedule, drive, t)
            closed_form = ground_energy_ht(spec, cs.g, cs.j, blocks)
            h_t = assemble_hr(spec, cs.g, cs.j).astype(complex)
            if drive is Drive.EXACT_CD:
                h_t += exact_cd_matrix(spec, cs.g, cs.j, cs.dg, cs.dj)
            elif drive is Drive.LOCAL_CD:
                h_t += local_cd_matrix(spec, local_cd_params_at(spec, schedule, t))
            dense = jacobi_eigensystem(h_t).eigenvalues[0]
            worst = max(worst, abs(closed_form - dense))
        return worst

    checks = (
        _guarded("spectrum analytic vs jacobi", 1e-10, spectrum_check),
        _guarded("cd spectral-sum vs mode-blocks", 1e-10, cd_check),
        _guarded("evolution dense vs block", 1e-10, dense_vs_block_check),
        _guarded("evolution exact-cd vs local-cd", 1e-10, exact_vs_local_check),
        _guarded("integrator step-halving", 1e-10, convergence_check),
        _guarded("lindblad trace preservation", 1e-9, lindblad_trace_check),
        _guarded("lindblad hermiticity", 1e-10, lindblad_hermiticity_check),
        _guarded("lindblad positivity", 1e-9, lindblad_positivity_check),
        _guarded("ground energy closed-form vs jacobi", 1e-10, ground_energy_check),
    )
    return ValidationReport(checks)
