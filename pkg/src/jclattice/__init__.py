"""Single-excitation Jaynes-Cummings lattice simulator with local CD driving."""

from .cd import (
    LocalCdParams,
    cd_strength,
    exact_cd_matrix,
    local_cd_matrix,
    local_cd_params_at,
    project_to_mode_blocks,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateModeError,
    DegenerateSpectrumError,
    DimensionError,
    NonFiniteError,
    NumericalIntegrityError,
    PositivityWarning,
    RangeError,
    SimulationError,
    SizeError,
)
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
    vacuum_projector,
)
from .lattice import (
    Boundary,
    CouplingSample,
    Flavor,
    LatticeSpec,
    RampSchedule,
    assemble_hr,
    basis_index,
    basis_site_flavor,
    couplings_at,
    make_lattice_spec,
)
from .observables import (
    EnergyCostSample,
    energy_cost,
    ground_energy_ht,
    ground_fidelity_mixed,
    ground_fidelity_pure,
    w_state_reference,
)
from .runner import (
    CsvTable,
    ExperimentConfig,
    load_preset,
    parse_config,
    run_kappa_sweep,
    run_time_sweep,
    run_trace,
    validate,
)
from .spectrum import (
    Branch,
    EigenDecomposition,
    ModeSpectrum,
    eigenstate,
    from_mode_basis,
    jacobi_eigensystem,
    mode_detuning,
    mode_spectrum,
    mode_vector,
    to_mode_basis,
)

__version__ = "0.1.0"
