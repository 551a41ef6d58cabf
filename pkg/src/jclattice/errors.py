"""Exception types shared across the package."""


class SimulationError(Exception):
    """Base class for all physics/numerics errors raised by this package."""


class SizeError(SimulationError):
    """Lattice or state size outside the supported range."""


class NonFiniteError(SimulationError):
    """A parameter that must be finite is NaN or infinite."""


class RangeError(SimulationError):
    """A scalar argument lies outside its allowed interval."""


class DimensionError(SimulationError):
    """An array argument has the wrong shape or dimension."""


class DegenerateModeError(SimulationError):
    """A mode doublet has zero splitting (chi_k = 0); the branch basis is undefined."""


class DegenerateSpectrumError(SimulationError):
    """The spectral sum would divide by a vanishing gap between coupled eigenstates."""


class ConvergenceError(SimulationError):
    """An iterative routine failed to reach its accuracy target."""


class NumericalIntegrityError(SimulationError):
    """A computed quantity violates a hard bound by more than roundoff slack."""


class ConfigError(SimulationError):
    """An experiment configuration is malformed or violates a precondition."""


class PositivityWarning(UserWarning):
    """A density matrix developed an eigenvalue below the tolerated floor."""
