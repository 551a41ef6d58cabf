import math

import pytest

from jclattice import Boundary, RampSchedule, make_lattice_spec

HALF_PI = 0.5 * math.pi


@pytest.fixture
def pbc4():
    return make_lattice_spec(4, Boundary.PBC, 1.0)


@pytest.fixture
def obc4():
    return make_lattice_spec(4, Boundary.OBC, 1.0)


@pytest.fixture
def hopping_ramp():
    """Ramp J: 0 -> 2 at fixed g = 1 over T = pi/2."""
    return RampSchedule(1.0, 1.0, 0.0, 2.0, HALF_PI)


@pytest.fixture
def w_state_ramp():
    """Ramp g: 0 -> 1 while J: 2 -> 0 over T = pi/2 (W-state protocol)."""
    return RampSchedule(0.0, 1.0, 2.0, 0.0, HALF_PI)
