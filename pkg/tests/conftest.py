import numpy as np
import pytest

from heatlab.initial_data import make_u0_twopoint, make_V
from heatlab.pde_solver import SolverConfig, evolve_radial


@pytest.fixture(scope="session")
def V54():
    return make_V(2, 1.25)


@pytest.fixture(scope="session")
def v54_flow(V54):
    cfg = SolverConfig(nr=513, t_final=1.0, snapshots=tuple(np.linspace(0.05, 1.0, 20)))
    return evolve_radial(V54, 2, cfg)


@pytest.fixture(scope="session")
def twopoint_u0():
    return make_u0_twopoint(0.05, 2)


@pytest.fixture(scope="session")
def twopoint_flow(twopoint_u0):
    cfg = SolverConfig(nr=1025, t_final=1.0, snapshots=tuple(np.linspace(0.05, 1.0, 20)))
    return evolve_radial(twopoint_u0, 2, cfg)
