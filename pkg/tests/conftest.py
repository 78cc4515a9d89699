import numpy as np
import pytest

from ibclab import CouplingConstants, CutoffSpec, IbcParams, PhysicalParams, RadialGrid
from ibclab.assembly import assemble_operator, build_basis

Q_REF = 0.9


@pytest.fixture(scope="session")
def coupling():
    return CouplingConstants(Q_REF)


@pytest.fixture(scope="session")
def grid():
    return RadialGrid(1e-3, 10.0, 200)


@pytest.fixture(scope="session")
def cut():
    return CutoffSpec(0.5, 1.5)


@pytest.fixture(scope="session")
def massive():
    return PhysicalParams(mass=1.0)


def make_system(c, grid, cut, g=0.5, n_hats=100, mass=1.0, params=None, **kw):
    params = params or IbcParams.default(c, g=g)
    basis = build_basis(grid, c, params, cut, n_hats, **kw)
    return assemble_operator(basis, c, PhysicalParams(mass=mass), params)


@pytest.fixture(scope="session")
def ref_system(coupling, grid, cut):
    """Reference coupled system: q = 0.9, g = 0.5, mass 1, n = 200, 100 hats."""
    return make_system(coupling, grid, cut)


def random_coeffs(rng, size):
    """``size`` pairs of complex coefficient pairs, shape (size, 2, 2)."""
    z = rng.standard_normal((size, 2, 2, 2))
    return z[..., 0] + 1j * z[..., 1]


def early_creation(sys, dt, n_steps=10):
    """Times and excited-population growth P1(t) - P1(0) from the projected vacuum."""
    from ibclab import evolve, project_vacuum
    traj = evolve(sys, project_vacuum(sys), dt, n_steps)
    p1 = traj.observables["P1"]
    return traj.times[1:], p1[1:] - p1[0]


def loglog_slope(t, y):
    return float(np.polyfit(np.log(t), np.log(np.abs(y)), 1)[0])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
