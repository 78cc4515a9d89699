import warnings
from types import SimpleNamespace

import numpy as np
import pytest

from ibclab import evolve, project_vacuum
from ibclab.errors import DegenerateProjection
from ibclab.evolution import default_time_step, estimate_norm, project_state, s_norm2
from ibclab.assembly import spectrum

from conftest import early_creation, loglog_slope, make_system


@pytest.fixture(scope="module")
def ref_run(ref_system):
    dt = default_time_step(ref_system)
    return ref_system, evolve(ref_system, project_vacuum(ref_system), dt, 1000)


def test_projected_vacuum(ref_system):
    c = project_vacuum(ref_system)
    assert s_norm2(ref_system, c) == pytest.approx(1.0, abs=1e-12)
    assert abs(c @ ref_system.basis.vac) ** 2 > 0
    again = project_state(ref_system, ref_system.S @ c)
    assert np.allclose(again, c, atol=1e-8 * np.abs(c).max())


def test_projection_approaches_vacuum_as_g_vanishes(coupling, grid, cut):
    p0 = []
    for g in (0.5, 0.05, 0.005):
        sys = make_system(coupling, grid, cut, g=g, n_hats=40)
        p0.append(abs(project_vacuum(sys) @ sys.basis.vac) ** 2)
    assert np.all(np.diff(p0) > 0) and p0[-1] > 0.999


def test_degenerate_projection():
    stub = SimpleNamespace(S=np.eye(2), basis=SimpleNamespace(vac=np.array([1e-9, 0.0])))
    with pytest.raises(DegenerateProjection):
        project_vacuum(stub)


def test_norm_estimate_matches_spectrum(ref_system):
    top = np.abs(spectrum(ref_system)).max()
    # power iteration approaches the top |E| from below
    est = estimate_norm(ref_system)
    assert 0.98 * top <= est <= top * (1 + 1e-9)


def test_norm_conservation(ref_run):
    _, traj = ref_run
    o = traj.observables
    assert np.abs(o["norm2"][:101] - 1).max() <= 1e-10
    assert np.abs(o["norm2"] - 1).max() <= 1e-10


def test_observables_contract(ref_run):
    _, traj = ref_run
    o = traj.observables
    assert np.abs(o["P0"] + o["P1"] - o["norm2"]).max() <= 1e-12
    assert o["P0"][0] + o["P1"][0] == pytest.approx(1.0, abs=1e-12)
    # the evolution never leaves the IBC domain: c_minus = g psi0
    assert np.abs(o["c_minus"] / o["psi0"] - 0.5).max() <= 1e-8


def test_vacuum_decays(ref_run):
    _, traj = ref_run
    p0 = traj.observables["P0"]
    assert p0[-1] < 1 - 1e-6
    assert np.all(p0[1:] < p0[0])


def test_time_reversal(ref_run):
    sys, traj = ref_run
    back = evolve(sys, traj.states[-1], -traj.times[1], 1000)
    assert np.abs(back.states[-1] - traj.states[0]).max() <= 1e-8


def test_quadratic_onset(ref_system):
    t, dp1 = early_creation(ref_system, 0.01 / estimate_norm(ref_system))
    assert loglog_slope(t, dp1) == pytest.approx(2.0, abs=0.05)


def test_halving_g_quarters_creation(coupling, grid, cut):
    small = make_system(coupling, grid, cut, g=0.01)
    dt = 0.01 / estimate_norm(small)
    _, a = early_creation(make_system(coupling, grid, cut, g=0.02), dt)
    _, b = early_creation(small, dt)
    assert a[-1] / b[-1] == pytest.approx(4.0, rel=0.1)


def test_phase_covariance(coupling, grid, cut, ref_system):
    theta = 1.1
    rot = make_system(coupling, grid, cut, g=0.5 * np.exp(1j * theta))
    dt = default_time_step(ref_system)
    a = evolve(ref_system, project_vacuum(ref_system), dt, 200).observables
    b = evolve(rot, project_vacuum(rot), dt, 200).observables
    for key in ("P0", "P1"):
        assert np.abs(a[key] - b[key]).max() <= 1e-10
    # psi0 differs by one constant phase along the whole trajectory
    ratio = b["psi0"] / a["psi0"]
    assert np.allclose(np.abs(ratio), 1, atol=1e-9)
    assert np.allclose(ratio, ratio[0], atol=1e-9)
    assert np.allclose(b["c_minus"], 0.5 * np.exp(1j * theta) * b["psi0"], atol=1e-12)


def test_wall_warning(ref_system):
    with pytest.warns(UserWarning, match="outer wall"):
        evolve(ref_system, project_vacuum(ref_system), 0.5, 3, wall_time=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        evolve(ref_system, project_vacuum(ref_system), 0.1, 3, wall_time=1.0)


def test_bad_step():
    with pytest.raises(ValueError):
        evolve(None, None, 0.0, 3)
