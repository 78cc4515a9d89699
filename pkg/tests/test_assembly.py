import numpy as np
import pytest
from scipy import linalg

from ibclab import (CouplingConstants, IbcParams, PhysicalParams, RadialField, RadialGrid,
                    ShortDistanceCoeffs, assemble_operator, boundary_vectors, build_basis,
                    extract_coeffs, spectrum)
from ibclab.assembly import (GalerkinBasis, SingularElement, assembly_rule, check_overlap,
                             hat_node_positions, linking_coefficients, validate_ibc_params)
from ibclab.errors import (ConstraintViolated, GridTooCoarse, IllConditionedOverlap,
                           SubcriticalCoupling, ZeroCoupling)
from ibclab.short_distance import TestFunction as Profile, fock_symmetry_defect, predicted_defect

from conftest import make_system
from test_short_distance import random_params


def presymmetrized_H(basis, params, mass=0.0):
    """H before symmetrization, assembled independently of finish_pencil."""
    r, w = assembly_rule(basis)
    vals, hvals = basis.sample(r, mass)
    H1 = np.einsum("p,pai,pbi->ab", w, vals.conj(), hvals)
    from ibclab.short_distance import vacuum_action
    out = np.array([vacuum_action(cf, params) for cf in basis.coeffs])
    return np.outer(basis.vac.conj(), out + params.vacuum_energy * basis.vac) + H1


def test_params_validation(coupling):
    validate_ibc_params(IbcParams.default(coupling), coupling)
    with pytest.raises(SubcriticalCoupling):
        c = CouplingConstants(0.8)
        validate_ibc_params(IbcParams.default(c), c)
    with pytest.raises(ZeroCoupling):
        validate_ibc_params(IbcParams.default(coupling, g=0.0), coupling)
    with pytest.raises(ConstraintViolated):
        validate_ibc_params(IbcParams(1.0, 0.0, 0.0, 1.0, 1.0), coupling)
    with pytest.raises(ConstraintViolated) as info:
        validate_ibc_params(IbcParams(1.0, 1.0, 0.0, 0.0, 1.0), coupling)
    assert info.value.code == "ConstraintViolated"


def test_linking_coefficients(coupling):
    params = IbcParams(2.0 - 1j, 0.6, -0.8, 0.3, 0.0)
    mu, nu = linking_coefficients(params)
    assert params.a1 * mu[0] + params.a2 * mu[1] == pytest.approx(params.g, abs=1e-15)
    assert params.a1 * nu[0] + params.a2 * nu[1] == pytest.approx(0, abs=1e-15)
    assert np.linalg.norm(nu) == pytest.approx(1)
    assert abs(np.vdot(nu, mu)) < 1e-15  # minimum norm: mu is orthogonal to the kernel


def test_default_basis_shape(coupling, grid, cut):
    g = 0.7 + 0.2j
    basis = build_basis(grid, coupling, IbcParams.default(coupling, g=g), cut, 40)
    assert basis.size == 2 + 2 * 40
    r = np.geomspace(1e-6, 0.4, 30)
    fp, fm = boundary_vectors(coupling)
    vals, _ = basis.sample(r)
    assert np.allclose(vals[:, 0], g * np.outer(r**-coupling.B, fm), rtol=1e-14)
    assert np.allclose(vals[:, 1], np.outer(r**coupling.B, fp), rtol=1e-14)


def test_every_element_satisfies_ibc(coupling, grid, cut):
    params = IbcParams(0.4 + 0.9j, 0.7, 1.3, 0.5, 0.0)
    params = IbcParams(params.g, 0.7, 1.3, 0.5, (coupling.pairing_constant + 1.3 * 0.5) / 0.7)
    basis = build_basis(grid, coupling, params, cut, 30)
    # sampling grid starts far below the first hat, so hats carry no singular content
    fine = RadialGrid(1e-7, 10.0, 400)
    for k, e in enumerate(basis.elements):
        field = RadialField(fine, basis.sample(fine.nodes)[0][:, k])
        cm, cp = extract_coeffs(field, coupling)
        assert abs(params.a1 * cm + params.a2 * cp - params.g * e.vac) < 1e-8


def test_hat_nodes(grid):
    nodes = hat_node_positions(grid, 100)
    assert len(nodes) == 102 and nodes[0] == grid.r_min and nodes[-1] == grid.r_max
    assert np.all(np.isin(nodes, grid.nodes))
    with pytest.raises(GridTooCoarse):
        hat_node_positions(grid, 199)


def test_reference_assembly(ref_system):
    sys = ref_system
    assert sys.hermiticity_defect <= 1e-10
    assert sys.s_min_eig > 0
    assert np.all(linalg.eigvalsh(sys.S) > 0)
    assert abs(sys.H[0, 1]) > 1e-3
    assert np.allclose(sys.H, sys.H.conj().T, atol=0)


@pytest.mark.parametrize("r_min,n,n_hats", [(1e-2, 60, 20), (1e-3, 200, 100), (1e-4, 300, 150)])
def test_overlap_positive_definite(coupling, cut, r_min, n, n_hats):
    sys = make_system(coupling, RadialGrid(r_min, 10.0, n), cut, n_hats=n_hats)
    assert sys.s_min_eig > 0 and sys.hermiticity_defect <= 1e-10


def test_coupling_entries_scale_with_g(coupling, grid, cut):
    a = make_system(coupling, grid, cut, g=0.3, n_hats=40)
    b = make_system(coupling, grid, cut, g=0.6, n_hats=40)
    # B_bc's field is linear in g, so every vacuum-to-excited entry doubles
    assert np.allclose(b.H[0, 1:], 2 * a.H[0, 1:], rtol=1e-12, atol=1e-14)
    assert np.allclose(b.H[1:, 1:], a.H[1:, 1:], rtol=1e-12, atol=1e-14)
    # the diagonal 1-sector part of B_bc goes like |g|^2
    assert b.H[0, 0].real == pytest.approx(4 * a.H[0, 0].real, rel=1e-10)


def test_random_constraint_tuples_are_hermitian(coupling, grid, cut):
    rng = np.random.default_rng(11)
    for _ in range(5):
        params = random_params(rng, coupling)
        sys = make_system(coupling, grid, cut, params=params, n_hats=40)
        assert sys.hermiticity_defect <= 1e-10


def test_violated_tuple_defect_matches_fock_prediction(coupling, grid, cut):
    params = IbcParams(0.8 + 0.3j, 1.0, 0.5, 0.2, coupling.pairing_constant + 0.1 + 1.0)
    basis = build_basis(grid, coupling, IbcParams(params.g, 1.0, 0.5, 0.2,
                                                  coupling.pairing_constant + 0.1), cut, 40)
    H = presymmetrized_H(basis, params)
    measured = H[0, 1] - np.conj(H[1, 0])
    bc, plus = basis.elements[0], basis.elements[1]
    oracle = fock_symmetry_defect(bc.vac, bc.profile, plus.vac, plus.profile, params, coupling,
                                  PhysicalParams())
    closed = predicted_defect(bc.coeffs, plus.coeffs, coupling) / coupling.pairing_constant \
        * (-params.residual(coupling))
    assert abs(measured) > 0.1
    assert measured == pytest.approx(oracle, rel=1e-6)
    assert oracle == pytest.approx(closed, rel=1e-8)
    assert np.abs(H - H.conj().T)[2:, 2:].max() < 1e-10 * np.abs(H).max()


def test_linking_choice_does_not_change_spectrum(coupling, grid, cut):
    params = IbcParams.default(coupling, g=0.5)
    basis = build_basis(grid, coupling, params, cut, 40)
    mu, nu = linking_coefficients(params)
    other = mu + (0.7 - 0.4j) * nu
    alt = basis.elements[0].profile
    alt = Profile(coupling, ShortDistanceCoeffs(*other), cut)
    swapped = GalerkinBasis([SingularElement(1.0, alt)] + basis.elements[1:], coupling, cut,
                            basis.hat_nodes)
    p = PhysicalParams(mass=1.0)
    e1 = spectrum(assemble_operator(basis, coupling, p, params))
    e2 = spectrum(assemble_operator(swapped, coupling, p, params))
    assert np.abs(e1 - e2).max() <= 1e-10 * np.abs(e1).max()


def test_decoupled_block_structure(coupling, grid, cut):
    params = IbcParams.default(coupling, g=0.5, vacuum_energy=0.25)
    basis = build_basis(grid, coupling, params, cut, 40, decoupled=True)
    sys = assemble_operator(basis, coupling, PhysicalParams(mass=1.0), params)
    assert sys.H[0, 0] == pytest.approx(0.25)
    assert np.all(sys.H[0, 1:] == 0) and np.all(sys.S[0, 1:] == 0)
    assert sys.S[0, 0] == 1


def test_spectrum_is_real(ref_system):
    e = spectrum(ref_system)
    assert np.isrealobj(e) and np.all(np.diff(e) >= 0)
    raw = linalg.eigvals(ref_system.H, ref_system.S)
    assert np.abs(raw.imag).max() <= 1e-12 * np.abs(raw).max()


def test_spectrum_phase_invariance(coupling, cut):
    grid = RadialGrid(1e-2, 10.0, 200)
    base = spectrum(make_system(coupling, grid, cut, g=0.5))
    for theta in (0.7, 2.0, np.pi):
        rot = spectrum(make_system(coupling, grid, cut, g=0.5 * np.exp(1j * theta)))
        assert np.abs(rot - base).max() <= 1e-10


def test_spectrum_phase_invariance_relative_on_reference(coupling, grid, cut, ref_system):
    base = spectrum(ref_system)
    rot = spectrum(make_system(coupling, grid, cut, g=0.5 * np.exp(0.7j)))
    assert np.abs(rot - base).max() <= 1e-10 * max(1.0, np.abs(base).max())


def test_small_g_converges_to_decoupled(coupling, grid, cut):
    params = IbcParams.default(coupling, g=1.0)
    p = PhysicalParams(mass=1.0)
    ref = spectrum(assemble_operator(build_basis(grid, coupling, params, cut, 40, decoupled=True),
                                     coupling, p, params))
    diffs = []
    for g in (1e-2, 1e-3, 1e-4):
        e = spectrum(make_system(coupling, grid, cut, g=g, n_hats=40))
        diffs.append(np.abs(e - ref).max())
    assert diffs[-1] < 1e-3
    assert np.all(np.array(diffs[1:]) < 0.2 * np.array(diffs[:-1])), diffs


def test_lowest_eigenvalue_monotone_under_nested_hats(coupling, cut):
    # n - 1 = 128 makes the hat node sets nested
    grid = RadialGrid(1e-3, 10.0, 129)
    lows = [spectrum(make_system(coupling, grid, cut, n_hats=k))[0] for k in (15, 31, 63, 127)]
    assert np.all(np.diff(lows) <= 1e-9 * np.abs(lows).max()), lows


def test_overlap_guard():
    with pytest.raises(IllConditionedOverlap):
        check_overlap(np.diag([1.0, 1e-14]))
    with pytest.raises(IllConditionedOverlap):
        check_overlap(np.diag([1.0, -1.0]))
