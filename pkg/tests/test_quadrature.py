import numpy as np
import pytest

from ibclab.errors import QuadratureNotConverged
from ibclab.quadrature import composite_rule, graded_quad, graded_rule, interval_quad, jacobi_tail


def test_composite_rule_polynomial():
    r, w = composite_rule([0.0, 0.3, 1.0, 2.5], 6)
    assert np.sum(w * r**7) == pytest.approx(2.5**8 / 8, rel=1e-14)


@pytest.mark.parametrize("alpha", [-0.9, -0.5, 0.0, 1.5])
def test_jacobi_tail_is_exact_for_weighted_polynomials(alpha):
    r, w = jacobi_tail(0.2, alpha, 8)
    exact = 0.2 ** (alpha + 4) / (alpha + 4)
    assert np.sum(w * r ** (alpha + 3)) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("alpha", [-0.8717798, -0.5, -0.1])
def test_graded_quad_power_singularity(alpha):
    # several powers at once, including a non-matching one
    f = lambda r: r**alpha + 3 * r ** (alpha + 0.3) + np.cos(r)
    exact = 0.7 ** (alpha + 1) / (alpha + 1) + 3 * 0.7 ** (alpha + 1.3) / (alpha + 1.3) + np.sin(0.7)
    assert graded_quad(f, 0.7, alpha=alpha) == pytest.approx(exact, abs=1e-11)


def test_graded_rule_matches_adaptive():
    r, w = graded_rule(0.5, alpha=-0.8)
    assert np.sum(w * r**-0.8) == pytest.approx(0.5**0.2 / 0.2, rel=1e-12)


def test_interval_quad_breaks():
    f = lambda r: np.abs(r - 1.0)
    assert interval_quad(f, 0.0, 3.0, breaks=[1.0]) == pytest.approx(2.5, abs=1e-13)


def test_nonconvergence_is_reported():
    with pytest.raises(QuadratureNotConverged):
        interval_quad(lambda r: np.sin(400 * r), 0.0, 10.0, tol=1e-12, n=4)
