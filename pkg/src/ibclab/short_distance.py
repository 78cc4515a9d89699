"""Short-distance coefficients (c-, c+) of fields near r = 0 and the symmetry defect.

Near the origin every function in the adjoint domain of the coupled sector
looks like ``c- f- r**-B + c+ f+ r**B + o(r**1/2)``. Test functions here are
closed-form: the two singular profiles, optional subleading powers, and a
polynomial cutoff, so the radial operator can be applied exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import NamedTuple

import numpy as np
from numpy.polynomial import Polynomial

from .angular import J_DERIV, CouplingConstants, boundary_vectors
from .errors import CutoffOutsideGrid, SingularFit, SubcriticalCoupling
from .quadrature import graded_quad, interval_quad
from .radial import PhysicalParams, RadialField, RadialGrid, apply_exact


class ShortDistanceCoeffs(NamedTuple):
    c_minus: complex
    c_plus: complex


@dataclass(frozen=True)
class CutoffSpec:
    """chi = 1 on (0, rho1], 0 on [rho2, inf), polynomial smoothstep in between."""

    rho1: float
    rho2: float
    order: int = 3

    def __post_init__(self):
        if not 0 < self.rho1 < self.rho2:
            raise ValueError(f"need 0 < rho1 < rho2, got {self.rho1}, {self.rho2}")
        if self.order < 2:
            raise ValueError("cutoff order must be >= 2")

    def check_grid(self, grid: RadialGrid) -> None:
        if not grid.r_min < self.rho1 < self.rho2 < grid.r_max:
            raise CutoffOutsideGrid(
                f"need r_min < rho1 < rho2 < r_max, got {grid.r_min}, {self.rho1}, "
                f"{self.rho2}, {grid.r_max}")

    @cached_property
    def _step(self) -> list[Polynomial]:
        n = self.order
        x = Polynomial([0.0, 1.0])
        s = x**n * sum(comb(n - 1 + k, k) * (1 - x) ** k for k in range(n))
        # chi(r) = 1 - s((r - rho1) / (rho2 - rho1))
        width = self.rho2 - self.rho1
        chi = 1 - s(Polynomial([-self.rho1 / width, 1.0 / width]))
        return [chi, chi.deriv(), chi.deriv(2)]

    def __call__(self, r, deriv: int = 0) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        inside = (r > self.rho1) & (r < self.rho2)
        out = np.zeros_like(r)
        if deriv == 0:
            out[r <= self.rho1] = 1.0
        out[inside] = self._step[deriv](r[inside])
        return out


@dataclass(frozen=True)
class TestFunction:
    """chi(r) * (c- f- r**-B + c+ f+ r**B + sum_k w_k r**e_k) in one coupled sector.

    ``remainder`` holds subleading terms ``(w_k, e_k)`` with e_k > 1/2, used to
    mimic the o(r**1/2) part of generic domain functions.
    """

    coupling: CouplingConstants
    coeffs: ShortDistanceCoeffs
    cutoff: CutoffSpec
    kappa: int = 1
    remainder: tuple = field(default=())

    def _parts(self, r):
        r = np.asarray(r, dtype=float)[:, None]
        B = self.coupling.B
        fp, fm = boundary_vectors(self.coupling, self.kappa)
        cm, cp = self.coeffs
        sing = cm * fm * r**-B + cp * fp * r**B
        dsing = -B * cm * fm * r ** (-B - 1) + B * cp * fp * r ** (B - 1)
        rem = np.zeros_like(sing)
        drem = np.zeros_like(sing)
        for w, e in self.remainder:
            w = np.asarray(w, dtype=complex)
            rem = rem + w * r**e
            drem = drem + e * w * r ** (e - 1)
        return r[:, 0], sing, dsing, rem, drem

    def __call__(self, r) -> np.ndarray:
        r, sing, _, rem, _ = self._parts(r)
        return self.cutoff(r)[:, None] * (sing + rem)

    def derivative(self, r) -> np.ndarray:
        r, sing, dsing, rem, drem = self._parts(r)
        return (self.cutoff(r, 1)[:, None] * (sing + rem)
                + self.cutoff(r)[:, None] * (dsing + drem))

    def apply_h(self, r, mass: float = 0.0) -> np.ndarray:
        """Radial operator applied in closed form.

        The singular profiles are exact null solutions of the massless
        operator, so only ``mass * beta`` survives on them; this avoids
        cancelling r**(-1-B) terms in floating point.
        """
        r, sing, _, rem, drem = self._parts(r)
        chi, dchi = self.cutoff(r), self.cutoff(r, 1)
        beta_sing = sing * np.array([mass, -mass])
        h_rem = apply_exact(r, rem, drem, self.kappa, self.coupling.q, mass)
        return chi[:, None] * (beta_sing + h_rem) + dchi[:, None] * ((sing + rem) @ J_DERIV.T)

    @property
    def support_end(self) -> float:
        return self.cutoff.rho2


def _require_window(c: CouplingConstants) -> None:
    if not c.in_construction_window:
        raise SubcriticalCoupling(f"need sqrt(3)/2 < |q| < 1, got q = {c.q}")


def make_test_function(c: CouplingConstants, coeffs, cut: CutoffSpec, grid: RadialGrid,
                       kappa: int = 1, remainder=()) -> RadialField:
    _require_window(c)
    cut.check_grid(grid)
    tf = TestFunction(c, ShortDistanceCoeffs(*coeffs), cut, kappa, tuple(remainder))
    return RadialField(grid, tf(grid.nodes))


def extract_coeffs(f: RadialField, c: CouplingConstants, window: int = 6,
                   kappa: int = 1) -> ShortDistanceCoeffs:
    """Joint weighted least-squares fit of the first ``window`` nodes to the two profiles.

    Rows are weighted by r**B and columns normalized before solving, so only
    genuine linear dependence of the profiles (B -> 0) is reported as singular.
    """
    if not 2 <= window <= f.grid.n:
        raise ValueError(f"window must lie in [2, {f.grid.n}], got {window}")
    B = c.B
    fp, fm = boundary_vectors(c, kappa)
    r = f.grid.nodes[:window]
    w = r**B
    # rows: (node, component); columns: (c-, c+)
    design = np.stack([np.outer(w * r**-B, fm), np.outer(w * r**B, fp)], axis=-1).reshape(-1, 2)
    rhs = (w[:, None] * f.values[:window]).reshape(-1)
    scale = np.linalg.norm(design, axis=0)
    if B < 1e-8 or np.linalg.cond(design / scale) > 1e6:
        raise SingularFit(f"design matrix is rank deficient (B = {B})")
    sol = np.linalg.lstsq(design / scale, rhs, rcond=None)[0] / scale
    return ShortDistanceCoeffs(complex(sol[0]), complex(sol[1]))


def _defect_integrand(phi: TestFunction, psi: TestFunction, mass: float):
    def integrand(r):
        a = np.sum(phi(r).conj() * psi.apply_h(r, mass), axis=1)
        b = np.sum(phi.apply_h(r, mass).conj() * psi(r), axis=1)
        return a - b
    return integrand


def symmetry_defect(phi: TestFunction, psi: TestFunction, c: CouplingConstants,
                    p: PhysicalParams, tol: float = 1e-10) -> complex:
    """<phi, h psi> - <h phi, psi> over (0, inf) by graded Gauss quadrature."""
    f = _defect_integrand(phi, psi, p.mass)
    split = min(phi.cutoff.rho1, psi.cutoff.rho1)
    end = max(phi.support_end, psi.support_end)
    rem_exps = [e for _, e in phi.remainder + psi.remainder]
    alpha = min([-2 * c.B] + [e - 1.0 - c.B for e in rem_exps])
    inner = graded_quad(f, split, alpha=alpha, tol=tol)
    breaks = (phi.cutoff.rho1, phi.cutoff.rho2, psi.cutoff.rho1, psi.cutoff.rho2)
    outer = interval_quad(f, split, end, breaks=breaks, tol=tol)
    return complex(inner + outer)


def predicted_defect(d: ShortDistanceCoeffs, cf: ShortDistanceCoeffs,
                     c: CouplingConstants) -> complex:
    """Boundary-form value (conj(d+) c- - conj(d-) c+) * 4B(1+q)."""
    return (np.conj(d.c_plus) * cf.c_minus - np.conj(d.c_minus) * cf.c_plus) * c.pairing_constant


def ibc_vacuum(coeffs, params) -> complex:
    """Vacuum amplitude psi0 = (a1 c- + a2 c+) / g that makes ``coeffs`` IBC consistent."""
    cm, cp = coeffs
    return (params.a1 * cm + params.a2 * cp) / params.g


def vacuum_action(coeffs, params) -> complex:
    """0-sector output conj(g) (a3 c- + a4 c+)."""
    cm, cp = coeffs
    return np.conj(params.g) * (params.a3 * cm + params.a4 * cp)


def fock_symmetry_defect(phi0: complex, phi: TestFunction, psi0: complex, psi: TestFunction,
                         params, c: CouplingConstants, p: PhysicalParams,
                         tol: float = 1e-10) -> complex:
    """<Phi, H Psi> - <H Phi, Psi> on C + L2, with the vacuum row acting by conj(g)(a3 c- + a4 c+)."""
    vac = (np.conj(phi0) * vacuum_action(psi.coeffs, params)
           - np.conj(vacuum_action(phi.coeffs, params)) * psi0)
    return complex(vac + symmetry_defect(phi, psi, c, p, tol=tol))
