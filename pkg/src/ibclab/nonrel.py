"""Non-relativistic s-wave IBC model (vacuum + one particle) as a cross-check.

Radial picture u(r) = r psi(r): the 1-particle norm is 4 pi int |u|^2 dr and
the operator is E0 - (hbar^2 / 2m) d^2/dr^2. Near the origin
u = c_{-1} + c_0 r + o(r); the IBC fixes c_{-1} = -g m / (2 pi hbar^2) psi0 and
the vacuum row acts as conj(g) c_0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import GalerkinSystem, check_overlap, finish_pencil, hat_node_positions
from .errors import ZeroCoupling
from .evolution import Trajectory, evolve, project_vacuum
from .quadrature import composite_rule, graded_quad, interval_quad
from .radial import RadialGrid
from .short_distance import CutoffSpec

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class NonRelParams:
    g: complex
    E0: float = 1.0
    mass: float = 0.5
    hbar: float = 1.0

    def __post_init__(self):
        if self.g == 0:
            raise ZeroCoupling("g must be nonzero")
        if self.mass <= 0:
            raise ValueError("mass must be positive")

    @property
    def kinetic(self) -> float:
        return self.hbar**2 / (2.0 * self.mass)

    @property
    def boundary_constant(self) -> float:
        """2 pi hbar^2 / m, the coefficient of the 1-sector boundary form."""
        return 2.0 * np.pi * self.hbar**2 / self.mass


class NonRelCoeffs(tuple):
    def __new__(cls, c_minus1, c_0):
        return super().__new__(cls, (complex(c_minus1), complex(c_0)))

    @property
    def c_minus1(self):
        return self[0]

    @property
    def c_0(self):
        return self[1]


def nr_ibc_constant(p: NonRelParams) -> complex:
    """-g m / (2 pi hbar^2): c_{-1} = nr_ibc_constant * psi0 for IBC-consistent states."""
    return -p.g * p.mass / (2.0 * np.pi * p.hbar**2)


@dataclass(frozen=True)
class NonRelTestFunction:
    """(vac, chi(r) (c_{-1} + c_0 r + sum_k w_k r**e_k)) with exact derivatives."""

    vac: complex
    coeffs: NonRelCoeffs
    cutoff: CutoffSpec
    remainder: tuple = field(default=())

    def _poly(self, r):
        c1, c0 = self.coeffs
        u = c1 + c0 * r + 0j
        du = c0 + 0 * r + 0j
        d2u = 0 * r + 0j
        for w, e in self.remainder:
            u = u + w * r**e
            du = du + w * e * r ** (e - 1)
            d2u = d2u + w * e * (e - 1) * r ** (e - 2)
        return u, du, d2u

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.cutoff(r) * self._poly(r)[0]

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        u, du, _ = self._poly(r)
        return self.cutoff(r, 1) * u + self.cutoff(r) * du

    def second_derivative(self, r):
        r = np.asarray(r, dtype=float)
        u, du, d2u = self._poly(r)
        return self.cutoff(r, 2) * u + 2 * self.cutoff(r, 1) * du + self.cutoff(r) * d2u


def nr_boundary_term(d, c, p: NonRelParams) -> complex:
    """Green's-identity value (2 pi hbar^2/m)(conj(d_{-1}) c_0 - conj(d_0) c_{-1})."""
    return p.boundary_constant * (np.conj(d[0]) * c[1] - np.conj(d[1]) * c[0])


def nr_symmetry_defect(phi: NonRelTestFunction, psi: NonRelTestFunction, p: NonRelParams,
                       tol: float = 1e-10, sectors: str = "both") -> complex:
    """<Phi, H Psi> - <H Phi, Psi>; ``sectors`` selects "both", "one" or "vacuum" terms."""
    def integrand(r):
        return (np.conj(phi(r)) * psi.second_derivative(r)
                - np.conj(phi.second_derivative(r)) * psi(r))

    split = min(phi.cutoff.rho1, psi.cutoff.rho1)
    end = max(phi.cutoff.rho2, psi.cutoff.rho2)
    alpha = min([0.0] + [e - 2.0 for _, e in phi.remainder + psi.remainder])
    breaks = (phi.cutoff.rho1, phi.cutoff.rho2, psi.cutoff.rho1, psi.cutoff.rho2)
    total = (graded_quad(integrand, split, alpha=alpha, tol=tol)
             + interval_quad(integrand, split, end, breaks=breaks, tol=tol))
    one = -FOUR_PI * p.kinetic * total
    vac = (np.conj(phi.vac) * np.conj(p.g) * psi.coeffs[1]
           - np.conj(np.conj(p.g) * phi.coeffs[1]) * psi.vac)
    if sectors == "one":
        return complex(one)
    if sectors == "vacuum":
        return complex(vac)
    return complex(one + vac)


@dataclass(frozen=True)
class NonRelHat:
    left: float
    center: float
    right: float
    vac: complex = 0.0
    coeffs: NonRelCoeffs = NonRelCoeffs(0.0, 0.0)

    def __call__(self, r):
        up = (r - self.left) / (self.center - self.left)
        down = (self.right - r) / (self.right - self.center)
        return np.clip(np.minimum(up, down), 0.0, None)

    def derivative(self, r):
        out = np.zeros_like(r)
        out[(r > self.left) & (r < self.center)] = 1.0 / (self.center - self.left)
        out[(r > self.center) & (r < self.right)] = -1.0 / (self.right - self.center)
        return out


@dataclass
class NonRelBasis:
    elements: list
    cutoff: CutoffSpec
    hat_nodes: np.ndarray
    coeff_names: tuple = ("c_minus1", "c_0")

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def vac(self) -> np.ndarray:
        return np.array([e.vac for e in self.elements], dtype=complex)

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([e.coeffs for e in self.elements], dtype=complex)


def nr_build_basis(grid: RadialGrid, p: NonRelParams, cut: CutoffSpec, n_hats: int) -> NonRelBasis:
    """B_bc = (1, K chi), B_lin = (0, chi r), then hats; K = nr_ibc_constant(p)."""
    cut.check_grid(grid)
    k = nr_ibc_constant(p)
    bc = NonRelTestFunction(1.0, NonRelCoeffs(k, 0.0), cut)
    lin = NonRelTestFunction(0.0, NonRelCoeffs(0.0, 1.0), cut)
    nodes = hat_node_positions(grid, n_hats)
    hats = [NonRelHat(nodes[i - 1], nodes[i], nodes[i + 1]) for i in range(1, len(nodes) - 1)]
    return NonRelBasis([bc, lin] + hats, cut, nodes)


def nr_assemble(basis: NonRelBasis, p: NonRelParams, n_quad: int = 20) -> GalerkinSystem:
    """Pencil for the s-wave model.

    Kinetic entries use -int conj(u_a) u_b'' when u_b is smooth and the weak
    form int conj(u_a') u_b' when u_b is a hat; the two routes meet only
    through Hermiticity, which is reported before symmetrization.
    """
    breaks = np.unique(np.concatenate([[0.0], basis.hat_nodes,
                                       [basis.cutoff.rho1, basis.cutoff.rho2]]))
    r, w = composite_rule(breaks, n_quad)
    u = np.stack([e(r) for e in basis.elements], axis=1).astype(complex)
    du = np.stack([e.derivative(r) for e in basis.elements], axis=1).astype(complex)
    kin_b = np.empty_like(u)
    for k, e in enumerate(basis.elements):
        kin_b[:, k] = du[:, k] if isinstance(e, NonRelHat) else -e.second_derivative(r)
    S1 = FOUR_PI * u.conj().T @ (w[:, None] * u)
    hat = np.array([isinstance(e, NonRelHat) for e in basis.elements])
    # column b smooth: -conj(u_a) u_b''; column b hat: conj(u_a') hat_b'
    T = np.where(hat[None, :], du.conj().T @ (w[:, None] * kin_b), u.conj().T @ (w[:, None] * kin_b))
    H1 = FOUR_PI * (p.E0 * (u.conj().T @ (w[:, None] * u)) + p.kinetic * T)
    vac_out = np.conj(p.g) * basis.coeffs[:, 1]
    H, S, defect = finish_pencil(basis.vac, vac_out, S1, H1)
    smin, cond = check_overlap(S)
    return GalerkinSystem(H, S, basis, p, None, None, defect, smin, cond)


def nr_assemble_and_evolve(grid: RadialGrid, p: NonRelParams, cut: CutoffSpec, n_hats: int,
                           dt: float, n_steps: int) -> Trajectory:
    sys = nr_assemble(nr_build_basis(grid, p, cut, n_hats), p)
    return evolve(sys, project_vacuum(sys), dt, n_steps)
