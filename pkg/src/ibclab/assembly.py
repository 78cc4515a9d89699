"""Galerkin pencil (H, S) for the vacuum sector coupled to one |kappa| = 1 sector.

Every basis element lies in the IBC domain: two closed-form singular
elements carry the short-distance content, and piecewise-linear hats vanishing
at both ends of [r_min, r_max] fill in the rest. Matrix elements use exact
derivatives, so Hermiticity of H is a consequence of the boundary-form
identity rather than something tuned.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy import linalg

from .angular import J_DERIV, CouplingConstants
from .errors import (ConstraintViolated, GridTooCoarse, IllConditionedOverlap,
                     SubcriticalCoupling, ZeroCoupling)
from .quadrature import composite_rule, graded_rule
from .radial import PhysicalParams, RadialGrid, potential_matrix
from .short_distance import CutoffSpec, ShortDistanceCoeffs, TestFunction, vacuum_action

MAX_OVERLAP_COND = 1e12
CONSTRAINT_RTOL = 1e-12


@dataclass(frozen=True)
class IbcParams:
    """Extension data: IBC a1 c- + a2 c+ = g psi0, vacuum row conj(g)(a3 c- + a4 c+)."""

    g: complex
    a1: float
    a2: float
    a3: float
    a4: float
    vacuum_energy: float = 0.0

    @classmethod
    def default(cls, c: CouplingConstants, g: complex = 1.0, vacuum_energy: float = 0.0):
        return cls(complex(g), 1.0, 0.0, 0.0, c.pairing_constant, vacuum_energy)

    def residual(self, c: CouplingConstants) -> float:
        return self.a1 * self.a4 - self.a2 * self.a3 - c.pairing_constant

    def with_g(self, g: complex) -> "IbcParams":
        return replace(self, g=complex(g))


def validate_ibc_params(params: IbcParams, c: CouplingConstants) -> None:
    if not c.in_construction_window:
        raise SubcriticalCoupling(f"need sqrt(3)/2 < |q| < 1, got q = {c.q}")
    if params.g == 0:
        raise ZeroCoupling("g must be nonzero")
    if params.a1 == 0 and params.a2 == 0:
        raise ConstraintViolated(params.residual(c))
    res = params.residual(c)
    if abs(res) > CONSTRAINT_RTOL * (1.0 + c.pairing_constant):
        raise ConstraintViolated(res)


@dataclass(frozen=True)
class SingularElement:
    vac: complex
    profile: TestFunction

    @property
    def coeffs(self) -> ShortDistanceCoeffs:
        return self.profile.coeffs


@dataclass(frozen=True)
class HatElement:
    left: float
    center: float
    right: float
    component: int
    vac: complex = 0.0
    coeffs: ShortDistanceCoeffs = ShortDistanceCoeffs(0.0, 0.0)

    def shape(self, r):
        up = (r - self.left) / (self.center - self.left)
        down = (self.right - r) / (self.right - self.center)
        return np.clip(np.minimum(up, down), 0.0, None)

    def slope(self, r):
        out = np.zeros_like(r)
        out[(r > self.left) & (r < self.center)] = 1.0 / (self.center - self.left)
        out[(r > self.center) & (r < self.right)] = -1.0 / (self.right - self.center)
        return out


@dataclass
class GalerkinBasis:
    elements: list
    coupling: CouplingConstants
    cutoff: CutoffSpec
    hat_nodes: np.ndarray
    kappa: int = 1
    decoupled: bool = False

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def vac(self) -> np.ndarray:
        return np.array([e.vac for e in self.elements], dtype=complex)

    @property
    def coeffs(self) -> np.ndarray:
        """Short-distance coefficients (c-, c+) of every element, shape (N, 2)."""
        return np.array([e.coeffs for e in self.elements], dtype=complex)

    def sample(self, r, mass: float = 0.0):
        """Values and exact operator images of all elements, each shape (len(r), N, 2)."""
        r = np.asarray(r, dtype=float)
        vals = np.zeros((r.size, self.size, 2), dtype=complex)
        hvals = np.zeros_like(vals)
        pot = potential_matrix(r, self.kappa, self.coupling.q, mass)
        for k, e in enumerate(self.elements):
            if isinstance(e, SingularElement):
                vals[:, k] = e.profile(r)
                hvals[:, k] = e.profile.apply_h(r, mass)
            else:
                unit = np.zeros(2)
                unit[e.component] = 1.0
                vals[:, k] = e.shape(r)[:, None] * unit
                hvals[:, k] = e.shape(r)[:, None] * pot[:, :, e.component] \
                    + e.slope(r)[:, None] * J_DERIV[:, e.component]
        return vals, hvals

    def field(self, coeffs, r) -> np.ndarray:
        """1-sector field of the state with basis coefficients ``coeffs`` at radii r."""
        vals, _ = self.sample(r)
        return np.einsum("pni,n->pi", vals, np.asarray(coeffs))


def hat_node_positions(grid: RadialGrid, n_hats: int) -> np.ndarray:
    """n_hats + 2 grid nodes, evenly strided in index, including both ends."""
    if n_hats < 1 or n_hats + 2 > grid.n:
        raise GridTooCoarse(f"cannot place {n_hats} hats on {grid.n} nodes")
    idx = np.round(np.linspace(0, grid.n - 1, n_hats + 2)).astype(int)
    return grid.nodes[idx]


def linking_coefficients(params: IbcParams) -> tuple[np.ndarray, np.ndarray]:
    """(mu for B_bc, nu for B_plus): minimum-norm solution of a1 x + a2 y = g, and the kernel."""
    a = np.array([params.a1, params.a2], dtype=float)
    norm2 = a @ a
    mu = params.g * a / norm2
    nu = np.array([-params.a2, params.a1]) / np.sqrt(norm2)
    return mu.astype(complex), nu.astype(complex)


def build_basis(grid: RadialGrid, c: CouplingConstants, params: IbcParams, cut: CutoffSpec,
                n_hats: int, kappa: int = 1, decoupled: bool = False) -> GalerkinBasis:
    """Elements: B_bc (vac = 1), B_plus (vac = 0), then hats on both spin components.

    With ``decoupled=True`` B_bc is replaced by the bare vacuum (1, 0) and the
    vacuum row is switched off: the g -> 0 reference system.
    """
    validate_ibc_params(params, c)
    cut.check_grid(grid)
    mu, nu = linking_coefficients(params)
    if decoupled:
        mu = np.zeros(2, dtype=complex)
    bc = SingularElement(1.0, TestFunction(c, ShortDistanceCoeffs(*mu), cut, kappa))
    plus = SingularElement(0.0, TestFunction(c, ShortDistanceCoeffs(*nu), cut, kappa))
    nodes = hat_node_positions(grid, n_hats)
    hats = [HatElement(nodes[i - 1], nodes[i], nodes[i + 1], comp)
            for i in range(1, len(nodes) - 1) for comp in (0, 1)]
    return GalerkinBasis([bc, plus] + hats, c, cut, nodes, kappa, decoupled)


@dataclass
class GalerkinSystem:
    H: np.ndarray
    S: np.ndarray
    basis: GalerkinBasis
    params: IbcParams
    coupling: CouplingConstants
    phys: PhysicalParams = field(default_factory=PhysicalParams)
    hermiticity_defect: float = 0.0
    s_min_eig: float = 0.0
    s_cond: float = 0.0

    @property
    def size(self) -> int:
        return self.H.shape[0]

    @property
    def h_norm(self) -> float:
        return float(np.abs(self.H).max())

    @cached_property
    def chol(self) -> np.ndarray:
        """Lower Cholesky factor L of S = L L^dagger."""
        return linalg.cholesky(self.S, lower=True)


def assembly_rule(basis: GalerkinBasis, n: int = 20):
    """Quadrature points covering (0, r_max]: graded toward 0, then split at all breakpoints."""
    r0 = basis.hat_nodes[0]
    inner = graded_rule(r0, alpha=-2 * basis.coupling.B, n=n)
    breaks = np.unique(np.concatenate([basis.hat_nodes, [basis.cutoff.rho1, basis.cutoff.rho2]]))
    outer = composite_rule(breaks, n)
    return np.concatenate([inner[0], outer[0]]), np.concatenate([inner[1], outer[1]])


def finish_pencil(vac, vac_out, S1, H1, vacuum_energy: float = 0.0):
    """Add the vacuum sector to 1-sector matrices and symmetrize.

    Returns ``(H, S, defect)`` where ``defect`` is max|H - H^dagger| / max|H|
    before symmetrization.
    """
    vac = np.asarray(vac, dtype=complex)
    S = np.outer(vac.conj(), vac) + S1
    H = np.outer(vac.conj(), np.asarray(vac_out) + vacuum_energy * vac) + H1
    scale = np.abs(H).max()
    defect = float(np.abs(H - H.conj().T).max() / scale) if scale > 0 else 0.0
    H = 0.5 * (H + H.conj().T)
    S = 0.5 * (S + S.conj().T)
    return H, S, defect


def check_overlap(S: np.ndarray) -> tuple[float, float]:
    eig = linalg.eigvalsh(S)
    if eig[0] <= 0 or eig[-1] / eig[0] > MAX_OVERLAP_COND:
        raise IllConditionedOverlap(
            f"overlap eigenvalues in [{eig[0]:.3e}, {eig[-1]:.3e}]")
    return float(eig[0]), float(eig[-1] / eig[0])


def assemble_operator(basis: GalerkinBasis, c: CouplingConstants, p: PhysicalParams,
                      params: IbcParams, n_quad: int = 20) -> GalerkinSystem:
    r, w = assembly_rule(basis, n_quad)
    vals, hvals = basis.sample(r, p.mass)
    flat = vals.transpose(0, 2, 1).reshape(-1, basis.size)
    hflat = hvals.transpose(0, 2, 1).reshape(-1, basis.size)
    w2 = np.repeat(w, 2)[:, None]
    S1 = flat.conj().T @ (w2 * flat)
    H1 = flat.conj().T @ (w2 * hflat)
    coeffs = basis.coeffs
    vac_out = np.array([vacuum_action(cf, params) for cf in coeffs])
    if basis.decoupled:
        vac_out[:] = 0
    H, S, defect = finish_pencil(basis.vac, vac_out, S1, H1, params.vacuum_energy)
    smin, cond = check_overlap(S)
    return GalerkinSystem(H, S, basis, params, c, p, defect, smin, cond)


def spectrum(sys: GalerkinSystem) -> np.ndarray:
    """Eigenvalues of H v = E S v in ascending order."""
    check_overlap(sys.S)
    return linalg.eigh(sys.H, sys.S, eigvals_only=True)
