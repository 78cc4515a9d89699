"""Two-dimensional algebra of one angular momentum sector.

A sector span(Phi+, Phi-) is represented only through coefficient pairs in the
ordered basis (Phi+, Phi-); no spherical spinors are ever built. Sector vectors
are plain complex numpy arrays of shape (2,).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidSector, OvercriticalCoupling

SQRT3_2 = np.sqrt(3.0) / 2.0

# i * alpha_r in the (Phi+, Phi-) basis
I_ALPHA_R = np.array([[0.0, 1.0], [-1.0, 0.0]])
# -i * alpha_r, the coefficient of d/dr in the radial operator
J_DERIV = -I_ALPHA_R


@dataclass(frozen=True)
class AngularSector:
    kappa: int
    m_j: float = 0.5

    def __post_init__(self):
        if int(self.kappa) != self.kappa or self.kappa == 0:
            raise InvalidSector(f"kappa must be a nonzero integer, got {self.kappa!r}")
        two_m = 2 * self.m_j
        if abs(two_m - round(two_m)) > 1e-12 or round(two_m) % 2 == 0:
            raise InvalidSector(f"m_j must be a half-integer, got {self.m_j!r}")
        if abs(self.m_j) > self.j + 1e-12:
            raise InvalidSector(f"|m_j| = {abs(self.m_j)} exceeds j = {self.j}")

    @property
    def j(self) -> float:
        return abs(self.kappa) - 0.5

    @property
    def is_critical(self) -> bool:
        """True for the four |kappa| = 1 sectors that can be coupled to the vacuum."""
        return abs(self.kappa) == 1


@dataclass(frozen=True)
class CouplingConstants:
    """Coulomb strength ``q`` with derived exponent ``B = sqrt(1 - q**2)``."""

    q: float

    def __post_init__(self):
        if not np.isfinite(self.q) or abs(self.q) >= 1.0:
            raise OvercriticalCoupling(f"|q| = {abs(self.q)!r} >= 1")

    @property
    def B(self) -> float:
        return float(np.sqrt(1.0 - self.q * self.q))

    @property
    def pairing_constant(self) -> float:
        """4B(1+q), the boundary form value <f+, i alpha_r f->."""
        return 4.0 * self.B * (1.0 + self.q)

    @property
    def in_construction_window(self) -> bool:
        return SQRT3_2 < abs(self.q) < 1.0


class BoundaryVectors(NamedTuple):
    f_plus: np.ndarray
    f_minus: np.ndarray


def sector_matrices() -> tuple[np.ndarray, np.ndarray]:
    """Return ``(alpha_r, beta)`` in the (Phi+, Phi-) basis."""
    alpha_r = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    beta = np.array([[1.0, 0.0], [0.0, -1.0]])
    return alpha_r, beta


def boundary_vectors(c: CouplingConstants, kappa: int = 1) -> BoundaryVectors:
    """Null vectors of the indicial matrix for exponents +B (f_plus) and -B (f_minus).

    For ``kappa = +1`` these are the standard pair
    f+ = (1+q-B, -(1+q+B)), f- = (1+q+B, -(1+q-B)). For ``kappa = -1`` the
    same vectors are rotated by (x, y) -> (y, -x), which maps the kappa = +1
    indicial matrix onto the kappa = -1 one and leaves the boundary pairing
    unchanged.
    """
    if abs(kappa) != 1:
        raise InvalidSector(f"boundary vectors exist only for |kappa| = 1, got {kappa}")
    q, b = c.q, c.B
    f_plus = np.array([1.0 + q - b, -(1.0 + q + b)])
    f_minus = np.array([1.0 + q + b, -(1.0 + q - b)])
    if kappa == -1:
        f_plus = np.array([f_plus[1], -f_plus[0]])
        f_minus = np.array([f_minus[1], -f_minus[0]])
    return BoundaryVectors(f_plus, f_minus)


def boundary_pairing(u, v) -> complex:
    """Sesquilinear form <u, i alpha_r v> = conj(u+) v- - conj(u-) v+."""
    u = np.asarray(u)
    v = np.asarray(v)
    return complex(np.conj(u[0]) * v[1] - np.conj(u[1]) * v[0])


def indicial_matrix(kappa: int, q: float, s: float) -> np.ndarray:
    """Leading r**(s-1) coefficient of the massless radial operator on f r**s."""
    return np.array([[q, kappa - s], [kappa + s, q]])
