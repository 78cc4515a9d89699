"""Crank-Nicolson dynamics of the Galerkin pencil, i S dc/dt = H c (hbar = 1)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DegenerateProjection, SolveFailed

SOLVE_RTOL = 1e-12


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n_steps + 1, basis size)
    observables: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)


def _chol(sys) -> np.ndarray:
    chol = getattr(sys, "chol", None)
    return chol if chol is not None else linalg.cholesky(sys.S, lower=True)


def s_norm2(sys, c) -> np.ndarray | float:
    """c^dagger S c, evaluated as |L^dagger c|^2 (rows of a 2-D ``c`` are separate states).

    Forming the quadratic form with S directly loses about cond(S) * eps to
    cancellation; the factored form does not.
    """
    y = np.asarray(c) @ _chol(sys).conj()
    out = np.sum(np.abs(y) ** 2, axis=-1)
    return float(out) if out.ndim == 0 else out


def project_state(sys, overlaps) -> np.ndarray:
    """Coefficients of the S-orthogonal projection given the overlaps <B_a, target>."""
    L = _chol(sys)
    y = linalg.solve_triangular(L, np.asarray(overlaps, dtype=complex), lower=True)
    return linalg.solve_triangular(L.conj().T, y, lower=False)


def project_vacuum(sys) -> np.ndarray:
    """Normalized projection of the bare vacuum (1, 0) onto the Galerkin span.

    The bare vacuum is not in the IBC domain, so this is the closest state that is.
    """
    L = _chol(sys)
    y = linalg.solve_triangular(L, sys.basis.vac.conj(), lower=True)
    norm = np.linalg.norm(y)
    if norm < 1e-6:
        raise DegenerateProjection(f"projection norm {norm:.3e}")
    return linalg.solve_triangular(L.conj().T, y / norm, lower=False)


def estimate_norm(sys, iterations: int = 30, seed: int = 0) -> float:
    """Largest |E| of the pencil from a few power iterations on S^-1 H."""
    cho = (_chol(sys), True)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(sys.size) + 0j
    lam = 0.0
    for _ in range(iterations):
        w = linalg.cho_solve(cho, sys.H @ v)
        lam = np.sqrt(s_norm2(sys, w) / s_norm2(sys, v))
        v = w / np.sqrt(s_norm2(sys, w))
    return float(lam)


def default_time_step(sys) -> float:
    return 0.1 / estimate_norm(sys)


def observables(traj: Trajectory, sys) -> dict:
    """P0, P1, norm2 and the short-distance coefficients along a trajectory."""
    c = traj.states
    vac = sys.basis.vac
    norm2 = s_norm2(sys, c)
    amp0 = c @ vac
    p0 = np.abs(amp0) ** 2
    sd = c @ sys.basis.coeffs
    lo, hi = getattr(sys.basis, "coeff_names", ("c_minus", "c_plus"))
    return {
        "t": traj.times,
        "P0": p0,
        "P1": norm2 - p0,
        "norm2": norm2,
        "psi0": amp0,
        lo: sd[:, 0],
        hi: sd[:, 1],
    }


def evolve(sys, init, dt: float, n_steps: int, wall_time: float | None = None) -> Trajectory:
    """Crank-Nicolson steps (S + i dt/2 H) c_{k+1} = (S - i dt/2 H) c_k.

    The pencil step is solved in the S-orthonormal frame y = L^dagger c
    (S = L L^dagger), where it becomes the Cayley transform of the Hermitian
    matrix L^-1 H L^-dagger; this keeps the norm drift at roundoff level even
    when S is poorly scaled. ``dt`` may be negative (backward evolution). If
    ``wall_time`` is given, a warning is issued when the run is long enough
    for the outer wall to be felt.
    """
    if dt == 0 or n_steps < 0:
        raise ValueError("need dt != 0 and n_steps >= 0")
    t_max = abs(dt) * n_steps
    if wall_time is not None and t_max >= wall_time:
        warnings.warn(f"t_max = {t_max:g} reaches the outer wall (distance {wall_time:g})",
                      stacklevel=2)
    L = _chol(sys)
    h = linalg.solve_triangular(L, linalg.solve_triangular(L, sys.H, lower=True).conj().T,
                                lower=True).conj().T
    h = 0.5 * (h + h.conj().T)
    eye = np.eye(sys.size)
    lhs = eye + 0.5j * dt * h
    rhs = eye - 0.5j * dt * h
    lu = linalg.lu_factor(lhs)
    ys = np.empty((n_steps + 1, sys.size), dtype=complex)
    y = ys[0] = L.conj().T @ np.asarray(init, dtype=complex)
    for k in range(n_steps):
        b = rhs @ y
        new = linalg.lu_solve(lu, b)
        res = b - lhs @ new
        if np.linalg.norm(res) > SOLVE_RTOL * np.linalg.norm(b):
            new = new + linalg.lu_solve(lu, res)
            res = b - lhs @ new
            if np.linalg.norm(res) > SOLVE_RTOL * np.linalg.norm(b):
                raise SolveFailed(f"step {k}: relative residual "
                                  f"{np.linalg.norm(res) / np.linalg.norm(b):.2e}")
        ys[k + 1] = y = new
    states = linalg.solve_triangular(L.conj().T, ys.T, lower=False).T
    traj = Trajectory(dt * np.arange(n_steps + 1), states)
    traj.observables = observables(traj, sys)
    return traj
