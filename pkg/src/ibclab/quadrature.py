"""Composite Gauss rules, including geometric grading toward an integrable r = 0 singularity.

All rules are returned as ``(nodes, weights)`` so that integrals over many
integrands (Galerkin matrix elements) can share one set of evaluation points.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import special

from .errors import QuadratureNotConverged

DEFAULT_ORDER = 20


@lru_cache(maxsize=None)
def _legendre(n: int):
    return special.roots_legendre(n)


@lru_cache(maxsize=None)
def _jacobi(n: int, alpha: float):
    # weight (1 + x)**alpha on [-1, 1]
    return special.roots_jacobi(n, 0.0, alpha)


def gauss_panel(a: float, b: float, n: int = DEFAULT_ORDER):
    x, w = _legendre(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_rule(breaks, n: int = DEFAULT_ORDER):
    """Gauss-Legendre on every interval between consecutive breakpoints."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = _legendre(n)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    weights = half * w
    return nodes.ravel(), weights.ravel()


def jacobi_tail(a: float, alpha: float, n: int = DEFAULT_ORDER):
    """Rule for int_0^a f(r) dr that is exact when f = r**alpha * polynomial."""
    x, w = _jacobi(n, float(alpha))
    nodes = 0.5 * a * (x + 1.0)
    weights = w * (0.5 * a) ** (alpha + 1.0) / nodes**alpha
    return nodes, weights


def graded_rule(b: float, alpha: float = 0.0, n: int = DEFAULT_ORDER,
                ratio: float = 2.0, depth: float = 1e-16):
    """Panels [b/ratio**(k+1), b/ratio**k] down to ``depth * b``, then a Jacobi tail.

    The innermost tail uses weight r**alpha, so the leading singular power of
    the integrand is integrated exactly; subleading powers only see a panel
    of width ``depth * b``.
    """
    n_panels = int(np.ceil(np.log(1.0 / depth) / np.log(ratio)))
    edges = b / ratio ** np.arange(n_panels + 1)
    nodes, weights = composite_rule(edges[::-1], n)
    tn, tw = jacobi_tail(edges[-1], alpha, n)
    return np.concatenate([tn, nodes]), np.concatenate([tw, weights])


def graded_quad(f, b: float, alpha: float = 0.0, tol: float = 1e-10,
                panel_tol: float = 1e-14, n: int = DEFAULT_ORDER, ratio: float = 2.0,
                floor: float = 1e-250, block: int = 64) -> float | complex:
    """Integrate ``f`` over (0, b] with geometric grading toward r = 0.

    Panels shrink by ``ratio`` until one contributes less than ``panel_tol``
    (or r drops below ``floor * b``); the remaining (0, a] is closed with a
    Jacobi rule of weight r**alpha, so ``alpha`` should be the leading power
    of the integrand at the origin. Every panel is also evaluated at half
    order; the summed discrepancy is the error estimate checked against ``tol``.
    """
    xh, wh = _legendre(n)
    xl, wl = _legendre(n // 2)
    total = 0.0
    err = 0.0
    hi = b
    done = False
    while not done:
        edges = hi / ratio ** np.arange(block + 1)
        lo_e, hi_e = edges[1:, None], edges[:-1, None]
        half = 0.5 * (hi_e - lo_e)
        ph = (half * wh * f((lo_e + half * (xh + 1.0)).ravel()).reshape(block, -1)).sum(axis=1)
        pl = (half * wl * f((lo_e + half * (xl + 1.0)).ravel()).reshape(block, -1)).sum(axis=1)
        small = np.abs(ph) < panel_tol
        small[:3] = False
        deep = edges[1:] < floor * b
        stop = np.flatnonzero(small | deep)
        k = stop[0] + 1 if stop.size else block
        total = total + ph[:k].sum()
        err += np.abs(ph[:k] - pl[:k]).sum()
        hi = edges[k]
        done = stop.size > 0
    tn, tw = jacobi_tail(hi, alpha, n)
    tail = np.sum(tw * f(tn))
    tn2, tw2 = jacobi_tail(hi, alpha, n // 2)
    err += abs(tail - np.sum(tw2 * f(tn2)))
    total = total + tail
    if not err <= tol:
        raise QuadratureNotConverged(f"error estimate {err:.3e} exceeds {tol:.1e}")
    return total


def interval_quad(f, a: float, b: float, breaks=(), tol: float = 1e-10,
                  n: int = DEFAULT_ORDER) -> float | complex:
    """Composite Gauss over [a, b] split at ``breaks``, with an order-halving error check."""
    pts = np.unique(np.concatenate([[a, b], [x for x in breaks if a < x < b]]))
    xh, wh = composite_rule(pts, n)
    xl, wl = composite_rule(pts, n // 2)
    val = np.sum(wh * f(xh))
    err = abs(val - np.sum(wl * f(xl)))
    if err > tol * max(1.0, abs(val)):
        raise QuadratureNotConverged(f"error estimate {err:.3e} exceeds {tol:.1e}")
    return val
