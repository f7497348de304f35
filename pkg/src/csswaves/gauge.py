"""Gauge fields A0, A1, A2 of a real profile u.

    A1 = K2 * (u^2 / 2)        A2 = -K1 * (u^2 / 2)
    A0 = K1 * (A2 u^2) - K2 * (A1 u^2)

with ``K_j(x) = x_j / (2 pi |x|^2)``. Since the discrete kernels are odd, the map
``rho -> (A1, A2)`` has ``-K`` as its adjoint and the A0 above is exactly the
discrete derivative of the gauge energy, not only its continuum limit.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError
from .grid import convolve, gradient, integrate, l2_norm, sample_kernel


@dataclass(frozen=True, eq=False)
class GaugeSet:
    A0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    rho: np.ndarray
    u_norm_sq: float


def _kernels(grid, corrected):
    return sample_kernel("K1", grid, corrected), sample_kernel("K2", grid, corrected)


def compute_A12(grid, u, corrected=True):
    u = grid.check(u, "u")
    k1, k2 = _kernels(grid, corrected)
    rho = 0.5 * u * u
    return convolve(k2, rho), -convolve(k1, rho)


def compute_A0(grid, u, A1, A2, corrected=True):
    u = grid.check(u, "u")
    A1 = grid.check(A1, "A1")
    A2 = grid.check(A2, "A2")
    k1, k2 = _kernels(grid, corrected)
    u2 = u * u
    return convolve(k1, A2 * u2) - convolve(k2, A1 * u2)


def compute_gauge(grid, u, corrected=True):
    u = grid.check(u, "u")
    A1, A2 = compute_A12(grid, u, corrected)
    A0 = compute_A0(grid, u, A1, A2, corrected)
    return GaugeSet(A0=A0, A1=A1, A2=A2, rho=0.5 * u * u, u_norm_sq=integrate(grid, u * u))


def gauge_residuals(grid, g):
    """L2 norms of the Coulomb-gauge and curl-law defects of ``g``."""
    if g.A1.shape != grid.shape:
        raise GridMismatchError("gauge set does not live on this grid")
    d1A1, d2A1 = gradient(grid, g.A1)
    d1A2, d2A2 = gradient(grid, g.A2)
    return {
        "coulomb": l2_norm(grid, d1A1 + d2A2),
        "curl": l2_norm(grid, d1A2 - d2A1 + g.rho),
    }


def lp_norm(grid, f, p):
    f = grid.check(f)
    return float((grid.weight * np.sum(np.abs(f) ** p)) ** (1.0 / p))


def potential_bound_ratio(grid, u, r=4.0 / 3.0, corrected=True, squared=True):
    """``max_j |A_j^2|_t / |u|_{2r}^2`` with ``1/r - 1/t = 1/2``.

    The squared form scales like ``s^2`` under ``u -> s u``, so it is bounded only
    on bounded sets. ``squared=False`` measures ``|A_j|_t`` instead, the
    homogeneous Hardy-Littlewood-Sobolev ratio, which is scale invariant.
    """
    t = 1.0 / (1.0 / r - 0.5)
    A1, A2 = compute_A12(grid, u, corrected)
    denom = lp_norm(grid, u, 2.0 * r) ** 2
    if denom == 0.0:
        return 0.0
    k = 2 if squared else 1
    return max(lp_norm(grid, np.abs(A1) ** k, t), lp_norm(grid, np.abs(A2) ** k, t)) / denom
