"""Energy functional, its L2 gradient and Hessian action, and the identities they obey.

    Phi(u) = 1/2 int (|grad u|^2 + V u^2) + N(u) - int F(x, u)
    N(u)   = 1/2 int (A1^2 + A2^2) u^2
    g(u)   = H u + (A1^2 + A2^2) u + A0 u - f(x, u)

All fields are taken in the Dirichlet subspace (row/column 0 zeroed), where the
edge-difference Dirichlet energy equals ``1/2 <H u, u>`` exactly.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .gauge import compute_A0, compute_A12, compute_gauge
from .grid import convolve, inner, l2_norm, random_bumps, sample_kernel
from .operator import assemble, equivalent_norm_sq, project, quadratic_form, split


@dataclass(eq=False)
class Problem:
    """Everything needed to evaluate Phi on one grid."""

    grid: object
    potential: object
    model: object
    op: object
    split: object
    b: np.ndarray
    corrected: bool = True

    @property
    def V(self):
        return self.op.V


def make_problem(grid, potential, model, k_max=6, corrected=True):
    op = assemble(potential, grid)
    return Problem(
        grid=grid,
        potential=potential,
        model=model,
        op=op,
        split=split(op, k_max),
        b=model.weight(grid.r2),
        corrected=corrected,
    )


@dataclass(frozen=True)
class EnergyBreakdown:
    quadratic: float
    gauge: float
    potential_energy: float
    total: float
    norm_plus_sq: float
    norm_minus_sq: float

    def split_total(self):
        """Phi evaluated through the equivalent norm instead of the Dirichlet energy."""
        return 0.5 * (self.norm_plus_sq - self.norm_minus_sq) + self.gauge - self.potential_energy

    def to_dict(self):
        return {
            "quadratic": self.quadratic,
            "gauge": self.gauge,
            "potential_energy": self.potential_energy,
            "total": self.total,
            "norm_plus_sq": self.norm_plus_sq,
            "norm_minus_sq": self.norm_minus_sq,
        }


@dataclass(frozen=True, eq=False)
class GradientReport:
    g: np.ndarray
    residual: float
    pairing: float

    def to_dict(self):
        return {"residual": self.residual, "pairing": self.pairing}


def _prepare(problem, u):
    grid = problem.grid
    return grid.restrict(grid.check(u, "u"))


def gauge_energy(problem, u):
    u = _prepare(problem, u)
    A1, A2 = compute_A12(problem.grid, u, problem.corrected)
    return 0.5 * inner(problem.grid, (A1 * A1 + A2 * A2), u * u)


def energy(problem, u):
    grid = problem.grid
    u = _prepare(problem, u)
    quad = quadratic_form(problem.op, u)
    A1, A2 = compute_A12(grid, u, problem.corrected)
    gauge = 0.5 * inner(grid, A1 * A1 + A2 * A2, u * u)
    pot = inner(grid, problem.b, problem.model.G(u))
    minus, plus = equivalent_norm_sq(problem.split, *project(problem.split, u))
    total = quad + gauge - pot
    if not np.isfinite(total):
        raise NumericError("energy evaluation produced a non-finite value")
    return EnergyBreakdown(quad, gauge, pot, total, plus, minus)


def phi(problem, u):
    """Total energy only; cheaper than ``energy`` (skips the split form)."""
    grid = problem.grid
    u = _prepare(problem, u)
    A1, A2 = compute_A12(grid, u, problem.corrected)
    total = (
        quadratic_form(problem.op, u)
        + 0.5 * inner(grid, A1 * A1 + A2 * A2, u * u)
        - inner(grid, problem.b, problem.model.G(u))
    )
    if not np.isfinite(total):
        raise NumericError("energy evaluation produced a non-finite value")
    return total


def gradient_parts(problem, u):
    """Return ``(Hu, gauge_term, f_term)`` with ``g = Hu + gauge_term - f_term``."""
    grid = problem.grid
    u = _prepare(problem, u)
    gs = compute_gauge(grid, u, problem.corrected)
    Hu = problem.op.apply(u)
    gauge_term = grid.restrict((gs.A1**2 + gs.A2**2 + gs.A0) * u)
    f_term = grid.restrict(problem.b * problem.model.g(u))
    return Hu, gauge_term, f_term


def gradient_field(problem, u):
    grid = problem.grid
    u = _prepare(problem, u)
    Hu, gauge_term, f_term = gradient_parts(problem, u)
    g = Hu + gauge_term - f_term
    if not np.all(np.isfinite(g)):
        raise NumericError("gradient evaluation produced non-finite values")
    return GradientReport(g=g, residual=l2_norm(grid, g), pairing=inner(grid, g, u))


def hessian_apply(problem, u, w):
    """Action of the second derivative of Phi at ``u`` on ``w``."""
    grid = problem.grid
    u = _prepare(problem, u)
    w = grid.restrict(grid.check(w, "w"))
    k1 = sample_kernel("K1", grid, problem.corrected)
    k2 = sample_kernel("K2", grid, problem.corrected)
    u2 = u * u
    A1, A2 = compute_A12(grid, u, problem.corrected)
    A0 = compute_A0(grid, u, A1, A2, problem.corrected)
    uw = u * w
    dA1 = convolve(k2, uw)
    dA2 = -convolve(k1, uw)
    dA0 = convolve(k1, dA2 * u2 + 2.0 * A2 * uw) - convolve(k2, dA1 * u2 + 2.0 * A1 * uw)
    gauge_part = (A1 * A1 + A2 * A2 + A0) * w + (2.0 * (A1 * dA1 + A2 * dA2) + dA0) * u
    out = problem.op.apply(w) + gauge_part - problem.b * problem.model.dg(u) * w
    return grid.restrict(out)


# --------------------------------------------------------------------------- identities


def gauge_energy_identity(problem, u):
    """``N(u)``, ``<N'(u), u>`` and the relative defect of ``<N'(u), u> = 6 N(u)``."""
    grid = problem.grid
    u = _prepare(problem, u)
    gs = compute_gauge(grid, u, problem.corrected)
    a2 = gs.A1**2 + gs.A2**2
    n_val = 0.5 * inner(grid, a2, u * u)
    pairing = inner(grid, (a2 + gs.A0) * u, u)
    defect = abs(pairing - 6.0 * n_val) / max(6.0 * n_val, 1e-30)
    return {"N": n_val, "pairing": pairing, "defect": defect}


def pairing_identity(problem, u):
    """Compare ``<g, u>`` with ``||u+||^2 - ||u-||^2 + 3 int |A|^2 u^2 - int f u``."""
    grid = problem.grid
    u = _prepare(problem, u)
    rep = gradient_field(problem, u)
    minus, plus = equivalent_norm_sq(problem.split, *project(problem.split, u))
    A1, A2 = compute_A12(grid, u, problem.corrected)
    closed = (
        plus
        - minus
        + 3.0 * inner(grid, A1 * A1 + A2 * A2, u * u)
        - inner(grid, problem.b * problem.model.g(u), u)
    )
    scale = max(abs(closed), abs(rep.pairing), 1e-30)
    return {"pairing": rep.pairing, "closed_form": closed, "defect": abs(rep.pairing - closed) / scale}


def gauge_ratio(problem, u):
    """``int (A1^2 + A2^2) u^2 / ||u||^6`` in the equivalent norm."""
    grid = problem.grid
    u = _prepare(problem, u)
    A1, A2 = compute_A12(grid, u, problem.corrected)
    num = inner(grid, A1 * A1 + A2 * A2, u * u)
    minus, plus = equivalent_norm_sq(problem.split, *project(problem.split, u))
    return num / (minus + plus) ** 3


def a1_constant_probe(problem, sample_count, rng=None):
    """Empirical sup of ``gauge_ratio`` over random localized fields."""
    rng = np.random.default_rng(0) if rng is None else rng
    best = 0.0
    for _ in range(sample_count):
        best = max(best, gauge_ratio(problem, random_bumps(problem.grid, rng)))
    return best
