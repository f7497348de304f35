"""Discrete Schroedinger operator H = -Lap_h + V with homogeneous Dirichlet data,
and its splitting into the negative eigenspace X- and the complement X+.

The equivalent norm used throughout is ``||u||^2 = ||u+||^2 + ||u-||^2`` with
``||u+||^2 = <H u+, u+>`` and ``||u-||^2 = sum_k |lambda_k| <u, phi_k>^2``, so that
``<H u, u> = ||u+||^2 - ||u-||^2``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .errors import CapacityError, DegeneracyError, UsageError
from .grid import forward_differences, inner

POTENTIAL_KINDS = ("constant", "gaussian_well", "custom-table")
GAP_TOL = 1e-6


@dataclass(frozen=True)
class PotentialSpec:
    kind: str = "constant"
    omega: float = 1.0
    c: float = 0.0
    sigma: float = 1.0
    table: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in POTENTIAL_KINDS:
            raise UsageError(f"unknown potential kind {self.kind!r}")
        if self.kind == "gaussian_well" and self.sigma <= 0:
            raise UsageError("gaussian_well needs sigma > 0")
        if self.kind == "custom-table" and self.table is None:
            raise UsageError("custom-table potential needs a table of values")

    def realize(self, grid):
        if self.kind == "constant":
            V = np.full(grid.shape, float(self.omega))
        elif self.kind == "gaussian_well":
            V = self.omega - self.c * np.exp(-grid.r2 / self.sigma**2)
        else:
            V = np.asarray(self.table, dtype=float).reshape(grid.shape)
        return grid.check(V, "V")


class SchrodingerOperator:
    """Five-point ``-Lap_h + V`` acting on fields that vanish on row/column 0."""

    def __init__(self, grid, V):
        self.grid = grid
        self.V = grid.check(V, "V")

    def apply(self, u):
        g = self.grid
        u = g.restrict(g.check(u, "u"))
        n = g.N
        ext = np.zeros((n + 1, n + 1))
        ext[:n, :n] = u
        c = ext[1:n, 1:n]
        lap = 4.0 * c - ext[2:, 1:n] - ext[: n - 1, 1:n] - ext[1:n, 2:] - ext[1:n, : n - 1]
        out = np.zeros_like(u)
        out[1:, 1:] = lap / (g.h * g.h) + self.V[1:, 1:] * c
        return out

    __call__ = apply

    @cached_property
    def matrix(self):
        """Sparse matrix on the interior unknowns, row-major over ``[1:, 1:]``."""
        g = self.grid
        m = g.N - 1
        t = sp.diags([-np.ones(m - 1), 2.0 * np.ones(m), -np.ones(m - 1)], [-1, 0, 1]) / g.h**2
        eye = sp.identity(m)
        lap = sp.kron(t, eye) + sp.kron(eye, t)
        return (lap + sp.diags(self.V[1:, 1:].ravel())).tocsc()

    def to_interior(self, u):
        return np.asarray(u)[1:, 1:].ravel()

    def from_interior(self, vec):
        out = self.grid.zeros()
        out[1:, 1:] = np.asarray(vec).reshape(self.grid.N - 1, self.grid.N - 1)
        return out


def assemble(potential, grid):
    return SchrodingerOperator(grid, potential.realize(grid))


def quadratic_form(op, u):
    """``1/2 int (|grad u|^2 + V u^2)`` from edge differences of the Dirichlet field."""
    g = op.grid
    u = g.restrict(g.check(u, "u"))
    d1, d2 = forward_differences(g, u)
    return 0.5 * g.weight * float(np.sum(d1 * d1 + d2 * d2 + op.V * u * u))


def dense_eigenvalues(op):
    """All eigenvalues by dense diagonalisation; only sensible for small N."""
    return np.linalg.eigvalsh(op.matrix.toarray())


@dataclass(frozen=True, eq=False)
class SpectralSplit:
    op: SchrodingerOperator
    eigenvalues: np.ndarray
    neg_eigenvalues: np.ndarray
    neg_eigenfields: np.ndarray
    ell: int
    gap: float

    def report(self):
        return {
            "ell": int(self.ell),
            "lambdas": [float(x) for x in self.eigenvalues],
            "gap": float(self.gap),
        }


def split(op, k_max=6):
    """Lowest ``k_max`` eigenpairs by shift-invert Lanczos; keeps the negative ones."""
    if k_max < 1:
        raise UsageError("k_max must be >= 1")
    n_dof = (op.grid.N - 1) ** 2
    k = min(k_max, n_dof - 2)
    sigma = float(op.V.min()) - 1.0
    v0 = np.ones(n_dof)
    vals, vecs = eigsh(op.matrix, k=k, sigma=sigma, which="LM", tol=0.0, v0=v0)
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    if vals[-1] < 0.0:
        raise CapacityError(
            f"all {k} computed eigenvalues are negative (largest {vals[-1]:.3e}); raise k_max"
        )
    gap = float(np.min(np.abs(vals)))
    if gap <= GAP_TOL:
        raise DegeneracyError(f"eigenvalue {gap:.3e} away from zero: quadratic form is degenerate")
    ell = int(np.sum(vals < 0.0))
    fields = []
    for col in range(ell):
        phi = op.from_interior(vecs[:, col]) / op.grid.h
        # deterministic sign: the entry of largest magnitude is positive
        if phi.flat[np.argmax(np.abs(phi))] < 0:
            phi = -phi
        fields.append(phi)
    neg_fields = np.array(fields) if fields else np.zeros((0,) + op.grid.shape)
    return SpectralSplit(
        op=op,
        eigenvalues=vals,
        neg_eigenvalues=vals[:ell],
        neg_eigenfields=neg_fields,
        ell=ell,
        gap=gap,
    )


def negative_coefficients(sp_split, u):
    g = sp_split.op.grid
    return np.array([inner(g, u, phi) for phi in sp_split.neg_eigenfields])


def project(sp_split, u):
    """``(u-, u+)`` for the Dirichlet restriction of ``u``."""
    g = sp_split.op.grid
    u = g.restrict(g.check(u, "u"))
    coeffs = negative_coefficients(sp_split, u)
    u_minus = np.tensordot(coeffs, sp_split.neg_eigenfields, axes=1) if sp_split.ell else g.zeros()
    return u_minus, u - u_minus


def equivalent_norm_sq(sp_split, u_minus, u_plus):
    """``(||u-||^2, ||u+||^2)`` in the norm adapted to the split."""
    g = sp_split.op.grid
    coeffs = negative_coefficients(sp_split, u_minus)
    minus = float(np.sum(np.abs(sp_split.neg_eigenvalues) * coeffs**2))
    plus = inner(g, sp_split.op.apply(u_plus), g.restrict(u_plus))
    if plus < 0.0:
        # round-off in u+ is measured against the whole field and the operator norm
        op_norm = 8.0 / g.h**2 + float(np.max(np.abs(sp_split.op.V)))
        scale = (inner(g, u_plus, u_plus) + inner(g, u_minus, u_minus)) * op_norm
        if plus < -1e-10 * max(scale, 1e-300):
            raise DegeneracyError(f"<H u+, u+> = {plus:.3e} < 0: split is inconsistent")
        plus = 0.0
    return minus, plus


def equivalent_norm(sp_split, u):
    minus, plus = equivalent_norm_sq(sp_split, *project(sp_split, u))
    return float(np.sqrt(minus + plus))
