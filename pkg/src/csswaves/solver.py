"""Critical-point search for Phi and the landscape diagnostics around it.

Two independent routes are provided:

* ``residual_minimize`` drives the merit ``1/2 ||g||^2`` to zero. A short
  conditioning stage (maximise Phi over the ray through ``u`` and over X-, then
  a Sobolev-preconditioned gradient step) brings the iterate into the basin of
  the merit phase, which uses inexact Newton directions with a Barzilai-Borwein
  fallback and only accepts steps that do not increase the merit.
* ``mountain_pass`` deforms a discrete path from 0 to a low-energy endpoint,
  always pushing down its highest node.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft
from scipy.optimize import brentq, minimize, minimize_scalar
from scipy.sparse.linalg import LinearOperator, minres

from .errors import ConvergenceError, GrowthError, NumericError, UsageError
from .functional import gradient_field, hessian_apply, phi
from .grid import (
    boundary_mass_fraction,
    forward_differences,
    gaussian,
    inner,
    l2_norm,
    random_bumps,
)
from .model import Verdict
from .operator import equivalent_norm, equivalent_norm_sq, negative_coefficients, project

METHODS = ("residual_min", "mountain_pass")
BOUNDARY_MASS_WARN = 1e-6
MAX_RESTARTS = 5


@dataclass(frozen=True)
class SolverConfig:
    method: str = "residual_min"
    max_iters: int = 400
    grad_tol: float = 1e-6
    delta0: float = 1e-3
    path_nodes: int = 9
    seed_amplitude: float = 2.0
    seed_width: float = 1.0
    # step policy
    descent_step: float = 0.5
    tau_min: float = 1e-3
    switch_tol: float = 1e-1
    newton_rtol: float = 0.1
    newton_maxiter: int = 200

    def __post_init__(self):
        if self.method not in METHODS:
            raise UsageError(f"unknown solver method {self.method!r}")
        if not self.grad_tol > 0:
            raise UsageError("grad_tol must be positive")
        if not self.delta0 > 0:
            raise UsageError("delta0 must be positive")
        if self.path_nodes < 5:
            raise UsageError("path_nodes must be at least 5")
        if self.max_iters < 1:
            raise UsageError("max_iters must be positive")
        if not 0 < self.tau_min <= self.descent_step:
            raise UsageError("need 0 < tau_min <= descent_step")

    def seed(self, grid, scale=1.0):
        return grid.restrict(gaussian(grid, scale * self.seed_amplitude, self.seed_width))


@dataclass(eq=False)
class CriticalPointResult:
    u: np.ndarray
    phi: float
    residual: float
    iterations: int
    history: list
    nontrivial: bool
    norm_minus: float
    norm_plus: float
    method: str
    restarts: int = 0
    boundary_mass: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def norm(self):
        return math.sqrt(self.norm_minus**2 + self.norm_plus**2)

    def summary(self):
        return {
            "method": self.method,
            "phi": self.phi,
            "residual": self.residual,
            "iterations": self.iterations,
            "restarts": self.restarts,
            "nontrivial": self.nontrivial,
            "norm_minus": self.norm_minus,
            "norm_plus": self.norm_plus,
            "boundary_mass": self.boundary_mass,
            "notes": list(self.notes),
        }


# --------------------------------------------------------------------------- helpers


class SobolevPreconditioner:
    """``(-Lap_h + 1)^{-1}`` on the interior, diagonal in the DST-I basis."""

    def __init__(self, grid):
        self.grid = grid
        n = grid.N
        k = np.arange(1, n)
        mu = (4.0 / grid.h**2) * np.sin(np.pi * k / (2 * n)) ** 2
        self.denominator = mu[:, None] + mu[None, :] + 1.0

    def interior(self, vec):
        m = self.grid.N - 1
        x = np.asarray(vec).reshape(m, m)
        y = sfft.idstn(sfft.dstn(x, type=1, norm="ortho") / self.denominator, type=1, norm="ortho")
        return y.ravel()

    def __call__(self, f):
        out = self.grid.zeros()
        m = self.grid.N - 1
        out[1:, 1:] = self.interior(f[1:, 1:].ravel()).reshape(m, m)
        return out


def _norms(problem, u):
    minus, plus = equivalent_norm_sq(problem.split, *project(problem.split, u))
    return math.sqrt(minus), math.sqrt(plus)


def _record(history, problem, u, it, residual=None, phase=""):
    res = gradient_field(problem, u).residual if residual is None else residual
    nm, npl = _norms(problem, u)
    history.append(
        {
            "iter": it,
            "phi": phi(problem, u),
            "residual": res,
            "norm_minus": nm,
            "norm_plus": npl,
            "phase": phase,
        }
    )


def _remove_minus(problem, w):
    if problem.split.ell == 0:
        return w
    return project(problem.split, w)[1]


def _maximize_in_span(problem, base, dirs, c0, positive_first=False, max_steps=50):
    """Maximise ``Phi(base + sum c_i dirs_i)`` over the coefficients ``c``.

    Newton's method with the exact Hessian of the restriction; a step that is
    not an ascent direction or does not raise Phi falls back to BFGS. Returns
    ``None`` if ``positive_first`` is set and the first coefficient leaves
    ``(0, inf)``.
    """
    grid = problem.grid
    dirs = list(dirs)

    def field_of(c):
        return base + np.tensordot(c, np.asarray(dirs), axes=1)

    def local(c):
        w = field_of(c)
        g = gradient_field(problem, w).g
        return phi(problem, w), np.array([inner(grid, g, d) for d in dirs]), w

    c = np.asarray(c0, dtype=float)
    val, grad, w = local(c)
    scale = max(1.0, abs(val))
    for _ in range(max_steps):
        if np.max(np.abs(grad)) <= 1e-11 * scale:
            return c
        hd = [hessian_apply(problem, w, d) for d in dirs]
        hess = np.array([[inner(grid, hi, dj) for dj in dirs] for hi in hd])
        hess = 0.5 * (hess + hess.T)
        step = None
        if np.all(np.linalg.eigvalsh(hess) < 0):
            step = -np.linalg.solve(hess, grad)
        if step is None:
            break
        lam = 1.0
        while lam >= 1e-4:
            cand = c + lam * step
            if positive_first and cand[0] <= 0:
                lam *= 0.5
                continue
            cval, cgrad, cw = local(cand)
            if cval >= val - 1e-14 * scale:
                break
            lam *= 0.5
        else:
            break
        c, val, grad, w = cand, cval, cgrad, cw
    else:
        return c

    def neg(z):
        v, gr, _ = local(z)
        return -v, -gr

    res = minimize(neg, c, jac=True, method="BFGS", options={"gtol": 1e-11 * scale})
    if not np.all(np.isfinite(res.x)) or (positive_first and res.x[0] <= 0):
        return None
    return res.x


def maximize_minus(problem, u):
    """Replace the X- component of ``u`` by the one maximising Phi (X+ part fixed)."""
    sp = problem.split
    if sp.ell == 0:
        return u
    base = project(sp, u)[1]
    c = _maximize_in_span(problem, base, sp.neg_eigenfields, negative_coefficients(sp, u))
    return base + np.tensordot(c, sp.neg_eigenfields, axes=1)


def lift(problem, u):
    """Maximise Phi over ``{t u+ + w : t > 0, w in X-}``.

    Returns ``None`` if ``u`` has no X+ part or the energy does not fall along the
    ray (no maximiser).
    """
    sp = problem.split
    grid = problem.grid
    u_minus, u_plus = project(sp, u)
    if l2_norm(grid, u_plus) == 0.0:
        return None
    if sp.ell == 0:

        def ray(t):
            return inner(grid, gradient_field(problem, t * u_plus).g, u_plus)

        lo = hi = 1.0
        if ray(1.0) > 0:
            while ray(hi) > 0:
                lo, hi = hi, hi * 1.5
                if hi > 1e6:
                    return None
        else:
            while ray(lo) <= 0:
                hi, lo = lo, lo / 1.5
                if lo < 1e-12:
                    return None
        return brentq(ray, lo, hi, xtol=1e-14, rtol=1e-13) * u_plus

    dirs = [u_plus] + list(sp.neg_eigenfields)
    z0 = np.concatenate([[1.0], negative_coefficients(sp, u_minus)])
    z = _maximize_in_span(problem, grid.zeros(), dirs, z0, positive_first=True)
    if z is None:
        return None
    return z[0] * u_plus + np.tensordot(z[1:], sp.neg_eigenfields, axes=1)


class _Newton:
    """Inexact Newton directions for ``g(u) = 0`` (preconditioned MINRES)."""

    def __init__(self, problem, config):
        self.problem = problem
        self.config = config
        self.prec = SobolevPreconditioner(problem.grid)
        self.size = (problem.grid.N - 1) ** 2

    def direction(self, u, g, merit):
        op = self.problem.op
        hess = LinearOperator(
            (self.size, self.size),
            matvec=lambda x: op.to_interior(hessian_apply(self.problem, u, op.from_interior(x))),
        )
        pre = LinearOperator((self.size, self.size), matvec=self.prec.interior)
        rtol = min(self.config.newton_rtol, math.sqrt(merit))
        d, info = minres(
            hess, -op.to_interior(g), M=pre, rtol=rtol, maxiter=self.config.newton_maxiter
        )
        return op.from_interior(d), info

    def merit_gradient(self, u, g):
        return hessian_apply(self.problem, u, g)


def _finish(problem, config, u, it, history, method, restarts, notes):
    rep = gradient_field(problem, u)
    nm, npl = _norms(problem, u)
    bm = boundary_mass_fraction(problem.grid, u)
    if bm > BOUNDARY_MASS_WARN:
        msg = f"boundary mass fraction {bm:.2e} exceeds {BOUNDARY_MASS_WARN:g}; enlarge L"
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
        notes.append(msg)
    nontrivial = math.hypot(nm, npl) >= config.delta0 and rep.residual <= config.grad_tol
    return CriticalPointResult(
        u=u,
        phi=phi(problem, u),
        residual=rep.residual,
        iterations=it,
        history=history,
        nontrivial=nontrivial,
        norm_minus=nm,
        norm_plus=npl,
        method=method,
        restarts=restarts,
        boundary_mass=bm,
        notes=notes,
    )


# --------------------------------------------------------------------------- residual route


def _merit_phase(problem, config, u, it, history, newton):
    """Merit descent from ``u``. Returns ``(u, it, converged)``.

    Every accepted step satisfies ``M(u_new) <= M(u)``; on a stall the caller
    falls back to the conditioning stage.
    """
    grid = problem.grid
    rep = gradient_field(problem, u)
    merit = 0.5 * rep.residual**2
    prev = None  # (u, merit gradient) of the previous BB step
    while it < config.max_iters:
        if rep.residual <= config.grad_tol:
            return u, it, True
        d, info = newton.direction(u, rep.g, merit)
        accepted = None
        tau = 1.0
        if info >= 0 and np.all(np.isfinite(d)):
            while tau >= 1e-4:
                cand = grid.restrict(u + tau * d)
                crep = gradient_field(problem, cand)
                if 0.5 * crep.residual**2 <= (1.0 - 1e-4 * tau) * merit:
                    accepted = (cand, crep)
                    break
                tau *= 0.5
        if accepted is None:
            # Barzilai-Borwein step along the merit gradient, backtracking to tau_min
            mg = newton.merit_gradient(u, rep.g)
            mg_sq = inner(grid, mg, mg)
            if prev is not None:
                s = u - prev[0]
                y = mg - prev[1]
                sy = inner(grid, s, y)
                tau = inner(grid, s, s) / sy if sy > 0 else config.descent_step
            else:
                tau = config.descent_step
            prev = (u, mg)
            while tau >= config.tau_min:
                cand = grid.restrict(u - tau * mg)
                crep = gradient_field(problem, cand)
                if 0.5 * crep.residual**2 <= merit - 1e-4 * tau * mg_sq:
                    accepted = (cand, crep)
                    break
                tau *= 0.5
        if accepted is None:
            return u, it, False
        u, rep = accepted
        merit = 0.5 * rep.residual**2
        it += 1
        _record(history, problem, u, it, rep.residual, "merit")
    return u, it, rep.residual <= config.grad_tol


def residual_minimize(problem, config=None, start=None):
    """Drive ``||g(u)||`` below ``config.grad_tol`` starting from ``start``.

    ``start=None`` uses the configured Gaussian seed. An iterate whose equivalent
    norm drops below ``delta0`` counts as a collapse onto the trivial critical
    point; the run restarts from the seed scaled by ``2**k`` (at most five times).
    """
    config = config or SolverConfig()
    grid = problem.grid
    u = config.seed(grid) if start is None else grid.restrict(grid.check(start, "start"))
    history = []
    notes = []
    restarts = 0
    it = 0
    newton = _Newton(problem, config)
    prec = newton.prec
    switch = config.switch_tol

    def collapsed(v):
        return v is None or equivalent_norm(problem.split, v) < config.delta0

    _record(history, problem, u, it, phase="start")
    while True:
        if collapsed(u):
            if restarts >= MAX_RESTARTS:
                raise ConvergenceError(
                    f"iterate collapsed onto u = 0 after {restarts} restarts", history
                )
            restarts += 1
            notes.append(f"collapse at iteration {it}; restart {restarts}")
            u = config.seed(grid, 2.0 ** (restarts - 1))
            _record(history, problem, u, it, phase="restart")
            continue

        rep = gradient_field(problem, u)
        if rep.residual <= config.grad_tol:
            return _finish(problem, config, u, it, history, "residual_min", restarts, notes)
        if it >= config.max_iters:
            raise ConvergenceError(
                f"residual {rep.residual:.3e} above {config.grad_tol:g} after {it} iterations",
                history,
            )

        if rep.residual > switch:
            # conditioning: ray/X- lift then a preconditioned gradient step
            lifted = lift(problem, u)
            if collapsed(lifted):
                u = None
                continue
            u = lifted
            rep = gradient_field(problem, u)
            if rep.residual > switch:
                u = grid.restrict(u - config.descent_step * prec(rep.g))
            it += 1
            _record(history, problem, u, it, phase="condition")
            continue

        u, it, done = _merit_phase(problem, config, u, it, history, newton)
        if done:
            continue
        if it >= config.max_iters:
            continue
        # stalled: tighten the switch so that conditioning gets closer first
        switch = 0.1 * min(switch, gradient_field(problem, u).residual)
        notes.append(f"merit phase stalled at iteration {it}; switch tolerance now {switch:.1e}")


# --------------------------------------------------------------------------- mountain pass


def _sobolev_inner(grid, a, b):
    """``<(-Lap_h + 1) a, b>`` via edge differences."""
    a1, a2 = forward_differences(grid, a)
    b1, b2 = forward_differences(grid, b)
    return inner(grid, a1, b1) + inner(grid, a2, b2) + inner(grid, a, b)


def _sobolev_sq(grid, a):
    return _sobolev_inner(grid, a, a)


def _refine_max(problem, nodes, k):
    """Maximise Phi on the two segments adjacent to node ``k``."""
    a, b, c = nodes[k - 1], nodes[k], nodes[k + 1]

    def point(s):
        return b + s * (b - a) if s < 0 else b + s * (c - b)

    res = minimize_scalar(
        lambda s: -phi(problem, point(s)), bounds=(-1.0, 1.0), method="bounded",
        options={"xatol": 1e-10},
    )
    best = point(res.x)
    return best if phi(problem, best) >= phi(problem, b) else b


def _polyline(grid, corners, m, pinned):
    """``m`` nodes at equal arclength on a polyline; corner ``pinned`` is one of them.

    Returns the nodes and the index of the pinned corner.
    """
    seg = [l2_norm(grid, b - a) for a, b in zip(corners[:-1], corners[1:])]
    before = sum(seg[:pinned])
    total = sum(seg)
    k = int(round((m - 1) * before / total)) if total > 0 else 1
    k = min(max(k, 1), m - 2)

    def walk(pts, lens, count):
        # ``count`` points at equal arclength along pts, first and last included
        cum = np.concatenate([[0.0], np.cumsum(lens)])
        out = []
        for target in np.linspace(0.0, cum[-1], count):
            j = min(int(np.searchsorted(cum, target, side="right") - 1), len(lens) - 1)
            lam = (target - cum[j]) / lens[j] if lens[j] > 0 else 0.0
            out.append((1.0 - lam) * pts[j] + lam * pts[j + 1])
        return out

    left = walk(corners[: pinned + 1], seg[:pinned], k + 1)
    right = walk(corners[pinned:], seg[pinned:], m - k)
    left[-1] = corners[pinned]
    return left + right[1:], k


def _ray_exit(problem, top, level):
    """First ``s top`` (``s = 2, 4, ...``) with ``Phi`` below ``level``."""
    s = 2.0
    while s <= 1e6:
        if phi(problem, s * top) <= level:
            return s * top
        s *= 2.0
    raise GrowthError("energy along the ray through the path maximum stays above the endpoint")


def _build_path(problem, top, e, m):
    """Path ``0 -> top -> q -> e`` where ``q`` lies on the ray through ``top`` below ``Phi(e)``."""
    q = _ray_exit(problem, top, phi(problem, e))
    return _polyline(problem.grid, [problem.grid.zeros(), top, q, e], m, 1)


def mountain_pass(problem, config=None, endpoint=None, stall_window=60):
    """Mountain-pass path method between 0 and ``endpoint`` (``Phi(endpoint) < 0``).

    The path is the polyline ``0 -> top -> q -> e`` sampled at ``path_nodes``
    nodes, where ``q`` continues the ray through ``top`` until the energy drops
    below ``Phi(e)``.
    Each sweep takes the node of highest energy (lower index on ties),
    maximises Phi over its two adjacent segments, moves it downhill across the
    path (preconditioned gradient with the along-path part removed, Armijo
    backtracking), re-maximises its X- part and re-spaces the nodes. Stops once
    the highest node's residual meets ``grad_tol``.
    """
    config = config or SolverConfig(method="mountain_pass")
    grid = problem.grid
    if endpoint is None:
        raise UsageError("mountain_pass needs an endpoint; see find_descent_scale")
    e = grid.restrict(grid.check(endpoint, "endpoint"))
    phi_e = phi(problem, e)
    if not phi_e < 0:
        raise UsageError(f"endpoint energy {phi_e:.3e} is not negative")
    m = config.path_nodes
    prec = SobolevPreconditioner(grid)
    nodes = [t * e for t in np.linspace(0.0, 1.0, m)]
    nodes[1:-1] = [maximize_minus(problem, v) for v in nodes[1:-1]]
    history = []
    best_res = math.inf
    since_best = 0
    for it in range(config.max_iters + 1):
        values = np.array([phi(problem, v) for v in nodes])
        k = int(np.argmax(values))
        if k == 0 or k == m - 1:
            raise ConvergenceError("path maximum sits at an end point", history)
        top = maximize_minus(problem, _refine_max(problem, nodes, k))
        nodes, k = _build_path(problem, top, e, m)
        rep = gradient_field(problem, top)
        _record(history, problem, top, it, rep.residual, "path")
        if rep.residual <= config.grad_tol:
            if equivalent_norm(problem.split, top) < config.delta0:
                raise ConvergenceError("path maximum collapsed onto u = 0", history)
            return _finish(problem, config, top, it, history, "mountain_pass", 0, [])
        if rep.residual < 0.999 * best_res:
            best_res, since_best = rep.residual, 0
        else:
            since_best += 1
            if since_best >= stall_window:
                raise ConvergenceError(f"path method stalled at residual {best_res:.3e}", history)
        if it == config.max_iters:
            break
        tangent = nodes[k + 1] - nodes[k - 1]
        t_sq = _sobolev_sq(grid, tangent)
        along = inner(grid, rep.g, tangent) / t_sq if t_sq > 0 else 0.0
        # -P^{-1} g has Sobolev component -along on the tangent; remove it
        d = _remove_minus(problem, -prec(rep.g) + along * tangent)
        slope = inner(grid, rep.g, d)
        f0 = phi(problem, top)
        tau = config.descent_step
        while tau > config.tau_min and phi(problem, top + tau * d) > f0 + 1e-4 * tau * slope:
            tau *= 0.5
        nodes, _ = _build_path(problem, maximize_minus(problem, grid.restrict(top + tau * d)), e, m)
    raise ConvergenceError(f"path method reached max_iters with residual {best_res:.3e}", history)


# --------------------------------------------------------------------------- landscape


def find_descent_scale(problem, v, A=1.0, s_max=1e6, rtol=1e-8):
    """Smallest-bracket ``s > 0`` with ``Phi(s v) = -A``.

    ``v`` is first scaled to unit equivalent norm; the returned ``s`` refers to
    that unit vector. Raises ``GrowthError`` (with the scanned ``(s, Phi)``
    pairs) if ``Phi`` stays above ``-A`` for all ``s <= s_max``.
    """
    if not A > 0:
        raise UsageError("A must be positive")
    grid = problem.grid
    v = grid.restrict(grid.check(v, "v"))
    nv = equivalent_norm(problem.split, v)
    if nv == 0.0:
        raise UsageError("direction v is zero")
    v = v / nv

    def level(s):
        return phi(problem, s * v) + A

    witness = []
    lo, hi = 0.0, 1.0
    while True:
        val = level(hi)
        witness.append((hi, val - A))
        if val <= 0:
            break
        lo = hi
        hi *= 2.0
        if hi > s_max:
            raise GrowthError(
                f"Phi(s v) stayed above -{A:g} for all s <= {s_max:g}: the growth "
                "condition F(x,t)/t^6 -> +inf fails along this ray",
                witness,
            )
    # the bracket [lo, hi] has level(lo) > 0 >= level(hi); tighten to the first crossing
    while hi - lo > 1e-15 * hi:
        mid = 0.5 * (lo + hi)
        val = level(mid)
        if abs(val) <= rtol * A:
            lo = hi = mid
            break
        if val > 0:
            lo = mid
        else:
            hi = mid
    s = hi
    if abs(level(s)) > rtol * A:
        raise NumericError(f"bisection ended with |Phi + A| = {abs(level(s)):.2e}")
    slope = s * inner(grid, gradient_field(problem, s * v).g, v)
    if not slope < 0:
        warnings.warn(
            f"ray derivative {slope:.3e} at the returned scale is not negative",
            RuntimeWarning,
            stacklevel=2,
        )
    return s


@dataclass(frozen=True, eq=False)
class RayScan:
    A: float
    rows: np.ndarray  # columns: s, Phi(s v), d/dt Phi(t v) at t = s

    @property
    def flagged(self):
        s, energy, slope = self.rows.T
        return np.flatnonzero((energy <= -self.A) & (slope >= 0))

    def sign_changes(self):
        slope = self.rows[1:, 2]
        signs = np.sign(slope[slope != 0])
        return int(np.sum(signs[1:] != signs[:-1]))


def ray_scan(problem, v, s_max=10.0, samples=201, A=1.0):
    grid = problem.grid
    v = grid.restrict(grid.check(v, "v"))
    if l2_norm(grid, v) == 0.0:
        raise UsageError("direction v is zero")
    rows = []
    for s in np.linspace(0.0, s_max, samples):
        if s == 0.0:
            rows.append((0.0, 0.0, 0.0))
            continue
        w = s * v
        rows.append((s, phi(problem, w), inner(grid, gradient_field(problem, w).g, v)))
    return RayScan(A=A, rows=np.array(rows))


@dataclass(frozen=True)
class LinkingLevel:
    eps: float
    plus_min: float
    plus_max_dev: float
    minus_max: float | None
    minus_max_dev: float | None
    minus_status: str

    def to_dict(self):
        return {
            "eps": self.eps,
            "plus_min": self.plus_min,
            "plus_max_rel_dev": self.plus_max_dev,
            "minus_max": self.minus_max,
            "minus_max_rel_dev": self.minus_max_dev,
            "minus_status": self.minus_status,
        }


@dataclass(frozen=True)
class LinkingReport:
    ell: int
    levels: tuple

    def holds(self, tol=0.05):
        for lv in self.levels:
            if not (lv.plus_min > 0 and lv.plus_max_dev <= tol):
                return False
            if lv.minus_status != "not-applicable" and not (
                lv.minus_max < 0 and lv.minus_max_dev <= tol
            ):
                return False
        return True

    def to_dict(self):
        return {"ell": self.ell, "levels": [lv.to_dict() for lv in self.levels]}


def local_linking_probe(problem, eps=1e-2, sample_count=8, rng=None, halvings=2):
    """Sample Phi on the eps-spheres of X+ and X- at ``eps, eps/2, ...``.

    The relative deviations are ``|Phi -+ eps^2/2| / eps^2``.
    """
    if not eps > 0:
        raise UsageError("eps must be positive")
    rng = np.random.default_rng(0) if rng is None else rng
    sp = problem.split
    grid = problem.grid
    plus_dirs = []
    for _ in range(sample_count):
        w = project(sp, random_bumps(grid, rng))[1]
        plus_dirs.append(w / equivalent_norm(sp, w))
    minus_dirs = []
    if sp.ell:
        for _ in range(sample_count):
            c = rng.standard_normal(sp.ell)
            c /= np.linalg.norm(c)
            c = c / np.sqrt(np.abs(sp.neg_eigenvalues))
            minus_dirs.append(np.tensordot(c, sp.neg_eigenfields, axes=1))
    levels = []
    for j in range(halvings + 1):
        r = eps / 2.0**j
        half = 0.5 * r * r
        plus = np.array([phi(problem, r * w) for w in plus_dirs])
        if minus_dirs:
            minus = np.array([phi(problem, r * w) for w in minus_dirs])
            mm, md, status = (
                float(minus.max()),
                float(np.max(np.abs(minus + half)) / (r * r)),
                "holds-on-samples" if minus.max() < 0 else "violated",
            )
        else:
            mm, md, status = None, None, "not-applicable"
        levels.append(
            LinkingLevel(
                eps=r,
                plus_min=float(plus.min()),
                plus_max_dev=float(np.max(np.abs(plus - half)) / (r * r)),
                minus_max=mm,
                minus_max_dev=md,
                minus_status=status,
            )
        )
    return LinkingReport(ell=sp.ell, levels=tuple(levels))


def linking_verdict(report, tol=0.05):
    status = "holds-on-samples" if report.holds(tol) else "violated"
    return Verdict(status, None, f"{len(report.levels)} radii, tolerance {tol:g}")


def solve(problem, config=None, start=None, A=1.0):
    """Run the configured method; mountain_pass builds its endpoint from the seed."""
    config = config or SolverConfig()
    if config.method == "residual_min":
        return residual_minimize(problem, config, start)
    seed = config.seed(problem.grid) if start is None else start
    s = find_descent_scale(problem, seed, A)
    e = s * seed / equivalent_norm(problem.split, problem.grid.restrict(seed))
    return mountain_pass(problem, config, e)


__all__ = [
    "CriticalPointResult",
    "LinkingReport",
    "RayScan",
    "SobolevPreconditioner",
    "SolverConfig",
    "find_descent_scale",
    "lift",
    "local_linking_probe",
    "linking_verdict",
    "maximize_minus",
    "mountain_pass",
    "ray_scan",
    "residual_minimize",
    "solve",
]
