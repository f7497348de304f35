"""Uniform grid on the truncated plane [-L, L)^2 and the discrete calculus on it.

Fields are plain ``numpy`` arrays of shape ``(N, N)`` indexed ``[i, j]`` with
node ``x_ij = (-L + i h, -L + j h)``, i.e. row-major with ``x_1`` varying slowest.
The row ``i = 0`` and column ``j = 0`` carry the homogeneous Dirichlet data of the
Schroedinger operator; together with the zero ghost layer at ``i = N`` they make
the computational box symmetric about the origin.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import scipy.fft as sfft
from scipy.interpolate import RectBivariateSpline

from .errors import GridMismatchError, NumericError, UsageError

KERNEL_KINDS = ("K1", "K2")


@dataclass(frozen=True)
class Grid:
    L: float = 12.0
    N: int = 256

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or isinstance(self.N, bool):
            raise UsageError(f"N must be an integer, got {self.N!r}")
        if self.N < 16 or self.N % 2:
            raise UsageError(f"N must be even and >= 16, got {self.N}")
        if not np.isfinite(self.L) or self.L <= 0:
            raise UsageError(f"L must be positive, got {self.L}")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "N", int(self.N))

    @property
    def h(self):
        return 2.0 * self.L / self.N

    @property
    def weight(self):
        return self.h * self.h

    @property
    def shape(self):
        return (self.N, self.N)

    @cached_property
    def x(self):
        return -self.L + self.h * np.arange(self.N)

    @cached_property
    def coords(self):
        return np.meshgrid(self.x, self.x, indexing="ij")

    @cached_property
    def r2(self):
        x1, x2 = self.coords
        return x1 * x1 + x2 * x2

    @cached_property
    def interior(self):
        """Boolean mask of the unknowns of the Dirichlet problem."""
        mask = np.ones(self.shape, dtype=bool)
        mask[0, :] = False
        mask[:, 0] = False
        return mask

    def zeros(self):
        return np.zeros(self.shape)

    def check(self, f, name="field"):
        """Return ``f`` as a float array after shape and finiteness checks."""
        f = np.asarray(f, dtype=float)
        if f.shape != self.shape:
            raise GridMismatchError(f"{name} has shape {f.shape}, grid expects {self.shape}")
        if not np.all(np.isfinite(f)):
            raise NumericError(f"{name} contains non-finite values")
        return f

    def restrict(self, f):
        """Copy of ``f`` with the Dirichlet row/column zeroed."""
        out = np.array(f, dtype=float, copy=True)
        out[0, :] = 0.0
        out[:, 0] = 0.0
        return out

    def refine(self, factor=2):
        return Grid(self.L, self.N * factor)


def integrate(grid, f):
    """Trapezoid-type quadrature ``h^2 * sum f`` over the box."""
    f = grid.check(f)
    return float(grid.weight * np.sum(f))


def inner(grid, f, g):
    return integrate(grid, np.asarray(f) * np.asarray(g))


def l2_norm(grid, f):
    f = grid.check(f)
    return float(np.sqrt(grid.weight * np.sum(f * f)))


def spectral_norm_sq(grid, f):
    """``h^2 sum f^2`` evaluated from the DFT coefficients (Parseval)."""
    f = grid.check(f)
    fh = sfft.fft2(f)
    return float(grid.weight * np.sum(np.abs(fh) ** 2) / f.size)


def gradient(grid, f):
    """Second-order differences: centered inside, one-sided on the box edge."""
    f = grid.check(f)
    d1, d2 = np.gradient(f, grid.h, edge_order=2)
    return d1, d2


def forward_differences(grid, f):
    """Edge differences ``(D1+ f, D2+ f)`` of the Dirichlet extension of ``f``.

    The value at index ``N`` is the zero ghost node, so
    ``sum(D1+^2 + D2+^2) h^2 = <-Lap_5 f, f>`` for ``f`` vanishing on the boundary row.
    """
    f = grid.check(f)
    d1 = np.empty_like(f)
    d2 = np.empty_like(f)
    d1[:-1, :] = f[1:, :] - f[:-1, :]
    d1[-1, :] = -f[-1, :]
    d2[:, :-1] = f[:, 1:] - f[:, :-1]
    d2[:, -1] = -f[:, -1]
    return d1 / grid.h, d2 / grid.h


def sample_at(grid, f, points):
    """Bicubic spline interpolation of ``f`` at an ``(m, 2)`` array of points."""
    f = grid.check(f)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    spline = RectBivariateSpline(grid.x, grid.x, f, kx=3, ky=3)
    return spline(pts[:, 0], pts[:, 1], grid=False)


def boundary_mass_fraction(grid, u, radius_fraction=0.9):
    """Share of ``int u^2`` carried by ``|x| > radius_fraction * L``."""
    u = grid.check(u)
    total = np.sum(u * u)
    if total == 0.0:
        return 0.0
    outer = grid.r2 > (radius_fraction * grid.L) ** 2
    return float(np.sum((u * u)[outer]) / total)


# --------------------------------------------------------------------------- kernels


@dataclass(frozen=True, eq=False)
class Kernel:
    """Samples of ``K_j(x) = x_j / (2 pi |x|^2)`` on the doubled grid.

    ``samples[N + a, N + b]`` is the weight at offset ``(a h, b h)`` for
    ``-N <= a, b < N``; ``spectrum`` is the real FFT of the samples rolled so the
    zero offset sits at index ``(0, 0)``.
    """

    kind: str
    grid: Grid
    corrected: bool
    samples: np.ndarray
    spectrum: np.ndarray

    def value_at_offset(self, a, b):
        n = self.grid.N
        return float(self.samples[n + a, n + b])


def kernel_samples(kind, grid, corrected=True):
    """Point samples of ``K1``/``K2`` on ``[-2L, 2L)^2`` with ``K(0) = 0``.

    With ``corrected=True`` the four nearest-neighbour weights get the odd
    correction ``+-1/(8 pi h)`` along the kernel's own axis. It cancels the
    ``O(h^2)`` error of the punctured lattice sum, whose lattice constant is
    ``-1/2`` (Epstein zeta at 0), while keeping the kernel odd and ``K(0) = 0``.
    """
    if kind not in KERNEL_KINDS:
        raise UsageError(f"unknown kernel kind {kind!r}")
    n, h = grid.N, grid.h
    offsets = h * np.arange(-n, n)
    a1, a2 = np.meshgrid(offsets, offsets, indexing="ij")
    r2 = a1 * a1 + a2 * a2
    r2[n, n] = 1.0
    num = a1 if kind == "K1" else a2
    k = num / (2.0 * np.pi * r2)
    k[n, n] = 0.0
    if corrected:
        c = 1.0 / (8.0 * np.pi * h)
        if kind == "K1":
            k[n + 1, n] += c
            k[n - 1, n] -= c
        else:
            k[n, n + 1] += c
            k[n, n - 1] -= c
    return k


@lru_cache(maxsize=32)
def sample_kernel(kind, grid, corrected=True):
    samples = kernel_samples(kind, grid, corrected)
    samples.setflags(write=False)
    spectrum = sfft.rfft2(np.fft.ifftshift(samples))
    spectrum.setflags(write=False)
    return Kernel(kind, grid, corrected, samples, spectrum)


def convolve(kernel, rho):
    """Free-space discrete convolution ``h^2 sum_y K(x - y) rho(y)``.

    ``rho`` is zero-padded to the doubled grid; offsets never exceed ``N - 1``
    in magnitude, so the circular product has no wrap-around.
    """
    grid = kernel.grid
    rho = grid.check(rho, "rho")
    n = grid.N
    padded = np.zeros((2 * n, 2 * n))
    padded[:n, :n] = rho
    out = sfft.irfft2(sfft.rfft2(padded) * kernel.spectrum, s=(2 * n, 2 * n))
    return grid.weight * out[:n, :n]


def direct_convolve(kind, grid, rho, corrected=True):
    """O(N^4) reference sum with the kernel evaluated from its closed form.

    Independent of ``kernel_samples``: the near-origin correction is applied as
    an explicit centered difference of ``rho``.
    """
    rho = grid.check(rho, "rho")
    h = grid.h
    idx = np.arange(grid.N)
    out = np.zeros(grid.shape)
    for i in range(grid.N):
        for j in range(grid.N):
            d1 = (i - idx)[:, None] * h
            d2 = (j - idx)[None, :] * h
            rr = d1 * d1 + d2 * d2
            num = np.broadcast_to(d1 if kind == "K1" else d2, rr.shape)
            with np.errstate(divide="ignore", invalid="ignore"):
                kv = np.where(rr > 0, num / (2.0 * np.pi * np.where(rr > 0, rr, 1.0)), 0.0)
            out[i, j] = h * h * np.sum(kv * rho)
    if corrected:
        ext = np.pad(rho, 1)
        if kind == "K1":
            diff = ext[2:, 1:-1] - ext[:-2, 1:-1]
        else:
            diff = ext[1:-1, 2:] - ext[1:-1, :-2]
        # weight +c at offset +h e_j pairs with rho(x - h e_j)
        out -= h * h / (8.0 * np.pi * h) * diff
    return out


# --------------------------------------------------------------------------- test fields


def gaussian(grid, amplitude=1.0, width=1.0, center=(0.0, 0.0)):
    """``amplitude * exp(-|x - center|^2 / (2 width^2))``."""
    x1, x2 = grid.coords
    d2 = (x1 - center[0]) ** 2 + (x2 - center[1]) ** 2
    return amplitude * np.exp(-d2 / (2.0 * width * width))


def random_bumps(grid, rng, max_bumps=3, spread=None, widths=(0.6, 1.5)):
    """Random sum of Gaussian bumps with random centres, widths and signs."""
    spread = grid.L / 4.0 if spread is None else spread
    count = int(rng.integers(1, max_bumps + 1))
    u = grid.zeros()
    for _ in range(count):
        c = rng.uniform(-spread, spread, size=2)
        w = rng.uniform(*widths)
        a = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 1.5)
        u += gaussian(grid, a, w, c)
    return grid.restrict(u)


def symmetry_images(u):
    """The eight images of an interior field under the square's symmetry group.

    Works on the interior block ``[1:, 1:]``, which is symmetric about the origin.
    """
    block = u[1:, 1:]
    out = []
    for k in range(4):
        r = np.rot90(block, k)
        out.append(r)
        out.append(r.T)
    return out


def symmetry_defect(u):
    """``max_g ||g u - u|| / ||u||`` over the square's symmetry group."""
    block = u[1:, 1:]
    norm = np.linalg.norm(block)
    if norm == 0.0:
        return 0.0
    return float(max(np.linalg.norm(img - block) for img in symmetry_images(u)) / norm)
