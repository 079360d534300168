"""Laplace transform machinery on log grids.

The Laplace transform factorizes through the Mellin transform as
L = M^{-1} J Gamma M, where M = Phi U with (U f)(x) = e^{x/2} f(e^x),
Phi is the unitary Fourier transform with convention
(Phi u)(xi) = (2 pi)^{-1/2} integral u(x) e^{-i x xi} dx,
J is frequency reflection and Gamma multiplies by Gamma(1/2 + i xi).

This module implements that pipeline on uniform grids in x = ln t
(equivalently x = -ln lam), its inverse (reconstruction of f from the
exponential-variable test function u), the gaussian-mollifier sandwich
operators T_n = Gamma* chihat_n (Gamma*)^{-1}, and generic sandwiched
Fourier operators s(x) Phi* v(xi).

Grid Fourier conventions are pinned here once: with x_j = x0 + j dx and
fft-order frequencies xi_k = 2 pi k/(n dx),

    (Phi u)(xi_k)  = (2 pi)^{-1/2} dx e^{-i x0 xi_k} FFT(u)[k]
    (Phi* g)(x_j)  = (2 pi)^{1/2} / dx * IFFT(g e^{+i x0 xi})[j]

which makes Phi* Phi = identity exactly and Parseval exact in the
dx/dxi-weighted norms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .special import FunctionSpec, gamma, log_gamma

__all__ = [
    "LogGrid",
    "GridFunction",
    "DEFAULT_GRID",
    "MOLLIFIER_GRID",
    "InsufficientDecayError",
    "AmplificationError",
    "GrowthWarning",
    "xi_grid_of",
    "dual_grid",
    "fourier",
    "inv_fourier",
    "laplace_point",
    "laplace_via_mellin",
    "reconstruct",
    "u_of_laplace_image",
    "sample_u",
    "mollifier_matrix",
    "mollifier_tn",
    "mollifier_norm",
    "sandwiched_apply",
]


class InsufficientDecayError(ValueError):
    """Samples do not decay at the grid edges; the FFT would wrap."""


class AmplificationError(ValueError):
    """Dividing by Gamma(1/2+i xi) would amplify noise: Phi u decays too slowly."""


class GrowthWarning(UserWarning):
    """The sandwiching function exceeds its polynomial growth envelope."""


@dataclass(frozen=True)
class LogGrid:
    """Uniform grid in the logarithmic (or frequency) variable."""

    x_min: float
    x_max: float
    count: int

    def __post_init__(self):
        if self.count < 16 or self.count & (self.count - 1):
            raise ValueError("count must be a power of two >= 16")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.count

    @property
    def xs(self):
        return self.x_min + self.dx * np.arange(self.count)

    @property
    def lambdas_pos(self):
        """lam = e^{+x}: the t-side / Mellin convention."""
        return np.exp(self.xs)

    @property
    def lambdas_neg(self):
        """lam = e^{-x}: the sigma-side convention."""
        return np.exp(-self.xs)


DEFAULT_GRID = LogGrid(-60.0, 60.0, 16384)
MOLLIFIER_GRID = LogGrid(-40.0, 40.0, 1024)


@dataclass(frozen=True)
class GridFunction:
    grid: LogGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.count,):
            raise ValueError("values must match the grid")
        object.__setattr__(self, "values", v)

    def norm(self):
        """L2 norm with the dx weight."""
        return float(np.sqrt(self.grid.dx * np.sum(np.abs(self.values) ** 2)))


def xi_grid_of(grid):
    """Ascending dual frequencies of an x-grid."""
    return 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(grid.count, d=grid.dx))


def dual_grid(grid):
    """The LogGrid whose points are xi_grid_of(grid)."""
    n = grid.count
    d = 2 * np.pi / (n * grid.dx)
    return LogGrid(-d * (n // 2), d * (n - n // 2), n)


def _xi_fft_order(grid):
    return 2 * np.pi * np.fft.fftfreq(grid.count, d=grid.dx)


def fourier(gf):
    """Phi applied to a GridFunction; returns values on the ascending xi grid."""
    grid = gf.grid
    xi = _xi_fft_order(grid)
    vals = (2 * np.pi) ** -0.5 * grid.dx * np.exp(-1j * grid.x_min * xi) * np.fft.fft(gf.values)
    return np.fft.fftshift(vals)


def inv_fourier(gvals_shifted, grid):
    """Phi* applied to values on the ascending xi grid of ``grid``."""
    g = np.fft.ifftshift(np.asarray(gvals_shifted, dtype=complex))
    xi = _xi_fft_order(grid)
    vals = (2 * np.pi) ** 0.5 / grid.dx * np.fft.ifft(g * np.exp(1j * grid.x_min * xi))
    return GridFunction(grid, vals)


def _reflect_fft_order(g):
    out = np.empty_like(g)
    out[0] = g[0]
    out[1:] = g[:0:-1]
    return out


# ---------------------------------------------------------------------------
# Laplace transform
# ---------------------------------------------------------------------------

def laplace_point(f, lam):
    """(L f)(lam) = integral_0^inf e^{-t lam} f(t) dt.

    ``f`` may carry a closed-form image (``laplace_image()``), be a t-side
    FunctionSpec (quadrature), or a GridFunction sampled at t = e^x
    (trapezoid in x).
    """
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if hasattr(f, "laplace_image"):
        img = f.laplace_image()
        out = np.asarray(img(lam_arr), dtype=complex)
    elif isinstance(f, GridFunction):
        t = f.grid.lambdas_pos
        weights = f.grid.dx * t  # dt = t dx on the log grid
        out = np.array([np.sum(np.exp(-t * lv) * f.values * weights) for lv in lam_arr])
    elif isinstance(f, FunctionSpec):
        from . import _quad

        rate, _ = f.decay()
        out = np.empty(len(lam_arr), dtype=complex)
        for i, lv in enumerate(lam_arr):
            if rate + lv <= 0:
                raise _quad.DivergentIntegralError("e^{-t lam} f(t) does not decay")
            out[i] = _quad.adaptive_gl(lambda t: np.exp(-t * lv) * f(t), 0.0, 1.0, atol=1e-12) \
                + _quad.semi_infinite(lambda t: np.exp(-t * lv) * f(t), 1.0, atol=1e-13)
    else:
        raise TypeError("unsupported operand for laplace_point: %r" % (f,))
    return out[0] if np.ndim(lam) == 0 else out


def laplace_via_mellin(f, decay_tol=1e-8):
    """Laplace transform of f (sampled at t = e^x) via the Mellin factorization.

    Returns the image sampled at lam = e^x on the same grid.
    """
    grid = f.grid
    u = np.exp(grid.xs / 2) * f.values
    peak = np.max(np.abs(u))
    if peak == 0:
        return GridFunction(grid, np.zeros(grid.count, complex))
    edge = max(np.max(np.abs(u[:4])), np.max(np.abs(u[-4:])))
    if edge > decay_tol * peak:
        raise InsufficientDecayError(
            "weighted samples at grid edges are %.2e of peak (need < %.0e)" % (edge / peak, decay_tol)
        )
    mf = np.fft.ifftshift(fourier(GridFunction(grid, u)))  # fft order
    xi = _xi_fft_order(grid)
    mf = gamma(0.5 + 1j * xi) * mf
    mf = _reflect_fft_order(mf)
    uw = inv_fourier(np.fft.fftshift(mf), grid)
    w = np.exp(-grid.xs / 2) * uw.values
    return GridFunction(grid, w)


def sample_u(w_spec, grid=DEFAULT_GRID):
    """u(x) = e^{-x/2} w(e^{-x}) for a lam-side FunctionSpec w."""
    x = grid.xs
    return GridFunction(grid, np.exp(-x / 2) * np.asarray(w_spec(np.exp(-x)), dtype=complex))


def u_of_laplace_image(f, grid=DEFAULT_GRID):
    """u corresponding to a t-side test function with a closed-form image."""
    return sample_u(f.laplace_image(), grid)


def reconstruct(u, noise_floor=1e-12, decay_tol=0.05):
    """Recover f (sampled at t = e^x) from u(x) = e^{-x/2} (L f)(e^{-x}).

    Works through (M f)(xi) = Gamma(1/2 + i xi)^{-1} (Phi u)(xi).  The
    spectrum of u is cut to the contiguous band around xi = 0 where it
    still exceeds ``noise_floor`` relative to its peak -- beyond the first
    crossing only discretization junk survives, and dividing that by
    exponentially small Gamma values would destroy everything.  The
    precondition is that the quotient on the kept band has already turned
    around and is decaying at the cut: that is the grid form of "Phi u
    decays faster than Gamma(1/2+i xi)".
    """
    grid = u.grid
    phi_u = fourier(u)
    peak = np.max(np.abs(phi_u))
    if peak == 0:
        return GridFunction(grid, np.zeros(grid.count, complex))
    xi = xi_grid_of(grid)
    n = grid.count
    mid = n // 2  # index of xi = 0 on the shifted grid
    absu = np.abs(phi_u)
    floor = noise_floor * peak
    hi = mid
    while hi < n and absu[hi] >= floor:
        hi += 1
    lo = mid
    while lo >= 0 and absu[lo] >= floor:
        lo -= 1
    band = np.zeros(n, dtype=bool)
    band[lo + 1: hi] = True
    g = np.where(band, phi_u / gamma(0.5 + 1j * xi), 0.0)
    gmax = np.max(np.abs(g))
    if gmax > 0:
        edge = max(np.abs(g[hi - 1]), np.abs(g[lo + 1]))
        if (hi >= n or lo < 0) or edge > decay_tol * gmax:
            raise AmplificationError(
                "Phi u does not decay faster than Gamma(1/2+i xi) on this grid"
            )
    uf = inv_fourier(g, grid)
    fvals = np.exp(-grid.xs / 2) * uf.values
    return GridFunction(grid, fvals)


# ---------------------------------------------------------------------------
# Mollifier sandwich operators T_n = Gamma* chihat_n (Gamma*)^{-1}
# ---------------------------------------------------------------------------

def mollifier_matrix(n, grid=MOLLIFIER_GRID):
    """Dense xi-grid matrix of T_n with the Gamma ratio folded in log-space.

    The kernel is Gamma(1/2-i xi) / Gamma(1/2-i eta) * chihat_n(xi - eta)
    with chihat_n(s) = n e^{-n^2 s^2 / 4} / (2 sqrt(pi)); combining the
    ratio with the gaussian before exponentiating keeps every entry finite.
    """
    xi = grid.xs
    lg = log_gamma(0.5 - 1j * xi)
    expo = lg[:, None] - lg[None, :] - (n ** 2 / 4.0) * (xi[:, None] - xi[None, :]) ** 2
    k = n / (2 * np.sqrt(np.pi)) * np.exp(expo) * grid.dx
    return k


def mollifier_tn(n, g):
    """Apply T_n to a GridFunction on the xi grid."""
    if n < 1:
        raise ValueError("mollifier index must be >= 1")
    k = mollifier_matrix(n, g.grid)
    return GridFunction(g.grid, k @ g.values)


def mollifier_norm(n, grid=MOLLIFIER_GRID, iters=30, tol=1e-6, seed=7):
    """Grid operator-norm estimate of T_n by power iteration on T*T."""
    k = mollifier_matrix(n, grid)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=grid.count) + 1j * rng.normal(size=grid.count)
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(iters):
        w = k.conj().T @ (k @ v)
        s = np.linalg.norm(w)
        v = w / s
        if abs(s - prev) <= tol * s:
            break
        prev = s
    return float(np.sqrt(s))


# ---------------------------------------------------------------------------
# Sandwiched Fourier operators  A = s(x) Phi* v(xi)
# ---------------------------------------------------------------------------

def sandwiched_apply(s, v, f, k_max=12):
    """Compute s(x) Phi*(v(xi) f(xi)).

    ``f`` lives on its own (frequency) grid; the result lives on the dual
    x-grid.  ``s`` and ``v`` are callables (FunctionSpecs work).  A
    GrowthWarning is emitted when s grows faster than |x|^k_max toward the
    grid edges (the operator theory assumes a polynomial envelope on s).
    """
    xi = f.grid.xs
    vf = np.asarray(v(xi), dtype=complex) * f.values
    # Phi* g = conj(Phi conj(g)); fourier() maps a grid to its dual points
    out_vals = np.conj(fourier(GridFunction(f.grid, np.conj(vf))))
    out = dual_grid(f.grid)
    x = out.xs
    sx = np.asarray(s(x), dtype=complex)
    _check_polynomial_growth(x, sx, k_max)
    return GridFunction(out, sx * out_vals)


def _check_polynomial_growth(x, sx, k_max):
    """Warn when log|s| grows super-polynomially toward the grid edges."""
    n = len(x)
    m = max(8, n // 10)
    for sl in (slice(n - m, n), slice(0, m)):
        xa = np.abs(x[sl])
        sa = np.abs(sx[sl])
        good = (sa > 0) & (xa > 1)
        if np.count_nonzero(good) < 4:
            continue
        lx, ls = np.log(xa[good]), np.log(sa[good])
        slope = np.polyfit(lx, ls, 1)[0]
        if slope > k_max:
            warnings.warn(
                "sandwiching function grows like |x|^%.1f at the edge (envelope %d)"
                % (slope, k_max), GrowthWarning)
            return
