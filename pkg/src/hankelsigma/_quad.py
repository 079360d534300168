"""Shared quadrature engine.

Three workhorses, all vectorized over batch integrands (an integrand maps a
node array of shape (m,) to values of shape (..., m); the leading axes are
carried through so a whole family of pairings integrates in one sweep):

* adaptive Gauss-Legendre panels with optional user knots,
* tanh-sinh panels for an integrable singularity at the left endpoint,
* geometric panel doubling for [a, inf) with divergence detection.
"""

from __future__ import annotations

import numpy as np

__all__ = ["DivergentIntegralError", "adaptive_gl", "tanh_sinh_left", "semi_infinite"]


class DivergentIntegralError(ArithmeticError):
    """Tail contributions failed to decay; the integral looks divergent."""


_GL_CACHE = {}


def _gl(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _panel(f, a, b, n):
    x, w = _gl(n)
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * x
    vals = np.asarray(f(nodes))
    return 0.5 * (b - a) * (vals @ w)


def adaptive_gl(f, a, b, atol=1e-12, knots=None, max_depth=11):
    """Integrate f over [a, b] by bisection-adaptive Gauss-Legendre.

    ``knots`` seeds extra breakpoints (e.g. at sharp bump locations) so the
    error estimator cannot miss narrow features that fall between nodes.
    Error budgets halve with each bisection so accepted-panel errors sum to
    about ``atol``; the depth cap stops refinement into a noise floor.
    """
    if b <= a:
        return np.asarray(f(np.array([a])))[..., 0] * 0.0
    pts = [a, b]
    if knots is not None:
        pts.extend(k for k in knots if a < k < b)
    pts = sorted(set(pts))
    total = None
    for lo, hi in zip(pts[:-1], pts[1:]):
        part = _adaptive_segment(f, lo, hi, atol / max(1, len(pts) - 1), max_depth)
        total = part if total is None else total + part
    return total


def _adaptive_segment(f, a, b, atol, max_depth):
    stack = [(a, b, atol, 0)]
    total = None
    while stack:
        lo, hi, budget, depth = stack.pop()
        coarse = _panel(f, lo, hi, 24)
        fine = _panel(f, lo, hi, 48)
        err = np.max(np.abs(fine - coarse))
        if err <= budget or depth >= max_depth:
            total = fine if total is None else total + fine
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid, 0.5 * budget, depth + 1))
            stack.append((mid, hi, 0.5 * budget, depth + 1))
    return total


def tanh_sinh_left(f, a, b, atol=1e-12, max_level=10):
    """Integrate f over [a, b] with an integrable singularity allowed at a.

    The integrand is called as f(u) with u = x - a computed stably, so
    factors like u^{q-1} can be evaluated without cancellation right down
    to u ~ 1e-280.
    """
    half = 0.5 * (b - a)
    piq = np.pi / 2

    def nodes_weights(h, only_odd):
        kmax = int(np.ceil(6.5 / h))
        k = np.arange(-kmax, kmax + 1)
        if only_odd:
            k = k[k % 2 != 0]
        t = k * h
        s = piq * np.sinh(t)
        # log-space weights avoid cosh overflow at the grid extremes
        logcosh_s = np.logaddexp(s, -s) - np.log(2.0)
        w = np.exp(np.log(h * half * piq) + np.log(np.cosh(t)) - 2.0 * logcosh_s)
        # distance from the left endpoint, stable for x -> -1
        u = np.where(s >= 0,
                     2.0 * half / (1.0 + np.exp(-2.0 * np.abs(s))),
                     2.0 * half * np.exp(-2.0 * np.abs(s)) / (1.0 + np.exp(-2.0 * np.abs(s))))
        keep = (u > 1e-280) & (w > 1e-300) & (u < b - a)
        return u[keep], w[keep]

    h = 0.5
    u, w = nodes_weights(h, only_odd=False)
    total = np.asarray(f(u)) @ w
    for _ in range(max_level):
        h /= 2
        u, w = nodes_weights(h, only_odd=True)
        refined = 0.5 * total + np.asarray(f(u)) @ w
        change = np.max(np.abs(refined - total))
        total = refined
        if change <= atol:
            break
    return total


def semi_infinite(f, a, atol=1e-13, first_len=1.0, max_panels=90):
    """Integrate f over [a, inf) by geometrically doubling GL panels.

    Divergence is reported when per-panel contributions grow persistently,
    or when they are still essentially flat once the panels span far beyond
    any decay scale in this package (tails flatter than ~x^{-1.1} count as
    divergent).
    """
    total = None
    lo = a
    length = first_len
    history = []
    for _ in range(max_panels):
        part = _panel(f, lo, lo + length, 48)
        total = part if total is None else total + part
        mag = float(np.max(np.abs(part)))
        history.append(mag)
        scale = max(1.0, float(np.max(np.abs(total))))
        if mag < atol * scale and len(history) >= 3:
            return total
        if len(history) >= 45 and history[-1] > 0.9 ** 10 * history[-11] and mag > atol * scale:
            raise DivergentIntegralError(
                "tail contributions are not decaying on [%g, inf)" % a
            )
        lo += length
        length *= 2.0
    raise DivergentIntegralError("tail did not converge within panel budget")
