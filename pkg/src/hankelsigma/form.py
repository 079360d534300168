"""Quadratic forms of Hankel kernels on both sides of the main identity.

The direct side evaluates <h, conj(f1) star f2> with the Laplace
convolution (conj(f1) star f2)(t) = integral_0^t conj(f1(s)) f2(t-s) ds;
the sigma side evaluates <sigma, (Lf1)* (Lf2)>.  Equality of the two is
the central identity everything else leans on, so both routes are kept
fully independent: the direct side never touches the sigma machinery.

Test functions live in a small closed family: exponential-polynomial
sums c t^m e^{-g t} (closed under convolution, with rational Laplace
images), interval indicators, and lam-side images such as the
log-gaussian trial family (sigma side only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _quad
from .kernel import Kernel, QuasiCarlemanTerm, FiniteRankTerm
from .sigma import sigma_of_kernel, sigma_pair
from .special import (FIndicatorImage, FPow, FProd, FSum, FunctionSpec,
                      fs_affine, fs_const, gamma)

__all__ = [
    "ExpPoly",
    "Indicator",
    "LaplaceImage",
    "laguerre_test",
    "dilate",
    "FormDomainError",
    "laplace_convolution",
    "form_direct",
    "form_sigma",
    "identity_residual",
    "min_monomial_order",
    "dilation_check",
    "spectral_witnesses",
]


class FormDomainError(ValueError):
    """The form integral diverges for this kernel/test-function pair."""


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpPoly:
    """f(t) = sum_i c_i t^{m_i} e^{-g_i t}; terms as (c, m, g), Re g > 0."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((complex(c), int(m), complex(g)) for c, m, g in self.terms)
        for c, m, g in terms:
            if m < 0 or g.real <= 0:
                raise ValueError("ExpPoly needs m >= 0 and Re g > 0")
        object.__setattr__(self, "terms", terms)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for c, m, g in self.terms:
            out = out + c * t ** m * np.exp(-g * t)
        return out

    def conj(self):
        return ExpPoly(tuple((np.conj(c), m, np.conj(g)) for c, m, g in self.terms))

    def taylor_coeffs(self, count):
        """First ``count`` Taylor coefficients at 0, with cancellation scales.

        Returns (coeffs, scales): coeffs[j] is the t^j coefficient; scales[j]
        sums the magnitudes of the contributions, so coeffs[j] below
        ~1e-12*scales[j] is a numerical zero from cancellation.
        """
        coeffs = np.zeros(count, dtype=complex)
        scales = np.zeros(count, dtype=float)
        for c, m, g in self.terms:
            for j in range(m, count):
                contrib = c * (-g) ** (j - m) / math.factorial(j - m)
                coeffs[j] += contrib
                scales[j] += abs(contrib)
        return coeffs, scales

    def vanishing_order(self):
        """True vanishing order at t = 0 (representation cancellations resolved)."""
        count = max(m for _, m, _ in self.terms) + 8
        coeffs, scales = self.taylor_coeffs(count)
        for j in range(count):
            if abs(coeffs[j]) > 1e-10 * max(scales[j], 1e-300):
                return j
        return count

    def laplace_image(self):
        """L f as a FunctionSpec: sum c m! / (lam + g)^{m+1}."""
        parts = []
        for c, m, g in self.terms:
            parts.append(FProd([fs_const(c * math.factorial(m)),
                                FPow(fs_affine(1.0, g), -(m + 1))]))
        return parts[0] if len(parts) == 1 else FSum(parts)

    def norm_sq(self):
        """L2(R+) norm squared, in closed form."""
        total = 0.0
        for c1, m1, g1 in self.terms:
            for c2, m2, g2 in self.terms:
                gg = np.conj(g1) + g2
                total += np.conj(c1) * c2 * math.factorial(m1 + m2) / gg ** (m1 + m2 + 1)
        return float(np.real(total))

    def scaled(self, a):
        return ExpPoly(tuple((c * a, m, g) for c, m, g in self.terms))


@dataclass(frozen=True)
class Indicator:
    """1 on (a, b), 0 elsewhere."""

    a: float
    b: float

    def __post_init__(self):
        if not 0 <= self.a < self.b:
            raise ValueError("need 0 <= a < b")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return ((t > self.a) & (t < self.b)).astype(float)

    def conj(self):
        return self

    def laplace_image(self):
        return FIndicatorImage(self.a, self.b)

    def norm_sq(self):
        return self.b - self.a


@dataclass(frozen=True)
class LaplaceImage:
    """A test function known only through its Laplace image w(lam).

    Forms on these are evaluated on the sigma side exclusively (the
    log-gaussian trial family, reconstructed members, ...).
    """

    w: FunctionSpec

    def laplace_image(self):
        return self.w


def laguerre_test(coeffs):
    """sum_n coeffs[n] e_n(t) as an ExpPoly (e_n = L_n(t) e^{-t/2})."""
    terms = []
    for n, cn in enumerate(coeffs):
        if cn == 0:
            continue
        for k in range(n + 1):
            lag = (-1) ** k * math.comb(n, k) / math.factorial(k)
            terms.append((cn * lag, k, 0.5))
    return ExpPoly(tuple(terms))


def dilate(f, gam):
    """(D(gam) f)(t) = gam^{1/2} f(gam t), a unitary dilation."""
    if isinstance(f, ExpPoly):
        return ExpPoly(tuple((c * gam ** (0.5 + m), m, g * gam) for c, m, g in f.terms))
    if isinstance(f, Indicator):
        raise TypeError("dilated indicators are rescaled intervals; build directly")
    raise TypeError("cannot dilate %r" % (f,))


# ---------------------------------------------------------------------------
# Laplace convolution (conj(f1) star f2)
# ---------------------------------------------------------------------------

def _conv_monomials(m1, g1, m2, g2):
    """t^{m1} e^{-g1 t} star t^{m2} e^{-g2 t} as ExpPoly terms."""
    if abs(g1 - g2) < 1e-9:
        c = math.factorial(m1) * math.factorial(m2) / math.factorial(m1 + m2 + 1)
        return [(c, m1 + m2 + 1, g1)]
    d = g1 - g2
    terms = []
    # int_0^t s^{m1} e^{-d s} (t-s)^{m2} ds, expanded by the binomial theorem
    for i in range(m2 + 1):
        pref = math.comb(m2, i) * (-1.0) ** i
        mm = m1 + i
        # int_0^t s^mm e^{-d s} ds = mm!/d^{mm+1} (1 - e^{-d t} sum_l (d t)^l / l!)
        base = math.factorial(mm) / d ** (mm + 1)
        terms.append((pref * base, m2 - i, g2))
        for el in range(mm + 1):
            terms.append((-pref * base * d ** el / math.factorial(el), m2 - i + el, g1))
    return terms


def laplace_convolution(f1, f2, grid=None):
    """(conj(f1) star f2): exact within the ExpPoly family.

    Indicator pairs return a piecewise-linear callable; mixed/grid inputs
    fall back to a trapezoid convolution on a uniform t-grid.
    """
    if isinstance(f1, ExpPoly) and isinstance(f2, ExpPoly):
        out = []
        for c1, m1, g1 in f1.conj().terms:
            for c2, m2, g2 in f2.terms:
                out.extend((c1 * c2 * c, m, g) for c, m, g in _conv_monomials(m1, g1, m2, g2))
        merged = {}
        for c, m, g in out:
            key = (m, round(g.real, 12), round(g.imag, 12))
            merged[key] = merged.get(key, 0.0) + c
        return ExpPoly(tuple((c, m, complex(gre, gim)) for (m, gre, gim), c in merged.items()))
    if isinstance(f1, Indicator) and isinstance(f2, Indicator):
        a1, b1, a2, b2 = f1.a, f1.b, f2.a, f2.b

        def conv(t):
            t = np.asarray(t, dtype=float)
            lo = np.maximum(a1, t - b2)
            hi = np.minimum(b1, t - a2)
            return np.maximum(hi - lo, 0.0)

        return conv
    # grid fallback
    n = 4096 if grid is None else grid
    tmax = 60.0
    ts = np.linspace(0.0, tmax, n)
    v1 = np.conj(np.asarray(f1(ts)))
    v2 = np.asarray(f2(ts))
    dt = ts[1] - ts[0]
    full = np.convolve(v1, v2)[: n] * dt
    return ts, full


# ---------------------------------------------------------------------------
# Direct side  <h, conj(f) star f>
# ---------------------------------------------------------------------------

def min_monomial_order(q):
    """Smallest vanishing order m of f at 0 so that <(t)^{-q}, conj(f) star f>
    converges at t=0: needs 2m + 1 - q > -1."""
    thr = (q - 2.0) / 2.0
    m = int(math.floor(thr)) + 1
    return max(0, m)


def _direct_qc_exppoly(term, conv):
    """<v0 (t+r)^{-q} e^{-at}, conv> for an ExpPoly convolution."""
    q, a, r, v0 = term.q, term.alpha, term.r, term.v0
    if r == 0.0:
        shifted = ExpPoly(tuple((c, m, g + a) for c, m, g in conv.terms))
        min_rep = min(m for _, m, _ in shifted.terms)
        if min_rep - q + 1 > 0:
            # every representation monomial converges on its own
            total = 0.0 + 0.0j
            for c, m, g in shifted.terms:
                s = m - q + 1
                total += c * gamma(s) / g ** s
            return v0 * total
        # low representation powers cancel only in aggregate: integrate the
        # Taylor series near 0 (true low coefficients are analytically 0),
        # then plain quadrature where the cancellation is harmless
        count = 36
        coeffs, _ = shifted.taylor_coeffs(count)
        delta = 0.5
        series = 0.0 + 0.0j
        for j in range(count):
            s = j - q + 1
            if s > 1e-12:
                series += coeffs[j] * delta ** s / s
        def g_mid(t):
            return t ** (-q) * shifted(t)
        mid = _quad.adaptive_gl(g_mid, delta, 1.0, atol=1e-13)
        far = _quad.semi_infinite(g_mid, 1.0, atol=1e-14)
        return v0 * (series + mid + far)
    # r > 0: smooth integrand, straight quadrature
    def g_fun(t):
        return (t + r) ** (-q) * np.exp(-a * t) * conv(t)

    val = _quad.adaptive_gl(g_fun, 0.0, 1.0, atol=1e-12) + _quad.semi_infinite(g_fun, 1.0, atol=1e-13)
    return v0 * val


def _direct_fr_exppoly(term, conv):
    """<P(t) e^{-beta t}, conv>: full-gamma closed form, complex-safe."""
    total = 0.0 + 0.0j
    for j, pj in enumerate(term.coeffs):
        if pj == 0:
            continue
        for c, m, g in conv.terms:
            total += pj * c * math.factorial(j + m) / (term.beta + g) ** (j + m + 1)
    return total


def form_direct(kernel, f1, f2=None):
    """<h, conj(f1) star f2> by direct integration; f2 defaults to f1."""
    f2 = f1 if f2 is None else f2
    if not (isinstance(f1, ExpPoly) and isinstance(f2, ExpPoly)):
        raise TypeError("form_direct needs ExpPoly test functions")
    conv = laplace_convolution(f1, f2)
    # domain check against the worst kernel singularity at t = 0
    m_conv = conv.vanishing_order()
    for term in kernel.qc_terms:
        if term.r == 0 and m_conv - term.q <= -1:
            raise FormDomainError(
                "convolution vanishes to order %d at 0, kernel singularity t^-%g"
                % (m_conv, term.q)
            )
    total = 0.0 + 0.0j
    for term in kernel.terms:
        if isinstance(term, QuasiCarlemanTerm):
            total += _direct_qc_exppoly(term, conv)
        elif isinstance(term, FiniteRankTerm):
            total += _direct_fr_exppoly(term, conv)
    if f2 is f1 and abs(total.imag) > 1e-9 * max(1.0, abs(total.real)):
        raise ArithmeticError("diagonal direct form came out complex: %r" % total)
    return float(total.real) if f2 is f1 else total


# ---------------------------------------------------------------------------
# Sigma side and the identity residual
# ---------------------------------------------------------------------------

def form_sigma(kernel, f1, f2=None, atol=1e-10, hints=None, near_radius=0.5):
    """<sigma(h), (Lf1)* (Lf2)>; f2 defaults to f1 (then returns a float)."""
    sig = sigma_of_kernel(kernel)
    w1 = f1.laplace_image()
    w2 = w1 if f2 is None else f2.laplace_image()
    val = sigma_pair(sig, w1, w2, atol=atol, hints=hints, near_radius=near_radius)
    if f2 is None:
        if abs(val.imag) > 1e-9 * max(1.0, abs(val.real)):
            raise ArithmeticError("diagonal sigma form came out complex: %r" % val)
        return float(val.real)
    return val


def identity_residual(kernel, f):
    """|direct - sigma| / (1 + |direct|) for the diagonal form on f."""
    d = form_direct(kernel, f)
    s = form_sigma(kernel, f)
    return abs(d - s) / (1.0 + abs(d))


def dilation_check(q, f, gam):
    """Relative covariance defect of h(t)=t^{-q} under t -> gam t.

    The form on D(gam) f must equal gam^{q-1} times the form on f.
    """
    kern = Kernel((QuasiCarlemanTerm(1.0, q, 0.0, 0.0),))
    base = form_sigma(kern, f)
    moved = form_sigma(kern, dilate(f, gam))
    return abs(moved - gam ** (q - 1) * base) / abs(base)


# ---------------------------------------------------------------------------
# Spectral witnesses from indicator test functions
# ---------------------------------------------------------------------------

def spectral_witnesses(kernel, kind, params=None):
    """Rayleigh-quotient sequences witnessing 0 in the spectrum / unboundedness.

    kind="zero_in_spectrum": quotients on 1_(n, n+1), n = 1..N, which tend
    to 0.  kind="unbounded": quotients on 1_(1/l^2, 1/l) along the given l
    values; they grow without bound exactly when the measure fails the
    linear-growth boundedness test at infinity.
    """
    params = params or {}
    sig = sigma_of_kernel(kernel)
    out = []
    if kind == "zero_in_spectrum":
        for n in range(1, params.get("count", 8) + 1):
            f = Indicator(float(n), float(n + 1))
            val = sigma_pair(sig, f.laplace_image(), f.laplace_image()).real
            out.append(val / f.norm_sq())
    elif kind == "unbounded":
        for el in params.get("l_values", (10.0, 100.0, 1000.0)):
            f = Indicator(el ** -2, el ** -1)
            val = sigma_pair(sig, f.laplace_image(), f.laplace_image()).real
            out.append(val / f.norm_sq())
    else:
        raise ValueError("unknown witness kind %r" % (kind,))
    return out
