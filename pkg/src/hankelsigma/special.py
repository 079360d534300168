"""Special functions and truncated-Taylor (jet) arithmetic.

Everything downstream -- distribution pairings, Mellin weights, Galerkin
entries -- reduces to three primitives collected here: the complex gamma
function, Laguerre polynomials, and exact jets of a small closed family
of analytic expressions (rational * exponential * power * log factors).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "gamma",
    "log_gamma",
    "laguerre",
    "laguerre_e",
    "Jet",
    "jet_eval",
    "FunctionSpec",
    "FPoly",
    "FExp",
    "FLog",
    "FPow",
    "FRecip",
    "FProd",
    "FSum",
    "FIndicatorImage",
    "fs_var",
    "fs_const",
    "fs_affine",
    "laguerre_image",
    "PoleError",
    "NonAnalyticError",
]


class PoleError(ValueError):
    """Gamma evaluated at a non-positive integer."""


class NonAnalyticError(ValueError):
    """Jet requested at a point where the expression is not analytic."""


# ---------------------------------------------------------------------------
# Complex gamma (Lanczos, g=7, 9 coefficients) with reflection for Re z < 1/2.
# ---------------------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS_C = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])


def _lanczos_series(z):
    s = np.full(np.shape(z), _LANCZOS_C[0], dtype=complex)
    for k in range(1, 9):
        s = s + _LANCZOS_C[k] / (z + (k - 1))
    return s


def _gamma_right(z):
    # valid for Re z >= 0.5
    zm1 = z - 1.0
    t = zm1 + _LANCZOS_G + 0.5
    return np.sqrt(2 * np.pi) * t ** (zm1 + 0.5) * np.exp(-t) * _lanczos_series(z)


def gamma(z):
    """Gamma(z) for complex scalar or array z, ~1e-13 relative accuracy."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    on_pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(on_pole):
        raise PoleError("gamma pole at non-positive integer")
    out = np.empty_like(z)
    right = z.real >= 0.5
    if np.any(right):
        out[right] = _gamma_right(z[right])
    if np.any(~right):
        zl = z[~right]
        # reflection: Gamma(z) = pi / (sin(pi z) * Gamma(1-z))
        out[~right] = np.pi / (np.sin(np.pi * zl) * _gamma_right(1.0 - zl))
    return out[0] if scalar else out


def log_gamma(z):
    """Principal log of Gamma(z) for Re z >= 0.5 (enough for the 1/2+i*xi line).

    Stays finite where gamma itself under/overflows, which is what the
    sandwiched-transform ratios need.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.real < 0.5):
        raise ValueError("log_gamma implemented for Re z >= 0.5 only")
    zm1 = z - 1.0
    t = zm1 + _LANCZOS_G + 0.5
    return 0.5 * math.log(2 * np.pi) + (zm1 + 0.5) * np.log(t) - t + np.log(_lanczos_series(z))


# ---------------------------------------------------------------------------
# Laguerre polynomials and the orthonormal basis e_n(t) = L_n(t) e^{-t/2}.
# ---------------------------------------------------------------------------

def laguerre(n, t):
    """L_n(t) by the three-term recurrence; t scalar or array, n >= 0."""
    if n < 0:
        raise ValueError("laguerre order must be >= 0")
    t = np.asarray(t, dtype=float)
    p_prev = np.ones_like(t)
    if n == 0:
        return p_prev
    p = 1.0 - t
    for k in range(1, n):
        p, p_prev = ((2 * k + 1 - t) * p - k * p_prev) / (k + 1), p
    return p


def laguerre_e(n, t):
    """Orthonormal basis element e_n(t) = L_n(t) e^{-t/2} of L2(R+)."""
    t = np.asarray(t, dtype=float)
    return laguerre(n, t) * np.exp(-t / 2)


# ---------------------------------------------------------------------------
# Jets: truncated Taylor data, coeffs[p] = f^{(p)}(center) / p!
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Jet:
    """Taylor expansion of an analytic function at ``center`` to ``order``."""

    center: complex
    coeffs: np.ndarray  # length order+1, complex

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))

    @property
    def order(self):
        return len(self.coeffs) - 1

    def derivative(self, p):
        """f^{(p)}(center)."""
        return self.coeffs[p] * math.factorial(p)

    def value(self):
        return self.coeffs[0]

    def _check(self, other):
        if self.center != other.center or self.order != other.order:
            raise ValueError("jet centers/orders must match")

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.center, self.coeffs + other.coeffs)
        c = self.coeffs.copy()
        c[0] += other
        return Jet(self.center, c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.center, -self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -other)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.center, self.coeffs * other)
        self._check(other)
        n = self.order + 1
        out = np.zeros(n, dtype=complex)
        a, b = self.coeffs, other.coeffs
        for p in range(n):
            out[p] = np.dot(a[: p + 1], b[p::-1])
        return Jet(self.center, out)

    __rmul__ = __mul__

    def reciprocal(self):
        a = self.coeffs
        if a[0] == 0:
            raise NonAnalyticError("reciprocal of a jet vanishing at center")
        n = self.order + 1
        out = np.zeros(n, dtype=complex)
        out[0] = 1.0 / a[0]
        for p in range(1, n):
            out[p] = -out[0] * np.dot(a[1: p + 1], out[p - 1:: -1])
        return Jet(self.center, out)

    def exp(self):
        a = self.coeffs
        n = self.order + 1
        out = np.zeros(n, dtype=complex)
        out[0] = np.exp(a[0])
        for p in range(1, n):
            out[p] = np.dot(np.arange(1, p + 1) * a[1: p + 1], out[p - 1:: -1]) / p
        return Jet(self.center, out)

    def log(self):
        a = self.coeffs
        if a[0] == 0:
            raise NonAnalyticError("log of a jet vanishing at center")
        n = self.order + 1
        out = np.zeros(n, dtype=complex)
        out[0] = np.log(a[0])
        for p in range(1, n):
            acc = a[p]
            for k in range(1, p):
                acc -= (k / p) * out[k] * a[p - k]
            out[p] = acc / a[0]
        return Jet(self.center, out)

    def ipow(self, m):
        """Integer power by repeated multiplication (no branch cuts)."""
        if m < 0:
            return self.reciprocal().ipow(-m)
        result = Jet(self.center, np.concatenate(([1.0], np.zeros(self.order, complex))))
        base = self
        while m > 0:
            if m & 1:
                result = result * base
            base = base * base
            m >>= 1
        return result

    def pow(self, p):
        """Real (or complex) power via exp(p*log); principal branch."""
        if isinstance(p, (int, np.integer)) or (isinstance(p, float) and p == int(p)):
            return self.ipow(int(p))
        return (self.log() * p).exp()

    def conj_mirror(self):
        """Jet of z -> conj(f(conj z)) at conj(center)."""
        return Jet(np.conj(self.center), np.conj(self.coeffs))


def _var_jet(center, order):
    c = np.zeros(order + 1, dtype=complex)
    c[0] = center
    if order >= 1:
        c[1] = 1.0
    return Jet(center, c)


# ---------------------------------------------------------------------------
# FunctionSpec: a closed expression-tree language so jets are exact.
# Nodes: polynomial, exp, log, power, reciprocal, product, sum, plus the
# stable interval-indicator Laplace image.
# ---------------------------------------------------------------------------

class FunctionSpec:
    """Base class for the closed-form expression language."""

    def __call__(self, z):
        raise NotImplementedError

    def jet(self, center, order):
        raise NotImplementedError

    def conj(self):
        """Spec of z -> conj(f(conj z)); equals pointwise conjugate on R."""
        raise NotImplementedError

    def decay(self):
        """(rate, power): |f| ~ C lam^power e^{-rate lam} as lam -> +inf.

        rate=inf flags super-exponential decay; raises ValueError when the
        expression grows too irregularly to bound.
        """
        raise NotImplementedError

    def __add__(self, other):
        return FSum([self, _as_spec(other)])

    __radd__ = __add__

    def __mul__(self, other):
        return FProd([self, _as_spec(other)])

    __rmul__ = __mul__

    def __sub__(self, other):
        return FSum([self, FProd([FPoly([-1.0]), _as_spec(other)])])

    def __neg__(self):
        return FProd([FPoly([-1.0]), self])


def _as_spec(x):
    if isinstance(x, FunctionSpec):
        return x
    return FPoly([complex(x)])


class FPoly(FunctionSpec):
    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        if len(self.coeffs) == 0:
            self.coeffs = np.zeros(1, complex)

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.coeffs)

    def jet(self, center, order):
        out = Jet(center, np.zeros(order + 1, complex))
        zj = _var_jet(center, order)
        for c in self.coeffs[::-1]:
            out = out * zj + c
        return out

    def conj(self):
        return FPoly(np.conj(self.coeffs))

    def decay(self):
        deg = max([k for k, c in enumerate(self.coeffs) if c != 0], default=0)
        return (0.0, float(deg))


class FExp(FunctionSpec):
    def __init__(self, child):
        self.child = _as_spec(child)

    def __call__(self, z):
        return np.exp(self.child(z))

    def jet(self, center, order):
        return self.child.jet(center, order).exp()

    def conj(self):
        return FExp(self.child.conj())

    def decay(self):
        ch = self.child
        if isinstance(ch, FPoly):
            deg = max([k for k, c in enumerate(ch.coeffs) if c != 0], default=0)
            if deg <= 1:
                slope = ch.coeffs[1] if len(ch.coeffs) > 1 else 0.0
                return (-float(np.real(slope)), 0.0)
            lead = ch.coeffs[deg]
            if lead.real < 0:
                return (math.inf, 0.0)
            raise ValueError("exp of a growing polynomial has no decay bound")
        # non-polynomial exponents (log-window forms): probe the real part
        probes = np.real(ch(np.array([1e3, 1e6], dtype=float)))
        if probes[1] < -20 and probes[1] < probes[0]:
            return (math.inf, 0.0)
        raise ValueError("cannot bound decay of this exponential factor")


class FLog(FunctionSpec):
    def __init__(self, child):
        self.child = _as_spec(child)

    def __call__(self, z):
        return np.log(self.child(z))

    def jet(self, center, order):
        return self.child.jet(center, order).log()

    def conj(self):
        return FLog(self.child.conj())

    def decay(self):
        # grows slower than any power; 0 is safe inside strict comparisons
        return (0.0, 0.0)


class FPow(FunctionSpec):
    def __init__(self, child, exponent):
        self.child = _as_spec(child)
        self.exponent = exponent

    def __call__(self, z):
        base = self.child(z)
        e = self.exponent
        if isinstance(e, (int, np.integer)) or float(e) == int(e):
            return base ** int(e)
        return np.power(base.astype(complex) if hasattr(base, "astype") else complex(base), e)

    def jet(self, center, order):
        return self.child.jet(center, order).pow(self.exponent)

    def conj(self):
        return FPow(self.child.conj(), np.conj(self.exponent) if isinstance(self.exponent, complex) else self.exponent)

    def decay(self):
        rate, power = self.child.decay()
        e = float(np.real(self.exponent))
        if rate != 0.0:
            raise ValueError("power of an exponentially varying factor")
        return (0.0, power * e)


class FRecip(FunctionSpec):
    def __init__(self, child):
        self.child = _as_spec(child)

    def __call__(self, z):
        return 1.0 / self.child(z)

    def jet(self, center, order):
        return self.child.jet(center, order).reciprocal()

    def conj(self):
        return FRecip(self.child.conj())

    def decay(self):
        rate, power = self.child.decay()
        if rate != 0.0:
            raise ValueError("reciprocal of an exponentially varying factor")
        return (0.0, -power)


class FProd(FunctionSpec):
    def __init__(self, parts):
        self.parts = [_as_spec(p) for p in parts]

    def __call__(self, z):
        out = self.parts[0](z)
        for p in self.parts[1:]:
            out = out * p(z)
        return out

    def jet(self, center, order):
        out = self.parts[0].jet(center, order)
        for p in self.parts[1:]:
            out = out * p.jet(center, order)
        return out

    def conj(self):
        return FProd([p.conj() for p in self.parts])

    def decay(self):
        rate, power = 0.0, 0.0
        for p in self.parts:
            r, pw = p.decay()
            rate, power = rate + r, power + pw
        return (rate, power)


class FSum(FunctionSpec):
    def __init__(self, parts):
        self.parts = [_as_spec(p) for p in parts]

    def __call__(self, z):
        out = self.parts[0](z)
        for p in self.parts[1:]:
            out = out + p(z)
        return out

    def jet(self, center, order):
        out = self.parts[0].jet(center, order)
        for p in self.parts[1:]:
            out = out + p.jet(center, order)
        return out

    def conj(self):
        return FSum([p.conj() for p in self.parts])

    def decay(self):
        # dominant term: smallest rate, then largest power
        infos = [p.decay() for p in self.parts]
        rate = min(r for r, _ in infos)
        power = max(pw for r, pw in infos if r == rate)
        return (rate, power)


class FIndicatorImage(FunctionSpec):
    """(e^{-a lam} - e^{-b lam}) / lam, the Laplace image of 1_(a,b)."""

    def __init__(self, a, b):
        if not (0 <= a < b):
            raise ValueError("need 0 <= a < b")
        self.a = float(a)
        self.b = float(b)

    def __call__(self, z):
        z = np.asarray(z, dtype=float) if np.isrealobj(z) else np.asarray(z, dtype=complex)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.exp(-self.a * z) * (-np.expm1(-(self.b - self.a) * z)) / z
        small = np.abs(z) < 1e-300
        if np.any(small):
            out = np.where(small, self.b - self.a, out)
        return out

    def jet(self, center, order):
        if center == 0:
            raise NonAnalyticError("indicator image jet at 0 not supported")
        za = _var_jet(center, order)
        ea = (za * (-self.a)).exp()
        eb = (za * (-self.b)).exp()
        return (ea - eb) * za.reciprocal()

    def conj(self):
        return FIndicatorImage(self.a, self.b)

    def decay(self):
        return (self.a, -1.0) if self.a > 0 else (0.0, -1.0)


def fs_var():
    """The identity expression z."""
    return FPoly([0.0, 1.0])


def fs_const(c):
    return FPoly([complex(c)])


def fs_affine(slope, offset):
    """slope*z + offset."""
    return FPoly([complex(offset), complex(slope)])


def laguerre_image(n):
    """Laplace image of e_n: (lam - 1/2)^n / (lam + 1/2)^{n+1}."""
    if n == 0:
        return FRecip(fs_affine(1.0, 0.5))
    return FProd([FPow(fs_affine(1.0, -0.5), n), FPow(fs_affine(1.0, 0.5), -(n + 1))])


def jet_eval(fspec, center, order):
    """Exact truncated Taylor expansion of a FunctionSpec at ``center``."""
    return fspec.jet(complex(center), int(order))
