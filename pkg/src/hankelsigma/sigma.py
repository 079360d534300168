"""Sigma distributions of Hankel kernels and their pairings.

The sigma distribution of a kernel comes in three part-kinds:

* RegularDensity     c/Gamma(q) (lam-alpha)_+^{q-1} e^{-r(lam-alpha)}, q > 0;
* RegularizedPower   the same formula with q < 0 non-integer, read as a
                     finite-part distribution: pairings subtract the Taylor
                     polynomial of the test function at alpha to order
                     n = floor(|q|);
* DeltaCombo         sum_j c_j delta^{(j)}(lam - beta), Re beta > 0, the
                     sigma distribution of P(t) e^{-beta t}.

Pairings ``<sigma, w1* w2>`` are sesquilinear (antilinear in w1).  A
RegularizedPower pairing folds the exponential into the test function
before subtracting, splits off an analytic series piece near alpha, and
integrates the remainder directly; DeltaCombo pairings are exact jet
arithmetic at beta.

Sign-matrices of finite-rank kernels are assembled from the exponential-
variable representation beta^{-1-j} (1-d)...(j-d) delta(x-kappa) of the
same distribution, with kappa = -ln beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _quad
from .kernel import Kernel, QuasiCarlemanTerm, FiniteRankTerm, UndefinableKernelError
from .special import Jet, gamma

__all__ = [
    "RegularDensity",
    "RegularizedPower",
    "DeltaCombo",
    "SigmaDistribution",
    "SignMatrix",
    "sigma_of_kernel",
    "sigma_pair",
    "sign_matrix",
    "sign_matrix_tilde",
    "matrix_inertia",
    "NonHermitianError",
    "DecayError",
]


class NonHermitianError(ValueError):
    pass


class DecayError(ValueError):
    """Test functions decay too slowly for the pairing integral."""


# ---------------------------------------------------------------------------
# Part types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegularDensity:
    c: float
    q: float
    alpha: float = 0.0
    r: float = 0.0

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError("RegularDensity needs q > 0")

    def density(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = np.zeros_like(lam)
        m = lam > self.alpha
        u = lam[m] - self.alpha
        out[m] = self.c / float(gamma(self.q).real) * u ** (self.q - 1) * np.exp(-self.r * u)
        return out


@dataclass(frozen=True)
class RegularizedPower:
    c: float
    q: float
    alpha: float
    r: float = 0.0

    def __post_init__(self):
        if self.q >= 0 or float(self.q).is_integer():
            raise ValueError("RegularizedPower needs non-integer q < 0")
        if self.alpha <= 0:
            raise ValueError("RegularizedPower needs alpha > 0")

    @property
    def order(self):
        """Taylor-subtraction order n with -n-1 < q < -n."""
        return int(math.floor(-self.q))

    def density(self, lam):
        """The function part away from alpha (the distribution is more)."""
        lam = np.asarray(lam, dtype=float)
        out = np.zeros_like(lam)
        m = lam > self.alpha
        u = lam[m] - self.alpha
        out[m] = self.c / float(gamma(self.q).real) * u ** (self.q - 1) * np.exp(-self.r * u)
        return out


def _falling_diffop(j):
    """Coefficients of (1-X)(2-X)...(j-X) in ascending powers of X."""
    poly = np.array([1.0 + 0j])
    for i in range(1, j + 1):
        poly = np.convolve(poly, np.array([i, -1.0], dtype=complex))
    return poly


@dataclass(frozen=True)
class DeltaCombo:
    """sigma = sum_j coeffs[j] * delta^{(j)}(lam - beta)."""

    beta: complex
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if self.beta.real <= 0:
            raise ValueError("DeltaCombo needs Re beta > 0")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def kappa(self):
        """-ln beta, the support point in the exponential variable."""
        return -np.log(self.beta)

    def diffop(self):
        """x-variable representation: sum_p d_p (d/dx)^p delta(x - kappa)."""
        d = np.zeros(len(self.coeffs), dtype=complex)
        for j, cj in enumerate(self.coeffs):
            if cj == 0:
                continue
            d[: j + 1] += cj * self.beta ** (-1 - j) * _falling_diffop(j)
        return d


@dataclass(frozen=True)
class SigmaDistribution:
    parts: tuple = field(default_factory=tuple)

    def density(self, lam):
        """Pointwise sum of the locally integrable / function parts."""
        lam = np.asarray(lam, dtype=float)
        out = np.zeros_like(lam)
        for p in self.parts:
            if isinstance(p, (RegularDensity, RegularizedPower)):
                out = out + p.density(lam)
        return out

    @property
    def regular_parts(self):
        return [p for p in self.parts if isinstance(p, RegularDensity)]

    @property
    def regularized_parts(self):
        return [p for p in self.parts if isinstance(p, RegularizedPower)]

    @property
    def delta_parts(self):
        return [p for p in self.parts if isinstance(p, DeltaCombo)]


def sigma_of_kernel(kernel: Kernel) -> SigmaDistribution:
    """Exact sigma distribution of a kernel; error if undefinable."""
    parts = []
    for term in kernel.terms:
        if isinstance(term, QuasiCarlemanTerm):
            if term.alpha == 0 and term.q <= 0:
                raise UndefinableKernelError(
                    "alpha=0 with q<=0 admits no sigma distribution"
                )
            if term.q > 0:
                parts.append(RegularDensity(term.v0, term.q, term.alpha, term.r))
            else:
                parts.append(RegularizedPower(term.v0, term.q, term.alpha, term.r))
        elif isinstance(term, FiniteRankTerm):
            parts.append(DeltaCombo(term.beta, term.coeffs))
        else:
            raise TypeError("unknown kernel term %r" % (term,))
    return SigmaDistribution(tuple(parts))


# ---------------------------------------------------------------------------
# Pairing engines.  The scalar entry point works on FunctionSpec tests; the
# underscored engines take plain callables/jet arrays so the Galerkin batch
# route can reuse them.
# ---------------------------------------------------------------------------

_SERIES_EXTRA = 30


def _check_density_decay(q, r, w1, w2):
    try:
        r1, p1 = w1.decay()
        r2, p2 = w2.decay()
    except ValueError:
        return  # no structural bound; the tail quadrature will police it
    rate = r + r1 + r2
    if rate == math.inf or rate > 0:
        return
    if rate < 0 or (q - 1) + p1 + p2 >= -1:
        raise DecayError(
            "pairing integrand ~ lam^%g with no exponential decay" % ((q - 1) + p1 + p2)
        )


def _density_pair_engine(part, psi, atol=1e-11, hints=None, max_depth=11):
    """integral_alpha^inf u^{q-1} psi(alpha+u) du * c/Gamma(q), q > 0.

    ``psi`` maps a lambda array to values with any leading batch shape and
    must already contain the e^{-r(lam-alpha)} factor.
    """
    a, q = part.alpha, part.q
    weight = part.c / float(gamma(q).real)
    hs = sorted(h - a for h in (hints or []) if h > a)
    far_start = max(1.0, *[2.0 * h for h in hs]) if hs else 1.0

    if q < 1.0:
        def g_near(u):
            return u ** (q - 1) * psi(a + u)
        near = _quad.tanh_sinh_left(g_near, 0.0, min(1.0, far_start), atol=atol)
        mid_lo = min(1.0, far_start)
    else:
        near = None
        mid_lo = 0.0

    def g(lam):
        return (lam - a) ** (q - 1) * psi(lam)

    mid = _quad.adaptive_gl(g, a + mid_lo, a + far_start, atol=atol,
                            knots=[a + h for h in hs], max_depth=max_depth)
    far = _quad.semi_infinite(g, a + far_start, atol=atol * 0.1)
    total = mid + far
    if near is not None:
        total = total + near
    return weight * total


def _regularized_pair_engine(part, psi, psi_jets, atol=1e-11, hints=None,
                             near_radius=0.5):
    """Finite-part pairing for q < 0 non-integer.

    psi_jets: Taylor coefficients of psi at alpha, shape (..., n+EXTRA+1);
    psi(lam array) -> (..., m).  The series radius is halved automatically
    until the truncated tail is negligible and the series reproduces a
    direct evaluation of psi.
    """
    a, q, n = part.alpha, part.q, part.order
    weight = part.c / float(gamma(q).real)
    jets = np.asarray(psi_jets)
    extra = jets.shape[-1] - (n + 1)
    if extra < 8:
        raise ValueError("need at least 8 spare jet orders")

    hs = sorted(h - a for h in (hints or []) if h > a)
    far_start = max(1.0, *[2.0 * h for h in hs]) if hs else 1.0

    # adaptive series radius: shrink until the truncated tail is negligible
    # at the requested absolute tolerance and the series matches a direct
    # evaluation of psi (a live check that the radius of convergence holds)
    d0 = min(near_radius, 0.5 * far_start)
    ps_hi = np.arange(n + 1, n + extra + 1)
    for _ in range(60):
        terms = jets[..., n + 1:] * (d0 ** (q + ps_hi) / (q + ps_hi))
        last = np.max(np.abs(terms[..., -3:]))
        series_val = np.sum(jets * d0 ** np.arange(jets.shape[-1]), axis=-1)
        direct_val = psi(np.array([a + d0]))[..., 0]
        mismatch = np.abs(series_val - direct_val)
        ok = mismatch <= np.maximum(1e-8 * np.abs(direct_val), atol * 1e-2)
        if last <= atol * 1e-2 and np.all(ok):
            break
        d0 *= 0.5
        if d0 < 1e-9:
            raise ValueError("series split for the finite part did not converge")
    near = np.sum(terms, axis=-1)

    ps_lo = np.arange(n + 1)
    taylor = jets[..., : n + 1]

    def g_sub(u):
        tay = np.sum(taylor[..., :, None] * u[None, :] ** ps_lo[:, None], axis=-2)
        return u ** (q - 1) * (psi(a + u) - tay)

    mid = _quad.adaptive_gl(g_sub, d0, far_start, atol=atol, knots=hs)

    def g_raw(lam):
        return (lam - a) ** (q - 1) * psi(lam)

    far = _quad.semi_infinite(g_raw, a + far_start, atol=atol * 0.1)
    tail_corr = np.sum(taylor * (far_start ** (q + ps_lo) / (-q - ps_lo)), axis=-1)
    return weight * (near + mid + far - tail_corr)


def _delta_pair_engine(part, jw1c, jw2):
    """sum_j c_j (-1)^j d^j/dlam^j [w1* w2](beta), exact via jets.

    jw1c is the jet of w1*(lam)=conj(w1(conj lam)) at beta; jw2 the jet of
    w2 at beta; both to order >= K.
    """
    prod = jw1c * jw2
    total = 0.0 + 0.0j
    for j, cj in enumerate(part.coeffs):
        if cj == 0:
            continue
        total += cj * (-1) ** j * prod.derivative(j)
    return total


def sigma_pair(sig, w1, w2, atol=1e-10, hints=None, near_radius=0.5):
    """<sigma, w1* w2>: antilinear in w1, linear in w2.

    w1, w2 are FunctionSpec tests analytic on Re lam > 0 with enough decay;
    ``hints`` seeds quadrature breakpoints (sharp test-function features).
    """
    w1c = w1.conj()
    total = 0.0 + 0.0j
    for part in sig.parts:
        if isinstance(part, RegularDensity):
            _check_density_decay(part.q, part.r, w1, w2)

            def psi(lam, _p=part):
                return np.exp(-_p.r * (lam - _p.alpha)) * w1c(lam) * w2(lam)

            total += _density_pair_engine(part, psi, atol=atol, hints=hints)
        elif isinstance(part, RegularizedPower):
            _check_density_decay(part.q, part.r, w1, w2)

            def psi(lam, _p=part):
                return np.exp(-_p.r * (lam - _p.alpha)) * w1c(lam) * w2(lam)

            order = part.order + _SERIES_EXTRA
            exc = np.zeros(order + 1, complex)
            if order >= 1:
                exc[1] = -part.r
            expo = Jet(part.alpha, exc).exp()
            jpsi = expo * w1c.jet(part.alpha, order) * w2.jet(part.alpha, order)
            total += _regularized_pair_engine(part, psi, jpsi.coeffs, atol=atol,
                                              hints=hints, near_radius=near_radius)
        elif isinstance(part, DeltaCombo):
            K = part.degree
            jw1c = w1c.jet(part.beta, K)
            jw2 = w2.jet(part.beta, K)
            total += _delta_pair_engine(part, jw1c, jw2)
        else:
            raise TypeError("unknown sigma part %r" % (part,))
    return total


def sigma_pair_real(sig, w, atol=1e-10, hints=None, near_radius=0.5):
    """Diagonal pairing <sigma, w* w> for a self-adjoint sigma; returns float."""
    val = sigma_pair(sig, w, w, atol=atol, hints=hints, near_radius=near_radius)
    if abs(val.imag) > 1e-9 * max(1.0, abs(val.real)):
        raise NonHermitianError("diagonal pairing came out complex: %r" % val)
    return float(val.real)


# ---------------------------------------------------------------------------
# Sign-matrices and inertia
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SignMatrix:
    entries: np.ndarray
    inertia: tuple | None

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=complex))


def matrix_inertia(a, tol=None):
    """(n_plus, n_minus, n_zero) of a hermitian matrix by eigenvalue signs."""
    a = np.asarray(a, dtype=complex)
    scale = max(np.max(np.abs(a)), 1e-300)
    if np.max(np.abs(a - a.conj().T)) > 1e-12 * scale:
        raise NonHermitianError("matrix is not hermitian within 1e-12")
    ev = np.linalg.eigvalsh(a)
    norm = max(np.max(np.abs(ev)), 1e-300)
    t = (1e-10 if tol is None else tol) * norm
    return (int(np.sum(ev > t)), int(np.sum(ev < -t)), int(np.sum(np.abs(ev) <= t)))


def sign_matrix(pcoeffs, beta):
    """S(P, beta): the (K+1)x(K+1) matrix of the finite-rank sigma-form on
    jet data at kappa = -ln beta.

    Skew triangular (entries vanish for a+b > K); anti-diagonal entries are
    binom(K, a) beta^{-1-K} times the leading coefficient of P; the matrix
    of the conjugated data is the adjoint.
    """
    combo = DeltaCombo(beta, tuple(pcoeffs))
    K = combo.degree
    d = combo.diffop()
    S = np.zeros((K + 1, K + 1), dtype=complex)
    for aa in range(K + 1):
        for bb in range(K + 1 - aa):
            S[aa, bb] = (-1) ** (aa + bb) * math.comb(aa + bb, aa) * d[aa + bb]
    scale = max(np.max(np.abs(S)), 1e-300)
    inertia = None
    if np.max(np.abs(S - S.conj().T)) <= 1e-12 * scale:
        inertia = matrix_inertia(S)
    return SignMatrix(S, inertia)


def sign_matrix_tilde(pcoeffs, beta):
    """Block sign-matrix [[0, S*], [S, 0]] for a conjugate pair, Im beta != 0."""
    beta = complex(beta)
    if beta.imag == 0:
        raise ValueError("sign_matrix_tilde needs Im beta != 0")
    S = sign_matrix(pcoeffs, beta).entries
    K1 = S.shape[0]
    T = np.zeros((2 * K1, 2 * K1), dtype=complex)
    T[:K1, K1:] = S.conj().T
    T[K1:, :K1] = S
    return SignMatrix(T, matrix_inertia(T))
