"""Symbolic Hankel kernels h(t) and their boundedness classification.

A kernel is a sum of quasi-Carleman terms v0*(t+r)^{-q}*e^{-alpha t} and
finite-rank (Kronecker) terms P(t)*e^{-beta t} with Re beta > 0.  Integer
q <= 0 with alpha > 0 is normalized into the finite-rank family at
construction, so every surviving quasi-Carleman term has genuinely
power-type behaviour.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "QuasiCarlemanTerm",
    "FiniteRankTerm",
    "Kernel",
    "Classification",
    "UndefinableKernelError",
    "NonSelfAdjointError",
    "kernel_eval",
    "classify",
    "carleman_condition",
    "carleman",
    "quasi_carleman",
    "finite_rank",
]


class UndefinableKernelError(ValueError):
    """alpha = 0 with q <= 0: h(t) does not tend to 0, no operator exists."""


class NonSelfAdjointError(ValueError):
    """Complex finite-rank terms must appear in conjugate pairs."""


@dataclass(frozen=True)
class QuasiCarlemanTerm:
    """v0 * (t + r)^{-q} * e^{-alpha t}."""

    v0: float
    q: float
    alpha: float = 0.0
    r: float = 0.0

    def __post_init__(self):
        if self.alpha < 0 or self.r < 0:
            raise ValueError("alpha and r must be >= 0")

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        return self.v0 * (t + self.r) ** (-self.q) * np.exp(-self.alpha * t)


@dataclass(frozen=True)
class FiniteRankTerm:
    """P(t) * e^{-beta t} with Re beta > 0; coeffs ascending in t."""

    coeffs: tuple
    beta: complex

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "beta", complex(self.beta))
        if self.beta.real <= 0:
            raise ValueError("finite-rank term needs Re beta > 0")
        if all(c == 0 for c in self.coeffs):
            raise ValueError("zero polynomial in finite-rank term")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def eval(self, t):
        t = np.asarray(t, dtype=complex)
        return np.polynomial.polynomial.polyval(t, np.asarray(self.coeffs)) * np.exp(-self.beta * t)


def _normalize_term(term):
    """Integer q <= 0 with alpha > 0 becomes a finite-rank term."""
    if isinstance(term, QuasiCarlemanTerm) and term.q <= 0 and float(term.q).is_integer() and term.alpha > 0:
        m = int(-term.q)
        coeffs = [term.v0 * math.comb(m, i) * term.r ** (m - i) for i in range(m + 1)]
        return FiniteRankTerm(tuple(coeffs), term.alpha)
    return term


def _merge_finite_rank(terms, tol=1e-12):
    """Combine finite-rank terms with equal beta (Kronecker form needs
    distinct exponents); drop terms whose polynomials cancel entirely."""
    out = []
    merged = []
    for t in terms:
        if not isinstance(t, FiniteRankTerm):
            out.append(t)
            continue
        for entry in merged:
            if abs(entry["beta"] - t.beta) <= tol:
                n = max(len(entry["coeffs"]), len(t.coeffs))
                c = np.zeros(n, dtype=complex)
                c[: len(entry["coeffs"])] += entry["coeffs"]
                c[: len(t.coeffs)] += t.coeffs
                entry["coeffs"] = c
                break
        else:
            merged.append({"beta": t.beta, "coeffs": np.asarray(t.coeffs, dtype=complex)})
    for entry in merged:
        if np.max(np.abs(entry["coeffs"])) > tol:
            out.append(FiniteRankTerm(tuple(entry["coeffs"]), entry["beta"]))
    return out


@dataclass(frozen=True)
class Kernel:
    """A sum of quasi-Carleman and finite-rank terms."""

    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        normalized = [_normalize_term(t) for t in self.terms]
        object.__setattr__(self, "terms", tuple(_merge_finite_rank(normalized)))

    @property
    def qc_terms(self):
        return [t for t in self.terms if isinstance(t, QuasiCarlemanTerm)]

    @property
    def fr_terms(self):
        return [t for t in self.terms if isinstance(t, FiniteRankTerm)]

    def __add__(self, other):
        return Kernel(self.terms + other.terms)

    def check_self_adjoint(self, tol=1e-12):
        """Require real quasi-Carleman data and conjugate-paired complex terms."""
        pool = [t for t in self.fr_terms if abs(t.beta.imag) > tol or any(abs(c.imag) > tol * max(1, abs(c)) for c in t.coeffs)]
        while pool:
            t = pool.pop()
            mate = None
            for i, u in enumerate(pool):
                if abs(u.beta - np.conj(t.beta)) <= tol and len(u.coeffs) == len(t.coeffs) and all(
                    abs(np.conj(a) - b) <= tol * max(1.0, abs(a)) for a, b in zip(t.coeffs, u.coeffs)
                ):
                    mate = i
                    break
            if mate is None:
                raise NonSelfAdjointError("complex finite-rank term lacks its conjugate partner")
            pool.pop(mate)
        return True


class Classification(enum.Enum):
    BOUNDED = "Bounded"
    UNBOUNDED_POSITIVE_FORM = "UnboundedPositiveForm"
    INDEFINITE_FORM = "IndefiniteForm"
    UNDEFINABLE = "Undefinable"


def kernel_eval(kernel, t):
    """Pointwise h(t), t > 0; self-adjoint kernels give real values."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        for term in kernel.qc_terms:
            if term.r == 0 and term.q > 0:
                raise ValueError("kernel singular at t = 0")
        if np.any(t_arr < 0):
            raise ValueError("kernel defined for t > 0")
    total = np.zeros_like(t_arr, dtype=complex)
    for term in kernel.terms:
        total = total + term.eval(t_arr)
    scale = np.max(np.abs(total)) if total.size else 0.0
    if np.max(np.abs(total.imag)) > 1e-13 * max(1.0, scale):
        raise NonSelfAdjointError("kernel evaluates to a complex value")
    out = total.real
    return float(out) if np.ndim(t) == 0 else out


def _classify_single(term):
    q, alpha, r = term.q, term.alpha, term.r
    if alpha == 0 and q <= 0:
        return Classification.UNDEFINABLE
    if q < 0:
        return Classification.INDEFINITE_FORM
    if alpha > 0:
        bounded = r > 0 or q <= 1
    else:
        bounded = (r > 0 and q >= 1) or (r == 0 and q == 1)
    return Classification.BOUNDED if bounded else Classification.UNBOUNDED_POSITIVE_FORM


_SEVERITY = {
    Classification.BOUNDED: 0,
    Classification.UNBOUNDED_POSITIVE_FORM: 1,
    Classification.INDEFINITE_FORM: 2,
    Classification.UNDEFINABLE: 3,
}


def classify(kernel):
    """Boundedness/definability class; finite-rank terms never matter.

    Sums of quasi-Carleman terms take the most pessimistic single-term
    verdict (the join), since mixed-parameter sums are not classified
    more finely.
    """
    verdicts = [_classify_single(t) for t in kernel.qc_terms]
    if not verdicts:
        return Classification.BOUNDED
    return max(verdicts, key=lambda v: _SEVERITY[v])


def carleman_condition(kernel):
    """Square-integrability of h on every (t, inf): alpha>0, or alpha=0 and q>1/2.

    Kernels whose only terms decay exponentially (finite rank, including
    integer q <= 0 with alpha > 0 after normalization) always satisfy it.
    """
    qc = kernel.qc_terms
    if len(qc) == 0:
        return True
    if len(qc) > 1:
        raise ValueError("carleman_condition expects a single quasi-Carleman term")
    term = qc[0]
    return term.alpha > 0 or term.q > 0.5


def carleman():
    """The Carleman kernel 1/t."""
    return Kernel((QuasiCarlemanTerm(1.0, 1.0, 0.0, 0.0),))


def quasi_carleman(v0, q, alpha=0.0, r=0.0):
    return Kernel((QuasiCarlemanTerm(v0, q, alpha, r),))


def finite_rank(coeffs, beta):
    """P(t) e^{-beta t}; complex beta adds the conjugate partner automatically."""
    beta = complex(beta)
    terms = [FiniteRankTerm(tuple(coeffs), beta)]
    if abs(beta.imag) > 0:
        terms.append(FiniteRankTerm(tuple(np.conj(np.asarray(coeffs, dtype=complex))), np.conj(beta)))
    return Kernel(tuple(terms))
