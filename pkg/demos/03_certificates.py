"""Variational certificates: explicit subspaces where the form is negative.

Finite sections count eigenvalues, and eigenvalues can be absurdly small:
the negative directions of the infinite branches have trial functions
whose norms explode, so their Rayleigh quotients sit below anything
float64 can see.  A certificate sidesteps norms entirely: it builds trial
functions, evaluates the exact form matrix on their span, and reports its
negative inertia -- a rigorous lower bound on the number of negative
directions by the variational definition.

Run:  python demos/03_certificates.py
"""

import numpy as np

from hankelsigma import carleman, certificate, finite_rank, quasi_carleman
from hankelsigma.kernel import Kernel

print("=" * 72)
print("Gaussian family: log-normal bumps squeezed against the singular point")
cert = certificate(carleman(), quasi_carleman(-1.0, -1.5, 1.0, 0.0), target=4)
print("   Carleman + (-1) t^{3/2} e^{-t}: achieved %d negative directions"
      % cert.achieved)
print("   centers:", np.round(cert.params["centers"], 4), " eps:", cert.eps)
print("   form-matrix eigenvalues:", np.round(np.linalg.eigvalsh(
    0.5 * (cert.gram + cert.gram.conj().T)).real, 2))

print()
print("=" * 72)
print("Shallow thin well just past the critical coupling")
cert = certificate(carleman(), quasi_carleman(-1.1, 1.0, 1.0, 1.0), target=3)
print("   achieved %d (eps %.4g, delta %.4g)"
      % (cert.achieved, cert.eps, cert.params["delta"]))

print()
print("=" * 72)
print("Polynomial window: the finite branch of a fractional perturbation")
cert = certificate(carleman(), quasi_carleman(1.0, -1.5, 1.0, 0.0), target=1)
print("   kind=%s achieved=%d (matches the predicted count exactly)"
      % (cert.kind, cert.achieved))

print()
print("=" * 72)
print("Interpolation trials driven by sign-matrix eigenvectors")
v = finite_rank([0, 0, 1.0], 1.0)
cert = certificate(Kernel(()), v, target=1)
print("   V = t^2 e^{-t} alone: achieved", cert.achieved)
v2 = finite_rank([0, 1.0, 0.5], 0.8) + finite_rank([1.0, 0.5j], 1 + 1j)
cert = certificate(carleman(), v2, target=3)
print("   mixed real + conjugate-pair kernel over Carleman: achieved", cert.achieved)
