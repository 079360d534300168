"""A tour of sigma distributions and the factorization identity.

Every Hankel kernel h(t) here pairs with test functions through a
distribution sigma(lam) whose two-sided Laplace transform is h.  The
quadratic form of the operator then splits as a weighted L2 pairing of
Laplace images -- and the two sides of that identity are computed by
completely different code paths, so watching them agree to ten digits is
the best smoke test this package has.

Run:  python demos/01_sigma_functions.py
"""

import numpy as np

from hankelsigma import (ExpPoly, carleman, classify, form_direct, form_sigma,
                         identity_residual, quasi_carleman, sigma_of_kernel)
from hankelsigma.form import min_monomial_order

print("=" * 72)
print("The Carleman kernel 1/t has the constant density sigma = 1 on lam >= 0")
sig = sigma_of_kernel(carleman())
lam = np.array([0.5, 1.0, 10.0])
print("   sigma(lam) =", sig.density(lam))

f = ExpPoly(((1.0, 0, 1.0),))  # e^{-t}
print("   direct form <1/t, conj(f) * f> for f = e^-t:", form_direct(carleman(), f))
print("   sigma form on the Laplace image:            ", form_sigma(carleman(), f))

print()
print("=" * 72)
print("A family sweep: h(t) = (t+r)^{-q} e^{-alpha t}")
for q, a, r in ((0.5, 0.0, 0.0), (2.0, 1.0, 0.0), (3.0, 1.0, 1.0), (-1.5, 1.0, 0.0)):
    kern = quasi_carleman(1.0, q, a, r)
    mmin = min_monomial_order(q) if r == 0 else 0
    f = ExpPoly(((1.0, mmin + 1, 1.0), (-0.4, mmin, 0.5)))
    res = identity_residual(kern, f)
    print("   q=%5.1f alpha=%g r=%g  [%s]  identity residual %.2e"
          % (q, a, r, classify(kern).value, res))

print()
print("=" * 72)
print("Negative fractional exponents are finite-part distributions: the")
print("pairing subtracts a Taylor polynomial at the support edge, and the")
print("subtraction is what manufactures the finitely many opposite-sign")
print("directions of these operators.")
kern = quasi_carleman(1.0, -0.5, 1.0, 0.0)
f = ExpPoly(((1.0, 0, 0.5),))
print("   q=-0.5: form on e^{-t/2} =", form_sigma(kern, f),
      "(direct:", form_direct(kern, f), ")")
