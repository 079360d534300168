"""The Laplace transform as a Fourier multiplier, and its inverse.

On the logarithmic grid the Laplace transform factorizes into a Mellin
transform, a Gamma(1/2 + i xi) multiplier, and a frequency reflection.
That factorization powers three things shown here: a spectral-accuracy
Laplace transform, reconstruction of a time-side function from its
exponential-variable test function, and the gaussian mollifier sandwich
operators whose uniform boundedness licenses the whole calculus.

Run:  python demos/04_mellin_pipeline.py
"""

import numpy as np

from hankelsigma.form import ExpPoly
from hankelsigma.special import laguerre_e, laguerre_image
from hankelsigma.transform import (DEFAULT_GRID, MOLLIFIER_GRID, GridFunction,
                                   laplace_via_mellin, mollifier_norm,
                                   mollifier_tn, reconstruct,
                                   u_of_laplace_image)

grid = DEFAULT_GRID
t = grid.lambdas_pos

print("=" * 72)
print("Laplace images via FFT vs closed forms (weighted L2 residuals)")
for n in (0, 3, 5):
    f = GridFunction(grid, laguerre_e(n, t))
    w = laplace_via_mellin(f)
    dif = (w.values - laguerre_image(n)(t)) * np.exp(grid.xs / 2)
    print("   Laguerre e_%d: %.2e" % (n, np.sqrt(grid.dx * np.sum(np.abs(dif) ** 2))))

print()
print("=" * 72)
print("Round trip t-side -> exponential variable -> t-side")
f = ExpPoly(((1.0, 0, 1.0),))
u = u_of_laplace_image(f, grid)
fr = reconstruct(u)
wgt = np.exp(grid.xs / 2)
err = np.sqrt(grid.dx * np.sum(np.abs((fr.values - np.exp(-t)) * wgt) ** 2))
den = np.sqrt(grid.dx * np.sum(np.abs(np.exp(-t) * wgt) ** 2))
print("   e^{-t}: relative error %.2e" % (err / den))

print()
print("=" * 72)
print("Gaussian test functions map to genuine square-integrable trials,")
print("with norms that blow up as the width shrinks")
for eps in (0.6, 0.5, 0.45):
    ug = GridFunction(grid, eps ** -0.5 * np.exp(-(grid.xs - 0.3) ** 2 / eps ** 2))
    fg = reconstruct(ug)
    nrm = np.sqrt(grid.dx * np.sum(np.abs(fg.values * wgt) ** 2))
    print("   eps=%.2f  |f| = %.3e" % (eps, nrm))

print()
print("=" * 72)
print("Mollifier sandwich operators: uniformly bounded, strongly convergent")
g = GridFunction(MOLLIFIER_GRID, np.exp(-(MOLLIFIER_GRID.xs - 1.0) ** 2 / 4))
for n in (1, 4, 16, 32):
    tg = mollifier_tn(n, g)
    rel = np.linalg.norm(tg.values - g.values) / np.linalg.norm(g.values)
    print("   n=%2d  |T_n g - g|/|g| = %.3e   norm estimate %.3f"
          % (n, rel, mollifier_norm(n)))
