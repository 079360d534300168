"""Direct and sigma-side quadratic forms, the central identity, witnesses."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from hankelsigma.form import (ExpPoly, FormDomainError, Indicator,
                              dilate, dilation_check, form_direct, form_sigma,
                              identity_residual, laguerre_test,
                              laplace_convolution, min_monomial_order,
                              spectral_witnesses)
from hankelsigma.kernel import carleman, finite_rank, quasi_carleman


def test_convolution_of_exponentials():
    f = ExpPoly(((1.0, 0, 1.0),))
    conv = laplace_convolution(f, f)
    assert conv.terms == ((1.0, 1, 1.0),)  # t e^{-t}


def test_convolution_of_ground_laguerre():
    e0 = laguerre_test([1.0])
    conv = laplace_convolution(e0, e0)
    assert conv.terms == ((1.0, 1, 0.5),)  # t e^{-t/2}
    # symbolic-integral oracle at a few points
    for t in (0.5, 1.0, 3.0):
        val, _ = quad(lambda s: math.exp(-s / 2) * math.exp(-(t - s) / 2), 0, t)
        assert conv(t) == pytest.approx(val, rel=1e-12)


def test_convolution_mixed_rates_matches_quadrature():
    f1 = ExpPoly(((1.0, 1, 0.6), (0.3, 0, 1.7)))
    f2 = ExpPoly(((-0.4, 2, 1.1),))
    conv = laplace_convolution(f1, f2)
    for t in (0.4, 1.3, 4.0):
        val, _ = quad(lambda s: np.real(f1(s)) * np.real(f2(t - s)), 0, t, limit=200)
        assert np.real(conv(t)) == pytest.approx(val, rel=1e-9, abs=1e-13)


def test_convolution_of_indicators():
    conv = laplace_convolution(Indicator(0, 1), Indicator(0, 1))
    ts = np.array([0.5, 1.0, 1.5, 2.5])
    assert np.allclose(conv(ts), [0.5, 1.0, 0.5, 0.0])


def test_form_direct_examples():
    assert form_direct(carleman(), ExpPoly(((1.0, 0, 1.0),))) == pytest.approx(1.0)
    kern = quasi_carleman(1, 2, 1, 0)
    f = ExpPoly(((1.0, 1, 1.0),))
    d = form_direct(kern, f)
    s = form_sigma(kern, f)
    assert d > 0 and abs(d - s) < 1e-6 * (1 + abs(d))
    # rank one: |w(1)|^2 with w = 1/(lam+1)
    assert form_direct(finite_rank([1.0], 1.0), ExpPoly(((1.0, 0, 1.0),))) == pytest.approx(0.25)


def test_form_sigma_examples():
    assert form_sigma(carleman(), laguerre_test([1.0])) == pytest.approx(2.0, abs=1e-9)
    kern = quasi_carleman(1, -0.5, 1, 0)
    f = laguerre_test([1.0])
    assert abs(form_sigma(kern, f) - form_direct(kern, f)) < 1e-6
    assert form_sigma(carleman(), ExpPoly(((0.0, 0, 1.0),))) == 0.0


def test_form_sigma_accepts_laplace_image_tests():
    # sigma-side-only test functions carry just their image w(lam)
    from hankelsigma.form import LaplaceImage
    wrapped = LaplaceImage(laguerre_test([1.0]).laplace_image())
    assert form_sigma(carleman(), wrapped) == pytest.approx(2.0, abs=1e-9)


def test_min_monomial_order_rule():
    # smallest m with 2m + 1 - q > -1
    assert min_monomial_order(0.5) == 0
    assert min_monomial_order(1.0) == 0
    assert min_monomial_order(2.0) == 1  # 2m+1-2 > -1 fails at m=0 (log divergence)
    assert min_monomial_order(3.0) == 1
    assert min_monomial_order(4.0) == 2


def test_form_direct_divergence_diagnostic():
    with pytest.raises(FormDomainError):
        form_direct(quasi_carleman(1, 2, 0, 0), ExpPoly(((1.0, 0, 1.0),)))
    with pytest.raises(FormDomainError):
        form_direct(quasi_carleman(1, 3, 1, 0), ExpPoly(((1.0, 0, 1.0),)))


def test_identity_residual_spot_grid():
    rng = np.random.default_rng(4)
    for q, a, r in ((1.0, 0.0, 0.0), (3.0, 1.0, 1.0), (-1.5, 1.0, 0.0), (0.5, 0.0, 1.0)):
        kern = quasi_carleman(1.0, q, a, r)
        mmin = min_monomial_order(q) if r == 0 else 0
        for _ in range(5):
            f = ExpPoly(((rng.normal(), int(mmin + rng.integers(0, 3)),
                          float(rng.choice([0.5, 1.0, 1.5, 2.0]))),
                         (rng.normal(), int(mmin + rng.integers(0, 3)),
                          float(rng.choice([0.5, 1.0, 1.5, 2.0])))))
            assert identity_residual(kern, f) <= 1e-6


def test_positivity_for_positive_exponent():
    rng = np.random.default_rng(9)
    for q in (0.5, 1.0, 2.0, 3.0):
        for a in (0.0, 1.0):
            kern = quasi_carleman(1.0, q, a, 0.0)
            mmin = min_monomial_order(q)
            for _ in range(20):
                f = ExpPoly(((rng.normal(), int(mmin + rng.integers(0, 3)),
                              float(rng.choice([0.5, 1.0, 2.0]))),))
                assert form_sigma(kern, f) >= -1e-10


def test_polarized_form_sesquilinear_and_hermitian():
    kern = finite_rank([0.5, 1.0], 1.2) + carleman()
    f1 = laguerre_test([1.0, 0.3])
    f2 = laguerre_test([0.0, 1.0])
    f3 = laguerre_test([0.2, -0.5, 1.0])
    a = form_sigma(kern, f1, f2)
    b = form_sigma(kern, f2, f1)
    assert abs(a - np.conj(b)) < 1e-12 * max(1, abs(a))
    # linear in the second slot: exact on the jet-evaluated delta part,
    # quadrature-limited on the density part
    combo = ExpPoly(f2.terms + f3.terms)
    kd = finite_rank([0.5, 1.0], 1.2)
    lhs_d = form_sigma(kd, f1, combo)
    rhs_d = form_sigma(kd, f1, f2) + form_sigma(kd, f1, f3)
    assert abs(lhs_d - rhs_d) < 1e-12 * max(1, abs(lhs_d))
    lhs = form_sigma(kern, f1, combo)
    rhs = form_sigma(kern, f1, f2) + form_sigma(kern, f1, f3)
    assert abs(lhs - rhs) < 1e-9 * max(1, abs(lhs))


def test_dilation_unitary():
    f = ExpPoly(((1.0, 1, 1.0),))
    g = dilate(f, 2.0)
    assert f.norm_sq() == pytest.approx(g.norm_sq(), rel=1e-13)


def test_dilation_covariance_grid():
    for q in (0.5, 2.0, 3.0):
        f = ExpPoly(((1.0, min_monomial_order(q) + 1, 1.0),))
        for gam in (0.5, 2.0, 5.0):
            assert dilation_check(q, f, gam) <= 1e-8
    # q = 1 is exactly invariant; gamma = 1 is exactly zero
    f = ExpPoly(((1.0, 0, 1.0),))
    assert dilation_check(1.0, f, 3.0) <= 1e-8
    assert dilation_check(2.0, ExpPoly(((1.0, 1, 1.0),)), 1.0) == 0.0


def test_zero_in_spectrum_witness():
    qs = spectral_witnesses(carleman(), "zero_in_spectrum", {"count": 8})
    assert all(a > b > 0 for a, b in zip(qs, qs[1:]))


def test_unbounded_witness_growth():
    qs = spectral_witnesses(quasi_carleman(1, 2, 0, 0), "unbounded",
                            {"l_values": (10.0, 100.0, 1000.0)})
    assert qs[-1] >= 10 * qs[0]


def test_carleman_witness_bounded_by_pi():
    qs = spectral_witnesses(carleman(), "unbounded",
                            {"l_values": (10.0, 100.0, 1000.0)})
    assert all(v < math.pi for v in qs)
