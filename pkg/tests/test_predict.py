"""Closed-form count predictions and the critical coupling."""

import math

import numpy as np
import pytest

from hankelsigma.kernel import (Kernel, QuasiCarlemanTerm, carleman,
                                finite_rank, quasi_carleman)
from hankelsigma.predict import (AssumptionViolation, IntegerExponentError,
                                 NegCount, assumption_hfree, critical_coupling,
                                 finite_rank_inertia_check,
                                 predict_finite_rank, predict_perturbed,
                                 predict_quasi_carleman)
from hankelsigma.sigma import sigma_of_kernel


def test_pure_kernel_counts():
    p = predict_quasi_carleman(0.5)
    assert p.n_minus == NegCount.of(0)
    p = predict_quasi_carleman(-0.5)
    assert p.n_plus == NegCount.of(1) and not p.n_minus.finite
    p = predict_quasi_carleman(-1.5)
    assert p.n_minus == NegCount.of(1) and not p.n_plus.finite
    p = predict_quasi_carleman(-2.5)
    assert p.n_plus == NegCount.of(2) and not p.n_minus.finite


def test_pure_kernel_sign_flip():
    p = predict_quasi_carleman(0.5, v0=-1.0)
    assert p.n_plus == NegCount.of(0) and not p.n_minus.finite


def test_integer_exponent_error():
    with pytest.raises(IntegerExponentError):
        predict_quasi_carleman(-2.0)
    with pytest.raises(IntegerExponentError):
        predict_quasi_carleman(0.0)


def test_critical_coupling_carleman_values():
    sig0 = sigma_of_kernel(carleman())
    assert critical_coupling(sig0, -1.0, 1.0, 1.0) == pytest.approx(1.0)
    assert critical_coupling(sig0, -1.0, 5.0, 0.25) == pytest.approx(1.0)
    assert critical_coupling(sig0, -2.0, 1.0, 1.0) == pytest.approx(math.e)
    assert critical_coupling(sig0, -3.0, 2.0, 2.0) == pytest.approx(2 * math.e ** 2)


def test_critical_coupling_monotone_in_rho():
    sig0 = sigma_of_kernel(carleman())
    vals = [critical_coupling(sig0, -2.0, 1.0, rho) for rho in (0.25, 0.5, 1.0, 2.0, 4.0)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_critical_coupling_grid_route():
    # non-Carleman density: sigma0 = lam on lam > 0 (q = 2)
    sig0 = sigma_of_kernel(quasi_carleman(1.0, 2.0, 0.0, 0.0))
    nu = critical_coupling(sig0, -1.0, 1.0, 0.0)
    # essinf over lam >= 1 of sigma0 = 1
    assert nu == pytest.approx(1.0, rel=1e-6)


def test_critical_coupling_preconditions():
    sig0 = sigma_of_kernel(carleman())
    with pytest.raises(ValueError):
        critical_coupling(sig0, -2.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        critical_coupling(sig0, -0.5, 1.0, 1.0)


def test_perturbed_fractional_table():
    c = carleman()
    assert predict_perturbed(c, QuasiCarlemanTerm(1.0, -1.5, 1.0, 0.0)).n_minus == NegCount.of(1)
    assert predict_perturbed(c, QuasiCarlemanTerm(-1.0, -0.5, 1.0, 0.0)).n_minus == NegCount.of(1)
    assert not predict_perturbed(c, QuasiCarlemanTerm(1.0, -0.5, 1.0, 0.0)).n_minus.finite


def test_perturbed_negative_exponent_branches():
    c = carleman()
    p = predict_perturbed(c, QuasiCarlemanTerm(-0.9, 1.0, 1.0, 1.0))
    assert p.n_minus == NegCount.of(0) and p.critical_coupling == pytest.approx(1.0)
    p = predict_perturbed(c, QuasiCarlemanTerm(-1.1, 1.0, 1.0, 1.0))
    assert not p.n_minus.finite
    p = predict_perturbed(c, QuasiCarlemanTerm(0.3, 0.5, 1.0, 0.0))   # k=-0.5, v0>0
    assert p.n_minus == NegCount.of(0)
    p = predict_perturbed(c, QuasiCarlemanTerm(-0.3, 0.5, 1.0, 0.0))  # k=-0.5, v0<0
    assert not p.n_minus.finite


def test_perturbed_integer_exponent_routes_to_finite_rank():
    c = carleman()
    p = predict_perturbed(c, QuasiCarlemanTerm(-1.0, 0.0, 1.0, 0.0))  # -e^{-t}
    assert p.source == "FDH1" and p.n_minus == NegCount.of(1)
    p = predict_perturbed(c, QuasiCarlemanTerm(1.0, -1.0, 1.0, 0.0))  # t e^{-t}
    assert p.n_minus == NegCount.of(1) and p.rank == 2


def test_perturbed_assumption_violation():
    bad = finite_rank([1.0], 1.0)  # singular sigma
    with pytest.raises(AssumptionViolation):
        predict_perturbed(bad, QuasiCarlemanTerm(1.0, -1.5, 1.0, 0.0))


def test_consistency_fractional_vs_pure():
    # perturbed counts with k > 0 match the pure-kernel table with the
    # perturbation's sign, over a fine exponent sweep
    c = carleman()
    for k10 in range(3, 48, 2):
        k = k10 / 10.0
        if float(k).is_integer():
            continue
        for v0 in (1.0, -1.0):
            a = predict_perturbed(c, QuasiCarlemanTerm(v0, -k, 1.0, 0.0)).n_minus
            b = predict_quasi_carleman(-k, v0=v0).n_minus
            assert a == b, (k, v0)


def test_finite_rank_examples():
    assert predict_finite_rank(finite_rank([-1.0], 1.0)).n_minus == NegCount.of(1)
    assert predict_finite_rank(finite_rank([0, 1.0], 1.0)).n_minus == NegCount.of(1)
    p = predict_finite_rank(finite_rank([1.0], 1 - 1j))
    assert p.n_minus == NegCount.of(1) and p.rank == 2


def test_finite_rank_remark_case():
    v = finite_rank([-1.0], 1.0)
    h = finite_rank([2.0], 1.0) + v
    assert predict_finite_rank(v).n_minus == NegCount.of(1)
    assert predict_finite_rank(h).n_minus == NegCount.of(0)


def test_finite_rank_inertia_sums_to_rank():
    rng = np.random.default_rng(3)
    for _ in range(50):
        k = Kernel(())
        for _ in range(int(rng.integers(1, 3))):
            deg = int(rng.integers(0, 4))
            cf = np.round(rng.uniform(-3, 3, deg + 1), 2)
            if abs(cf[-1]) < 0.2:
                cf[-1] = 1.0
            k = k + finite_rank(tuple(cf), float(rng.uniform(0.4, 2.5)))
        if rng.random() < 0.5:
            deg = int(rng.integers(0, 3))
            cf = np.round(rng.uniform(-2, 2, deg + 1), 2) + 1j * np.round(rng.uniform(-2, 2, deg + 1), 2)
            if abs(cf[-1]) < 0.2:
                cf[-1] = 1.0 + 0.5j
            k = k + finite_rank(tuple(cf), complex(rng.uniform(0.5, 2), rng.uniform(0.3, 2)))
        pred = predict_finite_rank(k)
        npos, nneg = finite_rank_inertia_check(k)
        assert nneg == pred.n_minus.n
        assert npos + nneg == pred.rank


def test_assumption_hfree():
    assert assumption_hfree(sigma_of_kernel(carleman())) is True
    assert assumption_hfree(sigma_of_kernel(quasi_carleman(1, 0.5, 0, 0))) is True
    assert assumption_hfree(sigma_of_kernel(finite_rank([1.0], 1.0))) is False
    # blowup at an interior point: alpha > 0 with q < 1
    assert assumption_hfree(sigma_of_kernel(quasi_carleman(1, 0.5, 1, 0))) is False
    assert assumption_hfree(sigma_of_kernel(quasi_carleman(1, 1.0, 1, 0))) is True
