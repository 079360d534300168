"""Laplace/Mellin pipeline, reconstruction, mollifiers, sandwiched operators."""

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from hankelsigma.form import ExpPoly, Indicator, form_sigma
from hankelsigma.kernel import quasi_carleman
from hankelsigma.special import gamma, laguerre_e, laguerre_image, log_gamma
from hankelsigma.transform import (DEFAULT_GRID, MOLLIFIER_GRID,
                                   AmplificationError, GridFunction,
                                   GrowthWarning, InsufficientDecayError,
                                   LogGrid, dual_grid, fourier, inv_fourier,
                                   laplace_point, laplace_via_mellin,
                                   mollifier_matrix, mollifier_norm,
                                   mollifier_tn, reconstruct,
                                   sandwiched_apply, u_of_laplace_image,
                                   xi_grid_of)


def _mellin_residual(fvals, wtrue, grid=DEFAULT_GRID):
    w = laplace_via_mellin(GridFunction(grid, fvals))
    dif = (w.values - wtrue) * np.exp(grid.xs / 2)
    num = np.sqrt(grid.dx * np.sum(np.abs(dif) ** 2))
    den = np.sqrt(grid.dx * np.sum(np.abs(np.exp(grid.xs / 2) * fvals) ** 2))
    return num / max(den, 1e-300)


def test_laplace_point_examples():
    assert laplace_point(ExpPoly(((1.0, 0, 1.0),)), 1.0) == pytest.approx(0.5)
    ind = Indicator(1.0, 2.0)
    assert laplace_point(ind, 1.0) == pytest.approx(math.exp(-1) - math.exp(-2))
    for n in (0, 2, 6):
        img = laguerre_image(n)
        from hankelsigma.form import laguerre_test
        f = laguerre_test([0.0] * n + [1.0])
        for lam in (0.3, 1.0, 4.0):
            oracle, _ = quad(lambda t: math.exp(-lam * t) * laguerre_e(n, t), 0, 80,
                             limit=300)
            assert abs(laplace_point(f, lam) - oracle) < 1e-9
            assert abs(img(lam) - oracle) < 1e-9


def test_laplace_point_grid_function():
    grid = DEFAULT_GRID
    f = GridFunction(grid, np.exp(-grid.lambdas_pos))
    assert abs(laplace_point(f, 1.0) - 0.5) < 1e-8


def test_laplace_point_divergence_error():
    from hankelsigma._quad import DivergentIntegralError
    from hankelsigma.special import FExp, FPoly
    grower = FExp(FPoly([0.0, 2.0]))  # e^{2t}: integral diverges for lam <= 2
    with pytest.raises(DivergentIntegralError):
        laplace_point(grower, 1.0)
    # and converges with enough damping
    assert abs(laplace_point(grower, 3.0) - 1.0) < 1e-9


def test_mellin_factorization_simple_targets():
    t = DEFAULT_GRID.lambdas_pos
    assert _mellin_residual(np.exp(-t), 1 / (1 + t)) < 1e-6
    assert _mellin_residual(t * np.exp(-t), (1 + t) ** -2.0) < 1e-6
    assert _mellin_residual(laguerre_e(3, t), laguerre_image(3)(t)) < 1e-6


def test_mellin_factorization_benchmark_family():
    # 20 functions in span{t^m e^{-ct}}, m <= 5, c in [0.5, 2]
    rng = np.random.default_rng(77)
    t = DEFAULT_GRID.lambdas_pos
    worst = 0.0
    for _ in range(20):
        m1, m2 = rng.integers(0, 6, 2)
        c1, c2 = rng.uniform(0.5, 2.0, 2)
        a1, a2 = rng.normal(size=2)
        fvals = a1 * t ** m1 * np.exp(-c1 * t) + a2 * t ** m2 * np.exp(-c2 * t)
        wtrue = (a1 * math.factorial(m1) / (t + c1) ** (m1 + 1)
                 + a2 * math.factorial(m2) / (t + c2) ** (m2 + 1))
        worst = max(worst, _mellin_residual(fvals, wtrue))
    assert worst < 1e-6


def test_insufficient_decay_error():
    grid = DEFAULT_GRID
    f = GridFunction(grid, grid.lambdas_pos ** -0.5)  # u(x) = const
    with pytest.raises(InsufficientDecayError):
        laplace_via_mellin(f)


def test_parseval_on_grid():
    grid = DEFAULT_GRID
    u = GridFunction(grid, np.exp(-(grid.xs - 1) ** 2) * np.sin(grid.xs))
    phi = fourier(u)
    dxi = xi_grid_of(grid)[1] - xi_grid_of(grid)[0]
    n_phi = math.sqrt(dxi * float(np.sum(np.abs(phi) ** 2)))
    assert abs(n_phi - u.norm()) < 1e-10 * u.norm()
    back = inv_fourier(phi, grid)
    assert np.max(np.abs(back.values - u.values)) < 1e-12


def test_reconstruct_roundtrip_exppoly():
    grid = DEFAULT_GRID
    t = grid.lambdas_pos
    for f, fvals in (
        (ExpPoly(((1.0, 0, 1.0),)), np.exp(-t)),
        (ExpPoly(((1.0, 1, 1.0),)), t * np.exp(-t)),
        (ExpPoly(((0.7, 0, 0.5), (-0.2, 2, 1.5))), 0.7 * np.exp(-0.5 * t) - 0.2 * t ** 2 * np.exp(-1.5 * t)),
    ):
        u = u_of_laplace_image(f, grid)
        fr = reconstruct(u)
        wgt = np.exp(grid.xs / 2)
        err = np.sqrt(grid.dx * np.sum(np.abs((fr.values - fvals) * wgt) ** 2))
        den = np.sqrt(grid.dx * np.sum(np.abs(fvals * wgt) ** 2))
        assert err / den < 1e-5


def test_reconstruct_gaussian_trials_are_square_integrable():
    grid = DEFAULT_GRID
    x = grid.xs
    for eps, a in ((0.5, 0.3), (0.6, -0.8), (0.45, 0.0)):
        u = GridFunction(grid, eps ** -0.5 * np.exp(-(x - a) ** 2 / eps ** 2))
        f = reconstruct(u)
        norm = np.sqrt(grid.dx * np.sum(np.abs(f.values * np.exp(x / 2)) ** 2))
        assert np.isfinite(norm) and norm > 0


def test_reconstruct_zero():
    out = reconstruct(GridFunction(DEFAULT_GRID, np.zeros(DEFAULT_GRID.count)))
    assert np.max(np.abs(out.values)) == 0.0


def test_reconstruct_amplification_error():
    grid = DEFAULT_GRID
    # lorentzian: spectrum ~ e^{-0.5 |xi|}, slower than the gamma weight decay
    u = GridFunction(grid, 1.0 / (1.0 + (grid.xs / 0.5) ** 2))
    with pytest.raises(AmplificationError):
        reconstruct(u)


# ---------------------------------------------------------------------------
# mollifiers
# ---------------------------------------------------------------------------

def _q_bound_oracle():
    # sup_xi of the gaussian-smoothed weight ratio at n = 1: numerically
    # integrate chihat_1 against the inverse-squared weight
    xi = np.linspace(-12, 12, 49)
    vals = []
    v2 = lambda s: np.pi / np.cosh(np.pi * s)
    for x in xi:
        val, _ = quad(lambda e: (1 / (2 * math.sqrt(math.pi))) * math.exp(-(x - e) ** 2 / 4.0) / v2(e), -60, 60, limit=400)
        vals.append(v2(x) * val)
    return math.sqrt(max(vals))


def test_mollifier_uniform_norm_bound():
    q_cap = _q_bound_oracle()
    assert q_cap == pytest.approx(math.exp(math.pi ** 2 / 2), rel=1e-6)
    norms = [mollifier_norm(n) for n in range(1, 33)]
    assert all(nm <= q_cap * (1 + 1e-9) for nm in norms)
    # per-n bound from the same oracle shape
    for n in (1, 2, 4, 8, 16, 32):
        assert norms[n - 1] <= math.exp(math.pi ** 2 / (2 * n * n)) * (1 + 1e-9)


def test_mollifier_random_vectors_under_bound():
    q_cap = math.exp(math.pi ** 2 / 2)
    rng = np.random.default_rng(123)
    grid = MOLLIFIER_GRID
    for n in (1, 2, 8, 32):
        k = mollifier_matrix(n, grid)
        g = rng.normal(size=(grid.count, 200)) * np.exp(-np.abs(grid.xs[:, None]) / 3)
        ratios = np.linalg.norm(k @ g, axis=0) / np.linalg.norm(g, axis=0)
        assert np.max(ratios) <= q_cap


def test_mollifier_strong_convergence():
    grid = MOLLIFIER_GRID
    g = GridFunction(grid, np.exp(-(grid.xs - 1.0) ** 2 / 4))
    rels = {}
    for n in (8, 16, 32):
        tg = mollifier_tn(n, g)
        rels[n] = np.linalg.norm(tg.values - g.values) / np.linalg.norm(g.values)
    assert rels[32] <= 0.01
    assert rels[16] <= rels[8] + 1e-8
    assert rels[32] <= rels[16] + 1e-8


def test_mollifier_monotone_improvement_gaussian_set():
    grid = MOLLIFIER_GRID
    for center, width in ((0.0, 1.0), (2.0, 0.5), (-3.0, 2.0)):
        g = GridFunction(grid, np.exp(-(grid.xs - center) ** 2 / width ** 2))
        prev = None
        for n in (2, 4, 8, 16, 32):
            tg = mollifier_tn(n, g)
            rel = np.linalg.norm(tg.values - g.values) / np.linalg.norm(g.values)
            if prev is not None:
                assert rel <= prev + 1e-8
            prev = rel


def test_mollifier_zero():
    g = GridFunction(MOLLIFIER_GRID, np.zeros(MOLLIFIER_GRID.count))
    assert np.max(np.abs(mollifier_tn(4, g).values)) == 0.0


def test_indicator_image_identity_exact():
    lam = np.linspace(0.01, 20, 200)
    ind = Indicator(0.7, 2.3)
    img = ind.laplace_image()
    lhs = np.asarray(img(lam)) * lam
    rhs = np.exp(-0.7 * lam) - np.exp(-2.3 * lam)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


# ---------------------------------------------------------------------------
# sandwiched Fourier operators
# ---------------------------------------------------------------------------

def test_sandwiched_identity_weights_is_plain_inverse_fourier():
    grid = MOLLIFIER_GRID
    f = GridFunction(grid, np.exp(-grid.xs ** 2 / 2))
    out = sandwiched_apply(lambda x: np.ones_like(x), lambda s: np.ones_like(s), f)
    x = out.grid.xs
    assert np.max(np.abs(out.values - np.exp(-x ** 2 / 2))) < 1e-13


def test_sandwiched_against_quadrature_oracle():
    grid = MOLLIFIER_GRID
    f = GridFunction(grid, np.exp(-grid.xs ** 2 / 2))
    out = sandwiched_apply(lambda x: 1 + x ** 2, lambda s: np.exp(-s ** 2), f)
    x = out.grid.xs
    for idx in (300, 512, 700):
        oracle = (1 + x[idx] ** 2) * (2 * np.pi) ** -0.5 * quad(
            lambda s: math.cos(x[idx] * s) * math.exp(-1.5 * s ** 2), -np.inf, np.inf)[0]
        assert abs(out.values[idx].real - oracle) < 1e-6
        assert abs(out.values[idx].imag) < 1e-12


def test_sandwiched_gamma_weight_reproduces_sigma_form():
    # s(x) = sigma(e^{-x}), v = Gamma(1/2 + i xi): the sandwiched operator
    # applied to the Mellin data of f gives s * u, and pairing with u must
    # reproduce the sigma-side quadratic form
    kern = quasi_carleman(1.0, 2.0, 1.0, 1.0)
    f = ExpPoly(((1.0, 1, 1.0),))
    grid = DEFAULT_GRID
    t = grid.lambdas_pos
    fvals = t * np.exp(-t)
    mf = fourier(GridFunction(grid, np.exp(grid.xs / 2) * fvals))
    u = u_of_laplace_image(f, grid)

    def s_of_x(x):
        lam = np.exp(-x)
        return np.where(lam > 1.0, (lam - 1.0) * np.exp(-(lam - 1.0)), 0.0)

    out = sandwiched_apply(s_of_x, lambda xi: gamma(0.5 + 1j * xi),
                           GridFunction(dual_grid(grid), mf))
    lhs = grid.dx * np.sum(out.values * np.conj(u.values))
    rhs = form_sigma(kern, f)
    assert abs(lhs.real - rhs) <= 1e-5 * (1 + abs(rhs))
    assert abs(lhs.imag) < 1e-8


def test_sandwiched_appendix_mollifier_variant_converges():
    # conjugate-gamma sandwich: same gaussian smoothing, mirrored weight
    grid = MOLLIFIER_GRID
    xi = grid.xs
    lg = log_gamma(0.5 + 1j * xi)
    g = np.exp(-(xi - 1.0) ** 2 / 4)
    prev = None
    for n in (4, 8, 16, 32):
        expo = lg[:, None] - lg[None, :] - (n ** 2 / 4.0) * (xi[:, None] - xi[None, :]) ** 2
        k = n / (2 * math.sqrt(math.pi)) * np.exp(expo) * grid.dx
        rel = np.linalg.norm(k @ g - g) / np.linalg.norm(g)
        if prev is not None:
            assert rel <= prev + 1e-8
        prev = rel
    assert prev <= 0.01


def test_sandwiched_growth_warning():
    grid = MOLLIFIER_GRID
    f = GridFunction(grid, np.exp(-grid.xs ** 2 / 2))
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        sandwiched_apply(lambda x: np.exp(np.abs(x)), lambda s: np.ones_like(s), f)
    assert any(issubclass(w.category, GrowthWarning) for w in rec)


def test_grid_validation():
    with pytest.raises(ValueError):
        LogGrid(0.0, 1.0, 100)  # not a power of two
    g = LogGrid(-2.0, 2.0, 16)
    assert len(g.xs) == 16 and g.dx == 0.25
    assert np.allclose(g.lambdas_neg, np.exp(-g.xs))
