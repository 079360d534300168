"""Finite sections, stabilized counts, spectrum study, certificates."""

import math
import warnings

import numpy as np
import pytest

from hankelsigma.form import FormDomainError
from hankelsigma.galerkin import (assemble, carleman_spectrum_study,
                                  certificate, section_inertia,
                                  stabilized_negcount)
from hankelsigma.kernel import Kernel, carleman, finite_rank, quasi_carleman
from hankelsigma.predict import predict_finite_rank
from hankelsigma.sigma import sigma_of_kernel, sigma_pair
from hankelsigma.special import laguerre_image


def _closed_form_carleman(n):
    j = np.arange(n)
    s = j[:, None] + j[None, :]
    return (1 + (-1.0) ** s) / (s + 1)


def test_carleman_section_closed_form():
    sec = assemble(carleman(), 32)
    assert np.max(np.abs(sec.matrix - _closed_form_carleman(32))) < 1e-10
    assert np.allclose(sec.matrix[:2, :2], [[2.0, 0.0], [0.0, 2.0 / 3.0]], atol=1e-10)
    assert sec.route == "sigma-pairing"


def test_entries_match_scalar_pairings():
    kern = carleman() + quasi_carleman(0.5, -1.5, 1.0, 0.0)
    sec = assemble(kern, 12)
    sig = sigma_of_kernel(kern)
    for j, k in ((0, 0), (3, 5), (11, 2)):
        val = sigma_pair(sig, laguerre_image(j), laguerre_image(k))
        assert abs(sec.matrix[j, k] - val.real) < 1e-9


def test_section_symmetric():
    sec = assemble(finite_rank([1.0, -0.4], 0.9) + carleman(), 24)
    assert np.max(np.abs(sec.matrix - sec.matrix.T)) < 1e-12


def test_section_inertia_basics():
    sec = assemble(carleman(), 64)
    npos, nneg = section_inertia(sec)
    assert nneg == 0
    neg = assemble(quasi_carleman(-1.0, 1.0, 0.0, 0.0), 8)
    assert section_inertia(neg) == (0, 8)
    rank1 = assemble(finite_rank([1.0], 1.0), 6)
    assert section_inertia(rank1) == (1, 0)


def test_small_fractional_section_inertia():
    # one positive direction from the finite part, three visible negatives
    sec = assemble(quasi_carleman(1.0, -0.5, 1.0, 0.0), 4)
    assert section_inertia(sec) == (1, 3)


def test_stabilized_finite_branch():
    h = carleman() + quasi_carleman(1.0, -1.5, 1.0, 0.0)
    est = stabilized_negcount(h, (16, 32, 64, 128))
    assert est.kind == "finite" and est.value == 1


def test_stabilized_infinite_branch():
    est = stabilized_negcount(quasi_carleman(1.0, -0.5, 1.0, 0.0), (8, 16, 32, 64, 128))
    assert est.kind == "infinite-suspected"
    assert all(h[2] == 1 for h in est.history)  # one positive direction, pinned


def test_stabilized_undecided_is_reported():
    h = carleman() + quasi_carleman(-1.0, -1.5, 1.0, 0.0)
    est = stabilized_negcount(h, (8, 16, 32))
    assert est.kind == "undecided"


def test_stabilized_zero_kernel():
    est = stabilized_negcount(Kernel(()), (8, 16, 32))
    assert est.kind == "finite" and est.value == 0


def test_nested_counts_monotone():
    kern = quasi_carleman(1.0, -0.5, 1.0, 0.0)
    top = assemble(kern, 128)
    prev_neg, prev_max = -1, -np.inf
    for n in (8, 16, 32, 64, 128):
        sub = top.leading(n)
        _, nneg = section_inertia(sub)
        mx = float(np.linalg.eigvalsh(sub.matrix)[-1])
        assert nneg >= prev_neg and mx >= prev_max - 1e-12
        prev_neg, prev_max = nneg, mx


def test_carleman_spectrum_study():
    mn, mx = carleman_spectrum_study(1)
    assert mx == pytest.approx(2.0, abs=1e-10)
    prev = 0.0
    for n in (64, 128, 256):
        mn, mx = carleman_spectrum_study(n)
        assert mn > -1e-12
        assert prev < mx < math.pi
        prev = mx
    # eigenvalue oracle pins the floor at N = 64
    assert carleman_spectrum_study(64)[1] > 2.65


def test_homogeneous_non_carleman_sections_grow():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        tops = [carleman_spectrum_study(n, q=0.5)[1] for n in (16, 64, 256)]
    assert tops[0] < tops[1] < tops[2]
    assert tops[2] > 10  # no visible bound, unlike the q = 1 case


def test_assemble_unbounded_warns():
    with pytest.warns(UserWarning):
        assemble(quasi_carleman(1.0, 0.5, 0.0, 0.0), 8)


def test_assemble_form_domain_error():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(FormDomainError):
            assemble(quasi_carleman(1.0, 3.0, 1.0, 0.0), 8)
        with pytest.raises(FormDomainError):
            assemble(quasi_carleman(1.0, 2.0, 0.0, 0.0), 8)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def test_gaussian_certificate_infinite_branch():
    cert = certificate(carleman(), quasi_carleman(-1.0, -1.5, 1.0, 0.0), 4)
    assert cert.kind == "gaussian-family" and cert.success
    # diagonal matches the small-eps limit of the singular pairing
    from math import gamma as rgamma, sqrt, pi
    for a_j, g_jj in zip(cert.params["centers"], np.diag(cert.gram).real):
        limit = -1.0 / rgamma(-1.5) * sqrt(pi / 2) * (a_j - 1.0) ** -2.5
        assert g_jj < 0 and abs(g_jj - limit) < 0.25 * abs(limit) + 2.0


def test_gaussian_certificate_shallow_well():
    cert = certificate(carleman(), quasi_carleman(-1.1, 1.0, 1.0, 1.0), 3)
    assert cert.success and cert.achieved >= 3


def test_window_certificate_finite_branch():
    cert = certificate(carleman(), quasi_carleman(1.0, -1.5, 1.0, 0.0), 1)
    assert cert.kind == "polynomial-window" and cert.success


def test_window_certificate_with_shift():
    # rho > 0 exercises the series polynomial R
    cert = certificate(carleman(), quasi_carleman(1.0, -1.5, 1.0, 0.5), 1,
                       kind="window")
    assert cert.success


def test_window_certificate_cannot_exceed_dimension():
    cert = certificate(carleman(), quasi_carleman(1.0, -1.5, 1.0, 0.0), 2,
                       kind="window")
    assert not cert.success and cert.achieved <= 1


def test_interpolation_certificate_single_term():
    cert = certificate(Kernel(()), finite_rank([0, 0, 1.0], 1.0), 1)
    assert cert.kind == "interpolation" and cert.success and cert.achieved == 1


def test_interpolation_certificate_mixed_kernel():
    v = finite_rank([0, 1.0, 0.5], 0.8) + finite_rank([1.0, 0.5j], 1 + 1j)
    target = predict_finite_rank(v).n_minus.n
    cert = certificate(carleman(), v, target)
    assert cert.success and cert.achieved >= target


def test_certificate_soundness_on_finite_branches():
    # on finite-count operators the variational lower bound cannot exceed
    # the section count at a sufficient size
    h0 = carleman()
    v = quasi_carleman(1.0, -1.5, 1.0, 0.0)
    cert = certificate(h0, v, 1)
    est = stabilized_negcount(h0 + v, (64, 128, 256))
    assert cert.achieved <= est.history[-1][1]
    v2 = finite_rank([0, 1.0], 1.0)
    cert2 = certificate(Kernel(()), v2, 1)
    est2 = stabilized_negcount(v2, (64, 128, 256))
    assert cert2.achieved <= est2.history[-1][1]


def test_certificate_target_validation():
    with pytest.raises(ValueError):
        certificate(carleman(), finite_rank([-1.0], 1.0), 0)
