import numpy as np
import pytest

from ptspec._common import DomainError
from ptspec.potentials import Model, PotentialSpec
from ptspec.rectwell import (
    EliminantConsistencyError,
    eliminant_complex,
    eliminant_vars,
    rect_eliminant,
    rect_spectrum,
)
from ptspec.shooting import find_real_eigenvalues

from test_shooting import SQUARE_WELL_20


def test_q_is_conjugate_of_p():
    p, q, r = eliminant_vars(-7.3, 20.0, 3.0, 2.0)
    assert q == pytest.approx(np.conj(p), rel=1e-15)
    assert r == pytest.approx(2 * np.sqrt(7.3))


def test_hermitian_limit_matches_square_well():
    res = rect_spectrum(20.0, 0.0, 2.0)
    np.testing.assert_allclose(res.eigenvalues, SQUARE_WELL_20, atol=1e-8, rtol=0)


def test_hermitian_limit_factorization():
    # at v2 = 0, D = -2 (p cos p - r sin p)(p sin p + r cos p) up to sign
    E = np.linspace(-19.9, -0.1, 50)
    p = 2 * np.sqrt(E + 20.0)
    r = 2 * np.sqrt(-E)
    even = p * np.sin(p) - r * np.cos(p)
    odd = p * np.cos(p) + r * np.sin(p)
    D = rect_eliminant(E, 20.0, 0.0, 2.0)
    np.testing.assert_allclose(D, -2 * p * even * odd, rtol=1e-9, atol=1e-9)


def test_agrees_with_shooting():
    ana = rect_spectrum(20.0, 3.0, 2.0).eigenvalues
    shoot = find_real_eigenvalues(PotentialSpec(Model.RECT, 20.0, 3.0, 2.0)).eigenvalues
    assert ana.size == shoot.size > 0
    np.testing.assert_allclose(ana, shoot, atol=1e-6)


def test_pair_straddles_first_ep():
    # V1 = 40 is the depth whose EPs match the published rectangular-well list
    below = rect_spectrum(40.0, 0.955, 2.0).eigenvalues
    above = rect_spectrum(40.0, 0.967, 2.0).eigenvalues
    assert below.size - above.size == 2
    assert below[1] - below[0] < 0.5


def test_far_above_all_eps_is_empty():
    assert rect_spectrum(20.0, 100.0, 2.0).eigenvalues.size == 0


def test_realness_and_v2_parity():
    E = np.linspace(-39.99, -0.01, 400)
    for v2 in (0.5, 3.0, 7.0):
        d = eliminant_complex(E, 40.0, v2, 2.0)
        assert np.all(np.abs(d.imag) <= 1e-9 * (1 + np.abs(d.real)))
        np.testing.assert_array_equal(rect_eliminant(E, 40.0, v2, 2.0), rect_eliminant(E, 40.0, -v2, 2.0))


def test_domain_errors():
    with pytest.raises(DomainError):
        rect_eliminant(0.5, 20.0, 3.0, 2.0)
    with pytest.raises(DomainError):
        rect_eliminant(-20.0, 20.0, 3.0, 2.0)
    with pytest.raises(ValueError):
        rect_spectrum(-1.0, 0.0)


def test_consistency_error_is_raised_on_tight_tolerance():
    with pytest.raises(EliminantConsistencyError):
        rect_eliminant(np.linspace(-19, -1, 50), 20.0, 3.0, 2.0, imag_tol=1e-30)
