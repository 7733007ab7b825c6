import math

import numpy as np
import pytest

from ptspec import hobasis as hb
from ptspec.oracles import QuadratureOracle
from ptspec.potentials import Model, PotentialSpec
from ptspec.shooting import find_real_eigenvalues


@pytest.fixture(scope="module")
def quad():
    return QuadratureOracle(n_max=40, n_nodes=200)


def test_p2_closed_form_values():
    assert hb.me_p2(0, 0) == 0.5
    assert hb.me_p2(0, 2) == pytest.approx(-math.sqrt(2) / 2)
    assert hb.me_p2(1, 2) == 0.0


def test_gauss_closed_form_values():
    assert hb.me_gauss(0, 0) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert hb.me_gauss(0, 1) == 0.0
    # 200-point Gauss-Hermite value of <2|exp(-x^2)|4>, frozen
    assert hb.me_gauss(2, 4) == pytest.approx(-0.19136638615493806, abs=1e-12)


def test_xgauss_closed_form_values():
    assert hb.me_xgauss(0, 1) == pytest.approx(0.25, rel=1e-15)
    assert hb.me_xgauss(0, 2) == 0.0
    assert hb.me_xgauss(3, 4) == pytest.approx(0.03906249999999956, abs=1e-12)


def test_x_and_x2_values():
    assert hb.me_x(0, 1) == pytest.approx(1 / math.sqrt(2))
    for n in range(6):
        assert hb.me_x2(n, n) == (2 * n + 1) / 2


def test_x2p2_diagonal():
    # the operator x^2 p^2 has diagonal (2n^2 + 2n - 1)/4 in this basis
    for n in range(10):
        assert hb.me_x2p2(n, n) == pytest.approx((2 * n * n + 2 * n - 1) / 4)


@pytest.mark.parametrize("name", ["p2", "x", "x2", "x2p2", "gauss", "xgauss"])
def test_matrices_match_quadrature(quad, name):
    dense = getattr(hb, f"{name}_matrix")(41)
    scalar = getattr(hb, f"me_{name}")
    ref = quad.matrix(name)
    assert np.max(np.abs(dense - ref)) <= 1e-10
    closed = np.array([[scalar(m, n) for n in range(41)] for m in range(41)])
    assert np.max(np.abs(closed - ref)) <= 1e-10


def test_gauss_elements_stay_finite_for_large_n():
    G = hb.gauss_matrix(300)
    assert np.all(np.isfinite(G))
    assert np.all(np.isfinite(hb.xgauss_matrix(300)))


def test_scaled_matrices_reduce_to_closed_forms():
    G, XG = hb.scaled_gauss_matrices(60, 1.0)
    np.testing.assert_allclose(G, hb.gauss_matrix(60), atol=1e-12)
    np.testing.assert_allclose(XG, hb.xgauss_matrix(60), atol=1e-12)


def test_hamiltonian_structure():
    h0 = hb.build_gaussian_hamiltonian(50.0, 0.0, hb.BasisConfig(40))
    assert np.all(h0.imag == 0)
    np.testing.assert_allclose(h0, h0.T)
    hp = hb.build_gaussian_hamiltonian(50.0, 10.0, hb.BasisConfig(40))
    hm = hb.build_gaussian_hamiltonian(50.0, -10.0, hb.BasisConfig(40))
    np.testing.assert_array_equal(hp, np.conj(hm))


def test_hermitian_spectrum_is_real():
    w = np.linalg.eigvals(hb.build_gaussian_hamiltonian(50.0, 0.0, hb.BasisConfig(160)))
    assert np.max(np.abs(w.imag)) <= 1e-8


def test_ground_state_agrees_with_shooting():
    ho = hb.gaussian_spectrum(50.0, 10.0, hb.BasisConfig(120)).eigenvalues
    sh = find_real_eigenvalues(PotentialSpec(Model.GAUSSIAN, 50.0, 10.0)).eigenvalues
    assert ho[0] == pytest.approx(sh[0], rel=1e-3)


def test_basis_convergence_at_v2_40():
    a = hb.gaussian_spectrum(50.0, 40.0, hb.BasisConfig(120)).eigenvalues[:6]
    b = hb.gaussian_spectrum(50.0, 40.0, hb.BasisConfig(160)).eigenvalues[:6]
    assert a.size == b.size
    assert np.max(np.abs(a - b)) <= 1e-4


def test_scale_independence_at_convergence():
    ref = hb.gaussian_spectrum(50.0, 20.0, hb.BasisConfig(160, 1.0)).eigenvalues
    for lam in (0.7, "auto"):
        other = hb.gaussian_spectrum(50.0, 20.0, hb.BasisConfig(160, lam)).eigenvalues
        np.testing.assert_allclose(other[:4], ref[:4], rtol=1e-6)


def test_pencil_parts():
    A, B = hb.build_wc_pencil(20.0, 5.0, hb.BasisConfig(60))
    assert not np.iscomplexobj(B) or np.all(B.imag == 0)
    np.testing.assert_allclose(B, B.T)
    assert np.min(np.linalg.eigvalsh(B)) >= 1 - 1e-12


def test_pencil_is_linear_in_energy():
    cfg = hb.BasisConfig(50)
    A, B = hb.build_wc_pencil(20.0, 5.0, cfg)
    for E in (-13.0, -2.5):
        np.testing.assert_allclose(A - E * B, hb.wc_operator_matrix(E, 20.0, 5.0, cfg), atol=1e-12)


def test_wc_hermitian_limit_against_finite_differences():
    # three-point finite differences on [-60, 60], 12000 cells, frozen
    fd = np.array([-16.17255897, -9.78853677, -5.63381128, -3.09907277, -1.64318747])
    got = hb.wc_spectrum(20.0, 0.0).eigenvalues[:5]
    np.testing.assert_allclose(got, fd, rtol=1e-3)


def test_wc_no_real_levels_above_v1():
    assert hb.wc_spectrum(20.0, 21.0).eigenvalues.size == 0


def test_basis_config_validation():
    with pytest.raises(ValueError):
        hb.BasisConfig(1)
    with pytest.raises(ValueError):
        hb.BasisConfig(10, -1.0)
