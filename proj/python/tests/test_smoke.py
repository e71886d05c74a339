import numpy as np
import pytest

import kcoh


def test_eig_round_trip():
    rng = np.random.default_rng(0)
    g = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    a = (g + g.conj().T) / 2
    values, vectors = kcoh.eig_hermitian(a)
    assert np.all(np.diff(values) <= 1e-12)
    assert np.linalg.norm(vectors @ np.diag(values) @ vectors.conj().T - a) < 1e-9


def test_nearest_psd_clamps():
    a = np.array([[1.0, 2.0], [2.0, 1.0]], dtype=complex)
    p = kcoh.nearest_psd(a)
    assert np.allclose(p, 1.5 * np.ones((2, 2)))


def test_elementary_symmetric_and_cone():
    s = kcoh.elem_sym_all(np.array([10.0, 4.0, -1.0, -2.0]))
    assert s[1] == pytest.approx(11.0)
    assert s[2] == pytest.approx(0.0)
    verdict = kcoh.in_Ck(np.array([10.0, 4.0, -1.0, -2.0]), 2)
    assert verdict["status"] in ("inside", "boundary")
    assert kcoh.in_Ck(np.array([1.0, 1.0, -1.0]), 2)["status"] == "outside"


def test_circulant_witness():
    x = kcoh.construct_circulant_witness(np.array([2.0, 2.0, -1.0]))
    report = kcoh.is_k_locally_psd(x, 2)
    assert report["is_member"]
    with pytest.raises(ValueError):
        kcoh.construct_circulant_witness(np.array([1.0, 1.0, -1.0]))


def test_vandermonde_witness():
    x, c = kcoh.construct_vandermonde_witness(4, 3, np.array([1.0, 2.0, 3.0, 4.0]))
    assert c == pytest.approx(4.0 / 3.0)
    values, _ = kcoh.eig_hermitian(x)
    assert int(np.sum(values < -1e-8)) == 1


def test_construct_with_spectrum():
    x, residual, iterations, converged = kcoh.construct_with_spectrum(
        np.array([10.0, 4.0, -1.0, -2.0]), 2, seed=1
    )
    assert converged
    assert residual < 1e-6
    assert kcoh.is_k_locally_psd(x, 2)["is_member"]


def test_absolute_battery():
    inside = kcoh.check_abs_k_incoherent(np.array([1 / 3, 1 / 3, 1 / 3]), 2)
    assert inside["status"] == "absolutely_incoherent"
    outside = kcoh.check_abs_k_incoherent(np.array([2 / 3, 1 / 3, 0.0]), 2)
    assert outside["status"] == "not_absolutely_incoherent"
    assert outside["certificate"] is not None
    assert len(outside["criteria_log"]) > 0


def test_k_incoherence_membership():
    rho = np.ones((3, 3), dtype=complex) / 3.0
    result = kcoh.is_k_incoherent(rho, 2)
    assert result["status"] == "non_member"
    assert result["witness_value"] == pytest.approx(-0.5, abs=1e-8)

    diag = np.diag([0.5, 0.3, 0.2]).astype(complex)
    assert kcoh.is_k_incoherent(diag, 1)["status"] == "member"


def test_majorization_and_uhlmann():
    assert kcoh.majorized_by(np.array([0.5, 0.5, 0.0]), np.array([2 / 3, 1 / 3, 0.0]))
    rho = np.diag([0.5, 0.5, 0.0]).astype(complex)
    sigma = np.diag([2 / 3, 1 / 3, 0.0]).astype(complex)
    assert kcoh.uhlmann_mix_check(rho, sigma)


def test_haar_determinism():
    u1 = kcoh.haar_unitary(4, seed=7)
    u2 = kcoh.haar_unitary(4, seed=7)
    assert np.array_equal(u1, u2)
    assert np.linalg.norm(u1 @ u1.conj().T - np.eye(4)) < 1e-10
