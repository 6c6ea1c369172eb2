import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from procaqm.errors import DegenerateMomentumError, InvalidParameterError
from procaqm.mode_algebra import (LEVI_CIVITA, MINKOWSKI, SPIN, MetricParams, PhysicsConfig, case_spin_matrix,
                                  eigensystem, foldy_hamiltonian, general_metric, helicity_matrix, mode_matrices,
                                  polarization_basis, sigma, symmetry_matrices)

ZHAT = np.array([0.0, 0.0, 1.0])
momenta = arrays(np.float64, 3, elements=st.floats(-3, 3)).filter(lambda k: np.linalg.norm(k) > 1e-2)


def test_config_rejects_nonpositive():
    for args in ((0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 0.0)):
        with pytest.raises(InvalidParameterError):
            PhysicsConfig(*args)


def test_spin_algebra():
    for i in range(3):
        for j in range(3):
            comm = SPIN[i] @ SPIN[j] - SPIN[j] @ SPIN[i]
            assert np.array_equal(comm, 1j * np.einsum("k,kab->ab", LEVI_CIVITA[i, j], SPIN))
            for k in range(3):
                lhs = SPIN[i] @ SPIN[j] @ SPIN[k] + SPIN[k] @ SPIN[j] @ SPIN[i]
                rhs = (i == j) * SPIN[k] + (k == j) * SPIN[i]
                assert np.array_equal(lhs, rhs)


@given(momenta)
def test_helicity_cube_and_spectrum(k):
    h = helicity_matrix(k)
    assert np.max(np.abs(h @ h @ h - h)) < 1e-14
    assert np.allclose(np.sort(np.linalg.eigvalsh(h)), [-1, 0, 1], atol=1e-14)


def test_longitudinal_vector_example(unit_cfg):
    pb = polarization_basis(ZHAT, 1, unit_cfg)
    assert np.allclose(pb.a3, [1, 0, 0, np.sqrt(2)], atol=1e-15)
    assert pb.a3 @ MINKOWSKI @ pb.a3 == pytest.approx(1.0)
    assert pb.four_momentum() @ MINKOWSKI @ pb.a3 == pytest.approx(0.0, abs=1e-15)


@given(momenta, st.sampled_from([1, -1]))
def test_polarization_orthonormal_transverse_complete(k, eps):
    cfg = PhysicsConfig(1.3, 0.7, 1.0)
    pb = polarization_basis(k, eps, cfg)
    a = np.array([pb.a1, pb.a2, pb.a3])
    p = pb.four_momentum()
    assert np.allclose(a @ MINKOWSKI @ a.T, np.eye(3), atol=1e-12)
    assert np.allclose(a @ MINKOWSKI @ p, 0, atol=1e-12)
    comp = a.T @ a - np.linalg.inv(MINKOWSKI) - np.outer(p, p) / cfg.M ** 2
    assert np.max(np.abs(comp)) < 1e-12 * max(1, np.max(np.abs(np.outer(p, p))))


def test_circular_vectors_are_helicity_eigenvectors(cfg, rng):
    k = rng.normal(size=3)
    pb = polarization_basis(k, -1, cfg)
    h = helicity_matrix(k)
    for s, u in ((1, pb.u_plus), (-1, pb.u_minus), (0, pb.u_zero)):
        assert np.allclose(h @ u[1:], s * u[1:], atol=1e-14)


def test_zero_momentum_rejected(cfg):
    with pytest.raises(DegenerateMomentumError):
        polarization_basis([0, 0, 0], 1, cfg)
    with pytest.raises(DegenerateMomentumError):
        mode_matrices([0, 0, 0], cfg)


def test_mode_matrices_example(unit_cfg):
    mm = mode_matrices(ZHAT, unit_cfg)
    assert np.allclose(mm.H1, 3 * np.eye(3))
    assert np.allclose(mm.H2, np.diag([1, 1, -1]))
    assert np.allclose(np.sort(np.linalg.eigvals(mm.H).real), np.repeat([-np.sqrt(2), np.sqrt(2)], 3))
    assert np.allclose(np.sort(np.linalg.eigvalsh(mm.eta_plus)), np.repeat([2 ** -0.5, 2 ** 0.5], 3))


@settings(max_examples=30)
@given(momenta, st.floats(0.2, 5.0))
def test_metric_structure(k, g):
    mm = mode_matrices(k, PhysicsConfig(1.3, g, 1.0))
    assert np.allclose(mm.eta_plus, mm.eta_plus.conj().T)
    assert np.linalg.eigvalsh(mm.eta_plus).min() > 0
    assert np.allclose(mm.rho @ mm.rho, mm.eta_plus, atol=1e-11 * np.abs(mm.eta_plus).max())
    assert np.allclose(mm.eta_plus @ mm.eta_plus_inv, np.eye(6), atol=1e-11)
    assert np.array_equal(mm.H.conj().T, sigma(3) @ mm.H @ sigma(3))


def test_eigensystem_example(unit_cfg):
    es = eigensystem(ZHAT, unit_cfg)
    Psi, Phi = es.matrix("Psi"), es.matrix("Phi")
    assert np.max(np.abs(Psi.conj().T @ Phi - np.eye(6))) < 1e-13
    eps = np.repeat([1.0, -1.0], 3)
    assert np.allclose(Psi.conj().T @ Psi, np.outer(eps, eps) * (Phi.conj().T @ Phi), atol=1e-13)
    H = mode_matrices(ZHAT, unit_cfg).H
    assert np.max(np.abs((Psi * np.repeat(es.E, 3)) @ Phi.conj().T - H)) < 1e-13


def test_eigenvectors_are_joint_eigenvectors(cfg, rng):
    k = rng.normal(size=3)
    mm = mode_matrices(k, cfg)
    es = eigensystem(k, cfg)
    for e in (1, -1):
        for h in (1, -1, 0):
            v = es.psi(e, h)
            assert np.allclose(mm.H @ v, e * mm.omega * v, atol=1e-12)
            assert np.allclose(mm.Lambda @ v, h * v, atol=1e-12)


def test_eta_spectral_forms(cfg, rng):
    k = rng.normal(size=3)
    mm = mode_matrices(k, cfg)
    es = eigensystem(k, cfg)
    Psi, Phi = es.matrix("Psi"), es.matrix("Phi")
    assert np.allclose(Phi @ Phi.conj().T, mm.eta_plus, atol=1e-12)
    assert np.allclose(Psi @ Psi.conj().T, mm.eta_plus_inv, atol=1e-12)


def test_foldy_example_and_gamma_independence(unit_cfg):
    ref = foldy_hamiltonian(ZHAT, unit_cfg)
    assert np.allclose(ref, np.sqrt(2) * sigma(3), atol=1e-14)
    other = foldy_hamiltonian(ZHAT, PhysicsConfig(1.0, 0.37, 1.0))
    assert np.max(np.abs(other - ref)) < 1e-13


def test_general_metric_unit_params(cfg, rng):
    k = rng.normal(size=3)
    gm = general_metric(k, cfg, MetricParams.ones())
    assert np.allclose(gm.eta_tilde, mode_matrices(k, cfg).eta_plus, atol=1e-12)
    assert np.allclose(gm.A_op, np.eye(6), atol=1e-12)


def test_general_metric_example(unit_cfg):
    params = MetricParams.from_values([2, 1, 1, 1, 1, 1])
    gm = general_metric(ZHAT, unit_cfg, params)
    mm = mode_matrices(ZHAT, unit_cfg)
    assert np.max(np.abs(gm.A_op @ mm.H - mm.H @ gm.A_op)) < 1e-13
    assert np.max(np.abs(gm.A_op @ mm.Lambda - mm.Lambda @ gm.A_op)) < 1e-13
    assert np.linalg.eigvalsh(gm.eta_tilde).min() > 0


def test_general_metric_products(cfg, rng):
    params = MetricParams.random(rng)
    k = rng.normal(size=3)
    gm = general_metric(k, cfg, params)
    mm = mode_matrices(k, cfg)
    assert np.allclose(gm.A_op.conj().T @ mm.eta_plus @ gm.A_op, gm.eta_tilde, atol=1e-11)
    assert np.allclose(gm.rho_tilde.conj().T @ gm.rho_tilde, gm.eta_tilde, atol=1e-11)
    assert np.allclose(gm.rho_tilde @ gm.rho_tilde_inv, np.eye(6), atol=1e-11)
    H = mm.H
    assert np.allclose(H.conj().T, gm.eta_tilde @ H @ np.linalg.inv(gm.eta_tilde), atol=1e-11)


def test_metric_params_validation():
    with pytest.raises(InvalidParameterError):
        MetricParams.from_values([1, 1, 0, 1, 1, 1])
    with pytest.raises(InvalidParameterError):
        MetricParams.from_values([1, 1, 1])
    with pytest.raises(InvalidParameterError):
        MetricParams.from_a([1, 1, 1, 1, 1, -2])


def test_metric_params_L_coefficients():
    p = MetricParams.from_a([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    assert p.L(1, 1) == pytest.approx(3.0)
    assert p.L0(1) == pytest.approx(4.5) and p.L0(-1) == pytest.approx(-1.5)
    assert p.L(1, 1) > 0
    assert MetricParams.ones().is_unit() and not p.is_unit()


@settings(max_examples=25)
@given(momenta)
def test_symmetry_matrices(k):
    cfg = PhysicsConfig(0.9, 1.7, 1.0)
    sm = symmetry_matrices(k, cfg)
    mm = mode_matrices(k, cfg)
    assert np.max(np.abs(sm.C @ sm.C - np.eye(6))) < 1e-12
    assert np.max(np.abs(mm.eta_plus @ sm.C - sm.P)) < 1e-12 * max(1, np.abs(mm.eta_plus).max())
    assert np.array_equal(sm.P, sigma(3))


def test_hamiltonian_real_at_zhat(unit_cfg):
    assert np.all(np.isreal(mode_matrices(ZHAT, unit_cfg).H))


def test_case_spin_example(unit_cfg):
    S = case_spin_matrix(ZHAT, unit_cfg)
    assert np.allclose(np.sort(np.linalg.eigvals(S[2]).real), [-1, -1, 0, 0, 1, 1], atol=1e-12)


def test_case_spin_formula_random(cfg, rng):
    for k in rng.normal(size=(20, 3)):
        case_spin_matrix(k, cfg, tol=1e-12)


def test_case_spin_nonrelativistic_limit(unit_cfg):
    S = case_spin_matrix(1e-6 * ZHAT, unit_cfg)
    for i in range(3):
        assert np.allclose(S[i], sigma(0, SPIN[i]), atol=1e-10)
