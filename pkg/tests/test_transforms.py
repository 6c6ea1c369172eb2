import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from procaqm.fields import DiscreteModeField, GridField, Lattice, chirality_split, evolve
from procaqm.inner_products import GENERAL, inner
from procaqm.mode_algebra import MetricParams, PhysicsConfig, helicity_matrix
from procaqm.observables import apply_helicity
from procaqm.transforms import (WaveFunctionSet, change_of_metric, change_of_metric_inverse, foldy_six_vector,
                                from_wavefunction, hamiltonian_on_wavefunction, to_wavefunction, u_operators)

CFG = PhysicsConfig(1.3, 0.7, 1.1)


def test_u_example(unit_cfg):
    uo = u_operators([0, 0, 1], unit_cfg)
    assert np.allclose(uo.U, np.diag([2 ** 0.25, 2 ** 0.25, 2 ** -0.25]), atol=1e-15)


@given(st.integers(0, 10_000))
def test_u_inverse_and_unit_params(seed):
    rng = np.random.default_rng(seed)
    k = rng.normal(size=3)
    uo = u_operators(k, CFG)
    assert np.max(np.abs(uo.U @ uo.U_inv - np.eye(3))) < 1e-13
    assert np.allclose(uo.U_ee[0, 0], uo.U) and np.allclose(uo.U_ee[1, 0], uo.U)
    up = u_operators(k, CFG, MetricParams.random(rng))
    for ie in range(2):
        assert np.allclose(up.U_ee_plus_inv[ie] @ up.U_ee[ie, 0], np.eye(3), atol=1e-12)


def test_positive_frequency_has_no_negative_wavefunction():
    A = DiscreteModeField.random(CFG, np.random.default_rng(1), 3, positive_only=True)
    assert np.all(to_wavefunction(A).g[:, 1] == 0)


def test_single_mode_norm(unit_cfg):
    A = DiscreteModeField.basis_mode(unit_cfg, [0, 0, 1], 1, 0)
    assert to_wavefunction(A).norm2() == pytest.approx(np.sqrt(2))


@settings(max_examples=30)
@given(st.integers(0, 10_000), st.floats(-3, 3))
def test_unitarity(seed, x0):
    rng = np.random.default_rng(seed)
    k = rng.normal(size=(3, 3))
    A, B = (DiscreteModeField(CFG, k, rng.normal(size=(3, 2, 3)) + 1j * rng.normal(size=(3, 2, 3))) for _ in range(2))
    params = MetricParams.random(rng)
    fa, fb = to_wavefunction(A, params, x0), to_wavefunction(B, params, x0)
    ref = inner(GENERAL(params), A, B)
    assert abs(fa.inner(fb) - ref) < 1e-12 * max(1, abs(ref))


def test_wavefunction_independent_of_metric_label():
    rng = np.random.default_rng(2)
    A = DiscreteModeField.random(CFG, rng, 3)
    params = MetricParams.random(rng)
    f1 = to_wavefunction(A)
    f2 = to_wavefunction(change_of_metric(A, params), params)
    assert np.max(np.abs(f1.g - f2.g)) < 1e-12 * np.abs(f1.g).max()
    back = change_of_metric_inverse(change_of_metric(A, params), params)
    assert np.allclose(back.amplitudes(), A.amplitudes(), atol=1e-12)


def test_foldy_equation():
    A = DiscreteModeField.random(CFG, np.random.default_rng(3), 3)
    h = 1e-3
    d = (to_wavefunction(A, x0_0=h).g - to_wavefunction(A, x0_0=-h).g) / (2 * h)
    Hf = hamiltonian_on_wavefunction(to_wavefunction(A), CFG.M).g
    assert np.max(np.abs(1j * d - Hf)) < 1e-5 * np.abs(Hf).max()
    exact = to_wavefunction(A, x0_0=0.8).g
    phase = np.exp(-1j * np.array([1, -1])[None, :, None] * A.omegas()[:, None, None] * 0.8)
    assert np.allclose(exact, to_wavefunction(A).g * phase, atol=1e-13)


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_round_trip(seed):
    rng = np.random.default_rng(seed)
    A = DiscreteModeField.random(CFG, rng, 3)
    params = MetricParams.random(rng)
    wf = to_wavefunction(A, params, 0.4)
    B = from_wavefunction(wf, CFG, params)
    assert np.max(np.abs(B.amplitudes() - A.amplitudes())) < 1e-12 * np.abs(A.amplitudes()).max()
    again = to_wavefunction(B, params, 0.4)
    assert np.max(np.abs(again.g - wf.g)) < 1e-12 * np.abs(wf.g).max()


def test_zero_wavefunction_gives_zero_field():
    k = np.array([[0.1, 0.2, 0.3]])
    wf = WaveFunctionSet(k, np.zeros((1, 2, 3), dtype=complex), 0.0)
    assert from_wavefunction(wf, CFG).is_zero()


def test_grid_round_trip():
    rng = np.random.default_rng(4)
    lat = Lattice(4, 0.4)
    G = GridField.from_coefficients(CFG, lat, rng.normal(size=(2, 3, 4, 4, 4)))
    back = from_wavefunction(to_wavefunction(G, x0_0=0.3), CFG)
    assert isinstance(back, GridField)
    assert np.allclose(back.V, G.V, atol=1e-12)


def test_foldy_six_vector_halves_are_wavefunctions():
    rng = np.random.default_rng(5)
    A = DiscreteModeField.random(CFG, rng, 3)
    params = MetricParams.random(rng)
    six = foldy_six_vector(A, params, 0.6)
    wf = to_wavefunction(A, params, 0.6).g
    assert np.allclose(six[:, :3], wf[:, 0], atol=1e-12)
    assert np.allclose(six[:, 3:], wf[:, 1], atol=1e-12)


def test_helicity_conjugation():
    A = DiscreteModeField.random(CFG, np.random.default_rng(6), 3)
    lhs = to_wavefunction(apply_helicity(A)).g
    h = helicity_matrix(A.momenta())
    rhs = np.einsum("nij,nej->nei", h, to_wavefunction(A).g)
    assert np.allclose(lhs, rhs, atol=1e-12)
