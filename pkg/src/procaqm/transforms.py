"""Foldy wave functions and the maps relating fields, wave functions and metrics.

A wave function set holds ``f(eps, s, x)`` for chirality ``eps`` and the
three Cartesian spin labels ``s^1, s^2, s^3 = +1, -1, 0``. It is stored in
momentum space on the source field's own modes, so every identity here is
evaluated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleFieldsError
from .fields import (DiscreteModeField, FieldInitialData, GridField, Lattice, PlaneWaveSum, _amp_from_spatial,
                     _E_from_Adot, helicity_projectors)
from .mode_algebra import EPSILONS, MetricParams, PhysicsConfig, _check_k, eps_index, helicity_matrix, omega

__all__ = ["UOperators", "WaveFunctionSet", "u_operators", "U_matrix", "U_inv_matrix", "U_ee_matrix",
           "U_ee_plus_inv_matrix", "to_wavefunction", "from_wavefunction", "change_of_metric",
           "change_of_metric_inverse", "foldy_six_vector", "hamiltonian_on_wavefunction", "SPIN_LABELS"]

SPIN_LABELS = (1, -1, 0)
_EPS = np.array(EPSILONS, dtype=float)
_I3 = np.eye(3)


def _hq(k, M):
    h = helicity_matrix(k)
    D = omega(k, M)[..., None, None] ** 2
    return h, h @ h, D ** 0.25, D ** -0.25


def U_matrix(k, M):
    """``U = D^{1/4} h^2 + M D^{-1/4} (1 - h^2)`` (vectorized over k)."""
    _, h2, q, qi = _hq(k, M)
    return (q - M * qi) * h2 + M * qi * _I3


def U_inv_matrix(k, M):
    _, h2, q, qi = _hq(k, M)
    return (qi - q / M) * h2 + q / M * _I3


def U_ee_matrix(k, M, params: MetricParams, eps: int, eps2: int):
    """``U_{eps, eps2}``; at ``params = 1`` and ``eps2 = +1`` this is ``U``."""
    h, h2, q, qi = _hq(k, M)
    Dp, Dm = (q, qi) if eps2 == 1 else (qi, q)
    Mp = M ** eps2
    a0 = params.alpha[eps_index(eps), 2]
    return ((params.Z(eps, 1) * Dp - Mp * a0 * Dm) * h2 + params.Z(eps, -1) * Dp * h + Mp * a0 * Dm * _I3)


def U_ee_plus_inv_matrix(k, M, params: MetricParams, eps: int):
    h, h2, q, qi = _hq(k, M)
    a0 = params.alpha[eps_index(eps), 2]
    return ((params.Z_tilde(eps, 1) * qi - q / (M * a0)) * h2 + params.Z_tilde(eps, -1) * qi * h
            + q / (M * a0) * _I3)


@dataclass(frozen=True)
class UOperators:
    U: np.ndarray
    U_inv: np.ndarray
    U_ee: np.ndarray  # [eps, eps2]
    U_ee_plus_inv: np.ndarray  # [eps]


def u_operators(k, cfg: PhysicsConfig, params: MetricParams | None = None) -> UOperators:
    """3x3 maps at a single momentum (the arbitrary length ``gamma`` never enters)."""
    params = params or MetricParams.ones()
    k = _check_k(np.array(k, dtype=float).reshape(3))
    M = cfg.M
    Uee = np.array([[U_ee_matrix(k, M, params, e, e2) for e2 in EPSILONS] for e in EPSILONS])
    Uinv = np.array([U_ee_plus_inv_matrix(k, M, params, e) for e in EPSILONS])
    return UOperators(U=U_matrix(k, M), U_inv=U_inv_matrix(k, M), U_ee=Uee, U_ee_plus_inv=Uinv)


@dataclass(frozen=True)
class WaveFunctionSet:
    """Momentum amplitudes ``g[n, eps, i]`` with ``f(eps, s^i, x) = sum_k g phi_k(x)``.

    ``lattice`` is set when the source was a :class:`GridField`; ``k`` then
    enumerates lattice sites in C order.
    """

    k: np.ndarray
    g: np.ndarray
    x0_0: float
    lattice: Lattice | None = None

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.g) ** 2))

    def inner(self, other: "WaveFunctionSet") -> complex:
        if self.lattice != other.lattice or self.k.shape != other.k.shape or not np.array_equal(self.k, other.k):
            raise IncompatibleFieldsError("wave functions live on different mode sets")
        return complex(np.vdot(self.g, other.g))

    def evaluate(self, x):
        """Values ``f[eps, i]`` at points ``x`` (continuum plane-wave sum)."""
        pw = plane_wave_sum_from(self.k, self.g)
        return pw(0.0, x)

    def lattice_array(self):
        """Shape (2, N, N, N, 3) for lattice wave functions."""
        n = self.lattice.n
        return np.moveaxis(self.g, 1, 0).reshape(2, n, n, n, 3)

    def position_samples(self):
        """Unitary position-grid samples (same shape as ``lattice_array``)."""
        return self.lattice.to_position(self.lattice_array())

    def with_lattice_array(self, arr):
        g = np.moveaxis(np.asarray(arr).reshape(2, -1, 3), 0, 1)
        return WaveFunctionSet(self.k, g, self.x0_0, self.lattice)

    def chirality(self, eps: int) -> "WaveFunctionSet":
        g = np.zeros_like(self.g)
        g[:, eps_index(eps)] = self.g[:, eps_index(eps)]
        return WaveFunctionSet(self.k, g, self.x0_0, self.lattice)


def plane_wave_sum_from(k, g):
    return PlaneWaveSum((2 * np.pi) ** -1.5 * g, np.zeros(len(k)), k)


def _A_eps(field, x0_0):
    Vt, _ = field.mode_arrays_at(x0_0)
    return Vt[..., 1:]


def to_wavefunction(field, params: MetricParams | None = None, x0_0: float = 0.0) -> WaveFunctionSet:
    """``f(eps, s^i) = sqrt(kappa/M) [U_{eps,+} A_eps(x0_0)]^i`` mode-wise."""
    params = params or MetricParams.ones()
    cfg = field.cfg
    k = field.momenta()
    A = _A_eps(field, x0_0)
    g = np.empty_like(A)
    for ie, e in enumerate(EPSILONS):
        g[:, ie] = np.einsum("nij,nj->ni", U_ee_matrix(k, cfg.M, params, e, 1), A[:, ie])
    g *= np.sqrt(cfg.kappa / cfg.M)
    return WaveFunctionSet(k, g, float(x0_0), getattr(field, "lattice", None))


def from_wavefunction(wf: WaveFunctionSet, cfg: PhysicsConfig, params: MetricParams | None = None, template=None):
    """Inverse of :func:`to_wavefunction`.

    The result is a :class:`GridField` for lattice wave functions and a
    unit-normalized :class:`DiscreteModeField` otherwise (or the
    representation of ``template`` when given).
    """
    params = params or MetricParams.ones()
    k = wf.k
    w = omega(k, cfg.M)
    V3 = np.empty_like(wf.g)
    for ie, e in enumerate(EPSILONS):
        A = np.einsum("nij,nj->ni", U_ee_plus_inv_matrix(k, cfg.M, params, e), wf.g[:, ie])
        V3[:, ie] = np.sqrt(cfg.M / cfg.kappa) * A * np.exp(1j * e * w * wf.x0_0)[:, None]
    V = _amp_from_spatial(k, V3, cfg.M)
    if template is not None:
        return template.with_amplitudes(V)
    if wf.lattice is not None:
        return GridField.zeros(cfg, wf.lattice).with_amplitudes(V)
    return DiscreteModeField(cfg, k, np.zeros((len(k), 2, 3))).with_amplitudes(V)


def change_of_metric(field, params: MetricParams):
    """Unitary map from the unit-parameter Hilbert space to the one labelled by ``params``.

    Acts as ``c_{eps,h} -> c_{eps,h} / alpha_{eps,h}`` on helicity components.
    """
    return _scale_helicity(field, 1.0 / params.alpha)


def change_of_metric_inverse(field, params: MetricParams):
    return _scale_helicity(field, params.alpha)


def _scale_helicity(field, factors):
    P = helicity_projectors(field.momenta())

    def fn(k, V3):
        out = np.zeros_like(V3)
        for ih in range(3):
            out += factors[None, :, ih, None] * np.einsum("nij,nej->nei", P[ih], V3)
        return out

    return field.map_spatial(fn)


def foldy_six_vector(field, params: MetricParams | None = None, x0: float = 0.0):
    """Six-component Foldy vector per mode from ``(A, E)`` at ``x0``.

    Uses ``(1/2) sqrt(kappa/M) (U_{++} A - i U_{+-} E, U_{-+} A + i U_{--} E)``;
    its two halves are the chirality components of the wave function.
    """
    params = params or MetricParams.ones()
    cfg = field.cfg
    data = FieldInitialData.from_field(field, x0)
    k = data.k
    A = data.Avec
    E = _E_from_Adot(k, data.Avecdot, cfg.M)
    U = lambda e, e2, v: np.einsum("nij,nj->ni", U_ee_matrix(k, cfg.M, params, e, e2), v)
    c = 0.5 * np.sqrt(cfg.kappa / cfg.M)
    return np.concatenate([c * (U(1, 1, A) - 1j * U(1, -1, E)), c * (U(-1, 1, A) + 1j * U(-1, -1, E))], axis=1)


def hamiltonian_on_wavefunction(wf: WaveFunctionSet, M: float) -> WaveFunctionSet:
    """``eps sqrt(-laplacian + M^2)`` applied to each chirality."""
    w = omega(wf.k, M)
    return WaveFunctionSet(wf.k, wf.g * (_EPS[None, :, None] * w[:, None, None]), wf.x0_0, wf.lattice)
