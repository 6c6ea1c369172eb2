"""Per-momentum matrix realization of the Proca operator algebra.

At a fixed momentum ``k`` every operator of the theory becomes a small
matrix: ``D -> omega^2``, the momentum operator becomes ``k`` and ``k.S``
becomes a 3x3 Hermitian matrix. The low-level helpers in this module are
vectorized over leading axes of ``k`` (shape ``(..., 3)``); the public
constructors that return named matrix sets take a single momentum.

Conventions
-----------
* Natural units, metric signature ``(-, +, +, +)``.
* Chirality order ``EPSILONS = (+1, -1)``; helicity order
  ``HELICITIES = (+1, -1, 0)``. Arrays indexed by ``[eps, h]`` follow these.
* ``Sigma_m = sigma_m (x) I_3`` acting on six-component vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .errors import DegenerateMomentumError, DomainError, InvalidParameterError

__all__ = [
    "EPSILONS", "HELICITIES", "LABELS", "SPIN", "LEVI_CIVITA", "MINKOWSKI",
    "PhysicsConfig", "MetricParams", "PolarizationSet", "ModeMatrixSet",
    "Eigensystem", "GeneralMetric", "SymmetryMatrices",
    "eps_index", "hel_index", "omega", "k_dot_S", "k_cross_S", "helicity_matrix",
    "polarization_vectors", "polarization_basis", "mode_matrices", "eigensystem",
    "foldy_hamiltonian", "general_metric", "symmetry_matrices", "case_spin_matrix",
    "theta_matrices", "sigma",
]

EPSILONS = (1, -1)
HELICITIES = (1, -1, 0)
LABELS = tuple(itertools.product(EPSILONS, HELICITIES))
MINKOWSKI = np.diag([-1.0, 1.0, 1.0, 1.0])

SPIN = np.array([
    [[0, 0, 0], [0, 0, -1j], [0, 1j, 0]],
    [[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]],
    [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]],
], dtype=complex)

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _l in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _l] = 1.0
    LEVI_CIVITA[_i, _l, _j] = -1.0

_PAULI = {
    0: np.eye(2, dtype=complex),
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}
_I3 = np.eye(3, dtype=complex)


def sigma(m: int, block=None):
    """``sigma_m (x) block`` (``block`` defaults to the 3x3 identity)."""
    return np.kron(_PAULI[m], _I3 if block is None else block)


def eps_index(eps: int) -> int:
    if eps not in EPSILONS:
        raise DomainError(f"chirality must be +1 or -1, got {eps!r}")
    return 0 if eps == 1 else 1


def hel_index(h: int) -> int:
    if h not in HELICITIES:
        raise DomainError(f"helicity must be +1, -1 or 0, got {h!r}")
    return HELICITIES.index(h)


@dataclass(frozen=True)
class PhysicsConfig:
    """Mass ``M``, the length ``gamma`` of the six-component map, and ``kappa``."""

    M: float = 1.0
    gamma: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("M", "gamma", "kappa"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v <= 0:
                raise InvalidParameterError(f"{name} must be a positive finite number, got {v!r}")
            object.__setattr__(self, name, v)


def omega(k, M: float):
    """``sqrt(|k|^2 + M^2)`` over the last axis of ``k``."""
    k = np.asarray(k, dtype=float)
    return np.sqrt(np.einsum("...i,...i->...", k, k) + M * M)


def _check_k(k):
    k = np.asarray(k, dtype=float)
    if k.shape[-1:] != (3,):
        raise DomainError(f"momentum must have trailing dimension 3, got shape {k.shape}")
    if np.any(np.linalg.norm(k, axis=-1) == 0.0):
        raise DegenerateMomentumError("k = 0 has no helicity or polarization basis")
    return k


def k_dot_S(k):
    """``k.S`` as ``(..., 3, 3)`` matrices; ``(k.S) v = i k x v``."""
    return np.einsum("...i,ijk->...jk", np.asarray(k, dtype=float), SPIN)


def k_cross_S(k):
    """Components ``(k x S)_i`` as an array of shape ``(..., 3, 3, 3)``."""
    return np.einsum("ijl,...j,lab->...iab", LEVI_CIVITA, np.asarray(k, dtype=float), SPIN)


def helicity_matrix(k):
    """Helicity ``h(k) = k.S / |k|``."""
    k = _check_k(k)
    return k_dot_S(k) / np.linalg.norm(k, axis=-1)[..., None, None]


def _transverse_pair(k):
    kn = np.linalg.norm(k, axis=-1, keepdims=True)
    kh = k / kn
    zc = np.cross(np.array([0.0, 0.0, 1.0]), kh)
    zn = np.linalg.norm(zc, axis=-1, keepdims=True)
    small = zn[..., 0] < 1e-8
    a1 = np.where(small[..., None], np.array([1.0, 0.0, 0.0]), zc / np.where(zn == 0, 1.0, zn))
    a2 = np.cross(kh, a1)
    return kh, a1, a2


def polarization_vectors(k, M: float):
    """Circular polarization four-vectors ``u_{eps,h}(k)``.

    Returns
    -------
    ndarray, shape (..., 2, 3, 4)
        Indexed ``[..., eps, h, mu]`` in the order of ``EPSILONS`` and
        ``HELICITIES``.
    """
    k = _check_k(k)
    kh, a1, a2 = _transverse_pair(k)
    kn = np.linalg.norm(k, axis=-1)
    w = np.sqrt(kn ** 2 + M * M)
    out = np.zeros(k.shape[:-1] + (2, 3, 4), dtype=complex)
    for ie, e in enumerate(EPSILONS):
        out[..., ie, 0, 1:] = (a1 + 1j * a2) / np.sqrt(2.0)
        out[..., ie, 1, 1:] = (a1 - 1j * a2) / np.sqrt(2.0)
        out[..., ie, 2, 0] = kn / M
        out[..., ie, 2, 1:] = (e * w / M)[..., None] * kh
    return out


@dataclass(frozen=True)
class PolarizationSet:
    """Polarization four-vectors of one momentum and chirality."""

    k: np.ndarray
    eps: int
    M: float
    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    u: Dict[int, np.ndarray]

    @property
    def u_plus(self):
        return self.u[1]

    @property
    def u_minus(self):
        return self.u[-1]

    @property
    def u_zero(self):
        return self.u[0]

    def four_momentum(self):
        w = float(omega(self.k, self.M))
        return np.concatenate([[self.eps * w], self.k])


def polarization_basis(k, eps: int, cfg: PhysicsConfig) -> PolarizationSet:
    """Real transverse pair, longitudinal vector and circular vectors for ``(k, eps)``.

    Raises
    ------
    DegenerateMomentumError
        For ``k = 0``.
    """
    k = _check_k(np.array(k, dtype=float).reshape(3))
    eps_index(eps)
    kh, a1, a2 = _transverse_pair(k)
    kn = np.linalg.norm(k)
    w = np.sqrt(kn ** 2 + cfg.M ** 2)
    a3 = np.concatenate([[kn / cfg.M], eps * w / cfg.M * kh])
    u = polarization_vectors(k, cfg.M)[eps_index(eps)]
    return PolarizationSet(
        k=k, eps=eps, M=cfg.M,
        a1=np.concatenate([[0.0], a1]), a2=np.concatenate([[0.0], a2]), a3=a3,
        u={h: u[hel_index(h)] for h in HELICITIES},
    )


@dataclass(frozen=True)
class MetricParams:
    """Six nonzero complex ``alpha_{eps,h}`` labelling an admissible inner product.

    ``alpha`` has shape ``(2, 3)`` indexed ``[eps, h]``; the positive
    numbers ``a = |alpha|^2`` are what enters inner products.
    """

    alpha: np.ndarray = field(default_factory=lambda: np.ones((2, 3), dtype=complex))

    def __post_init__(self):
        al = np.array(self.alpha, dtype=complex).reshape(2, 3)
        if not np.all(np.isfinite(al)) or np.any(al == 0):
            raise InvalidParameterError("every alpha_{eps,h} must be finite and nonzero")
        al.setflags(write=False)
        object.__setattr__(self, "alpha", al)

    @classmethod
    def ones(cls) -> "MetricParams":
        return cls()

    @classmethod
    def from_values(cls, values) -> "MetricParams":
        """Six values ordered (+,+1), (+,-1), (+,0), (-,+1), (-,-1), (-,0)."""
        values = list(values)
        if len(values) != 6:
            raise InvalidParameterError("exactly six alpha values are required")
        return cls(np.array(values, dtype=complex).reshape(2, 3))

    @classmethod
    def from_a(cls, a) -> "MetricParams":
        """Real positive ``alpha = sqrt(a)`` for six given ``a`` values."""
        a = np.asarray(a, dtype=float).reshape(6)
        if np.any(a <= 0):
            raise InvalidParameterError("a_{eps,h} must be positive")
        return cls.from_values(np.sqrt(a))

    @classmethod
    def random(cls, rng) -> "MetricParams":
        mag = np.exp(rng.uniform(-0.7, 0.7, size=6))
        ph = rng.uniform(0, 2 * np.pi, size=6)
        return cls.from_values(mag * np.exp(1j * ph))

    @property
    def a(self) -> np.ndarray:
        return np.abs(self.alpha) ** 2

    def a_of(self, eps: int, h: int) -> float:
        return float(self.a[eps_index(eps), hel_index(h)])

    def is_unit(self) -> bool:
        return bool(np.allclose(self.a, 1.0, rtol=0, atol=1e-15))

    # helicity/chirality combinations ------------------------------------
    def Z(self, eps: int, sign: int) -> complex:
        al = self.alpha[eps_index(eps)]
        return 0.5 * (al[0] + sign * al[1])

    def Z_tilde(self, eps: int, sign: int) -> complex:
        al = self.alpha[eps_index(eps)]
        return 0.5 * (1 / al[0] + sign / al[1])

    def F(self, sup: int, sub: int) -> complex:
        return 0.5 * (self.Z(1, sup) + sub * self.Z(-1, sup))

    def F0(self, sub: int) -> complex:
        return 0.5 * (self.alpha[0, 2] + sub * self.alpha[1, 2])

    def L(self, sup: int, sub: int) -> float:
        a = self.a
        return 0.25 * (a[0, 0] + sup * a[0, 1] + sub * a[1, 0] + sub * sup * a[1, 1])

    def L0(self, sub: int) -> float:
        a = self.a
        return 0.5 * (a[0, 2] + sub * a[1, 2])


@dataclass(frozen=True)
class ModeMatrixSet:
    """All operator matrices at one momentum."""

    k: np.ndarray
    cfg: PhysicsConfig
    omega: float
    S: np.ndarray
    h: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    H: np.ndarray
    eta_plus: np.ndarray
    eta_plus_inv: np.ndarray
    rho: np.ndarray
    rho_inv: np.ndarray

    @property
    def S1(self):
        return self.S[0]

    @property
    def S2(self):
        return self.S[1]

    @property
    def S3(self):
        return self.S[2]

    @staticmethod
    def Sigma(m: int):
        return sigma(m)

    @property
    def Lambda(self):
        return sigma(0, self.h)


def _mode_blocks(k, cfg):
    M, g = cfg.M, cfg.gamma
    kS = k_dot_S(k)
    kS2 = kS @ kS
    D = omega(k, M) ** 2
    Dm = D[..., None, None]
    H1 = g * (M * M * _I3 + kS2) + (Dm * _I3 - kS2) / (g * M * M)
    H2 = g * (M * M * _I3 + kS2) - (Dm * _I3 - kS2) / (g * M * M)
    return H1, H2, D


def _rho_blocks(k, cfg):
    M, g = cfg.M, cfg.gamma
    h = helicity_matrix(k)
    h2 = h @ h
    D = omega(k, M)[..., None, None] ** 2
    q, qi = D ** 0.25, D ** -0.25
    rp = (g * M - 1) * (q - M * qi) * h2 + (g * M * M * qi + q) * _I3
    rm = (g * M + 1) * (q - M * qi) * h2 + (g * M * M * qi - q) * _I3
    return rp, rm


def _block(a, b, c, d):
    return np.block([[a, b], [c, d]])


def mode_matrices(k, cfg: PhysicsConfig) -> ModeMatrixSet:
    """Hamiltonian, metric, square root and helicity at a single momentum.

    Examples
    --------
    >>> mm = mode_matrices([0, 0, 1], PhysicsConfig())
    >>> np.allclose(mm.H1, 3 * np.eye(3))
    True
    """
    k = _check_k(np.array(k, dtype=float).reshape(3))
    H1, H2, D = _mode_blocks(k, cfg)
    w = float(np.sqrt(D))
    H = 0.5 * _block(H1, H2, -H2, -H1)
    eta = 0.5 / w * _block(H1, H2, H2, H1)
    eta_inv = 0.5 / w * _block(H1, -H2, -H2, H1)
    rp, rm = _rho_blocks(k, cfg)
    c = 1.0 / (2 * cfg.M * np.sqrt(cfg.gamma))
    return ModeMatrixSet(
        k=k, cfg=cfg, omega=w, S=SPIN.copy(), h=helicity_matrix(k), H1=H1, H2=H2, H=H,
        eta_plus=eta, eta_plus_inv=eta_inv,
        rho=c * _block(rp, rm, rm, rp), rho_inv=c * _block(rp, -rm, -rm, rp),
    )


def _eigvecs(k, cfg):
    """``Psi`` and ``Phi`` arrays of shape (..., 2, 3, 6)."""
    M, g = cfg.M, cfg.gamma
    u = polarization_vectors(k, M)
    w = omega(k, M)
    r = np.sqrt(g * w)[..., None, None, None]
    k4 = np.asarray(k, dtype=float)[..., None, None, :]
    u0 = u[..., :1]
    uv = u[..., 1:]
    e = np.array(EPSILONS, dtype=float)[:, None, None]
    psi = 0.5 * np.concatenate([(1 / r + e * r) * uv - g / r * k4 * u0,
                                (1 / r - e * r) * uv + g / r * k4 * u0], axis=-1)
    phi = 0.5 * np.concatenate([(r + e / r) * uv - e * g / r * k4 * u0,
                                (r - e / r) * uv - e * g / r * k4 * u0], axis=-1)
    return psi, phi


@dataclass(frozen=True)
class Eigensystem:
    """Biorthonormal eigenvectors of ``H`` (``Psi``) and ``H^dagger`` (``Phi``)."""

    Psi: np.ndarray  # (2, 3, 6)
    Phi: np.ndarray
    E: np.ndarray  # (2,)

    def psi(self, eps, h):
        return self.Psi[eps_index(eps), hel_index(h)]

    def phi(self, eps, h):
        return self.Phi[eps_index(eps), hel_index(h)]

    def matrix(self, which="Psi"):
        """Columns ordered as ``LABELS``."""
        arr = self.Psi if which == "Psi" else self.Phi
        return arr.reshape(6, 6).T


def eigensystem(k, cfg: PhysicsConfig) -> Eigensystem:
    k = _check_k(np.array(k, dtype=float).reshape(3))
    psi, phi = _eigvecs(k, cfg)
    w = float(omega(k, cfg.M))
    return Eigensystem(Psi=psi, Phi=phi, E=np.array([w, -w]))


def foldy_hamiltonian(k, cfg: PhysicsConfig, check: bool = True, tol: float = 1e-11):
    """``rho H rho^{-1}``, which is diagonal: ``omega Sigma_3``.

    With ``check`` the equality with ``omega Sigma_3`` is asserted.
    """
    mm = mode_matrices(k, cfg)
    out = mm.rho @ mm.H @ mm.rho_inv
    if check:
        scale = max(1.0, mm.omega)
        if np.abs(out - mm.omega * sigma(3)).max() > tol * scale:
            raise AssertionError("rho H rho^-1 differs from omega Sigma_3")
    return out


@dataclass(frozen=True)
class GeneralMetric:
    eta_tilde: np.ndarray
    A_op: np.ndarray
    A_inv: np.ndarray
    rho_tilde: np.ndarray
    rho_tilde_inv: np.ndarray


def _MN(k, cfg):
    M, g = cfg.M, cfg.gamma
    D = float(omega(k, M)) ** 2
    c = D ** -0.5 / (2 * g)
    Mm = c * _block((g * g * D + 1) * _I3, (g * g * D - 1) * _I3, (g * g * D - 1) * _I3, (g * g * D + 1) * _I3)
    c = D ** -0.5 / (2 * g * M * M)
    G4 = g * g * M ** 4
    Nm = c * _block((G4 + D) * _I3, (G4 - D) * _I3, (G4 - D) * _I3, (G4 + D) * _I3)
    return Mm, Nm


def general_metric(k, cfg: PhysicsConfig, params: MetricParams, check: bool = True, tol: float = 1e-10) -> GeneralMetric:
    """Member of the metric family labelled by ``params``.

    ``A_op`` and ``eta_tilde`` are assembled from the helicity-polynomial
    formulas; with ``check`` they are compared with the spectral forms
    ``sum alpha |Psi><Phi|`` and ``sum a |Phi><Phi|``.
    """
    k = _check_k(np.array(k, dtype=float).reshape(3))
    mm = mode_matrices(k, cfg)
    M, g = cfg.M, cfg.gamma
    Mm, Nm = _MN(k, cfg)
    S3 = sigma(3)
    I6 = np.eye(6)
    hh = sigma(0, mm.h)
    hh2 = hh @ hh
    p = params
    A = ((p.F(1, -1) * S3 @ Mm - p.F0(-1) * S3 @ Nm + (p.F(1, 1) - p.F0(1)) * I6) @ hh2
         + (p.F(-1, -1) * S3 @ Mm + p.F(-1, 1) * I6) @ hh + p.F0(-1) * S3 @ Nm + p.F0(1) * I6)
    eta_t = ((p.L(1, 1) * Mm + (p.L(1, -1) - p.L0(-1)) * S3 - p.L0(1) * Nm) @ hh2
             + (p.L(-1, 1) * Mm + p.L(-1, -1) * S3) @ hh + p.L0(1) * Nm + p.L0(-1) * S3)
    es = eigensystem(k, cfg)
    Psi, Phi = es.matrix("Psi"), es.matrix("Phi")
    al = p.alpha.reshape(6)
    A_inv = (Psi / al) @ Phi.conj().T
    # rho~ = rho A in closed form
    D = mm.omega ** 2
    q, qi = D ** 0.25, D ** -0.25
    h, h2 = mm.h, mm.h @ mm.h

    def rt(e, ep):
        a0 = p.alpha[eps_index(ep), 2]
        return (M * (g * q + e * qi) * (p.Z(ep, 1) * h2 + p.Z(ep, -1) * h)
                + a0 * (g * M * M * qi + e * q) * (_I3 - h2))

    c = 1.0 / (2 * M * np.sqrt(g))
    rho_t = c * _block(rt(1, 1), rt(-1, 1), rt(-1, -1), rt(1, -1))
    rho_t_inv = A_inv @ mm.rho_inv
    if check:
        A_spec = (Psi * al) @ Phi.conj().T
        eta_spec = (Phi * p.a.reshape(6)) @ Phi.conj().T
        scale = max(1.0, np.abs(eta_spec).max())
        if (np.abs(A - A_spec).max() > tol * max(1.0, np.abs(A_spec).max())
                or np.abs(eta_t - eta_spec).max() > tol * scale
                or np.abs(rho_t - mm.rho @ A_spec).max() > tol * max(1.0, np.abs(rho_t).max())):
            raise AssertionError("general metric closed forms disagree with spectral forms")
    return GeneralMetric(eta_tilde=eta_t, A_op=A, A_inv=A_inv, rho_tilde=rho_t, rho_tilde_inv=rho_t_inv)


@dataclass(frozen=True)
class SymmetryMatrices:
    P: np.ndarray
    C: np.ndarray
    PT_action: str = ("PT acts antilinearly: complex conjugation of six-component vectors "
                      "combined with k -> -k; the mode Hamiltonian is real so PT commutes with H")


def symmetry_matrices(k, cfg: PhysicsConfig) -> SymmetryMatrices:
    """Parity ``P = Sigma_3`` and chirality ``C = H / omega``."""
    mm = mode_matrices(k, cfg)
    return SymmetryMatrices(P=sigma(3), C=mm.H / mm.omega)


def case_spin_matrix(k, cfg: PhysicsConfig, check: bool = True, tol: float = 1e-11):
    """Components ``rho^{-1} (sigma_0 (x) S_i) rho``, shape ``(3, 6, 6)``.

    With ``check`` each is compared with the explicit helicity formula.
    """
    mm = mode_matrices(k, cfg)
    prod = np.array([mm.rho_inv @ sigma(0, SPIN[i]) @ mm.rho for i in range(3)])
    if check:
        k = mm.k
        M = cfg.M
        w = mm.omega
        kS = k_dot_S(k)
        kxS = k_cross_S(k)
        form = np.array([
            sigma(0, (w * w + M * M) / (2 * M * w) * SPIN[i] - (w - M) / (2 * M * w * (w + M)) * k[i] * kS)
            + 1j / (2 * M * w) * sigma(1, kS @ kxS[i] + kxS[i] @ kS)
            for i in range(3)
        ])
        if np.abs(form - prod).max() > tol * max(1.0, np.abs(form).max()):
            raise AssertionError("Case spin formula disagrees with rho-conjugated spin")
    return prod


def theta_matrices(k, params: MetricParams):
    """``Theta_{+,0}`` and ``Theta_{-,0}``, shape ``(..., 3, 3)`` each."""
    h = helicity_matrix(k)
    h2 = h @ h
    out = []
    for sub in (1, -1):
        out.append((params.L(1, sub) - params.L0(sub)) * h2 + params.L(-1, sub) * h + params.L0(sub) * _I3)
    return out[0], out[1]
