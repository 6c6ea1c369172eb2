"""Proca field representations, evolution and conversions.

Two concrete representations share one internal interface:

``DiscreteModeField``
    A finite set of distinct momenta with helicity-basis coefficients.
``GridField``
    Cartesian amplitudes on an ``N^3`` momentum lattice offset by half a
    spacing, which supports spectral position operators.

Both expose ``momenta()`` with shape ``(n, 3)`` and ``amplitudes()`` with
shape ``(n, 2, 4)``: the four-vector amplitude ``V_eps(k)`` such that

    A(x0, x) = sum_k sum_eps V_eps(k) exp(-i eps omega_k x0) phi_k(x),
    phi_k(x) = (2 pi)^{-3/2} exp(i k.x).

Spatial integrals of products of plane waves are evaluated with the
Kronecker convention: ``int phi_k^* phi_k' = delta_{k k'}``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DegenerateMomentumError, DomainError, IncompatibleFieldsError, ParseError, RepresentationError
from .mode_algebra import (EPSILONS, HELICITIES, MINKOWSKI, MetricParams, PhysicsConfig, eps_index, hel_index,
                           helicity_matrix, k_dot_S, omega, polarization_vectors)

__all__ = [
    "DiscreteModeField", "GridField", "Lattice", "FieldInitialData", "PlaneWaveSum",
    "plane_wave_sum", "evaluate", "evolve", "to_six_component", "from_six_component",
    "chirality_split", "helicity_split", "helicity_projectors", "lorentz_residual",
    "aligned_amplitudes", "project_coefficients", "write_field_file", "read_field_file", "FIELD_FILE_MAGIC",
]

_EPS = np.array(EPSILONS, dtype=float)
_PHI_NORM = (2 * np.pi) ** -1.5


def _amp_from_spatial(k, V3, M):
    """Complete spatial amplitudes ``(n, 2, 3)`` with the time component."""
    w = omega(k, M)
    V0 = np.einsum("ni,nei->ne", k, V3) / (_EPS[None, :] * w[:, None])
    return np.concatenate([V0[..., None], V3], axis=-1)


def project_coefficients(k, V, M):
    """Helicity-basis components ``conj(u) . eta . V`` (shape (n, 2, 3))."""
    u = polarization_vectors(k, M)
    return np.einsum("nehm,m,nem->neh", u.conj(), np.diag(MINKOWSKI), V)


class _FieldBase:
    """Shared behaviour; subclasses supply amplitudes and reconstruction."""

    cfg: PhysicsConfig

    def momenta(self) -> np.ndarray:
        raise NotImplementedError

    def amplitudes(self) -> np.ndarray:
        raise NotImplementedError

    def with_amplitudes(self, V) -> "_FieldBase":
        raise NotImplementedError

    def omegas(self):
        return omega(self.momenta(), self.cfg.M)

    def spatial_amplitudes(self):
        return self.amplitudes()[..., 1:]

    def coefficients(self) -> np.ndarray:
        """Helicity coefficients times normalization, ``c N`` (n, 2, 3)."""
        return project_coefficients(self.momenta(), self.amplitudes(), self.cfg.M)

    def mode_arrays_at(self, x0: float):
        """Spatial ``A(k, x0)`` and ``dA/dx0`` per chirality, shapes (n, 2, 3) and (n, 2, 4).

        Returns
        -------
        V_t : ndarray (n, 2, 4)
            ``V_eps exp(-i eps omega x0)``.
        w : ndarray (n,)
        """
        V = self.amplitudes()
        w = self.omegas()
        ph = np.exp(-1j * _EPS[None, :] * w[:, None] * x0)
        return V * ph[..., None], w

    def map_spatial(self, fn):
        """New field with spatial amplitudes ``fn(k, V3)`` (time part recomputed)."""
        k = self.momenta()
        V3 = fn(k, self.spatial_amplitudes())
        return self.with_amplitudes(_amp_from_spatial(k, V3, self.cfg.M))

    def scale_modes(self, factors):
        """Multiply ``V_eps(k)`` by ``factors`` of shape (n, 2)."""
        return self.with_amplitudes(self.amplitudes() * np.asarray(factors)[..., None])

    def __add__(self, other):
        return _combine(self, other, 1.0)

    def __sub__(self, other):
        return _combine(self, other, -1.0)

    def __mul__(self, s):
        return self.with_amplitudes(self.amplitudes() * complex(s))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def is_zero(self) -> bool:
        return not np.any(self.amplitudes())


# --------------------------------------------------------------------------
# Discrete modes
# --------------------------------------------------------------------------

def _relativistic_norm(cfg, params):
    params = params or MetricParams.ones()
    return np.sqrt(2 * cfg.M / (cfg.kappa * params.a))


class DiscreteModeField(_FieldBase):
    """Finite superposition of definite-helicity plane-wave solutions.

    Parameters
    ----------
    cfg : PhysicsConfig
    k : array_like, shape (n, 3)
        Distinct, nonzero momenta.
    c : array_like, shape (n, 2, 3)
        Coefficients ``c_{eps,h}(k)`` in ``EPSILONS x HELICITIES`` order.
    normalization : {"unit", "relativistic", "custom"}
        ``unit`` sets ``N = 1``; ``relativistic`` uses
        ``|N|^2 = 2M / (kappa a_{eps,h})`` (requires ``norm_params`` unless
        all ``a = 1``); ``custom`` takes ``norm`` verbatim.
    """

    def __init__(self, cfg: PhysicsConfig, k, c, normalization: str = "unit", norm=None,
                 norm_params: MetricParams | None = None):
        k = np.array(k, dtype=float).reshape(-1, 3)
        c = np.array(c, dtype=complex).reshape(len(k), 2, 3)
        if np.any(np.linalg.norm(k, axis=1) == 0):
            raise DegenerateMomentumError("fields may not contain a k = 0 mode")
        if len({tuple(r) for r in k.tolist()}) != len(k):
            raise RepresentationError("mode momenta must be pairwise distinct")
        if normalization == "unit":
            N = np.ones((len(k), 2, 3))
        elif normalization == "relativistic":
            N = np.broadcast_to(_relativistic_norm(cfg, norm_params), (len(k), 2, 3)).astype(complex)
        elif normalization == "custom":
            if norm is None:
                raise DomainError("custom normalization requires norm")
            N = np.array(norm, dtype=complex).reshape(len(k), 2, 3)
            if np.any(N == 0):
                raise DomainError("normalization constants must be nonzero")
        else:
            raise DomainError(f"unknown normalization {normalization!r}")
        self.cfg = cfg
        self.k = k
        self.c = c
        self.norm = np.array(N, dtype=complex)
        self.normalization = normalization
        self.norm_params = norm_params if normalization == "relativistic" else None
        for arr in (self.k, self.c, self.norm):
            arr.setflags(write=False)

    # construction helpers -------------------------------------------------
    @classmethod
    def basis_mode(cls, cfg, k, eps, h, c=1.0, **kw):
        """Single ``(eps, h, k)`` basis solution with coefficient ``c``."""
        coeff = np.zeros((1, 2, 3), dtype=complex)
        coeff[0, eps_index(eps), hel_index(h)] = c
        return cls(cfg, [k], coeff, **kw)

    @classmethod
    def random(cls, cfg, rng, n_modes=3, k_scale=1.0, positive_only=False, **kw):
        k = rng.normal(scale=k_scale, size=(n_modes, 3))
        c = rng.normal(size=(n_modes, 2, 3)) + 1j * rng.normal(size=(n_modes, 2, 3))
        if positive_only:
            c[:, 1] = 0
        return cls(cfg, k, c, **kw)

    # interface ---------------------------------------------------------------
    def momenta(self):
        return self.k

    @cached_property
    def _u(self):
        return polarization_vectors(self.k, self.cfg.M)

    def amplitudes(self):
        return np.einsum("nehm,neh->nem", self._u, self.c * self.norm)

    def coefficients(self):
        return self.c * self.norm

    def with_amplitudes(self, V):
        V = np.asarray(V, dtype=complex)
        cn = np.einsum("nehm,m,nem->neh", self._u.conj(), np.diag(MINKOWSKI), V)
        return self.with_coefficients(cn / self.norm)

    def with_coefficients(self, c):
        return DiscreteModeField(self.cfg, self.k, c, normalization="custom", norm=self.norm)._relabel(self)

    def _relabel(self, like):
        self.normalization = like.normalization
        self.norm_params = like.norm_params
        return self

    def __repr__(self):
        return f"DiscreteModeField(n_modes={len(self.k)}, normalization={self.normalization!r})"


# --------------------------------------------------------------------------
# Lattice fields
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    """Cubic momentum lattice ``k_j = (j - N/2 + 1/2) dk`` and its dual position grid.

    The dual grid is ``x_m = (m - N/2) dx`` with ``dx = 2 pi / (N dk)``; the
    unitary ``W[m, j] = exp(i k_j x_m) / sqrt(N)`` maps momentum samples to
    position samples along one axis.
    """

    n: int = 32
    dk: float = 0.1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2 or self.n % 2:
            raise DomainError("lattice size N must be an even integer >= 2")
        if not self.dk > 0:
            raise DomainError("lattice spacing must be positive")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "dk", float(self.dk))

    @property
    def k_axis(self):
        return (np.arange(self.n) - self.n / 2 + 0.5) * self.dk

    @property
    def dx(self):
        return 2 * np.pi / (self.n * self.dk)

    @property
    def x_axis(self):
        return (np.arange(self.n) - self.n / 2) * self.dx

    @cached_property
    def k_grid(self):
        a = self.k_axis
        return np.stack(np.meshgrid(a, a, a, indexing="ij"), axis=-1)

    @cached_property
    def W(self):
        return np.exp(1j * np.outer(self.x_axis, self.k_axis)) / np.sqrt(self.n)

    @cached_property
    def X1(self):
        """Position operator on one axis in the momentum representation."""
        W = self.W
        return W.conj().T @ (self.x_axis[:, None] * W)

    @cached_property
    def D1(self):
        """Spectral ``d/dx`` on position samples of one axis."""
        W = self.W
        return W @ (1j * self.k_axis[:, None] * W.conj().T)

    def apply_axis(self, mat, arr, axis):
        """Apply an ``n x n`` matrix along lattice ``axis`` (0, 1, 2) of ``arr[..., N, N, N, c]``."""
        ax = arr.ndim - 4 + axis
        out = np.tensordot(mat, arr, axes=([1], [ax]))
        return np.moveaxis(out, 0, ax)

    def position(self, arr, axis):
        return self.apply_axis(self.X1, arr, axis)

    def to_position(self, arr):
        for ax in range(3):
            arr = self.apply_axis(self.W, arr, ax)
        return arr

    def to_momentum(self, arr):
        Wh = self.W.conj().T
        for ax in range(3):
            arr = self.apply_axis(Wh, arr, ax)
        return arr


class GridField(_FieldBase):
    """Lattice field with spatial amplitudes ``V[eps, i, j, l, :]``.

    The time component of each amplitude is implied by the Lorentz
    condition. Helicity coefficients are available through
    :meth:`helicity_coefficients` (unit normalization).
    """

    def __init__(self, cfg: PhysicsConfig, lattice: Lattice, V):
        n = lattice.n
        V = np.array(V, dtype=complex)
        if V.shape != (2, n, n, n, 3):
            raise DomainError(f"grid amplitudes must have shape (2, {n}, {n}, {n}, 3), got {V.shape}")
        V.setflags(write=False)
        self.cfg = cfg
        self.lattice = lattice
        self.V = V

    @classmethod
    def zeros(cls, cfg, lattice):
        n = lattice.n
        return cls(cfg, lattice, np.zeros((2, n, n, n, 3), dtype=complex))

    @classmethod
    def from_coefficients(cls, cfg, lattice, c):
        """``c`` of shape (2, 3, N, N, N) in ``EPSILONS x HELICITIES`` order."""
        kg = lattice.k_grid.reshape(-1, 3)
        u = polarization_vectors(kg, cfg.M)
        c = np.asarray(c, dtype=complex).reshape(2, 3, -1)
        V = np.einsum("nehm,ehn->enm", u[..., 1:], c)
        n = lattice.n
        return cls(cfg, lattice, V.reshape(2, n, n, n, 3))

    def momenta(self):
        return self.lattice.k_grid.reshape(-1, 3)

    def amplitudes(self):
        V3 = np.moveaxis(self.V.reshape(2, -1, 3), 0, 1)
        return _amp_from_spatial(self.momenta(), V3, self.cfg.M)

    def spatial_amplitudes(self):
        return np.moveaxis(self.V.reshape(2, -1, 3), 0, 1)

    def with_amplitudes(self, V):
        n = self.lattice.n
        V3 = np.moveaxis(np.asarray(V)[..., 1:], 1, 0).reshape(2, n, n, n, 3)
        return GridField(self.cfg, self.lattice, V3)

    def with_V(self, V3):
        return GridField(self.cfg, self.lattice, V3)

    def map_spatial(self, fn):
        k = self.momenta()
        V3 = fn(k, self.spatial_amplitudes())
        n = self.lattice.n
        return GridField(self.cfg, self.lattice, np.moveaxis(V3, 1, 0).reshape(2, n, n, n, 3))

    def helicity_coefficients(self):
        """Shape (2, 3, N, N, N)."""
        c = self.coefficients()
        n = self.lattice.n
        return np.moveaxis(c, 0, -1).reshape(2, 3, n, n, n)

    def __repr__(self):
        return f"GridField(N={self.lattice.n}, dk={self.lattice.dk})"


def _combine(a, b, sign):
    if a.cfg != b.cfg:
        raise IncompatibleFieldsError("fields have different physics configurations")
    if isinstance(a, GridField) or isinstance(b, GridField):
        if not (isinstance(a, GridField) and isinstance(b, GridField)) or a.lattice != b.lattice:
            raise IncompatibleFieldsError("grid fields must share a lattice")
        return GridField(a.cfg, a.lattice, a.V + sign * b.V)
    k, VA, VB = aligned_amplitudes(a, b)
    keys = {tuple(r) for r in a.k.tolist()}
    if len(keys) == len(k):  # mode sets coincide or b is a subset
        return a.with_amplitudes(VA + sign * VB)
    out = DiscreteModeField(a.cfg, k, np.zeros((len(k), 2, 3)))
    return out.with_amplitudes(VA + sign * VB)


def aligned_amplitudes(a, b):
    """Amplitudes of two fields on the union of their momenta.

    Returns
    -------
    k : ndarray (n, 3)
    Va, Vb : ndarray (n, 2, 4)
        Zero where a field has no mode.
    """
    if a.cfg != b.cfg:
        raise IncompatibleFieldsError("fields have different physics configurations")
    if isinstance(a, GridField) or isinstance(b, GridField):
        if not (isinstance(a, GridField) and isinstance(b, GridField)) or a.lattice != b.lattice:
            raise IncompatibleFieldsError("grid fields must share a lattice")
        return a.momenta(), a.amplitudes(), b.amplitudes()
    ka, kb = a.momenta(), b.momenta()
    if ka.shape == kb.shape and np.array_equal(ka, kb):
        return ka, a.amplitudes(), b.amplitudes()
    index = {tuple(r): i for i, r in enumerate(ka.tolist())}
    extra = [r for r in kb.tolist() if tuple(r) not in index]
    k = np.concatenate([ka, np.array(extra).reshape(-1, 3)])
    for r in extra:
        index[tuple(r)] = len(index)
    Va = np.zeros((len(k), 2, 4), dtype=complex)
    Vb = np.zeros_like(Va)
    Va[: len(ka)] = a.amplitudes()
    Vb[[index[tuple(r)] for r in kb.tolist()]] = b.amplitudes()
    return k, Va, Vb


# --------------------------------------------------------------------------
# Pointwise evaluation
# --------------------------------------------------------------------------

class PlaneWaveSum:
    """``F(t, x) = sum_a amp_a exp(i (k_a . x - Om_a t))`` with tensor-valued amplitudes.

    Derivatives are exact: they multiply amplitudes by ``-i Om`` or ``i k``.
    """

    def __init__(self, amps, Om, k):
        self.amps = np.asarray(amps, dtype=complex)
        self.Om = np.asarray(Om, dtype=float)
        self.k = np.asarray(k, dtype=float)

    @property
    def shape(self):
        return self.amps.shape[1:]

    def scaled(self, factors):
        """Multiply each term by a per-term array broadcast against the amplitude."""
        f = np.asarray(factors)
        f = f.reshape(f.shape + (1,) * (self.amps.ndim - f.ndim))
        return PlaneWaveSum(self.amps * f, self.Om, self.k)

    def apply(self, mats):
        """Per-term matrix action on the last amplitude axis: ``mats`` is (n, p, q)."""
        return PlaneWaveSum(np.einsum("npq,n...q->n...p", mats, self.amps), self.Om, self.k)

    def d_lower(self, mu):
        """``partial_mu`` (lower index)."""
        if mu == 0:
            return self.scaled(-1j * self.Om)
        return self.scaled(1j * self.k[:, mu - 1])

    def d_upper(self, mu):
        """``partial^mu``; raising the time index flips its sign."""
        return self.d_lower(mu) * (-1.0 if mu == 0 else 1.0)

    def __mul__(self, s):
        return PlaneWaveSum(self.amps * s, self.Om, self.k)

    def __call__(self, t, x, chunk=2_000_000):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = x.reshape(-1, 3)
        t = np.broadcast_to(np.asarray(t, dtype=float), (len(x),))
        flat = self.amps.reshape(len(self.amps), int(np.prod(self.shape)))
        out = np.empty((len(x), flat.shape[1]), dtype=complex)
        step = max(1, chunk // max(1, len(self.Om)))
        for s in range(0, len(x), step):
            ph = np.exp(1j * (x[s:s + step] @ self.k.T - np.outer(t[s:s + step], self.Om)))
            out[s:s + step] = ph @ flat
        out = out.reshape((len(x),) + self.shape)
        return out[0] if single else out


def plane_wave_sum(field, part="four", drop_zero=True) -> PlaneWaveSum:
    """Plane-wave expansion of a field including the ``(2 pi)^{-3/2}`` factor.

    ``part`` selects the four-vector (``"four"``) or the spatial part
    (``"spatial"``). Term ``a`` carries chirality ``sign(Om_a)``.
    """
    k = field.momenta()
    w = field.omegas()
    V = field.amplitudes() if part == "four" else field.spatial_amplitudes()
    amps = _PHI_NORM * V.reshape((-1,) + V.shape[2:])
    Om = (w[:, None] * _EPS[None, :]).reshape(-1)
    kk = np.repeat(k, 2, axis=0)
    if drop_zero:
        keep = np.any(amps != 0, axis=tuple(range(1, amps.ndim)))
        amps, Om, kk = amps[keep], Om[keep], kk[keep]
    return PlaneWaveSum(amps, Om, kk)


def evaluate(field, x0, x):
    """Four-vector ``A^mu(x0, x)`` at one point (shape (4,)) or many (shape (m, 4))."""
    return plane_wave_sum(field)(x0, x)


def lorentz_residual(field, x0, x):
    """``dA^0/dx0 + div A`` at the given points (exact mode differentiation)."""
    pw = plane_wave_sum(field)
    dt = pw.d_lower(0)(x0, x)[..., 0]
    div = sum(pw.d_lower(i)(x0, x)[..., i] for i in (1, 2, 3))
    return dt + div


# --------------------------------------------------------------------------
# Evolution and initial data
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldInitialData:
    """Mode-expanded initial data ``(A^0, dA^0, A, dA)`` at time ``x0_0``.

    ``template`` records the representation used to rebuild a field.
    """

    x0_0: float
    k: np.ndarray
    A0: np.ndarray
    A0dot: np.ndarray
    Avec: np.ndarray
    Avecdot: np.ndarray
    cfg: PhysicsConfig
    template: object = None

    @classmethod
    def from_field(cls, field, x0_0=0.0):
        Vt, w = field.mode_arrays_at(x0_0)
        dVt = Vt * (-1j * _EPS[None, :, None] * w[:, None, None])
        A, dA = Vt.sum(axis=1), dVt.sum(axis=1)
        return cls(float(x0_0), field.momenta(), A[:, 0], dA[:, 0], A[:, 1:], dA[:, 1:], field.cfg, field)

    def constraint_residual(self):
        """Relative size of ``dA^0 + i k.A`` and of its time derivative."""
        w2 = omega(self.k, self.cfg.M) ** 2
        r1 = self.A0dot + 1j * np.einsum("ni,ni->n", self.k, self.Avec)
        # second time derivative of A^0 follows from the wave equation
        r2 = -w2 * self.A0 + 1j * np.einsum("ni,ni->n", self.k, self.Avecdot)
        scale = max(np.abs(self.A0dot).max(initial=0), np.abs(self.k[:, :, None] * self.Avec[:, None, :]).max(initial=0),
                    np.abs(w2 * self.A0).max(initial=0), 1e-300)
        return float(max(np.abs(r1).max(initial=0), np.abs(r2).max(initial=0)) / scale)

    def evolve(self, dt):
        """Cos/sin propagator: data at ``x0_0 + dt``."""
        w = omega(self.k, self.cfg.M)
        c, s = np.cos(w * dt), np.sin(w * dt)

        def prop(a, ad):
            cc = c.reshape((-1,) + (1,) * (a.ndim - 1))
            ss = s.reshape(cc.shape)
            ww = w.reshape(cc.shape)
            return cc * a + ss / ww * ad, -ww * ss * a + cc * ad

        A0, A0d = prop(self.A0, self.A0dot)
        A, Ad = prop(self.Avec, self.Avecdot)
        return FieldInitialData(self.x0_0 + dt, self.k, A0, A0d, A, Ad, self.cfg, self.template)

    def to_field(self, template=None):
        """Rebuild a field of the template's representation."""
        template = template if template is not None else self.template
        if template is None:
            template = DiscreteModeField(self.cfg, self.k, np.zeros((len(self.k), 2, 3)))
        w = omega(self.k, self.cfg.M)
        A4 = np.concatenate([self.A0[:, None], self.Avec], axis=1)
        dA4 = np.concatenate([self.A0dot[:, None], self.Avecdot], axis=1)
        V = np.stack([0.5 * (A4 + 1j * e * dA4 / w[:, None]) * np.exp(1j * e * w * self.x0_0)[:, None]
                      for e in EPSILONS], axis=1)
        return template.with_amplitudes(V)


def evolve(field, dx0: float):
    """Time translation: the returned field at time ``t`` equals ``field`` at ``t + dx0``.

    ``FieldInitialData`` is propagated with the cos/sin form instead.
    """
    if isinstance(field, FieldInitialData):
        return field.evolve(dx0)
    w = field.omegas()
    return field.scale_modes(np.exp(-1j * _EPS[None, :] * w[:, None] * dx0))


# --------------------------------------------------------------------------
# Six-component form
# --------------------------------------------------------------------------

def _E_from_Adot(k, Adot, M):
    kS = k_dot_S(k)
    D = omega(k, M) ** 2
    mat = (M * M * np.eye(3) + kS @ kS) / D[:, None, None]
    return -np.einsum("nij,nj->ni", mat, Adot)


def _Adot_from_E(k, E, M):
    h = helicity_matrix(k)
    h2 = h @ h
    D = omega(k, M) ** 2
    inv = h2 + (np.eye(3) - h2) * (D / (M * M))[:, None, None]
    return -np.einsum("nij,nj->ni", inv, E)


def to_six_component(field, x0=0.0):
    """Per-mode six-component vectors ``(A - i gamma E, A + i gamma E)``, shape (n, 6)."""
    data = FieldInitialData.from_field(field, x0)
    E = _E_from_Adot(data.k, data.Avecdot, field.cfg.M)
    g = field.cfg.gamma
    return np.concatenate([data.Avec - 1j * g * E, data.Avec + 1j * g * E], axis=1)


def from_six_component(psi, k, cfg: PhysicsConfig, x0=0.0, template=None):
    """Left inverse of :func:`to_six_component`."""
    psi = np.asarray(psi, dtype=complex).reshape(-1, 6)
    k = np.asarray(k, dtype=float).reshape(-1, 3)
    A = 0.5 * (psi[:, :3] + psi[:, 3:])
    E = (psi[:, 3:] - psi[:, :3]) / (2j * cfg.gamma)
    Ad = _Adot_from_E(k, E, cfg.M)
    w = omega(k, cfg.M)
    V3 = np.stack([0.5 * (A + 1j * e * Ad / w[:, None]) * np.exp(1j * e * w * x0)[:, None] for e in EPSILONS], axis=1)
    V = _amp_from_spatial(k, V3, cfg.M)
    if template is None:
        template = DiscreteModeField(cfg, k, np.zeros((len(k), 2, 3)))
    return template.with_amplitudes(V)


# --------------------------------------------------------------------------
# Splits
# --------------------------------------------------------------------------

def chirality_split(field):
    """``(A_+, A_-)``: keep only one sign of frequency."""
    mask = np.array([[1.0, 0.0], [0.0, 1.0]])
    n = len(field.momenta())
    return tuple(field.scale_modes(np.broadcast_to(m, (n, 2))) for m in mask)


def helicity_projectors(k):
    """Spectral projectors of ``h(k)`` on eigenvalues (+1, -1, 0), shape (3, n, 3, 3)."""
    h = helicity_matrix(k)
    h2 = h @ h
    return np.stack([0.5 * (h2 + h), 0.5 * (h2 - h), np.eye(3) - h2])


def helicity_split(field):
    """``(A_{+1}, A_{-1}, A_0)`` with respect to the helicity operator."""
    if isinstance(field, DiscreteModeField):
        out = []
        for ih in range(3):
            c = np.zeros_like(field.c)
            c[:, :, ih] = field.c[:, :, ih]
            out.append(field.with_coefficients(c))
        return tuple(out)
    P = helicity_projectors(field.momenta())
    return tuple(field.map_spatial(lambda k, V3, p=p: np.einsum("nij,nej->nei", p, V3)) for p in P)


# --------------------------------------------------------------------------
# Field files
# --------------------------------------------------------------------------

FIELD_FILE_MAGIC = "# procaqm-field v1"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_field_file(field: DiscreteModeField, path):
    """Write a discrete-mode field as structured text (17 significant digits).

    Records hold ``kx ky kz`` then the real and imaginary parts of the six
    coefficients in the order (+,+1), (+,-1), (+,0), (-,+1), (-,-1), (-,0).
    """
    if not isinstance(field, DiscreteModeField):
        raise RepresentationError("only discrete-mode fields can be written to field files")
    if field.normalization == "custom":
        raise RepresentationError("custom normalization constants cannot be stored in a field file")
    buf = io.StringIO()
    buf.write(FIELD_FILE_MAGIC + "\n")
    buf.write(f"M {_fmt(field.cfg.M)}\n")
    buf.write(f"gamma {_fmt(field.cfg.gamma)}\n")
    buf.write(f"kappa {_fmt(field.cfg.kappa)}\n")
    buf.write(f"normalization {field.normalization}\n")
    if field.normalization == "relativistic":
        al = (field.norm_params or MetricParams.ones()).alpha.reshape(6)
        buf.write("alpha " + " ".join(f"{_fmt(a.real)} {_fmt(a.imag)}" for a in al) + "\n")
    buf.write(f"modes {len(field.k)}\n")
    for kv, c in zip(field.k, field.c):
        parts = [_fmt(v) for v in kv]
        for z in c.reshape(6):
            parts += [_fmt(z.real), _fmt(z.imag)]
        buf.write(" ".join(parts) + "\n")
    Path(path).write_text(buf.getvalue())


def read_field_file(path) -> DiscreteModeField:
    """Parse a file written by :func:`write_field_file`.

    Raises
    ------
    ParseError
        With the offending line number on malformed input.
    OSError
        If the file cannot be read.
    """
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != FIELD_FILE_MAGIC:
        raise ParseError(f"{path}: line 1: missing header {FIELD_FILE_MAGIC!r}")
    header = {}
    i = 1
    alpha = None
    try:
        while i < len(lines):
            parts = lines[i].split()
            i += 1
            if not parts or parts[0].startswith("#"):
                continue
            key = parts[0]
            if key in ("M", "gamma", "kappa"):
                header[key] = float(parts[1])
            elif key == "normalization":
                header[key] = parts[1]
            elif key == "alpha":
                vals = [float(v) for v in parts[1:]]
                if len(vals) != 12:
                    raise ParseError(f"{path}: line {i}: alpha needs 12 numbers")
                alpha = [complex(vals[2 * j], vals[2 * j + 1]) for j in range(6)]
            elif key == "modes":
                header[key] = int(parts[1])
                break
            else:
                raise ParseError(f"{path}: line {i}: unknown header key {key!r}")
    except (IndexError, ValueError) as exc:
        raise ParseError(f"{path}: line {i}: {exc}") from exc
    for key in ("M", "gamma", "kappa", "normalization", "modes"):
        if key not in header:
            raise ParseError(f"{path}: missing header entry {key!r}")
    ks, cs = [], []
    for lineno in range(i, len(lines)):
        raw = lines[lineno].strip()
        if not raw or raw.startswith("#"):
            continue
        parts = raw.split()
        if len(parts) != 15:
            raise ParseError(f"{path}: line {lineno + 1}: expected 15 numbers, found {len(parts)}")
        try:
            vals = [float(v) for v in parts]
        except ValueError as exc:
            raise ParseError(f"{path}: line {lineno + 1}: {exc}") from exc
        if not all(math.isfinite(v) for v in vals):
            raise ParseError(f"{path}: line {lineno + 1}: non-finite value")
        ks.append(vals[:3])
        cs.append([complex(vals[3 + 2 * j], vals[4 + 2 * j]) for j in range(6)])
    if len(ks) != header["modes"]:
        raise ParseError(f"{path}: header announces {header['modes']} modes, found {len(ks)}")
    try:
        cfg = PhysicsConfig(header["M"], header["gamma"], header["kappa"])
        params = MetricParams.from_values(alpha) if alpha is not None else None
        return DiscreteModeField(cfg, np.array(ks).reshape(-1, 3), np.array(cs).reshape(-1, 2, 3),
                                 normalization=header["normalization"], norm_params=params)
    except (DomainError, RepresentationError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
