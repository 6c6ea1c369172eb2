"""Lorentz boosts of mode fields and the covariant conserved current.

Boosts act on plane-wave data: a term ``V exp(i p.x)`` with four-momentum
``p = (eps omega, k)`` becomes ``L V exp(i (L p).x)``. Positive and negative
frequency parts of one momentum therefore land on different momenta. Each
discrete mode stands for a unit Kronecker weight, and amplitudes pick up
``sqrt(omega / omega')`` so that single-mode norms stay frame independent.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, RepresentationError
from .fields import EPSILONS, DiscreteModeField, PlaneWaveSum, project_coefficients
from .inner_products import GENERAL, inner
from .mode_algebra import MINKOWSKI, MetricParams, PhysicsConfig, omega, theta_matrices

__all__ = [
    "boost_matrix", "boost_generator", "boost_field", "velocity_addition", "current_J",
    "current_J0", "continuity_residual", "j0_general", "boost_invariance_check", "periodic_box_integral",
    "box_mode_field", "fields_close",
]

_EPS = np.array(EPSILONS, dtype=float)
_PHI_NORM = (2 * np.pi) ** -1.5
_ETA = np.diag(MINKOWSKI)


def _check_beta(beta):
    b = np.asarray(beta, dtype=float).reshape(3)
    if not np.all(np.isfinite(b)) or np.linalg.norm(b) >= 1:
        raise DomainError("boost velocity must satisfy |beta| < 1")
    return b


def boost_matrix(beta) -> np.ndarray:
    """``L`` with ``x' = L x`` for a frame moving with velocity ``beta``."""
    b = _check_beta(beta)
    b2 = b @ b
    L = np.eye(4)
    if b2 == 0:
        return L
    g = 1 / math.sqrt(1 - b2)
    L[0, 0] = g
    L[0, 1:] = L[1:, 0] = -g * b
    L[1:, 1:] += (g - 1) * np.outer(b, b) / b2
    return L


def boost_generator(beta) -> np.ndarray:
    """First-order part: ``x0 -> x0 - beta.x``, ``x -> x - beta x0``."""
    b = np.asarray(beta, dtype=float).reshape(3)
    K = np.zeros((4, 4))
    K[0, 1:] = K[1:, 0] = -b
    return K


def velocity_addition(b1, b2):
    """Collinear composition of two velocities along the same axis."""
    b1, b2 = np.asarray(b1, dtype=float), np.asarray(b2, dtype=float)
    return (b1 + b2) / (1 + b1 @ b2)


def boost_field(field: DiscreteModeField, beta, order: int | None = None) -> DiscreteModeField:
    """Boost a mode field to the frame moving with velocity ``beta``.

    Parameters
    ----------
    field : DiscreteModeField
    beta : array_like, shape (3,)
        ``|beta| < 1``.
    order : {None, 1}
        ``None`` applies the exact finite boost. ``1`` keeps only terms
        linear in ``beta`` (the infinitesimal transformation of ``A`` and
        of the mode weights).

    Returns
    -------
    DiscreteModeField
        Unit-normalized; its modes are the union of the boosted positive-
        and negative-frequency momenta.

    Raises
    ------
    RepresentationError
        When two modes of the same chirality land on the same momentum.
    """
    if not isinstance(field, DiscreteModeField):
        raise RepresentationError("boosts act on DiscreteModeField data")
    b = _check_beta(beta)
    L = boost_matrix(b) if order is None else np.eye(4) + boost_generator(b)
    if order not in (None, 1):
        raise DomainError("order must be None or 1")
    M = field.cfg.M
    k = field.momenta()
    w = field.omegas()
    V = field.amplitudes()
    new_k, new_V, slots = [], [], []
    for ie, e in enumerate(EPSILONS):
        p = np.concatenate([(e * w)[:, None], k], axis=1)
        p2 = p @ L.T
        k2 = p2[:, 1:]
        w2 = omega(k2, M)
        if order is None:
            scale = np.sqrt(w / w2)
        else:
            scale = 1 - 0.5 * (e * p2[:, 0] - w) / w
        keep = np.any(V[:, ie] != 0, axis=1)
        new_k.append(k2[keep])
        new_V.append((V[:, ie] @ L.T * scale[:, None])[keep])
        slots.append(np.full(keep.sum(), ie))
    kk = np.concatenate(new_k)
    VV = np.concatenate(new_V)
    ss = np.concatenate(slots)
    for ie in range(2):
        sub = kk[ss == ie]
        if len({tuple(r) for r in sub.tolist()}) != len(sub):
            raise RepresentationError("two modes collide after the boost")
    uniq, inv = _merge_momenta(kk)
    amps = np.zeros((len(uniq), 2, 4), dtype=complex)
    amps[inv, ss] = VV
    # at first order the amplitude is transverse to k' only up to O(beta^2); projecting drops that part
    return DiscreteModeField(field.cfg, uniq, project_coefficients(uniq, amps, M))


def _merge_momenta(kk, rtol=1e-12):
    """Identify momenta equal up to rounding; returns representatives and the index map."""
    reps, inv = [], np.empty(len(kk), dtype=int)
    for i, k in enumerate(kk):
        for j, r in enumerate(reps):
            if np.linalg.norm(k - r) <= rtol * max(1.0, np.linalg.norm(k)):
                inv[i] = j
                break
        else:
            inv[i] = len(reps)
            reps.append(k)
    return np.array(reps).reshape(-1, 3), inv


def fields_close(a, b, tol=1e-12) -> float:
    """Largest amplitude mismatch after matching modes whose momenta agree to ``tol``.

    Returns ``inf`` when the mode sets differ.
    """
    ka, kb = a.momenta(), b.momenta()
    if len(ka) != len(kb):
        return math.inf
    Va, Vb = a.amplitudes(), b.amplitudes()
    used = np.zeros(len(kb), dtype=bool)
    worst = 0.0
    for i, k in enumerate(ka):
        d = np.linalg.norm(kb - k, axis=1)
        d[used] = np.inf
        j = int(np.argmin(d))
        if d[j] > tol * max(1.0, np.linalg.norm(k)):
            return math.inf
        used[j] = True
        worst = max(worst, float(np.max(np.abs(Va[i] - Vb[j]))))
    return worst


def boost_invariance_check(A, B, beta, params: MetricParams | None = None, kind=None, order=None) -> float:
    """``|(A, B) - (boost A, boost B)|`` for the chosen inner product (default ``GENERAL(params)``)."""
    kind = kind or GENERAL(params)
    before = inner(kind, A, B)
    after = inner(kind, boost_field(A, beta, order), boost_field(B, beta, order))
    return float(abs(before - after))


# --------------------------------------------------------------------------
# Covariant current
# --------------------------------------------------------------------------

def _term_sums(field):
    """Plane-wave sums of ``A`` and ``A_c = i D^{-1/2} dA/dx0`` (four-vectors)."""
    k = field.momenta()
    w = field.omegas()
    V = field.amplitudes()
    amps = _PHI_NORM * V.reshape(-1, 4)
    Om = (w[:, None] * _EPS[None, :]).reshape(-1)
    kk = np.repeat(k, 2, axis=0)
    sgn = np.tile(_EPS, len(k))
    return PlaneWaveSum(amps, Om, kk), PlaneWaveSum(amps * sgn[:, None], Om, kk)


def _jet(P, x0, x, second=False):
    """Value, ``d^nu A^mu`` as [nu][..., mu] and optionally ``d_rho d^nu A^mu``."""
    val = P(x0, x)
    d1 = [P.d_upper(n) for n in range(4)]
    v1 = np.stack([d(x0, x) for d in d1], axis=-2)
    if not second:
        return val, v1
    v2 = np.stack([np.stack([d.d_lower(r)(x0, x) for d in d1], axis=-2) for r in range(4)], axis=-3)
    return val, v1, v2


def current_J(field, x0, x) -> np.ndarray:
    """``J^mu = (i kappa / 2M) (A_nu^* F_c^{nu mu} - F^{nu mu *} A_{c nu})`` at the points, shape (..., 4)."""
    P, Pc = _term_sums(field)
    a, da = _jet(P, x0, x)
    ac, dac = _jet(Pc, x0, x)
    F = da - np.swapaxes(da, -1, -2)
    Fc = dac - np.swapaxes(dac, -1, -2)
    low = lambda v: v * _ETA
    J = np.einsum("...n,...nm->...m", low(a).conj(), Fc) - np.einsum("...nm,...n->...m", F.conj(), low(ac))
    return 0.5j * field.cfg.kappa / field.cfg.M * J


def continuity_residual(field, x0, x) -> np.ndarray:
    """``partial_mu J^mu`` by exact differentiation of both factors."""
    P, Pc = _term_sums(field)
    a, da, dda = _jet(P, x0, x, True)
    ac, dac, ddac = _jet(Pc, x0, x, True)
    F = da - np.swapaxes(da, -1, -2)
    Fc = dac - np.swapaxes(dac, -1, -2)
    dF = dda - np.swapaxes(dda, -1, -2)  # [rho][nu][mu]
    dFc = ddac - np.swapaxes(ddac, -1, -2)
    # d_mu A_nu = eta_nu d_mu A^nu = eta_nu eta_mu d^mu A^nu
    dA_low = da * _ETA[:, None] * _ETA[None, :]
    dAc_low = dac * _ETA[:, None] * _ETA[None, :]
    t1 = np.einsum("...mn,...nm->...", dA_low.conj(), Fc) + np.einsum("...n,...mnm->...", (a * _ETA).conj(), dFc)
    t2 = np.einsum("...mnm,...n->...", dF.conj(), ac * _ETA) + np.einsum("...nm,...mn->...", F.conj(), dAc_low)
    return 0.5j * field.cfg.kappa / field.cfg.M * (t1 - t2)


def _spatial_E(P):
    """Plane-wave sums of ``A``, ``E = -dA/dx0 - grad A^0`` (spatial parts)."""
    A = PlaneWaveSum(P.amps[:, 1:], P.Om, P.k)
    A0 = PlaneWaveSum(P.amps[:, :1], P.Om, P.k)
    E_amps = -A.d_lower(0).amps - np.stack([A0.d_lower(i).amps[:, 0] for i in (1, 2, 3)], axis=1)
    return A, PlaneWaveSum(E_amps, P.Om, P.k)


def current_J0(field, x0, x) -> np.ndarray:
    """Time component from the three-vector formula ``(kappa/2M)(A^*.D^-1/2 dE - E^*.D^-1/2 dA)``."""
    return j0_general(field, x0, x, MetricParams.ones())


def j0_general(field, x0, x, params: MetricParams | None = None) -> np.ndarray:
    """Density whose integral is ``inner(GENERAL(params))(A, A)``.

    Uses ``Theta_{+,0}`` on the chirality-weighted time derivatives and
    ``Theta_{-,0}`` on ``A`` and ``E``.
    """
    params = params or MetricParams.ones()
    P, _ = _term_sums(field)
    A, E = _spatial_E(P)
    tp, tm = theta_matrices(P.k, params)
    sgn = np.sign(P.Om)
    # D^{-1/2} d/dx0 multiplies a term by -i eps
    dE = E.scaled(-1j * sgn).apply(tp)
    dA = A.scaled(-1j * sgn).apply(tp)
    a, e = A(x0, x), E(x0, x)
    val = (np.sum(a.conj() * dE(x0, x), -1) - np.sum(e.conj() * dA(x0, x), -1)
           - 1j * (np.sum(a.conj() * E.apply(tm)(x0, x), -1) - np.sum(e.conj() * A.apply(tm)(x0, x), -1)))
    return 0.5 * field.cfg.kappa / field.cfg.M * val


# --------------------------------------------------------------------------
# Exact spatial integration on a periodic box
# --------------------------------------------------------------------------

def box_mode_field(cfg: PhysicsConfig, rng, L: float, n_modes: int = 4, m_max: int = 2, positive_only=False):
    """Random mode field whose momenta lie on the ``2 pi / L`` lattice."""
    cells = np.array([(a, b, c) for a in range(-m_max, m_max + 1) for b in range(-m_max, m_max + 1)
                      for c in range(-m_max, m_max + 1) if (a, b, c) != (0, 0, 0)])
    pick = rng.choice(len(cells), size=n_modes, replace=False)
    k = 2 * np.pi / L * cells[pick]
    c = rng.normal(size=(n_modes, 2, 3)) + 1j * rng.normal(size=(n_modes, 2, 3))
    if positive_only:
        c[:, 1] = 0
    return DiscreteModeField(cfg, k, c)


def periodic_box_integral(density, L: float, points: int, x0: float = 0.0) -> complex:
    """Kronecker-normalized ``int d^3x density(x0, x)`` for box-periodic densities.

    The rectangle rule on ``points^3`` samples is exact for trigonometric
    polynomials of degree below ``points``; the result is rescaled by
    ``(2 pi / L)^3`` so that ``int phi_k^* phi_k' = delta_{k k'}``.
    """
    if points < 1:
        raise DomainError("need at least one sample per axis")
    s = np.arange(points) * (L / points)
    X = np.stack(np.meshgrid(s, s, s, indexing="ij"), axis=-1).reshape(-1, 3)
    vals = density(x0, X)
    return complex(np.sum(vals) * (L / points) ** 3 * (2 * np.pi / L) ** 3)
