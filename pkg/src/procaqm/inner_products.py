"""Indefinite, canonical and general positive-definite inner products of Proca fields.

Position-space formulas are reduced mode by mode with the Kronecker
convention, so no spatial quadrature is involved. Every product is
conjugate-linear in its first argument.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .fields import aligned_amplitudes, chirality_split, helicity_split, project_coefficients
from .mode_algebra import EPSILONS, MetricParams, theta_matrices

__all__ = ["InnerProductKind", "SIGMA3", "CANONICAL", "GENERAL", "inner", "gram", "mode_inner",
           "decompose_as_sigma3"]

_EPS = np.array(EPSILONS, dtype=float)


@dataclass(frozen=True)
class InnerProductKind:
    tag: str
    params: MetricParams | None = None

    def __post_init__(self):
        if self.tag not in ("SIGMA3", "CANONICAL", "GENERAL"):
            raise InvalidParameterError(f"unknown inner product {self.tag!r}")
        if self.tag == "GENERAL" and self.params is None:
            raise InvalidParameterError("GENERAL inner product needs MetricParams")


SIGMA3 = InnerProductKind("SIGMA3")
CANONICAL = InnerProductKind("CANONICAL")


def GENERAL(params: MetricParams | None = None) -> InnerProductKind:
    return InnerProductKind("GENERAL", params if params is not None else MetricParams.ones())


def _kinematics(k, V, w, x0):
    """A, dA, E, dE (spatial, per mode) at time x0 from amplitudes V (n, 2, 4)."""
    ph = np.exp(-1j * _EPS[None, :] * w[:, None] * x0)[..., None]
    Vt = V * ph
    dVt = Vt * (-1j * _EPS[None, :, None] * w[:, None, None])
    A4, dA4 = Vt.sum(1), dVt.sum(1)
    ddA4 = -(w ** 2)[:, None] * A4
    A, dA = A4[:, 1:], dA4[:, 1:]
    E = -dA - 1j * k * A4[:, :1]
    dE = -ddA4[:, 1:] - 1j * k * dA4[:, :1]
    return A, dA, E, dE


def _dot(a, b):
    return np.einsum("ni,ni->", a.conj(), b)


def _mv(m, v):
    return np.einsum("nij,nj->ni", m, v)


def inner(kind: InnerProductKind, A, B, x0: float = 0.0) -> complex:
    """Inner product of two fields at time ``x0``.

    Parameters
    ----------
    kind : InnerProductKind
        ``SIGMA3``, ``CANONICAL`` or ``GENERAL(params)``.
    A, B : DiscreteModeField or GridField
    x0 : float
        Time of the constant-time surface.

    Notes
    -----
    The indefinite product carries the prefactor ``kappa / 2M`` so that
    basis modes give ``eps * omega`` with unit normalization.
    """
    if isinstance(kind, str):
        kind = InnerProductKind(kind) if kind != "GENERAL" else GENERAL()
    k, VA, VB = aligned_amplitudes(A, B)
    cfg = A.cfg
    w = np.sqrt(np.einsum("ni,ni->n", k, k) + cfg.M ** 2)
    a, da, e, de = _kinematics(k, VA, w, x0)
    b, db, f, df = _kinematics(k, VB, w, x0)
    pref = cfg.kappa / (2 * cfg.M)
    if kind.tag == "SIGMA3":
        return complex(-1j * pref * (_dot(a, f) - _dot(e, b)))
    wi = (1.0 / w)[:, None]
    if kind.tag == "CANONICAL":
        return complex(pref * (_dot(a, wi * df) - _dot(e, wi * db)))
    tp, tm = theta_matrices(k, kind.params)
    val = (_dot(a, _mv(tp, wi * df)) - _dot(e, _mv(tp, wi * db))
           - 1j * (_dot(a, _mv(tm, f)) - _dot(e, _mv(tm, b))))
    return complex(pref * val)


def mode_inner(A, B, params: MetricParams | None = None) -> complex:
    """Mode-space form ``(kappa/M) sum a omega conj(cN) c'N'``."""
    params = params or MetricParams.ones()
    k, VA, VB = aligned_amplitudes(A, B)
    ca = project_coefficients(k, VA, A.cfg.M)
    cb = project_coefficients(k, VB, A.cfg.M)
    w = np.sqrt(np.einsum("ni,ni->n", k, k) + A.cfg.M ** 2)
    return complex(A.cfg.kappa / A.cfg.M * np.einsum("eh,n,neh->", params.a, w, ca.conj() * cb))


def gram(kind: InnerProductKind, fields, x0: float = 0.0) -> np.ndarray:
    """Matrix ``G[i, j] = inner(kind, fields[i], fields[j], x0)``."""
    n = len(fields)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            G[i, j] = inner(kind, fields[i], fields[j], x0)
            G[j, i] = np.conj(G[i, j]) if i != j else G[i, j].real
    return G


def decompose_as_sigma3(A, B, params: MetricParams, x0: float = 0.0, check: bool = True, tol: float = 1e-12):
    """``sum_{eps,h} eps a_{eps,h} (A_{eps,h}, B_{eps,h})_Sigma3``.

    With ``check`` the value is compared with ``inner(GENERAL(params))``.
    """
    total = 0j
    A_eps, B_eps = chirality_split(A), chirality_split(B)
    for ie, eps in enumerate(EPSILONS):
        for ih, (ah, bh) in enumerate(zip(helicity_split(A_eps[ie]), helicity_split(B_eps[ie]))):
            total += eps * params.a[ie, ih] * inner(SIGMA3, ah, bh, x0)
    if check:
        ref = inner(GENERAL(params), A, B, x0)
        if abs(total - ref) > tol * max(1.0, abs(ref)):
            raise AssertionError(f"Sigma3 decomposition {total} differs from general product {ref}")
    return complex(total)
