"""Discrete symmetries and the probability-preserving gauge group.

The gauge group acts on the chirality/helicity components as
``A_{eps,h} -> exp(-i eps a_{eps,h} theta) A_{eps,h}``. It is compact
(a circle) exactly when all six ``a`` are rational; this module decides that
from exact input only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, InvalidParameterError
from .fields import EPSILONS, DiscreteModeField, GridField, helicity_projectors, project_coefficients
from .mode_algebra import MetricParams, theta_matrices

__all__ = [
    "apply_PT", "apply_C", "gauge_transform", "gauge_generator", "gauge_generator_explicit", "group_element",
    "Irrational", "GroupClass", "classify_group", "COMPACT_U1", "NONCOMPACT_R", "brute_force_period",
]

_EPS = np.array(EPSILONS, dtype=float)
COMPACT_U1 = "COMPACT_U1"
NONCOMPACT_R = "NONCOMPACT_R"


def apply_PT(field):
    """``[PT A](x0) = (-A^0(-x0)^*, A(-x0)^*)``.

    A term ``V exp(-i eps w x0 + i k.x)`` becomes ``(-V^0*, V*)`` at ``-k``
    with the same chirality.
    """
    V = field.amplitudes().conj()
    V[..., 0] *= -1
    if isinstance(field, GridField):
        n = field.lattice.n
        # the half-offset lattice is symmetric under k -> -k: reverse every axis
        Vg = V.reshape(n, n, n, 2, 4)[::-1, ::-1, ::-1].reshape(-1, 2, 4)
        return field.with_amplitudes(Vg)
    k = -field.momenta()
    return DiscreteModeField(field.cfg, k, project_coefficients(k, V, field.cfg.M))


def apply_C(field):
    """Chirality operator: multiplies ``V_eps`` by ``eps``."""
    return field.scale_modes(np.broadcast_to(_EPS, (len(field.momenta()), 2)))


def _helicity_phase(field, factors):
    """Multiply each ``(eps, h)`` component by ``factors[eps, h]``."""
    P = helicity_projectors(field.momenta())

    def fn(k, V3):
        out = np.zeros_like(V3)
        for ih in range(3):
            out += factors[None, :, ih, None] * np.einsum("nij,nej->nei", P[ih], V3)
        return out

    return field.map_spatial(fn)


def gauge_transform(field, theta: float, params: MetricParams | None = None):
    """``A_{eps,h} -> exp(-i eps a_{eps,h} theta) A_{eps,h}``."""
    _check_theta(theta)
    params = params or MetricParams.ones()
    phase = np.exp(-1j * _EPS[:, None] * params.a * theta)
    return _helicity_phase(field, phase)


def gauge_generator(field, params: MetricParams | None = None):
    """Generator ``G`` (``d/dtheta gauge_transform = -i G``) from its eigenvalues ``eps a_{eps,h}``."""
    params = params or MetricParams.ones()
    return _helicity_phase(field, _EPS[:, None] * params.a)


def gauge_generator_explicit(field, params: MetricParams | None = None):
    """Generator from the operator form ``Theta_{+,0} C + Theta_{-,0}``.

    The spatial part uses the 3x3 ``Theta`` matrices; the time component
    uses ``L^0_+ C + L^0_-``. For fields satisfying the Lorentz condition
    this equals :func:`gauge_generator`.
    """
    params = params or MetricParams.ones()
    k = field.momenta()
    tp, tm = theta_matrices(k, params)
    V = field.amplitudes()
    out = np.empty_like(V)
    for ie, e in enumerate(EPSILONS):
        out[:, ie, 1:] = np.einsum("nij,nj->ni", e * tp + tm, V[:, ie, 1:])
        out[:, ie, 0] = (e * params.L0(1) + params.L0(-1)) * V[:, ie, 0]
    return field.with_amplitudes(out)


def group_element(theta: float, params: MetricParams | None = None) -> np.ndarray:
    """Six diagonal entries in the order ``(+,+1), (+,-1), (+,0), (-,+1), (-,-1), (-,0)``."""
    params = params or MetricParams.ones()
    return np.exp(-1j * _EPS[:, None] * params.a * theta).reshape(6)


# --------------------------------------------------------------------------
# Compactness
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Irrational:
    """Marker for an irrational parameter value (``label`` is descriptive only)."""

    label: str = "irrational"
    approx: float = float("nan")


@dataclass(frozen=True)
class GroupClass:
    kind: str
    period: float | None
    period_over_2pi: Fraction | None


def _as_fraction(v):
    if isinstance(v, Irrational):
        return v
    if isinstance(v, bool):
        raise InvalidParameterError("booleans are not parameter values")
    if isinstance(v, (int, Fraction)):
        f = Fraction(v)
    elif isinstance(v, (tuple, list)) and len(v) == 2:
        num, den = v
        if not isinstance(num, int) or not isinstance(den, int):
            raise InvalidParameterError("rational pairs need integer numerator and denominator")
        if den == 0:
            raise InvalidParameterError("zero denominator")
        f = Fraction(num, den)
    else:
        raise InvalidParameterError(f"{v!r} is not an exact rational; pass (num, den), Fraction, int or Irrational")
    if f <= 0:
        raise InvalidParameterError("parameters a must be positive")
    return f


def classify_group(values) -> GroupClass:
    """Classify the gauge group from six exact parameter values.

    Parameters
    ----------
    values : sequence of six
        Each an ``int``, ``Fraction``, ``(num, den)`` pair or ``Irrational``.

    Returns
    -------
    GroupClass
        ``COMPACT_U1`` with the smallest period ``theta > 0`` returning to
        the identity, or ``NONCOMPACT_R`` with ``period=None``.
    """
    vals = [_as_fraction(v) for v in values]
    if len(vals) != 6:
        raise InvalidParameterError("exactly six parameters are required")
    if any(isinstance(v, Irrational) for v in vals):
        return GroupClass(NONCOMPACT_R, None, None)
    # a_i t integer for all i  <=>  t in (1/a_i) Z for all i; smallest t = lcm(den) / gcd(num)
    lcm_den = 1
    gcd_num = 0
    for f in vals:
        lcm_den = lcm_den * f.denominator // math.gcd(lcm_den, f.denominator)
        gcd_num = math.gcd(gcd_num, f.numerator)
    t = Fraction(lcm_den, gcd_num)
    return GroupClass(COMPACT_U1, float(2 * math.pi * t), t)


def brute_force_period(a, max_multiple: int = 2000, step_den: int = 720, tol: float = 1e-9):
    """Smallest ``theta = 2 pi j / step_den`` (``j <= max_multiple``) with ``group_element = 1``.

    Floating-point search used only to cross-check :func:`classify_group`.
    """
    a = np.asarray(a, dtype=float).reshape(6)
    params = MetricParams.from_a(a)
    for j in range(1, max_multiple + 1):
        theta = 2 * math.pi * j / step_den
        if np.max(np.abs(group_element(theta, params) - 1)) < tol:
            return theta
    return None


def _check_theta(theta):
    if not np.isfinite(theta):
        raise DomainError("theta must be finite")
