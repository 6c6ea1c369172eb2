"""Localized states, their radial profiles, and position probability densities.

The localized field of chirality ``eps`` and spin label ``s`` centred at
``y`` has

    A^0 = i eps n_s I_1,        A^i = I_2 delta_{is} + n_i n_s I_3,

with ``n`` the unit vector along ``x - y`` and ``I_1..I_3`` radial integrals
of the distance ``z = |x - y|`` and the time offset ``x0 - x0_0``. Spin
labels ``+1, -1, 0`` select the Cartesian axes ``x, y, z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DomainError, SingularityError, UnsupportedError
from .fields import EPSILONS, GridField, Lattice, PlaneWaveSum
from .mode_algebra import MetricParams, PhysicsConfig, omega
from .specfun import QuadratureSpec, _gamma_signed, bessel_k, gamma, hyp1f2, regulated_radial_integral
from .transforms import SPIN_LABELS, U_ee_matrix, WaveFunctionSet, from_wavefunction, to_wavefunction

__all__ = [
    "LocalizedStateQuery", "I_integrals", "I_closed", "localized_field", "localized_grid_state",
    "nearest_site", "profile_table", "probability_density", "probability_current",
    "probability_current_divergence", "total_probability",
]

_EPS = np.array(EPSILONS, dtype=float)
_PHI_NORM = (2 * np.pi) ** -1.5


@dataclass(frozen=True)
class LocalizedStateQuery:
    """Which localized state to evaluate and where.

    ``points`` holds ``(x0, x)`` pairs with ``x`` a 3-vector.
    """

    epsilon: int
    s: int
    y: tuple = (0.0, 0.0, 0.0)
    x0_0: float = 0.0
    points: list = dc_field(default_factory=list)

    def __post_init__(self):
        if self.epsilon not in EPSILONS:
            raise DomainError("epsilon must be +1 or -1")
        if self.s not in SPIN_LABELS:
            raise DomainError("spin label must be +1, -1 or 0")


def _check_z(z):
    if not np.isfinite(z) or z <= 0:
        raise SingularityError(f"localized profile is singular at |x - y| = {z}")


# --------------------------------------------------------------------------
# Radial integrals
# --------------------------------------------------------------------------

def I_integrals(eps: int, z: float, dt: float, cfg: PhysicsConfig, spec: QuadratureSpec | None = None):
    """Regulated quadrature values of ``(I1, I2, I3)``.

    Parameters
    ----------
    eps : {1, -1}
    z : float
        Distance ``|x - y| > 0``.
    dt : float
        ``x0 - x0_0``; at zero the values are real and independent of ``eps``.
    cfg : PhysicsConfig
    spec : QuadratureSpec, optional
        Regulators are rescaled by ``min(1, M z) / 2`` so that the damping
        stays short compared with the oscillation period ``2 pi / z``.
    """
    _check_z(z)
    M, kappa = cfg.M, cfg.kappa
    spec = (spec or QuadratureSpec()).scaled(min(1.0, M * z) / 2)

    def om1(k):
        w = np.sqrt(k * k + M * M)
        base = w ** -0.5
        return base if dt == 0 else base * np.exp(-1j * eps * dt * w)

    def om2(k):
        kz = k * z
        return np.sin(kz) / (k * z ** 3) - np.cos(kz) / z ** 2

    def ratio(k):
        return np.sqrt(k * k + M * M) / M - 1.0

    f1 = lambda k: k * k * om1(k) * om2(k)
    f2 = lambda k: om1(k) * (k * np.sin(k * z) / z + om2(k) * ratio(k))
    f3 = lambda k: om1(k) * (k * np.sin(k * z) / z - 3 * om2(k)) * ratio(k)
    q = dict(M=M, wavelength=2 * np.pi / z)
    I1 = z / (2 * np.pi ** 2 * math.sqrt(M * kappa)) * regulated_radial_integral(f1, spec, **q)
    c = math.sqrt(M / kappa) / (2 * np.pi ** 2)
    I2 = c * regulated_radial_integral(f2, spec, **q)
    I3 = c * regulated_radial_integral(f3, spec, **q)
    return I1, I2, I3


_G14 = gamma(0.25)


def _tail_integral(nu, x):
    """``int_x^inf t^{-nu} K_nu(t) dt`` by Gauss-Legendre panels."""
    gx, gw = np.polynomial.legendre.leggauss(40)
    edges = x + np.concatenate([np.linspace(0, 4, 9), np.linspace(4, 60, 15)[1:]])
    a, b = edges[:-1, None], edges[1:, None]
    t = 0.5 * (a + b) + 0.5 * (b - a) * gx
    w = 0.5 * (b - a) * gw
    return float(np.sum(w * t ** -nu * bessel_k(nu, t)))


def _G(nu, x):
    """``int_x^inf t^{-nu} K_nu(t) dt`` for ``0 < nu < 1/2`` or ``1/2 < nu < 1``."""
    if x > 5.0:
        return _tail_integral(nu, x)
    full = 2 ** (-nu - 1) * math.sqrt(math.pi) * _gamma_signed(0.5 - nu)
    w = x * x / 4
    lead = x ** (1 - 2 * nu) * 2 ** nu / (gamma(1 - nu) * (1 - 2 * nu)) * hyp1f2((1 - 2 * nu) / 2, 1 - nu, (3 - 2 * nu) / 2, w)
    lin = x / (2 ** nu * gamma(1 + nu)) * hyp1f2(0.5, 1 + nu, 1.5, w)
    return full - math.pi / (2 * math.sin(nu * math.pi)) * (lead - lin)


def _closed_corrected(x):
    """Dimensionless profiles at ``x = M z`` (``M = kappa = 1``)."""
    c = math.sqrt(math.pi) * 2 ** 0.25 / _G14
    cp = math.sqrt(math.pi) * 2 ** 0.75 / _gamma_signed(-0.25)
    K = {nu: float(bessel_k(nu, x)) for nu in (0.25, 0.75, 1.25, 1.75)}
    Cm = c * x ** -0.25 * K[0.25]
    Cp = cp * x ** -0.75 * K[0.75]
    dCm = -c * x ** -0.25 * K[1.25]
    dCp = -cp * x ** -0.75 * K[1.75]
    Cd, dCd = Cp - Cm, dCp - dCm
    Sd = c * _G(0.25, x) - cp * _G(0.75, x)
    q = 1 / (2 * math.pi ** 2)
    I1 = q * x ** -1.25 * c * (2.5 / x * K[1.25] + K[0.25])
    I2 = q * (-dCm / x + Sd / x ** 3 - Cd / x ** 2)
    I3 = q * (-dCd / x - 3 * Sd / x ** 3 + 3 * Cd / x ** 2)
    return I1, I2, I3


def _closed_printed(x):
    g = _G14
    K = lambda nu: float(bessel_k(nu, x))
    F = lambda a, b1, b2: hyp1f2(a, b1, b2, x * x / 4)
    I1 = 2.5 / x * K(1.25) + K(0.25)
    I2 = (K(1.25) + K(0.25) / x + g ** 2 / (4 * math.pi * x ** 1.5) * K(0.75)
          + x ** -0.75 * (2 * math.pi / g * F(0.5, 1.25, 1.5) + g ** 3 / (3 * math.pi * 2 ** 1.75) * F(0.5, 1.5, 1.75))
          + g / x ** 1.25 * (F(0.25, 0.25, 0.75) / (2 ** 0.75 * x) - 2 ** 0.25 * F(0.25, 0.75, 1.25)))
    I3 = (3 * K(0.25) / x + K(1.25) / x ** 1.25
          + g ** 2 / (4 * math.pi * x ** 0.5) * (K(1.75) + 3 * K(0.75) / x)
          + (2 * x) ** -0.75 * (12 * math.pi / g * F(0.5, 1.25, 1.5) + g ** 3 / (2 * math.pi) * F(0.5, 1.5, 1.75))
          + 3 * g / x ** 1.25 * (F(-0.25, 0.25, 0.75) / (2 ** 0.75 * x) + 2 ** 0.25 * F(0.25, 0.75, 1.25)))
    pref = 1 / (2 ** 0.75 * math.pi ** 1.5 * g) * x ** -1.25
    return pref * I1, pref * I2, pref * I3


def I_closed(z: float, cfg: PhysicsConfig, variant: str = "corrected"):
    """Closed forms of ``(I1, I2, I3)`` at equal times.

    Parameters
    ----------
    z : float
        Distance ``|x - y| > 0``.
    cfg : PhysicsConfig
    variant : {"corrected", "printed"}
        ``"printed"`` evaluates the Bessel/1F2 combination in its published
        form. That form disagrees with the defining integrals for ``I2`` and
        ``I3``; ``"corrected"`` is a rederived closed form built from
        ``K_nu`` and the incomplete integrals ``int_x^inf t^-nu K_nu(t) dt``.
        Both share the same ``I1``.
    """
    _check_z(z)
    x = cfg.M * z
    if variant == "corrected":
        vals = _closed_corrected(x)
    elif variant == "printed":
        vals = _closed_printed(x)
    else:
        raise DomainError(f"unknown closed-form variant {variant!r}")
    scale = math.sqrt(cfg.M / cfg.kappa) * cfg.M ** 2.5
    return tuple(scale * v for v in vals)


def profile_table(cfg: PhysicsConfig, mz_values, eps: int = 1, spec: QuadratureSpec | None = None):
    """Rows ``(Mz, I1, I2, I3 closed, I1, I2, I3 quadrature)`` at equal times."""
    rows = []
    for mz in mz_values:
        z = mz / cfg.M
        rows.append((float(mz),) + I_closed(z, cfg) + tuple(float(np.real(v)) for v in I_integrals(eps, z, 0.0, cfg, spec)))
    return np.array(rows)


# --------------------------------------------------------------------------
# Localized fields
# --------------------------------------------------------------------------

_AXIS = {1: 0, -1: 1, 0: 2}


def localized_field(query: LocalizedStateQuery, cfg: PhysicsConfig, method: str = "quadrature",
                    form: str = "angles", spec: QuadratureSpec | None = None) -> np.ndarray:
    """Four-vector values of a localized state at the query points, shape (m, 4).

    Parameters
    ----------
    method : {"quadrature", "closed"}
        Source of ``I1..I3``; ``"closed"`` is only valid at ``x0 = x0_0``.
    form : {"angles", "tensor"}
        ``"angles"`` assembles the components from the polar and azimuthal
        angles of ``x - y``; ``"tensor"`` uses ``n_i n_s``. They agree.
    """
    y = np.asarray(query.y, dtype=float)
    out = np.empty((len(query.points), 4), dtype=complex)
    for p, (x0, x) in enumerate(query.points):
        r = np.asarray(x, dtype=float) - y
        z = float(np.linalg.norm(r))
        _check_z(z)
        dt = float(x0) - query.x0_0
        if method == "closed":
            if dt != 0:
                raise DomainError("closed forms hold only at x0 = x0_0")
            I1, I2, I3 = I_closed(z, cfg)
        elif method == "quadrature":
            I1, I2, I3 = I_integrals(query.epsilon, z, dt, cfg, spec)
        else:
            raise DomainError(f"unknown method {method!r}")
        out[p] = _assemble(query.epsilon, query.s, r / z, I1, I2, I3, form)
    return out


def _assemble(eps, s, n, I1, I2, I3, form):
    i = _AXIS[s]
    if form == "tensor":
        vec = I3 * n[i] * n.astype(complex)
        vec[i] += I2
        return np.concatenate([[1j * eps * n[i] * I1], vec])
    if form != "angles":
        raise DomainError(f"unknown form {form!r}")
    th = math.acos(max(-1.0, min(1.0, n[2])))
    ph = math.atan2(n[1], n[0])
    st, ct, sp, cp = math.sin(th), math.cos(th), math.sin(ph), math.cos(ph)
    v1 = I2 + st ** 2 * cp ** 2 * I3
    v2 = 0.5 * st ** 2 * math.sin(2 * ph) * I3
    v3 = 0.5 * math.sin(2 * th) * cp * I3
    v4 = I2 + st ** 2 * sp ** 2 * I3
    v5 = 0.5 * math.sin(2 * th) * sp * I3
    v6 = I2 + ct ** 2 * I3
    a0 = 1j * eps * I1 * (st * cp, st * sp, ct)[i]
    vec = ((v1, v2, v3), (v2, v4, v5), (v3, v5, v6))[i]
    return np.array([a0, *vec], dtype=complex)


def nearest_site(lattice: Lattice, y):
    """Lattice position sample closest to ``y`` (the position grid wraps periodically)."""
    xs = lattice.x_axis
    L = lattice.n * lattice.dx
    idx = []
    for c in np.asarray(y, dtype=float):
        d = (xs - c + L / 2) % L - L / 2
        idx.append(int(np.argmin(np.abs(d))))
    return tuple(idx), np.array([xs[i] for i in idx])


def localized_grid_state(cfg: PhysicsConfig, lattice: Lattice, eps: int, s: int, y=(0.0, 0.0, 0.0),
                         x0_0: float = 0.0, params: MetricParams | None = None) -> GridField:
    """Lattice analogue of the localized state at the site nearest ``y``.

    Its wave function is the unit spin vector ``e_s`` in chirality ``eps``,
    supported on a single position sample.
    """
    if eps not in EPSILONS or s not in SPIN_LABELS:
        raise DomainError("need eps in {1, -1} and s in {1, -1, 0}")
    _, site = nearest_site(lattice, y)
    k = lattice.k_grid.reshape(-1, 3)
    g = np.zeros((len(k), 2, 3), dtype=complex)
    g[:, 0 if eps == 1 else 1, _AXIS[s]] = np.exp(-1j * k @ site) / lattice.n ** 1.5
    return from_wavefunction(WaveFunctionSet(k, g, float(x0_0), lattice), cfg, params)


# --------------------------------------------------------------------------
# Probability density and current
# --------------------------------------------------------------------------

def _u_sums(field, e: int, params: MetricParams):
    """Plane-wave sums of ``U_{e,+} A`` and ``U_{e,+} A_c`` (``A_c`` flips the sign of negative chirality)."""
    k = field.momenta()
    w = field.omegas()
    V3 = field.spatial_amplitudes()
    U = U_ee_matrix(k, field.cfg.M, params, e, 1)
    amps = _PHI_NORM * np.einsum("nij,nej->nei", U, V3).reshape(-1, 3)
    Om = (w[:, None] * _EPS[None, :]).reshape(-1)
    kk = np.repeat(k, 2, axis=0)
    sgn = np.tile(_EPS, len(k))
    return PlaneWaveSum(amps, Om, kk), PlaneWaveSum(amps * sgn[:, None], Om, kk)


def probability_density(field, x0, x, params: MetricParams | None = None, form: str = "general"):
    """Position probability density at ``(x0, x)``.

    Parameters
    ----------
    form : {"general", "unit"}
        ``"unit"`` is the ``a = 1`` expression ``(kappa/2M)(|U A|^2 + |U A_c|^2)``
        and requires unit parameters; ``"general"`` holds for any ``params``.
    """
    params = params or MetricParams.ones()
    pref = field.cfg.kappa / field.cfg.M
    if form == "unit":
        if not params.is_unit():
            raise UnsupportedError("the unit-parameter density needs params = 1")
        P, Pc = _u_sums(field, 1, params)
        a, ac = P(x0, x), Pc(x0, x)
        return 0.5 * pref * (np.sum(np.abs(a) ** 2, axis=-1) + np.sum(np.abs(ac) ** 2, axis=-1))
    if form != "general":
        raise DomainError(f"unknown form {form!r}")
    Pp, Ppc = _u_sums(field, 1, params)
    Pm, Pmc = _u_sums(field, -1, params)
    a, ac, b, bc = Pp(x0, x), Ppc(x0, x), Pm(x0, x), Pmc(x0, x)
    sq = lambda v: np.sum(np.abs(v) ** 2, axis=-1)
    cross = np.sum(a.conj() * ac, axis=-1) - np.sum(b.conj() * bc, axis=-1)
    return 0.25 * pref * (sq(a) + sq(b) + sq(ac) + sq(bc) + 2 * cross.real)


def _current_pairs(field):
    """Bilinear pieces of the probability current.

    Returns a dict ``mu -> list of (X, i, Y, j)`` such that
    ``J^mu = (kappa/2M) Re sum conj(X_i) Y_j``.
    """
    params = MetricParams.ones()
    sums = _u_sums(field, 1, params)
    pairs = {mu: [] for mu in range(4)}
    for P in sums:
        w = np.abs(P.Om)
        Pdot = P.d_lower(0)
        G = Pdot.scaled(1 / (w * (w + field.cfg.M)))
        for mu in range(4):
            Q = Pdot.d_upper(mu).scaled(1 / w ** 2)
            pairs[mu] += [(P, i, Q, i) for i in range(3)]
        for i in range(3):
            for j in range(3):
                pairs[i + 1].append((P, i, G.d_lower(j + 1), j))
                pairs[i + 1].append((P, j, G.d_lower(j + 1) * -1.0, i))
    return pairs


def _eval_pairs(pairs, x0, x, deriv=None):
    total = 0.0
    for X, i, Y, j in pairs:
        if deriv is None:
            total = total + (X(x0, x)[..., i].conj() * Y(x0, x)[..., j]).real
        else:
            dX, dY = X.d_lower(deriv), Y.d_lower(deriv)
            total = total + (dX(x0, x)[..., i].conj() * Y(x0, x)[..., j]
                             + X(x0, x)[..., i].conj() * dY(x0, x)[..., j]).real
    return total


def probability_current(field, x0, x, params: MetricParams | None = None):
    """Probability current four-vector ``(J^0 = rho, J^1, J^2, J^3)``.

    Only available for unit parameters; the zero component equals
    :func:`probability_density`.
    """
    if params is not None and not params.is_unit():
        raise UnsupportedError("the probability current is only available for unit parameters")
    pref = 0.5 * field.cfg.kappa / field.cfg.M
    pairs = _current_pairs(field)
    return np.stack([pref * _eval_pairs(pairs[mu], x0, x) for mu in range(4)], axis=-1)


def probability_current_divergence(field, x0, x):
    """``partial_mu J^mu`` by exact differentiation of every plane wave."""
    pref = 0.5 * field.cfg.kappa / field.cfg.M
    pairs = _current_pairs(field)
    return pref * sum(_eval_pairs(pairs[mu], x0, x, deriv=mu) for mu in range(4))


def total_probability(field, x0: float = 0.0, params: MetricParams | None = None) -> float:
    """Integral of the density over space, evaluated as a Kronecker mode sum."""
    return to_wavefunction(field, params, x0).norm2()
