"""Momentum, helicity, spin, position and angular momentum acting on fields.

Vector-valued operators return a tuple of three fields, one per Cartesian
component. Position-type operators need derivatives in ``k`` and are
realized spectrally on a :class:`~procaqm.fields.GridField` lattice; on a
finite mode set they are not closed and raise ``RepresentationError``.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, RepresentationError
from .fields import EPSILONS, FieldInitialData, GridField, Lattice, _amp_from_spatial, evolve
from .inner_products import GENERAL, inner
from .mode_algebra import SPIN, MetricParams, PhysicsConfig, helicity_matrix, k_cross_S, k_dot_S, omega
from .transforms import U_inv_matrix, U_matrix, WaveFunctionSet, from_wavefunction, to_wavefunction

__all__ = [
    "WAVEFUNCTION", "COVARIANT", "apply_momentum", "apply_helicity", "helicity_via_wavefunction",
    "spin_matrices_field", "spin_matrices_foldy", "apply_spin", "spin_time_component",
    "position_matrices", "position_matrices_alt", "position_initial_data", "apply_position",
    "apply_velocity", "velocity_check", "mean_velocity", "apply_orbital_angular_momentum",
    "apply_angular_momentum", "angular_momentum_closure", "position_commutator",
    "charge_commutator", "position_spin_commutator", "packet_mean_velocity", "expectation", "gaussian_packet", "norm",
]

WAVEFUNCTION = "WAVEFUNCTION"
COVARIANT = "COVARIANT"
_EPS = np.array(EPSILONS, dtype=float)


def _require_grid(field):
    if not isinstance(field, GridField):
        raise RepresentationError("position-type operators need a GridField (not closed on finite mode sets)")


def norm(field) -> float:
    """Norm induced by the canonical positive-definite inner product."""
    return float(np.sqrt(max(inner(GENERAL(), field, field).real, 0.0)))


def expectation(components, field):
    """``<A, O_i A> / <A, A>`` for each component field ``O_i A``."""
    den = inner(GENERAL(), field, field).real
    return np.array([inner(GENERAL(), field, c) / den for c in components])


# --------------------------------------------------------------------------
# Mode-diagonal operators
# --------------------------------------------------------------------------

def apply_momentum(field):
    """``(p_1 A, p_2 A, p_3 A)``: multiplication by ``k`` in every mode."""
    k = field.momenta()
    return tuple(field.with_amplitudes(field.amplitudes() * k[:, i, None, None]) for i in range(3))


def apply_helicity(field):
    """``[h A](x0) = (0, h(k) A(x0))`` mode-wise."""
    h = helicity_matrix(field.momenta())
    return field.map_spatial(lambda k, V3: np.einsum("nij,nej->nei", h, V3))


def helicity_via_wavefunction(field, x0_0: float = 0.0) -> WaveFunctionSet:
    """Helicity applied on wave functions as ``|p|^{-1} curl f``.

    On a lattice the curl is taken from position samples with the spectral
    derivative; on discrete modes the derivative is exact (``i k x``).
    """
    wf = to_wavefunction(field, x0_0=x0_0)
    kn = np.linalg.norm(wf.k, axis=1)
    if wf.lattice is None:
        curl = 1j * np.cross(wf.k[:, None, :], wf.g)
        return WaveFunctionSet(wf.k, curl / kn[:, None, None], wf.x0_0, None)
    lat = wf.lattice
    fx = wf.position_samples()
    d = [lat.apply_axis(lat.D1, fx, ax) for ax in range(3)]
    curl = np.stack([d[1][..., 2] - d[2][..., 1], d[2][..., 0] - d[0][..., 2], d[0][..., 1] - d[1][..., 0]], axis=-1)
    g = wf.with_lattice_array(lat.to_momentum(curl)).g
    return WaveFunctionSet(wf.k, g / kn[:, None, None], wf.x0_0, lat)


def spin_matrices_field(k, M):
    """Field-representation spin ``s~_0`` (shape (3, n, 3, 3)) from its explicit formula."""
    k = np.asarray(k, dtype=float).reshape(-1, 3)
    w = omega(k, M)[:, None, None]
    kS = k_dot_S(k)
    kxS = k_cross_S(k)
    out = []
    for i in range(3):
        out.append((w * w + M * M) / (2 * M * w) * SPIN[i]
                   - (w - M) * k[:, i, None, None] * kS / (2 * M * w * (w + M))
                   + 1j * (kS @ kxS[:, i] + kxS[:, i] @ kS) / (2 * M * w))
    return np.array(out)


def spin_matrices_foldy(k, M):
    """``U^{-1} S U``: Foldy spin mapped back (the same operator by another route)."""
    U, Ui = U_matrix(k, M), U_inv_matrix(k, M)
    return np.array([Ui @ SPIN[i] @ U for i in range(3)])


def apply_spin(field):
    """Spin components ``(s_1 A, s_2 A, s_3 A)``.

    The spatial part is ``s~_0 A`` mode-wise; the time component follows
    from the Lorentz condition and equals ``M^{-1} D^{-1/2} (k x dA/dx0)``.
    """
    S = spin_matrices_field(field.momenta(), field.cfg.M)
    return tuple(field.map_spatial(lambda k, V3, s=s: np.einsum("nij,nej->nei", s, V3)) for s in S)


def spin_time_component(field):
    """Explicit ``M^{-1} D^{-1/2} (k x dA/dx0)`` amplitudes, shape (3, n, 2)."""
    k = field.momenta()
    V3 = field.spatial_amplitudes()
    w = field.omegas()
    dV = V3 * (-1j * _EPS[None, :, None] * w[:, None, None])
    cross = np.cross(k[:, None, :], dV)
    return np.moveaxis(cross / (field.cfg.M * w[:, None, None]), -1, 0)


# --------------------------------------------------------------------------
# Position
# --------------------------------------------------------------------------

def position_matrices(k, M):
    """Multiplicative part of the covariant position operator on ``A`` (shape (3, n, 3, 3))."""
    k = np.asarray(k, dtype=float).reshape(-1, 3)
    w = omega(k, M)[:, None, None]
    D = w * w
    kS = k_dot_S(k)
    kS2 = kS @ kS
    kxS = k_cross_S(k)
    I = np.eye(3)
    out = []
    for i in range(3):
        ki = k[:, i, None, None]
        out.append(-1j * ki / (2 * D) * I - 1j * ki * kS2 / (M * D * (w + M))
                   + 1j * (SPIN[i] @ kS + kS @ SPIN[i]) / (2 * M * w)
                   - (w - M) * kxS[:, i] / (2 * M * w * (w + M)))
    return np.array(out)


def position_matrices_alt(k, M):
    """Same operator written with helicity projectors (independent algebraic form)."""
    k = np.asarray(k, dtype=float).reshape(-1, 3)
    kn = np.linalg.norm(k, axis=1)[:, None, None]
    w = omega(k, M)[:, None, None]
    D = w * w
    h = helicity_matrix(k)
    h2 = h @ h
    I = np.eye(3)
    out = []
    for i in range(3):
        ki = k[:, i, None, None]
        out.append(-0.5j * ki / D * I + 1j * ki * (1 / D - 1 / (M * w)) * h2
                   + 1j / kn * (1 - M / w) * (h @ SPIN[i]) + 1j / kn * (w / M - 1) * (SPIN[i] @ h))
    return np.array(out)


def _lattice_arrays(field, x0_0):
    """``A0, dA0`` with shape (N, N, N, 1) and ``A, dA`` with shape (N, N, N, 3)."""
    data = FieldInitialData.from_field(field, x0_0)
    n = field.lattice.n
    shp = (n, n, n)
    return (data.A0.reshape(shp + (1,)), data.A0dot.reshape(shp + (1,)),
            data.Avec.reshape(shp + (3,)), data.Avecdot.reshape(shp + (3,)))


def position_initial_data(field, method: str = WAVEFUNCTION, x0_0: float = 0.0):
    """Initial data of ``x_0^i A`` at ``x0_0`` for ``i = 1, 2, 3``.

    Returns
    -------
    list of tuple
        For each component, ``(chi0, dchi0, chi, dchi)`` lattice arrays of
        shapes (N, N, N, 1) and (N, N, N, 3).
    """
    _require_grid(field)
    if method == WAVEFUNCTION:
        return [_lattice_arrays(f, x0_0) for f in apply_position(field, WAVEFUNCTION, x0_0)]
    if method != COVARIANT:
        raise DomainError(f"unknown position method {method!r}")
    lat = field.lattice
    M = field.cfg.M
    n = lat.n
    k = lat.k_grid
    kf = k.reshape(-1, 3)
    w = omega(k, M)[..., None]
    D = w * w
    A0, dA0, A, dA = _lattice_arrays(field, x0_0)
    mats = position_matrices(kf, M).reshape(3, n, n, n, 3, 3)
    out = []
    for i in range(3):
        ki = k[..., i, None]
        Y = lambda s: lat.position(s, i) + (1j * ki / (2 * D) + 1j * ki / (M * (w + M))) * s
        X = lambda v: lat.position(v, i) + np.einsum("...ij,...j->...i", mats[i], v)
        chi0 = Y(A0) + dA[..., i:i + 1] / (M * w)
        dchi0 = Y(dA0) - 1j * ki / D * dA0 - w / M * A[..., i:i + 1]
        chi = X(A)
        dchi = X(dA) - 1j * ki / D * dA
        out.append((chi0, dchi0, chi, dchi))
    return out


def _field_from_lattice_data(template, chi, dchi, x0_0):
    k = template.momenta()
    w = template.omegas()
    c = chi.reshape(-1, 3)
    d = dchi.reshape(-1, 3)
    V3 = np.stack([0.5 * (c + 1j * e * d / w[:, None]) * np.exp(1j * e * w * x0_0)[:, None] for e in EPSILONS], axis=1)
    return template.with_amplitudes(_amp_from_spatial(k, V3, template.cfg.M))


def apply_position(field, method: str = WAVEFUNCTION, x0_0: float = 0.0):
    """Position operator ``x_0`` acting on a lattice field.

    Parameters
    ----------
    field : GridField
    method : {"WAVEFUNCTION", "COVARIANT"}
        ``WAVEFUNCTION`` maps to Foldy wave functions, multiplies by ``x``
        and maps back. ``COVARIANT`` applies the explicit operators on the
        initial data ``(A, dA/dx0)`` directly.
    x0_0 : float
        Reference time of the Foldy map.

    Returns
    -------
    tuple of GridField
    """
    _require_grid(field)
    if method == WAVEFUNCTION:
        wf = to_wavefunction(field, x0_0=x0_0)
        arr = wf.lattice_array()
        return tuple(from_wavefunction(wf.with_lattice_array(field.lattice.position(arr, i)), field.cfg)
                     for i in range(3))
    data = position_initial_data(field, method, x0_0)
    return tuple(_field_from_lattice_data(field, chi, dchi, x0_0) for (_, _, chi, dchi) in data)


def apply_velocity(field):
    """Exact velocity ``(k / omega) C`` mode-wise."""
    k = field.momenta()
    w = field.omegas()
    return tuple(field.scale_modes(_EPS[None, :] * (k[:, i] / w)[:, None]) for i in range(3))


def _commutator_h_x(field, method, step):
    """``i [h, x_0] A`` by conjugating with exact evolution; Richardson on two steps."""

    def central(d):
        fwd = apply_position(evolve(field, d), method)
        bwd = apply_position(evolve(field, -d), method)
        return [(evolve(f, -d) - evolve(b, d)) * (1 / (2 * d)) for f, b in zip(fwd, bwd)]

    c1, c2 = central(step), central(step / 2)
    return tuple((b * 4 - a) * (1 / 3) for a, b in zip(c1, c2))


def velocity_check(field, method: str = WAVEFUNCTION, step: float = 0.05):
    """``||i[h, x_0] A - (k/omega) C A|| / ||A||`` and the commutator components."""
    _require_grid(field)
    v_fd = _commutator_h_x(field, method, step)
    v_ex = apply_velocity(field)
    num = np.sqrt(sum(norm(a - b) ** 2 for a, b in zip(v_fd, v_ex)))
    return float(num / norm(field)), v_fd


def mean_velocity(field, method: str = WAVEFUNCTION, step: float = 0.05):
    """``<A, i[h, x_0] A> / <A, A>`` as a real 3-vector."""
    _, v = velocity_check(field, method, step)
    return expectation(v, field).real


# --------------------------------------------------------------------------
# Angular momentum
# --------------------------------------------------------------------------

def apply_orbital_angular_momentum(field, method: str = WAVEFUNCTION):
    """``L = x_0 x p_0`` component fields."""
    _require_grid(field)
    xp = [apply_position(pl, method) for pl in apply_momentum(field)]  # xp[l][j] = x_j p_l A
    return tuple(xp[l][j] - xp[j][l] for j, l in ((1, 2), (2, 0), (0, 1)))


def apply_angular_momentum(field, method: str = WAVEFUNCTION):
    """Total angular momentum ``L + s_0`` component fields."""
    L = apply_orbital_angular_momentum(field, method)
    s = apply_spin(field)
    return tuple(a + b for a, b in zip(L, s))


def angular_momentum_closure(field, method: str = WAVEFUNCTION) -> float:
    """``max_ij ||[J_i, J_j] A - i eps_ijk J_k A|| / ||A||`` for the total angular momentum."""
    JA = apply_angular_momentum(field, method)
    JJ = [apply_angular_momentum(f, method) for f in JA]  # JJ[j][i] = J_i J_j A
    worst = 0.0
    for i, j, l in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        worst = max(worst, norm(JJ[j][i] - JJ[i][j] - JA[l] * 1j))
    return worst / norm(field)


def position_commutator(field, method: str = WAVEFUNCTION) -> float:
    """``max_ij ||[x_i, x_j] A|| / ||A||``."""
    XA = apply_position(field, method)
    XX = [apply_position(f, method) for f in XA]  # XX[j][i] = x_i x_j A
    worst = max(norm(XX[j][i] - XX[i][j]) for i, j in ((0, 1), (1, 2), (2, 0)))
    return worst / norm(field)


def charge_commutator(field, method: str = WAVEFUNCTION) -> float:
    """``max_i ||[x_i, C] A|| / ||A||`` with ``C`` the chirality grading."""
    CA = field.scale_modes(np.broadcast_to(_EPS, (len(field.momenta()), 2)))
    xC = apply_position(CA, method)
    Cx = [f.scale_modes(np.broadcast_to(_EPS, (len(field.momenta()), 2))) for f in apply_position(field, method)]
    return max(norm(a - b) for a, b in zip(xC, Cx)) / norm(field)


def position_spin_commutator(field, method: str = WAVEFUNCTION) -> float:
    """``max_ij ||[x_i, s_j] A|| / ||A||``."""
    XA = apply_position(field, method)
    SA = apply_spin(field)
    xs = [apply_position(f, method) for f in SA]  # xs[j][i] = x_i s_j A
    sx = [apply_spin(f) for f in XA]  # sx[i][j] = s_j x_i A
    return max(norm(xs[j][i] - sx[i][j]) for i in range(3) for j in range(3)) / norm(field)


def packet_mean_velocity(field) -> np.ndarray:
    """Exact ``<A, (k/omega) C A> / <A, A>`` from the mode weights."""
    return expectation(apply_velocity(field), field).real


# --------------------------------------------------------------------------
# Test packets
# --------------------------------------------------------------------------

def gaussian_packet(cfg: PhysicsConfig, lattice: Lattice, k_center, sigma_k: float, x_center=(0.0, 0.0, 0.0),
                    polarization=(1.0, 1j, 0.0), eps: int = 1, x0_0: float = 0.0, normalize: bool = True,
                    params: MetricParams | None = None) -> GridField:
    """Lattice field whose Foldy wave function is a Gaussian with fixed spin vector.

    The momentum wave function is ``pol * exp(-|k - k_c|^2 / (4 sigma^2) - i k.x_c)``
    in the chirality ``eps`` sector, so ``|f|^2`` has width ``sigma_k``.
    """
    k = lattice.k_grid.reshape(-1, 3)
    kc = np.asarray(k_center, dtype=float)
    xc = np.asarray(x_center, dtype=float)
    pol = np.asarray(polarization, dtype=complex)
    env = np.exp(-np.sum((k - kc) ** 2, axis=1) / (4 * sigma_k ** 2) - 1j * k @ xc)
    g = np.zeros((len(k), 2, 3), dtype=complex)
    g[:, 0 if eps == 1 else 1] = env[:, None] * pol[None, :]
    if normalize:
        g /= np.sqrt(np.sum(np.abs(g) ** 2))
    wf = WaveFunctionSet(k, g, float(x0_0), lattice)
    return from_wavefunction(wf, cfg, params)
