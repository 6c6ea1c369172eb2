"""Seeded invariant suites behind ``procaqm verify``.

Each suite returns a :class:`RunReport`. A check marked ``informational``
is reported with its measured value but does not affect ``passed``; it is
used for statements known not to hold in the stated generality.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List

import numpy as np

from .errors import DomainError
from .fields import DiscreteModeField, Lattice, evolve, to_six_component
from .inner_products import CANONICAL, GENERAL, SIGMA3, decompose_as_sigma3, gram, inner, mode_inner
from .localized import I_closed, I_integrals, total_probability
from .mode_algebra import (MINKOWSKI, MetricParams, PhysicsConfig, eigensystem, general_metric,
                           mode_matrices, polarization_basis, sigma, symmetry_matrices)
from .observables import (COVARIANT, WAVEFUNCTION, apply_helicity, charge_commutator, gaussian_packet,
                          helicity_via_wavefunction, mean_velocity, position_commutator, position_initial_data,
                          velocity_check)
from .relativity import (box_mode_field, boost_field, continuity_residual, current_J, j0_general,
                         periodic_box_integral)
from .specfun import bessel_k, gamma, hyp1f2
from .symmetry_gauge import (brute_force_period, classify_group, gauge_generator, gauge_transform)
from .transforms import to_wavefunction, u_operators

__all__ = ["Check", "RunReport", "SUITES", "run_suite", "run_all", "field_report", "mean_velocity_extrapolated"]


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool
    informational: bool = False


@dataclass
class RunReport:
    """Outcome of one suite; ``passed`` ignores informational checks."""

    suite: str
    checks: List[Check] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def add(self, name, measured, tol, informational=False, passed=None):
        measured = float(measured)
        ok = bool(measured <= tol) if passed is None else bool(passed)
        self.checks.append(Check(name, measured, float(tol), ok, informational))

    def lines(self):
        out = []
        for c in self.checks:
            tag = "PASS" if c.passed else ("INFO" if c.informational else "FAIL")
            out.append(f"{self.suite}.{c.name}: {tag} measured={c.measured:.3e} tol={c.tolerance:.1e}")
        out.append(f"{self.suite}: {'PASS' if self.passed else 'FAIL'}")
        return out


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def _rng(seed, salt):
    return np.random.default_rng([seed, salt])


# --------------------------------------------------------------------------

def suite_mode_algebra(cfg: PhysicsConfig, seed: int, n_k: int = 200, n_gamma: int = 5) -> RunReport:
    rep = RunReport("mode_algebra")
    rng = _rng(seed, 1)
    worst: Dict[str, float] = {}

    def rec(name, v):
        worst[name] = max(worst.get(name, 0.0), float(v))

    S3 = sigma(3)
    I6 = np.eye(6)
    for g in np.exp(rng.uniform(-1.2, 1.2, size=n_gamma)):
        c = PhysicsConfig(cfg.M, float(g), cfg.kappa)
        params = MetricParams.random(rng)
        for k in rng.normal(scale=1.5, size=(n_k, 3)):
            mm = mode_matrices(k, c)
            H, Hd = mm.H, mm.H.conj().T
            rec("pseudo_hermiticity", np.max(np.abs(Hd - S3 @ H @ S3)))
            rec("quasi_hermiticity", _rel(mm.eta_plus @ H @ mm.eta_plus_inv, Hd))
            gm = general_metric(k, c, params, check=False)
            rec("quasi_hermiticity_general", _rel(gm.eta_tilde @ H @ np.linalg.inv(gm.eta_tilde), Hd))
            rec("foldy_diagonal", np.max(np.abs(mm.rho @ H @ mm.rho_inv - mm.omega * S3)) / mm.omega)
            es = eigensystem(k, c)
            Psi, Phi = es.matrix("Psi"), es.matrix("Phi")
            rec("biorthonormality", np.max(np.abs(Psi.conj().T @ Phi - I6)))
            E = np.repeat(es.E, 3)
            rec("spectral_resolution", max(np.max(np.abs(Psi @ Phi.conj().T - I6)),
                                           _rel((Psi * E) @ Phi.conj().T, H)))
            sm = symmetry_matrices(k, c)
            rec("chirality_involution", np.max(np.abs(sm.C @ sm.C - I6)))
            rec("chirality_metric_relation", _rel(sm.C, mm.eta_plus_inv @ sm.P))
            for eps in (1, -1):
                pb = polarization_basis(k, eps, c)
                p = pb.four_momentum()
                acc = sum(np.outer(a, a) for a in (pb.a1, pb.a2, pb.a3))
                ref = np.linalg.inv(MINKOWSKI) + np.outer(p, p) / c.M ** 2
                rec("polarization_completeness", _rel(acc, ref))
    tol = {"pseudo_hermiticity": 1e-14, "quasi_hermiticity": 1e-12, "quasi_hermiticity_general": 1e-12,
           "foldy_diagonal": 1e-12, "biorthonormality": 1e-13, "spectral_resolution": 1e-13,
           "chirality_involution": 1e-12, "chirality_metric_relation": 1e-12, "polarization_completeness": 1e-13}
    for name, v in worst.items():
        rep.add(name, v, tol[name])
    return rep


def suite_gamma_independence(cfg: PhysicsConfig, seed: int, gammas=(0.3, 1.0, 3.0), n_k: int = 20) -> RunReport:
    rep = RunReport("gamma_independence")
    rng = _rng(seed, 2)
    params = MetricParams.random(rng)
    ks = rng.normal(size=(n_k, 3))
    coeff = rng.normal(size=(n_k, 2, 3)) + 1j * rng.normal(size=(n_k, 2, 3))
    foldy, uops, wfs, rho_psi = [], [], [], []
    for g in gammas:
        c = PhysicsConfig(cfg.M, g, cfg.kappa)
        foldy.append(np.array([mode_matrices(k, c).rho @ mode_matrices(k, c).H @ mode_matrices(k, c).rho_inv
                               for k in ks]))
        uo = [u_operators(k, c, params) for k in ks]
        uops.append(np.array([np.concatenate([u.U.ravel(), u.U_inv.ravel(), u.U_ee.ravel(), u.U_ee_plus_inv.ravel()])
                              for u in uo]))
        A = DiscreteModeField(c, ks, coeff)
        wfs.append(to_wavefunction(A, params, 0.4).g)
        psi = to_six_component(A, 0.4)
        # psi depends on gamma; rho psi / sqrt(gamma) must not (the 1/gamma weight of its norm is removed)
        rho_psi.append(np.array([mode_matrices(k, c).rho @ v for k, v in zip(ks, psi)]) / math.sqrt(g))
    for name, arrs in (("foldy_hamiltonian", foldy), ("u_operators", uops), ("wave_functions", wfs),
                       ("foldy_six_vector", rho_psi)):
        rep.add(name, max(_rel(a, arrs[0]) for a in arrs[1:]), 1e-12)
    return rep


def suite_inner_products(cfg: PhysicsConfig, seed: int, n_fields: int = 6, steps: int = 20) -> RunReport:
    rep = RunReport("inner_products")
    rng = _rng(seed, 3)
    params = MetricParams.random(rng)
    k = rng.normal(size=(5, 3))
    fields = [DiscreteModeField(cfg, k, rng.normal(size=(5, 2, 3)) + 1j * rng.normal(size=(5, 2, 3)))
              for _ in range(n_fields)]
    for tag, kind in (("canonical", CANONICAL), ("general", GENERAL(params))):
        G = gram(kind, fields)
        rep.add(f"positivity_{tag}", -np.linalg.eigvalsh(G).min(), 0.0,
                passed=np.linalg.eigvalsh(G).min() > 0)
    A, B = fields[0], fields[1]
    ref = inner(GENERAL(params), A, B)
    worst = 0.0
    x0 = 0.0
    for dt in rng.uniform(-1.0, 1.0, size=steps):
        x0 += dt
        for kind in (CANONICAL, GENERAL(params)):
            r0 = inner(kind, A, B)
            worst = max(worst, abs(inner(kind, evolve(A, x0), evolve(B, x0), x0) - r0) / max(1.0, abs(r0)))
    rep.add("time_invariance", worst, 1e-12)
    two = mode_inner(A, B, params)
    s3 = decompose_as_sigma3(A, B, params, check=False)
    scale = max(1.0, abs(ref))
    rep.add("field_vs_mode_form", abs(ref - two) / scale, 1e-12)
    rep.add("field_vs_sigma3_decomposition", abs(ref - s3) / scale, 1e-12)
    P = DiscreteModeField.random(cfg, rng, 4, positive_only=True)
    Q = P.with_coefficients(np.concatenate([rng.normal(size=(4, 1, 3)), np.zeros((4, 1, 3))], axis=1))
    r1, r2 = inner(GENERAL(), P, Q), inner(SIGMA3, P, Q)
    rep.add("positive_frequency_sigma3", abs(r1 - r2) / max(1.0, abs(r1)), 1e-12)
    return rep


def _boost_residual(A, B, beta, params):
    kind = GENERAL(params)
    scale = math.sqrt(inner(kind, A, A).real * inner(kind, B, B).real)
    return abs(inner(kind, A, B) - inner(kind, boost_field(A, beta), boost_field(B, beta))) / scale


def _random_beta(rng, vmax=0.8):
    d = rng.normal(size=3)
    return d / np.linalg.norm(d) * rng.uniform(0.1, vmax)


def suite_lorentz(cfg: PhysicsConfig, seed: int, n_sets: int = 5) -> RunReport:
    """Boost invariance, current conservation and charge integrals.

    The generic-parameter boost check is informational: for helicity-
    dependent ``a`` the general product is frame dependent.
    """
    rep = RunReport("lorentz")
    rng = _rng(seed, 4)
    w_unit, w_hel, w_coll, w_gen = 0.0, 0.0, 0.0, 0.0
    zhat = np.array([0.0, 0.0, 1.0])
    for _ in range(n_sets):
        A = DiscreteModeField.random(cfg, rng, 3)
        B = A.with_coefficients(rng.normal(size=(3, 2, 3)) + 1j * rng.normal(size=(3, 2, 3)))
        beta = _random_beta(rng)
        params = MetricParams.random(rng)
        w_unit = max(w_unit, _boost_residual(A, B, beta, MetricParams.ones()))
        a_eps = np.exp(rng.uniform(-0.7, 0.7, size=2))
        w_hel = max(w_hel, _boost_residual(A, B, beta, MetricParams.from_a(np.repeat(a_eps, 3))))
        w_gen = max(w_gen, _boost_residual(A, B, beta, params))
        kz = rng.uniform(2.0, 5.0, size=3) * cfg.M
        Z = DiscreteModeField(cfg, kz[:, None] * zhat, rng.normal(size=(3, 2, 3)) + 1j * rng.normal(size=(3, 2, 3)))
        # |beta| < k/omega for every mode, so no momentum of either chirality is reversed
        bz = rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 0.8)
        w_coll = max(w_coll, _boost_residual(Z, Z, bz * zhat, params))
    rep.add("boost_invariance_unit_a", w_unit, 1e-10)
    rep.add("boost_invariance_chirality_only_a", w_hel, 1e-10)
    rep.add("boost_invariance_collinear_general_a", w_coll, 1e-10)
    rep.add("boost_invariance_generic_a", w_gen, 1e-10, informational=True)
    A = DiscreteModeField.random(cfg, rng, 4)
    x = rng.normal(size=(20, 3))
    cont = np.max(np.abs(continuity_residual(A, 0.37, x)))
    rep.add("continuity", cont / max(1.0, float(np.max(np.abs(current_J(A, 0.37, x))))), 1e-10)
    L = 2 * np.pi / 0.6
    C = box_mode_field(cfg, rng, L, 4, 2)
    params = MetricParams.random(rng)
    rho_int = periodic_box_integral(lambda t, X: j0_general(C, t, X, params), L, 12, 0.3)
    prob = total_probability(C, 0.3, params)
    rep.add("density_integral_general", abs(rho_int - prob) / prob, 1e-12)
    j_int = periodic_box_integral(lambda t, X: current_J(C, t, X)[:, 0], L, 12, 0.3)
    can = inner(CANONICAL, C, C, 0.3)
    rep.add("density_integral_vs_J0", abs(j_int - can) / abs(can), 1e-12)
    return rep


def suite_localized(cfg: PhysicsConfig, seed: int, mz_values=(0.5, 1.0, 2.0, 4.0)) -> RunReport:
    rep = RunReport("localized")
    unit = PhysicsConfig(1.0, cfg.gamma, 1.0)
    worst, eps_dev = 0.0, 0.0
    for mz in mz_values:
        q = I_integrals(1, mz, 0.0, unit)
        c = I_closed(mz, unit)
        worst = max(worst, max(abs(a / b - 1) for a, b in zip(q, c)))
        qm = I_integrals(-1, mz, 0.0, unit)
        eps_dev = max(eps_dev, max(abs(a - b) / abs(b) for a, b in zip(qm, q)))
    rep.add("quadrature_vs_closed", worst, 1e-3)
    rep.add("epsilon_independence", eps_dev, 1e-9)
    grid = np.linspace(0.2, 5.0, 49)
    prof = np.array([I_closed(z, unit) for z in grid])
    rep.add("I1_I2_positive", -prof[:, :2].min(), 0.0, passed=prof[:, :2].min() > 0)
    tail = np.abs(prof[grid >= 1.5])
    rep.add("monotone_decay_beyond_1.5", float(np.max(np.diff(tail, axis=0))), 0.0,
            passed=bool(np.all(np.diff(tail, axis=0) < 0)))
    small = np.abs(np.array(I_closed(1e-3, unit)))
    ref = np.abs(np.array(I_closed(1.0, unit)))
    rep.add("singular_at_origin", float(np.min(ref / small)), 1e-6)
    rep.add("I3_positive", -prof[:, 2].min(), 0.0, informational=True, passed=prof[:, 2].min() > 0)
    return rep


def mean_velocity_extrapolated(cfg: PhysicsConfig, k_bar=(0.0, 0.0, 0.5), sigmas=(0.2, 0.16, 0.13, 0.1),
                               lattice: Lattice | None = None):
    """Packet mean velocity from ``i[h, x]`` extrapolated to zero momentum spread.

    A cubic in ``sigma^2`` through the sampled widths is evaluated at 0.
    """
    lattice = lattice or Lattice(32, 0.1)
    s = np.asarray(sigmas, dtype=float)
    v = np.array([mean_velocity(gaussian_packet(cfg, lattice, k_bar, si)) for si in s])
    deg = min(3, len(s) - 1)
    return np.array([np.polyval(np.polyfit(s ** 2, v[:, i], deg), 0.0) for i in range(3)])


def suite_observables(cfg: PhysicsConfig, seed: int, n: int = 32) -> RunReport:
    rep = RunReport("observables")
    heavy = PhysicsConfig(2.0, cfg.gamma, 1.0)
    lat = Lattice(n, 0.2)
    A = gaussian_packet(heavy, lat, (0.3, 0.0, 0.2), 0.3, x_center=(0.5, -0.3, 0.2), polarization=(0.6, 0.3j, 0.2))
    W = position_initial_data(A, WAVEFUNCTION)
    C = position_initial_data(A, COVARIANT)
    scale = max(float(np.max(np.abs(a))) for x in W for a in x)
    rep.add("position_two_path", max(float(np.max(np.abs(a - b))) for x, y in zip(W, C) for a, b in zip(x, y)) / scale,
            1e-6)
    rep.add("position_commutator", position_commutator(A), 1e-10)
    rep.add("position_chirality_commutator", charge_commutator(A), 1e-10)
    rep.add("velocity_identity", velocity_check(A)[0], 1e-6)
    light = PhysicsConfig(1.0, cfg.gamma, 1.0)
    kb = np.array([0.0, 0.0, 0.5])
    v = mean_velocity_extrapolated(light, kb)
    rep.add("mean_velocity", float(np.max(np.abs(v - kb / math.sqrt(kb @ kb + 1.0)))), 1e-4)
    h1 = to_wavefunction(apply_helicity(A))
    h2 = helicity_via_wavefunction(A)
    rep.add("helicity_two_path", float(np.max(np.abs(h1.g - h2.g))) / float(np.max(np.abs(h1.g))), 1e-10)
    return rep


def suite_gauge(cfg: PhysicsConfig, seed: int, trials: int = 10) -> RunReport:
    rep = RunReport("gauge")
    rng = _rng(seed, 7)
    worst = 0.0
    for _ in range(trials):
        A = DiscreteModeField.random(cfg, rng, 3)
        params = MetricParams.random(rng)
        th = rng.uniform(-10, 10)
        p0 = total_probability(A, 0.0, params)
        worst = max(worst, abs(total_probability(gauge_transform(A, th, params), 0.0, params) - p0) / p0)
    rep.add("probability_invariance", worst, 1e-13)
    A = DiscreteModeField.random(cfg, rng, 3)
    params = MetricParams.random(rng)
    G = gauge_generator(A, params).amplitudes()
    errs = []
    hs = (1e-2, 5e-3)
    for h in hs:
        fd = (gauge_transform(A, h, params).amplitudes() - gauge_transform(A, -h, params).amplitudes()) / (2 * h)
        errs.append(float(np.max(np.abs(fd + 1j * G))))
    order = math.log(errs[0] / errs[1]) / math.log(hs[0] / hs[1])
    rep.add("generator_fd_order", abs(order - 2.0), 0.1)
    mismatches = 0
    cases = 0
    for _ in range(trials):
        fr = [Fraction(int(rng.integers(1, 7)), int(rng.integers(1, 7))) for _ in range(6)]
        gc = classify_group(fr)
        # every period is a multiple of 2 pi / 60 when numerators and denominators are at most 6
        bf = brute_force_period([float(f) for f in fr], max_multiple=3600, step_den=60)
        cases += 1
        if bf is None or abs(bf - gc.period) > 1e-9 * gc.period:
            mismatches += 1
    rep.add("classification_vs_brute_force", mismatches, 0)
    return rep


def _hyp1f2_terms(a, b1, b2, z, n):
    term, total = 1.0, 1.0
    for j in range(n):
        term *= (a + j) * z / ((b1 + j) * (b2 + j) * (j + 1))
        total += term
    return total


def suite_specfun(cfg: PhysicsConfig, seed: int) -> RunReport:
    rep = RunReport("specfun")
    zs = np.geomspace(0.01, 20.0, 25)
    worst = 0.0
    for nu in (0.25, 0.75, 1.25, 1.75):
        kp, km, k0 = bessel_k(nu + 1, zs), bessel_k(nu - 1, zs), bessel_k(nu, zs)
        worst = max(worst, float(np.max(np.abs(kp - km - 2 * nu / zs * k0) / kp)))
    rep.add("bessel_recurrence", worst, 1e-9)
    half = np.sqrt(np.pi / (2 * zs)) * np.exp(-zs)
    rep.add("bessel_half_order", float(np.max(np.abs(bessel_k(0.5, zs) / half - 1))), 1e-12)
    worst = 0.0
    for args in ((0.5, 1.25, 1.5, 1.0), (0.25, 0.75, 1.25, 4.0), (0.5, 1.5, 1.75, 16.0), (-0.25, 0.25, 0.75, 9.0)):
        v = hyp1f2(*args)
        # count the terms used, then sum twice as many
        n, term, total = 0, 1.0, 1.0
        a, b1, b2, z = args
        while True:
            term *= (a + n) * z / ((b1 + n) * (b2 + n) * (n + 1))
            total += term
            n += 1
            if abs(term) < 1e-17 * abs(total) or term == 0.0:
                break
        worst = max(worst, abs(_hyp1f2_terms(*args, 2 * n) - v) / abs(v))
    rep.add("hyp1f2_cutoff_stability", worst, 1e-12)
    xs = (0.25, 0.75, 1.25, 2.5)
    rep.add("gamma_functional_equation", max(abs(gamma(x + 1) / (x * gamma(x)) - 1) for x in xs), 1e-12)
    return rep


SUITES: Dict[str, Callable[[PhysicsConfig, int], RunReport]] = {
    "mode_algebra": suite_mode_algebra,
    "gamma_independence": suite_gamma_independence,
    "inner_products": suite_inner_products,
    "lorentz": suite_lorentz,
    "localized": suite_localized,
    "observables": suite_observables,
    "gauge": suite_gauge,
    "specfun": suite_specfun,
}


def run_suite(name: str, cfg: PhysicsConfig, seed: int = 0, lattice_n: int = 32) -> RunReport:
    """Run one suite; ``lattice_n`` only affects ``observables``."""
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t = time.perf_counter()
    kw = {"n": lattice_n} if name == "observables" else {}
    rep = SUITES[name](cfg, seed, **kw)
    rep.wall_time = time.perf_counter() - t
    return rep


def run_all(cfg: PhysicsConfig, seed: int = 0, names=None, lattice_n: int = 32) -> List[RunReport]:
    return [run_suite(n, cfg, seed, lattice_n) for n in (names or SUITES)]


def field_report(field, params: MetricParams, steps: int = 20, seed: int = 0) -> RunReport:
    """Checks on a user-supplied field: positivity and conservation of its norm."""
    t = time.perf_counter()
    rep = RunReport("field")
    rng = _rng(seed, 9)
    n0 = inner(GENERAL(params), field, field).real
    rep.add("norm_positive", -n0, 0.0, passed=n0 > 0 or field.is_zero())
    worst = 0.0
    for x0 in np.cumsum(rng.uniform(-1, 1, size=steps)):
        worst = max(worst, abs(total_probability(field, float(x0), params) - n0) / max(1.0, abs(n0)))
    rep.add("norm_time_invariance", worst, 1e-12)
    rep.wall_time = time.perf_counter() - t
    return rep
