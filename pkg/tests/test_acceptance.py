"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest -v``; the lines are printed even when output is captured.
Readings that the implementation cannot meet are kept as strict xfails that
print FAIL, next to the restricted forms that do hold.
"""

import math
import time

import mpmath as mp
import numpy as np
import pytest

from procaqm.fields import DiscreteModeField
from procaqm.inner_products import GENERAL, inner
from procaqm.localized import I_closed, I_integrals
from procaqm.mode_algebra import MetricParams, PhysicsConfig
from procaqm.relativity import boost_field
from procaqm.specfun import bessel_k, gamma, hyp1f2
from procaqm.verification import run_suite

CFG = PhysicsConfig(1.3, 0.7, 1.1)
UNIT = PhysicsConfig(1.0, 1.0, 1.0)
SEED = 0


def announce(capsys, label, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {label}: {'PASS' if ok else 'FAIL'} {detail}")


def suite_verdict(capsys, label, name, limit, **kw):
    rep = run_suite(name, CFG, SEED, **kw)
    bad = [c.name for c in rep.checks if not c.passed and not c.informational]
    ok = rep.passed and rep.wall_time < limit
    worst = ", ".join(f"{c.name}={c.measured:.1e}/{c.tolerance:.0e}" for c in rep.checks if not c.informational)
    detail = f"({rep.wall_time:.2f} s, limit {limit} s; failing: {bad or 'none'}; {worst})"
    announce(capsys, label, ok, detail)
    return ok, rep


def test_criterion_1_mode_algebra(capsys):
    ok, _ = suite_verdict(capsys, "1 per-mode algebra", "mode_algebra", 5.0)
    assert ok


def test_criterion_2_gamma_independence(capsys):
    ok, rep = suite_verdict(capsys, "2 gamma independence", "gamma_independence", math.inf)
    assert ok and all(c.tolerance <= 1e-12 for c in rep.checks)


def test_criterion_3_inner_products(capsys):
    ok, _ = suite_verdict(capsys, "3 inner products", "inner_products", 5.0)
    assert ok


@pytest.mark.xfail(strict=True, reason="general products with helicity-dependent parameters are frame dependent")
def test_criterion_4_literal_random_parameter_sets(capsys):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    t = time.perf_counter()
    for _ in range(5):
        A = DiscreteModeField.random(CFG, rng, 3)
        d = rng.normal(size=3)
        beta = d / np.linalg.norm(d) * rng.uniform(0.1, 0.8)
        kind = GENERAL(MetricParams.random(rng))
        before = inner(kind, A, A).real
        after = inner(kind, boost_field(A, beta), boost_field(A, beta)).real
        worst = max(worst, abs(after - before) / before)
    ok = worst <= 1e-10
    announce(capsys, "4 Lorentz (literal, 5 generic parameter sets)", ok,
             f"(worst relative residual {worst:.2e}, tol 1e-10, {time.perf_counter() - t:.2f} s)")
    assert ok


def test_criterion_4_restricted(capsys):
    ok, _ = suite_verdict(capsys, "4 Lorentz (unit, chirality-only and collinear parameters; current)", "lorentz",
                          10.0)
    assert ok


def test_criterion_5_localized(capsys):
    ok, _ = suite_verdict(capsys, "5 localized states (I1, I2 positive; |I| decaying)", "localized", 60.0)
    assert ok


@pytest.mark.xfail(strict=True, reason="the third radial profile is negative for all Mz")
def test_criterion_5_literal_all_profiles_positive(capsys):
    grid = np.linspace(0.2, 5.0, 49)
    prof = np.array([I_closed(z, UNIT) for z in grid])
    ok = bool(prof.min() > 0)
    announce(capsys, "5 localized (literal: I1, I2, I3 all positive)", ok,
             f"(min I1 {prof[:, 0].min():.3e}, min I2 {prof[:, 1].min():.3e}, max I3 {prof[:, 2].max():.3e})")
    assert ok


@pytest.mark.xfail(strict=True, reason="published closed forms of I2 and I3 disagree with their integrals")
def test_criterion_5_printed_closed_forms(capsys):
    worst = 0.0
    for mz in (0.5, 1.0, 2.0, 4.0):
        q = I_integrals(1, mz, 0.0, UNIT)
        p = I_closed(mz, UNIT, "printed")
        worst = max(worst, max(abs(a / b - 1) for a, b in zip(q, p)))
    ok = worst <= 1e-3
    announce(capsys, "5 localized (printed closed forms vs quadrature)", ok, f"(worst relative {worst:.2e}, tol 1e-3)")
    assert ok


def test_criterion_6_observables(capsys):
    ok, rep = suite_verdict(capsys, "6 observables (N=32)", "observables", 30.0, lattice_n=32)
    tol = {c.name: c.tolerance for c in rep.checks}
    assert tol["position_two_path"] <= 1e-6 and tol["position_commutator"] <= 1e-10
    assert tol["mean_velocity"] <= 1e-4 and tol["helicity_two_path"] <= 1e-10
    assert ok


def test_criterion_7_gauge(capsys):
    ok, _ = suite_verdict(capsys, "7 gauge", "gauge", 2.0)
    assert ok


def test_criterion_8_special_functions(capsys):
    t = time.perf_counter()
    suite_ok, rep = suite_verdict(capsys, "8a special functions (suite)", "specfun", 2.0)
    zs = np.geomspace(1e-3, 50, 12)
    k_err = max(abs(bessel_k(nu, z) / float(mp.besselk(nu, z)) - 1)
                for nu in (0.25, 0.75, 1.25, 1.75) for z in zs)
    f_err = max(abs(hyp1f2(*args) / float(mp.hyp1f2(*args)) - 1)
                for args in ((0.5, 1.25, 1.5, 1.0), (0.25, 0.75, 1.25, 4.0), (-0.25, 0.25, 0.75, 30.0)))
    g_err = max(abs(gamma(x) / float(mp.gamma(x)) - 1) for x in (0.25, 0.5, 0.75, 1.25, 2.5, 5.0))
    elapsed = time.perf_counter() - t
    ok = suite_ok and k_err <= 1e-10 and f_err <= 1e-10 and g_err <= 1e-12 and elapsed < 2.0
    announce(capsys, "8b special functions (mpmath oracles)", ok,
             f"(K rel {k_err:.1e}/1e-10, 1F2 rel {f_err:.1e}/1e-10, Gamma rel {g_err:.1e}/1e-12, {elapsed:.2f} s)")
    assert ok
