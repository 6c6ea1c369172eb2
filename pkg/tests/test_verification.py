import numpy as np
import pytest

from procaqm.errors import DomainError
from procaqm.fields import DiscreteModeField
from procaqm.mode_algebra import MetricParams, PhysicsConfig
from procaqm.verification import SUITES, RunReport, field_report, run_all, run_suite


def test_report_pass_logic():
    r = RunReport("demo")
    r.add("small", 1e-15, 1e-12)
    r.add("note", 5.0, 1e-12, informational=True)
    assert r.passed
    r.add("big", 1.0, 1e-12)
    assert not r.passed
    assert [c.passed for c in r.checks] == [True, False, False]


def test_report_explicit_verdict():
    r = RunReport("demo")
    r.add("flag", 3.0, 0.0, passed=True)
    assert r.passed and r.checks[0].measured == 3.0


def test_report_lines():
    r = RunReport("demo")
    r.add("a", 1e-15, 1e-12)
    r.add("b", 2.0, 1.0, informational=True)
    r.add("c", 2.0, 1.0)
    lines = r.lines()
    assert lines[0] == "demo.a: PASS measured=1.000e-15 tol=1.0e-12"
    assert lines[1].startswith("demo.b: INFO")
    assert lines[2].startswith("demo.c: FAIL")
    assert lines[-1] == "demo: FAIL"


def test_suite_names():
    assert set(SUITES) == {"mode_algebra", "gamma_independence", "inner_products", "lorentz", "localized",
                           "observables", "gauge", "specfun"}


def test_unknown_suite():
    with pytest.raises(DomainError):
        run_suite("nope", PhysicsConfig(1.0, 1.0, 1.0))


def test_fast_suites_pass_and_are_seeded():
    cfg = PhysicsConfig(1.0, 1.0, 1.0)
    a = run_all(cfg, 5, ["gauge", "specfun", "gamma_independence"])
    b = run_all(cfg, 5, ["gauge", "specfun", "gamma_independence"])
    assert all(r.passed for r in a)
    assert [r.lines() for r in a] == [r.lines() for r in b]
    assert all(r.wall_time > 0 for r in a)


def test_field_report(rng):
    A = DiscreteModeField.random(PhysicsConfig(1.2, 1.0, 0.8), rng, 3)
    r = field_report(A, MetricParams.random(rng), steps=5)
    assert r.passed and [c.name for c in r.checks] == ["norm_positive", "norm_time_invariance"]


def test_field_report_zero_field():
    Z = DiscreteModeField(PhysicsConfig(1.0, 1.0, 1.0), np.zeros((0, 3)), np.zeros((0, 2, 3)))
    assert field_report(Z, MetricParams.ones(), steps=3).passed
