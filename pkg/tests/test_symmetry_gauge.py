import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from procaqm.errors import DomainError, InvalidParameterError
from procaqm.fields import DiscreteModeField, GridField, Lattice, evaluate, evolve, helicity_split
from procaqm.inner_products import CANONICAL, GENERAL, inner
from procaqm.mode_algebra import MetricParams
from procaqm.symmetry_gauge import (COMPACT_U1, NONCOMPACT_R, Irrational, apply_C, apply_PT, brute_force_period,
                                    classify_group, gauge_generator, gauge_generator_explicit, gauge_transform,
                                    group_element)


def amp_close(a, b, tol=1e-12):
    return np.max(np.abs(a.amplitudes() - b.amplitudes())) <= tol * max(1.0, np.abs(b.amplitudes()).max())


def test_PT_pointwise(cfg, rng):
    A = DiscreteModeField.random(cfg, rng, 3)
    B = apply_PT(A)
    for _ in range(4):
        t, x = rng.normal(), rng.normal(size=(1, 3))
        lhs = evaluate(B, t, x)[0]
        ref = evaluate(A, -t, x)[0].conj()
        ref[0] *= -1
        assert np.allclose(lhs, ref, atol=1e-13)


def test_PT_involution_and_antilinear(cfg, rng):
    A = DiscreteModeField.random(cfg, rng, 3)
    assert amp_close(apply_PT(apply_PT(A)), A)
    assert amp_close(apply_PT(A * (0.3 + 2j)), apply_PT(A) * (0.3 - 2j))


def test_PT_reverses_evolution(cfg, rng):
    A = DiscreteModeField.random(cfg, rng, 3)
    assert amp_close(apply_PT(evolve(A, 0.6)), evolve(apply_PT(A), -0.6))


def test_PT_antiunitary_for_canonical_product(cfg, rng):
    A, B = DiscreteModeField.random(cfg, rng, 3), DiscreteModeField.random(cfg, rng, 3)
    lhs = inner(CANONICAL, apply_PT(A), apply_PT(B))
    assert abs(lhs - np.conj(inner(CANONICAL, A, B))) < 1e-12 * abs(inner(CANONICAL, A, A))


def test_PT_on_grid_matches_mode_route(cfg, rng):
    lat = Lattice(8, 0.5)
    G = GridField.from_coefficients(cfg, lat, rng.normal(size=(lat.n ** 3, 2, 3)) + 0j)
    P = apply_PT(G)
    assert amp_close(apply_PT(P), G)
    D = DiscreteModeField(cfg, G.momenta(), G.coefficients())
    PD = apply_PT(D)
    # both routes describe the same function of spacetime
    x = rng.normal(size=(3, 3))
    assert np.allclose(evaluate(P, 0.4, x), evaluate(PD, 0.4, x), atol=1e-10)


def test_C_involution_and_commutes_with_evolution(cfg, rng):
    A = DiscreteModeField.random(cfg, rng, 3)
    assert amp_close(apply_C(apply_C(A)), A)
    assert amp_close(apply_C(evolve(A, 1.3)), evolve(apply_C(A), 1.3))


def test_C_grades_by_chirality(cfg, rng):
    pos = DiscreteModeField.random(cfg, rng, 3, positive_only=True)
    assert amp_close(apply_C(pos), pos)
    neg = DiscreteModeField.basis_mode(cfg, [0.1, 0.2, 0.3], -1, 0)
    assert amp_close(apply_C(neg), -neg)


@pytest.fixture
def params(rng):
    return MetricParams.random(rng)


def test_gauge_is_a_group(cfg, rng, params):
    A = DiscreteModeField.random(cfg, rng, 3)
    two = gauge_transform(gauge_transform(A, 0.4, params), 1.1, params)
    assert amp_close(two, gauge_transform(A, 1.5, params))
    assert amp_close(gauge_transform(A, 0.0, params), A)
    assert amp_close(gauge_transform(gauge_transform(A, 0.7, params), -0.7, params), A)


def test_gauge_preserves_probability(cfg, rng, params):
    A, B = DiscreteModeField.random(cfg, rng, 3), DiscreteModeField.random(cfg, rng, 3)
    kind = GENERAL(params)
    for theta in (0.3, 2.0, -5.1):
        ga, gb = gauge_transform(A, theta, params), gauge_transform(B, theta, params)
        assert abs(inner(kind, ga, gb) - inner(kind, A, B)) < 1e-12 * abs(inner(kind, A, A))


def test_gauge_phase_on_single_component(cfg, params):
    A = DiscreteModeField.basis_mode(cfg, [0.3, 0.0, -0.2], -1, 1, c=0.5)
    theta = 0.9
    expected = A * np.exp(1j * params.a_of(-1, 1) * theta)
    assert amp_close(gauge_transform(A, theta, params), expected)


def test_gauge_commutes_with_evolution(cfg, rng, params):
    A = DiscreteModeField.random(cfg, rng, 3)
    assert amp_close(gauge_transform(evolve(A, 0.8), 0.5, params), evolve(gauge_transform(A, 0.5, params), 0.8))


def test_generator_by_finite_difference(cfg, rng, params):
    A = DiscreteModeField.random(cfg, rng, 3)
    h = 1e-5
    d = (gauge_transform(A, h, params) - gauge_transform(A, -h, params)) * (1 / (2 * h))
    assert amp_close(d, gauge_generator(A, params) * -1j, 1e-8)


def test_generator_forms_agree(cfg, rng, params):
    A = DiscreteModeField.random(cfg, rng, 4)
    assert amp_close(gauge_generator_explicit(A, params), gauge_generator(A, params), 1e-12)


def test_generator_unit_parameters_is_chirality(cfg, rng):
    A = DiscreteModeField.random(cfg, rng, 3)
    assert amp_close(gauge_generator(A), apply_C(A))


def test_gauge_rejects_nonfinite_angle(cfg):
    with pytest.raises(DomainError):
        gauge_transform(DiscreteModeField.basis_mode(cfg, [0, 0, 1], 1, 1), math.inf)


def test_group_element_order(params):
    g = group_element(0.7, params)
    eps = np.repeat([1.0, -1.0], 3)
    assert np.allclose(g, np.exp(-1j * eps * params.a.reshape(6) * 0.7))


def test_classify_unit_parameters():
    c = classify_group([1] * 6)
    assert c.kind == COMPACT_U1 and c.period_over_2pi == 1
    assert c.period == pytest.approx(2 * math.pi)


def test_classify_mixed_rationals():
    c = classify_group([(1, 2), (1, 3), Fraction(2, 3), 1, 2, (5, 6)])
    # a_i t integral for all i: t = lcm(2, 3, 3, 6) / gcd(1, 1, 2, 1, 2, 5) = 6
    assert c.period_over_2pi == 6


def test_classify_common_numerator():
    assert classify_group([2, 4, (2, 3), 6, 2, 8]).period_over_2pi == Fraction(3, 2)


def test_classify_irrational():
    c = classify_group([1, 1, Irrational("sqrt2", math.sqrt(2)), 1, 1, 1])
    assert c.kind == NONCOMPACT_R and c.period is None


@pytest.mark.parametrize("bad", [[1] * 5, [1, 1, 1, 1, 1, 1.5], [1, 1, 1, 1, 1, 0], [1, 1, 1, 1, 1, (1, 0)],
                                 [1, 1, 1, 1, 1, True], [1, 1, 1, 1, 1, (-1, 2)], [1, 1, 1, 1, 1, (1.0, 2)]])
def test_classify_rejects(bad):
    with pytest.raises(InvalidParameterError):
        classify_group(bad)


fractions = st.tuples(st.integers(1, 6), st.integers(1, 6)).map(lambda p: Fraction(*p))


@settings(max_examples=25, deadline=None)
@given(st.lists(fractions, min_size=6, max_size=6))
def test_classification_matches_brute_force(vals):
    c = classify_group(vals)
    bf = brute_force_period([float(v) for v in vals], max_multiple=3600, step_den=60)
    assert bf is not None
    assert bf == pytest.approx(c.period, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.lists(fractions, min_size=6, max_size=6))
def test_period_is_minimal(vals):
    c = classify_group(vals)
    params = MetricParams.from_a([float(v) for v in vals])
    assert np.allclose(group_element(c.period, params), 1, atol=1e-9)
    for p in (2, 3, 5, 7):
        # a shorter period would divide the minimal one by an integer, so primes suffice
        assert np.max(np.abs(group_element(c.period / p, params) - 1)) > 1e-6
