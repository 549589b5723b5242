import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qaoa1 import (InputError, IsingModel, build_index, coefficients_field_free,
                   coefficients_with_fields, correlators, expectation, expectation_field_free,
                   expectation_with_fields, statevector_expectation)
from qaoa1.oracle import statevector_correlators

from conftest import random_int_model, small_models


def test_index_single_edge(single_edge):
    ix = build_index(single_edge)
    assert len(ix.e(0)) == len(ix.d(0)) == len(ix.F(0)) == 0


def test_index_triangle(triangle):
    ix = build_index(triangle)
    assert list(ix.F(0)) == [2] and list(ix.e(0)) == [2] and list(ix.d(0)) == [2]


def test_index_path():
    ix = build_index(IsingModel(3, {(0, 1): 1.0, (1, 2): 1.0}))
    assert list(ix.e(0)) == [2] and len(ix.d(0)) == 0 and len(ix.F(0)) == 0


def test_gamma_zero_gives_constant(rng):
    m = IsingModel(4, {(0, 1): 2.0, (1, 2): -1.0}, [1, 0, 3, -2], constant=7.5)
    assert expectation(m, 0.0, 0.9) == 7.5


def test_single_spin():
    m = IsingModel(1, fields=[1.0])
    assert expectation_with_fields(m, None, (math.pi / 4, math.pi / 4)) == pytest.approx(1.0)


def test_single_edge_closed_form(single_edge):
    ix = build_index(single_edge)
    assert expectation_field_free(single_edge, ix, (math.pi / 4, 3 * math.pi / 8)) == pytest.approx(-1)


def test_triangle_at_half_pi(triangle):
    assert expectation(triangle, math.pi / 2, 0.6) == pytest.approx(0.0, abs=1e-12)


def test_field_free_rejects_fields():
    m = IsingModel(2, {(0, 1): 1.0}, [1, 0])
    with pytest.raises(InputError):
        expectation_field_free(m, None, (0.1, 0.2))
    with pytest.raises(InputError):
        coefficients_field_free(m, None, 0.1)


def test_matches_statevector(rng):
    for i in range(100):
        m = random_int_model(rng, int(rng.integers(2, 11)), fields=bool(i % 2))
        g, b = rng.uniform(-math.pi, math.pi, size=2)
        assert expectation(m, g, b) == pytest.approx(statevector_expectation(m, g, b), abs=1e-9)


def test_correlators_match_statevector(rng):
    m = random_int_model(rng, 8)
    ix = build_index(m)
    for g, b in rng.uniform(-2, 2, size=(5, 2)):
        Mi, Muv = correlators(m, ix, (g, b))
        sMi, sMuv = statevector_correlators(m, g, b)
        np.testing.assert_allclose(Mi, sMi, atol=1e-9)
        np.testing.assert_allclose(Muv, sMuv, atol=1e-9)
        assert np.all(np.abs(Mi) <= 1 + 1e-9) and np.all(np.abs(Muv) <= 1 + 1e-9)


def test_correlators_single_edge(single_edge):
    Mi, Muv = correlators(single_edge, None, (math.pi / 4, 3 * math.pi / 8))
    np.testing.assert_allclose(Mi, 0)
    assert Muv[0] == pytest.approx(-1)


def test_coefficients_field_free_examples(single_edge, rng):
    c = coefficients_field_free(single_edge, None, math.pi / 4)
    assert (c.a, c.b, c.c) == pytest.approx((1, 0, 0))
    m = random_int_model(rng, 7, fields=False)
    assert tuple(coefficients_field_free(m, None, 0.0)) == (0, 0, 0)


def test_coefficients_with_fields_examples():
    c = coefficients_with_fields(IsingModel(1, fields=[1.0]), None, math.pi / 4)
    assert tuple(c) == pytest.approx((1, 0, 0), abs=1e-15)


def test_field_free_coefficients_fit(rng):
    m = random_int_model(rng, 7, fields=False)
    ix = build_index(m)
    g = 0.413
    betas = np.linspace(0.05, 3.0, 8)
    y = np.array([expectation(m, g, b, ix) for b in betas])
    X = np.column_stack([np.sin(4 * betas), -np.sin(2 * betas) ** 2])
    fit = np.linalg.lstsq(X, y, rcond=None)[0]
    c = coefficients_field_free(m, ix, g)
    np.testing.assert_allclose(fit, [c.a, c.b], atol=1e-10)


def test_with_fields_coefficients_fit(rng):
    m = random_int_model(rng, 7)
    ix = build_index(m)
    g = -0.77
    betas = np.linspace(0.05, 3.0, 12)
    y = np.array([expectation(m, g, b, ix) for b in betas])
    X = np.column_stack([np.sin(2 * betas), np.sin(4 * betas), np.sin(2 * betas) ** 2])
    fit = np.linalg.lstsq(X, y, rcond=None)[0]
    np.testing.assert_allclose(fit, tuple(coefficients_with_fields(m, ix, g)), atol=1e-10)


def test_vectorised_gamma(rng):
    m = random_int_model(rng, 6)
    gs = np.linspace(-1, 1, 7)
    vals = expectation(m, gs, 0.3)
    np.testing.assert_allclose(vals, [expectation(m, g, 0.3) for g in gs], atol=1e-13)


def test_index_bound_to_model(rng):
    ix = build_index(random_int_model(rng, 5))
    with pytest.raises(InputError):
        expectation_with_fields(random_int_model(rng, 6), ix, (0.1, 0.1))


@settings(max_examples=50, deadline=None)
@given(small_models(max_n=6), st.floats(-3, 3), st.floats(-3, 3))
def test_symmetries(m, g, b):
    ix = build_index(m)
    v = expectation(m, g, b, ix)
    assert expectation(m, g, b + math.pi, ix) == pytest.approx(v, abs=1e-12)
    assert expectation(m, -g, -b, ix) == pytest.approx(v, abs=1e-12)
    assert expectation(m, g + math.pi * m.scale, b, ix) == pytest.approx(v, abs=1e-11)


def test_zero_cosine_factors():
    # gamma = pi/4 with unit couplings puts exact zeros into cos(2 J gamma) products
    m = IsingModel(4, {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0, (2, 3): 1.0}, [1, 0, 1, 0])
    for b in (0.2, 1.3):
        assert expectation(m, math.pi / 4, b) == pytest.approx(
            statevector_expectation(m, math.pi / 4, b), abs=1e-12)
