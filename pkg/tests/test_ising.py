import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qaoa1 import (InputError, IsingModel, ParseError, QuboModel, WeightDist, eliminate_fields,
                   energy, from_qubo, generate_d_regular, generate_erdos_renyi, load_model,
                   model_from_text, model_to_text, save_model, to_qubo)
from qaoa1.ising import generate_bipartite_regular

from conftest import random_int_model, small_models


def all_spins(n):
    return np.array(list(itertools.product([1, -1], repeat=n)))


def test_energy_single_edge(single_edge):
    assert energy(single_edge, [1, -1]) == -1


def test_energy_triangle(triangle):
    assert energy(triangle, [1, 1, 1]) == 3


def test_energy_matches_double_sum(rng):
    m = random_int_model(rng, 8)
    J = m.coupling_matrix() / 2  # both triangles hold the full coefficient
    for _ in range(100):
        s = rng.choice([-1, 1], size=8)
        direct = sum(J[j, k] * s[j] * s[k] for j in range(8) for k in range(8))
        direct += float(m.fields @ s)
        assert energy(m, s) == pytest.approx(direct, abs=1e-12)


def test_energy_batch_and_length_check(triangle):
    S = all_spins(3)
    np.testing.assert_array_equal(energy(triangle, S), [energy(triangle, s) for s in S])
    with pytest.raises(InputError):
        energy(triangle, [1, 1])
    with pytest.raises(InputError):
        energy(triangle, [1, 0, 1])


def test_model_rejects_bad_input():
    with pytest.raises(InputError):
        IsingModel(2, {(0, 0): 1.0})
    with pytest.raises(InputError):
        IsingModel(2, {(0, 2): 1.0})
    with pytest.raises(InputError):
        IsingModel(2, {(0, 1): float("nan")})


def test_zero_couplings_are_dropped():
    m = IsingModel(3, {(0, 1): 0.0, (1, 2): 2.0})
    assert m.num_edges == 1


def test_weight_class():
    assert IsingModel(2, {(0, 1): 3.0}).weight_class == "integer"
    assert IsingModel(2, {(0, 1): 0.5}).scale == 2
    assert IsingModel(2, {(0, 1): np.pi}).weight_class == "real"


def test_from_qubo_zero():
    m = from_qubo(QuboModel(np.zeros((3, 3)), np.zeros(3)))
    assert m.num_edges == 0 and not m.has_fields and m.constant == 0


def test_from_qubo_product():
    q = QuboModel(np.array([[0, 0.5], [0.5, 0]]), np.zeros(2))
    m = from_qubo(q)
    for x in itertools.product([0, 1], repeat=2):
        x = np.array(x)
        assert q.value(x) == energy(m, 2 * x - 1)


def test_from_qubo_exhaustive(rng):
    A = rng.integers(-5, 6, size=(6, 6)).astype(float)
    A = A + A.T
    q = QuboModel(A, rng.integers(-5, 6, size=6).astype(float))
    m = from_qubo(q)
    for x in itertools.product([0, 1], repeat=6):
        x = np.array(x)
        assert q.value(x) == energy(m, 2 * x - 1)


def test_from_qubo_rejects_asymmetric():
    with pytest.raises(InputError):
        QuboModel(np.array([[0, 1.0], [0, 0]]), np.zeros(2))


@settings(max_examples=40, deadline=None)
@given(small_models(max_n=6))
def test_qubo_roundtrip_property(m):
    q, offset = to_qubo(m)
    for s in all_spins(m.n):
        x = (s + 1) // 2
        assert q.value(x) + offset == pytest.approx(energy(m, s), abs=1e-9)


def test_eliminate_fields_identity(triangle):
    assert eliminate_fields(triangle) == triangle


def test_eliminate_fields_single_spin():
    m = IsingModel(1, fields=[3.0])
    ext = eliminate_fields(m)
    assert ext.n == 2 and not ext.has_fields
    assert ext.couplings == {(0, 1): 3.0}
    for s in (1, -1):
        assert energy(m, [s]) == energy(ext, [s, 1])


def test_eliminate_fields_exhaustive(rng):
    m = random_int_model(rng, 8)
    ext = eliminate_fields(m)
    S = all_spins(8)
    E = energy(m, S)
    Ext = energy(ext, np.hstack([S, np.ones((S.shape[0], 1), dtype=int)]))
    np.testing.assert_array_equal(E, Ext)


def test_erdos_renyi():
    assert generate_erdos_renyi(6, 0.0, "pm1", 1).num_edges == 0
    assert generate_erdos_renyi(4, 1.0, "pm1", 1).num_edges == 6
    a = generate_erdos_renyi(10, 0.5, "gaussian:50,30", 7)
    b = generate_erdos_renyi(10, 0.5, "gaussian:50,30", 7)
    assert a == b
    with pytest.raises(InputError):
        generate_erdos_renyi(4, 1.5, "pm1", 1)


def test_weight_dist_never_zero():
    w = WeightDist.parse("gaussian:0,1").sample(np.random.default_rng(0), 5000)
    assert np.all(w != 0) and np.all(w == np.round(w))
    with pytest.raises(InputError):
        WeightDist.parse("cauchy:0,1")


def test_d_regular():
    k4 = generate_d_regular(4, 3, "pm1", 0)
    assert k4.num_edges == 6
    c = generate_d_regular(6, 2, "pm1", 0)
    assert np.all(c.degrees() == 2)
    a = generate_d_regular(20, 4, "pm1", 3)
    assert np.all(a.degrees() == 4) and a == generate_d_regular(20, 4, "pm1", 3)
    with pytest.raises(InputError):
        generate_d_regular(5, 3, "pm1", 0)


@pytest.mark.parametrize("D", [3, 4, 5])
def test_bipartite_regular_is_triangle_free(D):
    m = generate_bipartite_regular(16, D, "pm1", 0)
    assert np.all(m.degrees() == D)
    A = m.coupling_matrix() != 0
    assert np.trace(np.linalg.matrix_power(A.astype(int), 3)) == 0


def test_text_isolated_vertices():
    m = model_from_text("ising 3\nnode 0 1\nnode 1 -1\n")
    assert m.num_edges == 0
    np.testing.assert_array_equal(m.fields, [1, -1, 0])


def test_save_load_roundtrip(tmp_path, rng):
    m = generate_erdos_renyi(10, 0.5, "gaussian:0,100", 4, "uniform:-3,3")
    p = tmp_path / "m.txt"
    save_model(m, p)
    assert load_model(p) == m
    real = IsingModel(3, {(0, 1): 0.1 + 0.2, (1, 2): np.pi}, [np.e, 0, 0], constant=1 / 3)
    assert model_from_text(model_to_text(real)) == real


@pytest.mark.parametrize("text, line, word", [
    ("ising 3\nedge 2 2 1\n", 2, "self-loop"),
    ("ising 3\nedge 0 1 1\nedge 1 0 2\n", 3, "duplicate"),
    ("ising 3\n\nedge 0 5 1\n", 3, "out of range"),
    ("ising 3\nedge 0 1\n", 2, "malformed"),
    ("edge 0 1 1\n", 1, "header"),
])
def test_parse_errors(text, line, word):
    with pytest.raises(ParseError) as exc:
        model_from_text(text)
    assert exc.value.line == line and word in str(exc.value)


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=20, deadline=None)
def test_generated_models_roundtrip_text(seed):
    m = generate_erdos_renyi(6, 0.5, "gaussian:0,10", seed, "gaussian:0,4")
    assert model_from_text(model_to_text(m)) == m
