import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from qaoa1 import (InputError, IsingModel, MomentSummary, gradient_descent_near_zero,
                   line_search, optimize_angles, predicted_gamma_star, sampling_plan,
                   scaled_expected_cost, subdivision_optimize)
from qaoa1.exceptions import NumericError, UnsupportedCaseError
from qaoa1.optimize import C1, C2, coarse_line_search, eta, moments_from_model, zeta
from qaoa1.univariate import univariate_arrays

from conftest import random_int_model


def dense_minimum(m, points=100_000):
    plan = sampling_plan(m)
    g = np.linspace(0, plan.period, points, endpoint=False)
    v, _ = univariate_arrays(m, None, g)
    k = int(np.argmin(v))
    h = plan.period / points
    from qaoa1.univariate import UnivariateFunction
    f = UnivariateFunction(m)
    r = minimize_scalar(f, bounds=(g[k] - h, g[k] + h), method="bounded",
                        options={"xatol": 1e-12})
    return min(v[k], r.fun)


def test_subdivision_single_edge(single_edge):
    r = subdivision_optimize(single_edge, epsilon=1e-6)
    assert abs(r.value + 1) <= 1e-6


def test_subdivision_flat():
    m = IsingModel(3)
    r = subdivision_optimize(m)
    plan = sampling_plan(m)
    delta = plan.period / math.ceil(plan.period / plan.delta_gamma)
    assert r.gamma_star == pytest.approx(delta / 2) and r.value == 0


def test_subdivision_errors(single_edge):
    with pytest.raises(InputError):
        subdivision_optimize(IsingModel(2, {(0, 1): math.sqrt(3)}))
    with pytest.raises(InputError):
        subdivision_optimize(single_edge, epsilon=0)


def test_subdivision_matches_dense_search():
    rng = np.random.default_rng(10)
    m = random_int_model(rng, 10)
    r = subdivision_optimize(m, epsilon=1e-6)
    assert abs(r.value - dense_minimum(m)) <= 1e-4


def test_subdivision_never_prunes_the_optimum(rng):
    m = random_int_model(rng, 8)
    r = subdivision_optimize(m, epsilon=1e-8, record=True)
    best = line_search(m).gamma_star
    for rnd in r.info["history"]:
        inside = (rnd["lefts"] <= best) & (best < rnd["lefts"] + rnd["delta"])
        if inside.any():
            assert rnd["keep"][inside].any()


def test_gradient_single_edge(single_edge):
    r = gradient_descent_near_zero(single_edge)
    assert r.gamma_star == pytest.approx(math.pi / 4, abs=1e-6)
    assert r.value == pytest.approx(-1, abs=1e-8)


def test_gradient_flat():
    m = IsingModel(2)
    r = gradient_descent_near_zero(m)
    assert r.gamma_star == pytest.approx(sampling_plan(m).delta_gamma / 2) and r.value == 0


def test_gradient_real_weights():
    m = IsingModel(3, {(0, 1): math.sqrt(2), (1, 2): -math.e}, [0.5, 0, 0])
    r = gradient_descent_near_zero(m)
    assert r.value < 0 and r.gamma_star > 0


def test_gradient_non_finite(monkeypatch, single_edge):
    import qaoa1.optimize as opt

    monkeypatch.setattr(opt.UnivariateFunction, "__call__", lambda self, g: float("nan"))
    with pytest.raises(NumericError):
        gradient_descent_near_zero(single_edge)


def test_line_search_single_edge(single_edge):
    plan = sampling_plan(single_edge)
    raw = line_search(single_edge, refine=False)
    assert min(abs(raw.gamma_star - math.pi / 4), abs(raw.gamma_star - 3 * math.pi / 4)) <= plan.delta_gamma
    r = line_search(single_edge)
    assert r.value == pytest.approx(-1, abs=1e-8)


def test_coarse_configuration(rng):
    m = random_int_model(rng, 6)
    r = coarse_line_search(m)
    assert r.info["num_samples"] == 20 and r.info["interval"] == [0.0, math.pi]


def test_methods_agree(rng):
    for _ in range(5):
        m = random_int_model(rng, 8)
        a = optimize_angles(m, "subdivision")
        b = optimize_angles(m, "line_search")
        assert abs(a.value - b.value) <= 1e-4
    with pytest.raises(InputError):
        optimize_angles(m, "annealing")


def test_predicted_gamma_examples():
    assert predicted_gamma_star(MomentSummary(0.0, 1.0, 4)) == pytest.approx(0.25)
    assert predicted_gamma_star(MomentSummary(0.0, 1.0, 64)) == pytest.approx(1 / 16)
    m = MomentSummary(1.0, 2.0, 100, a=0, b=1, mu=1)
    assert predicted_gamma_star(m) == pytest.approx(math.sqrt(math.log(3) / 800))


def test_zeta_is_argmin_of_c2():
    m = MomentSummary(-1.0, 2.0, 100, a=0, b=1, mu=1)
    alpha_star = zeta(1, 1, m) * math.sqrt(m.D)
    r = minimize_scalar(lambda a: C2(a, 3 * math.pi / 8, 1, 1, m), bounds=(1e-3, 3),
                        method="bounded", options={"xatol": 1e-10})
    assert r.x == pytest.approx(alpha_star, rel=1e-6)


def test_predicted_gamma_errors():
    with pytest.raises(UnsupportedCaseError):
        predicted_gamma_star(MomentSummary(0.5, 1.0, 16, a=1, b=1, lam=1, mu=0.5))
    with pytest.raises(InputError):
        zeta(1, 1, MomentSummary(0.0, 1.0, 16))


def test_table_cases():
    m = dict(ej=0.5, ej2=1.0, D=36)
    assert predicted_gamma_star(MomentSummary(**m, a=1, b=2, lam=1, mu=1)) == zeta(1, 2, MomentSummary(**m, a=1, b=2, mu=1))
    assert predicted_gamma_star(MomentSummary(**m, a=1, b=2, lam=0.5, mu=1)) == pytest.approx(
        zeta(2, 2, MomentSummary(**m)))
    assert predicted_gamma_star(MomentSummary(**m, a=3, b=1, lam=1, mu=0.8)) == pytest.approx(
        eta(6, MomentSummary(**m)))
    assert predicted_gamma_star(MomentSummary(**m, a=3, b=1, lam=1, mu=0.2)) == pytest.approx(
        eta(4, MomentSummary(**m)))


@pytest.mark.parametrize("kw", [
    dict(a=1, b=0), dict(a=0, b=1, mu=1), dict(a=1, b=1, lam=1, mu=1), dict(a=1, b=1, lam=0.5, mu=1),
    dict(a=1, b=1, lam=1, mu=0.8), dict(a=1, b=1, lam=1, mu=0.2),
])
def test_scaled_cost_vanishes_at_zero(kw):
    m = MomentSummary(0.3, 1.0, 25, **kw)
    assert scaled_expected_cost(0.0, 1.1, m) == 0


def test_c1_argmin_half():
    m = MomentSummary(0.0, 1.0, 49)
    r = minimize_scalar(lambda a: C1(a, 3 * math.pi / 8, m), bounds=(1e-6, 3), method="bounded",
                        options={"xatol": 1e-12})
    assert abs(r.x - 0.5) <= 1e-6


def test_scaled_cost_unsupported():
    with pytest.raises(UnsupportedCaseError):
        scaled_expected_cost(0.3, 1.0, MomentSummary(0.1, 1.0, 9, a=1, b=1, lam=0.3, mu=0.5))


def test_moments_from_model():
    from qaoa1.ising import generate_bipartite_regular

    m = moments_from_model(generate_bipartite_regular(20, 5, "pm1", 0))
    assert m.D == 4 and m.ej2 == 1
    with pytest.raises(InputError):
        moments_from_model(IsingModel(3, {(0, 1): 1.0}))
