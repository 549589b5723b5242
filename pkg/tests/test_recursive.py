import itertools
import logging

import numpy as np
import pytest

from qaoa1 import (CapacityError, InputError, IsingModel, Tuner, backtrack, build_index,
                   correlators, energy, generate_erdos_renyi, iter_qaoa, optimize_angles, rqaoa)
from qaoa1.exceptions import ConfigurationError
from qaoa1.recursive import ReductionStep, ReductionTrace, replay, solution_energy_is_consistent


def test_ferromagnet_pair():
    m = IsingModel(2, {(0, 1): -1.0})
    spins, trace, rep = rqaoa(m, 1)
    (step,) = trace.steps
    assert step.kind == "substitute" and step.sign == 1 and (step.u, step.v) == (1, 0)
    assert trace.constant_accumulated == -1
    assert energy(m, spins) == -1 and rep.approximation_ratio == 1


def test_zero_steps_is_exact():
    m = generate_erdos_renyi(12, 0.5, "gaussian:0,100", 3)
    _, trace, rep = rqaoa(m, 0)
    assert rep.approximation_ratio == 1 and trace.steps == []


def test_single_spin_iter():
    m = IsingModel(1, fields=[1.0])
    res = optimize_angles(m)
    Mi, _ = correlators(m, None, (res.gamma_star, res.beta_star))
    assert Mi[0] < 0
    spins, _, rep = iter_qaoa(m, 0)
    assert spins.tolist() == [-1] and rep.energy == -1 and rep.approximation_ratio == 1


def test_iter_field_free_fallback(caplog):
    m = generate_erdos_renyi(6, 0.6, "pm1", 2)
    with caplog.at_level(logging.WARNING, logger="qaoa1.recursive"):
        spins, trace, _ = iter_qaoa(m, 2)
    assert trace.steps[0].fallback
    assert "vanish" in caplog.text
    assert solution_energy_is_consistent(m, spins, trace)


def test_guards():
    m = generate_erdos_renyi(6, 0.5, "pm1", 0)
    with pytest.raises(InputError):
        rqaoa(m, 6)
    with pytest.raises(InputError):
        rqaoa(m, -1)
    with pytest.raises(CapacityError):
        rqaoa(generate_erdos_renyi(27, 0.1, "pm1", 0), 2)
    with pytest.raises(ConfigurationError):
        Tuner(method="newton")
    with pytest.raises(ConfigurationError):
        iter_qaoa(m, 1, Tuner(fields="eliminate"))


def test_backtrack_examples():
    m = IsingModel(2, {(0, 1): 1.0})
    empty = ReductionTrace([], 0.0, m, [0, 1])
    assert backtrack(empty, [1, -1]).tolist() == [1, -1]
    step = ReductionStep("substitute", 0, 1, 0, 1.0, v=1)
    tr = ReductionTrace([step], 0.0, IsingModel(1), [1])
    assert backtrack(tr, [1]).tolist() == [1, 1]
    with pytest.raises(InputError):
        backtrack(tr, [])


@pytest.mark.parametrize("fields", [None, "gaussian:40,20"])
def test_energy_identity_sixteen(fields):
    m = generate_erdos_renyi(16, 0.5, "gaussian:50,30", 11, fields)
    spins, trace, rep = rqaoa(m, 10)
    assert energy(m, spins) == trace.final_truth.e_min + trace.constant_accumulated
    assert rep.energy == energy(m, spins) - m.constant
    assert len(trace.steps) == 10 and trace.final_model.n == 6
    assert len({s.u for s in trace.steps}) == 10


def _consistent(S, steps):
    ok = np.ones(len(S), dtype=bool)
    for st in steps:
        if st.kind == "assign":
            ok &= S[:, st.u] == st.sign
        else:
            ok &= S[:, st.u] == st.sign * S[:, st.v]
    return ok


@pytest.mark.parametrize("solver, fields", [(rqaoa, None), (rqaoa, "gaussian:0,4"),
                                            (iter_qaoa, "gaussian:0,4")])
def test_bookkeeping_exhaustive(solver, fields):
    m = generate_erdos_renyi(10, 0.5, "gaussian:0,9", 5, fields)
    _, trace, _ = solver(m, 7)
    S = np.array(list(itertools.product([1, -1], repeat=10)))
    E = energy(m, S)
    for t in range(len(trace.steps) + 1):
        cur, _ = replay(m, trace.steps[:t])
        ok = _consistent(S, trace.steps[:t])
        sub = np.array(list(itertools.product([1, -1], repeat=cur.n)))
        assert E[ok].min() == pytest.approx(energy(cur, sub).min(), abs=1e-9)


def test_replay_matches_final_model():
    m = generate_erdos_renyi(12, 0.5, "gaussian:0,25", 8, "gaussian:0,4")
    _, trace, _ = rqaoa(m, 6)
    again, labels = replay(m, trace.steps)
    assert again == trace.final_model and labels == trace.final_labels


def test_determinism():
    m = generate_erdos_renyi(12, 0.5, "gaussian:50,30", 4, "gaussian:40,20")
    a = rqaoa(m, 5, rng_seed=1)[1].to_dict()
    b = rqaoa(m, 5, rng_seed=1)[1].to_dict()
    assert a == b


def test_eliminate_mode():
    m = generate_erdos_renyi(10, 0.5, "gaussian:50,30", 6, "gaussian:40,20")
    spins, trace, rep = rqaoa(m, 5, Tuner(fields="eliminate"))
    assert spins.shape == (10,)
    assert trace.final_model.n == 11 - 5
    assert rep.approximation_ratio <= 1 + 1e-12


@pytest.mark.parametrize("method", ["line_search", "subdivision", "coarse"])
def test_other_tuners(method):
    m = generate_erdos_renyi(10, 0.5, "gaussian:0,25", 9)
    spins, trace, rep = rqaoa(m, 4, Tuner(method=method))
    assert solution_energy_is_consistent(m, spins, trace)
    assert rep.approximation_ratio <= 1 + 1e-12


def test_trace_serialises():
    import json

    m = generate_erdos_renyi(8, 0.5, "pm1", 1, "pm1")
    _, trace, rep = iter_qaoa(m, 3)
    d = json.loads(json.dumps(trace.to_dict()))
    assert [s["kind"] for s in d["steps"]] == ["assign"] * 3
    assert {"gamma", "beta", "magnitude", "sign"} <= set(d["steps"][0])
