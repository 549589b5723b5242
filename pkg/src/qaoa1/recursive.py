"""Recursive rounding solvers built on tuned level-1 QAOA correlators.

Each step freezes one variable: either assigns the spin with the strongest
single-spin expectation, or ties the endpoints of the strongest edge
correlation (``Z_u = sign * Z_v``; u is eliminated, v survives). The remainder
is solved exactly and the frozen variables are recovered by replaying the
steps in reverse.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import check_count, check_model
from .analytic import build_index, correlators
from .exceptions import CapacityError, ConfigurationError, InputError
from .ising import IsingModel, eliminate_fields, energy
from .optimize import optimize_angles
from .oracle import MAX_BRUTE_FORCE_N, GroundTruth, approximation_ratio, brute_force
from .spectral import sampling_plan

log = logging.getLogger(__name__)

TUNER_METHODS = ("gradient_near_zero", "line_search", "subdivision", "coarse")


def _sign(x):
    return 1 if x >= 0 else -1


@dataclass(frozen=True)
class Tuner:
    """How angles are chosen at each step.

    ``method``: gradient_near_zero | line_search | subdivision | coarse
    (a 20-sample grid on [0, pi] then descent). ``fields``: ``native`` tunes
    with the with-fields formulas; ``eliminate`` folds fields into an ancilla
    spin first and runs the whole recursion field-free.
    """

    method: str = "gradient_near_zero"
    fields: str = "native"
    epsilon: float = 1e-6
    num_samples: int | None = None

    def __post_init__(self):
        if self.method not in TUNER_METHODS:
            raise ConfigurationError(f"unknown tuner method {self.method!r}")
        if self.fields not in ("native", "eliminate"):
            raise ConfigurationError(f"unknown field handling {self.fields!r}")

    def tune(self, model, index):
        n = self.num_samples
        if self.method == "coarse":
            n = n or 20
        return optimize_angles(model, self.method, index, "auto", self.epsilon, n)


@dataclass(frozen=True)
class ReductionStep:
    kind: str  # "assign" or "substitute"
    u: int  # eliminated variable (original label)
    sign: int
    step_index: int
    magnitude: float
    v: int | None = None  # survivor, substitute only
    gamma: float = float("nan")
    beta: float = float("nan")
    fallback: bool = False

    def to_dict(self):
        return asdict(self)


@dataclass
class ReductionTrace:
    steps: list
    constant_accumulated: float  # constant of final_model, original constant included
    final_model: IsingModel
    final_labels: list
    final_truth: GroundTruth | None = None

    def to_dict(self):
        return {"steps": [s.to_dict() for s in self.steps],
                "constant_accumulated": self.constant_accumulated,
                "final_labels": list(self.final_labels),
                "final_model": self.final_model.to_dict(),
                "final_truth": self.final_truth.to_dict() if self.final_truth else None}


@dataclass
class SolverReport:
    method: str
    config: dict
    instance: dict
    gamma_star: float
    beta_star: float
    energy: float  # constant-free
    constant: float
    approximation_ratio: float | None
    evaluations: int
    wall_time_ms: float
    plan: dict

    def to_dict(self):
        return asdict(self)


class _State:
    """Mutable working copy of a model over original labels."""

    def __init__(self, model):
        self.adj = {i: dict(a) for i, a in enumerate(model.adjacency)}
        self.h = {i: float(x) for i, x in enumerate(model.fields)}
        self.constant = model.constant

    def labels(self):
        return sorted(self.adj)

    def to_model(self):
        labels = self.labels()
        pos = {lab: k for k, lab in enumerate(labels)}
        couplings = {}
        for a in labels:
            for b, w in self.adj[a].items():
                if a < b:
                    couplings[(pos[a], pos[b])] = w
        fields = [self.h[lab] for lab in labels]
        return IsingModel(len(labels), couplings, fields, self.constant), labels

    def _drop(self, u):
        for j in self.adj[u]:
            del self.adj[j][u]
        del self.adj[u]
        del self.h[u]

    def assign(self, u, sign):
        for j, w in self.adj[u].items():
            self.h[j] += sign * w
        self.constant += sign * self.h[u]
        self._drop(u)

    def substitute(self, u, v, sign):
        """Replace Z_u by sign * Z_v everywhere."""
        self.constant += sign * self.adj[u][v]
        for j, w in self.adj[u].items():
            if j == v:
                continue
            merged = self.adj[v].get(j, 0.0) + sign * w
            if merged == 0.0:
                self.adj[v].pop(j, None)
                self.adj[j].pop(v, None)
            else:
                self.adj[v][j] = merged
                self.adj[j][v] = merged
        self.h[v] += sign * self.h[u]
        self._drop(u)

    def apply(self, step):
        if step.kind == "assign":
            self.assign(step.u, step.sign)
        else:
            self.substitute(step.u, step.v, step.sign)


def replay(model, steps):
    """Model after applying ``steps`` to ``model``: (IsingModel, labels)."""
    st = _State(model)
    for s in steps:
        st.apply(s)
    return st.to_model()


def backtrack(trace: ReductionTrace, remainder_solution):
    """Full assignment (dict label -> spin, returned as a vector) from the remainder."""
    spins = {}
    if isinstance(remainder_solution, dict):
        spins.update(remainder_solution)
    else:
        sol = np.asarray(remainder_solution)
        if sol.shape != (len(trace.final_labels),):
            raise InputError("remainder solution must assign every surviving variable")
        spins.update(zip(trace.final_labels, (int(x) for x in sol)))
    missing = set(trace.final_labels) - set(spins)
    if missing:
        raise InputError(f"remainder solution misses variables {sorted(missing)}")
    for step in reversed(trace.steps):
        if step.kind == "assign":
            spins[step.u] = step.sign
        else:
            spins[step.u] = step.sign * spins[step.v]
    n = len(spins)
    return np.array([spins[i] for i in range(n)], dtype=np.int8)


def _guards(model, steps):
    check_model(model)
    steps = check_count(steps, "steps")
    if steps > model.n - 1:
        raise InputError(f"steps must be at most n - 1 = {model.n - 1}")
    if model.n - steps > MAX_BRUTE_FORCE_N:
        raise CapacityError(f"remainder of {model.n - steps} variables exceeds the exhaustive limit")
    return steps


def _run(model, steps, tuner, linear_only):
    st = _State(model)
    trace_steps = []
    evaluations = 0
    first = None
    for t in range(steps):
        cur, labels = st.to_model()
        ix = build_index(cur)
        res = tuner.tune(cur, ix)
        evaluations += res.evaluations
        if first is None:
            first = res
        Mi, Muv = correlators(cur, ix, (res.gamma_star, res.beta_star))
        absMi = np.abs(Mi)
        i = int(np.argmax(absMi))
        kw = dict(step_index=t, gamma=res.gamma_star, beta=res.beta_star)
        if linear_only:
            if absMi[i] == 0.0:
                h = cur.fields
                i = int(np.argmax(np.abs(h)))
                sign = -_sign(h[i])
                log.warning("all single-spin expectations vanish at step %d; assigning "
                            "variable %d by the sign of its field", t, labels[i])
                step = ReductionStep("assign", labels[i], sign, magnitude=0.0, fallback=True, **kw)
            else:
                step = ReductionStep("assign", labels[i], _sign(Mi[i]), magnitude=float(absMi[i]), **kw)
        else:
            k = int(np.argmax(np.abs(Muv))) if Muv.size else -1
            if k < 0 or absMi[i] >= abs(Muv[k]):
                step = ReductionStep("assign", labels[i], _sign(Mi[i]), magnitude=float(absMi[i]), **kw)
            else:
                a, b = labels[cur.edges[k, 0]], labels[cur.edges[k, 1]]
                step = ReductionStep("substitute", b, _sign(Muv[k]), magnitude=float(abs(Muv[k])),
                                     v=a, **kw)
        st.apply(step)
        trace_steps.append(step)
    final, labels = st.to_model()
    truth = brute_force(final)
    trace = ReductionTrace(trace_steps, final.constant, final, labels, truth)
    spins = backtrack(trace, truth.argmin)
    return spins, trace, evaluations, first


def _report(method, tuner, model, spins, trace, evaluations, first, t0, seed, steps):
    e = energy(model, spins) - model.constant
    ratio = None
    if model.n <= MAX_BRUTE_FORCE_N:
        truth = brute_force(model)
        if truth.e_min < 0:
            ratio = approximation_ratio(e, truth)
    plan = sampling_plan(model)
    return SolverReport(
        method=method,
        config={"steps": steps, "tuner": asdict(tuner), "seed": seed},
        instance={"n": model.n, "edges": model.num_edges, "weight_class": model.weight_class,
                  "seed": seed},
        gamma_star=first.gamma_star if first else float("nan"),
        beta_star=first.beta_star if first else float("nan"),
        energy=float(e), constant=model.constant, approximation_ratio=ratio,
        evaluations=evaluations, wall_time_ms=1e3 * (time.perf_counter() - t0),
        plan=plan.to_dict())


def rqaoa(model, steps, tuner=None, rng_seed=None):
    """RQAOA: (spins, trace, report). ``steps`` counts eliminations.

    The procedure is deterministic; ``rng_seed`` is only echoed in the report.
    """
    tuner = tuner or Tuner()
    t0 = time.perf_counter()
    steps = _guards(model, steps)
    if tuner.fields == "eliminate" and model.has_fields:
        ext = eliminate_fields(model)
        spins, trace, evals, first = _run(ext, steps, tuner, linear_only=False)
        if spins[-1] < 0:  # field-free extension is flip symmetric: pin the ancilla to +1
            spins = -spins
        spins = spins[:-1]
    else:
        spins, trace, evals, first = _run(model, steps, tuner, linear_only=False)
    report = _report("rqaoa", tuner, model, spins, trace, evals, first, t0, rng_seed, steps)
    return spins, trace, report


def iter_qaoa(model, steps, tuner=None, rng_seed=None):
    """Iter-QAOA: rounds using single-spin expectations only."""
    tuner = tuner or Tuner()
    if tuner.fields == "eliminate":
        raise ConfigurationError("iter_qaoa needs native field handling")
    t0 = time.perf_counter()
    steps = _guards(model, steps)
    spins, trace, evals, first = _run(model, steps, tuner, linear_only=True)
    report = _report("iter_qaoa", tuner, model, spins, trace, evals, first, t0, rng_seed, steps)
    return spins, trace, report


def qaoa1_baseline(model, tuner=None):
    """Tuned expected value <H_P> (constant-free) and its optimisation result."""
    tuner = tuner or Tuner()
    if tuner.fields == "eliminate" and model.has_fields:
        ext = eliminate_fields(model)
        res = tuner.tune(ext, build_index(ext))
    else:
        res = tuner.tune(model, build_index(model))
    return res.value, res


def solution_energy_is_consistent(model, spins, trace):
    """Backtracked energy equals remainder minimum plus accumulated constant."""
    lhs = energy(model, spins)
    rhs = trace.final_truth.e_min + trace.constant_accumulated
    tol = 0.0 if model.scale is not None else 1e-9 * max(1.0, abs(rhs))
    return math.isclose(lhs, rhs, rel_tol=0.0, abs_tol=tol) or lhs == rhs
