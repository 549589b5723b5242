"""Seeded ensembles and the per-instance experiment rows used by the CLI."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import build_index
from .exceptions import InputError
from .ising import WeightDist, generate_bipartite_regular, generate_d_regular, generate_erdos_renyi
from .optimize import gradient_descent_near_zero, line_search
from .oracle import brute_force
from .recursive import Tuner, iter_qaoa, qaoa1_baseline, rqaoa
from .spectral import sampling_plan

FAMILIES = ("er", "regular", "bipartite", "single_edge")


@dataclass(frozen=True)
class EnsembleSpec:
    family: str = "er"
    n: int = 16
    count: int = 10
    weights: str = "gaussian:0,100"
    fields: str | None = None
    p: float = 0.5
    degree: int = 3
    seed_base: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown graph family {self.family!r}; use one of {FAMILIES}")
        if self.count < 1:
            raise InputError("count must be positive")

    def model(self, i):
        seed = self.seed_base + i
        w = WeightDist.parse(self.weights)
        f = WeightDist.parse(self.fields) if self.fields else None
        if self.family == "er":
            return generate_erdos_renyi(self.n, self.p, w, seed, f)
        if self.family == "regular":
            return generate_d_regular(self.n, self.degree, w, seed, f)
        if self.family == "bipartite":
            return generate_bipartite_regular(self.n, self.degree, w, seed)
        return generate_erdos_renyi(2, 1.0, w, seed, f)

    def to_dict(self):
        return dict(self.__dict__)


def worker_count(requested=None):
    cap = os.environ.get("QAOA1_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise InputError(f"QAOA1_THREADS must be an integer, got {cap!r}") from None
    return max(1, n)


def parallel_map(fn, items, workers=None):
    """Order-preserving map; runs inline when one worker is available."""
    items = list(items)
    w = worker_count(workers)
    if w == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=w) as pool:
        return list(pool.map(fn, items))


def fold_gamma(gamma, period):
    """Map gamma onto [0, period/2]: the landscape is even and periodic."""
    g = math.fmod(gamma, period)
    if g < 0:
        g += period
    return min(g, period - g)


def concentration_row(model):
    """Near-zero descent versus the full Nyquist line search on one instance.

    The two optima match when their folded gammas differ by at most Delta_gamma / 2.
    """
    ix = build_index(model)
    plan = sampling_plan(model, ix)
    gd = gradient_descent_near_zero(model, ix, plan=plan)
    ls = line_search(model, ix, refine=True, plan=plan)
    gap = abs(fold_gamma(gd.gamma_star, plan.period) - fold_gamma(ls.gamma_star, plan.period))
    return {
        "n": model.n, "edges": model.num_edges, "omega_max": plan.omega_max,
        "delta_gamma": plan.delta_gamma,
        "gradient": {"gamma": gd.gamma_star, "beta": gd.beta_star, "value": gd.value,
                     "evaluations": gd.evaluations},
        "line_search": {"gamma": ls.gamma_star, "beta": ls.beta_star, "value": ls.value,
                        "evaluations": ls.evaluations},
        "match": bool(gap <= 0.5 * plan.delta_gamma),
        "value_gap": gd.value - ls.value,
    }


def _concentration_task(args):
    spec, i = args
    row = concentration_row(spec.model(i))
    row["seed"] = spec.seed_base + i
    return row


def run_concentration(spec: EnsembleSpec, workers=None):
    rows = parallel_map(_concentration_task, [(spec, i) for i in range(spec.count)], workers)
    mismatches = sum(not r["match"] for r in rows)
    return {"experiment": "concentration", "ensemble": spec.to_dict(), "rows": rows,
            "adversarial_fraction": mismatches / len(rows)}


def solver_row(model, steps, tuner):
    """Ratios of QAOA1 expectation, RQAOA and Iter-QAOA on one instance."""
    truth = brute_force(model)
    base, _ = qaoa1_baseline(model, tuner)
    row = {"n": model.n, "edges": model.num_edges, "e_min": truth.e_min,
           "qaoa1_ratio": base / truth.e_min if truth.e_min < 0 else None}
    s, tr, rep = rqaoa(model, steps, tuner)
    row["rqaoa_ratio"] = rep.approximation_ratio
    row["rqaoa_energy"] = rep.energy
    if model.has_fields:
        _, _, rep2 = iter_qaoa(model, steps, tuner)
        row["iter_qaoa_ratio"] = rep2.approximation_ratio
        row["iter_qaoa_energy"] = rep2.energy
    return row


def _solver_task(args):
    spec, i, steps, tuner = args
    row = solver_row(spec.model(i), steps, tuner)
    row["seed"] = spec.seed_base + i
    return row


def _summary(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    return {"mean": float(np.mean(vals)), "min": float(np.min(vals)), "max": float(np.max(vals))}


def run_solvers(spec: EnsembleSpec, steps, tuner=None, workers=None):
    tuner = tuner or Tuner()
    rows = parallel_map(_solver_task, [(spec, i, steps, tuner) for i in range(spec.count)], workers)
    keys = [k for k in ("qaoa1_ratio", "rqaoa_ratio", "iter_qaoa_ratio") if k in rows[0]]
    return {"experiment": "solvers", "ensemble": spec.to_dict(), "steps": steps,
            "tuner": tuner.__dict__, "rows": rows,
            "aggregate": {k: _summary([r.get(k) for r in rows]) for k in keys}}
