"""Command-line front end.

Every subcommand writes to ``--out`` (or stdout). JSON reports carry
``"schema": 1`` and the full parsed configuration, so a run is reproducible
from its command line alone. Exit codes: 0 ok, 2 usage, 3 capacity,
4 numeric failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import time

import numpy as np

from . import jsonio
from .analytic import build_index, correlators, expectation
from .exceptions import CapacityError, InputError, NumericError
from .experiments import EnsembleSpec, run_concentration, run_solvers
from .ising import (WeightDist, generate_bipartite_regular, generate_d_regular,
                    generate_erdos_renyi, load_model, model_to_text)
from .optimize import optimize_angles
from .oracle import (MAX_BRUTE_FORCE_N, MAX_STATEVECTOR_N, approximation_ratio, brute_force,
                     gray_code_minimum, statevector_correlators, statevector_expectation)
from .recursive import Tuner, iter_qaoa, rqaoa
from .spectral import eval_angle, hp_spectrum_range, sample_landscape, sampling_plan

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_NUMERIC = 0, 2, 3, 4

TUNE_METHODS = ("gradient", "gradient_near_zero", "subdivision", "line_search", "coarse")


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _emit_json(obj, out):
    _emit(jsonio.dumps(obj) + "\n", out)


def _config(args):
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _warn(msg):
    print(f"warning: {msg}", file=sys.stderr)


def _instance(model, seed=None):
    return {"n": model.n, "edges": model.num_edges, "weight_class": model.weight_class,
            "seed": seed}


def _ratio_fields(model, energy):
    """{'approximation_ratio': r} when the exact minimum is available and negative."""
    if model.n > MAX_BRUTE_FORCE_N:
        return {}
    truth = brute_force(model)
    if truth.e_min >= 0:
        return {}
    return {"approximation_ratio": approximation_ratio(energy, truth)}


def _plan_summary(plan):
    return {"omega_max": plan.omega_max, "delta_gamma": plan.delta_gamma, "period": plan.period}


# -- subcommands -------------------------------------------------------------------

def cmd_generate(args):
    w = WeightDist.parse(args.weights)
    f = WeightDist.parse(args.fields) if args.fields else None
    if args.family == "er":
        model = generate_erdos_renyi(args.n, args.p, w, args.seed, f)
    elif args.family == "regular":
        model = generate_d_regular(args.n, args.degree, w, args.seed, f)
    else:
        if f is not None:
            raise InputError("the bipartite family has no field option")
        model = generate_bipartite_regular(args.n, args.degree, w, args.seed)
    _emit(model_to_text(model), args.out)


def _parse_range(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"--range expects 'lo,hi', got {text!r}")
    return eval_angle(parts[0]), eval_angle(parts[1])


def cmd_landscape(args):
    model = load_model(args.model)
    ix = build_index(model)
    plan = sampling_plan(model, ix)
    interval = _parse_range(args.range) if args.range else None
    if interval is None:
        if plan.period is None:
            raise InputError("weights have no common period: pass --range lo,hi")
        nyquist = plan.num_samples
    else:
        nyquist = max(2, math.ceil((interval[1] - interval[0]) / plan.delta_gamma))
    if args.samples is not None:
        if args.samples < 2:
            raise InputError("--samples must be at least 2")
        if args.samples < nyquist:
            _warn(f"{args.samples} rows is below the Nyquist count {nyquist}; "
                  "the landscape will be aliased")
    s = sample_landscape(model, plan, args.beta_policy, ix, interval, args.samples)
    _emit(s.to_csv(), args.out)


def cmd_maxfreq(args):
    model = load_model(args.model)
    plan = sampling_plan(model)
    payload = {"instance": _instance(model), "plan": plan.to_dict()}
    if args.spectrum:
        payload["hp_spectrum_range"] = hp_spectrum_range(model)
    _emit_json(jsonio.report("maxfreq", payload, _config(args)), args.out)


def cmd_tune(args):
    t0 = time.perf_counter()
    model = load_model(args.model)
    ix = build_index(model)
    res = optimize_angles(model, args.method, ix, "auto", args.epsilon, args.samples)
    plan = sampling_plan(model, ix)
    payload = {
        "instance": _instance(model, args.seed), "method": res.method,
        "gamma_star": res.gamma_star, "beta_star": res.beta_star,
        "energy": res.value, "constant": model.constant,
        **_ratio_fields(model, res.value),
        "evaluations": res.evaluations,
        "wall_time_ms": 1e3 * (time.perf_counter() - t0),
        "plan": _plan_summary(plan),
    }
    _emit_json(jsonio.report("tune", payload, _config(args)), args.out)


def _write_assignment(spins, path):
    if path:
        _emit(" ".join(str(int(x)) for x in spins) + "\n", path)


def cmd_solve(args):
    t0 = time.perf_counter()
    model = load_model(args.model)
    if args.method == "brute_force":
        truth = brute_force(model)
        spins = truth.argmin
        payload = {
            "instance": _instance(model, args.seed), "method": "brute_force",
            "gamma_star": None, "beta_star": None,
            "energy": truth.e_min, "constant": model.constant,
            **_ratio_fields(model, truth.e_min),
            "evaluations": 0, "wall_time_ms": 1e3 * (time.perf_counter() - t0),
            "plan": _plan_summary(sampling_plan(model)),
        }
    else:
        tuner = Tuner(args.tuner, args.fields, args.epsilon)
        solve = rqaoa if args.method == "rqaoa" else iter_qaoa
        spins, trace, rep = solve(model, args.steps, tuner, args.seed)
        payload = rep.to_dict()
        payload.pop("config")
        if payload["approximation_ratio"] is None:
            payload.pop("approximation_ratio")
        payload["plan"] = _plan_summary(sampling_plan(model))
        payload["trace"] = trace.to_dict()
    payload["assignment"] = [int(x) for x in spins]
    _write_assignment(spins, args.assignment)
    _emit_json(jsonio.report("solve", payload, _config(args)), args.out)


def cmd_experiment(args):
    spec = EnsembleSpec(args.family, args.n, args.count, args.weights, args.fields, args.p,
                        args.degree, args.seed)
    if args.kind == "concentration":
        result = run_concentration(spec, args.workers)
    else:
        tuner = Tuner(args.tuner, args.tuner_fields, args.epsilon)
        result = run_solvers(spec, args.steps, tuner, args.workers)
    _emit_json(jsonio.report("experiment", result, _config(args)), args.out)


def verify_suite(count=200, seed=0, tol=1e-9):
    """Closed-form expectations and correlators against the statevector, and the
    exhaustive minimum against a Gray-code walk, on seeded random models."""
    rng = np.random.default_rng(seed)
    worst = {"expectation": 0.0, "correlators": 0.0, "brute_force": 0.0}
    for i in range(count):
        n = int(rng.integers(2, 9))
        p = float(rng.choice([0.3, 0.6, 1.0]))
        w = "pm1" if i % 2 else "gaussian:0,1"
        f = "gaussian:0,1" if i % 3 else None
        model = generate_erdos_renyi(n, p, w, int(rng.integers(2**31)), f)
        g, b = rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi)
        ix = build_index(model)
        ref = statevector_expectation(model, g, b)
        worst["expectation"] = max(worst["expectation"], abs(expectation(model, g, b, ix) - ref))
        Mi, Muv = correlators(model, ix, (g, b))
        sMi, sMuv = statevector_correlators(model, g, b)
        err = max(np.max(np.abs(Mi - sMi), initial=0.0), np.max(np.abs(Muv - sMuv), initial=0.0))
        worst["correlators"] = max(worst["correlators"], float(err))
        truth = brute_force(model)
        lo, hi = gray_code_minimum(model)
        worst["brute_force"] = max(worst["brute_force"], abs(truth.e_min - lo), abs(truth.e_max - hi))
    return {"count": count, "seed": seed, "tolerance": tol, "max_abs_error": worst,
            "passed": all(v <= tol for v in worst.values()),
            "limits": {"statevector_n": MAX_STATEVECTOR_N, "brute_force_n": MAX_BRUTE_FORCE_N}}


def cmd_verify(args):
    result = verify_suite(args.count, args.seed, args.tolerance)
    _emit_json(jsonio.report("verify", result, _config(args)), args.out)
    if not result["passed"]:
        raise NumericError("oracle equivalence failed")


# -- parser ----------------------------------------------------------------------

def _ensemble_flags(p):
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--weights", default="gaussian:0,100",
                   help="gaussian:mean,var | uniform:lo,hi | pm1")
    p.add_argument("--fields", default=None, help="field distribution; omit for no fields")
    p.add_argument("--p", type=float, default=0.5, help="edge probability (er)")
    p.add_argument("--degree", type=int, default=3, help="vertex degree (regular, bipartite)")


def build_parser():
    ap = argparse.ArgumentParser(prog="qaoa1", description="Level-1 QAOA on Ising models.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random model file")
    g.add_argument("--family", choices=("er", "regular", "bipartite"), default="er")
    _ensemble_flags(g)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    ls = sub.add_parser("landscape", help="sample the gamma landscape to CSV")
    ls.add_argument("--model", required=True)
    ls.add_argument("--beta-policy", default="3pi/8", help="angle such as 3pi/8, or 'optimal'")
    ls.add_argument("--range", help="lo,hi; defaults to one full period")
    ls.add_argument("--samples", type=int, help="row count override")
    ls.add_argument("--out")
    ls.set_defaults(func=cmd_landscape)

    mf = sub.add_parser("maxfreq", help="bandwidth bound and sampling plan")
    mf.add_argument("--model", required=True)
    mf.add_argument("--spectrum", action="store_true", help="also report the cost spectrum range")
    mf.add_argument("--out")
    mf.set_defaults(func=cmd_maxfreq)

    t = sub.add_parser("tune", help="optimise (gamma, beta)")
    t.add_argument("--model", required=True)
    t.add_argument("--method", choices=TUNE_METHODS, default="gradient")
    t.add_argument("--epsilon", type=float, default=1e-6)
    t.add_argument("--samples", type=int, help="grid size for line_search / coarse")
    t.add_argument("--seed", type=int, default=None, help="echoed into the report")
    t.add_argument("--out")
    t.set_defaults(func=cmd_tune)

    s = sub.add_parser("solve", help="recursive QAOA or exhaustive search")
    s.add_argument("--model", required=True)
    s.add_argument("--method", choices=("rqaoa", "iter_qaoa", "brute_force"), default="rqaoa")
    s.add_argument("--steps", type=int, default=0)
    s.add_argument("--tuner", choices=("gradient_near_zero", "line_search", "subdivision", "coarse"),
                   default="gradient_near_zero")
    s.add_argument("--fields", choices=("native", "eliminate"), default="native")
    s.add_argument("--epsilon", type=float, default=1e-6)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--assignment", help="file for the spin assignment")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("experiment", help="seeded ensemble runs")
    e.add_argument("--kind", choices=("concentration", "solvers"), default="concentration")
    e.add_argument("--family", choices=("er", "regular", "bipartite", "single_edge"), default="er")
    _ensemble_flags(e)
    e.add_argument("--count", type=int, default=10)
    e.add_argument("--seed", type=int, default=0, help="seed base; instance i uses seed + i")
    e.add_argument("--steps", type=int, default=0)
    e.add_argument("--tuner", choices=("gradient_near_zero", "line_search", "subdivision", "coarse"),
                   default="gradient_near_zero")
    e.add_argument("--tuner-fields", choices=("native", "eliminate"), default="native")
    e.add_argument("--epsilon", type=float, default=1e-6)
    e.add_argument("--workers", type=int, default=None)
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify", help="closed forms against the statevector and exhaustive oracles")
    v.add_argument("--count", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tolerance", type=float, default=1e-9)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    logging.basicConfig(format="%(levelname)s: %(message)s", level=logging.WARNING)
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
