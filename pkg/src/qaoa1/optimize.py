"""Searching for (gamma*, beta*): subdivision, near-zero descent, line search,
plus the large-degree closed-form predictions."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import check_integer_weights, check_positive
from .analytic import _index_for
from .exceptions import InputError, NumericError, UnsupportedCaseError
from .spectral import sampling_plan
from .univariate import UnivariateFunction

METHODS = ("subdivision", "gradient_near_zero", "line_search", "closed_form")
_TIE = 1e-12


@dataclass
class OptimizationResult:
    gamma_star: float
    beta_star: float
    value: float  # constant-free
    evaluations: int
    method: str
    info: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _result(f, gamma, method, **info):
    v, b = f.values([gamma])
    return OptimizationResult(float(gamma), float(b[0]), float(v[0]), f.evaluations, method, info)


# -- subdivision -------------------------------------------------------------------

def subdivision_optimize(model, index=None, epsilon=1e-6, field_mode="auto", plan=None,
                         max_intervals=1 << 22, record=False) -> OptimizationResult:
    """Branch-and-prune maximisation of q = u(gamma)^2 over one period.

    Intervals of width D start at the Nyquist spacing. Each round evaluates
    the midpoints, keeps intervals whose midpoint satisfies q >= q~ cos(w D)
    (w = max angular frequency), splits them and halves D. It stops once
    q~ (sec(w D) - 1) < epsilon. The pruning rule uses the angular frequency:
    near a maximiser of a trigonometric polynomial with top frequency w,
    f(t0 + s) >= |f|_inf cos(w s), and q(mid) >= q* cos^2(w D / 2) >= q* cos(w D).
    """
    epsilon = check_positive(epsilon, "epsilon")
    check_integer_weights(model, "subdivision_optimize")
    f = UnivariateFunction(model, index, field_mode)
    plan = plan or sampling_plan(model, f.index)
    T, w = plan.period, plan.omega_max
    M = int(math.ceil(T / plan.delta_gamma))
    delta = T / M
    lefts = np.arange(M) * delta
    history = []

    best_g, best_q = None, -1.0

    def consider(mids, vals):
        nonlocal best_g, best_q
        q = np.where(vals <= 0.0, vals * vals, -1.0)  # sign guard: never report a positive cost
        k = int(np.argmax(q))
        if q[k] > best_q or (q[k] == best_q and mids[k] < best_g):
            best_g, best_q = float(mids[k]), float(q[k])
        return vals * vals

    rounds = 0
    while True:
        mids = lefts + 0.5 * delta
        vals, _ = f.values(mids)
        if not np.all(np.isfinite(vals)):
            raise NumericError("non-finite landscape value during subdivision")
        q = consider(mids, vals)
        q_tilde = float(q.max())
        if w == 0.0 or q_tilde == 0.0:
            break
        keep = q >= q_tilde * math.cos(w * delta)
        if record:
            history.append({"delta": delta, "lefts": lefts.copy(), "keep": keep.copy(),
                            "q_tilde": q_tilde})
        kept = lefts[keep]
        lefts = np.sort(np.concatenate([kept, kept + 0.5 * delta]))
        delta *= 0.5
        rounds += 1
        if lefts.size > max_intervals:
            raise NumericError(f"subdivision exceeded {max_intervals} live intervals")
        wd = w * delta
        if wd < 0.5 * math.pi and q_tilde * (1.0 / math.cos(wd) - 1.0) < epsilon:
            mids = lefts + 0.5 * delta
            vals, _ = f.values(mids)
            consider(mids, vals)
            break
    res = _result(f, best_g, "subdivision", rounds=rounds, final_delta=delta,
                  live_intervals=int(lefts.size), epsilon=epsilon)
    res.evaluations -= 1  # the closing re-evaluation is bookkeeping, not search
    if record:
        res.info["history"] = history
    return res


# -- descent -----------------------------------------------------------------------

def _fd_step(delta_gamma, gamma):
    return min(delta_gamma * 1e-3, 1e-5 * (1.0 + abs(gamma)))


def _descend(f, g, u, cap, lo=0.0, hi=math.inf, max_iter=10_000):
    """Backtracking descent on u(gamma) with central-difference gradients.

    Trial step is min(cap/4, Newton step when the curvature is positive);
    steps halve until Armijo (1e-4) holds; every step is shorter than ``cap``.
    """
    iters = 0
    for iters in range(1, max_iter + 1):
        h = _fd_step(cap, g)
        vals, _ = f.values([g - h, g + h])
        um, up = float(vals[0]), float(vals[1])
        if not (math.isfinite(um) and math.isfinite(up)):
            raise NumericError("non-finite landscape value during descent")
        grad = (up - um) / (2 * h)
        curv = (up - 2 * u + um) / (h * h)
        if abs(grad) <= 1e-10 * (1.0 + abs(u)) / cap:
            break
        t = 0.25 * cap
        if curv > 0:
            t = min(t, abs(grad) / curv)
        direction = -math.copysign(1.0, grad)
        accepted = False
        while t >= 1e-10 * cap:
            trial = min(max(g + direction * t, lo), hi)
            step = abs(trial - g)
            if step == 0.0:
                break
            ut = f(trial)
            if not math.isfinite(ut):
                raise NumericError("non-finite landscape value during descent")
            if ut <= u - 1e-4 * step * abs(grad):
                g, u, accepted = trial, ut, True
                break
            t *= 0.5
        if not accepted or step < 1e-10 * cap:
            break
    return g, u, iters


def gradient_descent_near_zero(model, index=None, field_mode="auto", plan=None) -> OptimizationResult:
    """First local minimum of the univariate cost along gamma > 0, from Delta_gamma / 2."""
    f = UnivariateFunction(model, index, field_mode)
    plan = plan or sampling_plan(model, f.index)
    dg = plan.delta_gamma
    g0 = 0.5 * dg
    u0 = f(g0)
    if not math.isfinite(u0):
        raise NumericError("non-finite landscape value at the start point")
    g, _, iters = _descend(f, g0, u0, dg)
    return _result(f, g, "gradient_near_zero", iterations=iters, start=g0, delta_gamma=dg)


# -- line search -------------------------------------------------------------------

def _argmin_smallest(gammas, vals):
    vmin = vals.min()
    tied = np.flatnonzero(vals <= vmin + _TIE * (1.0 + abs(vmin)))
    return int(tied[np.argmin(gammas[tied])])


def line_search(model, index=None, refine=True, num_samples=None, interval=None,
                field_mode="auto", plan=None, refine_candidates=3) -> OptimizationResult:
    """Grid search of the univariate cost, optionally polished by local descent.

    Default grid: the Nyquist sample count over one period. The refinement
    descends from the best ``refine_candidates`` grid-local minima, each
    confined to one grid spacing around its start.
    """
    f = UnivariateFunction(model, index, field_mode)
    plan = plan or sampling_plan(model, f.index)
    if interval is None:
        check_integer_weights(model, "line_search without an interval")
        lo, hi = 0.0, plan.period
        N = num_samples or plan.num_samples
        cyclic = True
    else:
        lo, hi = map(float, interval)
        N = num_samples or max(2, int(math.ceil((hi - lo) / plan.delta_gamma)))
        cyclic = False
    if N < 1:
        raise InputError("num_samples must be positive")
    gammas = lo + (hi - lo) * np.arange(N) / N
    vals, _ = f.values(gammas)
    if not np.all(np.isfinite(vals)):
        raise NumericError("non-finite landscape value during line search")
    k = _argmin_smallest(gammas, vals)
    best_g, best_u = float(gammas[k]), float(vals[k])
    if refine and N > 1:
        spacing = (hi - lo) / N
        if cyclic:
            left, right = np.roll(vals, 1), np.roll(vals, -1)
        else:
            left = np.concatenate([[np.inf], vals[:-1]])
            right = np.concatenate([vals[1:], [np.inf]])
        local = np.flatnonzero((vals <= left) & (vals <= right))
        local = local[np.lexsort((gammas[local], vals[local]))][:refine_candidates]
        if k not in local:
            local = np.append(local, k)
        cap = min(spacing, plan.delta_gamma)
        for j in local:
            g0 = float(gammas[j])
            g, u, _ = _descend(f, g0, float(vals[j]), cap, max(g0 - spacing, 0.0), g0 + spacing)
            if u < best_u - _TIE * (1 + abs(best_u)) or (
                    abs(u - best_u) <= _TIE * (1 + abs(best_u)) and g < best_g):
                best_g, best_u = g, u
    return _result(f, best_g, "line_search", num_samples=N, interval=[lo, hi], refined=bool(refine))


def coarse_line_search(model, index=None, field_mode="auto", num_samples=20):
    """A 20-sample grid on [0, pi] followed by descent from the best point."""
    return line_search(model, index, True, num_samples, (0.0, math.pi), field_mode,
                       refine_candidates=1)


def optimize_angles(model, method="gradient_near_zero", index=None, field_mode="auto",
                    epsilon=1e-6, num_samples=None):
    """Dispatch by method name."""
    ix = _index_for(model, index)
    if method in ("gradient_near_zero", "gradient"):
        return gradient_descent_near_zero(model, ix, field_mode)
    if method == "subdivision":
        return subdivision_optimize(model, ix, epsilon, field_mode)
    if method == "line_search":
        if num_samples is not None:
            return line_search(model, ix, True, num_samples, (0.0, math.pi), field_mode)
        return line_search(model, ix, True, field_mode=field_mode)
    if method in ("coarse", "line_search_20"):
        return coarse_line_search(model, ix, field_mode, num_samples or 20)
    raise InputError(f"unknown method {method!r}")


# -- large-degree closed forms ----------------------------------------------------

@dataclass(frozen=True)
class MomentSummary:
    """Weight moments and neighbourhood structure of a (D+1)-regular ensemble.

    |non-triangle neighbours| = a D^lam and |triangle neighbours| = b D^mu.
    """

    ej: float
    ej2: float
    D: float
    a: float = 1.0
    b: float = 0.0
    lam: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        if not self.ej2 > 0:
            raise InputError("E[J^2] must be positive")
        if self.ej2 < self.ej ** 2 * (1 - 1e-12):
            raise InputError("E[J^2] must be at least E[J]^2")
        if self.a < 0 or self.b < 0:
            raise InputError("a and b must be non-negative")
        if not (0 <= self.lam <= 1 and 0 <= self.mu <= 1):
            raise InputError("lambda and mu must lie in [0, 1]")
        if not self.D > 0:
            raise InputError("D must be positive")


def moments_from_model(model, a=1.0, b=0.0, lam=1.0, mu=0.0):
    """Empirical E[J], E[J^2] and D = degree - 1 for a regular model."""
    deg = model.degrees()
    if deg.size == 0 or deg.min() != deg.max() or deg[0] < 2:
        raise InputError("model must be regular with degree >= 2")
    w = np.asarray(model.weights)
    return MomentSummary(float(w.mean()), float((w * w).mean()), float(deg[0] - 1), a, b, lam, mu)


def _eq(x, y):
    return abs(x - y) <= 1e-12


def eta(theta, m: MomentSummary):
    return 1.0 / math.sqrt(theta * m.D * m.ej2)


def zeta(theta1, theta2, m: MomentSummary):
    num = theta1 * m.ej2 + theta2 * m.ej ** 2
    den = theta1 * m.ej2 - theta2 * m.ej ** 2
    if not (den > 0 and num > 0 and m.ej != 0):
        raise InputError("log argument of zeta is not positive")
    return math.sqrt(math.log(num / den) / (8 * theta2 * m.D * m.ej ** 2))


def predicted_gamma_star(m: MomentSummary) -> float:
    """Leading-order optimal gamma for the six closed-form cases."""
    a, b, lam, mu = m.a, m.b, m.lam, m.mu
    if b == 0 and _eq(a, 1) and _eq(lam, 1):
        return eta(4, m)
    if a == 0 and _eq(b, 1) and _eq(mu, 1):
        return zeta(1, 1, m)
    if a > 0 and b > 0:
        if _eq(lam, 1) and _eq(mu, 1):
            return zeta(1, b, m)
        if _eq(mu, 1) and lam < 1:
            return zeta(b, b, m)
        if _eq(lam, 1) and mu > 0.5 and not _eq(mu, 0.5):
            return eta(2 * a, m)
        if _eq(lam, 1) and mu < 0.5 and not _eq(mu, 0.5):
            return eta(4, m)
    raise UnsupportedCaseError(
        f"no closed-form gamma* for a={a}, b={b}, lambda={lam}, mu={mu}")


def C1(alpha, beta, m: MomentSummary):
    return 2 * alpha * np.sin(4 * beta) * m.ej2 * np.exp(-2 * alpha ** 2 * m.ej2) / math.sqrt(m.D)


def C2(alpha, beta, theta1, theta2, m: MomentSummary):
    return (np.sin(2 * beta) ** 2 * m.ej * np.exp(-4 * theta1 * alpha ** 2 * m.ej2)
            * np.sinh(4 * theta2 * alpha ** 2 * m.ej ** 2))


def _C3(alpha, beta, m, power):
    return (4 * m.b * alpha ** 2 * np.sin(2 * beta) ** 2 * m.ej ** 3
            * np.exp(-4 * m.a * alpha ** 2 * m.ej2) * power)


def scaled_expected_cost(alpha, beta, m: MomentSummary):
    """Leading-order expected cost per edge at gamma = alpha / sqrt(D)."""
    a, b, lam, mu, D = m.a, m.b, m.lam, m.mu, m.D
    alpha = np.asarray(alpha, dtype=float)
    if b == 0 and _eq(a, 1) and _eq(lam, 1):
        return C1(alpha, beta, m)
    if a == 0 and _eq(b, 1) and _eq(mu, 1):
        return C1(alpha, beta, m) + C2(alpha, beta, 1, 1, m)
    if a > 0 and b > 0:
        if _eq(lam, 1) and _eq(mu, 1):
            return C1(alpha, beta, m) + C2(alpha, beta, 1, b, m)
        if _eq(mu, 1):
            if _eq(lam, 0.5):
                return C1(alpha, beta, m) + C2(alpha, beta, b, b, m) * (
                    1 - 4 * a * alpha ** 2 * m.ej2 / math.sqrt(D))
            if lam < 0.5:
                return C1(alpha, beta, m) + C2(alpha, beta, b, b, m)
            return C2(alpha, beta, b, b, m) * (1 - 4 * a * alpha ** 2 * m.ej2 * D ** (lam - 1))
        if _eq(lam, 1):
            if _eq(mu, 0.5):
                return C1(alpha, beta, m) + _C3(alpha, beta, m, 1 / math.sqrt(D))
            if mu > 0.5:
                return _C3(alpha, beta, m, D ** (mu - 1))
            return C1(alpha, beta, m)
    raise UnsupportedCaseError(
        f"no leading-order expression for a={a}, b={b}, lambda={lam}, mu={mu}")
