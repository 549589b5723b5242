"""Frequency content of the gamma landscape: bandwidth bound, Nyquist plan,
sampling, periodic reconstruction and comparison with the cost spectrum."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import _index_for, coefficient_arrays
from .exceptions import ConfigurationError, InputError
from .ising import eliminate_fields
from .oracle import brute_force
from .univariate import univariate_arrays

SPECTRAL_THRESHOLD = 1e-8


@dataclass(frozen=True)
class SamplingPlan:
    omega_max: float
    nu_max: float
    delta_gamma: float
    period: float | None = None
    num_samples: int | None = None

    @property
    def step(self):
        """Actual uniform spacing over one period (never above delta_gamma)."""
        if self.period is None:
            return self.delta_gamma
        return self.period / self.num_samples

    def to_dict(self):
        return {"omega_max": self.omega_max, "nu_max": self.nu_max,
                "delta_gamma": self.delta_gamma, "period": self.period,
                "num_samples": self.num_samples}


def _integerize(x, scale):
    return np.rint(np.asarray(x, dtype=float) * scale).astype(np.int64)


def _frequency_terms(model, index):
    """Per-vertex and per-edge bounds, in integer units of 1/scale when possible.

    Terms whose gamma dependence vanishes identically are skipped: a vertex
    with h_i = 0, and the sin^2 2b bracket of an edge when the two cosine
    products inside it coincide (equal multisets of nonzero |frequencies|).
    """
    ix = _index_for(model, index)
    scale = model.scale
    if scale is not None:
        conv = lambda a: _integerize(a, scale)  # noqa: E731
    else:
        conv = lambda a: np.asarray(a, dtype=float)  # noqa: E731
    J, h = conv(ix.J), conv(ix.h)
    aJ, ah = np.abs(J), np.abs(h)
    S = np.zeros(ix.n, dtype=aJ.dtype)
    np.add.at(S, ix.u, aJ)
    np.add.at(S, ix.v, aJ)
    vertex = np.where(h != 0, 2 * (ah + S), 0)

    u, v = ix.u, ix.v
    branch1 = 2 * np.maximum(ah[v] + S[v], ah[u] + S[u])
    Juf, Jvf = conv(ix.J_uf), conv(ix.J_vf)
    fe = ix._f_edge
    sumF_u = np.zeros(ix.m, dtype=aJ.dtype)
    sumF_v = np.zeros(ix.m, dtype=aJ.dtype)
    plusF = np.zeros(ix.m, dtype=aJ.dtype)
    minusF = np.zeros(ix.m, dtype=aJ.dtype)
    np.add.at(sumF_u, fe, np.abs(Juf))
    np.add.at(sumF_v, fe, np.abs(Jvf))
    np.add.at(plusF, fe, np.abs(Juf + Jvf))
    np.add.at(minusF, fe, np.abs(Juf - Jvf))
    nonF = (S[v] - aJ - sumF_v) + (S[u] - aJ - sumF_u)
    branch2 = 2 * (nonF + np.maximum(np.abs(h[u] + h[v]) + plusF, np.abs(h[u] - h[v]) + minusF))

    # identically-zero bracket detection
    has_F = np.diff(ix._f_ptr) > 0
    vanish = ~has_F & ((h[u] == 0) | (h[v] == 0))
    for k in np.flatnonzero(has_F):
        lo, hi = ix._f_ptr[k], ix._f_ptr[k + 1]
        plus = np.abs(np.append(Juf[lo:hi] + Jvf[lo:hi], h[u[k]] + h[v[k]]))
        minus = np.abs(np.append(Juf[lo:hi] - Jvf[lo:hi], h[u[k]] - h[v[k]]))
        plus, minus = np.sort(plus[plus != 0]), np.sort(minus[minus != 0])
        vanish[k] = plus.size == minus.size and np.array_equal(plus, minus)
    branch2 = np.where(vanish, 0, branch2)
    edge = np.maximum(branch1, branch2)
    return vertex, edge, scale


def max_angular_frequency(model, index=None) -> float:
    """Largest angular frequency in gamma of any single-spin or pair term."""
    vertex, edge, scale = _frequency_terms(model, index)
    top = max(vertex.max(initial=0), edge.max(initial=0))
    if scale is not None:
        return int(top) / scale
    return float(top)


def sampling_plan(model, index=None) -> SamplingPlan:
    omega = max_angular_frequency(model, index)
    nu = omega / (2 * math.pi)
    delta = 1.0 / (2 * nu + 1)
    if model.scale is None:
        return SamplingPlan(omega, nu, delta)
    period = math.pi * model.scale
    return SamplingPlan(omega, nu, delta, period, int(math.ceil(period / delta)))


def sampling_ratio_after_field_elimination(model) -> float:
    """Nyquist spacing before over after folding fields into an ancilla spin."""
    if not model.has_fields:
        raise InputError("model has no fields to eliminate")
    return sampling_plan(model).delta_gamma / sampling_plan(eliminate_fields(model)).delta_gamma


# -- landscapes ------------------------------------------------------------------

def parse_beta_policy(policy):
    """A float means a fixed beta; 'optimal' means the analytic beta* per gamma."""
    if isinstance(policy, str):
        key = policy.strip().lower()
        if key in ("optimal", "analytic_optimal", "analytic"):
            return "optimal"
        if key.startswith("fixed:"):
            key = key[6:]
        try:
            return float(eval_angle(key))
        except ValueError:
            raise ConfigurationError(f"unknown beta policy {policy!r}") from None
    if isinstance(policy, (int, float, np.floating)):
        return float(policy)
    raise ConfigurationError(f"unknown beta policy {policy!r}")


def eval_angle(text):
    """Parse a float or a simple multiple of pi such as '3pi/8' or '0.25*pi'."""
    t = text.replace(" ", "").replace("*", "").lower()
    if "pi" not in t:
        return float(t)
    num, _, den = t.partition("/")
    coef = num.replace("pi", "")
    coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
    return coef * math.pi / (float(den) if den else 1.0)


@dataclass
class LandscapeSamples:
    gammas: np.ndarray
    values: np.ndarray
    plan: SamplingPlan
    beta_policy: object = None
    betas: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def step(self):
        return float(self.gammas[1] - self.gammas[0]) if self.gammas.size > 1 else self.plan.step

    def to_csv(self, fh=None):
        out = fh if fh is not None else io.StringIO()
        p = self.plan
        out.write(f"# omega_max={p.omega_max:.17g} nu_max={p.nu_max:.17g} "
                  f"delta_gamma={p.delta_gamma:.17g} period={_g17(p.period)} "
                  f"num_samples={p.num_samples}\n")
        out.write(f"# beta_policy={self.beta_policy} rows={self.gammas.size}\n")
        out.write("gamma,value,beta_star\n" if self.betas is not None else "gamma,value\n")
        for i in range(self.gammas.size):
            row = f"{self.gammas[i]:.17g},{self.values[i]:.17g}"
            if self.betas is not None:
                row += f",{self.betas[i]:.17g}"
            out.write(row + "\n")
        return out.getvalue() if fh is None else None


def _g17(x):
    return "none" if x is None else f"{x:.17g}"


def landscape_values(model, index, gammas, beta_policy):
    """(values including the constant, betas or None) at the given gammas."""
    policy = parse_beta_policy(beta_policy)
    g = np.asarray(gammas, dtype=float)
    if policy == "optimal":
        vals, betas = univariate_arrays(model, index, g)
        return vals + model.constant, betas
    A, B, C = coefficient_arrays(model, index, g)
    s2 = math.sin(2 * policy)
    return A * s2 + B * math.sin(4 * policy) + C * s2 * s2 + model.constant, None


def sample_landscape(model, plan=None, beta_policy=3 * math.pi / 8, index=None,
                     interval=None, num_samples=None) -> LandscapeSamples:
    """Uniform samples of the gamma landscape.

    With a known period the samples cover [0, period) at ``plan.num_samples``
    points (or ``num_samples`` if given); otherwise ``interval`` is required.
    """
    ix = _index_for(model, index)
    plan = plan if plan is not None else sampling_plan(model, ix)
    policy = parse_beta_policy(beta_policy)
    if interval is None:
        if plan.period is None:
            raise InputError("non-periodic landscape: supply an interval")
        lo, hi = 0.0, plan.period
        count = num_samples or plan.num_samples
    else:
        lo, hi = map(float, interval)
        if not hi > lo:
            raise InputError("interval must have positive length")
        count = num_samples or max(2, int(math.ceil((hi - lo) / plan.delta_gamma)))
    gammas = lo + (hi - lo) * np.arange(count) / count
    values, betas = landscape_values(model, ix, gammas, policy)
    return LandscapeSamples(gammas, values, plan, policy, betas,
                            {"interval": [lo, hi], "full_period": interval is None})


def _check_full_period(samples):
    p = samples.plan.period
    g = samples.gammas
    if p is None or not samples.meta.get("full_period", True):
        raise InputError("samples do not cover a full period")
    N = g.size
    if N < 2:
        raise InputError("need at least two samples")
    step = p / N
    if not np.allclose(np.diff(g), step, rtol=1e-9, atol=1e-12) or abs(g[0]) > 1e-12 * p:
        raise InputError("samples are not uniform over [0, period)")
    return p, N


class TrigInterpolant:
    """Periodic trigonometric interpolant through uniform samples."""

    def __init__(self, values, period):
        v = np.asarray(values, dtype=float)
        self.N = N = v.size
        self.period = period
        c = np.fft.rfft(v) / N
        self.c0 = c[0].real
        K = (N - 1) // 2
        self.k = np.arange(1, K + 1)
        self.ck = 2.0 * c[1:K + 1]
        self.nyq = c[N // 2].real if N % 2 == 0 else 0.0

    def __call__(self, gamma):
        t = 2 * np.pi * np.asarray(gamma, dtype=float) / self.period
        ph = np.exp(1j * np.multiply.outer(t, self.k))
        out = self.c0 + np.real(ph @ self.ck)
        if self.nyq:
            out = out + self.nyq * np.cos(self.N // 2 * t)
        return out


def reconstruct(samples: LandscapeSamples) -> TrigInterpolant:
    """Band-limited periodic interpolant of a fixed-beta landscape."""
    if isinstance(samples.beta_policy, str):
        raise InputError("reconstruction needs a fixed-beta landscape")
    p, _ = _check_full_period(samples)
    return TrigInterpolant(samples.values, p)


def empirical_bandwidth(samples: LandscapeSamples) -> float:
    """Largest angular frequency whose DFT magnitude exceeds 1e-8 of the total mass."""
    g = samples.gammas
    if g.size > 1 and not np.allclose(np.diff(g), g[1] - g[0], rtol=1e-9, atol=1e-12):
        raise InputError("samples are not uniform")
    p, N = _check_full_period(samples)
    need = 2 * math.ceil(samples.plan.omega_max * p / (2 * math.pi)) + 1
    if N < need:
        raise InputError(f"{N} samples cannot resolve omega_max; need at least {need}")
    mag = np.abs(np.fft.rfft(samples.values))
    total = mag.sum()
    if total == 0:
        return 0.0
    above = np.flatnonzero(mag > SPECTRAL_THRESHOLD * total)
    k = int(above.max()) if above.size else 0
    return 2 * math.pi * k / p


def hp_spectrum_range(model) -> float:
    """lambda_max - lambda_min of the diagonal cost over all assignments."""
    t = brute_force(model)
    return t.e_max - t.e_min
