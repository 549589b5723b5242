"""Analytic elimination of beta: the cost becomes a function of gamma alone."""
from __future__ import annotations

import numpy as np

from .analytic import CoefficientTriple, _index_for, coefficient_arrays
from .exceptions import ConfigurationError, InputError

FIELD_MODES = ("auto", "field_free", "fields")
# Double roots split into complex pairs of size ~sqrt(machine eps) under
# roundoff, so near-real roots are kept too. Extra candidates are harmless:
# beta* is chosen by evaluating the cost at every candidate.
_REAL_TOL = 1e-6
_CLAMP_TOL = 1e-9


def optimal_beta_field_free(coeffs: CoefficientTriple):
    """(beta*, value) for A sin 4b - B sin^2 2b. Works elementwise on arrays.

    beta* = (atan2(2A, B) + pi)/4 and value = -sqrt(A^2 + B^2/4) - B/2.
    A = B = 0 gives beta* = 0.
    """
    A = np.asarray(coeffs.a, dtype=float)
    B = np.asarray(coeffs.b, dtype=float)
    beta = np.mod(0.25 * (np.arctan2(2.0 * A, B) + np.pi), np.pi)
    beta = np.where((A == 0) & (B == 0), 0.0, beta)
    value = -np.sqrt(A * A + 0.25 * B * B) - 0.5 * B
    if beta.ndim == 0:
        return float(beta), float(value)
    return beta, value


def quartic_coefficients(A, B, C):
    """Highest degree first. Roots x = cos 2b of the stationarity condition, squared."""
    A, B, C = (np.asarray(t, dtype=float) for t in (A, B, C))
    return np.stack([16 * B * B + 4 * C * C, 8 * A * B, A * A - 16 * B * B - 4 * C * C,
                     -4 * A * B, 4 * B * B], axis=-1)


def _real_roots_in_range(coefs):
    """Real roots in [-1, 1] of each row's polynomial; shape (G, 4), NaN padded."""
    G = coefs.shape[0]
    out = np.full((G, 4), np.nan)
    scale = np.abs(coefs).max(axis=1)
    nz = scale > 0
    norm = np.zeros_like(coefs)
    norm[nz] = coefs[nz] / scale[nz, None]
    full = nz & (np.abs(norm[:, 0]) > 1e-12)
    if np.any(full):
        c = norm[full]
        comp = np.zeros((c.shape[0], 4, 4))
        comp[:, 0, :] = -c[:, 1:] / c[:, :1]
        comp[:, 1, 0] = comp[:, 2, 1] = comp[:, 3, 2] = 1.0
        roots = np.linalg.eigvals(comp)
        out[full] = np.where(np.abs(roots.imag) <= _REAL_TOL * (1 + np.abs(roots.real)),
                             roots.real, np.nan)
    for g in np.flatnonzero(nz & ~full):
        r = np.roots(norm[g])
        r = r[np.abs(r.imag) <= _REAL_TOL * (1 + np.abs(r.real))].real
        out[g, :r.size] = r
    # one Newton polish on the original polynomial, then clamp into [-1, 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        x = out
        p = np.zeros_like(x)
        dp = np.zeros_like(x)
        for k in range(5):
            dp = dp * x + p
            p = p * x + norm[:, k:k + 1]
        step = np.where(np.abs(dp) > 1e-300, p / dp, 0.0)
        polished = x - step
        x = np.where(np.abs(polished - x) < 1e-6, polished, x)
    x = np.where((x < -1) & (x >= -1 - _CLAMP_TOL), -1.0, x)
    x = np.where((x > 1) & (x <= 1 + _CLAMP_TOL), 1.0, x)
    x[(x < -1) | (x > 1)] = np.nan
    return x


def _cost(A, B, C, beta):
    s2 = np.sin(2.0 * beta)
    return A * s2 + B * np.sin(4.0 * beta) + C * s2 * s2


def beta_candidates_with_fields(coeffs: CoefficientTriple):
    """Set of beta = +-arccos(x)/2 over real roots x in [-1, 1] of the quartic."""
    A, B, C = float(coeffs.a), float(coeffs.b), float(coeffs.c)
    if A == B == C == 0.0:
        return {0.0}
    x = _real_roots_in_range(quartic_coefficients(A, B, C)[None, :])[0]
    x = x[~np.isnan(x)]
    half = 0.5 * np.arccos(x)
    return {float(b) for b in np.concatenate([half, np.mod(-half, np.pi)])}


def optimal_beta_with_fields(A, B, C):
    """Elementwise (beta*, value) minimising A sin 2b + B sin 4b + C sin^2 2b."""
    A, B, C = (np.atleast_1d(np.asarray(t, dtype=float)) for t in (A, B, C))
    x = _real_roots_in_range(quartic_coefficients(A, B, C))
    half = 0.5 * np.arccos(x)
    cands = np.concatenate([half, np.mod(-half, np.pi)], axis=1)
    vals = _cost(A[:, None], B[:, None], C[:, None], cands)
    vals = np.where(np.isnan(vals), np.inf, vals)
    # flat rows, or rows where roundoff removed every root: beta = 0 gives 0
    empty = np.all(np.isinf(vals), axis=1)
    cands[empty, 0] = 0.0
    vals[empty, 0] = 0.0
    k = np.argmin(vals, axis=1)
    rows = np.arange(A.size)
    return cands[rows, k], vals[rows, k]


def resolve_field_mode(model, field_mode):
    if field_mode not in FIELD_MODES:
        raise ConfigurationError(f"unknown field_mode {field_mode!r}; use one of {FIELD_MODES}")
    if field_mode == "auto":
        return "fields" if model.has_fields else "field_free"
    if field_mode == "field_free" and model.has_fields:
        raise InputError("field_mode 'field_free' requested for a model with fields")
    return field_mode


def univariate_arrays(model, index, gammas, field_mode="auto"):
    """(values, betas) over a vector of gammas; values exclude the constant."""
    mode = resolve_field_mode(model, field_mode)
    g = np.asarray(gammas, dtype=float).reshape(-1)
    A6, B6, C6 = coefficient_arrays(model, index, g)
    if mode == "field_free":
        beta, value = optimal_beta_field_free(CoefficientTriple(B6, -C6))
        return np.atleast_1d(value), np.atleast_1d(beta)
    beta, value = optimal_beta_with_fields(A6, B6, C6)
    return value, beta


def univariate_cost(model, index, gamma, field_mode="auto"):
    """(value, beta*) at one gamma, value constant-free."""
    value, beta = univariate_arrays(model, index, [gamma], field_mode)
    return float(value[0]), float(beta[0])


class UnivariateFunction:
    """Callable u(gamma) bound to a model, counting evaluated gamma points."""

    def __init__(self, model, index=None, field_mode="auto"):
        self.model = model
        self.index = _index_for(model, index)
        self.field_mode = resolve_field_mode(model, field_mode)
        self.evaluations = 0

    def values(self, gammas):
        v, b = univariate_arrays(self.model, self.index, gammas, self.field_mode)
        self.evaluations += v.size
        return v, b

    def __call__(self, gamma):
        v, _ = self.values([gamma])
        return float(v[0])
