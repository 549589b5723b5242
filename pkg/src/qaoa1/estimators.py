"""Estimator-style front ends (fit / predict / score, get_params / set_params).

``fit`` takes an IsingModel in place of a data matrix. Fitted state lives in
trailing-underscore attributes, so the usual parameter cloning and
``check_is_fitted`` machinery applies.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_model
from .analytic import build_index
from .ising import energy
from .optimize import optimize_angles
from .oracle import approximation_ratio, brute_force
from .recursive import Tuner, iter_qaoa, rqaoa
from .spectral import sampling_plan


class Qaoa1Tuner(BaseEstimator):
    """Finds (gamma*, beta*) for one model.

    Parameters
    ----------
    method : {"gradient_near_zero", "subdivision", "line_search", "coarse"}
    epsilon : float
        Subdivision tolerance on q = u^2.
    field_mode : {"auto", "field_free", "fields"}
    """

    def __init__(self, method="gradient_near_zero", epsilon=1e-6, field_mode="auto"):
        self.method = method
        self.epsilon = epsilon
        self.field_mode = field_mode

    def fit(self, model, y=None):
        check_model(model)
        ix = build_index(model)
        res = optimize_angles(model, self.method, ix, self.field_mode, self.epsilon)
        self.gamma_ = res.gamma_star
        self.beta_ = res.beta_star
        self.value_ = res.value
        self.result_ = res
        self.plan_ = sampling_plan(model, ix)
        self.n_features_in_ = model.n
        return self

    def predict(self, model=None):
        """Tuned angles as (gamma, beta)."""
        check_is_fitted(self, "gamma_")
        return self.gamma_, self.beta_

    def score(self, model, y=None):
        """Ratio of the tuned expectation to the exact ground energy."""
        check_is_fitted(self, "value_")
        return approximation_ratio(self.value_, brute_force(model))


class _RecursiveSolver(BaseEstimator):
    _solve = None

    def __init__(self, steps=0, method="gradient_near_zero", fields="native", epsilon=1e-6,
                 random_state=None):
        self.steps = steps
        self.method = method
        self.fields = fields
        self.epsilon = epsilon
        self.random_state = random_state

    def fit(self, model, y=None):
        check_model(model)
        tuner = Tuner(self.method, self.fields, self.epsilon)
        spins, trace, report = type(self)._solve(model, self.steps, tuner, self.random_state)
        self.spins_ = spins
        self.trace_ = trace
        self.report_ = report
        self.energy_ = energy(model, spins)
        self.n_features_in_ = model.n
        return self

    def predict(self, model=None):
        """Spin assignment found by the last ``fit``."""
        check_is_fitted(self, "spins_")
        return self.spins_

    def fit_predict(self, model, y=None):
        return self.fit(model).spins_

    def score(self, model, y=None):
        check_is_fitted(self, "spins_")
        return approximation_ratio(energy(model, self.spins_) - model.constant, brute_force(model))


class RQAOASolver(_RecursiveSolver):
    """Recursive QAOA with single- and two-spin rounding."""

    _solve = staticmethod(rqaoa)


class IterQAOASolver(_RecursiveSolver):
    """Recursive rounding on single-spin expectations only."""

    _solve = staticmethod(iter_qaoa)
