"""scikit-learn style wrappers around the functional API.

A fitted estimator remembers a graph (or a variable model); ``predict``
then maps a batch of activity vectors, one per row, to results.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .decay import DEFAULT_NODE_BUDGET, eval_polynomial, fptas_eval
from .errors import InvalidInputError
from .exact import breve_q_exact
from .lll import round_variables, round_variables_exact
from .membership import slack_bounds, test_membership
from .univariate import scaling_fit
from .validation import check_graph


def _rows(P, n: int, dtype) -> np.ndarray:
    arr = np.asarray(P, dtype=dtype)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != n:
        raise InvalidInputError(f"expected rows of {n} activities, got shape {np.shape(P)}")
    return arr


class IndependencePolynomialEstimator(BaseEstimator):
    """Evaluate the alternating-sign polynomial of a fixed graph at many activity vectors.

    ``mode="decay"`` uses the FPTAS with slack ``alpha`` and accuracy ``eps``
    (or a fixed ``depth`` if given); ``mode="exact"`` uses the oracle.
    """

    def __init__(self, mode="decay", alpha=0.5, eps=0.1, depth=None, budget=DEFAULT_NODE_BUDGET, n_jobs=1):
        self.mode = mode
        self.alpha = alpha
        self.eps = eps
        self.depth = depth
        self.budget = budget
        self.n_jobs = n_jobs

    def fit(self, graph, y=None):
        if self.mode not in ("decay", "exact"):
            raise InvalidInputError(f"unknown mode {self.mode!r}")
        self.graph_ = check_graph(graph)
        self.n_features_in_ = self.graph_.n
        return self

    def _one(self, p):
        g = self.graph_
        if self.mode == "exact":
            return breve_q_exact(g, p)
        if self.depth is not None:
            return eval_polynomial(g, p, self.depth, budget=self.budget, n_jobs=self.n_jobs).value
        return fptas_eval(g, p, self.alpha, self.eps, budget=self.budget, n_jobs=self.n_jobs).value

    def predict(self, P):
        check_is_fitted(self, "graph_")
        return np.array([self._one(p) for p in _rows(P, self.graph_.n, complex)])


class ShearerMembershipClassifier(ClassifierMixin, BaseEstimator):
    """Label magnitude vectors True (in the region) or False (``(1+alpha) p`` outside)."""

    def __init__(self, alpha=0.1, exact=False, budget=DEFAULT_NODE_BUDGET, n_jobs=1):
        self.alpha = alpha
        self.exact = exact
        self.budget = budget
        self.n_jobs = n_jobs

    def fit(self, graph, y=None):
        self.graph_ = check_graph(graph)
        self.n_features_in_ = self.graph_.n
        self.classes_ = np.array([False, True])
        return self

    def verdicts(self, P):
        check_is_fitted(self, "graph_")
        return [
            test_membership(self.graph_, p, self.alpha, exact=self.exact, budget=self.budget, n_jobs=self.n_jobs)
            for p in _rows(P, self.graph_.n, float)
        ]

    def predict(self, P):
        return np.array([v.in_region for v in self.verdicts(P)])

    def slack_bounds(self, P, working_slack=None):
        """``(lower, upper)`` slack bracket per row."""
        check_is_fitted(self, "graph_")
        return np.array(
            [
                slack_bounds(self.graph_, p, exact=self.exact, working_slack=working_slack, budget=self.budget)
                for p in _rows(P, self.graph_.n, float)
            ]
        )


class DecayRateRegressor(RegressorMixin, BaseEstimator):
    """Fit ``1 - rho(alpha) ~ prefactor * alpha**exponent`` on the degree-``d`` tree recurrence."""

    def __init__(self, d=2, iters=1_000_000):
        self.d = d
        self.iters = iters

    def fit(self, alphas, y=None):
        self.fit_ = scaling_fit(self.d, np.ravel(alphas), self.iters)
        self.exponent_ = self.fit_.fitted_exponent
        self.prefactor_ = self.fit_.prefactor
        return self

    def predict(self, alphas):
        """Predicted ``1 - rho`` at each alpha."""
        check_is_fitted(self, "fit_")
        a = np.ravel(np.asarray(alphas, dtype=float))
        return self.prefactor_ * a**self.exponent_


class LLLRounder(BaseEstimator):
    """Round a variable model's marginals to an assignment avoiding every event."""

    def __init__(self, alpha=0.5, exact=False, budget=DEFAULT_NODE_BUDGET, n_jobs=1):
        self.alpha = alpha
        self.exact = exact
        self.budget = budget
        self.n_jobs = n_jobs

    def fit(self, model, y=None):
        if self.exact:
            self.assignment_ = round_variables_exact(model)
            self.trace_ = None
        else:
            self.assignment_, self.trace_ = round_variables(model, self.alpha, budget=self.budget, n_jobs=self.n_jobs)
        return self

    def transform(self, model=None):
        check_is_fitted(self, "assignment_")
        return self.assignment_

    def fit_transform(self, model, y=None):
        return self.fit(model).assignment_
