"""scikit-learn style wrapper around design, compilation and profile evaluation.

``PulseDesigner`` treats the effective rotation angle as a regression
target over the dispersion factor eps: ``fit`` chooses frequencies and
amplitudes, ``predict`` returns the synthesised angle at new eps values and
``transform`` returns the basis features.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .pulses import compile_design
from .records import Method, Selection
from .search import SearchOptions, design
from .synthesis import BasisSpec, TargetProfile, effective_profile


class PulseDesigner(RegressorMixin, BaseEstimator):
    """Design a compensating pulse for a target effective-angle profile.

    Parameters
    ----------
    method : {"fsm", "dmod"}
    n_terms : int
        Number of frequencies.
    selection : {"heuristic", "greedy", "gradient"}
    theta_deg : float
        Target rotation at eps = 1 when ``fit`` is called without data.
    delta : float
        Half-width of the eps interval ``[1 - delta, 1 + delta]``.
    threshold_deg : float
        Largest amplitude per block repetition when compiling.
    starts, seed : int
        Multistart count and seed for the gradient search.

    With ``fit(X, y)`` the target is the profile sampled at ``X[:, 0]``
    (eps) with values ``y`` (radians), linearly interpolated.
    """

    def __init__(self, method="dmod", n_terms=2, selection="heuristic", theta_deg=90.0, delta=0.5,
                 threshold_deg=9.0, starts=100, seed=0):
        self.method = method
        self.n_terms = n_terms
        self.selection = selection
        self.theta_deg = theta_deg
        self.delta = delta
        self.threshold_deg = threshold_deg
        self.starts = starts
        self.seed = seed

    def _validate_params(self):
        method = Method.parse(self.method)
        selection = Selection.parse(self.selection)
        if int(self.n_terms) != self.n_terms or self.n_terms < 1:
            raise ValueError(f"n_terms must be a positive integer, got {self.n_terms!r}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta!r}")
        if not self.threshold_deg > 0:
            raise ValueError(f"threshold_deg must be positive, got {self.threshold_deg!r}")
        return method, selection

    def fit(self, X=None, y=None):
        method, selection = self._validate_params()
        target = None
        if X is not None:
            if y is None:
                raise ValueError("y is required when X is given")
            X, y = check_X_y(X, y, ensure_min_samples=2, y_numeric=True)
            eps = X[:, 0]
            order = np.argsort(eps)
            eps, vals = eps[order], y[order]
            target = TargetProfile(lambda e, eps=eps, vals=vals: np.interp(e, eps, vals))
            # the fitted effective angle for FSM carries a leading eps; divide it out of the target
            if method is Method.FSM:
                target = TargetProfile(lambda e, eps=eps, vals=vals: np.interp(e, eps, vals) / e)
            self.n_features_in_ = X.shape[1]
        options = SearchOptions(starts=self.starts, seed=self.seed)
        self.design_ = design(method, int(self.n_terms), selection, self.theta_deg, self.delta, options, target)
        self.basis_ = BasisSpec(method, self.design_.gammas, self.delta)
        self.program_ = compile_design(self.design_, self.threshold_deg)
        self.gammas_ = np.array(self.design_.gammas_deg)
        self.alphas_ = np.array(self.design_.alphas_deg)
        self.residual_ = self.design_.extras.get("residual")
        self.state_error_ = self.design_.extras.get("state_error")
        return self

    def _eps(self, X):
        check_is_fitted(self, "design_")
        X = check_array(X)
        if hasattr(self, "n_features_in_") and X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X[:, 0]

    def predict(self, X):
        """Effective rotation angle (radians) at each eps in ``X[:, 0]``."""
        eps = self._eps(X)
        return effective_profile(self.basis_, self.design_.alphas)(eps)

    def transform(self, X):
        """Basis features, shape ``(n_samples, n_terms)``."""
        eps = self._eps(X)
        return self.basis_.functions(eps).T
