"""scikit-learn style wrappers.

``LorentzChart`` maps chart points of R^{n-1,1} to unit representatives of
their lines in F_1 and back. ``ThickeningDomain`` is fit on limit-set
representatives and scores chart points by their distance from the
thickening; ``predict`` flags points of the candidate domain.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .chart import Frame, chart_to_flag, flag_to_chart
from .domain import DomainPoint, NullHyperplaneSet, domain_margin, find_domain_point, thickening_in_chart
from .geometry import IsotropicLine, make_space
from .groups import SchottkyGroup
from .limitset import LimitSample, limit_sample


class LorentzChart(TransformerMixin, BaseEstimator):
    """Chart ``h: V' -> L^opp`` as a transformer.

    Parameters
    ----------
    n : int or None
        Lorentz dimension. Inferred from ``X`` in :meth:`fit` when None.
    """

    def __init__(self, n=None):
        self.n = n

    def fit(self, X, y=None):
        X = check_array(X)
        n = X.shape[1] if self.n is None else self.n
        if X.shape[1] != n:
            raise ValueError(f"expected {n} chart coordinates, got {X.shape[1]}")
        self.frame_ = Frame.standard(make_space(n))
        self.n_features_in_ = n
        return self

    def transform(self, X):
        check_is_fitted(self, "frame_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return np.array([chart_to_flag(self.frame_, v).rep for v in X])

    def inverse_transform(self, X):
        check_is_fitted(self, "frame_")
        X = check_array(X)
        return np.array([flag_to_chart(self.frame_, IsotropicLine(r)) for r in X])


class ThickeningDomain(BaseEstimator):
    """Complement of the thickening of a limit set, in chart coordinates.

    Parameters
    ----------
    n : int or None
        Lorentz dimension; inferred as ``X.shape[1] - 2`` when None.
    threshold : float
        Margin above which :meth:`predict` reports a point as in the domain.
    strict : bool
        Reject samples containing L instead of dropping those points.
    """

    def __init__(self, n=None, threshold=1e-9, strict=True):
        self.n = n
        self.threshold = threshold
        self.strict = strict

    def fit(self, X, y=None):
        """Fit on limit-set representatives, one row of length n+2 per line."""
        X = check_array(X)
        n = X.shape[1] - 2 if self.n is None else self.n
        self.frame_ = Frame.standard(make_space(n))
        sample = LimitSample(X / np.linalg.norm(X, axis=1, keepdims=True), np.zeros(len(X), dtype=int), "fit")
        self.hyperplanes_: NullHyperplaneSet = thickening_in_chart(self.frame_, sample, strict=self.strict)
        self.n_features_in_ = n
        return self

    def fit_group(self, group: SchottkyGroup, depth: int = 8):
        """Fit on the depth-N limit sample of a certified group."""
        frame = Frame.standard(make_space(group.n))
        return self.fit(limit_sample(frame, group, depth).reps)

    def decision_function(self, X):
        check_is_fitted(self, "hyperplanes_")
        X = check_array(X)
        return domain_margin(self.hyperplanes_, X)

    def predict(self, X):
        return self.decision_function(X) > self.threshold

    def find_point(self) -> DomainPoint:
        check_is_fitted(self, "hyperplanes_")
        return find_domain_point(self.frame_, self.hyperplanes_)
