"""scikit-learn style front end.

:class:`KrylovAbnormalityDetector` learns the projected transfer operator
from one training trajectory and scores transitions of new trajectories.
:class:`ARDetector` is the autoregressive baseline with the same surface.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_gamma, check_series
from .embedding import EmbeddingPlan, measure_gram, training_points
from .kernels import make_kernel
from .krylov import Method, estimate
from .predictor import AbnormalityTrace, project_features, score_series
from .systems import ar_fit, ar_score


class KrylovAbnormalityDetector(TransformerMixin, BaseEstimator):
    """Arnoldi / shift-invert Arnoldi estimate of the transfer operator.

    Parameters
    ----------
    method : {"sia", "arnoldi"}
    n_krylov : int
        Krylov dimension ``S``.
    n_per_measure : int
        Atoms per empirical measure ``N``; ``fit`` uses the first
        ``(S + 1) * N`` states.
    kernel : {"gaussian", "laplacian"}
    bandwidth : float or "median"
    gamma : complex or str
        Shift for ``method="sia"``; strings like ``"1+1i"`` are accepted.
    normalize : bool
        Whether measure embeddings carry the ``1/N`` factor. Scores and
        ``Ktilde_`` do not depend on it.
    delay : int
        Delay-embedding length ``p`` applied to scalar input.
    qr_variant : {"cholesky", "mgs"}
    reorthogonalize : bool
        One extra sweep for ``qr_variant="mgs"``.

    Attributes
    ----------
    estimate_ : OperatorEstimate
    kernel_ : KernelSpec
    Ktilde_ : ndarray of shape (S, S)
    """

    def __init__(
        self,
        method="sia",
        n_krylov=10,
        n_per_measure=40,
        kernel="gaussian",
        bandwidth="median",
        gamma=1.25,
        normalize=True,
        delay=1,
        qr_variant="cholesky",
        reorthogonalize=False,
    ):
        self.method = method
        self.n_krylov = n_krylov
        self.n_per_measure = n_per_measure
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.gamma = gamma
        self.normalize = normalize
        self.delay = delay
        self.qr_variant = qr_variant
        self.reorthogonalize = reorthogonalize

    def fit(self, X, y=None):
        states = check_series(X, delay=self.delay)
        plan = EmbeddingPlan(self.n_krylov, self.n_per_measure, bool(self.normalize))
        points = training_points(states, plan)
        self.kernel_ = make_kernel(self.kernel, self.bandwidth, points)
        mg = measure_gram(points, plan, self.kernel_)
        method = Method(self.method)
        gamma = check_gamma(self.gamma) if method is Method.SHIFT_INVERT else None
        self.estimate_ = estimate(
            mg, method, gamma, variant=self.qr_variant, reorthogonalize=self.reorthogonalize
        )
        self.Ktilde_ = self.estimate_.Ktilde
        self.n_features_in_ = states.shape[1]
        return self

    def transform(self, X):
        """Coordinates ``Q^* phi(x)`` of each state in the learned subspace."""
        check_is_fitted(self, "estimate_")
        return project_features(self.estimate_, check_series(X, delay=self.delay))

    def abnormality_trace(self, X) -> AbnormalityTrace:
        """Scores for every transition of ``X``.

        ``t_indices`` refer to positions in ``X`` itself: with delay
        embedding, index ``t`` is the newest sample of the state.
        """
        check_is_fitted(self, "estimate_")
        states = check_series(X, delay=self.delay)
        trace = score_series(self.estimate_, states, 1, len(states))
        trace.t_indices = trace.t_indices + (self.delay - 1)
        return trace

    def score_samples(self, X):
        """Abnormality of each transition; length ``n_states - 1``.

        Larger means more abnormal. Transitions starting outside the learned
        subspace score ``inf``.
        """
        return self.abnormality_trace(X).scores


class ARDetector(BaseEstimator):
    """Least-squares AR(p) predictor scored by standardised residuals."""

    def __init__(self, order=15):
        self.order = order

    def fit(self, X, y=None):
        series = check_series(X)[:, 0]
        self.model_ = ar_fit(series, self.order)
        self.coef_ = self.model_.coeffs
        return self

    def abnormality_trace(self, X) -> AbnormalityTrace:
        check_is_fitted(self, "model_")
        series = check_series(X)[:, 0]
        return ar_score(self.model_, series, self.order, len(series))

    def score_samples(self, X):
        return self.abnormality_trace(X).scores
