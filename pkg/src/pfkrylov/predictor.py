"""One-step prediction in the RKHS and the MMD-based abnormality score.

For consecutive states ``x_prev -> x_curr`` the prediction of
``phi(x_curr)`` is ``Q Ktilde Q^* phi(x_prev)``; the score is the RKHS
distance between observation and prediction divided by the norm of the
prediction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .embedding import cross_gram_points
from .exceptions import InputError
from .kernels import _as_points
from .krylov import OperatorEstimate

EPS_DEN = 1e-12


@dataclass
class AbnormalityTrace:
    """Per-step scores. ``degenerate[i]`` marks a vanishing denominator,
    in which case ``scores[i]`` is ``inf``."""

    t_indices: np.ndarray
    scores: np.ndarray
    denominators: np.ndarray
    degenerate: np.ndarray
    method: str = ""
    S: int | None = None
    N: int | None = None
    gamma: complex | None = None
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t_indices)

    @property
    def flags(self) -> list[str]:
        return ["degenerate" if d else "ok" for d in self.degenerate]


def _qstar(est: OperatorEstimate, X: np.ndarray) -> np.ndarray:
    # rows: Q^* phi(x) = R^{-H} (C^H b) with b the measure cross-Gram of x
    b = cross_gram_points(est.gram, X)
    basis = b @ est.basis_coeffs.conj()
    return sla.solve_triangular(est.R, basis.T, trans="C", lower=False).T


def project_features(est: OperatorEstimate, X) -> np.ndarray:
    """``Q^* phi(x)`` for each row of ``X``; shape ``(len(X), S)``."""
    X = _as_points(X)
    return _qstar(est, X)


def project_feature(est: OperatorEstimate, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise InputError(f"expected a single state vector, got shape {x.shape}")
    return project_features(est, x[None, :])[0]


def _scores(est: OperatorEstimate, X_prev: np.ndarray, X_curr: np.ndarray):
    U = _qstar(est, X_prev)
    V = U @ est.Ktilde.T
    den = np.linalg.norm(V, axis=1)
    W = _qstar(est, X_curr)
    # k(x, x) = 1 for both kernel families
    cross = np.real(np.sum(V.conj() * W, axis=1))
    num2 = 1.0 - 2.0 * cross + den**2
    num = np.sqrt(np.clip(num2, 0.0, None))
    degenerate = den <= EPS_DEN
    with np.errstate(divide="ignore", invalid="ignore"):
        score = np.where(degenerate, np.inf, num / np.where(degenerate, 1.0, den))
    return score, den, degenerate, num2


def abnormality(est: OperatorEstimate, x_prev, x_curr) -> tuple[float, float]:
    """Score of the transition ``x_prev -> x_curr`` and its denominator.

    A denominator at or below ``EPS_DEN`` yields an infinite score:
    ``x_prev`` lies outside the learned subspace.
    """
    X_prev = _as_points(np.atleast_1d(np.asarray(x_prev, dtype=float))[None, :])
    X_curr = _as_points(np.atleast_1d(np.asarray(x_curr, dtype=float))[None, :])
    if X_prev.shape != X_curr.shape:
        raise InputError(f"dimension mismatch: {X_prev.shape[1]} vs {X_curr.shape[1]}")
    score, den, _, _ = _scores(est, X_prev, X_curr)
    return float(score[0]), float(den[0])


def score_series(est: OperatorEstimate, series, t_start: int, t_end: int) -> AbnormalityTrace:
    """Scores for ``t`` in ``[t_start, t_end)`` using ``series[t-1] -> series[t]``."""
    X = _as_points(series)
    if t_start < 1:
        raise InputError(f"t_start must be >= 1, got {t_start}")
    if t_end > len(X) or t_end < t_start:
        raise InputError(f"score range [{t_start}, {t_end}) invalid for a series of length {len(X)}")
    t = np.arange(t_start, t_end)
    meta = dict(method=est.method.value, S=est.S, N=est.N, gamma=est.gamma)
    if len(t) == 0:
        empty = np.empty(0)
        return AbnormalityTrace(t, empty, empty.copy(), np.empty(0, dtype=bool), **meta)
    score, den, deg, _ = _scores(est, X[t - 1], X[t])
    return AbnormalityTrace(t, score, den, deg, **meta)


def squared_prediction_error(est: OperatorEstimate, X_prev, X_curr) -> np.ndarray:
    """Unclamped squared numerator, exposed for metric sanity checks."""
    return _scores(est, _as_points(X_prev), _as_points(X_curr))[3]


def rkhs_norm_of_coordinates(est: OperatorEstimate, v) -> float:
    """``||Q v||_k`` evaluated through the basis Gram instead of orthonormality."""
    a = sla.solve_triangular(est.R, np.asarray(v), lower=False)
    return float(np.sqrt(np.real(a.conj() @ est.basis_gram @ a)))
