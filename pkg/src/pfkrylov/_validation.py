"""Input validation shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .exceptions import InputError
from .systems import delay_embed


def check_series(X, *, delay: int = 1) -> np.ndarray:
    """Validate a trajectory and return it as a 2-D array of states.

    A 1-D array is a scalar series; with ``delay > 1`` it is delay-embedded,
    otherwise it is lifted to shape ``(n, 1)``. A 2-D array is taken as
    states already (``delay`` must then be 1).
    """
    X = check_array(X, ensure_2d=False, dtype=np.float64, ensure_all_finite=True, ensure_min_samples=1)
    if X.ndim == 1:
        return delay_embed(X, delay) if delay > 1 else X[:, None]
    if delay > 1:
        if X.shape[1] != 1:
            raise InputError("delay embedding needs a scalar series")
        return delay_embed(X[:, 0], delay)
    return X


def check_gamma(gamma) -> complex:
    if isinstance(gamma, str):
        from .io import parse_complex

        gamma = parse_complex(gamma)
    gamma = complex(gamma)
    if gamma == 0 or not np.isfinite(gamma):
        raise InputError(f"gamma must be finite and nonzero, got {gamma}")
    return gamma
