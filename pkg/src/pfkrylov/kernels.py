"""Positive-definite kernels on R^d and their Gram blocks."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .exceptions import InputError

# Cap on the number of points fed to the median heuristic.
MEDIAN_MAX_POINTS = 1000


class KernelFamily(str, Enum):
    GAUSSIAN = "gaussian"
    LAPLACIAN = "laplacian"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus bandwidth ``c``.

    Gaussian: ``exp(-c * ||x - y||_2^2)``; Laplacian: ``exp(-c * ||x - y||_1)``.
    """

    family: KernelFamily = KernelFamily.GAUSSIAN
    bandwidth: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily(self.family))
        c = float(self.bandwidth)
        if not np.isfinite(c) or c <= 0:
            raise InputError(f"kernel bandwidth must be positive, got {self.bandwidth}")
        object.__setattr__(self, "bandwidth", c)

    @property
    def metric(self) -> str:
        return "sqeuclidean" if self.family is KernelFamily.GAUSSIAN else "cityblock"

    def __call__(self, x, y) -> float:
        return eval_kernel(self, x, y)


def _as_points(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise InputError(f"expected a list of state vectors, got array of shape {A.shape}")
    return A


def eval_kernel(spec: KernelSpec, x, y) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape or x.ndim != 1:
        raise InputError(f"dimension mismatch: {x.shape} vs {y.shape}")
    diff = x - y
    if spec.family is KernelFamily.GAUSSIAN:
        dist = float(np.dot(diff, diff))
    else:
        dist = float(np.sum(np.abs(diff)))
    return float(np.exp(-spec.bandwidth * dist))


def gram_block(spec: KernelSpec, A, B=None) -> np.ndarray:
    """Kernel matrix with entry ``(i, j) = k(A[i], B[j])``.

    With ``B`` omitted (or identical to ``A``) only the upper triangle is
    evaluated and mirrored, so the result is exactly symmetric.
    """
    A = _as_points(A)
    same = B is None or B is A
    B = A if same else _as_points(B)
    if A.shape[1] != B.shape[1]:
        raise InputError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    K = np.exp(-spec.bandwidth * cdist(A, B, metric=spec.metric))
    if same:
        upper = np.triu(K)
        K = upper + np.triu(K, 1).T
    return K


def median_bandwidth(X, family: KernelFamily | str = KernelFamily.GAUSSIAN) -> float:
    """Median heuristic for the bandwidth.

    Gaussian uses ``1 / (2 m^2)`` with ``m`` the median Euclidean distance;
    Laplacian uses ``1 / m`` with ``m`` the median L1 distance. Large inputs
    are thinned to ``MEDIAN_MAX_POINTS`` evenly spaced points.
    """
    family = KernelFamily(family)
    X = _as_points(X)
    if len(X) < 2:
        raise InputError("median heuristic needs at least two points")
    if len(X) > MEDIAN_MAX_POINTS:
        idx = np.linspace(0, len(X) - 1, MEDIAN_MAX_POINTS).round().astype(int)
        X = X[idx]
    metric = "euclidean" if family is KernelFamily.GAUSSIAN else "cityblock"
    d = pdist(X, metric=metric)
    m = float(np.median(d[d > 0])) if np.any(d > 0) else 0.0
    if m == 0.0:
        raise InputError("median heuristic is undefined: all points coincide")
    return 1.0 / (2.0 * m * m) if family is KernelFamily.GAUSSIAN else 1.0 / m


def make_kernel(family: KernelFamily | str, bandwidth, X=None) -> KernelSpec:
    """Build a :class:`KernelSpec`, resolving ``bandwidth="median"`` on ``X``."""
    family = KernelFamily(family)
    if isinstance(bandwidth, str):
        if bandwidth != "median":
            bandwidth = float(bandwidth)
        else:
            if X is None:
                raise InputError("median bandwidth requires training points")
            bandwidth = median_bandwidth(X, family)
    return KernelSpec(family, bandwidth)
