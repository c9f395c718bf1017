"""Strided empirical measures of a single trajectory and their RKHS inner products.

The series is split into ``S + 1`` interleaved subsets with stride ``S + 1``:
measure ``t`` holds the atoms ``x[t], x[t + S'], ..., x[t + (N - 1) S']``.
Its kernel mean embedding is never formed; everything is expressed through
kernel evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError
from .kernels import KernelSpec, _as_points, gram_block


@dataclass(frozen=True)
class EmbeddingPlan:
    S: int
    N: int
    normalize: bool = True

    def __post_init__(self):
        if int(self.S) != self.S or self.S < 1:
            raise InputError(f"S must be a positive integer, got {self.S}")
        if int(self.N) != self.N or self.N < 1:
            raise InputError(f"N must be a positive integer, got {self.N}")
        object.__setattr__(self, "S", int(self.S))
        object.__setattr__(self, "N", int(self.N))

    @property
    def stride(self) -> int:
        return self.S + 1

    @property
    def min_length(self) -> int:
        return (self.S + 1) * self.N


@dataclass(frozen=True)
class MeasureGram:
    """``G[t, i] = <Phi(mu_i), Phi(mu_t)>`` for ``t, i = 0..S``.

    ``points`` are the ``(S + 1) N`` training states actually used, kept so
    that cross-Grams against new points can be formed later.
    """

    G: np.ndarray
    plan: EmbeddingPlan
    spec: KernelSpec
    points: np.ndarray = field(repr=False)


def split_indices(plan: EmbeddingPlan, t: int) -> list[int]:
    if not 0 <= t <= plan.S:
        raise InputError(f"measure index t={t} outside [0, {plan.S}]")
    return [t + j * plan.stride for j in range(plan.N)]


def training_points(series, plan: EmbeddingPlan) -> np.ndarray:
    """The first ``(S + 1) N`` states of ``series`` as a 2-D array."""
    X = _as_points(series)
    if len(X) < plan.min_length:
        raise InputError(
            f"series too short: need at least {plan.min_length} states "
            f"for S={plan.S}, N={plan.N}, got {len(X)}"
        )
    return X[: plan.min_length]


def _block_sum(K: np.ndarray, plan: EmbeddingPlan) -> np.ndarray:
    # row-major index j * S' + t  <->  atom j of measure t
    S1, N = plan.stride, plan.N
    return K.reshape(N, S1, -1).sum(axis=0)


def measure_gram(series, plan: EmbeddingPlan, spec: KernelSpec) -> MeasureGram:
    X = training_points(series, plan)
    K = gram_block(spec, X)
    S1, N = plan.stride, plan.N
    G = K.reshape(N, S1, N, S1).sum(axis=(0, 2))
    G = np.triu(G) + np.triu(G, 1).T
    if plan.normalize:
        G = G / (N * N)
    return MeasureGram(G=G, plan=plan, spec=spec, points=X)


def cross_gram_points(mg: MeasureGram, Y) -> np.ndarray:
    """Cross-Gram for many query points: row ``r`` is the vector for ``Y[r]``.

    Entry ``[r, i] = <phi(Y[r]), Phi(mu_i)>``.
    """
    Y = _as_points(Y)
    if Y.shape[1] != mg.points.shape[1]:
        raise InputError(
            f"dimension mismatch: query has {Y.shape[1]} coordinates, "
            f"training states have {mg.points.shape[1]}"
        )
    K = gram_block(mg.spec, mg.points, Y)
    b = _block_sum(K, mg.plan).T
    if mg.plan.normalize:
        b = b / mg.plan.N
    return b


def cross_gram(series, plan: EmbeddingPlan, spec: KernelSpec, x) -> np.ndarray:
    X = training_points(series, plan)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or x.shape[0] != X.shape[1]:
        raise InputError(f"dimension mismatch: query {x.shape} vs states of dim {X.shape[1]}")
    mg = MeasureGram(G=np.empty((0, 0)), plan=plan, spec=spec, points=X)
    return cross_gram_points(mg, x[None, :])[0]
