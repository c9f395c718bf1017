"""Shared brute-force oracles and instance generators.

The oracles deliberately avoid the package's own linear-algebra paths: Grams
are formed by explicit loops over ``eval_kernel``, weight vectors from the
closed-form binomial expansion, and projections with dense pseudo-inverses.
"""

from __future__ import annotations

from math import comb

import numpy as np
import pytest

from pfkrylov.embedding import EmbeddingPlan, measure_gram
from pfkrylov.kernels import KernelSpec, eval_kernel


def brute_measure_gram(X, S, N, spec, normalize=True):
    X = np.asarray(X, dtype=float).reshape(len(X), -1)
    S1 = S + 1
    G = np.zeros((S1, S1))
    for t in range(S1):
        for i in range(S1):
            acc = 0.0
            for j in range(N):
                for l in range(N):
                    acc += eval_kernel(spec, X[t + j * S1], X[i + l * S1])
            G[t, i] = acc / (N * N) if normalize else acc
    return G


def brute_cross_gram(X, S, N, spec, x, normalize=True):
    X = np.asarray(X, dtype=float).reshape(len(X), -1)
    S1 = S + 1
    b = np.array([sum(eval_kernel(spec, X[i + j * S1], x) for j in range(N)) for i in range(S1)])
    return b / N if normalize else b


def closed_form_weights(gamma, S):
    """Columns ``j = 0..S``: coefficients of ``w_j`` over ``Phi(mu_0..mu_S)``."""
    W = np.zeros((S + 1, S + 1), dtype=complex)
    for j in range(S + 1):
        for t in range(j + 1):
            W[t, j] = comb(j, t) * (-1) ** t * complex(gamma) ** (j - t)
    return W


def gram_of(G, C):
    # <Phi c_b, Phi c_a> = c_a^H G c_b with G[t, i] = <Phi_i, Phi_t>
    return C.conj().T @ G @ C


def upper_cholesky(B):
    return np.linalg.cholesky(B).conj().T


def arnoldi_oracle(G, S):
    """Dense least-squares projection of the shift ``Phi_i -> Phi_{i+1}``."""
    G00 = G[:S, :S]
    G01 = G[:S, 1 : S + 1]
    C = np.linalg.pinv(G00) @ G01
    R = upper_cholesky(G00.astype(complex))
    return R @ C @ np.linalg.inv(R), R


def shift_invert_oracle(G, S, gamma):
    """Project the resolvent (``w_{j+1} -> w_j``) then map back to the operator."""
    W = closed_form_weights(gamma, S)
    W1, W0 = W[:, 1:], W[:, :S]
    M = gram_of(G, W1)
    Lc = np.linalg.pinv(M) @ (W1.conj().T @ G @ W0)
    R = upper_cholesky(M)
    Kc = complex(gamma) * np.eye(S) - np.linalg.inv(Lc)
    return R @ Kc @ np.linalg.inv(R), R


def random_instance(rng, S, N, *, dim=2, max_cond=1e5, spec=None, normalize=True):
    """Random well-conditioned measure Gram (redraws until the Gram of the
    ``S + 1`` embeddings has condition number below ``max_cond``).

    Above roughly 1e6 the dense pseudo-inverse oracle itself drifts from a
    high-precision reference by more than 1e-8, so it can no longer referee.
    """
    spec = spec or KernelSpec("gaussian", 1.0)
    plan = EmbeddingPlan(S, N, normalize)
    while True:
        X = rng.uniform(-1.5, 1.5, size=(plan.min_length, dim))
        mg = measure_gram(X, plan, spec)
        if np.linalg.cond(mg.G) < max_cond:
            return X, mg


def suite_instances(n=50, seed=20240611):
    """The 50-instance estimator suite: S in 1..4, N in {1, 2, 5}."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        S = (1, 2, 3, 4)[k % 4]
        N = (1, 2, 5)[(k // 4) % 3]
        X, mg = random_instance(rng, S, N, dim=int(rng.integers(1, 4)))
        out.append((X, mg))
    return out


@pytest.fixture(scope="session")
def suite():
    return suite_instances()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
