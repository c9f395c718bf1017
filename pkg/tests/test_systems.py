import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfkrylov.embedding import EmbeddingPlan, split_indices, training_points
from pfkrylov.exceptions import ARFitError, InputError
from pfkrylov.systems import (
    ARModel,
    SyntheticConfig,
    ar_fit,
    ar_score,
    delay_embed,
    gen_logistic_cycle,
    gen_quasi_periodic,
    gen_synthetic,
    inject_anomalies,
)


def test_synthetic_one_step():
    x = gen_synthetic(SyntheticConfig(T=1, noise_std=0.0, x0=0.5))
    assert x[0] == 0.5
    assert x[1] == pytest.approx(0.99 * 0.5 * np.cos(0.05), abs=1e-15)
    assert f"{x[1]:.7f}" == "0.4943814"


@settings(max_examples=30, deadline=None)
@given(st.floats(-50, 50))
def test_noiseless_contraction(x0):
    x = gen_synthetic(SyntheticConfig(T=50, noise_std=0.0, x0=x0))
    assert np.all(np.abs(x[1:]) <= 0.99 * np.abs(x[:-1]) + 1e-15)


def test_synthetic_length_and_determinism():
    a = gen_synthetic(SyntheticConfig(T=1600, seed=7))
    b = gen_synthetic(SyntheticConfig(T=1600, seed=7))
    assert len(a) == 1601 and np.array_equal(a, b)
    assert not np.array_equal(a, gen_synthetic(SyntheticConfig(T=1600, seed=8)))


def test_synthetic_config_validation():
    with pytest.raises(InputError):
        SyntheticConfig(T=0)
    with pytest.raises(InputError):
        SyntheticConfig(noise_std=-1)


def test_other_generators_deterministic():
    assert np.array_equal(gen_logistic_cycle(100, seed=3), gen_logistic_cycle(100, seed=3))
    assert np.array_equal(gen_quasi_periodic(100, seed=3), gen_quasi_periodic(100, seed=3))


def test_logistic_cycle_has_period_four():
    x = gen_logistic_cycle(400, noise_std=0.0)
    np.testing.assert_allclose(x[-4:], x[-8:-4], atol=1e-6)
    assert np.ptp(x[-4:]) > 0.3


def test_delay_identity_lift():
    out = delay_embed([1.0, 2.0, 3.0], 1)
    assert out.tolist() == [[1.0], [2.0], [3.0]]


def test_delay_newest_first():
    assert delay_embed([1, 2, 3, 4], 2).tolist() == [[2, 1], [3, 2], [4, 3]]


def test_delay_too_short():
    with pytest.raises(InputError):
        delay_embed([1.0, 2.0], 3)
    with pytest.raises(InputError):
        delay_embed([1.0, 2.0], 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 60), st.integers(1, 10))
def test_delay_shapes(n, p):
    y = np.arange(n, dtype=float)
    if n < p:
        with pytest.raises(InputError):
            delay_embed(y, p)
        return
    out = delay_embed(y, p)
    assert out.shape == (n - p + 1, p)
    assert np.all(out[:, 0] == y[p - 1 :])


def test_delay_then_split_index_accounting():
    # state e holds raw samples e..e+p-1; the (S+1)N training states span raw
    # indices 0 .. p-2+(S+1)N, every one of them used by exactly one measure
    p, plan = 15, EmbeddingPlan(10, 40)
    y = np.arange(p - 1 + plan.min_length + 50, dtype=float)
    P = training_points(delay_embed(y, p), plan)
    used = sorted(int(P[i, 0]) for t in range(plan.S + 1) for i in split_indices(plan, t))
    assert used == list(range(p - 1, p - 1 + plan.min_length))
    assert P[:, -1].min() == 0 and P[:, 0].max() == p - 2 + plan.min_length


def test_ar1_exact():
    lam = 0.8
    y = lam ** np.arange(40)
    m = ar_fit(y, 1)
    assert m.coeffs[0] == pytest.approx(lam, abs=1e-10)


def test_ar_white_noise(rng):
    sigma, n = 1.0, 4000
    m = ar_fit(sigma * rng.standard_normal(n), 2)
    assert np.all(np.abs(m.coeffs) < 3 * sigma / np.sqrt(n))


def test_ar_recovers_known_process(rng):
    c = np.array([0.5, -0.3, 0.1])
    n = 5000
    y = np.zeros(n)
    for t in range(3, n):
        y[t] = c @ y[t - 3 : t][::-1] + 0.1 * rng.standard_normal()
    m = ar_fit(y, 3)
    X = np.stack([y[2 - i : n - 1 - i] for i in range(3)], axis=1)
    se = m.residual_std * np.sqrt(np.diag(np.linalg.inv(X.T @ X)))
    assert np.all(np.abs(m.coeffs - c) <= 5 * se)


def test_ar_fit_errors():
    with pytest.raises(ARFitError):
        ar_fit(np.ones(50), 2)
    with pytest.raises(InputError):
        ar_fit(np.arange(4.0), 2)


def test_ar_score_exact_process():
    y = 0.8 ** np.arange(40)
    tr = ar_score(ARModel([0.8], residual_std=1.0), y, 1, 40)
    assert np.all(tr.scores <= 1e-8)


def test_ar_score_spike(rng):
    y = rng.standard_normal(500)
    m = ar_fit(y[:300], 4)
    y[400] += 10 * m.residual_std
    tr = ar_score(m, y, 4, 500)
    assert tr.scores[tr.t_indices == 400][0] >= 5


def test_ar_score_empty_and_errors():
    m = ARModel([0.5], residual_std=1.0)
    assert len(ar_score(m, np.arange(10.0), 3, 3)) == 0
    with pytest.raises(ARFitError):
        ar_score(ARModel([0.5], residual_std=0.0), np.arange(10.0), 1, 5)
    with pytest.raises(InputError):
        ar_score(m, np.arange(10.0), 0, 5)


def test_inject_anomalies_layout():
    y = np.zeros(2000)
    out, inj = inject_anomalies(y, 8, start=400, length=20, seed=1)
    assert len(inj) == 8
    ends = [-1]
    for j in inj:
        assert j.start > ends[-1] and j.start >= 400 and j.end < 2000
        ends.append(j.end)
    changed = np.flatnonzero(out != 0)
    assert all(any(j.start <= c <= j.end for j in inj) for c in changed)


def test_inject_anomalies_too_many():
    with pytest.raises(InputError):
        inject_anomalies(np.zeros(100), 12, start=0, length=20)
