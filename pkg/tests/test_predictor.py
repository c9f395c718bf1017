import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_cross_gram, closed_form_weights
from pfkrylov.embedding import EmbeddingPlan, measure_gram
from pfkrylov.exceptions import InputError
from pfkrylov.kernels import KernelSpec
from pfkrylov.krylov import estimate
from pfkrylov.predictor import (
    EPS_DEN,
    abnormality,
    project_feature,
    project_features,
    rkhs_norm_of_coordinates,
    score_series,
    squared_prediction_error,
)
from pfkrylov.systems import SyntheticConfig, gen_synthetic

GAUSS = KernelSpec("gaussian", 2.0)


def synthetic_estimate(method="sia", S=3, N=4, gamma=1 + 1j, seed=0, normalize=True):
    x = gen_synthetic(SyntheticConfig(T=400, seed=seed))
    mg = measure_gram(x, EmbeddingPlan(S, N, normalize), GAUSS)
    return estimate(mg, method, gamma), x


def constant_estimate(method="arnoldi"):
    mg = measure_gram(np.full(2 * 3, 0.4), EmbeddingPlan(1, 3), GAUSS)
    return estimate(mg, method, 2.0)


@pytest.mark.parametrize("method", ["arnoldi", "sia"])
def test_projection_of_constant(method):
    np.testing.assert_allclose(project_feature(constant_estimate(method), [0.4]), [1.0], atol=1e-14)


def test_far_point_projects_to_zero():
    est, _ = synthetic_estimate()
    assert np.all(project_feature(est, [1e6]) == 0)


@pytest.mark.parametrize("method", ["arnoldi", "sia"])
def test_projection_matches_oracle(method):
    est, x = synthetic_estimate(method)
    C = np.eye(4, 3) if method == "arnoldi" else closed_form_weights(1 + 1j, 3)[:, 1:]
    Rinv = np.linalg.inv(est.R)
    for q in (-0.3, 0.1, 0.45):
        b = brute_cross_gram(x, 3, 4, GAUSS, [q])
        # <phi(x), q_j> with q_j = sum_i psi_i Rinv[i, j] and psi_i = Phi C[:, i]
        ref = np.array([sum(np.conj(Rinv[i, j]) * (C[:, i].conj() @ b) for i in range(3)) for j in range(3)])
        np.testing.assert_allclose(project_feature(est, [q]), ref, atol=1e-10)


@pytest.mark.parametrize("method", ["arnoldi", "sia"])
def test_projection_norm_is_basis_free(method):
    # ||P phi(x)||^2 = c^H B^+ c, with c the inner products against the basis
    est, x = synthetic_estimate(method)
    B = est.basis_gram
    for q in np.linspace(-0.5, 0.5, 7):
        b = brute_cross_gram(x, 3, 4, GAUSS, [q])
        c = est.basis_coeffs.conj().T @ b
        ref = np.real(c.conj() @ np.linalg.pinv(B) @ c)
        u = project_feature(est, [q])
        assert np.vdot(u, u).real == pytest.approx(ref, rel=1e-8, abs=1e-12)


def test_projection_shrinks_norm(rng):
    est, _ = synthetic_estimate("sia")
    U = project_features(est, rng.uniform(-1, 1, size=(100, 1)))
    assert np.all(np.sum(np.abs(U) ** 2, axis=1) <= 1 + 1e-8)


def test_projection_dimension_mismatch():
    est, _ = synthetic_estimate()
    with pytest.raises(InputError):
        project_feature(est, [0.1, 0.2])
    with pytest.raises(InputError):
        abnormality(est, [0.1], [0.1, 0.2])


@pytest.mark.parametrize("method", ["arnoldi", "sia"])
def test_constant_prediction_is_exact(method):
    score, den = abnormality(constant_estimate(method), [0.4], [0.4])
    assert score == pytest.approx(0.0, abs=1e-7)
    assert den == pytest.approx(1.0)


def test_far_current_point_formula():
    est, _ = synthetic_estimate()
    score, den = abnormality(est, [0.2], [1e6])
    assert score == pytest.approx(np.sqrt(1 + den**2) / den, rel=1e-12)


def test_degenerate_denominator_is_flagged():
    est, _ = synthetic_estimate()
    score, den = abnormality(est, [1e6], [0.0])
    assert den <= EPS_DEN and score == np.inf
    tr = score_series(est, np.array([[1e6], [0.0], [0.1]]), 1, 3)
    assert tr.flags == ["degenerate", "ok"]
    assert not np.any(np.isnan(tr.scores))


def test_score_series_composition():
    est, x = synthetic_estimate()
    tr = score_series(est, x, 1, 60)
    for k, t in enumerate(tr.t_indices):
        s, d = abnormality(est, [x[t - 1]], [x[t]])
        assert tr.scores[k] == pytest.approx(s, rel=1e-12)
        assert tr.denominators[k] == pytest.approx(d, rel=1e-12)


def test_score_series_empty_and_ranges():
    est, x = synthetic_estimate()
    assert len(score_series(est, x, 5, 5)) == 0
    with pytest.raises(InputError):
        score_series(est, x, 0, 5)
    with pytest.raises(InputError):
        score_series(est, x, 3, len(x) + 1)


def test_training_scores_sane():
    est, x = synthetic_estimate(S=4, N=20)
    tr = score_series(est, x, 1, 100)
    med = np.median(tr.scores)
    assert np.isfinite(med) and med > 0


@pytest.mark.parametrize("method", ["arnoldi", "sia"])
def test_scores_invariant_to_normalization(method):
    a, x = synthetic_estimate(method, normalize=True)
    b, _ = synthetic_estimate(method, normalize=False)
    ta, tb = score_series(a, x, 1, 200), score_series(b, x, 1, 200)
    assert np.abs(ta.scores - tb.scores).max() <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["arnoldi", "sia"]))
def test_metric_and_isometry(seed, method):
    rng = np.random.default_rng(seed)
    S = int(rng.integers(1, 5))
    X = rng.uniform(-1, 1, size=((S + 1) * 3, 2))
    try:
        est = estimate(measure_gram(X, EmbeddingPlan(S, 3), KernelSpec("gaussian", 1.5)), method, 1.25)
    except ArithmeticError:
        return
    P, C = rng.uniform(-1.5, 1.5, size=(2, 10, 2))
    assert squared_prediction_error(est, P, C).min() >= -1e-12
    for v in rng.normal(size=(3, S)) + 1j * rng.normal(size=(3, S)):
        v = v if method == "sia" else v.real
        assert rkhs_norm_of_coordinates(est, v) == pytest.approx(np.linalg.norm(v), rel=1e-8)


def test_spike_exceeds_clean_quantile():
    from pfkrylov.estimator import KrylovAbnormalityDetector
    from pfkrylov.systems import gen_quasi_periodic

    p, S, N = 15, 10, 40
    n_train = p - 1 + (S + 1) * N
    y = gen_quasi_periodic(1200, seed=0)
    lo = 900
    y[lo] += 2.0
    det = KrylovAbnormalityDetector("sia", S, N, "laplacian", gamma=1.25, delay=p).fit(y[:n_train])
    tr = det.abnormality_trace(y)
    t, s = tr.t_indices, tr.scores
    clean = s[(t >= n_train) & ((t < lo) | (t > lo + p))]
    assert s[t == lo][0] > np.percentile(clean, 95)

