"""Detection sweeps and the Krylov-dimension convergence study."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .embedding import EmbeddingPlan, measure_gram
from .exceptions import InputError, NumericalError
from .kernels import make_kernel
from .krylov import Method, estimate
from .predictor import abnormality
from .systems import SyntheticConfig, gen_synthetic

THREADS_ENV = "PFKRYLOV_THREADS"


def thread_count() -> int:
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            n = int(value)
        except ValueError:
            raise InputError(f"{THREADS_ENV} must be an integer, got {value!r}") from None
        return max(n, 1)
    return os.cpu_count() or 1


@dataclass
class SweepResult:
    thresholds: np.ndarray
    accuracy: np.ndarray
    false_alarm_rate: np.ndarray
    intervals: np.ndarray
    # highest score inside each labelled interval; detected iff > threshold
    interval_max: np.ndarray

    def accuracy_at(self, max_false_alarm: float) -> float:
        """Best accuracy among thresholds whose false-alarm rate is within bound."""
        ok = self.false_alarm_rate <= max_false_alarm
        return float(self.accuracy[ok].max()) if ok.any() else 0.0


def _interval_mask(t: np.ndarray, intervals: np.ndarray) -> np.ndarray:
    inside = np.zeros(len(t), dtype=bool)
    for lo, hi in intervals:
        inside |= (t >= lo) & (t <= hi)
    return inside


def threshold_sweep(t, scores, intervals, n_thresholds: int | None = 200) -> SweepResult:
    """Accuracy and false-alarm rate over a grid of score thresholds.

    A point is flagged when its score exceeds the threshold. An interval
    ``[start, end]`` (inclusive) counts as detected if any scored point
    inside it is flagged; the false-alarm rate is the fraction of scored
    points outside all intervals that are flagged. Thresholds are quantiles
    of the finite scores (all distinct values when ``n_thresholds`` is
    None), preceded by one value below the minimum.
    """
    t = np.asarray(t)
    scores = np.asarray(scores, dtype=float)
    intervals = np.asarray(intervals, dtype=int).reshape(-1, 2)
    if len(intervals) == 0:
        raise InputError("labels contain no anomalous intervals")
    if len(t) != len(scores):
        raise InputError("trace indices and scores differ in length")
    finite = scores[np.isfinite(scores)]
    if len(finite) == 0:
        raise InputError("trace has no finite scores to sweep")
    if n_thresholds is None:
        grid = np.unique(finite)
    else:
        grid = np.unique(np.quantile(finite, np.linspace(0.0, 1.0, n_thresholds)))
    lowest = grid[0] - max(1.0, abs(grid[0]))
    thresholds = np.concatenate([[lowest], grid])

    interval_max = np.full(len(intervals), -np.inf)
    for k, (lo, hi) in enumerate(intervals):
        sel = (t >= lo) & (t <= hi)
        if sel.any():
            interval_max[k] = scores[sel].max()
    normal = np.sort(scores[~_interval_mask(t, intervals)])
    accuracy = (interval_max[None, :] > thresholds[:, None]).mean(axis=1)
    if len(normal):
        n_above = len(normal) - np.searchsorted(normal, thresholds, side="right")
        far = n_above / len(normal)
    else:
        far = np.zeros(len(thresholds))
    return SweepResult(thresholds, accuracy, far, intervals, interval_max)


@dataclass
class ConvergenceReport:
    """Cross-series mean of ``|a_S - a_{S-1}|`` for ``S = 2..S_max``.

    ``raw[method]`` has one row per series and one column per ``S = 1..S_max``
    (NaN where estimation failed); series with any failure are excluded from
    that method's means and listed in ``errors``.
    """

    S_values: np.ndarray
    mean_diff: dict
    n_used: dict
    raw: dict
    errors: list = field(default_factory=list)


def _series_abnormalities(seed, *, n_obs, t, N, S_max, kernel, bandwidth, gamma, noise_std, x0):
    x = gen_synthetic(SyntheticConfig(T=n_obs - 1, x0=x0, noise_std=noise_std, seed=seed))[:, None]
    spec = make_kernel(kernel, bandwidth, x[: (S_max + 1) * N])
    out = {m: np.full(S_max, np.nan) for m in Method}
    errors = []
    for S in range(1, S_max + 1):
        mg = measure_gram(x, EmbeddingPlan(S, N), spec)
        for m in Method:
            try:
                est = estimate(mg, m, gamma)
                out[m][S - 1] = abnormality(est, x[t - 1], x[t])[0]
            except NumericalError as err:
                errors.append((seed, m.value, S, str(err)))
    return out, errors


def convergence_study(
    n_series: int = 100,
    S_max: int = 12,
    *,
    N: int = 100,
    t: int = 1601,
    gamma: complex = 1 + 1j,
    kernel: str = "gaussian",
    bandwidth="median",
    noise_std: float = 0.1,
    x0: float = 0.5,
    seed: int = 0,
    threads: int | None = None,
) -> ConvergenceReport:
    """Abnormality at time ``t`` for ``S = 1..S_max`` on ``n_series`` seeded
    series of the cosine map, with both estimators.

    Series ``k`` uses seed ``seed + k``. The bandwidth is resolved once per
    series on the ``(S_max + 1) N`` training states so it is shared by all S.
    """
    if n_series < 1:
        raise InputError(f"n_series must be >= 1, got {n_series}")
    if S_max < 2:
        raise InputError(f"S_max must be >= 2, got {S_max}")
    if t + 1 < (S_max + 1) * N:
        raise InputError(f"t={t} leaves fewer than (S_max+1)*N = {(S_max + 1) * N} states")
    kwargs = dict(
        n_obs=t + 1, t=t, N=N, S_max=S_max, kernel=kernel, bandwidth=bandwidth,
        gamma=gamma, noise_std=noise_std, x0=x0,
    )
    seeds = [seed + k for k in range(n_series)]
    workers = threads or thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda s: _series_abnormalities(s, **kwargs), seeds))
    else:
        results = [_series_abnormalities(s, **kwargs) for s in seeds]

    raw = {m.value: np.array([r[0][m] for r in results]) for m in Method}
    errors = [e for r in results for e in r[1]]
    mean_diff, n_used = {}, {}
    for name, A in raw.items():
        ok = ~np.isnan(A).any(axis=1)
        n_used[name] = int(ok.sum())
        if ok.any():
            mean_diff[name] = np.abs(np.diff(A[ok], axis=1)).mean(axis=0)
        else:
            mean_diff[name] = np.full(S_max - 1, np.nan)
    return ConvergenceReport(np.arange(2, S_max + 1), mean_diff, n_used, raw, errors)
