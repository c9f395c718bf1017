"""Benchmark dynamics, delay embedding, anomaly injection and the AR baseline.

Random draws use numpy's ``Generator`` on the PCG64 bit generator
(``np.random.default_rng(seed)``); Gaussian variates come from its ziggurat
sampler, so series are reproducible across platforms for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ARFitError, InputError
from .predictor import AbnormalityTrace


@dataclass(frozen=True)
class SyntheticConfig:
    T: int = 1600
    x0: float = 0.5
    noise_std: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.T < 1:
            raise InputError(f"T must be >= 1, got {self.T}")
        if self.noise_std < 0:
            raise InputError(f"noise_std must be >= 0, got {self.noise_std}")


def cosine_map(x):
    return 0.99 * x * np.cos(0.1 * x)


def gen_synthetic(cfg: SyntheticConfig) -> np.ndarray:
    """``x[t+1] = 0.99 x[t] cos(0.1 x[t]) + xi_t``; returns ``T + 1`` values."""
    rng = np.random.default_rng(cfg.seed)
    xi = cfg.noise_std * rng.standard_normal(cfg.T)
    x = np.empty(cfg.T + 1)
    x[0] = cfg.x0
    for t in range(cfg.T):
        x[t + 1] = cosine_map(x[t]) + xi[t]
    return x


def gen_logistic_cycle(T: int, *, r: float = 3.5, x0: float = 0.2, noise_std: float = 0.002, seed: int = 0):
    """Noisy logistic map; at ``r = 3.5`` it has an attracting 4-cycle.

    Strided measures with stride 4 then have distinct limits, which makes
    the finite-``N`` estimates converge to a non-degenerate projection.
    """
    rng = np.random.default_rng(seed)
    xi = noise_std * rng.standard_normal(T)
    x = np.empty(T + 1)
    x[0] = x0
    for t in range(T):
        x[t + 1] = r * x[t] * (1.0 - x[t]) + xi[t]
    return x


def gen_quasi_periodic(
    n: int,
    *,
    period: float = 40.0,
    noise_std: float = 0.02,
    jitter: float = 0.02,
    seed: int = 0,
) -> np.ndarray:
    """ECG-like pulse train: a sharp spike plus a broad wave each beat.

    The beat period wanders by ``jitter`` (relative) from beat to beat.
    """
    rng = np.random.default_rng(seed)
    phase = np.empty(n)
    p, acc = period, 0.0
    for t in range(n):
        phase[t] = acc / p
        acc += 1.0
        if acc >= p:
            acc -= p
            p = period * (1.0 + jitter * rng.standard_normal())
    spike = np.exp(-0.5 * ((phase - 0.2) / 0.025) ** 2)
    wave = 0.3 * np.exp(-0.5 * ((phase - 0.55) / 0.08) ** 2)
    dip = -0.15 * np.exp(-0.5 * ((phase - 0.14) / 0.02) ** 2)
    return spike + wave + dip + noise_std * rng.standard_normal(n)


@dataclass
class Injection:
    kind: str
    start: int
    end: int
    magnitude: float


def inject_anomalies(
    y,
    n_anomalies: int,
    *,
    start: int,
    length: int = 20,
    kinds: tuple[str, ...] = ("spike", "level", "flatline", "noise"),
    magnitude: float = 0.5,
    seed: int = 0,
) -> tuple[np.ndarray, list[Injection]]:
    """Insert non-overlapping anomalous intervals after ``start``.

    Kinds: ``spike`` (single large value), ``level`` (additive offset),
    ``flatline`` (signal frozen at its first value) and ``noise`` (added
    white noise). Intervals are spread evenly; ``end`` is inclusive.
    """
    y = np.array(y, dtype=float)
    rng = np.random.default_rng(seed)
    span = len(y) - start
    slot = span // n_anomalies
    if slot < 2 * length:
        raise InputError("series too short for the requested number of anomalies")
    out = []
    for k in range(n_anomalies):
        kind = kinds[k % len(kinds)]
        lo = start + k * slot + int(rng.integers(length // 2, slot - length - length // 2))
        hi = lo + length - 1
        if kind == "spike":
            hi = lo
            y[lo] += 4 * magnitude * (1 if rng.random() < 0.5 else -1)
        elif kind == "level":
            y[lo : hi + 1] += magnitude
        elif kind == "flatline":
            y[lo : hi + 1] = y[lo]
        elif kind == "noise":
            y[lo : hi + 1] += magnitude * rng.standard_normal(hi - lo + 1)
        else:
            raise InputError(f"unknown anomaly kind {kind!r}")
        out.append(Injection(kind, lo, hi, magnitude))
    return y, out


@dataclass(frozen=True)
class DelayPlan:
    p: int

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise InputError(f"delay p must be a positive integer, got {self.p}")


def delay_embed(series, plan: DelayPlan | int) -> np.ndarray:
    """Rows ``[y[t+p-1], ..., y[t]]`` (newest first); ``len(series) - p + 1`` rows."""
    p = plan.p if isinstance(plan, DelayPlan) else DelayPlan(plan).p
    y = np.asarray(series, dtype=float).ravel()
    if len(y) < p:
        raise InputError(f"series of length {len(y)} is shorter than delay p={p}")
    windows = np.lib.stride_tricks.sliding_window_view(y, p)
    return np.ascontiguousarray(windows[:, ::-1])


@dataclass
class ARModel:
    """``x[t+1] = sum_i coeffs[i] x[t-i] + xi``; no intercept."""

    coeffs: np.ndarray
    residual_std: float = 1.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if not np.all(np.isfinite(self.coeffs)):
            raise InputError("AR coefficients must be finite")

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def predict_at(self, y: np.ndarray, t: np.ndarray) -> np.ndarray:
        """One-step predictions of ``y[t]`` from ``y[t-1], ..., y[t-p]``."""
        lags = np.stack([y[t - 1 - i] for i in range(self.order)], axis=1)
        return lags @ self.coeffs


def ar_fit(series, p: int) -> ARModel:
    y = np.asarray(series, dtype=float).ravel()
    if p < 1:
        raise InputError(f"AR order must be >= 1, got {p}")
    if len(y) < 2 * p + 1:
        raise InputError(f"AR({p}) fit needs at least {2 * p + 1} values, got {len(y)}")
    if np.ptp(y) == 0:
        raise ARFitError("constant series: the AR design is degenerate")
    t = np.arange(p, len(y))
    X = np.stack([y[t - 1 - i] for i in range(p)], axis=1)
    coeffs, _, rank, _ = np.linalg.lstsq(X, y[t], rcond=None)
    if rank < p:
        raise ARFitError(f"rank-deficient AR({p}) design (rank {rank})")
    resid = y[t] - X @ coeffs
    dof = max(len(t) - p, 1)
    return ARModel(coeffs, float(np.sqrt(resid @ resid / dof)), metadata={"n_fit": len(t)})


def ar_score(model: ARModel, series, t_start: int, t_end: int) -> AbnormalityTrace:
    """Standardised one-step residual ``|y[t] - prediction| / residual_std``
    for ``t`` in ``[t_start, t_end)``."""
    y = np.asarray(series, dtype=float).ravel()
    if model.residual_std <= 0:
        raise ARFitError("AR residual_std is zero; scores are undefined")
    if t_start < model.order or t_end > len(y) or t_end < t_start:
        raise InputError(
            f"AR score range [{t_start}, {t_end}) invalid for order {model.order} "
            f"and series length {len(y)}"
        )
    t = np.arange(t_start, t_end)
    if len(t):
        err = np.abs(y[t] - model.predict_at(y, t))
        scores = err / model.residual_std
    else:
        scores = np.empty(0)
    den = np.full(len(t), model.residual_std)
    return AbnormalityTrace(t, scores, den, np.zeros(len(t), dtype=bool), method="ar", S=model.order)
