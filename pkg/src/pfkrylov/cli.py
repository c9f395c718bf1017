"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 numerical breakdown.

Index convention: every ``t`` on the command line and in trace/label CSVs
is a row of the input CSV. With delay ``p`` the state at ``t`` is
``[y_t, ..., y_{t-p+1}]``, defined for ``t >= p - 1``.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .embedding import EmbeddingPlan, measure_gram, training_points
from .evaluation import THREADS_ENV, convergence_study, threshold_sweep
from .exceptions import InputError, NumericalError
from .io import (
    fmt,
    format_complex,
    load_estimate,
    parse_complex,
    read_config,
    read_labels_csv,
    read_series_csv,
    read_trace_csv,
    save_estimate,
    write_series_csv,
    write_trace_csv,
)
from .kernels import make_kernel
from .krylov import Method, estimate
from .predictor import score_series
from .systems import SyntheticConfig, ar_fit, ar_score, delay_embed, gen_synthetic

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2


@dataclass
class RunConfig:
    method: str = "sia"
    kernel: str = "gaussian"
    bandwidth: str = "median"
    s: int = 10
    n: int = 40
    gamma: str = "1.25"
    delay: int = 1
    normalize: bool = True
    train_start: int | None = None
    train_end: int | None = None
    score_start: int | None = None
    score_end: int | None = None
    seed: int = 0

    @classmethod
    def build(cls, config_path=None, **overrides) -> "RunConfig":
        """Defaults, then the key=value file, then command-line flags."""
        values: dict = {}
        if config_path:
            for key, raw in read_config(config_path).items():
                name = key.lower()
                if name not in {f.name for f in fields(cls)}:
                    raise InputError(f"{config_path}: unknown key {key!r}")
                values[name] = raw
        values.update({k: v for k, v in overrides.items() if v is not None})
        cfg = cls()
        for f in fields(cls):
            if f.name in values:
                setattr(cfg, f.name, _coerce(f.name, values[f.name]))
        cfg.validate()
        return cfg

    def validate(self):
        Method(self.method)
        if self.kernel not in ("gaussian", "laplacian"):
            raise InputError(f"unknown kernel {self.kernel!r}")
        if self.delay < 1:
            raise InputError(f"delay must be >= 1, got {self.delay}")
        EmbeddingPlan(self.s, self.n, self.normalize)
        if self.method == "sia":
            parse_complex(self.gamma)


_INT_FIELDS = {"s", "n", "delay", "train_start", "train_end", "score_start", "score_end", "seed"}


def _coerce(name, value):
    if not isinstance(value, str):
        return value
    if name in _INT_FIELDS:
        try:
            return int(value)
        except ValueError:
            raise InputError(f"{name} must be an integer, got {value!r}") from None
    if name == "normalize":
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise InputError(f"normalize must be a boolean, got {value!r}")
    return value


def _states(data: np.ndarray, delay: int) -> np.ndarray:
    if delay > 1:
        if data.shape[1] != 1:
            raise InputError("delay embedding needs a single-column input")
        return delay_embed(data[:, 0], delay)
    return data


def _run_flags(args) -> dict:
    return dict(
        method=args.method, kernel=args.kernel, bandwidth=args.bandwidth, s=args.S, n=args.N,
        gamma=args.gamma, delay=args.delay, normalize=args.normalize,
        train_start=args.train_start, train_end=args.train_end, seed=args.seed,
    )


# -- commands ------------------------------------------------------------------


def cmd_synth(args) -> int:
    cfg = SyntheticConfig(T=args.T, x0=args.x0, noise_std=args.noise_std, seed=args.seed)
    write_series_csv(args.out, gen_synthetic(cfg))
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = RunConfig.build(args.config, **_run_flags(args))
    _, data = read_series_csv(args.input)
    p = cfg.delay
    plan = EmbeddingPlan(cfg.s, cfg.n, cfg.normalize)
    need = p - 1 + plan.min_length
    train_start = p - 1 if cfg.train_start is None else cfg.train_start
    train_end = len(data) - 1 if cfg.train_end is None else cfg.train_end
    if train_start < p - 1:
        raise InputError(f"train_start must be >= p - 1 = {p - 1}")
    if train_end - train_start + 1 < plan.min_length:
        raise InputError(
            f"input too short: need at least {need} rows (p - 1 + (S+1)*N) in the "
            f"training window, got {max(train_end - train_start + 1, 0) + p - 1}"
        )
    states = _states(data, p)
    first = train_start - (p - 1)
    points = training_points(states[first : train_end - (p - 1) + 1], plan)
    spec = make_kernel(cfg.kernel, cfg.bandwidth, points)
    mg = measure_gram(points, plan, spec)
    gamma = parse_complex(cfg.gamma) if cfg.method == "sia" else None
    est = estimate(mg, cfg.method, gamma)
    header = {"source": str(args.input), "delay": p, "train_start": first}
    save_estimate(args.out, est, header=header, embed_data=args.embed_data)
    print(f"method={est.method.value} S={est.S} N={est.N} kernel={spec.family.value} "
          f"bandwidth={fmt(spec.bandwidth)}")
    if est.gamma is not None:
        print(f"gamma={format_complex(est.gamma)} cond(Ltilde)={est.condition:.3e}")
    return EXIT_OK


def cmd_score(args) -> int:
    est, header = load_estimate(args.estimate)
    p = int(header.get("delay", "1"))
    _, data = read_series_csv(args.input)
    states = _states(data, p)
    if states.shape[1] != est.gram.points.shape[1]:
        raise InputError(
            f"estimate expects states of dimension {est.gram.points.shape[1]}, "
            f"input gives {states.shape[1]}"
        )
    cfg = RunConfig.build(args.config, score_start=args.start, score_end=args.end) if args.config else None
    start = args.start if cfg is None else cfg.score_start
    end = args.end if cfg is None else cfg.score_end
    start = p if start is None else start
    end = len(data) if end is None else end
    if start < p:
        raise InputError(f"start must be >= p = {p}")
    trace = score_series(est, states, start - (p - 1), end - (p - 1))
    trace.t_indices = trace.t_indices + (p - 1)
    write_trace_csv(args.out, trace)
    return EXIT_OK


def cmd_ar(args) -> int:
    _, data = read_series_csv(args.input)
    if data.shape[1] != 1:
        raise InputError("the AR baseline needs a single-column input")
    y = data[:, 0]
    lo = 0 if args.train_start is None else args.train_start
    hi = len(y) - 1 if args.train_end is None else args.train_end
    model = ar_fit(y[lo : hi + 1], args.order)
    start = args.order if args.start is None else args.start
    end = len(y) if args.end is None else args.end
    write_trace_csv(args.out, ar_score(model, y, start, end))
    print(f"AR({args.order}) residual_std={fmt(model.residual_std)}")
    return EXIT_OK


def cmd_convergence(args) -> int:
    report = convergence_study(
        args.n_series, args.S_max, N=args.N, t=args.t, gamma=parse_complex(args.gamma),
        kernel=args.kernel, bandwidth=args.bandwidth, noise_std=args.noise_std,
        x0=args.x0, seed=args.seed, threads=args.threads,
    )
    names = list(report.mean_diff)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["S"] + [c for m in names for c in (f"{m}_mean_abs_diff", f"{m}_series", f"{m}_excluded")])
        for k, S in enumerate(report.S_values):
            row = [int(S)]
            for m in names:
                row += [fmt(report.mean_diff[m][k]), report.n_used[m], args.n_series - report.n_used[m]]
            w.writerow(row)
    for seed, method, S, msg in report.errors:
        print(f"excluded series seed={seed} method={method} S={S}: {msg}", file=sys.stderr)
    if args.plot:
        from .plots import plot_convergence

        plot_convergence(report, args.plot)
    return EXIT_OK


def cmd_sweep(args) -> int:
    trace = read_trace_csv(args.trace)
    labels = read_labels_csv(args.labels)
    res = threshold_sweep(trace.t_indices, trace.scores, labels, args.n_thresholds)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["threshold", "accuracy", "false_alarm_rate"])
        for th, acc, far in zip(res.thresholds, res.accuracy, res.false_alarm_rate):
            w.writerow([fmt(th), fmt(acc), fmt(far)])
    hits = Path(args.out).with_suffix(".hits.csv")
    with open(hits, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["start", "end", "max_score"])
        for (lo, hi), mx in zip(res.intervals, res.interval_max):
            w.writerow([int(lo), int(hi), fmt(mx)])
    if args.plot:
        from .plots import plot_sweep

        plot_sweep({args.name or Path(args.trace).stem: res}, args.plot)
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _add_run_options(p):
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--method", choices=["arnoldi", "sia"])
    p.add_argument("--kernel", choices=["gaussian", "laplacian"])
    p.add_argument("--bandwidth", help='positive number or "median"')
    p.add_argument("--S", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--gamma", help="shift as a+bi (sia only)")
    p.add_argument("--delay", type=int)
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--train-start", type=int)
    p.add_argument("--train-end", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pfkrylov", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a cosine-map series")
    p.add_argument("--T", type=int, default=1600)
    p.add_argument("--x0", type=float, default=0.5)
    p.add_argument("--noise-std", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("estimate", help="estimate the projected operator")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--embed-data", action="store_true", help="inline training states")
    p.add_argument("--seed", type=int)
    _add_run_options(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("score", help="abnormality trace from an estimate")
    p.add_argument("--estimate", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--start", type=int, help="first t (default p)")
    p.add_argument("--end", type=int, help="one past the last t (default: input length)")
    p.add_argument("--config", help="key=value file (score_start, score_end); flags override it")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("ar", help="AR baseline trace")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--order", type=int, default=15)
    p.add_argument("--train-start", type=int)
    p.add_argument("--train-end", type=int)
    p.add_argument("--start", type=int)
    p.add_argument("--end", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_ar)

    p = sub.add_parser("convergence", help="mean |a(S) - a(S-1)| over seeded series")
    p.add_argument("--n-series", type=int, default=100)
    p.add_argument("--S-max", type=int, default=12)
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--t", type=int, default=1601)
    p.add_argument("--gamma", default="1+1i")
    p.add_argument("--kernel", choices=["gaussian", "laplacian"], default="gaussian")
    p.add_argument("--bandwidth", default="median")
    p.add_argument("--noise-std", type=float, default=0.1)
    p.add_argument("--x0", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--plot")
    p.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or CPU count)")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("sweep", help="accuracy vs false-alarm rate")
    p.add_argument("--trace", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--plot")
    p.add_argument("--name")
    p.add_argument("--n-thresholds", type=int, default=200)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, ValueError, OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
