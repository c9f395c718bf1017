"""File formats: series/trace/label CSVs, key=value configs, estimate files.

Floats are written with 17 significant digits so a write/read round trip is
exact.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .embedding import EmbeddingPlan, measure_gram
from .exceptions import InputError
from .kernels import KernelSpec
from .krylov import Method, OperatorEstimate, WeightScheme
from .predictor import AbnormalityTrace

ESTIMATE_VERSION = 1


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` / ``a-bi`` / ``a`` / ``bi`` (``j`` also accepted)."""
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise InputError(f"cannot parse complex number {text!r}; use the form a+bi") from None


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "-" if np.signbit(z.imag) else "+"
    return f"{fmt(z.real)}{sign}{fmt(abs(z.imag))}i"


# -- series and traces -------------------------------------------------------


def write_series_csv(path, values, header=("value",)) -> None:
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in values:
            w.writerow([fmt(v) for v in row])


def read_series_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and a 2-D float array (one column per state dimension)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputError(f"{path}: empty file")
    header, body = rows[0], [r for r in rows[1:] if r]
    try:
        data = np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))
    except ValueError as err:
        raise InputError(f"{path}: malformed numeric data ({err})") from None
    if not np.all(np.isfinite(data)):
        raise InputError(f"{path}: non-finite values")
    return header, data


def write_trace_csv(path, trace: AbnormalityTrace) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "score", "denominator", "flag"])
        for t, s, d, f in zip(trace.t_indices, trace.scores, trace.denominators, trace.flags):
            w.writerow([int(t), fmt(s), fmt(d), f])


def read_trace_csv(path) -> AbnormalityTrace:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    t = np.array([int(r["t"]) for r in rows], dtype=int)
    scores = np.array([float(r["score"]) for r in rows])
    den = np.array([float(r["denominator"]) for r in rows])
    deg = np.array([r["flag"] == "degenerate" for r in rows], dtype=bool)
    return AbnormalityTrace(t, scores, den, deg)


def read_labels_csv(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    out = np.array([[int(r["start"]), int(r["end"])] for r in rows], dtype=int).reshape(-1, 2)
    if len(out) == 0:
        raise InputError(f"{path}: no anomalous intervals")
    if np.any(out[:, 1] < out[:, 0]):
        raise InputError(f"{path}: interval with end < start")
    return out


def write_labels_csv(path, intervals) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["start", "end"])
        for lo, hi in intervals:
            w.writerow([int(lo), int(hi)])


# -- key=value configs ---------------------------------------------------------


def read_config(path) -> dict[str, str]:
    out = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


# -- estimate files ------------------------------------------------------------


def _write_matrix(lines: list[str], name: str, M: np.ndarray) -> None:
    lines.append(f"{name} {M.shape[0]} {M.shape[1]}")
    for row in np.asarray(M, dtype=complex):
        lines.append(" ".join(f"{fmt(z.real)},{fmt(z.imag)}" for z in row))


def save_estimate(path, est: OperatorEstimate, *, header: dict, embed_data: bool = False) -> None:
    """Write a self-describing text estimate.

    ``header`` carries the provenance needed to rebuild the training states
    when they are not embedded: ``source`` (CSV path), ``delay`` and
    ``train_start`` (index of the first training state).
    """
    spec = est.gram.spec
    lines = [
        f"pfkrylov-estimate {ESTIMATE_VERSION}",
        f"method {est.method.value}",
        f"gamma {format_complex(est.gamma) if est.gamma is not None else 'none'}",
        f"S {est.S}",
        f"N {est.N}",
        f"normalize {'true' if est.gram.plan.normalize else 'false'}",
        f"kernel {spec.family.value}",
        f"bandwidth {fmt(spec.bandwidth)}",
        f"condition {fmt(est.condition) if est.condition is not None else 'none'}",
        f"dim {est.gram.points.shape[1]}",
    ]
    for key in ("source", "delay", "train_start"):
        lines.append(f"{key} {header.get(key, 'none')}")
    _write_matrix(lines, "R", est.R)
    _write_matrix(lines, "Ktilde", est.Ktilde)
    if est.Ltilde is not None:
        _write_matrix(lines, "Ltilde", est.Ltilde)
    if embed_data:
        P = est.gram.points
        lines.append(f"points {P.shape[0]} {P.shape[1]}")
        lines.extend(" ".join(fmt(v) for v in row) for row in P)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_matrix(lines, i):
    _, r, c = lines[i].split()
    r, c = int(r), int(c)
    M = np.empty((r, c), dtype=complex)
    for k in range(r):
        for j, pair in enumerate(lines[i + 1 + k].split()):
            re_, im_ = pair.split(",")
            M[k, j] = complex(float(re_), float(im_))
    return M, i + 1 + r


def load_estimate(path, points_loader=None) -> tuple[OperatorEstimate, dict]:
    """Read an estimate file.

    Without inlined points, ``points_loader(header)`` must return the
    training states; the default reads ``source`` (relative paths are tried
    against the estimate's directory too) and delay-embeds it.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("pfkrylov-estimate"):
        raise InputError(f"{path}: not an estimate file")
    version = int(lines[0].split()[1])
    if version != ESTIMATE_VERSION:
        raise InputError(f"{path}: unsupported estimate version {version}")
    header: dict = {}
    mats: dict = {}
    points = None
    i = 1
    while i < len(lines):
        key, _, rest = lines[i].partition(" ")
        if key in ("R", "Ktilde", "Ltilde"):
            mats[key], i = _read_matrix(lines, i)
            continue
        if key == "points":
            r, _c = (int(v) for v in rest.split())
            points = np.array([[float(v) for v in lines[i + 1 + k].split()] for k in range(r)])
            i += 1 + r
            continue
        header[key] = rest
        i += 1

    method = Method(header["method"])
    S, N = int(header["S"]), int(header["N"])
    plan = EmbeddingPlan(S, N, header["normalize"] == "true")
    spec = KernelSpec(header["kernel"], float(header["bandwidth"]))
    if points is None:
        points = (points_loader or _default_points_loader)(header, path)
    points = np.asarray(points, dtype=float)[: plan.min_length]
    if points.shape[1] != int(header["dim"]):
        raise InputError(f"{path}: training states have dimension {points.shape[1]}, expected {header['dim']}")
    mg = measure_gram(points, plan, spec)
    gamma = None if header["gamma"] == "none" else parse_complex(header["gamma"])
    if method is Method.ARNOLDI:
        coeffs = np.eye(S + 1, S)
        R, K = mats["R"].real.copy(), mats["Ktilde"].real.copy()
    else:
        coeffs = WeightScheme(gamma, S).matrix()[:, 1:]
        R, K = mats["R"], mats["Ktilde"]
    cond = None if header["condition"] == "none" else float(header["condition"])
    est = OperatorEstimate(method, R=R, Ktilde=K, basis_coeffs=coeffs, gram=mg, gamma=gamma,
                           Ltilde=mats.get("Ltilde"), condition=cond)
    return est, header


def _default_points_loader(header: dict, est_path: Path) -> np.ndarray:
    from .systems import delay_embed

    src = header.get("source", "none")
    if src == "none":
        raise InputError(f"{est_path}: no inline points and no source path")
    candidates = [Path(src), est_path.parent / src]
    found = next((p for p in candidates if p.exists()), None)
    if found is None:
        raise InputError(f"{est_path}: training source {src} not found")
    _, data = read_series_csv(found)
    delay = int(header.get("delay", "1"))
    states = delay_embed(data[:, 0], delay) if delay > 1 else data
    start = int(header.get("train_start", "0"))
    return states[start:]
