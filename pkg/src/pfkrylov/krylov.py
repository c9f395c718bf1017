"""Krylov projections of the transfer operator computed from Gram values only.

Both estimators orthonormalise a set of RKHS vectors that are themselves
linear combinations of the measure embeddings ``Phi(mu_0..mu_S)``. A basis is
therefore described by a coefficient matrix ``C`` (column ``j`` holds the
coefficients of the ``j``-th vector over the embeddings) and all geometry is
derived from ``C^H G C``.

Inner products are linear in the first argument and conjugate-linear in the
second. A "basis Gram" ``B`` for vectors ``psi_0..psi_{m-1}`` uses the matrix
convention ``B[a, b] = <psi_b, psi_a>``, so that ``Psi = Q R`` gives
``R^H R = B``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import comb

import numpy as np
import scipy.linalg as sla

from .embedding import MeasureGram
from .exceptions import BreakdownError, IllConditionedShiftError, InputError

EPS_QR = 1e-10
MAX_LTILDE_COND = 1e12


class Method(str, Enum):
    ARNOLDI = "arnoldi"
    SHIFT_INVERT = "sia"


@dataclass(frozen=True)
class WeightScheme:
    """Binomial weights of the shift-invert basis vectors.

    ``w_j = sum_t C(j, t) (-1)^t gamma^(j - t) Phi(mu_t)``; ``coeffs[j]`` is
    the length ``j + 1`` coefficient vector of ``w_j``. Built with the Pascal
    recursion ``c[j+1][t] = gamma c[j][t] - c[j][t-1]``.
    """

    gamma: complex
    S: int
    coeffs: tuple = field(init=False, repr=False)

    def __post_init__(self):
        gamma = complex(self.gamma)
        if gamma == 0 or not np.isfinite(gamma):
            raise InputError(f"shift gamma must be finite and nonzero, got {self.gamma}")
        object.__setattr__(self, "gamma", gamma)
        rows = [np.array([1.0 + 0j])]
        for _ in range(self.S):
            prev = rows[-1]
            nxt = np.zeros(len(prev) + 1, dtype=complex)
            nxt[:-1] += gamma * prev
            nxt[1:] -= prev
            rows.append(nxt)
        object.__setattr__(self, "coeffs", tuple(rows))

    def matrix(self) -> np.ndarray:
        """``(S+1) x (S+1)`` matrix whose column ``j`` is ``coeffs[j]`` zero-padded."""
        C = np.zeros((self.S + 1, self.S + 1), dtype=complex)
        for j, c in enumerate(self.coeffs):
            C[: j + 1, j] = c
        return C


def binomial_weights(gamma: complex, j: int) -> list[complex]:
    """Closed-form coefficients of ``w_j``; reference for the recursion."""
    gamma = complex(gamma)
    return [comb(j, t) * (-1) ** t * gamma ** (j - t) for t in range(j + 1)]


def basis_gram(G: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Basis Gram ``C^H G C`` of the vectors ``Phi @ C``."""
    G = np.asarray(G)
    return C.conj().T @ G @ C


def weight_gram(G, scheme: WeightScheme) -> np.ndarray:
    """Pairwise inner products of ``w_0..w_S``: entry ``[a, b] = <w_b, w_a>``."""
    G = G.G if isinstance(G, MeasureGram) else np.asarray(G)
    if G.shape != (scheme.S + 1, scheme.S + 1):
        raise InputError(f"measure Gram has shape {G.shape}, expected {(scheme.S + 1,) * 2}")
    return basis_gram(G, scheme.matrix())


def qr_from_gram(
    B: np.ndarray,
    n_rows: int | None = None,
    *,
    variant: str = "cholesky",
    reorthogonalize: bool = False,
    eps: float = EPS_QR,
) -> np.ndarray:
    """R factor of ``Psi = Q R`` given only the basis Gram ``B``.

    The first ``n_rows`` columns are orthonormalised; the remaining columns
    are expanded in that basis (their coordinates land in ``R[:, n_rows:]``).
    ``variant="cholesky"`` uses the Gram recurrences
    ``r_it = (B_it - sum_j conj(r_ji) r_jt) / r_ii``; ``variant="mgs"`` runs
    modified Gram-Schmidt on coefficient vectors with inner products through
    ``B``, optionally with one re-orthogonalisation sweep.

    Raises:
        BreakdownError: a squared residual norm falls to ``eps * B[t, t]`` or
            below at column ``t``.
    """
    B = np.asarray(B)
    m = B.shape[0]
    if B.ndim != 2 or B.shape[1] != m:
        raise InputError(f"basis Gram must be square, got shape {B.shape}")
    n = m if n_rows is None else int(n_rows)
    if not 0 < n <= m:
        raise InputError(f"n_rows must lie in [1, {m}], got {n_rows}")
    dtype = np.result_type(B.dtype, float)
    R = np.zeros((n, m), dtype=dtype)
    if variant == "cholesky":
        for t in range(m):
            for i in range(min(t, n)):
                R[i, t] = (B[i, t] - R[:i, i].conj() @ R[:i, t]) / R[i, i]
            if t < n:
                resid = float(np.real(B[t, t])) - float(np.sum(np.abs(R[:t, t]) ** 2))
                R[t, t] = _diag_or_raise(t, resid, float(np.real(B[t, t])), eps)
    elif variant == "mgs":
        Qc = np.zeros((m, n), dtype=dtype)
        for t in range(m):
            a = np.zeros(m, dtype=dtype)
            a[t] = 1.0
            for _ in range(2 if reorthogonalize else 1):
                for i in range(min(t, n)):
                    r = Qc[:, i].conj() @ B @ a
                    R[i, t] += r
                    a = a - r * Qc[:, i]
            if t < n:
                resid = float(np.real(a.conj() @ B @ a))
                R[t, t] = _diag_or_raise(t, resid, float(np.real(B[t, t])), eps)
                Qc[:, t] = a / R[t, t]
    else:
        raise InputError(f"unknown QR variant {variant!r}")
    return R


def _diag_or_raise(t: int, resid: float, scale: float, eps: float) -> float:
    # negative residuals are rounding artefacts of a PSD Gram; never clamp to zero
    threshold = eps * scale
    if not resid > threshold:
        raise BreakdownError(t, resid, threshold)
    return np.sqrt(resid)


@dataclass(frozen=True)
class OperatorEstimate:
    """Projected operator plus what is needed to apply ``Q^*`` to new points.

    ``basis_coeffs`` is ``(S+1) x S``: column ``j`` expresses the ``j``-th
    un-orthonormalised basis vector over ``Phi(mu_0..mu_S)``, so that
    ``q_j = sum_i psi_i (R^{-1})[i, j]``.
    """

    method: Method
    R: np.ndarray
    Ktilde: np.ndarray
    basis_coeffs: np.ndarray
    gram: MeasureGram = field(repr=False)
    gamma: complex | None = None
    Ltilde: np.ndarray | None = None
    condition: float | None = None

    @property
    def S(self) -> int:
        return self.gram.plan.S

    @property
    def N(self) -> int:
        return self.gram.plan.N

    @property
    def basis_gram(self) -> np.ndarray:
        return basis_gram(self.gram.G, self.basis_coeffs)


def _right_solve_upper(A: np.ndarray, R: np.ndarray) -> np.ndarray:
    """``A @ inv(R)`` for upper-triangular ``R``."""
    return sla.solve_triangular(R, A.T, trans="T", lower=False).T


def _check_gram(mg: MeasureGram) -> np.ndarray:
    G = np.asarray(mg.G)
    S = mg.plan.S
    if G.shape != (S + 1, S + 1):
        raise InputError(f"measure Gram has shape {G.shape}, expected {(S + 1, S + 1)}")
    return G


def arnoldi_estimate(mg: MeasureGram, **qr_options) -> OperatorEstimate:
    """Project the operator onto ``span{Phi(mu_0..mu_{S-1})}``.

    Gram-Schmidt runs over all ``S + 1`` embeddings with ``S`` rows, giving
    ``R`` and the coordinates of ``Phi(mu_1..mu_S)`` in one pass; then
    ``Ktilde = R[:, 1:] R^{-1}``.
    """
    G = _check_gram(mg)
    S = mg.plan.S
    R_ext = qr_from_gram(G, n_rows=S, **qr_options)
    R = R_ext[:, :S]
    K = _right_solve_upper(R_ext[:, 1:], R)
    C = np.eye(S + 1, S)
    return OperatorEstimate(Method.ARNOLDI, R=R, Ktilde=K, basis_coeffs=C, gram=mg)


def shift_invert_estimate(mg: MeasureGram, gamma: complex, **qr_options) -> OperatorEstimate:
    """Project the resolvent ``(gamma I - K)^{-1}`` onto ``span{w_1..w_S}``.

    The resolvent maps ``w_{j+1}`` to ``w_j``, so in the q-basis
    ``Ltilde = [Q^* w_0, R[:, :S-1]] R^{-1}``; ``Q^* w_0`` comes from
    expanding ``w_0`` as an extra trailing column. The operator estimate is
    ``gamma I - Ltilde^{-1}``.

    Raises:
        BreakdownError: ``w_1..w_S`` numerically dependent.
        IllConditionedShiftError: ``Ltilde`` condition number above 1e12.
    """
    G = _check_gram(mg)
    S = mg.plan.S
    scheme = WeightScheme(gamma, S)
    gamma = scheme.gamma
    W = scheme.matrix()
    C_ext = np.concatenate([W[:, 1:], W[:, :1]], axis=1)
    R_ext = qr_from_gram(basis_gram(G, C_ext), n_rows=S, **qr_options)
    R = R_ext[:, :S]
    QPsi1 = np.concatenate([R_ext[:, S:], R[:, : S - 1]], axis=1)
    L = _right_solve_upper(QPsi1, R)
    cond = float(np.linalg.cond(L))
    if not np.isfinite(cond) or cond > MAX_LTILDE_COND:
        raise IllConditionedShiftError(cond, gamma)
    lu = sla.lu_factor(L)
    Linv = sla.lu_solve(lu, np.eye(S, dtype=L.dtype))
    K = gamma * np.eye(S) - Linv
    return OperatorEstimate(
        Method.SHIFT_INVERT,
        R=R,
        Ktilde=K,
        basis_coeffs=W[:, 1:],
        gram=mg,
        gamma=gamma,
        Ltilde=L,
        condition=cond,
    )


def estimate(mg: MeasureGram, method: Method | str = Method.SHIFT_INVERT, gamma=None, **qr_options):
    """Dispatch to :func:`arnoldi_estimate` or :func:`shift_invert_estimate`."""
    method = Method(method)
    if method is Method.ARNOLDI:
        return arnoldi_estimate(mg, **qr_options)
    if gamma is None:
        raise InputError("the shift-invert method needs a shift gamma")
    return shift_invert_estimate(mg, gamma, **qr_options)
