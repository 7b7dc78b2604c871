"""Small dense kernels: least squares, condition numbers, exact rank."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

EPS = np.finfo(float).eps


class RankDeficientError(np.linalg.LinAlgError):
    """A design matrix expected to have full column rank does not."""


@dataclass(frozen=True)
class LeastSquaresResult:
    coefficients: np.ndarray
    residual: np.ndarray
    projector_complement: np.ndarray

    @property
    def residual_norm(self) -> float:
        return float(np.linalg.norm(self.residual))


class QRLeastSquares:
    """Householder QR of ``M`` reused across many right-hand sides.

    ``numpy.linalg.qr`` calls LAPACK ``geqrf`` (Householder reflections).
    """

    def __init__(self, M: np.ndarray):
        M = np.asarray(M, dtype=float)
        if M.ndim != 2:
            raise ValueError("matrix expected")
        n, k = M.shape
        self.shape = (n, k)
        if k == 0:
            self.Q = np.zeros((n, 0))
            self.R = np.zeros((0, 0))
            self.projector_complement = np.eye(n)
            return
        if k > n:
            raise RankDeficientError(f"{k} columns but only {n} rows")
        Q, R = np.linalg.qr(M, mode="reduced")
        # column-relative test, consistent with the residual floor used by
        # the independence check
        diag = np.abs(np.diag(R))
        if np.any(diag <= n * EPS * np.linalg.norm(M, axis=0)):
            raise RankDeficientError("design matrix is numerically rank deficient")
        self.Q, self.R = Q, R
        self.projector_complement = np.eye(n) - Q @ Q.T

    def solve(self, b: np.ndarray) -> LeastSquaresResult:
        b = np.asarray(b, dtype=float)
        if b.shape != (self.shape[0],):
            raise ValueError(f"right-hand side of shape {b.shape}, expected ({self.shape[0]},)")
        if self.shape[1] == 0:
            return LeastSquaresResult(np.zeros(0), b.copy(), self.projector_complement)
        qtb = self.Q.T @ b
        a = solve_triangular(self.R, qtb)
        # b - Q Q^T b is the backward-stable form of the residual
        rho = b - self.Q @ qtb
        return LeastSquaresResult(a, rho, self.projector_complement)


def least_squares(M: np.ndarray, b: np.ndarray) -> LeastSquaresResult:
    """Minimize ``||M a - b||_2`` for full-column-rank ``M`` (``k = 0`` allowed)."""
    return QRLeastSquares(M).solve(b)


def condition_number(M: np.ndarray) -> float:
    """2-norm condition number ``sigma_max / sigma_min``; ``inf`` if rank deficient."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.size == 0:
        raise ValueError("condition number of an empty matrix")
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        raise ValueError("condition number of a zero matrix")
    if M.shape[1] > M.shape[0] or s[-1] < max(M.shape) * EPS * s[0]:
        return float("inf")
    return float(s[0] / s[-1])


# -- exact arithmetic ------------------------------------------------------


@dataclass(frozen=True)
class RankCertificate:
    rank: int
    independent: bool


def _primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Integer vector proportional to ``v`` with content 1."""
    den = lcm(*(Fraction(x).denominator for x in v)) if v else 1
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


@dataclass(frozen=True)
class EliminationState:
    """Echelon basis of the accepted columns, kept over the integers.

    Each accepted column is reduced against the earlier ones with
    fraction-free (cross-multiplied) row operations and divided by its
    content, so entries stay small integers.  Immutable: ``extend``
    returns a new state, which makes branching enumerations cheap.
    """

    rows: tuple[tuple[int, ...], ...] = ()
    pivots: tuple[int, ...] = ()

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: Sequence) -> tuple[int, ...]:
        w = list(_primitive(v))
        for row, p in zip(self.rows, self.pivots):
            c = w[p]
            if c:
                r = row[p]
                w = [r * x - c * y for x, y in zip(w, row)]
                g = 0
                for x in w:
                    g = gcd(g, x)
                if g > 1:
                    w = [x // g for x in w]
        return tuple(w)

    def extend(self, v: Sequence) -> tuple[RankCertificate, "EliminationState"]:
        w = self.reduce(v)
        for p, x in enumerate(w):
            if x:
                state = EliminationState(self.rows + (w,), self.pivots + (p,))
                return RankCertificate(state.rank, True), state
        return RankCertificate(self.rank, False), self


def exact_rank_extend(state: EliminationState, v: Sequence) -> tuple[RankCertificate, EliminationState]:
    """Decide exactly whether ``v`` leaves the span of the columns in ``state``."""
    return state.extend(v)


def exact_rank(columns: Sequence[Sequence]) -> int:
    state = EliminationState()
    for c in columns:
        _, state = state.extend(c)
    return state.rank


def exact_least_squares(columns: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
                        ) -> tuple[list[Fraction], list[Fraction]]:
    """Exact coefficients and residual via the normal equations.

    ``columns`` must be linearly independent.  Returns ``(a, rho)``.
    """
    n = len(b)
    k = len(columns)
    b = [Fraction(x) for x in b]
    if k == 0:
        return [], b
    cols = [[Fraction(x) for x in c] for c in columns]
    # augmented Gram system [C^T C | C^T b]
    A = [[sum(ci[r] * cj[r] for r in range(n)) for cj in cols]
         + [sum(ci[r] * b[r] for r in range(n))] for ci in cols]
    for i in range(k):
        piv = next((r for r in range(i, k) if A[r][i] != 0), None)
        if piv is None:
            raise RankDeficientError("columns are linearly dependent")
        A[i], A[piv] = A[piv], A[i]
        inv = 1 / A[i][i]
        A[i] = [x * inv for x in A[i]]
        for r in range(k):
            if r != i and A[r][i] != 0:
                f = A[r][i]
                A[r] = [x - f * y for x, y in zip(A[r], A[i])]
    a = [A[i][k] for i in range(k)]
    rho = [b[r] - sum(a[j] * cols[j][r] for j in range(k)) for r in range(n)]
    return a, rho
