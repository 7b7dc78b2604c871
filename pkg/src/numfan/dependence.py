"""Numerical (in)dependence of a design vector on a model's design vectors.

A candidate term is declared numerically independent of the model when
its least-squares residual exceeds, at some design point, the
first-order bound on how much a tolerance-sized perturbation of the
points could move that residual.  Second-order terms are ignored.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .design import Design, EmpiricalDesign, derivative_matrix, design_matrix
from .linalg import EPS, LeastSquaresResult, QRLeastSquares, exact_least_squares
from .terms import Term

# residual entries below this multiple of n * eps * ||t(D)|| are round-off
RESIDUAL_FLOOR = 10.0


@dataclass(frozen=True)
class DependenceVerdict:
    independent: bool
    residual_norm: float
    bound_vector: np.ndarray
    witness_index: int | None = None
    residual: np.ndarray | None = None
    coefficients: tuple = ()

    @property
    def margin(self) -> float:
        """Smallest gap ``| |rho_i| - bound_i |`` over design points."""
        if self.residual is None:
            return float("inf")
        return float(np.min(np.abs(np.abs(self.residual) - self.bound_vector)))


def _derivative_column(t: Term, design: Design, k: int) -> np.ndarray:
    return derivative_matrix([t], design, k)[:, 0]


def fassino_bounds(terms: Sequence[Term], design: Design, delta: Sequence[float],
                   t: Term, lsq: LeastSquaresResult) -> np.ndarray:
    """Right-hand side of the independence test, one entry per design point.

    ``bound_i = sum_j |P|_ij * sum_k delta_k |d_k t(p_j) - sum_l d_k t_l(p_j) a_l|``
    with ``P = I - M M^+`` and ``a`` the least-squares coefficients of
    ``t`` on the columns ``terms``.
    """
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (design.d,):
        raise ValueError(f"tolerance of length {delta.size}, design has d={design.d}")
    if len(lsq.coefficients) != len(terms):
        raise ValueError("coefficient vector does not match the model terms")
    n = design.n
    c = np.zeros(n)
    for k in range(design.d):
        if delta[k] == 0:
            continue
        dk = _derivative_column(t, design, k)
        if len(terms):
            dk = dk - derivative_matrix(terms, design, k) @ lsq.coefficients
        c += delta[k] * np.abs(dk)
    return np.abs(lsq.projector_complement) @ c


def verdict_from_lsq(lsq: LeastSquaresResult, bound: np.ndarray, b: np.ndarray) -> DependenceVerdict:
    """Apply the strict comparison ``|rho_i| > bound_i`` (ties mean dependent)."""
    rho = lsq.residual
    floor = RESIDUAL_FLOOR * len(b) * EPS * float(np.linalg.norm(b))
    excess = np.abs(rho) - bound
    hits = np.flatnonzero((excess > 0) & (np.abs(rho) > floor))
    witness = int(hits[np.argmax(excess[hits])]) if hits.size else None
    return DependenceVerdict(witness is not None, lsq.residual_norm, bound, witness, rho,
                             tuple(lsq.coefficients))


def is_num_independent(terms: Sequence[Term], design: Design, delta: Sequence,
                       t: Term, exact: bool | None = None) -> DependenceVerdict:
    """Is ``t(D)`` numerically independent of the columns ``X_terms(D)``?

    With zero tolerance on rational data (or ``exact=True``) the question
    is plain linear independence and is answered in exact arithmetic.
    """
    terms = list(terms)
    if exact is None:
        exact = design.exact and all(float(x) == 0 for x in delta)
    if exact:
        if any(float(x) != 0 for x in delta):
            raise ValueError("exact decision only defined for zero tolerance")
        cols = [list(col) for col in zip(*design_matrix(terms, design, exact=True))] if terms else []
        b = [r[0] for r in design_matrix([t], design, exact=True)]
        a, rho = exact_least_squares(cols, b)
        witness = next((i for i, r in enumerate(rho) if r != 0), None)
        rho_f = np.array([float(r) for r in rho])
        return DependenceVerdict(witness is not None, float(np.linalg.norm(rho_f)),
                                 np.zeros(design.n), witness, rho_f, tuple(a))
    M = design_matrix(terms, design)
    b = design_matrix([t], design)[:, 0]
    lsq = QRLeastSquares(M).solve(b)
    bound = fassino_bounds(terms, design, [float(x) for x in delta], t, lsq)
    return verdict_from_lsq(lsq, bound, b)


def empirical_independent(ed: EmpiricalDesign, terms: Sequence[Term], t: Term) -> DependenceVerdict:
    return is_num_independent(terms, ed.design, ed.tolerance, t)
