"""Independent reference computations for the test suite.

These deliberately avoid the package's corner-set and elimination code.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import sympy


def brute_order_ideals(d: int, n: int) -> set[frozenset]:
    """All order ideals with exactly ``n`` terms, by naive closure search."""
    box = list(itertools.product(range(n), repeat=d))

    def closed_candidates(s):
        for t in box:
            if t in s:
                continue
            if all(t[:k] + (t[k] - 1,) + t[k + 1:] in s for k in range(d) if t[k]):
                yield t

    level = {frozenset()}
    for _ in range(n):
        level = {s | {t} for s in level for t in closed_candidates(s)}
    return level


def plane_partition_numbers(n_max: int) -> list[int]:
    """Coefficients of prod_k (1 - x^k)^(-k) (MacMahon)."""
    coeffs = [1] + [0] * n_max
    for k in range(1, n_max + 1):
        for _ in range(k):
            for m in range(k, n_max + 1):
                coeffs[m] += coeffs[m - k]
    return coeffs


def sympy_rank(columns) -> int:
    if not columns:
        return 0
    return sympy.Matrix([[sympy.Rational(str(x)) for x in c] for c in columns]).T.rank()


def monomial_value(t, p):
    v = Fraction(1)
    for a, c in zip(t, p):
        v *= Fraction(c) ** a
    return v


def brute_statistical_fan(points) -> set[frozenset]:
    """All size-n staircases whose design matrix has full rank (sympy rank)."""
    n, d = len(points), len(points[0])
    out = set()
    for oi in brute_order_ideals(d, n):
        cols = [[monomial_value(t, p) for p in points] for t in sorted(oi)]
        if sympy_rank(cols) == n:
            out.add(oi)
    return out
