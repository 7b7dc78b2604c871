import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from numfan.linalg import (EliminationState, RankDeficientError, condition_number, exact_least_squares,
                           exact_rank, exact_rank_extend, least_squares)
from tests.oracles import sympy_rank

NEAR_FACTORIAL_O1 = np.array([[1, 1, 1, 1], [1, 1, -1.001, -1.001], [1, -1, 1, -1], [1, -1, -1, 1]])
NEAR_FACTORIAL_O2 = np.array([[1, 1, 1, 1], [1, 1, -1.001, 1.002001], [1, -1, 1, 1], [1, -1, -1, 1]])


def test_empty_model():
    res = least_squares(np.zeros((4, 0)), np.ones(4))
    assert res.coefficients.size == 0
    np.testing.assert_array_equal(res.residual, np.ones(4))
    np.testing.assert_array_equal(res.projector_complement, np.eye(4))


def test_constant_model_is_the_mean():
    b = np.array([1, 1.002001, 1, 1])
    res = least_squares(np.ones((4, 1)), b)
    assert res.coefficients[0] == pytest.approx(1.00050025, rel=1e-14)
    np.testing.assert_allclose(res.residual, b - 1.00050025, atol=1e-15)


def test_exact_fit_has_zero_residual():
    M = np.array([[1.0, 2], [3, 4], [5, 7]])
    b = M @ np.array([0.5, -2])
    assert np.linalg.norm(least_squares(M, b).residual) < 1e-12


def test_rank_deficient_is_a_contract_violation():
    M = np.array([[1.0, 2], [2, 4], [3, 6]])
    with pytest.raises(RankDeficientError):
        least_squares(M, np.ones(3))


@st.composite
def full_rank_problems(draw):
    n = draw(st.integers(1, 8))
    k = draw(st.integers(0, n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, k)), rng.normal(size=n) * 10


@given(full_rank_problems())
def test_least_squares_invariants(problem):
    M, b = problem
    res = least_squares(M, b)
    nb = np.linalg.norm(b)
    np.testing.assert_allclose(M @ res.coefficients + res.residual, b, atol=1e-10 * nb)
    np.testing.assert_allclose(res.projector_complement @ b, res.residual, atol=1e-10 * nb)
    P = res.projector_complement
    np.testing.assert_allclose(P, P.T, atol=1e-10)
    np.testing.assert_allclose(P @ P, P, atol=1e-10)
    if M.shape[1]:
        assert np.all(np.abs(M.T @ res.residual) <= 1e-8 * np.linalg.norm(M) * nb + 1e-300)


def test_condition_numbers_of_near_factorial_models():
    assert condition_number(NEAR_FACTORIAL_O1) == pytest.approx(1.0007, rel=5e-3)
    assert condition_number(NEAR_FACTORIAL_O2) == pytest.approx(4001, rel=5e-3)
    assert condition_number(np.eye(5)) == pytest.approx(1.0)


def test_condition_number_rank_deficient_is_infinite():
    assert condition_number(np.array([[1.0, 2], [2, 4]])) == float("inf")


def test_condition_number_of_empty_matrix():
    with pytest.raises(ValueError):
        condition_number(np.zeros((3, 0)))


@given(full_rank_problems(), st.floats(1e-3, 1e3))
def test_condition_number_invariances(problem, scale):
    M, _ = problem
    if M.shape[1] == 0:
        return
    c = condition_number(M)
    perm = np.random.default_rng(0).permutation(M.shape[1])
    assert condition_number(M[:, perm]) == pytest.approx(c, rel=1e-9)
    assert condition_number(scale * M) == pytest.approx(c, rel=1e-9)


# -- exact rank ------------------------------------------------------------

def test_zero_vector_is_dependent():
    cert, _ = exact_rank_extend(EliminationState(), [0, 0, 0])
    assert not cert.independent and cert.rank == 0


def test_repeated_column_is_dependent():
    v = [Fraction(1, 3), 2, -5]
    cert, state = exact_rank_extend(EliminationState(), v)
    assert cert.independent and cert.rank == 1
    cert, _ = exact_rank_extend(state, v)
    assert not cert.independent and cert.rank == 1


def random_rational_matrix(rng, n, k, low_rank=False):
    if low_rank:
        r = rng.randint(1, max(1, min(n, k) - 1))
        A = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(r)] for _ in range(n)]
        B = [[Fraction(rng.randint(-3, 3), rng.randint(1, 4)) for _ in range(k)] for _ in range(r)]
        return [[sum(A[i][s] * B[s][j] for s in range(r)) for j in range(k)] for i in range(n)]
    return [[Fraction(rng.randint(-3, 3), rng.randint(1, 5)) for _ in range(k)] for _ in range(n)]


def minor_rank(rows):
    """Largest r with a nonzero r x r minor (brute force)."""
    n, k = len(rows), len(rows[0])
    for r in range(min(n, k), 0, -1):
        for I in itertools.combinations(range(n), r):
            for J in itertools.combinations(range(k), r):
                if sympy.Matrix([[rows[i][j] for j in J] for i in I]).det() != 0:
                    return r
    return 0


@pytest.mark.parametrize("seed", range(12))
def test_exact_rank_matches_minors(seed):
    rng = random.Random(seed)
    rows = random_rational_matrix(rng, 6, 6, low_rank=seed % 2 == 0)
    columns = [list(c) for c in zip(*rows)]
    assert exact_rank(columns) == minor_rank(rows) if seed < 4 else exact_rank(columns) == sympy_rank(columns)


@pytest.mark.parametrize("seed", range(10))
def test_exact_rank_is_order_free(seed):
    rng = random.Random(100 + seed)
    rows = random_rational_matrix(rng, 5, 7, low_rank=True)
    columns = [list(c) for c in zip(*rows)]
    r = exact_rank(columns)
    for _ in range(5):
        rng.shuffle(columns)
        assert exact_rank(columns) == r


def test_exact_least_squares():
    cols = [[1, 1, 1, 1], [1, 1, -1, -1]]
    b = [Fraction(1), Fraction("1.002001"), 1, 1]
    a, rho = exact_least_squares(cols, b)
    # residual orthogonal to the columns, exactly
    assert all(sum(c[i] * rho[i] for i in range(4)) == 0 for c in cols)
    assert [b[i] - a[0] * cols[0][i] - a[1] * cols[1][i] for i in range(4)] == rho
