import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from numfan.dependence import fassino_bounds, is_num_independent
from numfan.design import Design, design_matrix
from numfan.linalg import EliminationState, least_squares
from numfan.terms import OrderIdeal

FASSINO = Design([(1, 6), (2, 3), ("2.449", "2.449"), (3, 2), (6, 1)])
NEAR_FACTORIAL = Design([(1, 1), (1, "-1.001"), (-1, 1), (-1, -1)])
LINEAR = [(0, 0), (1, 0), (0, 1)]


def sympy_bounds(terms, points, delta, t):
    """Bound vector straight from the definition, in exact arithmetic."""
    xs = sympy.symbols(f"x1:{len(points[0]) + 1}")
    mono = lambda e: sympy.Mul(*[x ** a for x, a in zip(xs, e)])
    at = lambda f, p: f.subs(dict(zip(xs, [sympy.Rational(str(c)) for c in p])))
    n = len(points)
    M = sympy.Matrix([[at(mono(s), p) for s in terms] for p in points]) if terms else sympy.zeros(n, 0)
    b = sympy.Matrix([at(mono(t), p) for p in points])
    if terms:
        pinv = (M.T * M).inv() * M.T
        a = pinv * b
        P = sympy.eye(n) - M * pinv
    else:
        a = sympy.zeros(0, 1)
        P = sympy.eye(n)
    c = []
    for p in points:
        total = 0
        for k, x in enumerate(xs):
            val = at(sympy.diff(mono(t), x), p) - sum(at(sympy.diff(mono(s), x), p) * a[l] for l, s in enumerate(terms))
            total += sympy.Rational(str(delta[k])) * abs(val)
        c.append(total)
    return np.array([float(sum(abs(P[i, j]) * c[j] for j in range(n))) for i in range(n)])


def bounds(terms, design, delta, t):
    lsq = least_squares(design_matrix(terms, design), design_matrix([t], design)[:, 0])
    return fassino_bounds(terms, design, delta, t, lsq)


def test_zero_tolerance_gives_zero_bounds():
    np.testing.assert_array_equal(bounds(LINEAR, FASSINO, [0, 0], (1, 1)), np.zeros(5))


def test_constant_candidate_on_empty_model_has_zero_bounds():
    np.testing.assert_array_equal(bounds([], FASSINO, [0.018, 0.018], (0, 0)), np.zeros(5))


@pytest.mark.parametrize("terms,t", [
    ([(0, 0)], (0, 1)),
    (LINEAR, (1, 1)),
    (LINEAR + [(2, 0)], (0, 2)),
    ([], (1, 0)),
])
def test_bounds_match_definition(terms, t):
    delta = [0.018, 0.018]
    expected = sympy_bounds(terms, FASSINO.points, delta, t)
    np.testing.assert_allclose(bounds(terms, FASSINO, delta, t), expected, rtol=1e-9, atol=1e-12)


def test_bounds_match_definition_with_unequal_tolerances():
    D = Design([(0, 1, 2), (1, "0.5", 0), (2, 2, 1), ("-1", 0, "1.5"), ("0.3", 1, 1)])
    terms = [(0, 0, 0), (1, 0, 0), (0, 0, 1)]
    delta = [0.01, 0.05, 0.002]
    expected = sympy_bounds(terms, D.points, delta, (1, 1, 0))
    np.testing.assert_allclose(bounds(terms, D, delta, (1, 1, 0)), expected, rtol=1e-9, atol=1e-12)


def test_near_factorial_square_is_dependent_above_threshold():
    v = is_num_independent(LINEAR, NEAR_FACTORIAL, [0, "0.0005"], (0, 2))
    assert not v.independent and v.witness_index is None


def test_near_factorial_square_is_independent_without_tolerance():
    v = is_num_independent(LINEAR, NEAR_FACTORIAL, [0, 0], (0, 2))
    assert v.independent and v.witness_index is not None


def test_vanishing_candidate_is_dependent():
    D = Design([(0, 1), (0, 2), (0, 3)])
    for delta in ([0, 0], [0.1, 0.1], [1, 0]):
        assert not is_num_independent([(0, 0)], D, delta, (1, 0)).independent
        assert not is_num_independent([(0, 0)], D, delta, (1, 0), exact=False).independent


def test_verdict_witness_invariant():
    for delta in ([0, 0], [0.001, 0.001], [0.1, 0.1]):
        v = is_num_independent(LINEAR, FASSINO, delta, (2, 0))
        assert v.independent == (v.witness_index is not None)
        if v.independent:
            assert abs(v.residual[v.witness_index]) > v.bound_vector[v.witness_index]


@st.composite
def dependence_cases(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 8))
    d = int(rng.integers(1, 4))
    design = Design(rng.uniform(-2, 2, size=(n, d)), exact=False)
    oi = OrderIdeal.empty(d)
    py = random.Random(seed)
    for _ in range(py.randint(0, n - 1)):
        t = py.choice(sorted(oi.corners))
        if not is_num_independent(list(oi.members), design, [0] * d, t).independent:
            break
        oi = oi.add(t)
    t = py.choice(sorted(oi.corners))
    delta = rng.uniform(0, 0.05, size=d)
    return design, sorted(oi.members), t, delta, draw(st.floats(0.0, 1.0, exclude_min=True))


@given(dependence_cases())
def test_independence_is_monotone_in_tolerance(case):
    design, terms, t, delta, k = case
    if is_num_independent(terms, design, delta, t).independent:
        assert is_num_independent(terms, design, k * delta, t).independent


@pytest.mark.parametrize("seed", range(25))
def test_exact_verdict_agrees_with_exact_elimination(seed):
    rng = random.Random(seed)
    n, d = rng.randint(3, 6), rng.randint(1, 3)
    pts = [[Fraction(rng.randint(-2, 2)) for _ in range(d)] for _ in range(n)]
    D = Design(pts)
    state = EliminationState()
    terms = []
    oi = OrderIdeal.empty(d)
    for _ in range(2 * n):
        corners = sorted(oi.corners)
        t = rng.choice(corners)
        v = is_num_independent(terms, D, [0] * d, t)
        cert, new_state = state.extend([r[0] for r in design_matrix([t], D, exact=True)])
        assert v.independent == cert.independent
        if cert.independent:
            state, terms, oi = new_state, terms + [t], oi.add(t)
