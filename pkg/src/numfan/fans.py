"""Enumeration of identifiable and numerically stable hierarchical models.

Every search here grows order ideals one corner at a time, starting from
the empty ideal whose only corner is ``1``.  A corner is accepted when its
design vector is (numerically) independent of the current model's design
vectors.  The full enumerations share one explicit-stack walk with a
visited set of exact corner-set keys, so each stable ideal is expanded
once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .dependence import fassino_bounds, is_num_independent, verdict_from_lsq
from .design import Design, EmpiricalDesign, design_matrix, eval_term
from .linalg import EliminationState, QRLeastSquares, condition_number
from .terms import (BudgetExceeded, OrderIdeal, Term, TermOrder, all_term_orders,
                    default_budget, format_term, multiply_var)


class DuplicatePointsError(ValueError):
    pass


# -- fans ------------------------------------------------------------------


@dataclass(frozen=True)
class FanModel:
    ideal: OrderIdeal
    condition_number: float | None = None

    @property
    def size(self) -> int:
        return len(self.ideal)

    @property
    def maximal_elements(self) -> list[Term]:
        return TermOrder().sorted(self.ideal.maximal_elements())

    def label(self) -> str:
        return "{" + ", ".join(format_term(t) for t in self.maximal_elements) + "}"


@dataclass(frozen=True)
class Fan:
    """Models sorted by ``(size, canonical key)``."""

    models: tuple[FanModel, ...] = ()

    @classmethod
    def build(cls, ideals: Iterable[OrderIdeal], design: Design | None = None) -> "Fan":
        unique = {oi.key(): oi for oi in ideals}
        ordered = sorted(unique.values(), key=lambda oi: (len(oi), oi.key()))
        if design is None:
            return cls(tuple(FanModel(oi) for oi in ordered))
        return cls(tuple(FanModel(oi, model_condition_number(oi, design)) for oi in ordered))

    def __len__(self):
        return len(self.models)

    def __iter__(self):
        return iter(self.models)

    @property
    def ideals(self) -> list[OrderIdeal]:
        return [m.ideal for m in self.models]

    def encoded(self) -> set[frozenset[Term]]:
        """The fan as a set of maximal-element sets."""
        return {m.ideal.maximal_elements() for m in self.models}

    def histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for m in self.models:
            hist[m.size] = hist.get(m.size, 0) + 1
        return dict(sorted(hist.items()))


def model_condition_number(oi: OrderIdeal, design: Design) -> float:
    return condition_number(design_matrix(oi.sorted_terms(), design))


def filter_inclusion_maximal(models: Iterable[OrderIdeal]) -> list[OrderIdeal]:
    """Drop every ideal properly contained in another one."""
    by_size = sorted(set(models), key=len, reverse=True)
    kept: list[OrderIdeal] = []
    for oi in by_size:
        if not any(len(big) > len(oi) and oi.members < big.members for big in kept):
            kept.append(oi)
    return kept


# -- independence oracles --------------------------------------------------


class _FloatOracle:
    """Tolerance-based test on float data; caches evaluations per term."""

    def __init__(self, ed: EmpiricalDesign):
        self.design = ed.design
        self.X = ed.design.array
        self.delta = ed.delta
        self.n, self.d = self.X.shape
        self._cols: dict[Term, np.ndarray] = {}
        self._dcols: dict[tuple[Term, int], np.ndarray] = {}
        self.min_margin = math.inf

    def column(self, t: Term) -> np.ndarray:
        c = self._cols.get(t)
        if c is None:
            c = np.prod(self.X ** np.asarray(t), axis=1)
            self._cols[t] = c
        return c

    def dcolumn(self, t: Term, k: int) -> np.ndarray:
        c = self._dcols.get((t, k))
        if c is None:
            if t[k] == 0:
                c = np.zeros(self.n)
            else:
                lowered = t[:k] + (t[k] - 1,) + t[k + 1:]
                c = t[k] * self.column(lowered)
            self._dcols[(t, k)] = c
        return c

    def root(self):
        return None

    def check(self, state, terms: tuple[Term, ...], candidates: Sequence[Term]):
        if len(terms) >= self.n:
            return [(t, False, None) for t in candidates]
        M = np.column_stack([self.column(s) for s in terms]) if terms else np.zeros((self.n, 0))
        solver = QRLeastSquares(M)
        P = np.abs(solver.projector_complement)
        dmats = [np.column_stack([self.dcolumn(s, k) for s in terms]) if terms else None
                 for k in range(self.d)]
        out = []
        for t in candidates:
            b = self.column(t)
            lsq = solver.solve(b)
            c = np.zeros(self.n)
            for k in range(self.d):
                if self.delta[k] == 0:
                    continue
                dk = self.dcolumn(t, k)
                if terms:
                    dk = dk - dmats[k] @ lsq.coefficients
                c += self.delta[k] * np.abs(dk)
            verdict = verdict_from_lsq(lsq, P @ c, b)
            self.min_margin = min(self.min_margin, verdict.margin)
            out.append((t, verdict.independent, None))
        return out


class _ExactOracle:
    """Exact linear independence on rational data (zero tolerance)."""

    def __init__(self, design: Design):
        self.design = design
        self.n = design.n
        self._cols: dict[Term, tuple[Fraction, ...]] = {}
        self.min_margin = math.inf

    def column(self, t: Term):
        c = self._cols.get(t)
        if c is None:
            c = tuple(eval_term(t, p) for p in self.design.points)
            self._cols[t] = c
        return c

    def root(self):
        return EliminationState()

    def check(self, state: EliminationState, terms, candidates):
        if state.rank >= self.n:
            return [(t, False, state) for t in candidates]
        out = []
        for t in candidates:
            cert, child = state.extend(self.column(t))
            out.append((t, cert.independent, child))
        return out


def _oracle_for(ed: EmpiricalDesign):
    return _ExactOracle(ed.design) if ed.is_exact_zero else _FloatOracle(ed)


# -- the shared walk -------------------------------------------------------


@dataclass
class Exploration:
    weakly_maximal: list[OrderIdeal]
    visited: set[bytes]
    calls: int
    min_margin: float


def explore(ed: EmpiricalDesign, order: TermOrder | None = None, budget: int | None = None,
            full_size_only: bool = False) -> Exploration:
    """Visit every stable order ideal reachable from the empty one.

    Returns the weakly maximal ideals (no corner accepted) and the
    visited set of canonical keys.  ``calls`` counts node expansions,
    including the seed expansion of the empty ideal.  With
    ``full_size_only`` only ideals of size ``n`` are reported.
    """
    order = order or TermOrder()
    budget = default_budget() if budget is None else budget
    oracle = _oracle_for(ed)
    n = ed.n
    root = OrderIdeal.empty(ed.d)
    visited: set[bytes] = set()
    found: list[OrderIdeal] = []
    calls = 0
    stack = [(root, (), oracle.root())]
    while stack:
        oi, terms, state = stack.pop()
        calls += 1
        weakly_max = True
        children = []
        for t, independent, child_state in oracle.check(state, terms, order.sorted(oi.corners)):
            if not independent:
                continue
            weakly_max = False
            grown = oi.add(t)
            key = grown.key()
            if key in visited:
                continue
            visited.add(key)
            if len(visited) > budget:
                raise BudgetExceeded(f"visited more than {budget} order ideals")
            children.append((grown, terms + (t,), child_state))
        if weakly_max and (not full_size_only or len(oi) == n):
            found.append(oi)
        stack.extend(reversed(children))
    return Exploration(found, visited, calls, oracle.min_margin)


@dataclass
class NumericalFanResult:
    fan: Fan
    weakly_maximal: Fan
    all_stable_count: int
    calls: int = 0
    min_margin: float = math.inf
    stable_keys: set[bytes] = field(default_factory=set, repr=False)


def statistical_fan(design: Design, order: TermOrder | None = None, budget: int | None = None,
                    with_conditions: bool = False) -> tuple[Fan, int]:
    """All identifiable order ideals with ``n`` terms.

    Returns the fan and the number of identifiable nonempty order ideals
    met along the way.  Rational input is decided in exact arithmetic.
    """
    if not isinstance(design, Design):
        design = Design(design)
    dups = design.duplicates()
    if dups:
        raise DuplicatePointsError(f"duplicate design points: {dups}")
    res = explore(EmpiricalDesign(design), order, budget, full_size_only=True)
    fan = Fan.build(res.weakly_maximal, design if with_conditions else None)
    return fan, len(res.visited)


def numerical_fan(ed: EmpiricalDesign, order: TermOrder | None = None, budget: int | None = None,
                  condition_design: Design | None = None) -> NumericalFanResult:
    """Maximal numerically stable order ideals of an empirical design.

    ``weakly_maximal`` holds the ideals none of whose corners passes the
    independence test; ``fan`` keeps the inclusion-maximal ones among
    them.  Condition numbers are evaluated on ``condition_design``
    (default: the design itself).
    """
    res = explore(ed, order, budget)
    cond_on = condition_design or ed.design
    return NumericalFanResult(
        fan=Fan.build(filter_inclusion_maximal(res.weakly_maximal), cond_on),
        weakly_maximal=Fan.build(res.weakly_maximal, cond_on),
        all_stable_count=len(res.visited),
        calls=res.calls,
        min_margin=res.min_margin,
        stable_keys=res.visited,
    )


# -- greedy construction and NBM ------------------------------------------


@dataclass(frozen=True)
class AlmostVanishingPolynomial:
    """``leading_term - sum_l coefficients[l] * support[l]``."""

    leading_term: Term
    support: tuple[Term, ...]
    coefficients: tuple

    def coefficient_vector(self, terms: Sequence[Term]) -> list:
        """Coefficients of the tail aligned with ``terms`` (0 where absent)."""
        lookup = dict(zip(self.support, self.coefficients))
        return [lookup.get(t, 0) for t in terms]

    def evaluate(self, design: Design) -> np.ndarray:
        lead = design_matrix([self.leading_term], design)[:, 0]
        if not self.support:
            return lead
        return lead - design_matrix(self.support, design) @ np.array([float(c) for c in self.coefficients])

    def __str__(self):
        out = format_term(self.leading_term)
        order = TermOrder()
        pairs = sorted(zip(self.support, self.coefficients), key=lambda p: order.key(p[0]), reverse=True)
        for t, a in pairs:
            if a == 0:
                continue
            coef = -a
            sign = "-" if coef < 0 else "+"
            mag = abs(coef)
            mag_s = _format_coef(mag)
            if sum(t) == 0:
                out += f" {sign} {mag_s}"
            elif mag == 1:
                out += f" {sign} {format_term(t)}"
            else:
                out += f" {sign} {mag_s}*{format_term(t)}"
        return out


def _format_coef(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else str(x)
    return f"{float(x):.12g}"


@dataclass(frozen=True)
class NbmOutput:
    order_ideal: OrderIdeal
    polynomials: tuple[AlmostVanishingPolynomial, ...]
    accepted: tuple[Term, ...] = ()


def _greedy(ed: EmpiricalDesign, order: TermOrder) -> NbmOutput:
    oi = OrderIdeal.empty(ed.d)
    terms: tuple[Term, ...] = ()
    exact = ed.is_exact_zero
    rejected: dict[Term, AlmostVanishingPolynomial] = {}
    while True:
        open_corners = [c for c in oi.corners if c not in rejected]
        if not open_corners:
            break
        t = order.smallest(open_corners)
        verdict = is_num_independent(terms, ed.design, ed.tolerance, t, exact=exact)
        if verdict.independent and len(terms) < ed.n:
            oi = oi.add(t)
            terms = terms + (t,)
        else:
            rejected[t] = AlmostVanishingPolynomial(t, terms, verdict.coefficients)
    polys = tuple(rejected[t] for t in order.sorted(rejected))
    return NbmOutput(oi, polys, terms)


def maximal_stable_order_ideal(ed: EmpiricalDesign, strategy: TermOrder | None = None) -> OrderIdeal:
    """One weakly maximal stable order ideal, trying corners in increasing ``strategy`` order."""
    return _greedy(ed, strategy or TermOrder()).order_ideal


def nbm(ed: EmpiricalDesign, order: TermOrder | None = None) -> NbmOutput:
    """Numerical Buchberger-Moeller: the greedy ideal plus one almost
    vanishing polynomial per rejected corner."""
    return _greedy(ed, order or TermOrder())


def numerical_algebraic_fan_family(ed: EmpiricalDesign, budget: int = 10_000) -> Fan:
    """Union of NBM ideals over lex/deglex/degrevlex and all variable permutations."""
    runs = 3 * math.factorial(ed.d)
    if runs > budget:
        raise BudgetExceeded(f"{runs} term orders exceed the budget of {budget}")
    return Fan.build((nbm(ed, o).order_ideal for o in all_term_orders(ed.d)), ed.design)
