"""Monomials, term orders and order ideals (staircases).

A term ``X1^a1 * ... * Xd^ad`` is represented by its exponent tuple
``(a1, ..., ad)``.  Order ideals keep their corner set (the minimal terms
of the complement) up to date so that growing an ideal by one corner is
cheap and the corner set doubles as an exact dedup key.
"""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Iterator, Sequence

Term = tuple[int, ...]

ORDER_KINDS = ("lex", "deglex", "degrevlex")
DEFAULT_BUDGET = 10_000_000


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration visits more objects than allowed."""


def default_budget() -> int:
    env = os.environ.get("NUMFAN_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def one(d: int) -> Term:
    return (0,) * d


def degree(t: Term) -> int:
    return sum(t)


def divides(s: Sequence[int], t: Sequence[int]) -> bool:
    """True iff ``s`` divides ``t``, i.e. ``s <= t`` componentwise."""
    if len(s) != len(t):
        raise ValueError(f"dimension mismatch: {len(s)} vs {len(t)}")
    return all(a <= b for a, b in zip(s, t))


def multiply_var(t: Term, k: int) -> Term:
    return t[:k] + (t[k] + 1,) + t[k + 1:]


def divide_var(t: Term, k: int) -> Term:
    return t[:k] + (t[k] - 1,) + t[k + 1:]


def predecessors(t: Term) -> Iterator[Term]:
    """Divisors of ``t`` of degree one less."""
    for k, a in enumerate(t):
        if a:
            yield divide_var(t, k)


def format_term(t: Term) -> str:
    """Render as ``1``, ``X1``, ``X1*X2^3``."""
    parts = []
    for k, a in enumerate(t, start=1):
        if a == 1:
            parts.append(f"X{k}")
        elif a > 1:
            parts.append(f"X{k}^{a}")
    return "*".join(parts) if parts else "1"


def parse_term(text: str, d: int) -> Term:
    """Inverse of :func:`format_term`."""
    exps = [0] * d
    text = text.strip()
    if text == "1":
        return tuple(exps)
    for factor in text.split("*"):
        var, _, power = factor.strip().partition("^")
        if not var.startswith("X"):
            raise ValueError(f"bad term {text!r}")
        k = int(var[1:]) - 1
        if not 0 <= k < d:
            raise ValueError(f"variable {var} out of range for d={d}")
        exps[k] += int(power) if power else 1
    return tuple(exps)


@dataclass(frozen=True)
class TermOrder:
    """Total, multiplicative well-ordering on terms.

    ``variable_permutation[0]`` is the most significant variable for lex
    and the tie-breaking chain of deglex; degrevlex looks at the
    permuted exponents from the back.
    """

    kind: str = "deglex"
    variable_permutation: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise ValueError(f"unknown term order {self.kind!r}; expected one of {ORDER_KINDS}")

    def _perm(self, d: int) -> tuple[int, ...]:
        perm = self.variable_permutation
        if perm is None:
            return tuple(range(d))
        if sorted(perm) != list(range(d)):
            raise ValueError(f"{perm} is not a permutation of range({d})")
        return perm

    def key(self, t: Term):
        """Sort key; ``sorted(terms, key=order.key)`` is increasing."""
        p = [t[i] for i in self._perm(len(t))]
        if self.kind == "lex":
            return tuple(p)
        if self.kind == "deglex":
            return (sum(p), tuple(p))
        return (sum(p), tuple(-a for a in reversed(p)))

    def sorted(self, terms: Iterable[Term]) -> list[Term]:
        return sorted(terms, key=self.key)

    def smallest(self, terms: Iterable[Term]) -> Term:
        return min(terms, key=self.key)

    def __str__(self):
        if self.variable_permutation is None:
            return self.kind
        return f"{self.kind}[{','.join(str(i + 1) for i in self.variable_permutation)}]"


def all_term_orders(d: int) -> list[TermOrder]:
    return [TermOrder(kind, perm) for kind in ORDER_KINDS for perm in permutations(range(d))]


def brute_force_corners(members: Iterable[Term], d: int) -> frozenset[Term]:
    """Minimal terms outside ``members``, computed from scratch.

    Every corner has all its predecessors in ``members``, so corners lie in
    ``{1} ∪ {m * X_k}``; this is the reference implementation.
    """
    members = set(members)
    candidates = {one(d)} | {multiply_var(m, k) for m in members for k in range(d)}
    return frozenset(
        c for c in candidates
        if c not in members and all(p in members for p in predecessors(c))
    )


@dataclass(frozen=True)
class OrderIdeal:
    """Divisibility-closed finite set of terms together with its corner set."""

    dim: int
    members: frozenset = frozenset()
    corners: frozenset = field(default=None, compare=False)

    def __post_init__(self):
        if self.corners is None:
            object.__setattr__(self, "corners", brute_force_corners(self.members, self.dim))

    @classmethod
    def empty(cls, d: int) -> "OrderIdeal":
        return cls(d, frozenset(), frozenset({one(d)}))

    @classmethod
    def generated_by(cls, generators: Iterable[Sequence[int]], d: int | None = None) -> "OrderIdeal":
        """Smallest order ideal containing ``generators`` (e.g. its maximal elements)."""
        gens = [tuple(g) for g in generators]
        if d is None:
            if not gens:
                raise ValueError("dimension required for an empty generator list")
            d = len(gens[0])
        members: set[Term] = set()
        stack = list(gens)
        while stack:
            t = stack.pop()
            if len(t) != d:
                raise ValueError(f"term {t} has wrong dimension (d={d})")
            if t in members:
                continue
            members.add(t)
            stack.extend(predecessors(t))
        return cls(d, frozenset(members))

    def __len__(self):
        return len(self.members)

    def __contains__(self, t):
        return t in self.members

    def __iter__(self):
        return iter(self.members)

    def __hash__(self):
        return hash(self.members)

    def add(self, t: Term) -> "OrderIdeal":
        return OrderIdeal(self.dim, self.members | {t}, corner_set_after_add(self, t))

    def is_closed(self) -> bool:
        return all(p in self.members for t in self.members for p in predecessors(t))

    def maximal_elements(self) -> frozenset[Term]:
        return maximal_elements(self)

    def key(self) -> bytes:
        return canonical_key(self)

    def issubset(self, other: "OrderIdeal") -> bool:
        return self.members <= other.members

    def sorted_terms(self, order: TermOrder | None = None) -> list[Term]:
        return (order or TermOrder()).sorted(self.members)

    def __repr__(self):
        gens = ", ".join(format_term(t) for t in TermOrder().sorted(self.maximal_elements()))
        return f"OrderIdeal({{{gens}}})"


def corner_set_after_add(oi: OrderIdeal, t: Term) -> frozenset[Term]:
    """Corner set of ``oi ∪ {t}`` for a corner ``t`` of ``oi``."""
    if t not in oi.corners:
        raise ValueError(f"{format_term(t)} is not in the corner set")
    grown = oi.members | {t}
    new = set(oi.corners)
    new.discard(t)
    for k in range(oi.dim):
        s = multiply_var(t, k)
        if all(p in grown for p in predecessors(s)):
            new.add(s)
    return frozenset(new)


def maximal_elements(oi: OrderIdeal) -> frozenset[Term]:
    members = oi.members
    return frozenset(
        t for t in members
        if not any(multiply_var(t, k) in members for k in range(oi.dim))
    )


def canonical_key(oi: OrderIdeal) -> bytes:
    """Length-prefixed little-endian serialization of the sorted corner set."""
    corners = sorted(oi.corners)
    fmt = "<I" + f"{oi.dim}I" * len(corners)
    return struct.pack(fmt, len(corners), *(a for c in corners for a in c))


def _monomial_universe(d: int, n: int) -> list[Term]:
    """Terms that can lie in an order ideal of at most ``n`` terms.

    A member ``t`` forces its whole divisor box of ``prod(a_i + 1)`` terms.
    """
    out: list[Term] = []

    def rec(prefix: list[int], box: int):
        if len(prefix) == d:
            out.append(tuple(prefix))
            return
        a = 0
        while box * (a + 1) <= n:
            prefix.append(a)
            rec(prefix, box * (a + 1))
            prefix.pop()
            a += 1

    rec([], 1)
    return out


def count_order_ideals(d: int, n: int, cumulative: bool = False,
                       budget: int | None = None) -> int:
    """Number of order ideals with exactly ``n`` terms in ``d`` variables.

    With ``cumulative`` the ideals with ``1..n`` terms are counted (the
    empty ideal is not).  Ideals are grown level by level from ``{1}``;
    each one is a bitmask over the finite universe of admissible terms,
    so deduplication is exact.
    """
    if d < 1 or n < 0:
        raise ValueError("need d >= 1 and n >= 0")
    if n == 0:
        return 0 if cumulative else 1
    budget = default_budget() if budget is None else budget

    universe = _monomial_universe(d, n)
    index = {t: i for i, t in enumerate(universe)}
    pred_mask = []
    succ = []
    for t in universe:
        m = 0
        for p in predecessors(t):
            m |= 1 << index[p]
        pred_mask.append(m)
        succ.append(tuple(index[s] for s in (multiply_var(t, k) for k in range(d)) if s in index))

    # level maps mask -> tuple of corner indices (restricted to the universe)
    level = {1 << index[one(d)]: tuple(succ[index[one(d)]])}
    total = 1
    visited = 1
    for _size in range(2, n + 1):
        nxt: dict[int, tuple[int, ...]] = {}
        last = _size == n
        for mask, corners in level.items():
            for c in corners:
                new_mask = mask | (1 << c)
                if new_mask in nxt:
                    continue
                if last:
                    nxt[new_mask] = ()
                else:
                    new_corners = [x for x in corners if x != c]
                    for s in succ[c]:
                        pm = pred_mask[s]
                        if new_mask & pm == pm:
                            new_corners.append(s)
                    nxt[new_mask] = tuple(new_corners)
            visited_now = visited + len(nxt)
            if visited_now > budget:
                raise BudgetExceeded(f"order-ideal enumeration exceeded budget of {budget}")
        visited += len(nxt)
        level = nxt
        total += len(level)
    return total if cumulative else len(level)
