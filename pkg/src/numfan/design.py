"""Designs, empirical designs and their evaluation matrices.

Coordinates are stored exactly as :class:`~fractions.Fraction` whenever the
input allows it (ints, Fractions, finite decimal strings, floats via their
shortest repr).  The exact values drive the rank computations of the
statistical fan; a float copy drives least squares and the tolerance test.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .terms import Term


class DesignError(ValueError):
    """Malformed design or tolerance input."""


def to_exact(x) -> Fraction | None:
    """Exact rational value of ``x``, or None if it has none."""
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            return None
        return Fraction(repr(float(x)))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            return None
    return None


def parse_scalar(x):
    """Fraction when exact, else float; raises DesignError when neither."""
    q = to_exact(x)
    if q is not None:
        return q
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise DesignError(f"not a number: {x!r}") from None
    if not math.isfinite(v):
        raise DesignError(f"non-finite value: {x!r}")
    return v


@dataclass(frozen=True)
class Design:
    """``n`` points in ``d`` dimensions."""

    points: tuple

    def __init__(self, points: Iterable[Sequence], exact: bool | None = None):
        rows = tuple(tuple(parse_scalar(v) for v in p) for p in points)
        if not rows:
            raise DesignError("a design needs at least one point")
        d = len(rows[0])
        if d == 0 or any(len(r) != d for r in rows):
            raise DesignError("all points must have the same positive dimension")
        if exact is False:
            rows = tuple(tuple(float(v) for v in r) for r in rows)
        elif exact and not all(isinstance(v, Fraction) for r in rows for v in r):
            raise DesignError("exact arithmetic requested but input is not rational")
        object.__setattr__(self, "points", rows)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def d(self) -> int:
        return len(self.points[0])

    @cached_property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for r in self.points for v in r)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.points], dtype=float)

    def as_float(self) -> "Design":
        return Design(self.points, exact=False)

    def duplicates(self) -> list[tuple[int, int]]:
        seen: dict = {}
        dups = []
        for i, p in enumerate(self.points):
            if p in seen:
                dups.append((seen[p], i))
            else:
                seen[p] = i
        return dups

    def translated(self, shift: Sequence) -> "Design":
        shift = [parse_scalar(s) for s in shift]
        return Design([[v + s for v, s in zip(p, shift)] for p in self.points])

    def scaled(self, factors: Sequence) -> "Design":
        factors = [parse_scalar(s) for s in factors]
        return Design([[v * s for v, s in zip(p, factors)] for p in self.points])


@dataclass(frozen=True)
class EmpiricalDesign:
    """A design together with componentwise tolerances ``delta``."""

    design: Design
    tolerance: tuple

    def __init__(self, design: Design | Iterable[Sequence], tolerance: Sequence | None = None):
        if not isinstance(design, Design):
            design = Design(design)
        if tolerance is None:
            tolerance = (0,) * design.d
        tol = tuple(parse_scalar(v) for v in tolerance)
        if len(tol) != design.d:
            raise DesignError(f"tolerance has {len(tol)} entries, design has d={design.d}")
        if any(v < 0 for v in tol):
            raise DesignError("tolerances must be non-negative")
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "tolerance", tol)

    @property
    def n(self) -> int:
        return self.design.n

    @property
    def d(self) -> int:
        return self.design.d

    @property
    def delta(self) -> np.ndarray:
        return np.array([float(v) for v in self.tolerance])

    @property
    def max_tolerance(self):
        return max(self.tolerance)

    @property
    def is_exact_zero(self) -> bool:
        """Zero tolerance on rational data: identifiability is decided exactly."""
        return self.design.exact and all(v == 0 for v in self.tolerance)

    def scaled_tolerance(self, k) -> "EmpiricalDesign":
        k = parse_scalar(k)
        return EmpiricalDesign(self.design, [k * v for v in self.tolerance])


def eval_term(t: Term, p: Sequence):
    """Value of the monomial ``t`` at point ``p``; ``0**0 == 1``."""
    if len(t) != len(p):
        raise ValueError("dimension mismatch")
    v = 1
    for a, c in zip(t, p):
        if a:
            v = v * c ** a
    return v


def design_matrix(terms: Iterable[Term], design: Design, exact: bool = False):
    """Evaluation matrix, rows = design points, columns = ``terms`` in the given order.

    Returns a float ndarray, or a list of Fraction rows when ``exact``.
    """
    terms = list(terms)
    if exact:
        return [[eval_term(t, p) for t in terms] for p in design.points]
    X = design.array
    M = np.ones((design.n, len(terms)))
    for j, t in enumerate(terms):
        for k, a in enumerate(t):
            if a:
                M[:, j] *= X[:, k] ** a
    return M


def derivative_matrix(terms: Iterable[Term], design: Design, k: int) -> np.ndarray:
    """Matrix of ``d/dX_k`` of each term at each point; ``k`` is 0-based."""
    if not 0 <= k < design.d:
        raise ValueError(f"axis {k} out of range for d={design.d}")
    terms = list(terms)
    out = np.zeros((design.n, len(terms)))
    for j, t in enumerate(terms):
        a = t[k]
        if a:
            lowered = t[:k] + (a - 1,) + t[k + 1:]
            out[:, j] = a * design_matrix([lowered], design)[:, 0]
    return out


@dataclass(frozen=True)
class AffineMap:
    """``x -> scale * x + shift`` on one coordinate."""

    scale: object
    shift: object

    def __call__(self, x):
        return self.scale * x + self.shift

    def inverse(self, y):
        return (y - self.shift) / self.scale


def standardize(ed: EmpiricalDesign) -> tuple[EmpiricalDesign, list[AffineMap]]:
    """Map every coordinate affinely onto ``[-1, 1]``; tolerances follow the scale."""
    maps = []
    for k in range(ed.d):
        col = [p[k] for p in ed.design.points]
        lo, hi = min(col), max(col)
        rng = hi - lo
        if rng == 0:
            raise DesignError(f"coordinate {k + 1} is constant; cannot standardize")
        scale = 2 / rng if isinstance(rng, Fraction) else 2.0 / rng
        maps.append(AffineMap(scale, -(hi + lo) / rng))
    pts = [[m(v) for m, v in zip(maps, p)] for p in ed.design.points]
    tol = [m.scale * t for m, t in zip(maps, ed.tolerance)]
    return EmpiricalDesign(Design(pts), tol), maps


def check_separation(ed: EmpiricalDesign) -> list[tuple[int, int]]:
    """Pairs of points whose open half-width-``delta`` boxes overlap."""
    X = ed.design.array
    twice = 2 * ed.delta
    bad = []
    for i in range(ed.n):
        close = np.all(np.abs(X[i + 1:] - X[i]) < twice, axis=1)
        bad.extend((i, i + 1 + int(j)) for j in np.flatnonzero(close))
    return bad


def _is_number(s: str) -> bool:
    return to_exact(s) is not None or _floatable(s)


def _floatable(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_csv_rows(text: str) -> list[list[str]]:
    rows = [[c.strip() for c in r] for r in csv.reader(io.StringIO(text))]
    rows = [r for r in rows if any(r)]
    if rows and not any(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    return rows


def parse_design_csv(text: str) -> Design:
    """One point per row; an optional non-numeric header row is skipped."""
    rows = read_csv_rows(text)
    if not rows:
        raise DesignError("no data rows in design file")
    for r in rows:
        for c in r:
            if not _is_number(c):
                raise DesignError(f"non-numeric entry {c!r}")
    return Design(rows)


def load_design(path) -> Design:
    with open(path, newline="") as fh:
        return parse_design_csv(fh.read())


def parse_tolerance(text: str) -> tuple:
    """``"0.018,0.018"`` or a one-row CSV body."""
    rows = read_csv_rows(text)
    if len(rows) != 1:
        raise DesignError("tolerance must be a single row of numbers")
    return tuple(parse_scalar(c) for c in rows[0])
