"""Distributions on finite outcome spaces, discrete losses, their Bayes
risks, and the finite properties (level-set partitions) they elicit.

Everything is exact: probabilities and loss values are Fractions, so argmin
ties and level-set membership are decided without tolerances.  All types are
immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .geometry import Polyhedron, relative_interior_point

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class OutcomeSpace:
    labels: tuple

    def __post_init__(self):
        labels = tuple(str(v) for v in self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError("outcome labels must be distinct")
        if len(labels) < 2:
            raise ValueError("need at least two outcomes")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise ValueError("unknown outcome %r" % (label,)) from None


@dataclass(frozen=True)
class Distribution:
    space: OutcomeSpace
    p: tuple

    def __post_init__(self):
        p = tuple(Fraction(v) for v in self.p)
        if len(p) != self.space.n:
            raise ValueError("probability vector has wrong length")
        if any(v < 0 for v in p):
            raise ValueError("negative probability")
        if sum(p) != 1:
            raise ValueError("probabilities must sum to exactly 1")
        object.__setattr__(self, "p", p)

    @classmethod
    def point(cls, space: OutcomeSpace, label) -> "Distribution":
        p = [ZERO] * space.n
        p[space.index(label)] = ONE
        return cls(space, tuple(p))

    @classmethod
    def uniform(cls, space: OutcomeSpace) -> "Distribution":
        return cls(space, (Fraction(1, space.n),) * space.n)

    @classmethod
    def of(cls, space: OutcomeSpace, weights: dict) -> "Distribution":
        p = [ZERO] * space.n
        for label, w in weights.items():
            p[space.index(label)] = Fraction(w)
        return cls(space, tuple(p))

    def __getitem__(self, label) -> Fraction:
        return self.p[self.space.index(label)]

    @property
    def support(self) -> frozenset:
        return frozenset(i for i, v in enumerate(self.p) if v > 0)

    def is_interior(self) -> bool:
        return all(v > 0 for v in self.p)


@dataclass(frozen=True)
class DiscreteLoss:
    """Finite report set with one nonnegative loss vector per report."""

    space: OutcomeSpace
    reports: tuple
    matrix: tuple  # rows indexed by report, columns by outcome

    def __post_init__(self):
        reports = tuple(str(r) for r in self.reports)
        if not reports:
            raise ValueError("need at least one report")
        if len(set(reports)) != len(reports):
            raise ValueError("report identifiers must be distinct")
        rows = []
        for row in self.matrix:
            row = tuple(Fraction(v) for v in row)
            if len(row) != self.space.n:
                raise ValueError("loss row has wrong length")
            if any(v < 0 for v in row):
                raise ValueError("loss values must be >= 0")
            rows.append(row)
        if len(rows) != len(reports):
            raise ValueError("one loss row per report required")
        object.__setattr__(self, "reports", reports)
        object.__setattr__(self, "matrix", tuple(rows))

    def report_index(self, report) -> int:
        try:
            return self.reports.index(str(report))
        except ValueError:
            raise ValueError("unknown report %r" % (report,)) from None

    def row(self, report) -> tuple:
        return self.matrix[self.report_index(report)]

    def scale(self, factor) -> "DiscreteLoss":
        f = Fraction(factor)
        if f < 0:
            raise ValueError("scale factor must be >= 0")
        return DiscreteLoss(
            self.space, self.reports, tuple(tuple(f * v for v in row) for row in self.matrix)
        )


@dataclass(frozen=True)
class FiniteProperty:
    """Level sets of a finite property: report -> polyhedral cell in the simplex."""

    space: OutcomeSpace
    cells: tuple  # of (report, Polyhedron)

    def cell(self, report) -> Polyhedron:
        for r, c in self.cells:
            if r == str(report):
                return c
        raise ValueError("unknown report %r" % (report,))

    @property
    def reports(self) -> tuple:
        return tuple(r for r, _ in self.cells)


def expected_discrete_loss(loss: DiscreteLoss, report, dist: Distribution) -> Fraction:
    """<p, loss(report)> exactly."""
    row = loss.row(report)
    return sum((pv * lv for pv, lv in zip(dist.p, row)), ZERO)


def discrete_bayes_risk(loss: DiscreteLoss, dist: Distribution):
    """(min_r <p, loss(r)>, full argmin set), exact."""
    values = [sum((pv * lv for pv, lv in zip(dist.p, row)), ZERO) for row in loss.matrix]
    best = min(values)
    argmin = tuple(r for r, v in zip(loss.reports, values) if v == best)
    return best, argmin


def level_set_polyhedron(loss: DiscreteLoss, report) -> Polyhedron:
    """{p in simplex : report is optimal} as a halfspace representation."""
    n = loss.space.n
    row = loss.row(report)
    ineqs = []
    for other, orow in zip(loss.reports, loss.matrix):
        if other == str(report):
            continue
        ineqs.append((tuple(a - b for a, b in zip(row, orow)), ZERO))
    for y in range(n):
        a = [ZERO] * n
        a[y] = Fraction(-1)
        ineqs.append((tuple(a), ZERO))
    return Polyhedron(n, tuple(ineqs), (((ONE,) * n, ONE),))


def finite_property(loss: DiscreteLoss) -> FiniteProperty:
    return FiniteProperty(
        loss.space, tuple((r, level_set_polyhedron(loss, r)) for r in loss.reports)
    )


@dataclass(frozen=True)
class NonRedundancyReport:
    witnesses: tuple  # of (report, Distribution)
    failures: tuple  # reports with no uniqueness witness

    @property
    def ok(self) -> bool:
        return not self.failures

    def witness(self, report) -> Distribution:
        for r, d in self.witnesses:
            if r == str(report):
                return d
        raise ValueError("no witness for %r" % (report,))


def check_non_redundant(loss: DiscreteLoss) -> NonRedundancyReport:
    """Find, per report, a distribution where it is uniquely optimal.

    The witness is a maximal-slack interior point of the report's level set;
    uniqueness is then re-verified by exact argmin.  Reports whose level set
    has no interior, or that stay tied there (identical rows), are failures.
    """
    witnesses = []
    failures = []
    for report in loss.reports:
        cell = level_set_polyhedron(loss, report)
        rel = relative_interior_point(cell)
        if rel is None or rel[1] <= 0:
            failures.append(report)
            continue
        dist = Distribution(loss.space, rel[0])
        _, argmin = discrete_bayes_risk(loss, dist)
        if argmin == (report,):
            witnesses.append((report, dist))
        else:
            failures.append(report)
    return NonRedundancyReport(tuple(witnesses), tuple(failures))


def compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to `total`, in
    lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in compositions(total - head, parts - 1):
            yield (head,) + rest


def positive_compositions(total: int, parts: int):
    for comp in compositions(total - parts, parts):
        yield tuple(c + 1 for c in comp)


def simplex_grid(space: OutcomeSpace, m: int):
    """All distributions with entries k/m, lexicographic in the composition.

    Yields C(m+n-1, n-1) distributions.
    """
    if m < 1:
        raise ValueError("grid denominator must be >= 1")
    for comp in compositions(m, space.n):
        yield Distribution(space, tuple(Fraction(c, m) for c in comp))


def simplex_grid_size(n: int, m: int) -> int:
    return comb(m + n - 1, n - 1)
