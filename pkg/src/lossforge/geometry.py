"""Exact polyhedral kernel: feasibility, optimization, vertex enumeration,
point-to-set distances and thickened-intersection tests.

Polyhedra are halfspace representations {x : A x <= b, E x = f} over exact
rationals.  Unbounded polyhedra are first-class (optimal sets of hinge-style
losses are rays); vertex enumeration refuses them.

Distances use the l1 or linf norm only, each reducible to one LP.  The
thickened-intersection test decides the strict condition

    exists u with d(U_j, u) < eps for all j

exactly, by maximizing the common slack s in ||u - x_j|| <= eps - s over
x_j in U_j and comparing the optimum to 0.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .lp import INFEASIBLE, LPProblem, UNBOUNDED, lp_solve

ZERO = Fraction(0)
ONE = Fraction(1)


class Norm(enum.Enum):
    L1 = "l1"
    LINF = "linf"

    @classmethod
    def parse(cls, tag: str) -> "Norm":
        try:
            return cls(tag.lower())
        except ValueError:
            raise ValueError("unknown norm %r (use 'l1' or 'linf')" % tag) from None


def norm_value(norm: Norm, vec) -> Fraction:
    vals = [abs(Fraction(v)) for v in vec]
    return max(vals) if norm is Norm.LINF else sum(vals, ZERO)


@dataclass(frozen=True)
class Polyhedron:
    """{x in R^dim : a.x <= b for (a, b) in inequalities, a.x = b for equalities}."""

    dim: int
    inequalities: tuple = ()
    equalities: tuple = ()
    _vertex_cache: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        ineqs = tuple((tuple(Fraction(v) for v in a), Fraction(b)) for a, b in self.inequalities)
        eqs = tuple((tuple(Fraction(v) for v in a), Fraction(b)) for a, b in self.equalities)
        for a, _ in ineqs + eqs:
            if len(a) != self.dim:
                raise ValueError("constraint width %d != dim %d" % (len(a), self.dim))
        object.__setattr__(self, "inequalities", ineqs)
        object.__setattr__(self, "equalities", eqs)

    def contains(self, x) -> bool:
        x = [Fraction(v) for v in x]
        if len(x) != self.dim:
            raise ValueError("point dimension mismatch")
        for a, b in self.equalities:
            if sum(ai * xi for ai, xi in zip(a, x)) != b:
                return False
        for a, b in self.inequalities:
            if sum(ai * xi for ai, xi in zip(a, x)) > b:
                return False
        return True

    def is_empty(self) -> bool:
        res = lp_solve(
            LPProblem(
                c=(ZERO,) * self.dim,
                a_ub=tuple(a for a, _ in self.inequalities),
                b_ub=tuple(b for _, b in self.inequalities),
                a_eq=tuple(a for a, _ in self.equalities),
                b_eq=tuple(b for _, b in self.equalities),
            )
        )
        return res.status == INFEASIBLE

    def vertices(self) -> tuple:
        if self._vertex_cache is None:
            object.__setattr__(self, "_vertex_cache", enumerate_vertices(self))
        return self._vertex_cache


def intersect_polyhedra(members) -> Polyhedron:
    members = list(members)
    dim = members[0].dim
    if any(p.dim != dim for p in members):
        raise ValueError("dimension mismatch in family")
    return Polyhedron(
        dim,
        tuple(itertools.chain.from_iterable(p.inequalities for p in members)),
        tuple(itertools.chain.from_iterable(p.equalities for p in members)),
    )


def linear_optimize(p: Polyhedron, c, maximize=False):
    """Optimize c.x over p; returns an LPResult."""
    return lp_solve(
        LPProblem(
            c=tuple(Fraction(v) for v in c),
            a_ub=tuple(a for a, _ in p.inequalities),
            b_ub=tuple(b for _, b in p.inequalities),
            a_eq=tuple(a for a, _ in p.equalities),
            b_eq=tuple(b for _, b in p.equalities),
            maximize=maximize,
        )
    )


def is_bounded(p: Polyhedron) -> bool:
    """True iff p is bounded (2*dim LPs); empty polyhedra count as bounded."""
    for j in range(p.dim):
        c = [ZERO] * p.dim
        c[j] = ONE
        for maximize in (False, True):
            res = linear_optimize(p, c, maximize=maximize)
            if res.status == UNBOUNDED:
                return False
            if res.status == INFEASIBLE:
                return True
    return True


def _gauss_solve(rows, rhs, dim):
    """Solve rows.x = rhs exactly; returns the solution or None unless the
    system has full column rank dim."""
    m = len(rows)
    aug = [list(rows[i]) + [rhs[i]] for i in range(m)]
    piv_cols = []
    r = 0
    for c in range(dim):
        piv = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [vi - f * vr for vi, vr in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    if len(piv_cols) < dim:
        return None
    for i in range(r, m):
        if aug[i][dim] != 0:
            return None  # inconsistent
    x = [ZERO] * dim
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][dim]
    return tuple(x)


def _row_space_basis(rows, dim):
    basis = []
    mat = []
    for row in rows:
        cand = mat + [list(row)]
        # rank via forward elimination
        work = [r[:] for r in cand]
        rank = 0
        for c in range(dim):
            piv = next((i for i in range(rank, len(work)) if work[i][c] != 0), None)
            if piv is None:
                continue
            work[rank], work[piv] = work[piv], work[rank]
            pv = work[rank][c]
            for i in range(rank + 1, len(work)):
                if work[i][c] != 0:
                    f = work[i][c] / pv
                    work[i] = [vi - f * vr for vi, vr in zip(work[i], work[rank])]
            rank += 1
        if rank == len(cand):
            mat = cand
            basis.append(row)
    return basis


def enumerate_vertices(p: Polyhedron) -> tuple:
    """All vertices of a bounded polyhedron, exactly, by brute force over
    active-constraint subsets.  Raises on unbounded input."""
    if not is_bounded(p):
        raise ValueError("vertex enumeration requires a bounded polyhedron")
    eq_rows = [list(a) for a, _ in p.equalities]
    eq_rhs = [b for _, b in p.equalities]
    eq_basis_idx = []
    seen_rows = []
    for i, row in enumerate(eq_rows):
        if _row_space_basis(seen_rows + [row], p.dim) != seen_rows:
            seen_rows = seen_rows + [row]
            eq_basis_idx.append(i)
    rank_eq = len(eq_basis_idx)
    need = p.dim - rank_eq
    ineqs = list(p.inequalities)
    verts = set()
    if need < 0:
        need = 0
    for combo in itertools.combinations(range(len(ineqs)), need):
        rows = [eq_rows[i] for i in eq_basis_idx] + [list(ineqs[i][0]) for i in combo]
        rhs = [eq_rhs[i] for i in eq_basis_idx] + [ineqs[i][1] for i in combo]
        x = _gauss_solve(rows, rhs, p.dim)
        if x is not None and p.contains(x):
            verts.add(x)
    return tuple(sorted(verts))


def point_set_distance(p: Polyhedron, u, norm: Norm) -> Fraction:
    """Exact min_{x in p} ||x - u|| via one LP; raises on empty p."""
    u = [Fraction(v) for v in u]
    if len(u) != p.dim:
        raise ValueError("point dimension mismatch")
    d = p.dim
    nt = 1 if norm is Norm.LINF else d
    nv = d + nt
    a_ub = [list(a) + [ZERO] * nt for a, _ in p.inequalities]
    b_ub = [b for _, b in p.inequalities]
    for i in range(d):
        for sign in (1, -1):
            row = [ZERO] * nv
            row[i] = Fraction(sign)
            row[d + (0 if norm is Norm.LINF else i)] = Fraction(-1)
            a_ub.append(row)
            b_ub.append(sign * u[i])
    c = [ZERO] * d + [ONE] * nt
    res = lp_solve(
        LPProblem(
            c=tuple(c),
            a_ub=tuple(tuple(r) for r in a_ub),
            b_ub=tuple(b_ub),
            a_eq=tuple(tuple(a) + (ZERO,) * nt for a, _ in p.equalities),
            b_eq=tuple(b for _, b in p.equalities),
            nonneg=tuple([False] * d + [True] * nt),
        )
    )
    if res.status == INFEASIBLE:
        raise ValueError("distance to an empty polyhedron")
    assert res.is_optimal
    return res.value


def sets_intersect(family) -> bool:
    """True iff the members (same dim) have a common point."""
    family = list(family)
    if not family:
        raise ValueError("empty family")
    return not intersect_polyhedra(family).is_empty()


def thickened_family_intersects(family, eps, norm: Norm) -> bool:
    """True iff some u has d(U_j, u) < eps for every member U_j (strictly).

    Decided exactly: maximize s subject to x_j in U_j and
    ||u - x_j|| <= eps - s; the thickened members (open balls) intersect iff
    the optimum s* is > 0.
    """
    family = list(family)
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if not family:
        raise ValueError("empty family")
    d = family[0].dim
    if any(p.dim != d for p in family):
        raise ValueError("dimension mismatch in family")

    m = len(family)
    nt = 0 if norm is Norm.LINF else d * m
    # variables: u (d) | x_j (d each) | t (nt, nonneg, l1 only) | s
    nv = d + d * m + nt + 1
    s_at = nv - 1

    def uvar(i):
        return i

    def xvar(j, i):
        return d + j * d + i

    def tvar(j, i):
        return d + d * m + j * d + i

    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for j, p in enumerate(family):
        for a, b in p.inequalities:
            row = [ZERO] * nv
            for i, ai in enumerate(a):
                row[xvar(j, i)] = ai
            a_ub.append(row)
            b_ub.append(b)
        for a, b in p.equalities:
            row = [ZERO] * nv
            for i, ai in enumerate(a):
                row[xvar(j, i)] = ai
            a_eq.append(row)
            b_eq.append(b)
        if norm is Norm.LINF:
            for i in range(d):
                for sign in (1, -1):
                    row = [ZERO] * nv
                    row[uvar(i)] = Fraction(sign)
                    row[xvar(j, i)] = Fraction(-sign)
                    row[s_at] = ONE
                    a_ub.append(row)
                    b_ub.append(eps)
        else:
            for i in range(d):
                for sign in (1, -1):
                    row = [ZERO] * nv
                    row[uvar(i)] = Fraction(sign)
                    row[xvar(j, i)] = Fraction(-sign)
                    row[tvar(j, i)] = Fraction(-1)
                    a_ub.append(row)
                    b_ub.append(ZERO)
            row = [ZERO] * nv
            for i in range(d):
                row[tvar(j, i)] = ONE
            row[s_at] = ONE
            a_ub.append(row)
            b_ub.append(eps)

    c = [ZERO] * nv
    c[s_at] = ONE
    nonneg = [False] * nv
    for j in range(m):
        for i in range(d):
            if norm is Norm.L1:
                nonneg[tvar(j, i)] = True
    res = lp_solve(
        LPProblem(
            c=tuple(c),
            a_ub=tuple(tuple(r) for r in a_ub),
            b_ub=tuple(b_ub),
            a_eq=tuple(tuple(r) for r in a_eq),
            b_eq=tuple(b_eq),
            maximize=True,
            nonneg=tuple(nonneg),
        )
    )
    if res.status == INFEASIBLE:
        raise ValueError("thickened intersection with an empty member")
    assert res.is_optimal, "slack LP cannot be unbounded (s <= eps)"
    return res.value > 0


def relative_interior_point(p: Polyhedron, cap=ONE):
    """Point with maximal common slack over the inequalities (capped).

    Returns (point, slack).  slack > 0 iff p is full-dimensional relative to
    its equality hull; returns None when p is empty.
    """
    nv = p.dim + 1
    a_ub = []
    b_ub = []
    for a, b in p.inequalities:
        a_ub.append(tuple(a) + (ONE,))
        b_ub.append(b)
    a_ub.append((ZERO,) * p.dim + (ONE,))
    b_ub.append(Fraction(cap))
    a_ub.append((ZERO,) * p.dim + (Fraction(-1),))
    b_ub.append(ZERO)
    c = (ZERO,) * p.dim + (ONE,)
    res = lp_solve(
        LPProblem(
            c=c,
            a_ub=tuple(a_ub),
            b_ub=tuple(b_ub),
            a_eq=tuple(tuple(a) + (ZERO,) for a, _ in p.equalities),
            b_eq=tuple(b for _, b in p.equalities),
            maximize=True,
        )
    )
    if res.status == INFEASIBLE:
        return None
    assert res.is_optimal
    return tuple(res.x[: p.dim]), res.value


def contains_polyhedron(outer: Polyhedron, inner: Polyhedron) -> bool:
    """Exact containment inner <= outer via support-value LPs."""
    if outer.dim != inner.dim:
        raise ValueError("dimension mismatch")
    if inner.is_empty():
        return True
    for a, b in outer.inequalities:
        res = linear_optimize(inner, a, maximize=True)
        if res.status == UNBOUNDED or res.value > b:
            return False
    for a, b in outer.equalities:
        for maximize in (True, False):
            res = linear_optimize(inner, a, maximize=maximize)
            if res.status == UNBOUNDED or res.value != b:
                return False
    return True


def box(dim: int, lo, hi) -> Polyhedron:
    lo, hi = Fraction(lo), Fraction(hi)
    ineqs = []
    for i in range(dim):
        a = [ZERO] * dim
        a[i] = ONE
        ineqs.append((tuple(a), hi))
        a = [ZERO] * dim
        a[i] = Fraction(-1)
        ineqs.append((tuple(a), -lo))
    return Polyhedron(dim, tuple(ineqs))
