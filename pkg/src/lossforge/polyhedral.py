"""Piecewise-linear convex surrogate losses.

A PolyhedralLoss maps u in R^d to one loss value per outcome, each the max
of finitely many affine pieces.  The central operation is exact expected-loss
minimization: besides the optimal value it recovers the full argmin face as
a polyhedron, from the set of pieces that are tight on the whole face.

Tight pieces are found without per-constraint LPs: iteratively maximize the
sum of (capped) piece slacks over the optimal face; pieces that achieve
positive slack are discarded from the candidate set, and at the fixpoint the
remaining candidates have zero slack at *every* optimal point.  One risk LP
plus two or three slack LPs per distribution, in practice.

The family of argmin faces over all distributions is finite; it is
enumerated by scanning simplex grids on every outcome support and
deduplicating faces by their (support, tight-piece) signature.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .discrete import Distribution, OutcomeSpace, positive_compositions
from .geometry import Polyhedron
from .lp import LPProblem, UNBOUNDED, lp_solve

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class AffinePiece:
    """u -> a.u + b"""

    a: tuple
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(Fraction(v) for v in self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    def __call__(self, u):
        return sum((ai * ui for ai, ui in zip(self.a, u)), self.b)


@dataclass(frozen=True)
class PolyhedralLoss:
    """L(u)_y = max over the outcome's pieces of a.u + b."""

    space: OutcomeSpace
    d: int
    pieces: tuple  # per outcome, a nonempty tuple of AffinePiece

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("report dimension must be >= 1")
        rows = []
        for per_outcome in self.pieces:
            per_outcome = tuple(
                p if isinstance(p, AffinePiece) else AffinePiece(*p) for p in per_outcome
            )
            if not per_outcome:
                raise ValueError("every outcome needs at least one piece")
            for p in per_outcome:
                if len(p.a) != self.d:
                    raise ValueError("piece dimension mismatch")
            rows.append(per_outcome)
        if len(rows) != self.space.n:
            raise ValueError("one piece list per outcome required")
        object.__setattr__(self, "pieces", tuple(rows))


def eval_loss(loss: PolyhedralLoss, u) -> tuple:
    u = tuple(Fraction(v) for v in u)
    if len(u) != loss.d:
        raise ValueError("report dimension mismatch")
    return tuple(max(p(u) for p in per_outcome) for per_outcome in loss.pieces)


@dataclass(frozen=True)
class MinimizeResult:
    value: Fraction
    point: tuple  # one optimal u (relative-interior-biased, deterministic)
    argmin: Polyhedron
    signature: tuple  # (support frozenset, frozenset of tight (y, i) pairs)


def _risk_lp(loss: PolyhedralLoss, dist: Distribution):
    """min_u <p, L(u)> via the epigraph LP; returns (value, point)."""
    d = loss.d
    supp = sorted(dist.support)
    t_of = {y: d + k for k, y in enumerate(supp)}
    nv = d + len(supp)
    a_ub, b_ub = [], []
    for y in supp:
        for piece in loss.pieces[y]:
            row = [ZERO] * nv
            row[: d] = list(piece.a)
            row[t_of[y]] = Fraction(-1)
            a_ub.append(tuple(row))
            b_ub.append(-piece.b)
    c = [ZERO] * nv
    for y in supp:
        c[t_of[y]] = dist.p[y]
    res = lp_solve(LPProblem(c=tuple(c), a_ub=tuple(a_ub), b_ub=tuple(b_ub)))
    if res.status == UNBOUNDED:
        raise ValueError("expected loss is unbounded below (malformed loss)")
    assert res.is_optimal
    return res.value, tuple(res.x[:d])


def _tight_pieces(loss: PolyhedralLoss, dist: Distribution, value: Fraction):
    """Pieces tight on the whole argmin face, plus a point of the face.

    Iterative slack maximization subject to <p, t> = value: any piece whose
    slack comes out positive is slack somewhere on the face; at the fixpoint
    the remaining pieces have zero slack at every optimal point.
    """
    d = loss.d
    supp = sorted(dist.support)
    candidates = [(y, i) for y in supp for i in range(len(loss.pieces[y]))]
    not_tight: set = set()
    point = None
    while True:
        objset = [k for k in candidates if k not in not_tight]
        t_of = {y: d + j for j, y in enumerate(supp)}
        s_of = {k: d + len(supp) + j for j, k in enumerate(objset)}
        nv = d + len(supp) + len(objset)
        a_ub, b_ub = [], []
        for y, i in candidates:
            piece = loss.pieces[y][i]
            row = [ZERO] * nv
            row[: d] = list(piece.a)
            row[t_of[y]] = Fraction(-1)
            if (y, i) in s_of:
                row[s_of[(y, i)]] = ONE
                cap = [ZERO] * nv
                cap[s_of[(y, i)]] = ONE
                a_ub.append(tuple(cap))
                b_ub.append(ONE)
            a_ub.append(tuple(row))
            b_ub.append(-piece.b)
        eq = [ZERO] * nv
        for y in supp:
            eq[t_of[y]] = dist.p[y]
        c = [ZERO] * nv
        for k in objset:
            c[s_of[k]] = ONE
        nonneg = [False] * (d + len(supp)) + [True] * len(objset)
        res = lp_solve(
            LPProblem(
                c=tuple(c),
                a_ub=tuple(a_ub),
                b_ub=tuple(b_ub),
                a_eq=(tuple(eq),),
                b_eq=(value,),
                maximize=True,
                nonneg=tuple(nonneg),
            )
        )
        assert res.is_optimal, "slack LP must be feasible and bounded"
        point = tuple(res.x[:d])
        newly = {k for k in objset if res.x[s_of[k]] > 0}
        if not newly:
            break
        not_tight |= newly
    tight = frozenset(k for k in candidates if k not in not_tight)
    for y in supp:
        assert any(ty == y for ty, _ in tight), "some piece must be tight per outcome"
    return tight, point


def _face_polyhedron(loss: PolyhedralLoss, dist: Distribution, value, tight) -> Polyhedron:
    d = loss.d
    supp = sorted(dist.support)
    rep = {y: min(i for ty, i in tight if ty == y) for y in supp}
    eqs = []
    ineqs = []
    for y in supp:
        base = loss.pieces[y][rep[y]]
        for i, piece in enumerate(loss.pieces[y]):
            if i == rep[y]:
                continue
            a = tuple(pa - ba for pa, ba in zip(piece.a, base.a))
            b = base.b - piece.b
            if (y, i) in tight:
                if any(a) or b != 0:
                    eqs.append((a, b))
            else:
                ineqs.append((a, b))
    a_val = [ZERO] * d
    b_val = value
    for y in supp:
        base = loss.pieces[y][rep[y]]
        for j in range(d):
            a_val[j] += dist.p[y] * base.a[j]
        b_val -= dist.p[y] * base.b
    if any(a_val) or b_val != 0:
        eqs.append((tuple(a_val), b_val))
    return Polyhedron(d, tuple(ineqs), tuple(eqs))


def minimize_expected(loss: PolyhedralLoss, dist: Distribution) -> MinimizeResult:
    """Exact risk and full argmin face for one distribution."""
    value, _ = _risk_lp(loss, dist)
    tight, point = _tight_pieces(loss, dist, value)
    face = _face_polyhedron(loss, dist, value, tight)
    signature = (frozenset(dist.support), tight)
    return MinimizeResult(value, point, face, signature)


def surrogate_bayes_risk(loss: PolyhedralLoss, dist: Distribution) -> Fraction:
    return _risk_lp(loss, dist)[0]


@dataclass(frozen=True)
class OptimalSet:
    polyhedron: Polyhedron
    witness: Distribution
    signature: tuple  # first (support, tight-piece) pattern that produced it
    signatures: frozenset = frozenset()  # all patterns mapped to this set
    point: tuple = ()  # a point of the set (from the witness solve)


@dataclass(frozen=True)
class OptimalSetFamily:
    loss: PolyhedralLoss
    members: tuple

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _support_distributions(space: OutcomeSpace, m: int):
    """Grid distributions grouped by exact support, all supports, lex order."""
    n = space.n
    for size in range(1, n + 1):
        if size > m:
            break
        for support in itertools.combinations(range(n), size):
            for comp in positive_compositions(m, size):
                p = [ZERO] * n
                for y, c in zip(support, comp):
                    p[y] = Fraction(c, m)
                yield Distribution(space, tuple(p))


def scan_optimal_sets(loss: PolyhedralLoss, m: int):
    """(family, per-distribution results) for the denominator-m grid scan.

    Faces are deduplicated first by (support, tight-piece) signature and then
    semantically: the same set reached from different supports (equality
    decided by mutual containment, after point-membership prefilters) is one
    member carrying all its signatures.
    """
    from .geometry import contains_polyhedron

    if m < 1:
        raise ValueError("grid denominator must be >= 1")
    members = []  # [poly, witness, first_sig, sig set, point]
    seen = {}
    results = {}
    for dist in _support_distributions(loss.space, m):
        res = minimize_expected(loss, dist)
        results[dist.p] = res
        if res.signature in seen:
            continue
        hit = None
        for idx, (poly, _, _, _, point) in enumerate(members):
            if not poly.contains(res.point) or not res.argmin.contains(point):
                continue
            if contains_polyhedron(poly, res.argmin) and contains_polyhedron(res.argmin, poly):
                hit = idx
                break
        if hit is None:
            seen[res.signature] = len(members)
            members.append([res.argmin, dist, res.signature, {res.signature}, res.point])
        else:
            seen[res.signature] = hit
            members[hit][3].add(res.signature)
    frozen = tuple(
        OptimalSet(poly, wit, sig, frozenset(sigs), point)
        for poly, wit, sig, sigs, point in members
    )
    return OptimalSetFamily(loss, frozen), results


def enumerate_optimal_sets(loss: PolyhedralLoss, m: int) -> OptimalSetFamily:
    """The finite family of argmin faces witnessed on the denominator-m grid,
    deduplicated by (support, tight-piece) signature, one witness each."""
    return scan_optimal_sets(loss, m)[0]


def check_diagram_invariance(
    loss: PolyhedralLoss, p: Distribution, q: Distribution, u_box=(-2, 2), u_den=4
) -> bool:
    """Compare the subdivision of u-space induced by the two expected losses.

    The creases (grid points and axis directions where three-point
    collinearity of the expected loss fails) must coincide for any two
    strictly positive distributions; a boundary distribution may lose
    creases.  Exact arithmetic throughout.
    """
    if not p.is_interior() or not q.is_interior():
        raise ValueError("diagram invariance requires interior distributions")
    if p.space is not loss.space and p.space != loss.space:
        raise ValueError("distribution space mismatch")
    lo, hi = Fraction(u_box[0]), Fraction(u_box[1])
    steps = int((hi - lo) * u_den)
    axes = [[lo + Fraction(k, u_den) for k in range(steps + 1)] for _ in range(loss.d)]

    def creases(dist):
        vals = {}

        def f(u):
            if u not in vals:
                lv = eval_loss(loss, u)
                vals[u] = sum((pv * v for pv, v in zip(dist.p, lv)), ZERO)
            return vals[u]

        out = set()
        h = Fraction(1, u_den)
        for u in itertools.product(*axes):
            for i in range(loss.d):
                if u[i] - h < lo or u[i] + h > hi:
                    continue
                up = u[:i] + (u[i] + h,) + u[i + 1 :]
                dn = u[:i] + (u[i] - h,) + u[i + 1 :]
                if f(up) + f(dn) != 2 * f(u):
                    out.add((u, i))
        return out

    return creases(p) == creases(q)
