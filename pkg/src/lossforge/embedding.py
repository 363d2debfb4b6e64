"""Both directions of the surrogate/discrete equivalence.

conjugate_surrogate builds, for any non-redundant discrete loss, a
polyhedral surrogate that embeds it: the support function
C(u) = max over level-set vertices q of <q, u + loss(r)> is materialized
piece by piece and L(u) = C(u) 1 - u.  The embedding points are
phi(r) = -loss(r), which make C vanish there; the identity
L(phi(r)) = loss(r) is checked exactly at construction.

extract_embedded_loss goes the other way: scan the optimal-set family of a
polyhedral loss, keep the argmin faces witnessed at grid points interior to
a full-dimensional linearity cell of the Bayes risk (detected by exact
three-point collinearity), read the loss value off one point of each face,
and deduplicate.  A restriction certificate (extracted risk equals surrogate
risk at every grid point) guards against too-coarse grids.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .discrete import (
    DiscreteLoss,
    OutcomeSpace,
    discrete_bayes_risk,
    level_set_polyhedron,
    simplex_grid,
)
from .geometry import contains_polyhedron, enumerate_vertices, is_bounded, relative_interior_point
from .polyhedral import AffinePiece, PolyhedralLoss, eval_loss, scan_optimal_sets, surrogate_bayes_risk

ZERO = Fraction(0)
ONE = Fraction(1)


class GridTooCoarseError(RuntimeError):
    """Extraction grid missed a linearity cell; retry with a larger denominator."""


@dataclass(frozen=True)
class Embedding:
    """Injective map report -> point in R^d."""

    points: tuple  # of (report, coordinate tuple)

    def __post_init__(self):
        pts = tuple((str(r), tuple(Fraction(v) for v in u)) for r, u in self.points)
        if len({u for _, u in pts}) != len(pts):
            raise ValueError("embedding must be injective")
        object.__setattr__(self, "points", pts)

    def __getitem__(self, report) -> tuple:
        for r, u in self.points:
            if r == str(report):
                return u
        raise ValueError("no embedding point for report %r" % (report,))

    @property
    def reports(self) -> tuple:
        return tuple(r for r, _ in self.points)


@dataclass(frozen=True)
class EmbeddingReport:
    loss_match: tuple  # of (report, bool)
    optimality_failures: tuple  # of (report, p-tuple) where the iff broke
    bayes_gap: Fraction

    @property
    def verified(self) -> bool:
        return (
            all(ok for _, ok in self.loss_match)
            and not self.optimality_failures
            and self.bayes_gap == 0
        )


def conjugate_surrogate(loss: DiscreteLoss):
    """Polyhedral surrogate (d = n) embedding `loss`, plus the embedding.

    Raises ValueError when some report's level set is not full-dimensional
    (redundant loss).
    """
    n = loss.space.n
    c_pieces = set()
    for report in loss.reports:
        cell = level_set_polyhedron(loss, report)
        rel = relative_interior_point(cell)
        if rel is None or rel[1] <= 0:
            raise ValueError(
                "redundant loss: level set of report %r is not full-dimensional" % (report,)
            )
        row = loss.row(report)
        for q in enumerate_vertices(cell):
            offset = sum((qi * li for qi, li in zip(q, row)), ZERO)
            c_pieces.add((q, offset))
    c_pieces = sorted(c_pieces)

    per_outcome = []
    for y in range(n):
        pieces = []
        for q, offset in c_pieces:
            a = list(q)
            a[y] -= 1
            pieces.append(AffinePiece(tuple(a), offset))
        per_outcome.append(tuple(pieces))
    surrogate = PolyhedralLoss(loss.space, n, tuple(per_outcome))

    emb = Embedding(tuple((r, tuple(-v for v in loss.row(r))) for r in loss.reports))
    for report in loss.reports:
        got = eval_loss(surrogate, emb[report])
        if got != loss.row(report):
            raise AssertionError("conjugate construction failed at report %r" % (report,))
    return surrogate, emb


def bayes_risk_gap(surrogate: PolyhedralLoss, loss: DiscreteLoss, m: int) -> Fraction:
    """max over the denominator-m grid of |risk_L(p) - risk_l(p)|; 0 certifies
    the embedding on the grid."""
    gap = ZERO
    for dist in simplex_grid(loss.space, m):
        rl = surrogate_bayes_risk(surrogate, dist)
        rd, _ = discrete_bayes_risk(loss, dist)
        gap = max(gap, abs(rl - rd))
    return gap


def verify_embedding(
    surrogate: PolyhedralLoss, loss: DiscreteLoss, emb: Embedding, m: int
) -> EmbeddingReport:
    """Check both embedding conditions exactly on the denominator-m grid.

    (i) loss values match at embedding points; (ii) for each grid p and
    report r: r is discretely optimal iff phi(r) attains the surrogate risk.
    """
    loss_match = tuple(
        (r, eval_loss(surrogate, emb[r]) == loss.row(r)) for r in loss.reports
    )
    failures = []
    gap = ZERO
    emb_values = {r: None for r in loss.reports}
    for dist in simplex_grid(loss.space, m):
        risk_l = surrogate_bayes_risk(surrogate, dist)
        risk_d, argmin = discrete_bayes_risk(loss, dist)
        gap = max(gap, abs(risk_l - risk_d))
        for r in loss.reports:
            lv = eval_loss(surrogate, emb[r])
            emb_values[r] = lv
            surrogate_opt = sum((pv * v for pv, v in zip(dist.p, lv)), ZERO) == risk_l
            if surrogate_opt != (r in argmin):
                failures.append((r, dist.p))
    return EmbeddingReport(loss_match, tuple(failures), gap)


def _interior_grid_points(space: OutcomeSpace, m: int, risk_of):
    """Full-support grid compositions where the risk is locally linear in
    every in-simplex direction (e_i - e_j)/m; exact three-point test."""
    out = []
    n = space.n
    for dist in simplex_grid(space, m):
        comp = tuple(int(v * m) for v in dist.p)
        if any(c == 0 for c in comp):
            continue
        interior = True
        for i in range(n):
            for j in range(i + 1, n):
                up = list(comp)
                up[i] += 1
                up[j] -= 1
                dn = list(comp)
                dn[i] -= 1
                dn[j] += 1
                if risk_of(tuple(up)) + risk_of(tuple(dn)) != 2 * risk_of(comp):
                    interior = False
                    break
            if not interior:
                break
        if interior:
            out.append(comp)
    return out


def extract_embedded_loss(surrogate: PolyhedralLoss, m: int):
    """Discrete loss embedded by a polyhedral surrogate, with its embedding.

    Returns (DiscreteLoss, Embedding); reports are named r00, r01, ... in
    lexicographic order of their loss vectors.
    """
    family, results = scan_optimal_sets(surrogate, m)
    space = surrogate.space

    def risk_of(comp):
        p = tuple(Fraction(c, m) for c in comp)
        return results[p].value

    interior = _interior_grid_points(space, m, risk_of)
    qualifying = {results[tuple(Fraction(c, m) for c in comp)].signature for comp in interior}

    cells = []
    for member in family:
        if not (member.signatures & qualifying):
            continue
        u_face = member.polyhedron
        if is_bounded(u_face):
            verts = enumerate_vertices(u_face)
            point = min(verts) if verts else results[member.witness.p].point
        else:
            point = results[member.witness.p].point
        vector = eval_loss(surrogate, point)
        cells.append((vector, point))

    dedup = {}
    for vector, point in cells:
        dedup.setdefault(vector, point)
    if not dedup:
        raise GridTooCoarseError("no interior cell witnesses at denominator %d" % m)

    ordered = sorted(dedup.items())
    width = max(2, len(str(len(ordered) - 1)))
    reports = tuple("r%0*d" % (width, i) for i in range(len(ordered)))
    matrix = tuple(vec for vec, _ in ordered)
    extracted = DiscreteLoss(space, reports, matrix)
    emb = Embedding(tuple((r, pt) for r, (_, pt) in zip(reports, ordered)))

    # Restriction certificate: the extracted reports must realize the
    # surrogate risk at every scanned grid point.
    for p, res in results.items():
        best = min(
            sum((pv * lv for pv, lv in zip(p, row)), ZERO) for row in matrix
        )
        if best != res.value:
            raise GridTooCoarseError(
                "extracted loss misses the surrogate risk at p=%s; increase m" % (p,)
            )
    return extracted, emb


def extraction_certificate(surrogate: PolyhedralLoss, m: int):
    """Extract at m and 2m and require identical loss tables (grid doubling)."""
    loss_a, emb_a = extract_embedded_loss(surrogate, m)
    loss_b, _ = extract_embedded_loss(surrogate, 2 * m)
    stable = loss_a.matrix == loss_b.matrix
    return loss_a, emb_a, stable


def trim_property(cells):
    """Drop every cell strictly contained in another (containment by LP).

    Accepts and returns a sequence of (key, Polyhedron) pairs.
    """
    items = list(cells)
    keep = []
    for i, (key, cell) in enumerate(items):
        dominated = False
        for j, (_, other) in enumerate(items):
            if i == j:
                continue
            if contains_polyhedron(other, cell) and not contains_polyhedron(cell, other):
                dominated = True
                break
        if not dominated:
            keep.append((key, cell))
    return tuple(keep)


def loss_equal_up_to_relabeling(a: DiscreteLoss, b: DiscreteLoss) -> bool:
    """Same outcome space and the same multiset of loss rows."""
    if a.space.labels != b.space.labels:
        return False
    return sorted(a.matrix) == sorted(b.matrix)
