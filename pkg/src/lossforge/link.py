"""Thickened link construction, epsilon validation, calibration audits.

A link maps surrogate reports u in R^d to discrete reports.  The
construction intersects the report sets R_U of every optimal set U whose
distance to u is strictly below epsilon; with a validated epsilon the
envelope is never empty.

Validation of epsilon is exact: for every subfamily of optimal sets with
empty intersection, the epsilon-thickened members must also have empty
intersection, decided by the common-slack LP.  Subfamilies of size up to
d+1 suffice by Helly's theorem; the full powerset is swept when the family
is small.

Calibration audits measure, per distribution p, the least excess expected
loss among grid points that link to a non-optimal report.  Grid evidence of
a positive gap is evidence at the stated resolution, while nonpositive gaps
come with a witness that is re-verified exactly, so reported violations are
proofs.  Scans run on an exact scaled-integer fast path (numpy) when value
bounds allow, with a pure-Fraction fallback.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .discrete import DiscreteLoss, Distribution, discrete_bayes_risk, simplex_grid
from .geometry import Norm, point_set_distance, sets_intersect, thickened_family_intersects
from .embedding import Embedding
from .polyhedral import MinimizeResult, OptimalSetFamily, PolyhedralLoss, eval_loss, minimize_expected, surrogate_bayes_risk

ZERO = Fraction(0)

FULL_SWEEP_LIMIT = 12
SUBFAMILY_SIZE_CAP = 4


def report_sets(family: OptimalSetFamily, emb: Embedding):
    """Per member, the reports whose embedding points lie in it (exact).

    Every member must catch at least one report; an empty set signals a
    family/extraction mismatch and raises.
    """
    out = []
    for k, member in enumerate(family):
        rs = tuple(r for r, u in emb.points if member.polyhedron.contains(u))
        if not rs:
            raise ValueError(
                "optimal set %d (witness p=%s) contains no embedding point" % (k, member.witness.p)
            )
        out.append(rs)
    return tuple(out)


def _empty_intersection_subfamilies(family: OptimalSetFamily):
    """Index tuples of subfamilies with empty intersection.

    All sizes are swept for small families; otherwise sizes up to
    min(d+1, cap), which is exact for d+1 <= cap by Helly's theorem.
    """
    n = len(family)
    if n <= FULL_SWEEP_LIMIT:
        max_size = n
    else:
        max_size = min(family.loss.d + 1, SUBFAMILY_SIZE_CAP)
    polys = [m.polyhedron for m in family.members]
    out = []
    for size in range(2, max_size + 1):
        for combo in itertools.combinations(range(n), size):
            if any(set(prev) <= set(combo) for prev in out):
                continue  # superset of an already-empty subfamily
            if not sets_intersect([polys[i] for i in combo]):
                out.append(combo)
    return tuple(out)


def max_valid_epsilon(family: OptimalSetFamily, emb: Embedding, norm: Norm, candidates):
    """Largest candidate epsilon under which thickening cannot merge report
    sets that should stay apart: for every subfamily with empty
    intersection, the thickened subfamily must have empty intersection too.
    """
    cands = sorted({Fraction(c) for c in candidates}, reverse=True)
    if not cands:
        raise ValueError("no candidate epsilons")
    report_sets(family, emb)  # raises early on a mismatched family
    empties = _empty_intersection_subfamilies(family)
    polys = [m.polyhedron for m in family.members]
    for eps in cands:
        if eps <= 0:
            continue
        ok = True
        for combo in empties:
            if thickened_family_intersects([polys[i] for i in combo], eps, norm):
                ok = False
                break
        if ok:
            return eps
    raise ValueError("no candidate epsilon validates; extend the ladder downward")


def checked_subfamilies(family: OptimalSetFamily):
    """The empty-intersection subfamilies a validation run checks (for
    certificates)."""
    return _empty_intersection_subfamilies(family)


@dataclass(frozen=True)
class LinkSpec:
    norm: Norm
    epsilon: Fraction
    family: OptimalSetFamily
    report_sets: tuple
    embedding: Embedding
    tie_break: tuple = ()  # report priority order; lexicographic fallback


class Link:
    """Evaluator u -> report for a validated epsilon-thickened link."""

    def __init__(self, spec: LinkSpec):
        self.spec = spec
        self._all_reports = tuple(spec.embedding.reports)
        self._filter_rows = [
            self._integer_rows(m.polyhedron) for m in spec.family.members
        ]

    def _integer_rows(self, poly):
        """Denominator-cleared constraint rows with their dual-norm scale;
        halfspace distance is scale-invariant, so these decide the prefilter
        in pure integer arithmetic."""
        dual_linf = self.spec.norm is Norm.L1  # dual of l1 is linf
        rows = []
        for a, b, two_sided in [(a, b, False) for a, b in poly.inequalities] + [
            (a, b, True) for a, b in poly.equalities
        ]:
            mult = lcm(*(v.denominator for v in a), b.denominator)
            ai = tuple(int(v * mult) for v in a)
            scale = max(abs(v) for v in ai) if dual_linf else sum(abs(v) for v in ai)
            if scale:
                rows.append((ai, int(b * mult), scale, two_sided))
        return rows

    def _far_from(self, rows, u_num, u_den, eps) -> bool:
        """True when some constraint halfspace already puts u at distance
        >= eps from the member (so the member cannot thicken onto u)."""
        en, ed = eps.numerator, eps.denominator
        for ai, bi, scale, two_sided in rows:
            viol = sum(c * un for c, un in zip(ai, u_num)) - bi * u_den
            if two_sided:
                viol = abs(viol)
            if viol > 0 and viol * ed >= en * scale * u_den:
                return True
        return False

    def envelope(self, u) -> frozenset:
        spec = self.spec
        u = tuple(Fraction(v) for v in u)
        u_den = lcm(*(v.denominator for v in u))
        u_num = tuple(int(v * u_den) for v in u)
        psi = None
        for member, rs, rows in zip(
            spec.family.members, spec.report_sets, self._filter_rows
        ):
            if psi is not None and psi <= set(rs):
                continue  # intersection cannot change
            if self._far_from(rows, u_num, u_den, spec.epsilon):
                continue
            d = point_set_distance(member.polyhedron, u, spec.norm)
            if d < spec.epsilon:
                psi = set(rs) if psi is None else psi & set(rs)
        if psi is None:
            return frozenset(self._all_reports)
        if not psi:
            raise RuntimeError(
                "empty link envelope at u=%s: epsilon was not validated" % (u,)
            )
        return frozenset(psi)

    def __call__(self, u) -> str:
        psi = self.envelope(u)
        for r in self.spec.tie_break:
            if r in psi:
                return r
        return min(psi)


def build_link(
    family: OptimalSetFamily,
    emb: Embedding,
    norm: Norm,
    epsilon,
    tie_break=(),
) -> Link:
    """Assemble the link evaluator; epsilon must already be validated via
    max_valid_epsilon (construction does not re-validate)."""
    spec = LinkSpec(
        norm=norm,
        epsilon=Fraction(epsilon),
        family=family,
        report_sets=report_sets(family, emb),
        embedding=emb,
        tie_break=tuple(str(r) for r in tie_break),
    )
    return Link(spec)


@dataclass(frozen=True)
class AuditEntry:
    p: tuple  # probability vector
    gap: Fraction | None  # min excess among off-target grid points
    witness: tuple | None  # u attaining the gap
    vacuous: bool  # no off-target grid point at this p
    violation: bool  # gap <= 0, witness re-verified exactly


@dataclass(frozen=True)
class CalibrationAudit:
    entries: tuple
    min_gap: Fraction | None
    violations: tuple

    @property
    def clean(self) -> bool:
        return not self.violations and (self.min_gap is None or self.min_gap > 0)


def u_grid(d: int, box, res) -> tuple:
    lo, hi = Fraction(box[0]), Fraction(box[1])
    res = Fraction(res)
    steps = int((hi - lo) / res)
    axis = [lo + k * res for k in range(steps + 1)]
    return tuple(itertools.product(*([axis] * d)))


def _scaled_ints(values):
    """(ints, scale): values == ints / scale exactly."""
    scale = 1
    for v in values:
        scale = lcm(scale, v.denominator)
    return [int(v * scale) for v in values], scale


def _loss_value_table(surrogate: PolyhedralLoss, grid):
    """Exact loss values at grid points, as (int matrix n_y x n_u, scale)."""
    n_y = surrogate.space.n
    vals = [[None] * len(grid) for _ in range(n_y)]
    for j, u in enumerate(grid):
        lv = eval_loss(surrogate, u)
        for y in range(n_y):
            vals[y][j] = lv[y]
    flat, scale = _scaled_ints([v for row in vals for v in row])
    n_u = len(grid)
    mat = [flat[y * n_u : (y + 1) * n_u] for y in range(n_y)]
    return mat, scale


def _verify_violation(surrogate, link, loss, dist, u) -> bool:
    """Re-check a candidate violation from scratch with exact arithmetic."""
    target = link(u)
    _, argmin = discrete_bayes_risk(loss, dist)
    if target in argmin:
        return False
    lv = eval_loss(surrogate, u)
    excess = sum((pv * v for pv, v in zip(dist.p, lv)), ZERO) - surrogate_bayes_risk(
        surrogate, dist
    )
    return excess <= 0


def calibration_audit(
    surrogate: PolyhedralLoss,
    link,
    loss: DiscreteLoss,
    dist: Distribution,
    u_box=(-2, 2),
    u_res=Fraction(1, 4),
) -> AuditEntry:
    """Audit one distribution; see calibration_scan.  The u-box should cover
    the embedding points inflated by twice the link's epsilon."""
    audit = calibration_scan(surrogate, link, loss, None, u_box, u_res, dists=[dist])
    return audit.entries[0]


def calibration_scan(
    surrogate: PolyhedralLoss,
    link,
    loss: DiscreteLoss,
    m: int | None,
    u_box=(-2, 2),
    u_res=Fraction(1, 4),
    dists=None,
    risk_oracle=None,
) -> CalibrationAudit:
    """Audit every denominator-m grid distribution (or the given dists).

    For each p: gap = min over grid u with link(u) not optimal of
    <p, L(u)> - risk_L(p).  Positive gaps are evidence at the grid
    resolution; nonpositive gaps are certified violations (witness
    re-verified exactly, always through the LP).

    risk_oracle optionally replaces the per-distribution risk LP with a
    cheaper exact evaluator (e.g. a finite minimizer set justified by a
    restriction lemma); violations are still re-verified via the LP.
    """
    if dists is None:
        dists = list(simplex_grid(loss.space, m))
    grid = u_grid(surrogate.d, u_box, u_res)
    n_u = len(grid)
    n_y = loss.space.n

    link_idx = []
    for u in grid:
        r = str(link(u))
        link_idx.append(loss.report_index(r))
    link_idx = np.array(link_idx, dtype=np.int64)

    lmat_ints, lscale = _loss_value_table(surrogate, grid)
    dmat_ints, dscale = _scaled_ints([v for row in loss.matrix for v in row])
    n_r = len(loss.reports)
    dmat = [dmat_ints[i * n_y : (i + 1) * n_y] for i in range(n_r)]

    p_ints = []
    pscale = 1
    for dist in dists:
        pscale = lcm(pscale, *(v.denominator for v in dist.p))
    for dist in dists:
        p_ints.append([int(v * pscale) for v in dist.p])

    max_l = max((abs(v) for row in lmat_ints for v in row), default=0)
    max_d = max((abs(v) for v in dmat_ints), default=0)
    bound = pscale * max(max_l, max_d) * n_y
    use_numpy = bound < 2**62

    if use_numpy:
        P = np.array(p_ints, dtype=np.int64)
        LM = np.array(lmat_ints, dtype=np.int64)  # n_y x n_u
        DM = np.array(dmat, dtype=np.int64).T  # n_y x n_r
        E = P @ LM  # n_p x n_u, scaled by pscale*lscale
        ED = P @ DM  # n_p x n_r, scaled by pscale*dscale
    entries = []
    violations = []
    min_gap = None
    for i, dist in enumerate(dists):
        if use_numpy:
            drow = ED[i]
            dbest = drow.min()
            opt = drow == dbest
            off = ~opt[link_idx]
            if not off.any():
                entries.append(AuditEntry(dist.p, None, None, True, False))
                continue
            erow = E[i]
            masked = np.where(off, erow, np.iinfo(np.int64).max)
            j = int(masked.argmin())
            min_expected = Fraction(int(masked[j]), pscale * lscale)
        else:
            _, argmin = discrete_bayes_risk(loss, dist)
            argmin = set(argmin)
            best = None
            j = None
            for jj, u in enumerate(grid):
                if loss.reports[link_idx[jj]] in argmin:
                    continue
                lv = eval_loss(surrogate, u)
                e = sum((pv * v for pv, v in zip(dist.p, lv)), ZERO)
                if best is None or e < best:
                    best, j = e, jj
            if best is None:
                entries.append(AuditEntry(dist.p, None, None, True, False))
                continue
            min_expected = best
        if risk_oracle is not None:
            risk = risk_oracle(dist)
        else:
            risk = surrogate_bayes_risk(surrogate, dist)
        gap = min_expected - risk
        witness = grid[j]
        violation = gap <= 0
        if violation:
            assert _verify_violation(surrogate, link, loss, dist, witness), (
                "violation witness failed exact re-verification"
            )
        entry = AuditEntry(dist.p, gap, witness, False, violation)
        entries.append(entry)
        if violation:
            violations.append(entry)
        if min_gap is None or gap < min_gap:
            min_gap = gap
    return CalibrationAudit(tuple(entries), min_gap, tuple(violations))


def separation_slope(
    surrogate: PolyhedralLoss, dist: Distribution, samples, norm: Norm = Norm.LINF
) -> Fraction:
    """min over samples off the argmin face of excess / distance; > 0 always
    (polyhedral separation).  Samples inside the face are skipped."""
    res: MinimizeResult = minimize_expected(surrogate, dist)
    c_hat = None
    for u in samples:
        d = point_set_distance(res.argmin, u, norm)
        if d == 0:
            continue
        lv = eval_loss(surrogate, u)
        excess = sum((pv * v for pv, v in zip(dist.p, lv)), ZERO) - res.value
        ratio = excess / d
        if c_hat is None or ratio < c_hat:
            c_hat = ratio
    if c_hat is None:
        raise ValueError("all samples lie in the argmin face")
    return c_hat
