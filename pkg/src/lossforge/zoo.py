"""Concrete loss families: 0-1/hinge, abstain, Lovasz hinge, top-k.

Conventions fixed here (all deterministic):

* Binary-prediction settings index coordinates 1..k.  Outcomes are sign
  patterns; the label of S <= {1..k} is a string over {+,-} with '+' at
  coordinate i iff i is in S, ordered by subset bitmask ascending
  (so k=2 gives --, +-, -+, ++).  Restricted reports (A, B) with A and B
  disjoint use {+,0,-}: '+' on A, '0' on B, '-' elsewhere; this is exactly
  the lattice point chi_A + 1_B.
* The abstain code B maps label i (1-based) to the binary digits of i-1,
  most significant first, 0 -> -1.
* sgn breaks ties to +1 unless asked otherwise.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, lcm, log2

import numpy as np

from .discrete import DiscreteLoss, Distribution, OutcomeSpace, discrete_bayes_risk
from .embedding import Embedding
from .geometry import contains_polyhedron, relative_interior_point
from .polyhedral import AffinePiece, PolyhedralLoss, eval_loss, minimize_expected
from .discrete import FiniteProperty

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# classification basics


def zero_one(n: int) -> DiscreteLoss:
    """0-1 loss; binary case uses labels +1/-1 to match the hinge."""
    if n < 2:
        raise ValueError("need n >= 2")
    labels = ("+1", "-1") if n == 2 else tuple(str(i) for i in range(1, n + 1))
    space = OutcomeSpace(labels)
    rows = tuple(
        tuple(ZERO if i == j else ONE for j in range(n)) for i in range(n)
    )
    return DiscreteLoss(space, labels, rows)


def hinge() -> PolyhedralLoss:
    """(1 - yu)_+ over outcomes (+1, -1), d = 1."""
    space = OutcomeSpace(("+1", "-1"))
    return PolyhedralLoss(
        space,
        1,
        (
            (AffinePiece((Fraction(-1),), ONE), AffinePiece((ZERO,), ZERO)),
            (AffinePiece((ONE,), ONE), AffinePiece((ZERO,), ZERO)),
        ),
    )


def hinge_embedding() -> Embedding:
    return Embedding((("+1", (ONE,)), ("-1", (Fraction(-1),))))


def abstain_loss(n: int, alpha) -> DiscreteLoss:
    """Classification with a reject option costing alpha regardless of outcome."""
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    if n < 2:
        raise ValueError("need n >= 2")
    labels = tuple(str(i) for i in range(1, n + 1))
    space = OutcomeSpace(labels)
    reports = labels + ("abstain",)
    rows = [tuple(ZERO if i == j else ONE for j in range(n)) for i in range(n)]
    rows.append((alpha,) * n)
    return DiscreteLoss(space, reports, tuple(rows))


# ---------------------------------------------------------------------------
# abstain surrogate and links


def abstain_code(n: int) -> tuple:
    """Label i -> point in {-1,+1}^d, d = ceil(log2 n)."""
    d = max(1, ceil(log2(n)))
    codes = []
    for i in range(n):
        bits = format(i, "0%db" % d)
        codes.append(tuple(ONE if b == "1" else Fraction(-1) for b in bits))
    return tuple(codes)


def abstain_surrogate(n: int) -> PolyhedralLoss:
    """Per outcome y: max over coordinates of B(y)_j u_j + 1, clipped at 0."""
    if n < 2:
        raise ValueError("need n >= 2")
    codes = abstain_code(n)
    d = len(codes[0])
    space = OutcomeSpace(tuple(str(i) for i in range(1, n + 1)))
    per_outcome = []
    for code in codes:
        pieces = []
        for j in range(d):
            a = [ZERO] * d
            a[j] = code[j]
            pieces.append(AffinePiece(tuple(a), ONE))
        pieces.append(AffinePiece((ZERO,) * d, ZERO))
        per_outcome.append(tuple(pieces))
    return PolyhedralLoss(space, d, tuple(per_outcome))


def abstain_embedding(n: int) -> Embedding:
    """phi(y) = -B(y), phi(abstain) = 0; the sign makes the surrogate vanish."""
    codes = abstain_code(n)
    pts = [(str(i + 1), tuple(-v for v in codes[i])) for i in range(n)]
    pts.append(("abstain", (ZERO,) * len(codes[0])))
    return Embedding(tuple(pts))


def _decode(codes, pattern):
    for i, code in enumerate(codes):
        if code == pattern:
            return str(i + 1)
    raise ValueError("no label with code %s" % (pattern,))


def abstain_link_linf(n: int):
    """Link: abstain when min_i |u_i| <= 1/2, else decode sgn(-u)."""
    codes = abstain_code(n)
    half = Fraction(1, 2)

    def link(u):
        u = [Fraction(v) for v in u]
        if min(abs(v) for v in u) <= half:
            return "abstain"
        pattern = tuple(ONE if v <= 0 else Fraction(-1) for v in u)  # sgn(-u), ties +
        return _decode(codes, pattern)

    return link


def abstain_link_l1(n: int):
    """Link: abstain when ||u||_1 <= 1, else decode sgn(-u) (ties to +1)."""
    codes = abstain_code(n)

    def link(u):
        u = [Fraction(v) for v in u]
        if sum(abs(v) for v in u) <= 1:
            return "abstain"
        pattern = tuple(ONE if v <= 0 else Fraction(-1) for v in u)
        return _decode(codes, pattern)

    return link


# ---------------------------------------------------------------------------
# set functions and the Lovasz hinge


@dataclass(frozen=True)
class SetFunction:
    """Complete table of a set function on {1..k}, normalized (f(empty)=0)."""

    k: int
    values: tuple  # 2^k Fractions indexed by subset bitmask

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if len(vals) != 2**self.k:
            raise ValueError("need a complete table of 2^k values")
        if vals[0] != 0:
            raise ValueError("set function must be normalized: f(empty set) = 0")
        object.__setattr__(self, "values", vals)

    def __call__(self, mask: int) -> Fraction:
        return self.values[mask]

    @property
    def full(self) -> int:
        return 2**self.k - 1


def cardinality(k: int) -> SetFunction:
    return SetFunction(k, tuple(Fraction(bin(m).count("1")) for m in range(2**k)))


def is_submodular(f: SetFunction) -> bool:
    """f(S+i) + f(S+j) >= f(S+i+j) + f(S) for all S and i < j outside S."""
    for s in range(2**f.k):
        for i in range(f.k):
            if s >> i & 1:
                continue
            for j in range(i + 1, f.k):
                if s >> j & 1:
                    continue
                if f(s | 1 << i) + f(s | 1 << j) < f(s | 1 << i | 1 << j) + f(s):
                    return False
    return True


def is_increasing(f: SetFunction) -> bool:
    for s in range(2**f.k):
        for i in range(f.k):
            if not s >> i & 1 and f(s | 1 << i) < f(s):
                return False
    return True


def is_modular(f: SetFunction) -> bool:
    singles = [f(1 << i) for i in range(f.k)]
    for s in range(2**f.k):
        if f(s) != sum((singles[i] for i in range(f.k) if s >> i & 1), ZERO):
            return False
    return True


def lovasz_extension(f: SetFunction, w) -> Fraction:
    """Sort-based evaluation: sum over the descending order of w of
    w_i * (f(prefix+i) - f(prefix)).  Recovers f on indicator vectors and is
    linear for modular f."""
    w = [Fraction(v) for v in w]
    if len(w) != f.k:
        raise ValueError("dimension mismatch")
    order = sorted(range(f.k), key=lambda i: (-w[i], i))
    total = ZERO
    mask = 0
    for i in order:
        prev = f(mask)
        mask |= 1 << i
        total += w[i] * (f(mask) - prev)
    return total


def cube_space(k: int) -> OutcomeSpace:
    """Outcomes = sign patterns of subsets of {1..k}, bitmask ascending."""
    return OutcomeSpace(tuple(sign_label(s, k) for s in range(2**k)))


def sign_label(mask: int, k: int) -> str:
    return "".join("+" if mask >> i & 1 else "-" for i in range(k))


def restricted_label(a_mask: int, b_mask: int, k: int) -> str:
    out = []
    for i in range(k):
        if a_mask >> i & 1:
            out.append("+")
        elif b_mask >> i & 1:
            out.append("0")
        else:
            out.append("-")
    return "".join(out)


def set_loss(f: SetFunction) -> DiscreteLoss:
    """Joint loss of k binary predictions: loss(A, S) = f(A symdiff S)."""
    k = f.k
    space = cube_space(k)
    labels = space.labels
    rows = tuple(
        tuple(f(a ^ s) for s in range(2**k)) for a in range(2**k)
    )
    return DiscreteLoss(space, labels, rows)


def hamming(k: int) -> DiscreteLoss:
    return set_loss(cardinality(k))


def _chi(mask: int, k: int) -> tuple:
    return tuple(ONE if mask >> i & 1 else Fraction(-1) for i in range(k))


def _hinge_value(f: SetFunction, u, s_mask: int) -> Fraction:
    """Direct evaluation F((1 - u o chi_S)_+), increasing case."""
    chi = _chi(s_mask, f.k)
    w = [max(ZERO, ONE - ui * ci) for ui, ci in zip(u, chi)]
    return lovasz_extension(f, w)


def _hinge_pieces(f: SetFunction, s_mask: int):
    """Affine pieces of u -> F((1 - u o chi_S)_+).

    One piece per (clip set Z, ordering pi of the rest): within the region
    where coordinates in Z clip to zero and the others are ordered by pi,
    the value is sum of (1 - u_i chi_i) * marginal f-gain, an affine map.
    All such pieces minorize the (convex) loss, and they cover it.
    """
    k = f.k
    chi = _chi(s_mask, k)
    pieces = set()
    for z_mask in range(2**k):
        rest = [i for i in range(k) if not z_mask >> i & 1]
        for pi in itertools.permutations(rest):
            a = [ZERO] * k
            b = ZERO
            mask = 0
            for i in pi:
                gain = f(mask | 1 << i) - f(mask)
                mask |= 1 << i
                a[i] = -chi[i] * gain
                b += gain
            pieces.add((tuple(a), b))
    return tuple(sorted(pieces))


def _validate_hinge_pieces(f, per_outcome, n_samples, seed=20240601):
    """max-of-pieces must equal direct evaluation on random dyadic points."""
    k = f.k
    rng = random.Random(seed)
    scale = lcm(8, *(v.denominator for v in f.values))
    us = [[Fraction(rng.randint(-16, 16), 8) for _ in range(k)] for _ in range(n_samples)]
    umat = np.array([[int(v * scale) for v in u] for u in us], dtype=np.int64).T
    for s_mask in range(2**k):
        pieces = per_outcome[s_mask]
        amat = np.array(
            [[int(p.a[i] * scale) for i in range(k)] for p in pieces], dtype=np.int64
        )
        bvec = np.array([int(p.b * scale * scale) for p in pieces], dtype=np.int64)
        vals = amat @ umat + bvec[:, None]  # scaled by scale^2
        best = vals.max(axis=0)
        for j, u in enumerate(us):
            direct = _hinge_value(f, u, s_mask)
            if Fraction(int(best[j]), scale * scale) != direct:
                raise ValueError(
                    "piece table disagrees with direct evaluation; "
                    "the Lovasz hinge is only piecewise-max representable "
                    "for submodular f"
                )


def lovasz_hinge(f: SetFunction, n_samples: int = 1000) -> PolyhedralLoss:
    """Polyhedral form of the Lovasz hinge for increasing, normalized,
    submodular f (the convex case); k <= 5.

    The piece table is validated against direct evaluation on random points
    at construction.
    """
    if f.k > 5:
        raise ValueError("piece materialization supported for k <= 5")
    if not is_increasing(f):
        raise ValueError("only increasing set functions are supported")
    if not is_submodular(f):
        raise ValueError("the Lovasz hinge is convex only for submodular f")
    space = cube_space(f.k)
    per_outcome = tuple(
        tuple(AffinePiece(a, b) for a, b in _hinge_pieces(f, s)) for s in range(2**f.k)
    )
    if n_samples:
        _validate_hinge_pieces(f, per_outcome, n_samples)
    return PolyhedralLoss(space, f.k, per_outcome)


def restricted_lovasz_loss(f: SetFunction, check: bool | None = None) -> DiscreteLoss:
    """Discrete loss on disjoint pairs (A, B):
    loss((A,B), S) = f(A symdiff S minus B) + f(A symdiff S union B).

    Equals the Lovasz hinge evaluated at chi_A + 1_B (asserted for small k).
    """
    k = f.k
    space = cube_space(k)
    reports = []
    rows = []
    pairs = []
    for a_mask in range(2**k):
        for b_mask in range(2**k):
            if a_mask & b_mask:
                continue
            pairs.append((a_mask, b_mask))
            reports.append(restricted_label(a_mask, b_mask, k))
            row = []
            for s in range(2**k):
                d = a_mask ^ s
                row.append(f(d & ~b_mask) + f(d | b_mask))
            rows.append(tuple(row))
    loss = DiscreteLoss(space, tuple(reports), tuple(rows))
    if check is None:
        check = k <= 3 and is_submodular(f) and is_increasing(f)
    if check:
        hinge_loss = lovasz_hinge(f, n_samples=0)
        for (a_mask, b_mask), row in zip(pairs, rows):
            u = [ZERO] * k
            for i in range(k):
                if a_mask >> i & 1:
                    u[i] = ONE
                elif b_mask >> i & 1:
                    u[i] = ZERO
                else:
                    u[i] = Fraction(-1)
            assert eval_loss(hinge_loss, tuple(u)) == row, "restricted table mismatch"
    return loss


def mean_value(f: SetFunction) -> Fraction:
    """Average of f over all subsets."""
    return sum(f.values, ZERO) / 2**f.k


def sign_link(zero_sign: int = 1):
    """Coordinate-wise sgn link into sign-pattern labels; sgn(0) = zero_sign."""
    if zero_sign not in (1, -1):
        raise ValueError("zero_sign must be +1 or -1")

    def link(u):
        out = []
        for v in u:
            v = Fraction(v)
            if v > 0 or (v == 0 and zero_sign > 0):
                out.append("+")
            else:
                out.append("-")
        return "".join(out)

    return link


@dataclass(frozen=True)
class InconsistencyWitness:
    dist: Distribution
    eps_star: Fraction
    floor_value: Fraction  # expected restricted loss of (empty, N)
    pure_reports_beaten: bool  # every (A, empty) strictly above the floor
    optimal_reports: tuple  # argmin of the restricted loss at p
    discrete_optimum: tuple  # argmin of the set loss at p
    surrogate_point: tuple  # embedded optimal point chi_A + 1_B
    surrogate_optimal: bool  # its expected hinge equals the LP risk
    linked_report: str  # sgn(surrogate_point) with ties to +1
    misreports: bool  # linked report is not discretely optimal

    @property
    def ok(self) -> bool:
        return (
            self.pure_reports_beaten
            and all("0" in r for r in self.optimal_reports)
            and self.surrogate_optimal
            and self.misreports
        )


def lovasz_inconsistency_witness(f: SetFunction) -> InconsistencyWitness:
    """Distribution at which the sgn-linked Lovasz hinge provably misreports.

    Requires f submodular, increasing, normalized, not modular, with
    f({i}) > 0 for all i.  The witness mixes the uniform distribution with a
    point mass on the all-minus outcome, with weight eps* = (2fbar - f(N)) /
    (4 fbar), which keeps every abstain-free report strictly above the
    constant report (empty, N) while the discrete optimum is all-minus.
    """
    if not is_submodular(f) or not is_increasing(f):
        raise ValueError("need a submodular increasing set function")
    if is_modular(f):
        raise ValueError("modular f: the sgn link is consistent, no witness exists")
    if any(f(1 << i) == 0 for i in range(f.k)):
        raise ValueError("need f({i}) > 0 for every coordinate")
    k = f.k
    fbar = mean_value(f)
    fn = f(f.full)
    eps = (2 * fbar - fn) / (4 * fbar)
    assert 0 < eps < 1
    space = cube_space(k)
    base = Fraction(1, 2**k)
    p = [(1 - eps) * base for _ in range(2**k)]
    p[0] += eps  # mask 0 = all-minus outcome
    dist = Distribution(space, tuple(p))

    restricted = restricted_lovasz_loss(f, check=False)
    floor = sum(
        (pv * lv for pv, lv in zip(dist.p, restricted.row(restricted_label(0, f.full, k)))),
        ZERO,
    )
    pure_beaten = True
    for a_mask in range(2**k):
        label = restricted_label(a_mask, 0, k)
        val = sum((pv * lv for pv, lv in zip(dist.p, restricted.row(label))), ZERO)
        if val <= floor:
            pure_beaten = False
    _, rest_argmin = discrete_bayes_risk(restricted, dist)
    discrete = set_loss(f)
    _, disc_argmin = discrete_bayes_risk(discrete, dist)

    chosen = rest_argmin[0]
    point = tuple(
        ONE if c == "+" else ZERO if c == "0" else Fraction(-1) for c in chosen
    )
    hinge_loss = lovasz_hinge(f, n_samples=0)
    res = minimize_expected(hinge_loss, dist)
    value_at_point = sum(
        (pv * lv for pv, lv in zip(dist.p, eval_loss(hinge_loss, point))), ZERO
    )
    linked = sign_link(1)(point)
    witness = InconsistencyWitness(
        dist=dist,
        eps_star=eps,
        floor_value=floor,
        pure_reports_beaten=pure_beaten,
        optimal_reports=rest_argmin,
        discrete_optimum=disc_argmin,
        surrogate_point=point,
        surrogate_optimal=value_at_point == res.value,
        linked_report=linked,
        misreports=linked not in disc_argmin,
    )
    if not witness.ok:
        raise RuntimeError("inconsistency demonstration failed exact verification")
    return witness


def lattice_points(k: int) -> tuple:
    """All of {-1, 0, 1}^k (the restricted report points chi_A + 1_B)."""
    return tuple(itertools.product((Fraction(-1), ZERO, ONE), repeat=k))


def lovasz_lattice_risk_oracle(hinge_loss: PolyhedralLoss):
    """Exact Bayes-risk evaluator for a Lovasz hinge via the lattice
    restriction: the argmin always meets {-1,0,1}^k, so the min over those
    3^k points is the global min.  Loss values at the lattice are cached
    once.  (The restriction property is certified separately against the LP
    on random instances.)"""
    values = [eval_loss(hinge_loss, u) for u in lattice_points(hinge_loss.d)]

    def risk(dist: Distribution) -> Fraction:
        return min(
            sum((pv * v for pv, v in zip(dist.p, lv)), ZERO) for lv in values
        )

    return risk


def lovasz_lattice_risk(hinge_loss: PolyhedralLoss, dist: Distribution) -> Fraction:
    return lovasz_lattice_risk_oracle(hinge_loss)(dist)


# ---------------------------------------------------------------------------
# top-k


def _subset_label(subset) -> str:
    return "{%s}" % ",".join(str(i) for i in subset)


def top_k_loss(n: int, k: int) -> DiscreteLoss:
    """Predict a k-subset; pay 1 unless the outcome is covered."""
    if not 1 < k < n:
        raise ValueError("need 1 < k < n")
    space = OutcomeSpace(tuple(str(i) for i in range(1, n + 1)))
    reports = []
    rows = []
    for subset in itertools.combinations(range(1, n + 1), k):
        reports.append(_subset_label(subset))
        rows.append(tuple(ZERO if y in subset else ONE for y in range(1, n + 1)))
    return DiscreteLoss(space, tuple(reports), tuple(rows))


def top_k_surrogate(n: int, k: int) -> PolyhedralLoss:
    """(1 - u_y + (1/k) * sum of the k largest entries of u - e_y)_+ as a
    max of C(n,k)+1 affine pieces per outcome."""
    if not 1 < k < n:
        raise ValueError("need 1 < k < n")
    space = OutcomeSpace(tuple(str(i) for i in range(1, n + 1)))
    inv_k = Fraction(1, k)
    per_outcome = []
    for y in range(n):
        pieces = [AffinePiece((ZERO,) * n, ZERO)]
        for subset in itertools.combinations(range(n), k):
            a = [ZERO] * n
            for i in subset:
                a[i] += inv_k
            a[y] -= 1
            b = ONE - (inv_k if y in subset else ZERO)
            pieces.append(AffinePiece(tuple(a), b))
        per_outcome.append(tuple(pieces))
    return PolyhedralLoss(space, n, tuple(per_outcome))


def top_k_link(k: int):
    """u -> set of the k largest coordinates, ties to the smallest index."""

    def link(u):
        order = sorted(range(len(u)), key=lambda i: (-Fraction(u[i]), i))
        return _subset_label(sorted(i + 1 for i in order[:k]))

    return link


def embedded_top2_loss() -> DiscreteLoss:
    """The discrete loss embedded by the top-2 surrogate at n=3: reports are
    all permutations of (1,0,0), (1,1,0), (2,1,0); value 0 when r_y = 2,
    else 1 - r_y + (1/2) <r, 1 - e_y>."""
    space = OutcomeSpace(("1", "2", "3"))
    reports = []
    rows = []
    half = Fraction(1, 2)
    for base in ((1, 0, 0), (1, 1, 0), (2, 1, 0)):
        for perm in sorted(set(itertools.permutations(base))):
            reports.append("".join(str(v) for v in perm))
            row = []
            for y in range(3):
                if perm[y] == 2:
                    row.append(ZERO)
                else:
                    row.append(ONE - perm[y] + half * sum(perm[j] for j in range(3) if j != y))
            rows.append(tuple(row))
    return DiscreteLoss(space, tuple(reports), tuple(rows))


def top2_embedding() -> Embedding:
    loss = embedded_top2_loss()
    return Embedding(
        tuple((r, tuple(Fraction(int(c)) for c in r)) for r in loss.reports)
    )


# ---------------------------------------------------------------------------
# property refinement


@dataclass(frozen=True)
class RefinementResult:
    refines: bool
    witness_report: str | None = None
    witness_p: tuple | None = None


def refinement_check(fine: FiniteProperty, coarse: FiniteProperty) -> RefinementResult:
    """Does every full-dimensional cell of `fine` sit inside some cell of
    `coarse`?  Failure returns the offending report and an interior
    distribution of its cell."""
    if fine.space.labels != coarse.space.labels:
        raise ValueError("outcome space mismatch")
    for report, cell in fine.cells:
        rel = relative_interior_point(cell)
        if rel is None or rel[1] <= 0:
            continue  # not full-dimensional
        if not any(contains_polyhedron(other, cell) for _, other in coarse.cells):
            return RefinementResult(False, report, rel[0])
    return RefinementResult(True)


# ---------------------------------------------------------------------------
# registry (CLI)

REGISTRY = (
    "zero-one",
    "hinge",
    "abstain",
    "abstain-surrogate",
    "lovasz-hinge",
    "top-k",
    "embedded-top2",
)
