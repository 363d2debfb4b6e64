"""Acceptance suite: one test per criterion, exact tolerances, fixed seeds.

Each test prints a single PASS line (run with -s or -v to see them); any
failure is a hard assert.  Runtime-limited criteria assert their budgets.
"""

import random
import time
from fractions import Fraction as F

from lossforge.discrete import (
    Distribution,
    discrete_bayes_risk,
    finite_property,
    simplex_grid,
)
from lossforge.embedding import (
    bayes_risk_gap,
    conjugate_surrogate,
    extract_embedded_loss,
    loss_equal_up_to_relabeling,
)
from lossforge.geometry import Norm, point_set_distance
from lossforge.link import (
    build_link,
    calibration_audit,
    calibration_scan,
    max_valid_epsilon,
    separation_slope,
)
from lossforge.lp import LPProblem, lp_solve
from lossforge.polyhedral import (
    check_diagram_invariance,
    enumerate_optimal_sets,
    eval_loss,
    minimize_expected,
    surrogate_bayes_risk,
)
from lossforge.zoo import (
    SetFunction,
    abstain_embedding,
    abstain_link_l1,
    abstain_link_linf,
    abstain_loss,
    abstain_surrogate,
    embedded_top2_loss,
    hinge,
    lovasz_hinge,
    lovasz_inconsistency_witness,
    lovasz_lattice_risk,
    lovasz_lattice_risk_oracle,
    is_modular,
    mean_value,
    refinement_check,
    restricted_label,
    restricted_lovasz_loss,
    set_loss,
    sign_link,
    top_k_loss,
    top_k_surrogate,
    zero_one,
)

from _gens import (
    random_distribution,
    random_interior_distribution,
    random_modular,
    random_nonmodular_submodular,
    random_polyhedral_loss,
    random_u,
)

ZERO, ONE = F(0), F(1)


def _instances():
    return [
        ("zero-one n=2", zero_one(2), 4),
        ("zero-one n=3", zero_one(3), 6),
        ("abstain n=3", abstain_loss(3, F(1, 2)), 8),
        ("abstain n=4", abstain_loss(4, F(1, 2)), 8),
        ("top-2 n=3", top_k_loss(3, 2), 8),
    ]


def test_criterion_01_conjugate_construction_gap_zero():
    start = time.monotonic()
    for name, loss, _ in _instances():
        surrogate, _ = conjugate_surrogate(loss)
        gap = bayes_risk_gap(surrogate, loss, 12)
        assert gap == 0, "%s: nonzero gap %s" % (name, gap)
    elapsed = time.monotonic() - start
    assert elapsed < 30, "conjugate gap suite took %.1fs" % elapsed
    print("ACCEPTANCE 1 PASS: conjugate surrogates have exact zero Bayes-risk "
          "gap at m=12 for all five instances (%.1fs)" % elapsed)


def test_criterion_02_roundtrip_up_to_relabeling():
    for name, loss, m in _instances():
        surrogate, _ = conjugate_surrogate(loss)
        extracted, _ = extract_embedded_loss(surrogate, m)
        assert loss_equal_up_to_relabeling(extracted, loss), name
    print("ACCEPTANCE 2 PASS: extract(conjugate(loss)) returns the original "
          "table exactly, up to report relabeling, for all five instances")


def test_criterion_03_hinge_embeds_twice_zero_one():
    h = hinge()
    extracted, _ = extract_embedded_loss(h, 4)
    assert sorted(extracted.matrix) == [(ZERO, F(2)), (F(2), ZERO)]
    sp = h.space
    # the five argmin shapes across p in {0, 1/4, 1/2, 3/4, 1}
    expectations = [
        (ONE, ZERO, [(ONE, True), (F(3), True), (ZERO, False)]),
        (F(3, 4), F(1, 2), [(ONE, True), (F(2), False), (ZERO, False)]),
        (F(1, 2), ONE, [(-ONE, True), (ZERO, True), (ONE, True), (F(2), False)]),
        (F(1, 4), F(1, 2), [(-ONE, True), (-F(2), False), (ZERO, False)]),
        (ZERO, ZERO, [(-ONE, True), (-F(3), True), (ZERO, False)]),
    ]
    for p1, risk, probes in expectations:
        res = minimize_expected(h, Distribution(sp, (p1, ONE - p1)))
        assert res.value == risk
        for u, inside in probes:
            assert res.argmin.contains((u,)) == inside, (p1, u)
    print("ACCEPTANCE 3 PASS: hinge extraction gives {(0,2),(2,0)} and the "
          "five-case argmin table is reproduced exactly")


def test_criterion_04_abstain_links_match_closed_forms():
    L = abstain_surrogate(4)
    emb = abstain_embedding(4)
    family = enumerate_optimal_sets(L, 8)
    eps_inf = max_valid_epsilon(family, emb, Norm.LINF, [ONE, F(1, 2), F(1, 4)])
    eps_l1 = max_valid_epsilon(family, emb, Norm.L1, [F(2), ONE, F(1, 2)])
    assert eps_inf == F(1, 2)
    assert eps_l1 == ONE
    link_inf = build_link(family, emb, Norm.LINF, eps_inf, tie_break=("abstain",))
    link_l1 = build_link(family, emb, Norm.L1, eps_l1, tie_break=("abstain",))
    ref_inf = abstain_link_linf(4)
    ref_l1 = abstain_link_l1(4)
    rng = random.Random(20240812)
    disagreements = 0
    checked = 0
    while checked < 10_000:
        u = random_u(rng, 2, denom=16, lo=-3, hi=3)
        if min(abs(u[0]), abs(u[1])) == F(1, 2) or abs(u[0]) + abs(u[1]) == 1 or ZERO in u:
            continue  # exact region boundaries excluded
        checked += 1
        if link_inf(u) != ref_inf(u):
            disagreements += 1
        if link_l1(u) != ref_l1(u):
            disagreements += 1
    assert disagreements == 0
    print("ACCEPTANCE 4 PASS: eps = 1/2 (linf) and 1 (l1); built links agree "
          "with the closed forms on 10^4 off-boundary points, 0 disagreements")


def test_criterion_05_abstain_calibration_scan():
    start = time.monotonic()
    L = abstain_surrogate(4)
    target = abstain_loss(4, F(1, 2)).scale(2)
    audit = calibration_scan(L, abstain_link_l1(4), target, 8,
                             u_box=(-3, 3), u_res=F(1, 8))
    elapsed = time.monotonic() - start
    assert not audit.violations
    assert audit.min_gap is not None and audit.min_gap > 0
    assert elapsed < 120, "scan took %.1fs" % elapsed
    print("ACCEPTANCE 5 PASS: (L_1/2, psi_1, 2*abstain) scan at m=8, box "
          "[-3,3]^2, res 1/8: min gap %s > 0, no violations (%.1fs)"
          % (audit.min_gap, elapsed))


def test_criterion_06_lovasz_inconsistency():
    # (a) the k=2 counterexample, certified exactly at u = 0
    g1 = SetFunction(2, (0, 1, 1, 1))
    L = lovasz_hinge(g1)
    target = set_loss(g1)
    p = Distribution.of(target.space,
                        {"--": F(2, 5), "+-": F(1, 5), "-+": F(1, 5), "++": F(1, 5)})
    entry = calibration_audit(L, sign_link(1), target, p, u_box=(-2, 2), u_res=F(1, 2))
    assert entry.violation and entry.witness == (ZERO, ZERO)
    assert discrete_bayes_risk(target, p)[1] == ("--",)
    assert sign_link(1)((ZERO, ZERO)) == "++"

    # (b) modular instances: scans stay clean
    rng = random.Random(606)
    for trial in range(20):
        k = 2 if trial % 2 == 0 else 3
        f = random_modular(rng, k)
        Lm = lovasz_hinge(f, n_samples=200)
        tm = set_loss(f)
        oracle = lovasz_lattice_risk_oracle(Lm)
        # oracle honesty: spot-check the lattice risk against the LP
        for _ in range(5):
            d = random_distribution(rng, tm.space, 6)
            assert oracle(d) == surrogate_bayes_risk(Lm, d)
        audit = calibration_scan(Lm, sign_link(1), tm, 6, u_box=(-2, 2),
                                 u_res=F(1, 2), risk_oracle=oracle)
        assert not audit.violations, "modular instance %d" % trial

    # (c) non-modular instances: the constructed witness verifies exactly
    for trial in range(20):
        k = 2 if trial % 2 == 0 else 3
        f = random_nonmodular_submodular(rng, k)
        w = lovasz_inconsistency_witness(f)
        assert w.ok, "witness %d failed" % trial
    print("ACCEPTANCE 6 PASS: u=0 violation certified for g=1 (k=2); 20 "
          "modular scans clean at m=6; 20 non-modular witnesses verified")


def test_criterion_07_lovasz_structure():
    rng = random.Random(707)
    # lattice-restriction equality on 100 random (f, p), k <= 3
    for trial in range(100):
        k = 2 if trial % 2 == 0 else 3
        f = random_nonmodular_submodular(rng, k) if trial % 3 else random_modular(rng, k)
        L = lovasz_hinge(f, n_samples=50)
        p = random_distribution(rng, L.space, 6)
        assert lovasz_lattice_risk(L, p) == surrogate_bayes_risk(L, p), trial

    # mean-value bound with equality iff modular, 500 random f, k <= 4
    modular_seen = nonmodular_seen = 0
    for trial in range(500):
        k = 2 + trial % 3
        if trial % 2 == 0:
            f = random_modular(rng, k)
            modular_seen += 1
        else:
            f = random_nonmodular_submodular(rng, k)
            nonmodular_seen += 1
        fbar = mean_value(f)
        assert fbar >= f(f.full) / 2
        assert (fbar == f(f.full) / 2) == is_modular(f)
    assert modular_seen and nonmodular_seen

    # B = empty restricted rows equal twice the symmetric-difference loss
    for trial in range(20):
        k = 2 if trial % 2 == 0 else 3
        f = random_nonmodular_submodular(rng, k)
        restricted = restricted_lovasz_loss(f, check=False)
        base = set_loss(f)
        for a_mask in range(2**k):
            assert restricted.row(restricted_label(a_mask, 0, k)) == tuple(
                2 * v for v in base.matrix[a_mask]
            )
    print("ACCEPTANCE 7 PASS: lattice-restriction equality on 100 instances; "
          "mean-value bound tight iff modular on 500; B=empty rows are twice "
          "the base loss")


def test_criterion_08_top_k():
    rng = random.Random(808)

    def direct(n, k, u, y):
        vals = sorted((u[i] - (1 if i == y else 0) for i in range(n)), reverse=True)
        return max(ZERO, 1 - u[y] + F(sum(vals[:k]), 1) / k)

    checked = 0
    for n in (3, 4, 5):
        for k in (2, 3):
            if not 1 < k < n:
                continue
            L = top_k_surrogate(n, k)
            for _ in range(1000 // 4):
                u = random_u(rng, n, denom=4, lo=-2, hi=2)
                vals = eval_loss(L, u)
                for y in range(n):
                    assert vals[y] == direct(n, k, u, y)
                    checked += 1
    assert checked >= 1000

    extracted, _ = extract_embedded_loss(top_k_surrogate(3, 2), 24)
    assert loss_equal_up_to_relabeling(extracted, embedded_top2_loss())

    res = refinement_check(finite_property(embedded_top2_loss()),
                           finite_property(top_k_loss(3, 2)))
    assert not res.refines and res.witness_p is not None
    assert all(v > 0 for v in res.witness_p)
    print("ACCEPTANCE 8 PASS: piece table matches direct evaluation on "
          "random points; extraction recovers the embedded top-2 table on "
          "all %d reports; refinement fails with an interior witness"
          % len(extracted.reports))


def test_criterion_09_separation_slope():
    L = abstain_surrogate(4)
    rng = random.Random(909)
    dists = [d for d in simplex_grid(L.space, 4)]
    rng.shuffle(dists)
    for dist in dists[:20]:
        samples = [random_u(rng, 2, denom=8, lo=-2, hi=2) for _ in range(200)]
        res = minimize_expected(L, dist)
        usable = [u for u in samples
                  if point_set_distance(res.argmin, u, Norm.LINF) > 0]
        if not usable:
            continue
        c_hat = separation_slope(L, dist, samples, Norm.LINF)
        assert c_hat > 0
        for u in usable:
            d = point_set_distance(res.argmin, u, Norm.LINF)
            excess = sum(pv * lv for pv, lv in zip(dist.p, eval_loss(L, u))) - res.value
            assert excess >= c_hat * d
    print("ACCEPTANCE 9 PASS: positive separation slopes; excess expected "
          "loss dominates c_hat * distance exactly on every sample")


def test_criterion_10_kernel_soundness():
    from test_lp import _brute_force_value, _random_bounded_instance

    rng = random.Random(1010)
    for trial in range(1000):
        n, a_ub, b_ub, c, maximize = _random_bounded_instance(rng)
        res = lp_solve(LPProblem(c=c, a_ub=tuple(a_ub), b_ub=tuple(b_ub),
                                 maximize=maximize))
        feasible, best = _brute_force_value(n, a_ub, b_ub, c, maximize)
        if not feasible:
            assert res.status == "infeasible", trial
        else:
            assert res.is_optimal and res.value == best, trial

    rng = random.Random(1011)
    for trial in range(50):
        L = random_polyhedral_loss(rng, d=2, n=3)
        pa = random_interior_distribution(rng, L.space, 8)
        pb = random_interior_distribution(rng, L.space, 8)
        assert check_diagram_invariance(L, pa, pb), trial
    print("ACCEPTANCE 10 PASS: exact LP agrees with brute-force vertex "
          "evaluation on 1000 instances; diagram invariance holds on 50 "
          "random losses")
