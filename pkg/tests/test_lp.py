import itertools
import random
from fractions import Fraction as F

import pytest

from lossforge.lp import LPProblem, lp_solve, active_kernel, kernel_module


def test_simple_max():
    res = lp_solve(LPProblem(c=(F(1),), a_ub=((F(1),),), b_ub=(F(3),), maximize=True))
    assert res.status == "optimal"
    assert res.value == 3
    assert res.x == (F(3),)


def test_unbounded():
    res = lp_solve(LPProblem(c=(F(1),), a_ub=((F(-1),),), b_ub=(F(0),), maximize=True))
    assert res.status == "unbounded"


def test_infeasible():
    res = lp_solve(
        LPProblem(c=(F(1),), a_ub=((F(1),), (F(-1),)), b_ub=(F(0), F(-1)))
    )
    assert res.status == "infeasible"


def test_equality_and_rationals():
    # min x + y  s.t.  x + 2y = 1, x >= 0, y >= 0
    res = lp_solve(
        LPProblem(
            c=(F(1), F(1)),
            a_eq=((F(1), F(2)),),
            b_eq=(F(1),),
            nonneg=(True, True),
        )
    )
    assert res.is_optimal
    assert res.value == F(1, 2)
    assert res.x == (F(0), F(1, 2))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        LPProblem(c=(F(1),), a_ub=((F(1), F(2)),), b_ub=(F(0),))


def _brute_force_value(n, a_ub, b_ub, c, maximize):
    """Independent oracle: evaluate c.x at every basic feasible point found
    by solving all n-subsets of tight constraints by hand."""

    def solve_square(rows, rhs):
        m = [list(r) + [v] for r, v in zip(rows, rhs)]
        x = [None] * n
        cols = []
        r = 0
        for cidx in range(n):
            piv = next((i for i in range(r, len(m)) if m[i][cidx] != 0), None)
            if piv is None:
                return None
            m[r], m[piv] = m[piv], m[r]
            pv = m[r][cidx]
            m[r] = [v / pv for v in m[r]]
            for i in range(len(m)):
                if i != r and m[i][cidx] != 0:
                    f = m[i][cidx]
                    m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
            cols.append(cidx)
            r += 1
        if r < n:
            return None
        for i, cidx in enumerate(cols):
            x[cidx] = m[i][n]
        return x

    best = None
    feasible = False
    for combo in itertools.combinations(range(len(a_ub)), n):
        x = solve_square([a_ub[i] for i in combo], [b_ub[i] for i in combo])
        if x is None:
            continue
        if all(
            sum(ai * xi for ai, xi in zip(row, x)) <= bv
            for row, bv in zip(a_ub, b_ub)
        ):
            feasible = True
            v = sum(ci * xi for ci, xi in zip(c, x))
            if best is None or (v > best if maximize else v < best):
                best = v
    return feasible, best


def _random_bounded_instance(rng):
    """Box constraints (feasibility not guaranteed after extras) with at
    most 8 rows and 3 variables, random small rational data (halves)."""
    n = rng.randint(1, 3)
    a_ub, b_ub = [], []
    for j in range(n):
        lo = F(rng.randint(-8, 0), 2)
        hi = lo + rng.randint(1, 5)
        row = [F(0)] * n
        row[j] = F(1)
        a_ub.append(tuple(row))
        b_ub.append(hi)
        row = [F(0)] * n
        row[j] = F(-1)
        a_ub.append(tuple(row))
        b_ub.append(-lo)
    for _ in range(rng.randint(0, 8 - 2 * n)):
        a_ub.append(tuple(F(rng.randint(-6, 6), 2) for _ in range(n)))
        b_ub.append(F(rng.randint(-8, 12), 2))
    c = tuple(F(rng.randint(-10, 10), 2) for _ in range(n))
    return n, a_ub, b_ub, c, rng.random() < 0.5


def test_agrees_with_vertex_enumeration_oracle():
    rng = random.Random(20240811)
    for _ in range(250):
        n, a_ub, b_ub, c, maximize = _random_bounded_instance(rng)
        res = lp_solve(
            LPProblem(c=c, a_ub=tuple(a_ub), b_ub=tuple(b_ub), maximize=maximize)
        )
        feasible, best = _brute_force_value(n, a_ub, b_ub, c, maximize)
        if not feasible:
            assert res.status == "infeasible"
        else:
            assert res.is_optimal
            assert res.value == best


def test_optimal_point_satisfies_constraints_exactly():
    rng = random.Random(7)
    for _ in range(100):
        n, a_ub, b_ub, c, maximize = _random_bounded_instance(rng)
        res = lp_solve(
            LPProblem(c=c, a_ub=tuple(a_ub), b_ub=tuple(b_ub), maximize=maximize)
        )
        if res.is_optimal:
            for row, bv in zip(a_ub, b_ub):
                assert sum(ai * xi for ai, xi in zip(row, res.x)) <= bv


def test_kernel_lanes_agree_when_compiled_lane_present():
    try:
        cy = kernel_module("cy")
    except ImportError:
        pytest.skip("compiled kernel not built")
    py = kernel_module("py")
    rng = random.Random(99)
    for _ in range(120):
        n, a_ub, b_ub, c, _ = _random_bounded_instance(rng)
        # clear the halves and split free variables as the wrapper would
        rows = [([int(v * 2) for v in row], int(bv * 2), 0) for row, bv in zip(a_ub, b_ub)]
        obj = [int(v * 2) for v in c]
        split_rows = [([x for v in r for x in (v, -v)], b, s) for r, b, s in rows]
        split_obj = [x for v in obj for x in (v, -v)]
        assert py.solve_canonical(2 * n, split_obj, split_rows) == cy.solve_canonical(
            2 * n, split_obj, split_rows
        )


def test_active_kernel_reports_lane():
    assert active_kernel() in ("py", "cy")
