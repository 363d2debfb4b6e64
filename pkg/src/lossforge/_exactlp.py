"""Exact two-phase simplex kernel over the rationals (pure-Python lane).

The tableau is kept fraction-free: every row is a list of Python ints plus a
single positive integer denominator, normalized by their gcd after each
pivot.  All comparisons (reduced costs, ratio tests) are integer
cross-multiplications, so no Fraction objects appear in the pivot loop.

Bland's rule (lowest index entering, lowest basic index leaving) is used in
both phases, which guarantees termination without cycling since the
arithmetic is exact.

Canonical problem solved here:

    minimize  obj . x   subject to  rows, x >= 0

with integer data.  Row senses are LE (a.x <= b) or EQ (a.x = b); callers
handle free variables, GE rows and rational data (see lossforge.lp).

A Cython twin of this module (_exactlp_cy.pyx) implements the identical
algorithm; both lanes produce bit-identical results.
"""

from fractions import Fraction
from math import gcd

LE = 0
EQ = 1

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2


def _normalize(nums, den):
    """Divide a row through by gcd(den, *nums); den stays positive."""
    g = den
    for v in nums:
        if v:
            g = gcd(g, v)
            if g == 1:
                return nums, den
    if g > 1:
        nums = [v // g for v in nums]
        den //= g
    return nums, den


def _pivot(rows, dens, basis, obj, r, c):
    """Pivot the tableau (constraint rows + objective row) on entry (r, c)."""
    rn = rows[r]
    piv = rn[c]
    if piv > 0:
        new_r = list(rn)
        new_d = piv
    else:
        new_r = [-v for v in rn]
        new_d = -piv
    new_r, new_d = _normalize(new_r, new_d)
    rows[r] = new_r
    dens[r] = new_d
    basis[r] = c

    for i in range(len(rows)):
        if i == r:
            continue
        ni = rows[i]
        f = ni[c]
        if f == 0:
            continue
        di = dens[i]
        merged = [ni[j] * new_d - f * new_r[j] for j in range(len(ni))]
        merged, md = _normalize(merged, di * new_d)
        rows[i] = merged
        dens[i] = md

    on, od = obj
    f = on[c]
    if f != 0:
        merged = [on[j] * new_d - f * new_r[j] for j in range(len(on))]
        merged, md = _normalize(merged, od * new_d)
        obj[0] = merged
        obj[1] = md


def _objective_row(cost, rows, dens, basis, width):
    """Reduced-cost row for integer costs `cost` w.r.t. the current basis."""
    on = list(cost) + [0] * (width - len(cost))
    od = 1
    for i, b in enumerate(basis):
        cb = cost[b] if b < len(cost) else 0
        if cb == 0:
            continue
        ri, di = rows[i], dens[i]
        on = [on[j] * di - cb * ri[j] * od for j in range(width)]
        on, od = _normalize(on, od * di)
    return [on, od]


def _run_phase(rows, dens, basis, obj, allowed):
    """Bland-rule minimization; `allowed[j]` marks admissible entering cols.

    Returns OPTIMAL or UNBOUNDED.  The rhs column is the last one.
    """
    ncols = len(allowed)
    while True:
        on = obj[0]
        enter = -1
        for j in range(ncols):
            if allowed[j] and on[j] < 0:
                enter = j
                break
        if enter < 0:
            return OPTIMAL
        leave = -1
        lr_num = lr_den = 0  # current best ratio rhs/a as a pair (num, den)
        for i in range(len(rows)):
            a = rows[i][enter]
            if a <= 0:
                continue
            b = rows[i][-1]
            if leave < 0:
                leave, lr_num, lr_den = i, b, a
                continue
            d = b * lr_den - lr_num * a
            if d < 0 or (d == 0 and basis[i] < basis[leave]):
                leave, lr_num, lr_den = i, b, a
        if leave < 0:
            return UNBOUNDED
        _pivot(rows, dens, basis, obj, leave, enter)


def solve_canonical(ncols, obj, rows):
    """Solve min obj.x s.t. rows, x >= 0, all data ints.

    rows: sequence of (coeffs, rhs, sense) with len(coeffs) == ncols.
    Returns (status, x) where x is a list of Fractions on OPTIMAL.
    """
    m = len(rows)
    senses = []
    data = []
    for coeffs, rhs, sense in rows:
        if len(coeffs) != ncols:
            raise ValueError("row width %d != ncols %d" % (len(coeffs), ncols))
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
            sense = EQ if sense == EQ else 2  # 2 = GE after flipping
        data.append((list(coeffs), rhs, sense))
        senses.append(sense)

    n_slack = sum(1 for s in senses if s != EQ)
    n_art = sum(1 for s in senses if s != LE)
    width = ncols + n_slack + n_art + 1

    tab = []
    dens = []
    basis = []
    art_cols = set()
    s_at = ncols
    a_at = ncols + n_slack
    for coeffs, rhs, sense in data:
        row = coeffs + [0] * (width - ncols - 1) + [rhs]
        if sense == LE:
            row[s_at] = 1
            basis.append(s_at)
            s_at += 1
        elif sense == 2:  # GE
            row[s_at] = -1
            s_at += 1
            row[a_at] = 1
            art_cols.add(a_at)
            basis.append(a_at)
            a_at += 1
        else:  # EQ
            row[a_at] = 1
            art_cols.add(a_at)
            basis.append(a_at)
            a_at += 1
        tab.append(row)
        dens.append(1)

    if art_cols:
        cost1 = [0] * (ncols + n_slack) + [1] * n_art
        obj_row = _objective_row(cost1, tab, dens, basis, width)
        allowed = [True] * (width - 1)
        status = _run_phase(tab, dens, basis, obj_row, allowed)
        assert status == OPTIMAL, "phase 1 cannot be unbounded"
        if obj_row[0][-1] != 0:  # -z != 0  =>  sum of artificials > 0
            return INFEASIBLE, None
        # Drive artificials out of the basis, dropping redundant rows.
        keep = []
        for i in range(len(tab)):
            if basis[i] not in art_cols:
                keep.append(i)
                continue
            assert tab[i][-1] == 0, "basic artificial with nonzero value"
            piv_col = -1
            for j in range(width - 1):
                if j not in art_cols and tab[i][j] != 0:
                    piv_col = j
                    break
            if piv_col >= 0:
                _pivot(tab, dens, basis, obj_row, i, piv_col)
                keep.append(i)
            # else: redundant row, drop it
        tab = [tab[i] for i in keep]
        dens = [dens[i] for i in keep]
        basis = [basis[i] for i in keep]

    cost2 = list(obj) + [0] * (n_slack + n_art)
    obj_row = _objective_row(cost2, tab, dens, basis, width)
    allowed = [j not in art_cols for j in range(width - 1)]
    status = _run_phase(tab, dens, basis, obj_row, allowed)
    if status == UNBOUNDED:
        return UNBOUNDED, None

    x = [Fraction(0)] * ncols
    for i, b in enumerate(basis):
        if b < ncols:
            x[b] = Fraction(tab[i][-1], dens[i])
    return OPTIMAL, x
