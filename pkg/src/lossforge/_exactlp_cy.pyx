# cython: language_level=3
"""Exact two-phase simplex kernel (compiled lane).

Line-for-line twin of _exactlp.py: the same fraction-free integer tableau,
the same Bland pivoting and normalization, so both lanes return bit-identical
results.  Values stay Python ints (arbitrary precision); Cython removes the
interpreter overhead of the pivot loops.
"""

from fractions import Fraction
from math import gcd

cimport cython

LE = 0
EQ = 1

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2


cdef _normalize(list nums, den):
    cdef Py_ssize_t i, n = len(nums)
    g = den
    for i in range(n):
        v = nums[i]
        if v:
            g = gcd(g, v)
            if g == 1:
                return nums, den
    if g > 1:
        for i in range(n):
            nums[i] = nums[i] // g
        den //= g
    return nums, den


cdef _pivot(list rows, list dens, list basis, list obj, Py_ssize_t r, Py_ssize_t c):
    cdef Py_ssize_t i, j, m = len(rows)
    cdef list rn = rows[r]
    cdef Py_ssize_t width = len(rn)
    cdef list new_r
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

    cdef list ni, merged
    for i in range(m):
        if i == r:
            continue
        ni = rows[i]
        f = ni[c]
        if f == 0:
            continue
        di = dens[i]
        merged = [ni[j] * new_d - f * new_r[j] for j in range(width)]
        merged, md = _normalize(merged, di * new_d)
        rows[i] = merged
        dens[i] = md

    cdef list on = obj[0]
    od = obj[1]
    f = on[c]
    if f != 0:
        merged = [on[j] * new_d - f * new_r[j] for j in range(width)]
        merged, md = _normalize(merged, od * new_d)
        obj[0] = merged
        obj[1] = md


cdef list _objective_row(list cost, list rows, list dens, list basis, Py_ssize_t width):
    cdef Py_ssize_t i, j, ncost = len(cost)
    cdef list on = list(cost) + [0] * (width - ncost)
    od = 1
    cdef list ri
    for i in range(len(basis)):
        b = basis[i]
        cb = cost[b] if b < ncost else 0
        if cb == 0:
            continue
        ri = rows[i]
        di = dens[i]
        on = [on[j] * di - cb * ri[j] * od for j in range(width)]
        on, od = _normalize(on, od * di)
    return [on, od]


cdef int _run_phase(list rows, list dens, list basis, list obj, list allowed) except -1:
    cdef Py_ssize_t ncols = len(allowed)
    cdef Py_ssize_t j, i, enter, leave, m
    cdef list on, row
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
        lr_num = 0
        lr_den = 0
        m = len(rows)
        for i in range(m):
            row = rows[i]
            a = row[enter]
            if a <= 0:
                continue
            b = row[len(row) - 1]
            if leave < 0:
                leave = i
                lr_num = b
                lr_den = a
                continue
            d = b * lr_den - lr_num * a
            if d < 0 or (d == 0 and basis[i] < basis[leave]):
                leave = i
                lr_num = b
                lr_den = a
        if leave < 0:
            return UNBOUNDED
        _pivot(rows, dens, basis, obj, leave, enter)


def solve_canonical(ncols, obj, rows):
    """Solve min obj.x s.t. rows, x >= 0, all data ints (see _exactlp)."""
    cdef Py_ssize_t i, j
    senses = []
    data = []
    for coeffs, rhs, sense in rows:
        if len(coeffs) != ncols:
            raise ValueError("row width %d != ncols %d" % (len(coeffs), ncols))
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
            sense = EQ if sense == EQ else 2
        data.append((list(coeffs), rhs, sense))
        senses.append(sense)

    n_slack = sum(1 for s in senses if s != EQ)
    n_art = sum(1 for s in senses if s != LE)
    width = ncols + n_slack + n_art + 1

    cdef list tab = []
    cdef list dens = []
    cdef list basis = []
    art_cols = set()
    s_at = ncols
    a_at = ncols + n_slack
    for coeffs, rhs, sense in data:
        row = coeffs + [0] * (width - ncols - 1) + [rhs]
        if sense == LE:
            row[s_at] = 1
            basis.append(s_at)
            s_at += 1
        elif sense == 2:
            row[s_at] = -1
            s_at += 1
            row[a_at] = 1
            art_cols.add(a_at)
            basis.append(a_at)
            a_at += 1
        else:
            row[a_at] = 1
            art_cols.add(a_at)
            basis.append(a_at)
            a_at += 1
        tab.append(row)
        dens.append(1)

    cdef list obj_row
    if art_cols:
        cost1 = [0] * (ncols + n_slack) + [1] * n_art
        obj_row = _objective_row(cost1, tab, dens, basis, width)
        allowed = [True] * (width - 1)
        status = _run_phase(tab, dens, basis, obj_row, allowed)
        assert status == OPTIMAL, "phase 1 cannot be unbounded"
        if obj_row[0][width - 1] != 0:
            return INFEASIBLE, None
        keep = []
        for i in range(len(tab)):
            if basis[i] not in art_cols:
                keep.append(i)
                continue
            assert tab[i][width - 1] == 0, "basic artificial with nonzero value"
            piv_col = -1
            for j in range(width - 1):
                if j not in art_cols and tab[i][j] != 0:
                    piv_col = j
                    break
            if piv_col >= 0:
                _pivot(tab, dens, basis, obj_row, i, piv_col)
                keep.append(i)
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
    for i in range(len(basis)):
        b = basis[i]
        if b < ncols:
            x[b] = Fraction(tab[i][width - 1], dens[i])
    return OPTIMAL, x
