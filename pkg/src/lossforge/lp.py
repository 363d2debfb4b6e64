"""Exact rational linear programming.

Public interface is LPProblem / LPResult / lp_solve; all data are Fractions
(or ints), results are exact.  Variables are free by default; mark entries of
`nonneg` True to constrain x_j >= 0 directly (free variables are split
internally as x = x+ - x-).

The pivot kernel has two lanes selected at import time: a compiled Cython
twin when available, otherwise the pure-Python implementation.  Both
implement the same fraction-free tableau with Bland's rule and return
bit-identical results.  Set LOSSFORGE_KERNEL=py (or =cy) to force a lane.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from . import _exactlp as _py_kernel

_lane = os.environ.get("LOSSFORGE_KERNEL", "")
if _lane == "py":
    _kernel = _py_kernel
else:
    try:
        from . import _exactlp_cy as _kernel  # type: ignore[no-redef]
    except ImportError:
        if _lane == "cy":
            raise ImportError(
                "LOSSFORGE_KERNEL=cy but the compiled kernel is not built; "
                "run `pip install -e .` with Cython available"
            )
        _kernel = _py_kernel


def active_kernel() -> str:
    """Name of the pivot lane in use: 'cy' (compiled) or 'py'."""
    return "cy" if _kernel is not _py_kernel else "py"


def kernel_module(lane: str):
    """Return a kernel module by lane name (for benchmarks/tests)."""
    if lane == "py":
        return _py_kernel
    from . import _exactlp_cy  # noqa: F401

    return _exactlp_cy


OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_STATUS = {
    _py_kernel.OPTIMAL: OPTIMAL,
    _py_kernel.INFEASIBLE: INFEASIBLE,
    _py_kernel.UNBOUNDED: UNBOUNDED,
}


@dataclass(frozen=True)
class LPProblem:
    """min (or max) c.x  s.t.  a_ub x <= b_ub,  a_eq x = b_eq."""

    c: tuple
    a_ub: tuple = ()
    b_ub: tuple = ()
    a_eq: tuple = ()
    b_eq: tuple = ()
    maximize: bool = False
    nonneg: tuple = ()  # per-variable flags; empty = all free

    def __post_init__(self):
        n = len(self.c)
        if len(self.a_ub) != len(self.b_ub) or len(self.a_eq) != len(self.b_eq):
            raise ValueError("constraint matrix/rhs length mismatch")
        for row in tuple(self.a_ub) + tuple(self.a_eq):
            if len(row) != n:
                raise ValueError("constraint row width %d != %d variables" % (len(row), n))
        if self.nonneg and len(self.nonneg) != n:
            raise ValueError("nonneg flag vector has wrong length")


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Fraction | None = None
    x: tuple = field(default=())

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


def _int_row(coeffs, rhs):
    """Clear denominators of one constraint row (scaling keeps it exact)."""
    fracs = [Fraction(v) for v in coeffs] + [Fraction(rhs)]
    mult = lcm(*(f.denominator for f in fracs)) if fracs else 1
    out = [int(f * mult) for f in fracs]
    return out[:-1], out[-1]


def lp_solve(problem: LPProblem) -> LPResult:
    """Solve exactly; Optimal results satisfy every constraint exactly."""
    n = len(problem.c)
    nonneg = problem.nonneg or (False,) * n

    # Column map: nonneg var -> one kernel column; free var -> (pos, neg).
    cols = []
    pos_of = []
    for j in range(n):
        if nonneg[j]:
            pos_of.append((len(cols), None))
            cols.append(j)
        else:
            pos_of.append((len(cols), len(cols) + 1))
            cols.extend((j, j))

    ncols = len(cols)
    c = [Fraction(v) for v in problem.c]
    if problem.maximize:
        c = [-v for v in c]
    cden = lcm(*(f.denominator for f in c)) if c else 1
    obj = [0] * ncols
    for j in range(n):
        v = int(c[j] * cden)
        p, q = pos_of[j]
        obj[p] = v
        if q is not None:
            obj[q] = -v

    rows = []
    for a, b, sense in [(r, v, _py_kernel.LE) for r, v in zip(problem.a_ub, problem.b_ub)] + [
        (r, v, _py_kernel.EQ) for r, v in zip(problem.a_eq, problem.b_eq)
    ]:
        ints, rhs = _int_row(a, b)
        row = [0] * ncols
        for j in range(n):
            p, q = pos_of[j]
            row[p] = ints[j]
            if q is not None:
                row[q] = -ints[j]
        rows.append((row, rhs, sense))

    status, xk = _kernel.solve_canonical(ncols, obj, rows)
    if status != _py_kernel.OPTIMAL:
        return LPResult(_STATUS[status])

    x = []
    for j in range(n):
        p, q = pos_of[j]
        x.append(xk[p] - xk[q] if q is not None else xk[p])
    value = sum((Fraction(cj) * xj for cj, xj in zip(problem.c, x)), Fraction(0))
    return LPResult(OPTIMAL, value, tuple(x))
