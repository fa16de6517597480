"""Dense two-phase primal simplex with Bland's rule.

Every conic query in the package reduces to a call of :func:`solve_lp`.  The
solver is deliberately simple: a full tableau in double precision, an
all-artificial starting basis in row order, and Bland's smallest-index rule for
both the entering and the leaving variable.  Identical inputs therefore always
produce the identical final basis, which the selection maps rely on.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, SolverError
from .geometry import DEFAULT_TOL, Tolerance

PIVOT_FLOOR = 1e-13
RATIO_TOL = 1e-9


class LpStatus(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"


@dataclass
class LinearProgram:
    """minimize c.z  subject to  A z = b,  z_j >= 0 for j in ``nonneg``.

    Variables not listed in ``nonneg`` are free.
    """

    objective: np.ndarray
    A: np.ndarray
    b: np.ndarray
    nonneg: np.ndarray = field(default=None)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        n = self.objective.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        if self.nonneg is None:
            mask = np.ones(n, dtype=bool)
        else:
            mask = np.asarray(self.nonneg)
            if mask.dtype != bool:
                idx = mask.astype(int)
                mask = np.zeros(n, dtype=bool)
                mask[idx] = True
        self.nonneg = mask
        if self.A.shape[0] != self.b.size:
            raise InputError("constraint matrix and right-hand side disagree in length")
        if self.nonneg.size != n:
            raise InputError("nonneg mask has the wrong length")
        for arr in (self.objective, self.A, self.b):
            if not np.all(np.isfinite(arr)):
                raise InputError("linear program has non-finite data")

    @property
    def free(self) -> np.ndarray:
        return np.flatnonzero(~self.nonneg)


@dataclass
class LpOutcome:
    status: LpStatus
    solution: np.ndarray | None = None
    value: float | None = None
    basis: list[int] | None = None
    duals: np.ndarray | None = None
    # y with y.A_j <= 0 (nonneg j), y.A_j = 0 (free j) and y.b > 0
    farkas: np.ndarray | None = None
    iterations: int = 0


class _Tableau:
    """Standard-form tableau [A | I | b] with the objective in the last row."""

    def __init__(self, A: np.ndarray, b: np.ndarray):
        m, n = A.shape
        self.m, self.n = m, n
        self.T = np.zeros((m + 1, n + m + 1))
        self.T[:m, :n] = A
        self.T[:m, n:n + m] = np.eye(m)
        self.T[:m, -1] = b
        self.basis = list(range(n, n + m))
        self.iterations = 0

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        piv = T[r, j]
        if abs(piv) < PIVOT_FLOOR:
            raise SolverError(f"pivot magnitude {abs(piv):.3e} below {PIVOT_FLOOR:g} (row {r}, column {j})")
        prow = T[r] / piv
        T -= np.outer(T[:, j], prow)
        T[r] = prow
        self.basis[r] = j
        self.iterations += 1

    def run(self, allowed: int, opt_tol: float, max_iter: int) -> bool:
        """Pivot to optimality over columns < ``allowed``; False if unbounded."""
        T, m = self.T, self.m
        while True:
            if self.iterations > max_iter:
                raise SolverError(f"simplex exceeded {max_iter} pivots")
            cand = np.flatnonzero(T[m, :allowed] < -opt_tol)
            if cand.size == 0:
                return True
            j = int(cand[0])
            col = T[:m, j]
            rows = np.flatnonzero(col > RATIO_TOL)
            if rows.size == 0:
                return False
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            tied = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
            r = int(min(tied, key=lambda i: self.basis[i]))
            self.pivot(r, j)
            if not np.all(np.isfinite(T)):
                raise SolverError("non-finite entries appeared in the tableau")


def solve_lp(lp: LinearProgram, tol: Tolerance = DEFAULT_TOL) -> LpOutcome:
    """Solve ``lp`` with the two-phase Bland simplex.

    Free variables are split as z = z+ - z-, the negative parts appended after
    the original columns.  A row is declared infeasible when the phase-one
    residual exceeds ``tol.feas_tol * (1 + max|b|)``; the phase-one duals then
    form a Farkas certificate.
    """
    c0, A0, b0 = lp.objective, lp.A, lp.b
    m, n0 = A0.shape
    free = lp.free
    A = np.hstack([A0, -A0[:, free]]) if free.size else A0.copy()
    c = np.concatenate([c0, -c0[free]]) if free.size else c0.copy()
    n = A.shape[1]

    sign = np.where(b0 < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b0 * sign
    max_iter = 50 * (m + n) + 100
    scale = 1.0 + (np.abs(b0).max() if m else 0.0)

    if m == 0:
        if np.any(c[: n] < 0):
            return LpOutcome(LpStatus.UNBOUNDED)
        z = np.zeros(n0)
        return LpOutcome(LpStatus.OPTIMAL, z, 0.0, [], np.zeros(0))

    tab = _Tableau(A, b)
    T = tab.T
    # phase one: minimize the sum of the artificials
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    tab.run(n, 1e-11, max_iter)
    residual = -T[m, -1]
    if residual > tol.feas_tol * scale:
        y = (1.0 - T[m, n:n + m]) * sign
        return LpOutcome(LpStatus.INFEASIBLE, farkas=y, iterations=tab.iterations)

    # drive the remaining artificials out of the basis
    for r in range(m):
        if tab.basis[r] < n:
            continue
        T[r, -1] = 0.0
        row = T[r, :n]
        nonbasic = np.ones(n, dtype=bool)
        nonbasic[[k for k in tab.basis if k < n]] = False
        cand = np.flatnonzero(nonbasic & (np.abs(row) > RATIO_TOL))
        if cand.size:
            tab.pivot(r, int(cand[0]))
        # otherwise the row is redundant; its artificial stays basic at zero

    # phase two
    T[m, :] = 0.0
    T[m, :n] = c
    for r, k in enumerate(tab.basis):
        if k < n and c[k] != 0.0:
            T[m] -= c[k] * T[r]
    opt_tol = 1e-10 * max(1.0, float(np.abs(c).max()) if n else 1.0)
    bounded = tab.run(n, opt_tol, max_iter)
    if not bounded:
        return LpOutcome(LpStatus.UNBOUNDED, basis=list(tab.basis), iterations=tab.iterations)

    x = np.zeros(n + m)
    x[tab.basis] = T[:m, -1]
    x = x[:n]
    z = x[:n0].copy()
    if free.size:
        z[free] -= x[n0:]
    duals = -T[m, n:n + m] * sign
    value = float(c0 @ z)
    return LpOutcome(LpStatus.OPTIMAL, z, value, list(tab.basis), duals, iterations=tab.iterations)
