"""LP assembly helpers and norm-epigraph encodings.

Polyhedral norms are encoded exactly.  The Euclidean norm is approached from
below by supporting hyperplanes t >= u.e, refined until the total epigraph gap
drops under ``gap_tol``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError
from .geometry import NormKind, NormSpec, Tolerance, norm_eval
from .lp import LinearProgram, LpOutcome, LpStatus, solve_lp

MAX_CUT_ROUNDS = 500


class Program:
    """Incrementally assembled equality-form LP."""

    def __init__(self):
        self._cost: list[float] = []
        self._nonneg: list[bool] = []
        self._blocks: list[tuple[int, np.ndarray, np.ndarray]] = []
        self._rhs: list[np.ndarray] = []
        self.n_rows = 0

    @property
    def n_vars(self) -> int:
        return len(self._cost)

    def var(self, size: int, nonneg: bool = True, cost=0.0) -> np.ndarray:
        start = self.n_vars
        self._cost.extend(np.broadcast_to(np.asarray(cost, dtype=float), (size,)).tolist())
        self._nonneg.extend([nonneg] * size)
        return np.arange(start, start + size)

    def eq(self, terms, rhs) -> None:
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        for idx, M in terms:
            M = np.asarray(M, dtype=float).reshape(rhs.size, len(idx))
            self._blocks.append((self.n_rows, np.asarray(idx), M))
        self._rhs.append(rhs)
        self.n_rows += rhs.size

    def to_lp(self) -> LinearProgram:
        A = np.zeros((self.n_rows, self.n_vars))
        for row, idx, M in self._blocks:
            A[row:row + M.shape[0], idx] += M
        b = np.concatenate(self._rhs) if self._rhs else np.zeros(0)
        return LinearProgram(np.array(self._cost), A, b, np.array(self._nonneg, dtype=bool))


@dataclass
class EuclideanEpigraph:
    """Handle for one ``t >= ||expr||_2`` term awaiting cuts."""

    t: int
    terms: list

    def value(self, z: np.ndarray) -> np.ndarray:
        return sum(M @ z[idx] for idx, M in self.terms)


def additive_costs(norm: NormSpec, generators: np.ndarray) -> np.ndarray | None:
    """Per-generator norms if the norm is additive on the cone, else None.

    The norm is additive on cone(G) exactly when one dual-ball functional u
    satisfies u.g = ||g|| for every generator g; then ||sum l_k g_k|| equals
    sum l_k ||g_k|| and the cone's cost is linear in the coefficients.
    """
    G = np.asarray(generators, dtype=float)
    costs = np.array([norm_eval(norm, g) for g in G])
    live = G[costs > 0]
    if live.shape[0] <= 1:
        return costs
    kind = norm.kind
    n = G.shape[1]
    if kind is NormKind.L1:
        ok = all(not (np.any(col > 0) and np.any(col < 0)) for col in live.T)
        return costs if ok else None
    if kind is NormKind.LINF:
        w = norm.weight_vector(n)
        for i in range(n):
            for s in (1.0, -1.0):
                if np.all(s * w[i] * live[:, i] >= costs[costs > 0] * (1 - 1e-12)):
                    return costs
        return None
    if kind is NormKind.POLYHEDRAL:
        vals = live @ norm.facet_normals.T
        hit = np.all(vals >= costs[costs > 0][:, None] * (1 - 1e-12), axis=0)
        return costs if np.any(hit) else None
    unit = live / costs[costs > 0][:, None]
    return costs if np.allclose(unit, unit[0], atol=1e-12) else None


def add_norm_cost(prog: Program, norm: NormSpec, terms, dim: int) -> EuclideanEpigraph | None:
    """Make the objective pay ||sum_k M_k z[idx_k]|| at optimality."""
    kind = norm.kind
    w = norm.weight_vector(dim)
    if kind is NormKind.L1:
        p = prog.var(dim, cost=w)
        m = prog.var(dim, cost=w)
        prog.eq(list(terms) + [(p, -np.eye(dim)), (m, np.eye(dim))], np.zeros(dim))
        return None
    if kind is NormKind.POLYHEDRAL:
        verts = np.asarray(norm.ball_vertices)
        mu = prog.var(len(verts), cost=1.0)
        prog.eq(list(terms) + [(mu, -verts.T)], np.zeros(dim))
        return None
    if kind is NormKind.LINF:
        t = prog.var(1, cost=1.0)
        for s in (1.0, -1.0):
            slack = prog.var(dim)
            prog.eq([(idx, s * w[:, None] * M) for idx, M in terms]
                    + [(slack, np.eye(dim)), (t, -np.ones((dim, 1)))], np.zeros(dim))
        return None
    t = prog.var(1, cost=1.0)
    handle = EuclideanEpigraph(int(t[0]), list(terms))
    for i in range(dim):
        for s in (1.0, -1.0):
            u = np.zeros(dim)
            u[i] = s
            add_cut(prog, handle, u)
    return handle


def add_cut(prog: Program, handle: EuclideanEpigraph, u: np.ndarray) -> None:
    s = prog.var(1)
    prog.eq([([handle.t], [[1.0]]), (s, [[-1.0]])]
            + [(idx, -(u @ M)[None, :]) for idx, M in handle.terms], [0.0])


def _append_cuts(lp: LinearProgram, cuts) -> LinearProgram:
    """Append rows t - u.expr - s = 0 with fresh slacks s >= 0."""
    m, n = lp.A.shape
    k = len(cuts)
    A = np.zeros((m + k, n + k))
    A[:m, :n] = lp.A
    for r, (handle, u) in enumerate(cuts):
        A[m + r, handle.t] = 1.0
        for idx, M in handle.terms:
            A[m + r, idx] -= u @ M
        A[m + r, n + r] = -1.0
    return LinearProgram(np.concatenate([lp.objective, np.zeros(k)]), A,
                         np.concatenate([lp.b, np.zeros(k)]),
                         np.concatenate([lp.nonneg, np.ones(k, dtype=bool)]))


def minimize(lp: LinearProgram, handles: list[EuclideanEpigraph], tol: Tolerance) -> LpOutcome:
    """Solve, refining Euclidean epigraphs until the gap is below ``gap_tol``."""
    for _ in range(MAX_CUT_ROUNDS):
        out = solve_lp(lp, tol)
        if out.status is not LpStatus.OPTIMAL or not handles:
            return out
        z = out.solution
        exprs = [h.value(z) for h in handles]
        norms = np.array([np.linalg.norm(e) for e in exprs])
        gaps = norms - z[[h.t for h in handles]]
        if gaps.sum() <= tol.gap_tol * max(1.0, float(norms.sum())):
            return out
        cuts = [(h, e / nrm) for h, e, nrm, gap in zip(handles, exprs, norms, gaps) if gap > 0.0 and nrm > 0.0]
        lp = _append_cuts(lp, cuts)
    raise SolverError(f"cutting-plane loop did not close the gap in {MAX_CUT_ROUNDS} rounds")


@dataclass(frozen=True)
class CompiledModel:
    """An assembled LP whose first ``query_rows`` right-hand sides vary per call."""

    lp: LinearProgram
    query_rows: int
    handles: tuple

    def solve(self, rhs: np.ndarray, tol: Tolerance) -> LpOutcome:
        b = self.lp.b.copy()
        b[:self.query_rows] = rhs
        lp = LinearProgram(self.lp.objective, self.lp.A, b, self.lp.nonneg)
        return minimize(lp, list(self.handles), tol)
