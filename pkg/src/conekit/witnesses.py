"""Constructive witnesses for the lower-hemicontinuity argument.

:func:`segment_witness` pulls a point of a convex set off the boundary of a
ball while staying inside an open neighbourhood; :func:`transport_witness`
moves a selected point from phi(x) to phi(z) by adding a small element of
phi(z - x).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, WitnessNotFound
from .geometry import DEFAULT_TOL, NormSpec, Tolerance, norm_eval
from .gauge import PsiInstance

MAX_HALVINGS = 200


class Fibre:
    """phi(base) as a convex subset of the domain of Psi, i.e. {c in C : base in Psi(c)}."""

    def __init__(self, inst: PsiInstance, base):
        self.inst = inst
        self.base = inst.as_target(base)

    def norm(self, point) -> float:
        return self.inst.cone_norm(point)

    def contains(self, point, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.inst.contains(point, self.base, tol)


class PolyhedralSet:
    """{z : A_eq z = b_eq, A_ub z <= b_ub} with an attached norm."""

    def __init__(self, norm: NormSpec, A_eq=None, b_eq=None, A_ub=None, b_ub=None):
        self._norm = norm
        self.A_eq = None if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
        self.b_eq = None if b_eq is None else np.atleast_1d(np.asarray(b_eq, dtype=float))
        self.A_ub = None if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
        self.b_ub = None if b_ub is None else np.atleast_1d(np.asarray(b_ub, dtype=float))

    def norm(self, point) -> float:
        return norm_eval(self._norm, point)

    def contains(self, point, tol: Tolerance = DEFAULT_TOL) -> bool:
        z = np.asarray(point, dtype=float)
        scale = tol.mem_tol * (1.0 + np.abs(z).max())
        if self.A_eq is not None and np.abs(self.A_eq @ z - self.b_eq).max() > scale:
            return False
        if self.A_ub is not None and np.any(self.A_ub @ z - self.b_ub > scale):
            return False
        return True


def segment_witness(G, alpha: float, eps0: float, center, radius: float, x, y,
                    tol: Tolerance = DEFAULT_TOL) -> tuple[float, np.ndarray]:
    """Find t0 with t0*y + (1-t0)*x in G, inside the open (alpha+eps0)-ball, and in U.

    ``U`` is the open ball of ``radius`` about ``center`` (in G's norm).  Both
    ``x`` (in U, norm at most alpha+eps0) and ``y`` (norm at most
    alpha+eps0/2) must lie in G.  If x is already strictly inside the ball it
    is returned with t0 = 0.  Otherwise every segment point with t > 0 is
    strictly inside the ball, and halving t from 1 eventually lands in U.
    """
    if alpha <= 0 or eps0 <= 0 or radius <= 0:
        raise PreconditionError("alpha, eps0 and radius must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    center = np.asarray(center, dtype=float)
    R = alpha + eps0

    def in_U(p):
        return G.norm(p - center) < radius

    if not G.contains(x, tol):
        raise PreconditionError("x is not in G")
    if G.norm(x) > R + tol.mem_tol:
        raise PreconditionError(f"||x|| = {G.norm(x)} exceeds alpha + eps0 = {R}")
    if not in_U(x):
        raise PreconditionError("x is not in U")
    if not G.contains(y, tol):
        raise PreconditionError("y is not in G")
    if G.norm(y) > alpha + eps0 / 2 + tol.mem_tol:
        raise PreconditionError(f"||y|| = {G.norm(y)} exceeds alpha + eps0/2 = {alpha + eps0 / 2}")

    if G.norm(x) < R - tol.feas_tol:
        return 0.0, x.copy()
    t = 1.0
    for _ in range(MAX_HALVINGS):
        p = t * y + (1.0 - t) * x
        if in_U(p) and G.norm(p) < R - tol.feas_tol and G.contains(p, tol):
            return t, p
        t *= 0.5
    raise WitnessNotFound(f"no admissible segment point after {MAX_HALVINGS} halvings")


@dataclass
class TransportWitness:
    selected: np.ndarray  # selection at x, a member of phi(x)
    v: np.ndarray  # member of phi(z - x) of small norm
    combined: np.ndarray  # selected + v, a member of phi(z)
    v_norm: float
    bound: float  # (alpha + eps) * ||z - x||
    certified: bool

    @property
    def within_bound(self) -> bool:
        return self.v_norm <= self.bound


def transport_witness(inst: PsiInstance, x, z, eps: float, alpha: float,
                      tol: Tolerance = DEFAULT_TOL) -> TransportWitness:
    """Build y + v in phi(z) from the selection y at x and a bounded v in phi(z - x).

    ``alpha`` is the instance's boundedness constant; the minimal-norm v
    satisfies ||v|| <= alpha * ||z - x||, within ``(alpha + eps)`` as required.
    """
    x = inst.as_target(x)
    z = inst.as_target(z)
    for name, p in (("x", x), ("z", z)):
        if abs(inst.target_norm(p) - 1.0) > tol.mem_tol:
            raise PreconditionError(f"{name} must lie on the unit sphere")
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    selected = inst.select(x, tol)
    v = inst.select(z - x, tol)
    combined = selected + v
    v_norm = inst.cone_norm(v)
    bound = (alpha + eps) * inst.target_norm(z - x)
    return TransportWitness(selected, v, combined, v_norm, bound, Fibre(inst, z).contains(combined, tol))


def additivity_holds(inst: PsiInstance, a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """phi(a) + phi(b) inside phi(a + b), checked on the selected points."""
    a = inst.as_target(a)
    b = inst.as_target(b)
    combined = inst.select(a, tol) + inst.select(b, tol)
    return Fibre(inst, a + b).contains(combined, tol)
