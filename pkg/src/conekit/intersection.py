"""Minimal-norm points of intersections of translated cones, and coadditivity."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import null_space

from .cones import ConeFamily, MembershipCertificate, cone_membership
from .decomposition import AlphaMode, AlphaResult, sampled_result
from .errors import EmptyIntersection, InputError, NotCoadditive, NotPolyhedral
from .formulation import CompiledModel, Program, add_norm_cost
from .geometry import DEFAULT_TOL, NormKind, NormSpec, Tolerance, ball_vertices, norm_eval
from .lp import LpStatus

# relative coefficient thresholds used to guess the optimal face
SUPPORT_THRESHOLDS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 0.0)


def as_tuple(xi, family: ConeFamily) -> np.ndarray:
    """Coerce a translation tuple to a finite (|family|, dim) array."""
    arr = np.asarray(xi, dtype=float)
    shape = (len(family), family.dim)
    if arr.shape != shape:
        raise InputError(f"translation tuple has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("translation tuple has non-finite entries")
    return arr


def sup_norm(norm: NormSpec, xi) -> float:
    """max over components of the component norms."""
    return max(norm_eval(norm, row) for row in np.asarray(xi, dtype=float))


@dataclass
class TranslationTuple:
    xi: np.ndarray
    sup_norm: float

    @classmethod
    def of(cls, xi, norm: NormSpec) -> TranslationTuple:
        xi = np.asarray(xi, dtype=float)
        return cls(xi, sup_norm(norm, xi))


@dataclass
class IntersectionPoint:
    """A point y with y - xi_w in C_w for every w, plus one certificate per w."""

    y: np.ndarray
    norm: float
    residuals: list[MembershipCertificate] = field(default_factory=list)

    def validate(self, family: ConeFamily, xi, tol: Tolerance = DEFAULT_TOL) -> bool:
        xi = np.asarray(xi, dtype=float)
        if len(self.residuals) != len(family):
            return False
        return all(cert.member and cert.validate(cone.generators, self.y - xi_w, tol)
                   for cone, xi_w, cert in zip(family, xi, self.residuals))

    def to_dict(self) -> dict:
        return {"y": self.y.tolist(), "norm": self.norm,
                "residual_coefficients": [c.coefficients.tolist() for c in self.residuals]}


@dataclass
class EmptinessCertificate:
    """Functionals h_w, nonnegative on C_w, summing to zero, with sum h_w.xi_w > 0.

    Any y in every xi_w + C_w would give 0 = sum h_w.y >= sum h_w.xi_w > 0.
    """

    functionals: np.ndarray

    def validate(self, family: ConeFamily, xi, tol: Tolerance = DEFAULT_TOL) -> bool:
        H = self.functionals
        xi = np.asarray(xi, dtype=float)
        scale = np.abs(H).max()
        if scale == 0 or np.abs(H.sum(axis=0)).max() > tol.mem_tol * scale:
            return False
        if any(np.any(cone.generators @ h < -tol.mem_tol * scale) for cone, h in zip(family, H)):
            return False
        return bool(np.sum(H * xi) > tol.mem_tol * scale)

    def to_dict(self) -> dict:
        return {"functionals": self.functionals.tolist()}


@lru_cache(maxsize=128)
def _upsilon_model(family: ConeFamily, norm: NormSpec | None):
    """Variables: y free, then one coefficient block per cone."""
    n = family.dim
    prog = Program()
    y = prog.var(n, nonneg=False)
    coeffs = [prog.var(cone.generators.shape[0]) for cone in family]
    for lam, cone in zip(coeffs, family):
        prog.eq([(y, np.eye(n)), (lam, -cone.generators.T)], np.zeros(n))
    handles = []
    if norm is not None:
        h = add_norm_cost(prog, norm, [(y, np.eye(n))], n)
        if h is not None:
            handles.append(h)
    return CompiledModel(prog.to_lp(), n * len(family), tuple(handles)), y, coeffs


def _solve(family: ConeFamily, norm: NormSpec | None, xi: np.ndarray, tol: Tolerance) -> IntersectionPoint:
    model, y_idx, coeffs = _upsilon_model(family, norm)
    out = model.solve(xi.reshape(-1), tol)
    if out.status is LpStatus.INFEASIBLE:
        feas, _, _ = _upsilon_model(family, None)
        cert_out = feas.solve(xi.reshape(-1), tol)
        cert = None
        if cert_out.status is LpStatus.INFEASIBLE:
            H = cert_out.farkas.reshape(len(family), family.dim)
            cert = EmptinessCertificate(H / np.abs(H).max())
        raise EmptyIntersection(xi, cert)
    z = out.solution
    y = z[y_idx].copy()
    residuals = [MembershipCertificate(True, coefficients=np.maximum(z[lam], 0.0)) for lam in coeffs]
    if norm is None:
        return IntersectionPoint(y, float("nan"), residuals)
    point = IntersectionPoint(y, norm_eval(norm, y), residuals)
    if norm.kind is NormKind.L2:
        point = _polish(family, xi, point, tol)
    return point


def _face_projection(family: ConeFamily, xi: np.ndarray, support: list[np.ndarray]) -> np.ndarray | None:
    """Closest point to 0 of the affine set {y : y - xi_w in span of the supported generators}."""
    n = family.dim
    blocks = [cone.generators[s] for cone, s in zip(family, support)]
    width = n + sum(len(b) for b in blocks)
    A = np.zeros((n * len(family), width))
    col = n
    for w, B in enumerate(blocks):
        A[w * n:(w + 1) * n, :n] = np.eye(n)
        A[w * n:(w + 1) * n, col:col + len(B)] = -B.T
        col += len(B)
    b = xi.reshape(-1)
    u0 = np.linalg.lstsq(A, b, rcond=None)[0]
    if np.abs(A @ u0 - b).max() > 1e-12 * (1.0 + np.abs(b).max()):
        return None
    N = null_space(A)
    if N.size == 0:
        return u0[:n]
    w = np.linalg.lstsq(N[:n], -u0[:n], rcond=None)[0]
    return u0[:n] + N[:n] @ w


def _polish(family: ConeFamily, xi: np.ndarray, point: IntersectionPoint, tol: Tolerance) -> IntersectionPoint:
    """Sharpen a cutting-plane Euclidean minimizer to the exact projection.

    The cutting-plane point is only accurate to the square root of the value
    gap.  Candidate faces are read off its coefficients at several relative
    thresholds; projecting 0 onto each face's affine hull and re-certifying
    feasibility with membership LPs yields feasible points, and the smallest
    is kept.  Whenever the optimal face is among the candidates this is the
    exact minimizer.
    """
    best = point
    seen = set()
    for tau in SUPPORT_THRESHOLDS:
        support = []
        for cert in point.residuals:
            lam = cert.coefficients
            support.append(np.flatnonzero(lam > tau * max(lam.max(initial=0.0), 1e-300)))
        key = tuple(tuple(s) for s in support)
        if key in seen:
            continue
        seen.add(key)
        y = _face_projection(family, xi, support)
        if y is None:
            continue
        value = float(np.linalg.norm(y))
        if value >= best.norm:
            continue
        certs = [cone_membership(cone, y - row, tol) for cone, row in zip(family, xi)]
        if all(c.member for c in certs):
            best = IntersectionPoint(y, value, certs)
    return best


def intersect_min(family: ConeFamily, norm: NormSpec, xi, tol: Tolerance = DEFAULT_TOL) -> IntersectionPoint:
    """Minimize ||y|| subject to y - xi_w in C_w for every w."""
    xi = as_tuple(xi, family)
    norm.check_dim(family.dim)
    return _solve(family, norm, xi, tol)


def find_intersection_point(family: ConeFamily, xi, tol: Tolerance = DEFAULT_TOL) -> IntersectionPoint:
    """Any point of the intersection (pure feasibility, no norm objective)."""
    return _solve(family, None, as_tuple(xi, family), tol)


@dataclass
class CoadditivityResult:
    coadditive: bool
    # (tuple, IntersectionPoint) per certified signed product-basis tuple
    witnesses: list = field(default_factory=list)
    failing_tuple: np.ndarray | None = None
    certificate: EmptinessCertificate | None = None

    def __bool__(self):
        return self.coadditive

    def validate(self, family: ConeFamily, tol: Tolerance = DEFAULT_TOL) -> bool:
        if not self.coadditive:
            return (self.failing_tuple is not None and self.certificate is not None
                    and self.certificate.validate(family, self.failing_tuple, tol))
        if len(self.witnesses) != 2 * family.dim * len(family):
            return False
        return all(point.validate(family, xi, tol) for xi, point in self.witnesses)


def basis_tuples(family: ConeFamily):
    for w in range(len(family)):
        for i in range(family.dim):
            for s in (1.0, -1.0):
                xi = np.zeros((len(family), family.dim))
                xi[w, i] = s
                yield xi


def is_coadditive(family: ConeFamily, tol: Tolerance = DEFAULT_TOL) -> CoadditivityResult:
    """Decide whether every tuple of translates has a common point.

    The feasible tuples form the sum of the diagonal with the product of the
    negated cones, a set closed under addition and nonnegative scaling; it is
    the whole product space iff it contains all signed product-basis tuples.
    """
    witnesses = []
    for xi in basis_tuples(family):
        try:
            point = find_intersection_point(family, xi, tol)
        except EmptyIntersection as exc:
            return CoadditivityResult(False, witnesses, xi, exc.certificate)
        witnesses.append((xi, point))
    return CoadditivityResult(True, witnesses)


def tuple_points(family: ConeFamily, norm: NormSpec, mode: AlphaMode, samples: int, seed: int) -> np.ndarray:
    """Evaluation tuples for the coadditivity constant, shape (count, |family|, dim)."""
    k, n = len(family), family.dim
    if mode is AlphaMode.EXACT_VERTEX:
        if not norm.is_polyhedral:
            raise NotPolyhedral("EXACT_VERTEX mode needs a polyhedral norm")
        verts = ball_vertices(norm, n)
        return np.array([np.array(combo) for combo in itertools.product(verts, repeat=k)])
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((samples, k, n))
    for t in raw:
        for row in t:
            row /= norm_eval(norm, row)
    return raw


def alpha_coadditive(family: ConeFamily, norm: NormSpec, mode=AlphaMode.EXACT_VERTEX,
                     samples: int = 1000, seed: int = 0, tol: Tolerance = DEFAULT_TOL,
                     refine: bool = False) -> AlphaResult:
    """Supremum over the unit ball of the product sup-norm of the minimal ||y||.

    The minimal norm is convex in the tuple, so the supremum sits at an
    extreme point of the product ball: a tuple of unit vectors.  Exact mode
    sweeps tuples of ball vertices; sampled mode takes seeded unit tuples,
    optionally polished by local search.
    """
    mode = AlphaMode.parse(mode)
    points = tuple_points(family, norm, mode, samples, seed)

    def value(xi):
        try:
            return intersect_min(family, norm, xi, tol).norm
        except EmptyIntersection as exc:
            raise NotCoadditive(f"empty intersection for tuple {xi.tolist()}") from exc

    def project(xi):
        return np.array([row / norm_eval(norm, row) for row in xi])

    values = np.array([value(xi) for xi in points])
    return sampled_result(value, points, values, mode, refine, project)


def upsilon_selection(family: ConeFamily, norm: NormSpec, xi, tol: Tolerance = DEFAULT_TOL) -> IntersectionPoint:
    """Positively homogeneous selection: solve at xi/||xi||_inf, then rescale."""
    xi = as_tuple(xi, family)
    if not np.any(xi):
        zero = [MembershipCertificate(True, coefficients=np.zeros(c.generators.shape[0])) for c in family]
        return IntersectionPoint(np.zeros(family.dim), 0.0, zero)
    r = sup_norm(norm, xi)
    p = intersect_min(family, norm, xi / r, tol)
    scaled = [MembershipCertificate(True, coefficients=c.coefficients * r) for c in p.residuals]
    return IntersectionPoint(p.y * r, p.norm * r, scaled)
