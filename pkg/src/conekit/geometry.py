"""Norms on R^n, their unit balls and spheres, and the shared tolerance policy."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull

from .errors import InputError, NotPolyhedral


class NormKind(str, enum.Enum):
    L1 = "L1"
    L2 = "L2"
    LINF = "LINF"
    POLYHEDRAL = "POLYHEDRAL"


@dataclass(frozen=True)
class Tolerance:
    """Numerical tolerances.

    ``feas_tol`` governs LP feasibility decisions, ``mem_tol`` the looser
    re-validation of certificates and reports, and ``gap_tol`` the stopping
    rule of the Euclidean cutting-plane loop.
    """

    feas_tol: float = 1e-9
    mem_tol: float = 1e-7
    gap_tol: float = 1e-7

    def __post_init__(self):
        for name in ("feas_tol", "mem_tol", "gap_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InputError(f"{name} must be strictly positive, got {value}")
        if self.feas_tol > self.mem_tol:
            raise InputError("feas_tol must not exceed mem_tol")


DEFAULT_TOL = Tolerance()


def as_vector(x, dim: int | None = None, name: str = "x") -> np.ndarray:
    """Coerce ``x`` to a finite 1-d float array, optionally checking its length."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError(f"{name} must be a non-empty vector")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    if dim is not None and arr.size != dim:
        raise InputError(f"{name} has dimension {arr.size}, expected {dim}")
    return arr


@dataclass(frozen=True)
class NormSpec:
    """A norm on R^n.

    ``weights`` scale coordinates for L1 (sum of w_i |x_i|) and LINF
    (max of w_i |x_i|).  A POLYHEDRAL norm is the gauge of the convex hull of
    ``ball_vertices``, which must be centrally symmetric and full-dimensional.
    """

    kind: NormKind
    weights: tuple[float, ...] | None = None
    ball_vertices: tuple[tuple[float, ...], ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", NormKind(self.kind))
        if self.weights is not None:
            if self.kind not in (NormKind.L1, NormKind.LINF):
                raise InputError("weights are only meaningful for L1 and LINF norms")
            w = as_vector(self.weights, name="weights")
            if np.any(w <= 0):
                raise InputError("norm weights must be strictly positive")
            object.__setattr__(self, "weights", tuple(float(v) for v in w))
        if self.kind is NormKind.POLYHEDRAL:
            if not self.ball_vertices:
                raise InputError("POLYHEDRAL norm requires ball_vertices")
            verts = np.asarray(self.ball_vertices, dtype=float)
            if verts.ndim != 2 or not np.all(np.isfinite(verts)):
                raise InputError("ball_vertices must be a finite list of equal-length vectors")
            _check_symmetric_body(verts)
            object.__setattr__(self, "ball_vertices", tuple(tuple(map(float, v)) for v in verts))
        elif self.ball_vertices is not None:
            raise InputError("ball_vertices are only meaningful for POLYHEDRAL norms")

    @classmethod
    def l1(cls, weights=None) -> NormSpec:
        return cls(NormKind.L1, None if weights is None else tuple(weights))

    @classmethod
    def l2(cls) -> NormSpec:
        return cls(NormKind.L2)

    @classmethod
    def linf(cls, weights=None) -> NormSpec:
        return cls(NormKind.LINF, None if weights is None else tuple(weights))

    @classmethod
    def polyhedral(cls, vertices) -> NormSpec:
        return cls(NormKind.POLYHEDRAL, ball_vertices=tuple(tuple(v) for v in vertices))

    @property
    def dim(self) -> int | None:
        """Dimension fixed by the parameters, or None for dimension-free norms."""
        if self.ball_vertices is not None:
            return len(self.ball_vertices[0])
        if self.weights is not None:
            return len(self.weights)
        return None

    @property
    def is_polyhedral(self) -> bool:
        return self.kind is not NormKind.L2

    def weight_vector(self, dim: int) -> np.ndarray:
        if self.weights is None:
            return np.ones(dim)
        return np.asarray(self.weights)

    def check_dim(self, dim: int) -> None:
        if self.dim is not None and self.dim != dim:
            raise InputError(f"norm is defined on R^{self.dim}, got dimension {dim}")

    @cached_property
    def facet_normals(self) -> np.ndarray:
        """Rows a with gauge(x) = max_a a.x (POLYHEDRAL only)."""
        if self.kind is not NormKind.POLYHEDRAL:
            raise NotPolyhedral(f"{self.kind.value} norm has no facet description here")
        return _facet_normals(np.asarray(self.ball_vertices))

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.weights is not None:
            out["weights"] = list(self.weights)
        if self.ball_vertices is not None:
            out["ball_vertices"] = [list(v) for v in self.ball_vertices]
        return out


def _check_symmetric_body(verts: np.ndarray) -> None:
    for v in verts:
        if not np.any(np.all(np.abs(verts + v) <= 1e-12 * (1 + np.abs(v)), axis=1)):
            raise InputError(f"ball_vertices not centrally symmetric: missing -{v.tolist()}")
    if np.linalg.matrix_rank(verts) < verts.shape[1]:
        raise InputError("ball_vertices span a lower-dimensional body; the gauge is not a norm")


def _facet_normals(verts: np.ndarray) -> np.ndarray:
    if verts.shape[1] == 1:
        r = np.abs(verts).max()
        return np.array([[1.0 / r], [-1.0 / r]])
    hull = ConvexHull(verts)
    a, b = hull.equations[:, :-1], hull.equations[:, -1]
    # qhull writes facets as a.x + b <= 0 with b < 0 because 0 is interior
    normals = a / (-b)[:, None]
    return np.unique(np.round(normals, 14), axis=0)


def norm_eval(norm: NormSpec, x) -> float:
    """Evaluate the norm of ``x``."""
    x = as_vector(x)
    norm.check_dim(x.size)
    kind = norm.kind
    if kind is NormKind.L2:
        return float(np.linalg.norm(x))
    if kind is NormKind.L1:
        return float(np.sum(norm.weight_vector(x.size) * np.abs(x)))
    if kind is NormKind.LINF:
        return float(np.max(norm.weight_vector(x.size) * np.abs(x)))
    return max(0.0, float(np.max(norm.facet_normals @ x)))


def ball_vertices(norm: NormSpec, dim: int) -> np.ndarray:
    """Extreme points of the closed unit ball, one per row."""
    norm.check_dim(dim)
    kind = norm.kind
    if kind is NormKind.L2:
        raise NotPolyhedral("the Euclidean unit ball has no finite vertex set")
    w = norm.weight_vector(dim)
    if kind is NormKind.L1:
        out = []
        for i in range(dim):
            for sign in (1.0, -1.0):
                v = np.zeros(dim)
                v[i] = sign / w[i]
                out.append(v)
        return np.array(out)
    if kind is NormKind.LINF:
        signs = np.array(list(itertools.product((1.0, -1.0), repeat=dim)))
        return signs / w
    verts = np.asarray(norm.ball_vertices)
    if dim == 1:
        return np.array([[np.abs(verts).max()], [-np.abs(verts).max()]])
    idx = np.sort(ConvexHull(verts).vertices)
    return verts[idx]


def sphere_mesh(norm: NormSpec, dim: int, count: int, seed: int = 0) -> np.ndarray:
    """Points on the unit sphere: an angular grid in R^2, seeded directions otherwise."""
    if count < 1:
        raise InputError("count must be at least 1")
    if dim < 1:
        raise InputError("dim must be positive")
    norm.check_dim(dim)
    if dim == 1:
        pts = np.where(np.arange(count) % 2 == 0, 1.0, -1.0)[:, None]
    elif dim == 2:
        theta = 2.0 * np.pi * np.arange(count) / count
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((count, dim))
    return np.array([p / norm_eval(norm, p) for p in pts])
