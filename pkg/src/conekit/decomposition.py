"""Minimal-norm decompositions x = sum of cone parts and the conormality constant."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .cones import ConeFamily, _membership
from .errors import InputError, NotDecomposable, NotGenerating, NotPolyhedral
from .formulation import CompiledModel, Program, add_norm_cost, additive_costs
from .geometry import DEFAULT_TOL, NormSpec, Tolerance, as_vector, ball_vertices, norm_eval, sphere_mesh
from .lp import LpStatus


class AlphaMode(str, enum.Enum):
    EXACT_VERTEX = "EXACT_VERTEX"
    SAMPLED_LOWER_BOUND = "SAMPLED_LOWER_BOUND"

    @classmethod
    def parse(cls, mode) -> AlphaMode:
        if isinstance(mode, cls):
            return mode
        aliases = {"exact": cls.EXACT_VERTEX, "sample": cls.SAMPLED_LOWER_BOUND,
                   "sampled": cls.SAMPLED_LOWER_BOUND}
        key = str(mode)
        if key.lower() in aliases:
            return aliases[key.lower()]
        try:
            return cls(key.upper())
        except ValueError:
            raise InputError(f"unknown mode {mode!r}") from None


@dataclass
class Decomposition:
    """One part per cone; ``value`` is the sum of the parts' norms."""

    parts: np.ndarray
    value: float

    def total(self) -> np.ndarray:
        return self.parts.sum(axis=0)

    def to_dict(self, labels=None) -> dict:
        out = {"value": self.value, "parts": self.parts.tolist()}
        if labels is not None:
            out["labels"] = list(labels)
        return out


@dataclass
class AlphaResult:
    alpha: float
    mode: AlphaMode
    witness: np.ndarray
    samples: int
    values: np.ndarray | None = None
    refined: bool = False

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "mode": self.mode.value, "refined": self.refined,
                "witness": np.asarray(self.witness).tolist(), "samples": self.samples}


@lru_cache(maxsize=128)
def _delta_model(family: ConeFamily, norm: NormSpec) -> tuple[CompiledModel, list[np.ndarray]]:
    n = family.dim
    prog = Program()
    coeffs, plain = [], []
    for cone in family:
        costs = additive_costs(norm, cone.generators)
        coeffs.append(prog.var(cone.generators.shape[0], cost=0.0 if costs is None else costs))
        plain.append(costs is None)
    prog.eq([(lam, cone.generators.T) for lam, cone in zip(coeffs, family)], np.zeros(n))
    handles = []
    for lam, cone, needs_epigraph in zip(coeffs, family, plain):
        if needs_epigraph:
            h = add_norm_cost(prog, norm, [(lam, cone.generators.T)], n)
            if h is not None:
                handles.append(h)
    return CompiledModel(prog.to_lp(), n, tuple(handles)), coeffs


def decompose_min(family: ConeFamily, norm: NormSpec, x, tol: Tolerance = DEFAULT_TOL) -> Decomposition:
    """Minimize sum_w ||c_w|| over decompositions x = sum_w c_w with c_w in C_w.

    Cones on which the norm is additive contribute a linear cost directly;
    the others get an exact epigraph (polyhedral norms) or cutting planes (L2).
    """
    x = as_vector(x, family.dim)
    norm.check_dim(family.dim)
    model, coeffs = _delta_model(family, norm)
    out = model.solve(x, tol)
    if out.status is LpStatus.INFEASIBLE:
        G, _ = family.stacked_generators()
        raise NotDecomposable(x, _membership(G, x, tol))
    z = out.solution
    parts = np.array([cone.generators.T @ np.maximum(z[lam], 0.0) for lam, cone in zip(coeffs, family)])
    return Decomposition(parts, float(sum(norm_eval(norm, p) for p in parts)))


def _argmax_first(values: np.ndarray) -> int:
    best = values.max()
    return int(np.flatnonzero(values >= best - 1e-12 * max(1.0, abs(best)))[0])


def evaluation_points(norm: NormSpec, dim: int, mode: AlphaMode, samples: int, seed: int) -> np.ndarray:
    if mode is AlphaMode.EXACT_VERTEX:
        if not norm.is_polyhedral:
            raise NotPolyhedral("EXACT_VERTEX mode needs a polyhedral norm")
        return ball_vertices(norm, dim)
    return sphere_mesh(norm, dim, samples, seed)


def refine_supremum(objective, start: np.ndarray, project) -> tuple[float, np.ndarray]:
    """Climb from a sampled maximizer with Nelder-Mead; ``project`` maps onto the sphere.

    The result is still attained at an actual point, so it stays a lower bound.
    """
    shape = start.shape
    res = minimize(lambda v: -objective(project(v.reshape(shape))), start.ravel(), method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 200 * start.size})
    point = project(res.x.reshape(shape))
    return objective(point), point


def sampled_result(objective, points: np.ndarray, values: np.ndarray, mode: AlphaMode, refine: bool,
                   project) -> AlphaResult:
    k = _argmax_first(values)
    best, witness = float(values[k]), points[k].copy()
    refined = False
    if refine and mode is AlphaMode.SAMPLED_LOWER_BOUND:
        value, point = refine_supremum(objective, witness, project)
        if value > best:
            best, witness, refined = value, point, True
    return AlphaResult(best, mode, witness, len(points), values, refined)


def alpha_conormal(family: ConeFamily, norm: NormSpec, mode=AlphaMode.EXACT_VERTEX,
                   samples: int = 1000, seed: int = 0, tol: Tolerance = DEFAULT_TOL,
                   refine: bool = False) -> AlphaResult:
    """Supremum of the minimal decomposition value over the unit sphere.

    The value function is convex and positively homogeneous, so for a
    polyhedral norm its maximum over the ball sits at a ball vertex and the
    vertex sweep is exact.  Sampling the sphere only gives a lower bound;
    ``refine`` polishes the best sample by local search.
    """
    mode = AlphaMode.parse(mode)
    points = evaluation_points(norm, family.dim, mode, samples, seed)

    def value(p):
        try:
            return decompose_min(family, norm, p, tol).value
        except NotDecomposable as exc:
            raise NotGenerating(f"no decomposition of {p.tolist()}") from exc

    values = np.array([value(p) for p in points])
    return sampled_result(value, points, values, mode, refine, lambda v: v / norm_eval(norm, v))


def delta_selection(family: ConeFamily, norm: NormSpec, x, tol: Tolerance = DEFAULT_TOL) -> Decomposition:
    """Positively homogeneous selection: solve on the unit sphere, then rescale."""
    x = as_vector(x, family.dim)
    if not np.any(x):
        return Decomposition(np.zeros((len(family), family.dim)), 0.0)
    r = norm_eval(norm, x)
    d = decompose_min(family, norm, x / r, tol)
    return Decomposition(d.parts * r, d.value * r)
