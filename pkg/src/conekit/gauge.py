"""Surjections of the form c -> Tc + D and the gauge they induce.

Two concrete instances are provided.  In DELTA form the domain cone is the
product of the family's cones with the l1 metric, T sums the parts and D is
{0}; the gauge is then the minimal decomposition value.  In UPSILON form the
domain is X itself, T copies x into every slot of the product space (sup
norm) and D is the product of the negated cones; the gauge is the minimal
norm of a point common to all translates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .cones import ConeFamily, cone_membership
from .decomposition import (
    AlphaMode,
    AlphaResult,
    alpha_conormal,
    decompose_min,
    delta_selection,
    evaluation_points,
)
from .errors import EmptyIntersection, InputError, NotCoadditive, NotDecomposable, NotGenerating
from .geometry import DEFAULT_TOL, NormSpec, Tolerance, norm_eval, sphere_mesh
from .intersection import (
    alpha_coadditive,
    as_tuple,
    intersect_min,
    sup_norm,
    tuple_points,
    upsilon_selection,
)


class PsiForm(str, enum.Enum):
    DELTA = "DELTA"
    UPSILON = "UPSILON"


@dataclass(frozen=True)
class PsiInstance:
    form: PsiForm
    family: ConeFamily
    norm: NormSpec

    def __post_init__(self):
        object.__setattr__(self, "form", PsiForm(self.form))
        self.norm.check_dim(self.family.dim)

    # --- the codomain Y -------------------------------------------------
    @property
    def target_shape(self) -> tuple[int, ...]:
        if self.form is PsiForm.DELTA:
            return (self.family.dim,)
        return (len(self.family), self.family.dim)

    def as_target(self, y) -> np.ndarray:
        if self.form is PsiForm.DELTA:
            y = np.asarray(y, dtype=float)
            if y.shape != self.target_shape or not np.all(np.isfinite(y)):
                raise InputError(f"expected a finite vector of shape {self.target_shape}")
            return y
        return as_tuple(y, self.family)

    def target_norm(self, y) -> float:
        if self.form is PsiForm.DELTA:
            return norm_eval(self.norm, y)
        return sup_norm(self.norm, y)

    def target_sphere(self, count: int, seed: int) -> np.ndarray:
        """Points with target norm one; an angular grid for DELTA in the plane."""
        if self.form is PsiForm.DELTA:
            return sphere_mesh(self.norm, self.family.dim, count, seed)
        if count < 1:
            raise InputError("count must be at least 1")
        rng = np.random.default_rng(seed)
        raw = rng.standard_normal((count,) + self.target_shape)
        return np.array([t / self.target_norm(t) for t in raw])

    def target_points(self, mode: AlphaMode, samples: int, seed: int) -> np.ndarray:
        if self.form is PsiForm.DELTA:
            return evaluation_points(self.norm, self.family.dim, mode, samples, seed)
        return tuple_points(self.family, self.norm, mode, samples, seed)

    # --- the metric cone C and the maps T, D ----------------------------
    def cone_norm(self, c) -> float:
        c = np.asarray(c, dtype=float)
        if self.form is PsiForm.DELTA:
            return float(sum(norm_eval(self.norm, part) for part in c))
        return norm_eval(self.norm, c)

    def distance(self, a, b) -> float:
        return self.cone_norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))

    def T(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        if self.form is PsiForm.DELTA:
            return c.sum(axis=0)
        return np.tile(c, (len(self.family), 1))

    def in_cone(self, c, tol: Tolerance = DEFAULT_TOL) -> bool:
        """Membership in the domain cone C."""
        if self.form is PsiForm.UPSILON:
            return True
        return all(cone_membership(cone, part, tol).member for cone, part in zip(self.family, c))

    def in_D(self, d, tol: Tolerance = DEFAULT_TOL) -> bool:
        d = np.asarray(d, dtype=float)
        if self.form is PsiForm.DELTA:
            return bool(np.abs(d).max() <= tol.mem_tol)
        return all(cone_membership(cone, -row, tol).member for cone, row in zip(self.family, d))

    def contains(self, c, y, tol: Tolerance = DEFAULT_TOL) -> bool:
        """Whether y lies in Psi(c) = Tc + D, with c in C."""
        scale = 1.0 + np.abs(np.asarray(y, dtype=float)).max()
        scaled = Tolerance(tol.feas_tol, tol.mem_tol * scale, tol.gap_tol)
        return self.in_cone(c, tol) and self.in_D(np.asarray(y) - self.T(c), scaled)

    # --- optimizers -----------------------------------------------------
    def minimal_preimage(self, y, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, float]:
        """A c minimizing the cone norm subject to y in Psi(c)."""
        y = self.as_target(y)
        if self.form is PsiForm.DELTA:
            d = decompose_min(self.family, self.norm, y, tol)
            return d.parts, d.value
        p = intersect_min(self.family, self.norm, y, tol)
        return p.y, p.norm

    def select(self, y, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
        """The positively homogeneous selection evaluated at y."""
        y = self.as_target(y)
        if self.form is PsiForm.DELTA:
            return delta_selection(self.family, self.norm, y, tol).parts
        return upsilon_selection(self.family, self.norm, y, tol).y

    def select_with_residual(self, y, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, float]:
        """The selection at y and how far it is from certifying y in Psi(selection)."""
        y = self.as_target(y)
        if self.form is PsiForm.DELTA:
            parts = delta_selection(self.family, self.norm, y, tol).parts
            return parts, self.target_norm(parts.sum(axis=0) - y)
        p = upsilon_selection(self.family, self.norm, y, tol)
        worst = 0.0
        for cone, row, cert in zip(self.family, y, p.residuals):
            lam = cert.coefficients
            worst = max(worst, float(np.abs(cone.combine(lam) - (p.y - row)).max()), float(-lam.min()))
        return p.y, worst

    def alpha(self, mode=AlphaMode.EXACT_VERTEX, samples: int = 1000, seed: int = 0,
              tol: Tolerance = DEFAULT_TOL, refine: bool = False) -> AlphaResult:
        if self.form is PsiForm.DELTA:
            return alpha_conormal(self.family, self.norm, mode, samples, seed, tol, refine)
        return alpha_coadditive(self.family, self.norm, mode, samples, seed, tol, refine)


@dataclass(frozen=True)
class GaugeValue:
    """rho(y), or an explicit infinite status when y is outside the image."""

    finite: bool
    value: float | None = None

    @classmethod
    def infinite(cls) -> GaugeValue:
        return cls(False, None)

    def to_dict(self) -> dict:
        return {"status": "FINITE" if self.finite else "INFINITE", "value": self.value}


def gauge_rho(inst: PsiInstance, y, tol: Tolerance = DEFAULT_TOL) -> GaugeValue:
    """rho(y) = inf { [[c]] : y in Tc + D }.

    Evaluated at y/|y| and rescaled, so homogeneity holds to rounding even
    when the optimizer itself is only accurate to the cutting-plane gap.
    """
    y = inst.as_target(y)
    r = inst.target_norm(y)
    if r == 0.0:
        return GaugeValue(True, 0.0)
    try:
        _, value = inst.minimal_preimage(y / r, tol)
    except (NotDecomposable, EmptyIntersection):
        return GaugeValue.infinite()
    return GaugeValue(True, value * r)


def seminorm_q(inst: PsiInstance, y, tol: Tolerance = DEFAULT_TOL) -> GaugeValue:
    """q(y) = max(rho(y), rho(-y))."""
    y = inst.as_target(y)
    a, b = gauge_rho(inst, y, tol), gauge_rho(inst, -y, tol)
    if not (a.finite and b.finite):
        return GaugeValue.infinite()
    return GaugeValue(True, max(a.value, b.value))


@dataclass
class BetaResult:
    beta: float
    alpha_times_beta: float | None
    mode: AlphaMode
    witness: np.ndarray
    samples: int

    def to_dict(self) -> dict:
        return {"beta": self.beta if math.isfinite(self.beta) else None,
                "beta_status": "FINITE" if math.isfinite(self.beta) else "INFINITE",
                "alpha_times_beta": self.alpha_times_beta, "mode": self.mode.value,
                "witness": np.asarray(self.witness).tolist(), "samples": self.samples}


def beta_openness(inst: PsiInstance, mode=AlphaMode.EXACT_VERTEX, samples: int = 1000, seed: int = 0,
                  tol: Tolerance = DEFAULT_TOL) -> BetaResult:
    """Largest beta with beta * (open unit ball of Y) inside Psi(open unit ball of C).

    Since rho is positively homogeneous and its strict sublevel set at 1 is
    Psi of the open ball, beta is the reciprocal of sup rho over the sphere.
    Exact over ball vertices for polyhedral norms; otherwise the sampled value
    is an upper bound.
    """
    mode = AlphaMode.parse(mode)
    points = inst.target_points(mode, samples, seed)
    values = np.empty(len(points))
    for i, p in enumerate(points):
        g = gauge_rho(inst, p, tol)
        if not g.finite:
            raise _not_surjective(inst)
        values[i] = g.value
    k = int(np.argmax(values))
    top = float(values[k])
    beta = math.inf if top == 0.0 else 1.0 / top
    alpha = inst.alpha(mode, samples, seed, tol).alpha
    product = None if not math.isfinite(beta) else alpha * beta
    return BetaResult(beta, product, mode, points[k].copy(), len(points))


def _not_surjective(inst: PsiInstance) -> Exception:
    if inst.form is PsiForm.DELTA:
        return NotGenerating("the family does not generate the space")
    return NotCoadditive("some tuple of translates has empty intersection")


def sample_cone_members(inst: PsiInstance, count: int, rng: np.random.Generator) -> np.ndarray:
    """Random members of the domain cone C (nonnegative generator combinations)."""
    if inst.form is PsiForm.UPSILON:
        return rng.uniform(-2.0, 2.0, (count, inst.family.dim))
    out = np.empty((count, len(inst.family), inst.family.dim))
    for j, cone in enumerate(inst.family):
        lam = rng.uniform(0.0, 2.0, (count, cone.generators.shape[0]))
        out[:, j, :] = lam @ cone.generators
    return out


def metric_cone_axioms(inst: PsiInstance, count: int = 100, seed: int = 0,
                       tol: Tolerance = DEFAULT_TOL) -> dict[str, float]:
    """Worst relative violation of each abstract/metric cone law on sampled triples.

    Covers the eight abstract cone laws, closure of C under the operations,
    the two metric cone laws, the metric axioms, and additivity plus positive
    homogeneity of T.
    """
    rng = np.random.default_rng(seed)
    U, V, W = (sample_cone_members(inst, count, rng) for _ in range(3))
    lams = rng.uniform(0.0, 3.0, count)
    mus = rng.uniform(0.0, 3.0, count)
    d = inst.distance
    zero = np.zeros_like(U[0])

    def rel(a, b):
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        return float(np.abs(a - b).max() / (1.0 + max(np.abs(a).max(), np.abs(b).max())))

    worst: dict[str, float] = {}

    def record(name, err):
        worst[name] = max(worst.get(name, 0.0), err)

    for u, v, w, lam, mu in zip(U, V, W, lams, mus):
        record("zero_identity", rel(u + zero, u))
        record("associativity", rel((u + v) + w, u + (v + w)))
        record("commutativity", rel(u + v, v + u))
        record("cancellation", rel((u + v) - u, v))
        record("unit_scaling", rel(1.0 * u, u))
        record("scalar_associativity", rel((lam * mu) * u, lam * (mu * u)))
        record("scalar_distributivity", rel((lam + mu) * u, lam * u + mu * u))
        record("vector_distributivity", rel(lam * (u + v), lam * u + lam * v))
        record("homogeneity", rel(d(zero, lam * u), lam * d(zero, u)))
        record("translation_contraction", max(0.0, d(u + v, u + w) - d(v, w)) / (1.0 + d(v, w)))
        record("metric_symmetry", rel(d(u, v), d(v, u)))
        record("metric_identity", abs(d(u, u)))
        record("triangle", max(0.0, d(u, w) - d(u, v) - d(v, w)) / (1.0 + d(u, w)))
        record("T_additive", rel(inst.T(u + v), inst.T(u) + inst.T(v)))
        record("T_homogeneous", rel(inst.T(lam * u), lam * inst.T(u)))
    closed = all(inst.in_cone(u + v, tol) and inst.in_cone(lam * u, tol)
                 for u, v, lam in zip(U, V, lams))
    worst["closure"] = 0.0 if closed else 1.0
    return worst
