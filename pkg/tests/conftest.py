import math

import numpy as np
import pytest

from conekit.cones import ConeFamily, PolyhedralCone
from conekit.geometry import NormSpec

SQRT2 = math.sqrt(2.0)


def three_rays() -> ConeFamily:
    return ConeFamily((
        PolyhedralCone.ray([1, 0], "e1"),
        PolyhedralCone.ray([0, 1], "e2"),
        PolyhedralCone.ray([-1, -1], "minus_e1_e2"),
    ))


def orthant_and_wedge() -> ConeFamily:
    return ConeFamily((
        PolyhedralCone.orthant(2, "orthant"),
        PolyhedralCone([[1, 1], [1, -1]], "diagonal_wedge"),
    ))


def two_rays() -> ConeFamily:
    return ConeFamily((PolyhedralCone.ray([1, 0], "e1"), PolyhedralCone.ray([0, 1], "e2")))


def whole_space(dim: int = 2) -> ConeFamily:
    return ConeFamily((PolyhedralCone(np.vstack([np.eye(dim), -np.eye(dim)]), "whole"),))


def three_rays_l2_value(x) -> float:
    """Closed-form minimal decomposition value for the three-ray family.

    x = (x1 + c) e1 + (x2 + c) e2 + c (-(e1 + e2)) with c >= max(0, -x1, -x2);
    the cost x1 + x2 + (2 + sqrt 2) c is increasing in c.
    """
    c = max(0.0, -x[0], -x[1])
    return x[0] + x[1] + (2.0 + SQRT2) * c


@pytest.fixture
def l1():
    return NormSpec.l1()


@pytest.fixture
def l2():
    return NormSpec.l2()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def instances():
    """(id, PsiInstance) pairs covering both forms and all bundled families."""
    from conekit.gauge import PsiForm, PsiInstance

    l1, l2 = NormSpec.l1(), NormSpec.l2()
    return [
        ("delta-three-rays-l2", PsiInstance(PsiForm.DELTA, three_rays(), l2)),
        ("delta-orthant-l1", PsiInstance(PsiForm.DELTA, ConeFamily.orthant_pair(2), l1)),
        ("delta-whole-l1", PsiInstance(PsiForm.DELTA, whole_space(), l1)),
        ("upsilon-wedge-l2", PsiInstance(PsiForm.UPSILON, orthant_and_wedge(), l2)),
        ("upsilon-wedge-l1", PsiInstance(PsiForm.UPSILON, orthant_and_wedge(), l1)),
    ]


def random_targets(inst, count, rng):
    return rng.normal(size=(count,) + inst.target_shape) * rng.uniform(0.1, 5, (count,) + (1,) * len(inst.target_shape))


def recession_direction(inst, rng):
    """A direction along which every fibre of the instance is unbounded (possibly zero)."""
    from conekit.gauge import PsiForm, sample_cone_members

    if inst.form is PsiForm.DELTA:
        c = sample_cone_members(inst, 1, rng)[0]
        return c + inst.select(-inst.T(c))
    v = rng.normal(size=inst.family.dim)
    return inst.select(np.tile(v, (len(inst.family), 1))) - v


def boundary_segment_input(inst, rng):
    """(G, alpha, eps0, center, radius, x, y) satisfying the segment witness preconditions.

    y is the selection at a unit base point and alpha its norm; x moves from y
    along a recession direction until it reaches the sphere of radius
    alpha + eps0 (or stays at y when the fibre is bounded in that direction).
    """
    from scipy.optimize import brentq

    from conekit.witnesses import Fibre

    base = random_targets(inst, 1, rng)[0]
    base = base / inst.target_norm(base)
    G = Fibre(inst, base)
    y = inst.select(base)
    alpha = max(G.norm(y), 1e-3)
    eps0 = rng.uniform(0.1, 1.0)
    R = alpha + eps0
    d = recession_direction(inst, rng)
    x = y
    if G.norm(d) > 1e-9:
        f = lambda s: G.norm(y + s * d) - R
        hi = 1.0
        while f(hi) < 0 and hi < 1e9:
            hi *= 2
        if f(hi) > 0:
            x = y + brentq(f, 0.0, hi, xtol=1e-15) * d
    radius = rng.uniform(0.01, 0.5)
    offset = rng.normal(size=np.shape(x))
    center = x + 0.5 * radius * rng.uniform() * offset / G.norm(offset)
    return G, alpha, eps0, center, radius, x, y
