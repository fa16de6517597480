import numpy as np
import pytest

from conftest import boundary_segment_input, instances, orthant_and_wedge, random_targets
from conekit.cones import ConeFamily
from conekit.decomposition import AlphaMode
from conekit.errors import PreconditionError
from conekit.gauge import PsiForm, PsiInstance
from conekit.geometry import DEFAULT_TOL, NormSpec
from conekit.intersection import intersect_min
from conekit.witnesses import PolyhedralSet, additivity_holds, segment_witness, transport_witness

INSTANCES = instances()
IDS = [name for name, _ in INSTANCES]
LINE = PolyhedralSet(NormSpec.l2(), A_eq=[[0, 1]], b_eq=[0])


def instance_alpha(inst):
    if inst.norm.is_polyhedral:
        return inst.alpha(AlphaMode.EXACT_VERTEX).alpha
    return inst.alpha(AlphaMode.SAMPLED_LOWER_BOUND, samples=2000).alpha


def test_segment_on_a_line():
    # the segment from (2,0) to 0 is (2 - 2t, 0); it meets U = ball((1.9,0), 0.2) for t in (0, 0.15)
    t0, p = segment_witness(LINE, 1.0, 1.0, [1.9, 0], 0.2, [2, 0], [0, 0])
    assert t0 == 0.125
    np.testing.assert_allclose(p, [1.75, 0])
    assert LINE.norm(p) < 2 - DEFAULT_TOL.feas_tol and LINE.norm(p - [1.9, 0]) < 0.2


def test_segment_rejects_x_outside_the_neighbourhood():
    # x = (2,0) is at distance 0.1 from (1.9,0), outside a ball of radius 0.05
    with pytest.raises(PreconditionError, match="not in U"):
        segment_witness(LINE, 1.0, 1.0, [1.9, 0], 0.05, [2, 0], [0, 0])


def test_segment_interior_point_is_returned():
    t0, p = segment_witness(LINE, 1.0, 1.0, [1.5, 0], 0.1, [1.5, 0], [0, 0])
    assert t0 == 0.0
    np.testing.assert_array_equal(p, [1.5, 0])


def test_segment_precondition_errors():
    with pytest.raises(PreconditionError):
        segment_witness(LINE, 1.0, 1.0, [2, 0], 0.1, [2, 0], [2, 0])
    with pytest.raises(PreconditionError):
        segment_witness(LINE, 1.0, 1.0, [2, 1], 0.1, [2, 1], [0, 0])
    with pytest.raises(PreconditionError):
        segment_witness(LINE, 1.0, 1.0, [3, 0], 0.1, [3, 0], [0, 0])
    with pytest.raises(PreconditionError):
        segment_witness(LINE, -1.0, 1.0, [2, 0], 0.1, [2, 0], [0, 0])


@pytest.mark.parametrize("name,inst", INSTANCES, ids=IDS)
def test_segment_on_fibres(name, inst):
    rng = np.random.default_rng(10)
    for _ in range(100):
        G, alpha, eps0, center, radius, x, y = boundary_segment_input(inst, rng)
        t0, p = segment_witness(G, alpha, eps0, center, radius, x, y)
        assert 0.0 <= t0 <= 1.0
        assert G.contains(p)
        assert G.norm(p) < alpha + eps0 - DEFAULT_TOL.feas_tol
        assert G.norm(p - center) < radius


def test_transport_examples():
    inst = PsiInstance(PsiForm.DELTA, ConeFamily.orthant_pair(2), NormSpec.l1())
    w = transport_witness(inst, [1, 0], [0.8, 0.2], eps=0.1, alpha=1.0)
    np.testing.assert_allclose(w.selected, [[1, 0], [0, 0]], atol=1e-12)
    np.testing.assert_allclose(w.v, [[0, 0.2], [-0.2, 0]], atol=1e-12)
    assert w.v_norm == pytest.approx(0.4)
    np.testing.assert_allclose(w.combined.sum(axis=0), [0.8, 0.2])
    assert w.certified and w.within_bound

    w = transport_witness(inst, [0.5, -0.5], [0.5, -0.5], eps=0.1, alpha=1.0)
    assert not w.v.any()
    np.testing.assert_array_equal(w.combined, w.selected)
    with pytest.raises(PreconditionError):
        transport_witness(inst, [2, 0], [1, 0], eps=0.1, alpha=1.0)


def test_transport_upsilon_matches_intersection_oracle():
    inst = PsiInstance(PsiForm.UPSILON, orthant_and_wedge(), NormSpec.l2())
    alpha = instance_alpha(inst)
    xi = np.array([[0.3, -1.0], [1.0, 0.2]])
    xi /= inst.target_norm(xi)
    xi2 = xi + np.array([[0.01, 0.0], [0.0, -0.02]])
    xi2 /= inst.target_norm(xi2)
    w = transport_witness(inst, xi, xi2, eps=0.1, alpha=alpha)
    assert w.certified
    oracle = intersect_min(orthant_and_wedge(), NormSpec.l2(), xi2 - xi).norm
    assert w.v_norm == pytest.approx(oracle, rel=1e-9)
    assert inst.cone_norm(w.combined) <= inst.cone_norm(w.selected) + (alpha + 0.1) * inst.target_norm(xi2 - xi)


@pytest.mark.parametrize("name,inst", INSTANCES, ids=IDS)
def test_transport_on_random_pairs(name, inst):
    rng = np.random.default_rng(11)
    alpha = instance_alpha(inst)
    X = random_targets(inst, 100, rng)
    for x in X:
        x = x / inst.target_norm(x)
        z = x + rng.uniform(1e-4, 0.3) * rng.normal(size=x.shape)
        z = z / inst.target_norm(z)
        w = transport_witness(inst, x, z, eps=0.1, alpha=alpha)
        assert w.certified and w.within_bound


@pytest.mark.parametrize("name,inst", INSTANCES, ids=IDS)
def test_additivity(name, inst):
    rng = np.random.default_rng(12)
    for a, b in zip(random_targets(inst, 30, rng), random_targets(inst, 30, rng)):
        assert additivity_holds(inst, a, b)
