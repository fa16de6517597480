import numpy as np
import pytest
from scipy.optimize import linprog

from conekit.errors import InputError, NotPolyhedral
from conekit.geometry import NormKind, NormSpec, Tolerance, ball_vertices, norm_eval, sphere_mesh

HEXAGON = [[1, 0], [0.5, 1], [-0.5, 1], [-1, 0], [-0.5, -1], [0.5, -1]]
NORMS = [NormSpec.l1(), NormSpec.l2(), NormSpec.linf(), NormSpec.l1([1, 3]), NormSpec.linf([2, 0.5]),
         NormSpec.polyhedral(HEXAGON)]


def gauge_lp(vertices, x):
    """min t s.t. x = V^T mu, sum mu = t, mu >= 0."""
    V = np.asarray(vertices, dtype=float)
    m = len(V)
    res = linprog(np.ones(m), A_eq=V.T, b_eq=x, bounds=[(0, None)] * m, method="highs")
    assert res.status == 0
    return res.fun


def test_norm_examples():
    assert norm_eval(NormSpec.l1(), [3, -4]) == 7
    assert norm_eval(NormSpec.l2(), [0, 0]) == 0
    assert norm_eval(NormSpec.l2(), [3, -4]) == pytest.approx(5)
    assert norm_eval(NormSpec.linf(), [3, -4]) == 4
    diamond = NormSpec.polyhedral([[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert norm_eval(diamond, [3, -4]) == pytest.approx(7, rel=1e-12)


@pytest.mark.parametrize("norm", NORMS, ids=lambda n: n.kind.value)
def test_homogeneity_and_triangle(norm):
    rng = np.random.default_rng(0)
    for _ in range(1000):
        x, y = rng.normal(size=(2, 2)) * rng.uniform(0.01, 100)
        lam = rng.uniform(0, 10)
        nx = norm_eval(norm, x)
        assert norm_eval(norm, lam * x) == pytest.approx(lam * nx, rel=1e-12, abs=1e-300)
        assert norm_eval(norm, x + y) <= nx + norm_eval(norm, y) + 1e-12 * (1 + nx)


def test_polyhedral_gauge_matches_lp_oracle():
    norm = NormSpec.polyhedral(HEXAGON)
    rng = np.random.default_rng(1)
    for x in rng.normal(size=(200, 2)):
        assert norm_eval(norm, x) == pytest.approx(gauge_lp(HEXAGON, x), rel=1e-9)


def test_ball_vertices():
    assert {tuple(v) for v in ball_vertices(NormSpec.l1(), 2)} == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    corners = ball_vertices(NormSpec.linf(), 2)
    assert len(corners) == 4 and {tuple(v) for v in corners} == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    with pytest.raises(NotPolyhedral):
        ball_vertices(NormSpec.l2(), 2)
    assert len(ball_vertices(NormSpec.polyhedral(HEXAGON), 2)) == 6


def test_sphere_mesh():
    grid = sphere_mesh(NormSpec.l2(), 2, 4)
    np.testing.assert_allclose(grid, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)
    for v in sphere_mesh(NormSpec.l1(), 2, 4):
        assert norm_eval(NormSpec.l1(), v) == pytest.approx(1)
    a = sphere_mesh(NormSpec.l2(), 3, 100, seed=7)
    b = sphere_mesh(NormSpec.l2(), 3, 100, seed=7)
    assert a.shape == (100, 3)
    assert np.array_equal(a, b)
    np.testing.assert_allclose(np.linalg.norm(a, axis=1), 1, rtol=1e-14)
    with pytest.raises(InputError):
        sphere_mesh(NormSpec.l2(), 2, 0)


def test_invalid_norms_and_tolerances():
    with pytest.raises(InputError):
        NormSpec.polyhedral([[1, 0], [0, 1], [-1, -1]])  # not symmetric
    with pytest.raises(InputError):
        NormSpec.l1([1, -2])
    with pytest.raises(InputError):
        Tolerance(feas_tol=-1)
    with pytest.raises(InputError):
        norm_eval(NormSpec.l2(), [np.nan, 0])
    assert NormSpec.l1().kind is NormKind.L1
