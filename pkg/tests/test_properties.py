"""Property-based checks with generated inputs."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import three_rays, three_rays_l2_value
from conekit.cones import ConeFamily
from conekit.decomposition import decompose_min
from conekit.gauge import PsiForm, PsiInstance, gauge_rho
from conekit.geometry import NormSpec

finite = st.floats(-100, 100, allow_nan=False, allow_infinity=False)
ORTHANTS = PsiInstance(PsiForm.DELTA, ConeFamily.orthant_pair(3), NormSpec.l1())


@settings(max_examples=200, deadline=None)
@given(arrays(float, 2, elements=finite))
def test_three_rays_match_closed_form(x):
    d = decompose_min(three_rays(), NormSpec.l2(), x)
    assert abs(d.value - three_rays_l2_value(x)) <= 1e-9 * max(1.0, np.abs(x).max())
    assert np.abs(d.total() - x).max() <= 1e-9 * max(1.0, np.abs(x).max())


@settings(max_examples=200, deadline=None)
@given(arrays(float, 3, elements=finite), arrays(float, 3, elements=finite), st.floats(0, 50))
def test_gauge_is_sublinear(a, b, lam):
    ra, rb = gauge_rho(ORTHANTS, a).value, gauge_rho(ORTHANTS, b).value
    assert abs(ra - np.abs(a).sum()) <= 1e-12 * max(1.0, ra)
    assert gauge_rho(ORTHANTS, a + b).value <= ra + rb + 1e-9
    assert abs(gauge_rho(ORTHANTS, lam * a).value - lam * ra) <= 1e-9 * max(1.0, lam * ra)
