import json

import numpy as np
import pytest

from conekit.decomposition import AlphaMode
from conekit.errors import InputError
from conekit.geometry import NormKind
from conekit.problem import fixture_names, parse_problem, parse_problem_bytes


def doc(**overrides):
    base = {"schema_version": 1, "dimension": 2, "norm": {"kind": "L2"},
            "cones": [{"label": "A", "generators": [[1, 0], [0, 1]]}]}
    base.update(overrides)
    return json.dumps(base).encode()


def test_bundled_fixtures_parse():
    names = fixture_names()
    assert {"example_1_1.json", "example_1_2.json", "rays_e1_e2.json", "orthant_pair_l1.json",
            "whole_space.json"} <= set(names)
    for name in names:
        parse_problem(name)


def test_three_ray_fixture():
    p = parse_problem("example_1_1.json")
    assert p.norm.kind is NormKind.L2 and p.dimension == 2
    assert len(p.family) == 3
    np.testing.assert_array_equal(p.family.cones[2].generators, [[-1, -1]])
    assert p.analysis.mode is AlphaMode.SAMPLED_LOWER_BOUND and p.analysis.samples == 10_000
    assert p.digest == parse_problem("example_1_1").digest


def test_file_path(tmp_path):
    path = tmp_path / "p.json"
    path.write_bytes(doc(translations=[[[1, 2]]], analysis={"mode": "exact", "seed": 3,
                                                            "tolerances": {"mem_tol": 1e-6}}))
    p = parse_problem(path)
    assert p.analysis.seed == 3 and p.analysis.tol.mem_tol == 1e-6
    np.testing.assert_array_equal(p.translations[0], [[1, 2]])


@pytest.mark.parametrize("raw,match", [
    (doc(cones=[]), "at least one cone required"),
    (doc(cones=[{"label": "wide", "generators": [[1, 0, 0]]}]), "wide"),
    (doc(cones=[{"label": "ragged", "generators": [[1, 0], [1]]}]), "ragged"),
    (doc(dimension=0), "dimension"),
    (doc(schema_version=9), "schema_version"),
    (doc(norm={"kind": "L7"}), "norm.kind"),
    (doc(norm={"kind": "POLYHEDRAL"}), "ball_vertices"),
    (doc(translations=[[[1, 2, 3]]]), r"translations\[0\]"),
    (doc(analysis={"tolerances": {"bogus": 1}}), "tolerances"),
    (b"{not json", "line 1"),
])
def test_diagnostics(raw, match):
    with pytest.raises(InputError, match=match):
        parse_problem_bytes(raw)


def test_missing_file():
    with pytest.raises(InputError):
        parse_problem("/nonexistent/problem.json")
