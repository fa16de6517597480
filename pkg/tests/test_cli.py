import csv
import io
import json

import pytest

from conekit.cli import main
from conekit.report import RunReport, dumps, plain, verify_digest


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_check_conormal_positive(capsys):
    code, rep = report(capsys, "check-conormal", "example_1_1.json")
    assert code == 0 and rep["verdicts"]["generating"] is True
    assert rep["certificates"]["validated"] is True
    assert len(rep["certificates"]["decompositions"]) == 4


def test_check_coadditive(capsys):
    code, rep = report(capsys, "check-coadditive", "example_1_2.json")
    assert code == 0 and rep["certificates"]["witness_count"] == 8
    code, rep = report(capsys, "check-coadditive", "rays_e1_e2.json")
    assert code == 1 and rep["verdicts"]["coadditive"] is False
    assert rep["certificates"]["failing_tuple"] == [[1.0, 0.0], [0.0, 0.0]]
    assert rep["certificates"]["validated"] is True


def test_negative_generating(capsys):
    code, rep = report(capsys, "check-conormal", "rays_e1_e2.json")
    assert code == 1 and rep["certificates"]["separator"] is not None


def test_decompose(capsys):
    code, rep = report(capsys, "decompose", "example_1_1.json", "--point", "0,-1")
    assert code == 0
    parts = rep["results"]["parts"]
    assert [sum(c) for c in zip(*parts)] == pytest.approx([0, -1])
    code, rep = report(capsys, "decompose", "rays_e1_e2.json", "--point=-1,0")
    assert code == 1 and rep["certificates"]["validated"] is True


def test_intersect_and_gauge(capsys):
    code, rep = report(capsys, "intersect", "example_1_2.json")
    assert code == 0 and rep["constants"][0]["value"] == pytest.approx(1)
    code, rep = report(capsys, "intersect", "rays_e1_e2.json", "--xi", "1,0;0,0")
    assert code == 1 and rep["certificates"]["validated"] is True
    code, rep = report(capsys, "gauge", "example_1_2.json", "--form", "upsilon", "--point", "0,0;1,0")
    assert code == 0 and rep["results"]["rho"]["value"] == pytest.approx(1)
    code, rep = report(capsys, "gauge", "rays_e1_e2.json", "--point=-1,0")
    assert code == 1 and rep["results"]["rho"]["status"] == "INFINITE"


def test_constants(capsys):
    code, rep = report(capsys, "alpha-conormal", "orthant_pair_l1.json")
    assert code == 0 and rep["constants"][0]["value"] == pytest.approx(1)
    assert rep["constants"][0]["mode"] == "EXACT_VERTEX"
    code, rep = report(capsys, "alpha-coadditive", "example_1_2.json", "--samples", "50")
    assert code == 0 and rep["constants"][0]["mode"] == "SAMPLED_LOWER_BOUND"
    code, rep = report(capsys, "beta", "orthant_pair_l1.json")
    assert code == 0 and rep["results"]["alpha_times_beta"] == pytest.approx(1)
    code, rep = report(capsys, "alpha-conormal", "rays_e1_e2.json", "--mode", "sample", "--samples", "8")
    assert code == 1 and rep["verdicts"]["surjective"] is False


def test_audit_and_probe(capsys):
    code, rep = report(capsys, "audit-selection", "orthant_pair_l1.json", "--mesh-size", "20")
    assert code == 0 and rep["verdicts"]["bound_ok"]
    code, rep = report(capsys, "probe-lipschitz", "orthant_pair_l1.json", "--trials", "50",
                       "--known-constant", "1")
    assert code == 0 and rep["verdicts"]["within_known_constant"]
    assert rep["caveats"]


def test_parameters_echoed(capsys):
    _, rep = report(capsys, "alpha-conormal", "example_1_1.json", "--samples", "64", "--seed", "9",
                    "--mem-tol", "1e-6")
    p = rep["parameters"]
    assert p["samples"] == 64 and p["seed"] == 9 and p["tolerances"]["mem_tol"] == 1e-6
    assert p["tolerances"]["feas_tol"] == 1e-9 and p["mode"] == "SAMPLED_LOWER_BOUND"


def test_determinism_and_digest_round_trip(capsys):
    argv = ("alpha-conormal", "example_1_1.json", "--samples", "200")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    da, db = json.loads(a), json.loads(b)
    assert da["report_digest"] == db["report_digest"]
    da.pop("timing"), db.pop("timing")
    assert da == db
    assert verify_digest(a)
    assert verify_digest(dumps(plain(json.loads(a))))


def test_csv(capsys):
    code, out, _ = run(capsys, "alpha-conormal", "example_1_1.json", "--samples", "100", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0][:4] == ["quantity", "value", "mode", "witness_0"]
    assert rows[1][0] == "alpha_conormal" and rows[1][2] == "SAMPLED_LOWER_BOUND"


def test_float_format():
    assert dumps(0.1) == "0.10000000000000001"
    assert dumps(2.0) == "2.0"
    assert float(dumps(1 / 3)) == 1 / 3


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "alpha-conormal", "example_1_1.json", "--format", "xml")[0] == 2
    assert run(capsys, "decompose", "missing.json", "--point", "1,1")[0] == 2
    assert run(capsys, "decompose", "example_1_1.json", "--point", "1,x")[0] == 2
    assert run(capsys, "decompose", "example_1_1.json", "--point", "1,2,3")[0] == 2
    assert run(capsys, "decompose", "example_1_1.json")[0] == 2
    assert run(capsys, "no-such-command")[0] == 2
    assert run(capsys, "check-conormal", "example_1_1.json", "--out", str(tmp_path / "no" / "x.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "dimension": 2, "norm": {"kind": "L2"}, "cones": []}')
    code, _, err = run(capsys, "check-conormal", str(bad))
    assert code == 2 and "at least one cone required" in err


def test_out_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    assert run(capsys, "check-conormal", "example_1_1.json", "--out", str(path))[0] == 0
    assert verify_digest(path.read_text())


def test_report_object():
    rep = RunReport(["x"], "src", "d")
    rep.add_constant("beta", None, "EXACT_VERTEX")
    assert rep.to_dict()["constants"][0]["value"] is None
    assert "beta,,EXACT_VERTEX" in rep.to_csv()


def test_refined_alpha_is_not_below_the_sample(capsys):
    _, plain_rep = report(capsys, "alpha-coadditive", "example_1_2.json")
    code, refined = report(capsys, "alpha-coadditive", "example_1_2.json", "--refine")
    assert code == 0 and refined["results"]["refined"] is True
    assert refined["constants"][0]["value"] >= plain_rep["constants"][0]["value"]
    assert refined["constants"][0]["value"] == pytest.approx((4 + 2 * 2 ** 0.5) ** 0.5, abs=1e-9)
