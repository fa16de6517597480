"""Command-line front end.

Exit codes: 0 success or positive verdict, 1 negative verdict or
infeasibility, 2 input error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .audit import continuity_audit, lipschitz_probe
from .cones import PolyhedralCone, cone_membership, is_generating
from .decomposition import AlphaMode, alpha_conormal, decompose_min
from .errors import (
    EmptyIntersection,
    InputError,
    ConeKitError,
    NotCoadditive,
    NotDecomposable,
    NotGenerating,
    SolverError,
)
from .gauge import PsiForm, PsiInstance, beta_openness, gauge_rho, seminorm_q
from .geometry import Tolerance
from .intersection import alpha_coadditive, find_intersection_point, intersect_min, is_coadditive
from .problem import ProblemFile, parse_problem
from .report import FORMATS, RunReport

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3
SAMPLED_CAVEAT = "sampled estimate: a lower bound for the supremum"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def parse_point(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise InputError(f"cannot parse point {text!r}; expected comma-separated numbers") from None


def parse_tuple(text: str) -> np.ndarray:
    rows = [parse_point(part) for part in text.split(";")]
    if len({len(r) for r in rows}) != 1:
        raise InputError(f"tuple {text!r} has rows of different lengths")
    return np.array(rows)


def _settings(args, prob: ProblemFile):
    a = prob.analysis
    tol = Tolerance(
        args.tol if args.tol is not None else a.tol.feas_tol,
        args.mem_tol if args.mem_tol is not None else a.tol.mem_tol,
        args.gap_tol if args.gap_tol is not None else a.tol.gap_tol,
    )
    mode = AlphaMode.parse(args.mode) if args.mode is not None else a.mode
    samples = args.samples if args.samples is not None else a.samples
    seed = args.seed if args.seed is not None else a.seed
    if samples < 1:
        raise InputError("--samples must be at least 1")
    return tol, mode, samples, seed


def _decomposition_certificate(family, parts, x, tol) -> dict:
    members = [cone_membership(cone, p, tol) for cone, p in zip(family, parts)]
    ok = all(m.member and m.validate(c.generators, p, tol) for m, c, p in zip(members, family, parts))
    ok = ok and bool(np.abs(parts.sum(axis=0) - x).max() <= tol.mem_tol * (1 + np.abs(x).max()))
    return {"kind": "decomposition", "parts": parts, "coefficients": [m.coefficients for m in members],
            "validated": ok}


# --- subcommands ------------------------------------------------------------
# Each takes (args, prob, report, tol, mode, samples, seed) and returns an exit code.

def cmd_check_conormal(args, prob, rep, tol, *_):
    res = is_generating(prob.family, tol)
    valid = res.validate(prob.family, tol)
    rep.verdicts["generating"] = res.generating
    rep.certificates = {
        "kind": "signed_basis_decompositions" if res.generating else "separating_functional",
        "validated": valid,
        "decompositions": [{"direction": e, "parts": p} for e, p in res.certificates],
        "failing_direction": res.failing_direction,
        "separator": res.separator,
    }
    return _verdict_code(res.generating, valid)


def cmd_check_coadditive(args, prob, rep, tol, *_):
    res = is_coadditive(prob.family, tol)
    valid = res.validate(prob.family, tol)
    rep.verdicts["coadditive"] = res.coadditive
    rep.certificates = {
        "kind": "basis_tuple_points" if res.coadditive else "emptiness_functionals",
        "validated": valid,
        "witness_count": len(res.witnesses),
        "witnesses": [{"xi": xi, **p.to_dict()} for xi, p in res.witnesses],
        "failing_tuple": res.failing_tuple,
        "functionals": None if res.certificate is None else res.certificate.functionals,
    }
    return _verdict_code(res.coadditive, valid)


def cmd_alpha_conormal(args, prob, rep, tol, mode, samples, seed):
    res = alpha_conormal(prob.family, prob.norm, mode, samples, seed, tol, refine=args.refine)
    rep.parameters["refine"] = args.refine
    rep.add_constant("alpha_conormal", res.alpha, res.mode.value, res.witness)
    d = decompose_min(prob.family, prob.norm, res.witness, tol)
    rep.certificates = _decomposition_certificate(prob.family, d.parts, res.witness, tol)
    rep.results = {"samples": res.samples, "refined": res.refined}
    if res.mode is AlphaMode.SAMPLED_LOWER_BOUND:
        rep.caveats.append(SAMPLED_CAVEAT)
    return _verdict_code(True, rep.certificates["validated"])


def cmd_alpha_coadditive(args, prob, rep, tol, mode, samples, seed):
    res = alpha_coadditive(prob.family, prob.norm, mode, samples, seed, tol, refine=args.refine)
    rep.parameters["refine"] = args.refine
    rep.add_constant("alpha_coadditive", res.alpha, res.mode.value, res.witness)
    p = intersect_min(prob.family, prob.norm, res.witness, tol)
    rep.certificates = {"kind": "intersection_point", **p.to_dict(),
                        "validated": p.validate(prob.family, res.witness, tol)}
    rep.results = {"samples": res.samples, "refined": res.refined}
    if res.mode is AlphaMode.SAMPLED_LOWER_BOUND:
        rep.caveats.append(SAMPLED_CAVEAT)
    return _verdict_code(True, rep.certificates["validated"])


def cmd_decompose(args, prob, rep, tol, *_):
    x = parse_point(args.point)
    rep.parameters["point"] = x
    try:
        d = decompose_min(prob.family, prob.norm, x, tol)
    except NotDecomposable as exc:
        G, _ = prob.family.stacked_generators()
        rep.verdicts["decomposable"] = False
        rep.certificates = {"kind": "separating_functional", "separator": exc.certificate.separator,
                            "validated": exc.certificate.validate(G, x, tol)}
        return EXIT_NEGATIVE
    rep.verdicts["decomposable"] = True
    rep.add_constant("decomposition_value", d.value, "", x)
    rep.results = d.to_dict(prob.family.labels)
    rep.certificates = _decomposition_certificate(prob.family, d.parts, x, tol)
    return _verdict_code(True, rep.certificates["validated"])


def _xi(args, prob):
    if args.xi is not None:
        return parse_tuple(args.xi)
    if prob.translations:
        return prob.translations[0]
    raise InputError("--xi is required when the problem file lists no translations")


def cmd_intersect(args, prob, rep, tol, *_):
    xi = _xi(args, prob)
    rep.parameters["xi"] = xi
    try:
        p = intersect_min(prob.family, prob.norm, xi, tol)
    except EmptyIntersection as exc:
        rep.verdicts["nonempty"] = False
        cert = exc.certificate
        rep.certificates = {"kind": "emptiness_functionals",
                            "functionals": None if cert is None else cert.functionals,
                            "validated": cert is not None and cert.validate(prob.family, xi, tol)}
        return EXIT_NEGATIVE
    rep.verdicts["nonempty"] = True
    rep.add_constant("intersection_norm", p.norm, "", p.y)
    rep.certificates = {"kind": "intersection_point", **p.to_dict(), "validated": p.validate(prob.family, xi, tol)}
    return _verdict_code(True, rep.certificates["validated"])


def _instance(args, prob) -> PsiInstance:
    return PsiInstance(PsiForm(args.form.upper()), prob.family, prob.norm)


def cmd_gauge(args, prob, rep, tol, *_):
    inst = _instance(args, prob)
    y = parse_point(args.point) if inst.form is PsiForm.DELTA else parse_tuple(args.point)
    rep.parameters["point"] = y
    rho, q = gauge_rho(inst, y, tol), seminorm_q(inst, y, tol)
    rep.verdicts["rho_finite"] = rho.finite
    rep.results = {"rho": rho.to_dict(), "q": q.to_dict()}
    if not rho.finite:
        rep.certificates = _outside_image_certificate(inst, y, tol)
        return _verdict_code(False, rep.certificates["validated"])
    rep.add_constant("rho", rho.value, "", y)
    if q.finite:
        rep.add_constant("q", q.value, "", y)
    c = inst.select(y, tol)
    rep.certificates = {"kind": "preimage", "point": c, "validated": inst.contains(c, y, tol)}
    return _verdict_code(True, rep.certificates["validated"])


def _outside_image_certificate(inst: PsiInstance, y, tol) -> dict:
    if inst.form is PsiForm.DELTA:
        G, _ = inst.family.stacked_generators()
        cert = cone_membership(PolyhedralCone(G), y, tol)
        return {"kind": "separating_functional", "separator": cert.separator,
                "validated": not cert.member and cert.validate(G, y, tol)}
    try:
        find_intersection_point(inst.family, y, tol)
    except EmptyIntersection as exc:
        H = exc.certificate
        return {"kind": "emptiness_functionals", "functionals": None if H is None else H.functionals,
                "validated": H is not None and H.validate(inst.family, y, tol)}
    return {"kind": "none", "validated": False}


def cmd_audit_selection(args, prob, rep, tol, mode, samples, seed):
    inst = _instance(args, prob)
    rep.parameters["mesh_size"] = args.mesh_size
    r = continuity_audit(inst, args.mesh_size, seed, tol)
    rep.verdicts.update(r.verdicts)
    rep.add_constant("alpha_used", r.alpha, "")
    rep.add_constant("max_local_lipschitz", r.max_quotient, "")
    rep.results = r.to_dict()
    rep.certificates = {"kind": "mesh_evaluations", "validated": r.verdicts["reconstruction_ok"]}
    return EXIT_OK if r.verdicts["reconstruction_ok"] and r.verdicts["bound_ok"] else EXIT_NEGATIVE


def cmd_probe_lipschitz(args, prob, rep, tol, mode, samples, seed):
    inst = _instance(args, prob)
    rep.parameters.update(trials=args.trials, known_constant=args.known_constant)
    r = lipschitz_probe(inst, args.trials, seed, tol, args.known_constant)
    rep.verdicts.update({k: v for k, v in r.verdicts.items() if isinstance(v, bool)})
    if r.max_quotient is not None:
        rep.add_constant("max_difference_quotient", r.max_quotient, "SAMPLED_LOWER_BOUND")
    rep.results = r.to_dict()
    rep.caveats.append(r.caveat)
    rep.certificates = {"kind": "raw_pairs", "validated": True}
    return EXIT_OK if r.verdicts.get("within_known_constant", True) else EXIT_NEGATIVE


def cmd_beta(args, prob, rep, tol, mode, samples, seed):
    inst = _instance(args, prob)
    res = beta_openness(inst, mode, samples, seed, tol)
    d = res.to_dict()
    rep.add_constant("beta", d["beta"], res.mode.value, res.witness)
    rep.add_constant("alpha_times_beta", res.alpha_times_beta, res.mode.value)
    rep.results = d
    c = inst.select(res.witness, tol)
    rep.certificates = {"kind": "preimage", "point": c, "validated": inst.contains(c, res.witness, tol)}
    return _verdict_code(True, rep.certificates["validated"])


def _verdict_code(verdict: bool, validated: bool) -> int:
    if not validated:
        raise SolverError("certificate failed re-validation")
    return EXIT_OK if verdict else EXIT_NEGATIVE


COMMANDS = {
    "check-conormal": (cmd_check_conormal, "decide whether the cones generate the space"),
    "check-coadditive": (cmd_check_coadditive, "decide whether every tuple of translates meets"),
    "alpha-conormal": (cmd_alpha_conormal, "decomposition constant"),
    "alpha-coadditive": (cmd_alpha_coadditive, "intersection constant"),
    "decompose": (cmd_decompose, "minimal-norm decomposition of a point"),
    "intersect": (cmd_intersect, "minimal-norm point common to translated cones"),
    "gauge": (cmd_gauge, "gauge rho and seminorm q at a point"),
    "audit-selection": (cmd_audit_selection, "continuity audit of the selection"),
    "probe-lipschitz": (cmd_probe_lipschitz, "difference quotients of the selection"),
    "beta": (cmd_beta, "openness constant"),
}
FORM_COMMANDS = {"gauge", "audit-selection", "probe-lipschitz", "beta"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("problem", help="problem JSON file or bundled fixture name")
    common.add_argument("--tol", type=float, help="LP feasibility tolerance")
    common.add_argument("--mem-tol", type=float, help="membership tolerance")
    common.add_argument("--gap-tol", type=float, help="cutting-plane optimality gap")
    common.add_argument("--mode", choices=["exact", "sample"], help="vertex sweep or sphere sampling")
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", default="json", help="json or csv")

    parser = _Parser(prog="conekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name in FORM_COMMANDS:
            p.add_argument("--form", default="delta", choices=["delta", "upsilon"])
    sub.choices["decompose"].add_argument("--point", required=True, help='e.g. "1,-2"')
    sub.choices["intersect"].add_argument("--xi", help='e.g. "0,0;1,0" (defaults to the file\'s first tuple)')
    sub.choices["gauge"].add_argument("--point", required=True, help='vector, or "a,b;c,d" tuple for upsilon')
    for name in ("alpha-conormal", "alpha-coadditive"):
        sub.choices[name].add_argument("--refine", action="store_true",
                                       help="polish the best sample by local search (sample mode)")
    sub.choices["audit-selection"].add_argument("--mesh-size", type=int, default=200)
    sub.choices["probe-lipschitz"].add_argument("--trials", type=int, default=1000)
    sub.choices["probe-lipschitz"].add_argument("--known-constant", type=float)
    return parser


def run_command(argv) -> int:
    argv = list(argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.format not in FORMATS:
        print(f"conekit: error: unknown format {args.format!r}; expected one of {FORMATS}", file=sys.stderr)
        return EXIT_INPUT
    start = time.perf_counter()
    try:
        prob = parse_problem(args.problem)
        tol, mode, samples, seed = _settings(args, prob)
        rep = RunReport(["conekit"] + argv, prob.source, prob.digest)
        rep.parameters.update(
            mode=mode.value, samples=samples, seed=seed,
            tolerances={"feas_tol": tol.feas_tol, "mem_tol": tol.mem_tol, "gap_tol": tol.gap_tol},
        )
        if getattr(args, "form", None):
            rep.parameters["form"] = args.form.upper()
        handler = COMMANDS[args.command][0]
        try:
            code = handler(args, prob, rep, tol, mode, samples, seed)
        except (NotGenerating, NotCoadditive) as exc:
            rep.verdicts["surjective"] = False
            rep.results = {"error": str(exc)}
            code = EXIT_NEGATIVE
    except InputError as exc:
        print(f"conekit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"conekit: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ConeKitError as exc:
        print(f"conekit: error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    rep.elapsed_s = time.perf_counter() - start
    text = rep.render(args.format)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"conekit: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return code


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
