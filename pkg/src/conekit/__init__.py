"""Certified decompositions into, and intersections of translates of, polyhedral cones."""

from .audit import SelectionReport, continuity_audit, lipschitz_probe
from .cones import ConeFamily, PolyhedralCone, cone_membership, is_generating, is_proper
from .decomposition import AlphaMode, alpha_conormal, decompose_min, delta_selection
from .errors import (
    EmptyIntersection,
    InputError,
    ConeKitError,
    NotCoadditive,
    NotDecomposable,
    NotGenerating,
    NotPolyhedral,
    PreconditionError,
    SolverError,
    WitnessNotFound,
)
from .gauge import PsiForm, PsiInstance, beta_openness, gauge_rho, seminorm_q
from .geometry import DEFAULT_TOL, NormKind, NormSpec, Tolerance, norm_eval
from .intersection import alpha_coadditive, intersect_min, is_coadditive, upsilon_selection
from .lp import LinearProgram, LpStatus, solve_lp
from .problem import parse_problem
from .witnesses import segment_witness, transport_witness

__all__ = [
    "AlphaMode", "ConeFamily", "DEFAULT_TOL", "EmptyIntersection", "InputError", "ConeKitError",
    "LinearProgram", "LpStatus", "NormKind", "NormSpec", "NotCoadditive", "NotDecomposable",
    "NotGenerating", "NotPolyhedral", "PolyhedralCone", "PreconditionError", "PsiForm", "PsiInstance",
    "SelectionReport", "SolverError", "Tolerance", "WitnessNotFound", "alpha_coadditive", "alpha_conormal",
    "beta_openness", "cone_membership", "continuity_audit", "decompose_min", "delta_selection",
    "gauge_rho", "intersect_min", "is_coadditive", "is_generating", "is_proper", "lipschitz_probe",
    "norm_eval", "parse_problem", "seminorm_q", "segment_witness", "solve_lp", "transport_witness",
    "upsilon_selection",
]
