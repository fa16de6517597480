"""JSON problem files.

A problem file names a dimension, a norm, a family of generated cones and,
optionally, translation tuples and analysis defaults::

    {
      "schema_version": 1,
      "dimension": 2,
      "norm": {"kind": "L2"},
      "cones": [{"label": "C1", "generators": [[1, 0], [0, 1]]}],
      "translations": [[[0, 0]]],
      "analysis": {"mode": "exact", "samples": 1000, "seed": 0,
                   "tolerances": {"feas_tol": 1e-9, "mem_tol": 1e-7, "gap_tol": 1e-7}}
    }
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .cones import ConeFamily, PolyhedralCone
from .decomposition import AlphaMode
from .errors import InputError
from .geometry import DEFAULT_TOL, NormKind, NormSpec, Tolerance

SCHEMA_VERSION = 1


@dataclass
class Analysis:
    mode: AlphaMode = AlphaMode.EXACT_VERTEX
    samples: int = 1000
    seed: int = 0
    tol: Tolerance = DEFAULT_TOL


@dataclass
class ProblemFile:
    source: str
    digest: str
    dimension: int
    norm: NormSpec
    family: ConeFamily
    translations: list[np.ndarray] = field(default_factory=list)
    analysis: Analysis = field(default_factory=Analysis)


def fixture_names() -> list[str]:
    return sorted(p.name for p in resources.files("conekit.fixtures").iterdir() if p.name.endswith(".json"))


def _read_bytes(path) -> tuple[str, bytes]:
    p = Path(path)
    if p.is_file():
        return str(p), p.read_bytes()
    name = p.name if p.suffix else p.name + ".json"
    bundled = resources.files("conekit.fixtures") / name
    if str(path) in (name, p.stem) and bundled.is_file():
        return name, bundled.read_bytes()
    raise InputError(f"{path}: no such file or bundled fixture")


def _number_array(value, where: str, ndim: int) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{where}: expected numbers") from None
    if arr.ndim != ndim:
        raise InputError(f"{where}: expected a {ndim}-level nested list of numbers")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{where}: non-finite entry")
    return arr


def _parse_norm(node, dim: int) -> NormSpec:
    if not isinstance(node, dict) or "kind" not in node:
        raise InputError("norm: expected an object with a 'kind' field")
    try:
        kind = NormKind(str(node["kind"]).upper())
    except ValueError:
        raise InputError(f"norm.kind: unknown kind {node['kind']!r}") from None
    weights = node.get("weights")
    w = None if weights is None else _number_array(weights, "norm.weights", 1)
    if kind is NormKind.POLYHEDRAL:
        if "ball_vertices" not in node:
            raise InputError("norm.ball_vertices: required for a POLYHEDRAL norm")
        norm = NormSpec.polyhedral(_number_array(node["ball_vertices"], "norm.ball_vertices", 2))
    elif kind is NormKind.L2:
        if w is not None:
            raise InputError("norm.weights: not supported for L2")
        norm = NormSpec.l2()
    else:
        norm = (NormSpec.l1 if kind is NormKind.L1 else NormSpec.linf)(w)
    try:
        norm.check_dim(dim)
    except InputError as exc:
        raise InputError(f"norm: {exc}") from None
    return norm


def _parse_cones(items, dim: int) -> ConeFamily:
    if not isinstance(items, list) or not items:
        raise InputError("cones: at least one cone required")
    cones = []
    for k, item in enumerate(items):
        if not isinstance(item, dict):
            raise InputError(f"cones[{k}]: expected an object")
        label = str(item.get("label", f"C{k + 1}"))
        if "generators" not in item:
            raise InputError(f"cone {label!r}: missing 'generators'")
        gens = item["generators"]
        if isinstance(gens, list):
            for j, g in enumerate(gens):
                if isinstance(g, list) and len(g) != dim:
                    raise InputError(f"cone {label!r}: generator {j} has dimension {len(g)}, expected {dim}")
        G = _number_array(gens, f"cone {label!r} generators", 2)
        if G.shape[1] != dim:
            raise InputError(f"cone {label!r}: generator of dimension {G.shape[1]}, expected {dim}")
        cones.append(PolyhedralCone(G, label))
    return ConeFamily(tuple(cones))


def _parse_analysis(node) -> Analysis:
    if node is None:
        return Analysis()
    if not isinstance(node, dict):
        raise InputError("analysis: expected an object")
    tol_node = node.get("tolerances", {})
    if not isinstance(tol_node, dict):
        raise InputError("analysis.tolerances: expected an object")
    unknown = set(tol_node) - {"feas_tol", "mem_tol", "gap_tol"}
    if unknown:
        raise InputError(f"analysis.tolerances: unknown keys {sorted(unknown)}")
    try:
        tol = Tolerance(**{k: float(v) for k, v in tol_node.items()})
        samples = int(node.get("samples", 1000))
        seed = int(node.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise InputError(f"analysis: {exc}") from None
    return Analysis(AlphaMode.parse(node.get("mode", "exact")), samples, seed, tol)


def parse_problem_bytes(raw: bytes, source: str = "<memory>") -> ProblemFile:
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{source}: top level must be an object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise InputError(f"schema_version: expected {SCHEMA_VERSION}, got {doc.get('schema_version')!r}")
    dim = doc.get("dimension")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError("dimension: expected a positive integer")
    norm = _parse_norm(doc.get("norm"), dim)
    family = _parse_cones(doc.get("cones"), dim)
    translations = []
    for k, xi in enumerate(doc.get("translations", [])):
        arr = _number_array(xi, f"translations[{k}]", 2)
        if arr.shape != (len(family), dim):
            raise InputError(f"translations[{k}]: shape {arr.shape}, expected {(len(family), dim)}")
        translations.append(arr)
    return ProblemFile(source, hashlib.sha256(raw).hexdigest(), dim, norm, family, translations,
                       _parse_analysis(doc.get("analysis")))


def parse_problem(path) -> ProblemFile:
    """Load a problem file, falling back to a bundled fixture of the same name."""
    source, raw = _read_bytes(path)
    return parse_problem_bytes(raw, source)
