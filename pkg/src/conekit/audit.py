"""Empirical continuity audits and a Lipschitz probe for the selections.

Neither function proves anything.  The continuity audit reports an empirical
modulus of continuity and flags step sizes where it stops shrinking; the
probe reports the spread of difference quotients over random nearby pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decomposition import AlphaMode
from .errors import InputError
from .gauge import PsiForm, PsiInstance
from .geometry import DEFAULT_TOL, Tolerance

STEPS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
BOUND_SLACK = 1e-6
PROBE_CAVEAT = (
    "Finite-dimensional evidence only: the open question of Lipschitz "
    "decomposition maps concerns infinite-dimensional spaces, which no desk-scale "
    "probe can reach."
)


@dataclass
class SelectionReport:
    kind: str
    mesh_size: int
    alpha: float | None = None
    max_reconstruction_error: float = 0.0
    max_bound_violation: float = 0.0
    modulus_table: list[dict] = field(default_factory=list)
    flagged_steps: list[float] = field(default_factory=list)
    local_lipschitz: np.ndarray = field(default_factory=lambda: np.zeros(0))
    quotients: np.ndarray = field(default_factory=lambda: np.zeros(0))
    verdicts: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)
    caveat: str = ""

    @property
    def max_quotient(self) -> float | None:
        if self.quotients.size:
            return float(self.quotients.max())
        if self.local_lipschitz.size:
            return float(self.local_lipschitz.max())
        return None

    def to_dict(self) -> dict:
        q = self.quotients
        summary = {}
        if q.size:
            summary = {"min": float(q.min()), "median": float(np.median(q)),
                       "p90": float(np.quantile(q, 0.9)), "max": float(q.max())}
        return {
            "kind": self.kind,
            "mesh_size": self.mesh_size,
            "alpha": self.alpha,
            "max_reconstruction_error": self.max_reconstruction_error,
            "max_bound_violation": self.max_bound_violation,
            "modulus_table": self.modulus_table,
            "flagged_steps": self.flagged_steps,
            "local_lipschitz": self.local_lipschitz.tolist(),
            "quotient_summary": summary,
            "max_quotient": self.max_quotient,
            "verdicts": self.verdicts,
            "caveat": self.caveat,
            "raw": {k: np.asarray(v).tolist() for k, v in self.raw.items()},
        }


def _selection_distance(inst: PsiInstance, a, b) -> float:
    return inst.cone_norm(np.asarray(a) - np.asarray(b))


def _resolve_alpha(inst: PsiInstance, alpha, samples: int, seed: int, tol: Tolerance) -> float:
    if alpha is not None:
        return float(alpha)
    mode = AlphaMode.EXACT_VERTEX if inst.norm.is_polyhedral else AlphaMode.SAMPLED_LOWER_BOUND
    if mode is AlphaMode.EXACT_VERTEX and inst.form is PsiForm.UPSILON:
        n_vert = 2 * inst.family.dim if inst.norm.kind.value == "L1" else 2 ** inst.family.dim
        if n_vert ** len(inst.family) > 4096:
            mode = AlphaMode.SAMPLED_LOWER_BOUND
    return inst.alpha(mode, samples, seed, tol, refine=True).alpha


def _directions(inst: PsiInstance, mesh: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Unit directions along mesh edges on a planar grid, seeded otherwise."""
    if inst.form is PsiForm.DELTA and inst.family.dim == 2 and len(mesh) > 1:
        raw = np.roll(mesh, -1, axis=0) - mesh
    else:
        raw = rng.standard_normal(mesh.shape)
    return np.array([d / inst.target_norm(d) for d in raw])


def _neighbours(inst: PsiInstance, mesh: np.ndarray) -> list[list[int]]:
    m = len(mesh)
    if m < 2:
        return [[] for _ in range(m)]
    if inst.form is PsiForm.DELTA and inst.family.dim == 2:
        return [sorted({(i - 1) % m, (i + 1) % m}) for i in range(m)]
    k = min(4, m - 1)
    out = []
    for i in range(m):
        dist = np.array([inst.target_norm(mesh[i] - mesh[j]) if j != i else np.inf for j in range(m)])
        out.append(sorted(np.argsort(dist, kind="stable")[:k].tolist()))
    return out


def continuity_audit(inst: PsiInstance, mesh_size: int, seed: int = 0, tol: Tolerance = DEFAULT_TOL,
                     alpha: float | None = None, steps=STEPS) -> SelectionReport:
    """Evaluate the selection on a sphere mesh and tabulate its empirical modulus."""
    if mesh_size < 1:
        raise InputError("mesh_size must be at least 1")
    alpha = _resolve_alpha(inst, alpha, max(mesh_size, 1000), seed, tol)
    rng = np.random.default_rng(seed)
    mesh = inst.target_sphere(mesh_size, seed)
    directions = _directions(inst, mesh, rng)

    sels, residuals, values = [], [], []
    for p in mesh:
        sel, res = inst.select_with_residual(p, tol)
        sels.append(sel)
        residuals.append(res)
        values.append(inst.cone_norm(sel))
    sels = np.array(sels)
    values = np.array(values)
    norms = np.array([inst.target_norm(p) for p in mesh])
    violations = np.maximum(0.0, values - (alpha + BOUND_SLACK) * norms)

    table, flagged, perturbed = [], [], []
    prev = None
    for h in steps:
        shifted = np.array([inst.select(p + h * d, tol) for p, d in zip(mesh, directions)])
        perturbed.append(shifted)
        omega = max(_selection_distance(inst, a, b) for a, b in zip(shifted, sels))
        table.append({"h": h, "omega": omega, "quotient": omega / h})
        if prev is not None and prev > 0 and omega >= prev:
            flagged.append(h)
        prev = omega

    nbrs = _neighbours(inst, mesh)
    local = np.array([
        max((_selection_distance(inst, sels[i], sels[j]) / inst.target_norm(mesh[i] - mesh[j])
             for j in nbrs[i]), default=0.0)
        for i in range(len(mesh))
    ])

    return SelectionReport(
        kind="continuity_audit",
        mesh_size=mesh_size,
        alpha=alpha,
        max_reconstruction_error=float(max(residuals)),
        max_bound_violation=float(violations.max()),
        modulus_table=table,
        flagged_steps=flagged,
        local_lipschitz=local,
        verdicts={
            "reconstruction_ok": bool(max(residuals) <= tol.mem_tol),
            "bound_ok": bool(violations.max() == 0.0),
            "discontinuity_suspected": bool(flagged),
        },
        raw={"mesh": mesh, "directions": directions, "selections": sels, "values": values,
             "residuals": np.array(residuals), "steps": np.array(steps), "perturbed": np.array(perturbed)},
    )


def recompute_statistics(inst: PsiInstance, report: SelectionReport) -> dict:
    """Rebuild a report's summary statistics from its raw evaluations."""
    raw = report.raw
    if report.kind == "lipschitz_probe":
        if not len(raw.get("left", [])):
            return {"quotients": np.zeros(0)}
        q = np.array([_selection_distance(inst, a, b) / inst.target_norm(p - r)
                      for a, b, p, r in zip(raw["left_sel"], raw["right_sel"], raw["left"], raw["right"])])
        return {"quotients": q}
    mesh, sels = raw["mesh"], raw["selections"]
    omegas = [max(_selection_distance(inst, a, b) for a, b in zip(shifted, sels)) for shifted in raw["perturbed"]]
    norms = np.array([inst.target_norm(p) for p in mesh])
    viol = np.maximum(0.0, raw["values"] - (report.alpha + BOUND_SLACK) * norms)
    return {"omegas": np.array(omegas), "max_bound_violation": float(viol.max()),
            "max_reconstruction_error": float(np.max(raw["residuals"]))}


def lipschitz_probe(inst: PsiInstance, trials: int, seed: int = 0, tol: Tolerance = DEFAULT_TOL,
                    known_constant: float | None = None) -> SelectionReport:
    """Difference quotients of the selection over seeded random nearby pairs on the sphere.

    Pair separations are log-uniform between 1e-4 and 1.  A pass/fail verdict
    is attached only when ``known_constant`` is supplied.
    """
    if trials < 0:
        raise InputError("trials must be nonnegative")
    report = SelectionReport(kind="lipschitz_probe", mesh_size=trials, caveat=PROBE_CAVEAT)
    if trials == 0:
        return report
    rng = np.random.default_rng(seed)
    left = inst.target_sphere(trials, seed)
    if inst.form is PsiForm.DELTA and inst.family.dim == 2:
        # decorrelate from the angular grid
        theta = rng.uniform(0.0, 2.0 * np.pi, trials)
        left = np.array([p / inst.target_norm(p) for p in np.column_stack([np.cos(theta), np.sin(theta)])])
    steps = 10.0 ** rng.uniform(-4.0, 0.0, trials)
    dirs = rng.standard_normal(left.shape)
    right = []
    for p, d, s in zip(left, dirs, steps):
        q = p + s * d / inst.target_norm(d)
        right.append(q / inst.target_norm(q))
    right = np.array(right)
    left_sel = np.array([inst.select(p, tol) for p in left])
    right_sel = np.array([inst.select(q, tol) for q in right])
    gaps = np.array([inst.target_norm(p - q) for p, q in zip(left, right)])
    keep = gaps > 0
    quotients = np.array([_selection_distance(inst, a, b) for a, b in zip(left_sel, right_sel)])[keep] / gaps[keep]
    report.quotients = quotients
    report.raw = {"left": left[keep], "right": right[keep], "left_sel": left_sel[keep], "right_sel": right_sel[keep]}
    if known_constant is not None:
        report.verdicts = {"known_constant": known_constant,
                           "within_known_constant": bool(quotients.max() <= known_constant + BOUND_SLACK)}
    return report
