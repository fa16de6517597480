"""Finitely generated cones and the LP queries on them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .geometry import DEFAULT_TOL, Tolerance, as_vector
from .lp import LinearProgram, LpStatus, solve_lp


@dataclass(frozen=True)
class PolyhedralCone:
    """The cone {sum_k l_k g_k : l_k >= 0} spanned by the rows of ``generators``."""

    generators: np.ndarray
    label: str = ""

    def __post_init__(self):
        G = np.asarray(self.generators, dtype=float)
        if G.ndim != 2 or G.shape[0] == 0 or G.shape[1] == 0:
            raise InputError(f"cone {self.label!r}: generators must be a non-empty list of vectors")
        if not np.all(np.isfinite(G)):
            raise InputError(f"cone {self.label!r}: generators must be finite")
        G.setflags(write=False)
        object.__setattr__(self, "generators", G)

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    def __eq__(self, other):
        return (isinstance(other, PolyhedralCone) and self.label == other.label
                and np.array_equal(self.generators, other.generators))

    def __hash__(self):
        return hash((self.label, self.generators.tobytes()))

    def negated(self, label: str | None = None) -> PolyhedralCone:
        return PolyhedralCone(-self.generators, label if label is not None else f"-{self.label}")

    def combine(self, coefficients) -> np.ndarray:
        return self.generators.T @ np.asarray(coefficients, dtype=float)

    @classmethod
    def orthant(cls, dim: int, label: str = "orthant") -> PolyhedralCone:
        return cls(np.eye(dim), label)

    @classmethod
    def ray(cls, direction, label: str = "") -> PolyhedralCone:
        return cls(np.atleast_2d(np.asarray(direction, dtype=float)), label)


@dataclass(frozen=True)
class ConeFamily:
    """A finite indexed family of cones sharing one ambient dimension."""

    cones: tuple[PolyhedralCone, ...]

    def __post_init__(self):
        cones = tuple(self.cones)
        if not cones:
            raise InputError("at least one cone required")
        dim = cones[0].dim
        for c in cones:
            if c.dim != dim:
                raise InputError(f"cone {c.label!r} has dimension {c.dim}, expected {dim}")
        labels = [c.label for c in cones]
        if len(set(labels)) != len(labels):
            raise InputError("cone labels must be unique")
        object.__setattr__(self, "cones", cones)

    @property
    def dim(self) -> int:
        return self.cones[0].dim

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self.cones]

    def __len__(self) -> int:
        return len(self.cones)

    def __iter__(self):
        return iter(self.cones)

    def stacked_generators(self) -> tuple[np.ndarray, list[slice]]:
        """All generators as rows, with the row slice owned by each cone."""
        slices, start = [], 0
        for c in self.cones:
            k = c.generators.shape[0]
            slices.append(slice(start, start + k))
            start += k
        return np.vstack([c.generators for c in self.cones]), slices

    def with_cone(self, cone: PolyhedralCone) -> ConeFamily:
        return ConeFamily(self.cones + (cone,))

    @classmethod
    def orthant_pair(cls, dim: int) -> ConeFamily:
        """The positive orthant and its negative."""
        C = PolyhedralCone.orthant(dim, "C")
        return cls((C, C.negated("-C")))


@dataclass
class MembershipCertificate:
    member: bool
    coefficients: np.ndarray | None = None
    # h with h.x < 0 <= h.g for every generator g
    separator: np.ndarray | None = None

    def validate(self, generators: np.ndarray, x: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
        G = np.asarray(generators, dtype=float)
        x = np.asarray(x, dtype=float)
        if self.member:
            if self.coefficients is None or self.separator is not None:
                return False
            lam = np.asarray(self.coefficients)
            if lam.size != G.shape[0] or np.any(lam < -tol.mem_tol):
                return False
            scale = 1.0 + np.abs(x).max()
            return bool(np.abs(G.T @ lam - x).max() <= tol.mem_tol * scale)
        if self.separator is None or self.coefficients is not None:
            return False
        h = np.asarray(self.separator)
        return bool(h @ x < 0 and np.all(G @ h >= -tol.mem_tol * np.abs(h).max()))

    def to_dict(self) -> dict:
        out: dict = {"member": self.member}
        if self.coefficients is not None:
            out["coefficients"] = self.coefficients.tolist()
        if self.separator is not None:
            out["separator"] = self.separator.tolist()
        return out


def _membership(G: np.ndarray, x: np.ndarray, tol: Tolerance) -> MembershipCertificate:
    k = G.shape[0]
    out = solve_lp(LinearProgram(np.zeros(k), G.T, x), tol)
    if out.status is LpStatus.OPTIMAL:
        return MembershipCertificate(True, coefficients=np.maximum(out.solution, 0.0))
    h = -out.farkas
    return MembershipCertificate(False, separator=h / np.abs(h).max())


def cone_membership(cone: PolyhedralCone, x, tol: Tolerance = DEFAULT_TOL) -> MembershipCertificate:
    """Decide x in cone by LP feasibility, returning a checkable certificate."""
    x = as_vector(x, cone.dim)
    return _membership(cone.generators, x, tol)


@dataclass
class PropernessResult:
    proper: bool
    # nonzero x with x and -x both in the cone
    witness: np.ndarray | None = None

    def __bool__(self):
        return self.proper


def is_proper(cone: PolyhedralCone, tol: Tolerance = DEFAULT_TOL) -> PropernessResult:
    """Check C and -C meet only at zero.

    A finitely generated cone has non-trivial lineality exactly when zero is a
    convex combination of its nonzero generators; then any generator carrying
    positive weight is itself a witness.
    """
    G = cone.generators
    live = G[np.abs(G).max(axis=1) > 0]
    if live.shape[0] == 0:
        return PropernessResult(True)
    k = live.shape[0]
    A = np.vstack([live.T, np.ones((1, k))])
    b = np.concatenate([np.zeros(cone.dim), [1.0]])
    out = solve_lp(LinearProgram(np.zeros(k), A, b), tol)
    if out.status is not LpStatus.OPTIMAL:
        return PropernessResult(True)
    return PropernessResult(False, live[int(np.argmax(out.solution))].copy())


@dataclass
class GeneratingResult:
    generating: bool
    # (direction, parts) for each certified signed basis vector
    certificates: list = field(default_factory=list)
    failing_direction: np.ndarray | None = None
    separator: np.ndarray | None = None

    def __bool__(self):
        return self.generating

    def validate(self, family: ConeFamily, tol: Tolerance = DEFAULT_TOL) -> bool:
        if not self.generating:
            if self.failing_direction is None or self.separator is None:
                return False
            G, _ = family.stacked_generators()
            cert = MembershipCertificate(False, separator=self.separator)
            return cert.validate(G, self.failing_direction, tol)
        if len(self.certificates) != 2 * family.dim:
            return False
        for direction, parts in self.certificates:
            if np.abs(np.sum(parts, axis=0) - direction).max() > tol.mem_tol:
                return False
            for cone, part in zip(family, parts):
                if not cone_membership(cone, part, tol).validate(cone.generators, part, tol):
                    return False
        return True


def signed_basis(dim: int):
    for i in range(dim):
        for s in (1.0, -1.0):
            e = np.zeros(dim)
            e[i] = s
            yield e


def is_generating(family: ConeFamily, tol: Tolerance = DEFAULT_TOL) -> GeneratingResult:
    """Check that the cones jointly span the space as a cone.

    The sum of the cones is itself a cone, so it is everything as soon as it
    contains every signed basis vector.
    """
    G, slices = family.stacked_generators()
    certs = []
    for e in signed_basis(family.dim):
        cert = _membership(G, e, tol)
        if not cert.member:
            return GeneratingResult(False, certs, failing_direction=e, separator=cert.separator)
        lam = cert.coefficients
        parts = np.array([G[s].T @ lam[s] for s in slices])
        certs.append((e, parts))
    return GeneratingResult(True, certs)
