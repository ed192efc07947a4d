"""Harmonic and subharmonic witness functions, and Jensen-measure checks.

The cone of subharmonic functions on ``K`` is infinite dimensional, so every
check here runs over a finite witness family and its verdict holds only up
to that family.  Kernel poles are placed off ``K`` (hole centres and
exterior probes) so every witness is continuous on ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import NonFiniteValueError
from .geometry import BallScene
from .measure import EXACT_TOL, EmpiricalMeasure, Order, compare_order

HARMONIC = "harmonic"
SUBHARMONIC = "subharmonic"


@dataclass(frozen=True)
class TestFunction:
    """A tagged witness: evaluates on arrays of shape ``(..., n)``.

    ``definition`` is one of ``constant``, ``coordinate``, ``harmonic_poly``,
    ``squared_distance``, ``newton`` (``-|x-p|^(2-n)``, ``n >= 3``) or ``log``
    (``log|x-p|``, ``n = 2``).
    """

    __test__ = False

    id: str
    kind: str
    definition: str
    params: tuple = ()
    pole: tuple[float, ...] | None = None

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d = self.definition
        if d == "constant":
            return np.full(x.shape[:-1], float(self.params[0]))
        if d == "coordinate":
            axis, sign = self.params
            return sign * x[..., axis]
        if d == "harmonic_poly":
            form, i, j, sign = self.params
            if form == "diff":
                return sign * (x[..., i] ** 2 - x[..., j] ** 2)
            return sign * x[..., i] * x[..., j]
        r2 = np.sum((x - np.asarray(self.pole)) ** 2, axis=-1)
        if d == "squared_distance":
            return r2
        with np.errstate(divide="ignore"):
            if d == "newton":
                n = x.shape[-1]
                return -(r2 ** ((2 - n) / 2.0))
            if d == "log":
                return 0.5 * np.log(r2)
        raise ValueError(f"unknown test-function definition {d!r}")

    @property
    def coordinate(self) -> tuple[int, int] | None:
        if self.definition == "coordinate":
            return (int(self.params[0]), int(self.params[1]))
        return None

    @property
    def singular(self) -> bool:
        """True for kernels, whose ``pole`` is a genuine singularity rather than an anchor."""
        return self.definition in ("newton", "log")

    @property
    def is_harmonic(self) -> bool:
        return self.kind == HARMONIC

    def to_dict(self) -> dict:
        return {"id": self.id, "kind": self.kind, "definition": self.definition,
                "params": list(self.params), "pole": None if self.pole is None else list(self.pole)}

    @classmethod
    def from_dict(cls, d: dict) -> "TestFunction":
        pole = d.get("pole")
        return cls(d["id"], d["kind"], d["definition"], tuple(d.get("params", ())),
                   None if pole is None else tuple(pole))


def constant(c: float) -> TestFunction:
    return TestFunction(f"const{c:+g}", HARMONIC, "constant", (float(c),))


def coordinate(axis: int, sign: int = 1) -> TestFunction:
    return TestFunction(f"{'+' if sign > 0 else '-'}x{axis + 1}", HARMONIC, "coordinate", (axis, sign))


def squared_distance(p) -> TestFunction:
    p = tuple(float(v) for v in p)
    return TestFunction(f"rho@{_fmt_point(p)}", SUBHARMONIC, "squared_distance", (), p)


def newton_kernel(p) -> TestFunction:
    p = tuple(float(v) for v in p)
    return TestFunction(f"newton@{_fmt_point(p)}", SUBHARMONIC, "newton", (), p)


def log_kernel(p) -> TestFunction:
    p = tuple(float(v) for v in p)
    return TestFunction(f"log@{_fmt_point(p)}", SUBHARMONIC, "log", (), p)


def kernel(p, dimension: int) -> TestFunction:
    return log_kernel(p) if dimension == 2 else newton_kernel(p)


def _fmt_point(p) -> str:
    return "(" + ",".join(f"{v:.6g}" for v in p) + ")"


def default_family(scene: BallScene, degree: int = 2) -> list[TestFunction]:
    """Constants, signed coordinates, harmonic quadratics (degree 2) and subharmonic witnesses.

    Squared distances are anchored at the outer centre and at ``c0 ± R/2 e_i``;
    kernels have poles at every hole centre and at the exterior probes
    ``c0 ± 3R/2 e_i``.
    """
    if degree not in (1, 2):
        raise ValueError(f"degree must be 1 or 2, got {degree}")
    n = scene.dimension
    fam = [constant(1.0), constant(-1.0)]
    fam += [coordinate(i, s) for i in range(n) for s in (1, -1)]
    if degree == 2:
        for j in range(1, n):
            for s in (1, -1):
                fam.append(TestFunction(f"{'+' if s > 0 else '-'}(x1^2-x{j + 1}^2)", HARMONIC,
                                        "harmonic_poly", ("diff", 0, j, s)))
        for i in range(n):
            for j in range(i + 1, n):
                for s in (1, -1):
                    fam.append(TestFunction(f"{'+' if s > 0 else '-'}x{i + 1}x{j + 1}", HARMONIC,
                                            "harmonic_poly", ("cross", i, j, s)))
    c0, R = scene.outer_center, scene.outer.radius
    eye = np.eye(n)
    fam.append(squared_distance(c0))
    for i in range(n):
        for s in (1, -1):
            fam.append(squared_distance(c0 + s * 0.5 * R * eye[i]))
    for c in scene.deleted_centers:
        fam.append(kernel(c, n))
    for i in range(n):
        for s in (1, -1):
            fam.append(kernel(c0 + s * 1.5 * R * eye[i], n))
    return fam


def subharmonic_members(family: Sequence[TestFunction]) -> list[TestFunction]:
    return [f for f in family if f.kind == SUBHARMONIC]


def family_to_list(family: Sequence[TestFunction]) -> list[dict]:
    return [f.to_dict() for f in family]


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

@dataclass
class SlackRow:
    id: str
    kind: str
    at_barycenter: float | None
    integral: float | None
    slack: float | None
    tolerance: float | None
    status: str
    note: str = ""


@dataclass
class JensenReport:
    passed: bool
    rows: list[SlackRow]

    @property
    def failures(self) -> list[SlackRow]:
        return [r for r in self.rows if r.status == "fail"]

    @property
    def skipped(self) -> list[SlackRow]:
        return [r for r in self.rows if r.status == "skipped"]

    def to_dict(self) -> dict:
        return {"verdict": "PASS" if self.passed else "FAIL", "scope": "up to witness family",
                "rows": [r.__dict__ for r in self.rows]}


def _pole_clear(f: TestFunction, mu: EmpiricalMeasure, z: np.ndarray, margin: float) -> bool:
    if not f.singular:
        return True
    p = np.asarray(f.pole)
    nearest = min(float(np.min(np.linalg.norm(mu.support - p, axis=1))), float(np.linalg.norm(z - p)))
    return nearest > margin


def verify_jensen(mu: EmpiricalMeasure, z, family: Sequence[TestFunction],
                  tol: float | None = None, pole_margin: float = 1e-3, k: float = 3.0) -> JensenReport:
    """Sub-averaging for subharmonic members, equality for harmonic ones.

    ``tol=None`` uses ``k`` standard errors of ``mu(f)`` for Monte Carlo
    measures and the exact-arithmetic floor otherwise.
    """
    z = np.asarray(z, dtype=float)
    rows = []
    for f in family:
        if not _pole_clear(f, mu, z, pole_margin):
            rows.append(SlackRow(f.id, f.kind, None, None, None, None, "skipped",
                                 f"pole within {pole_margin} of the support or barycenter"))
            continue
        fz = float(f(z))
        try:
            val = mu.integrate(f)
        except NonFiniteValueError as exc:
            rows.append(SlackRow(f.id, f.kind, fz, None, None, None, "skipped", str(exc)))
            continue
        t = max(k * mu.stderr(f), EXACT_TOL) if tol is None else tol
        slack = val - fz
        ok = abs(slack) <= t if f.is_harmonic else slack >= -t
        rows.append(SlackRow(f.id, f.kind, fz, val, slack, t, "ok" if ok else "fail"))
    return JensenReport(all(r.status != "fail" for r in rows), rows)


@dataclass
class CandidateResult:
    label: str
    included: bool
    order: Order | None
    refutations: list[dict] = field(default_factory=list)
    note: str = ""


@dataclass
class MaximalityReport:
    candidates: list[CandidateResult]

    @property
    def refutations(self) -> list[dict]:
        return [r for c in self.candidates for r in c.refutations]

    @property
    def consistent(self) -> bool:
        return not self.refutations

    def to_dict(self) -> dict:
        return {
            "consistent": self.consistent,
            "scope": "up to witness family and tolerance",
            "candidates": [
                {"label": c.label, "included": c.included,
                 "order": None if c.order is None else c.order.value,
                 "refutations": c.refutations, "note": c.note}
                for c in self.candidates
            ],
        }


def maximality_probe(omega: EmpiricalMeasure, z, candidates: Sequence[EmpiricalMeasure],
                     family: Sequence[TestFunction], tol: float | None = None,
                     labels: Sequence[str] | None = None, k: float = 3.0) -> MaximalityReport:
    """Look for a subharmonic witness on which a Jensen candidate beats ``omega``.

    Candidates that fail :func:`verify_jensen` are excluded and reported.
    """
    z = np.asarray(z, dtype=float)
    labels = list(labels) if labels is not None else [f"candidate{i}" for i in range(len(candidates))]
    subs = subharmonic_members(family)
    out = []
    for label, mu in zip(labels, candidates):
        jr = verify_jensen(mu, z, family, k=k)
        if not jr.passed:
            out.append(CandidateResult(label, False, None, [],
                                       "fails Jensen check at " + ", ".join(r.id for r in jr.failures)))
            continue
        refs = []
        for f in subs:
            try:
                a, b = omega.integrate(f), mu.integrate(f)
            except NonFiniteValueError:
                continue
            t = tol if tol is not None else max(k * math.hypot(omega.stderr(f), mu.stderr(f)), EXACT_TOL)
            if a < b - t:
                refs.append({"witness": f.id, "omega": a, "candidate": b, "tolerance": t})
        order = compare_order(omega, mu, family, tol).order
        out.append(CandidateResult(label, True, order, refs))
    return MaximalityReport(out)


@dataclass
class StabilityReport:
    sizes: list[int]
    orders: list[Order]

    @property
    def stable(self) -> bool:
        return len(set(self.orders)) == 1

    def to_dict(self) -> dict:
        return {"stable": self.stable, "family_sizes": self.sizes, "orders": [o.value for o in self.orders]}


def order_stability(mu: EmpiricalMeasure, nu: EmpiricalMeasure, families: Sequence[Sequence[TestFunction]],
                    tol: float | None = None) -> StabilityReport:
    """Order verdicts along a nested sequence of witness families.

    A verdict that changes as the family grows was decided by the family
    rather than by the measures; ``stable`` reports whether that happened.
    """
    fams = [list(f) for f in families]
    for small, big in zip(fams, fams[1:]):
        if not {f.id for f in small} <= {f.id for f in big}:
            raise ValueError("families must be nested")
    orders = [compare_order(mu, nu, f, tol).order for f in fams]
    return StabilityReport([len(f) for f in fams], orders)
