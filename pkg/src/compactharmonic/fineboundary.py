"""Fine-boundary classification of points of a ball-CSG compact set.

Two routes:

* a Wiener-type series ``t_k = 2^{k(n-2)} cap(K^c ∩ B̄(z, 2^-k))`` whose
  capacities are bracketed from below by the largest inscribed ball of any
  single piece and from above by the sum of covering-ball capacities
  (normalisation ``cap(B_r) = r^(n-2)``);
* a concentration diagnostic that watches how much harmonic measure of the
  approximating domains piles up near ``z`` as they shrink.

Non-thinness of the complement at ``z`` (divergent series) places ``z`` on
the fine boundary; a convergent series means the complement is thin there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import PreconditionError
from .geometry import BallScene, Domain, PointClass, classify_point
from .measure import mass_within, mass_within_stderr
from .wos import WalkConfig, estimate_measure

TAIL_INDICES = 60


class FineVerdict(enum.Enum):
    FINE_INTERIOR = "FineInterior"
    FINE_BOUNDARY = "FineBoundary"
    NOT_FINE_BOUNDARY = "NotFineBoundary"
    EXTERIOR = "Exterior"
    INDETERMINATE = "Indeterminate"

    @property
    def definite(self) -> bool:
        return self is not FineVerdict.INDETERMINATE


@dataclass(frozen=True)
class FinePolicy:
    """Decision thresholds for the bracketed series.

    Divergent when the lower-bracket terms over the second half of the depth
    sum past ``divergence_bound`` and do not decay (their per-step geometric
    ratio over that half is at least ``stall_ratio``, so a slowly convergent
    series is not mistaken for a divergent one); convergent when the geometrically
    extrapolated remainder of the upper bracket beyond the depth is below
    ``convergence_tail``.
    """

    depth: int = 20
    divergence_bound: float = 0.5
    convergence_tail: float = 1e-3
    ratio_window: int = 4
    stall_ratio: float = 0.99


@dataclass
class FineClass:
    verdict: FineVerdict
    method: str
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "method": self.method, "evidence": _jsonable(self.evidence)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, enum.Enum):
        return obj.value
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return obj


# ---------------------------------------------------------------------------
# inscribed-ball geometry
# ---------------------------------------------------------------------------

def _lens_inradius(d: float, r_hole: float, s: float) -> float:
    """Largest ball inside ``B(c, r_hole) ∩ B̄(z, s)`` with ``|c - z| = d``."""
    if d >= r_hole + s:
        return 0.0
    if d == 0.0:
        return min(r_hole, s)
    t = min(max((r_hole - s + d) / 2.0, 0.0), d)
    return max(min(r_hole - t, s - (d - t)), 0.0)


def _exterior_inradius(D: float, R: float, s: float) -> float:
    """Largest ball inside ``B̄(z, s) \\ B(c0, R)`` with ``|z - c0| = D``."""
    if D + s <= R:
        return 0.0
    return max(min((s + D - R) / 2.0, s), 0.0)


def _holes(scene: BallScene, depth: int):
    """Hole centres and radii, extending a road-runner generator past its truncation."""
    if scene.generator is None:
        return scene.deleted_centers, scene.deleted_radii, 0.0
    g = scene.generator
    R, c0 = scene.outer.radius, scene.outer_center
    last = max(g.count, depth + TAIL_INDICES)
    ms = np.arange(g.start, last + 1)
    centers = np.tile(c0, (ms.size, 1))
    centers[:, 0] += R * 2.0 ** (-ms.astype(float))
    radii = R * g.scale * g.ratio ** ms.astype(float)
    n = scene.dimension
    # capacity bound for the holes beyond ``last``
    tail = (R * g.scale) ** (n - 2) * (g.ratio ** (n - 2)) ** (last + 1) / (1 - g.ratio ** (n - 2))
    return centers, radii, tail


@dataclass
class WienerSeries:
    ks: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def partial_sums(self):
        return np.cumsum(self.lower), np.cumsum(self.upper)


def wiener_series(scene: BallScene, z, depth: int = 20) -> WienerSeries:
    """Bracketed terms of the Wiener series of ``K^c`` at a boundary point ``z``."""
    n = scene.dimension
    if n == 2:
        raise PreconditionError("the Wiener series is only provided for n >= 3; use the concentration diagnostic in the plane")
    if depth < 4:
        raise ValueError("depth must be at least 4")
    z = np.asarray(z, dtype=float)
    if classify_point(scene, z) is not PointClass.BOUNDARY:
        raise PreconditionError(f"{z.tolist()} is not a boundary point of K")
    centers, radii, tail = _holes(scene, depth)
    d_holes = np.linalg.norm(centers - z, axis=1) if len(radii) else np.zeros(0)
    D = float(np.linalg.norm(z - scene.outer_center))
    R = scene.outer.radius
    a = scene.accumulation_point
    d_acc = float(np.linalg.norm(z - a)) if a is not None else math.inf
    ks = np.arange(1, depth + 1)
    lower = np.zeros(depth)
    upper = np.zeros(depth)
    for idx, k in enumerate(ks):
        s = 2.0 ** -int(k)
        inr = [_exterior_inradius(D, R, s)]
        caps = []
        if D + s > R:
            caps.append(s ** (n - 2))
        hit = d_holes < radii + s
        for d, r in zip(d_holes[hit], radii[hit]):
            inr.append(_lens_inradius(float(d), float(r), s))
            caps.append(min(float(r), s) ** (n - 2))
        if tail and d_acc <= s + 1.25 * R * 2.0 ** -(depth + TAIL_INDICES):
            caps.append(tail)
        scale = 2.0 ** (int(k) * (n - 2))
        lower[idx] = scale * max(inr) ** (n - 2)
        upper[idx] = scale * min(sum(caps), s ** (n - 2)) if caps else 0.0
    return WienerSeries(ks, lower, upper)


def _extrapolated_tail(terms: np.ndarray, window: int) -> float:
    last = terms[-window:]
    if np.all(last == 0):
        return 0.0
    if np.any(last <= 0):
        return math.inf
    q = float(np.max(last[1:] / last[:-1]))
    if q >= 1:
        return math.inf
    return float(last[-1] * q / (1 - q))


def classify_fine(scene: BallScene, z, depth: int | None = None,
                  policy: FinePolicy | None = None) -> FineClass:
    policy = policy or FinePolicy()
    depth = depth or policy.depth
    z = np.asarray(z, dtype=float)
    pc = classify_point(scene, z)
    base = {"point_class": pc.value}
    if scene.generator is not None:
        base["truncation_count"] = scene.generator.count
    if pc is PointClass.INTERIOR:
        return FineClass(FineVerdict.FINE_INTERIOR, "metric", base)
    if pc is PointClass.EXTERIOR:
        return FineClass(FineVerdict.EXTERIOR, "metric", base)
    series = wiener_series(scene, z, depth)
    half = series.lower[depth // 2:]
    lower_half_sum = float(half.sum())
    if half[0] > 0 and half[-1] > 0 and len(half) > 1:
        lower_ratio = float((half[-1] / half[0]) ** (1.0 / (len(half) - 1)))
    else:
        lower_ratio = 0.0
    tail = _extrapolated_tail(series.upper, policy.ratio_window)
    lo_sums, up_sums = series.partial_sums()
    evidence = dict(base)
    evidence.update({
        "depth": depth,
        "lower_terms": series.lower,
        "upper_terms": series.upper,
        "lower_partial_sum": float(lo_sums[-1]),
        "upper_partial_sum": float(up_sums[-1]),
        "lower_second_half_sum": lower_half_sum,
        "lower_term_ratio": lower_ratio,
        "upper_extrapolated_tail": tail,
        "divergence_bound": policy.divergence_bound,
        "convergence_tail": policy.convergence_tail,
        "capacity_normalisation": "cap(B_r) = r^(n-2)",
    })
    diverges = lower_half_sum > policy.divergence_bound and lower_ratio >= policy.stall_ratio
    converges = tail < policy.convergence_tail
    if diverges and not converges:
        verdict = FineVerdict.FINE_BOUNDARY
    elif converges and not diverges:
        verdict = FineVerdict.NOT_FINE_BOUNDARY
    else:
        verdict = FineVerdict.INDETERMINATE
    return FineClass(verdict, "Wiener", evidence)


# ---------------------------------------------------------------------------
# concentration diagnostic
# ---------------------------------------------------------------------------

@dataclass
class ConcentrationReport:
    fine_class: FineClass
    epsilons: list[float]
    radii: list[float]
    mass: np.ndarray
    stderr: np.ndarray
    trend: str
    wiener: FineClass | None

    def to_dict(self) -> dict:
        return _jsonable({
            "verdict": self.fine_class.verdict.value,
            "heuristic": True,
            "trend": self.trend,
            "epsilons": self.epsilons,
            "radii": self.radii,
            "mass": self.mass,
            "stderr": self.stderr,
            "wiener": None if self.wiener is None else self.wiener.to_dict(),
        })


def _concentration_trend(m: np.ndarray, se: np.ndarray, k: float, full_margin: float,
                         limit_margin: float) -> tuple[FineVerdict, str, float]:
    """Read a mass-near-z curve; returns (verdict, description, projected limit)."""
    if m[-1] >= 1 - full_margin:
        return FineVerdict.FINE_BOUNDARY, "concentrated", float(m[-1])
    inc = np.diff(m)
    tol = k * np.hypot(se[1:], se[:-1])
    if np.all(np.abs(inc) <= tol):
        return FineVerdict.NOT_FINE_BOUNDARY, "stable offset", float(m[-1])
    if inc[-1] <= tol[-1]:
        return FineVerdict.NOT_FINE_BOUNDARY, "levelled off", float(m[-1])
    if len(inc) < 2 or inc[-2] <= 0:
        return FineVerdict.INDETERMINATE, "rising, too few levels", math.inf
    q = inc[-1] / inc[-2]
    limit = math.inf if q >= 1 else float(m[-1] + inc[-1] * q / (1 - q))
    if limit >= 1 - limit_margin:
        return FineVerdict.FINE_BOUNDARY, f"rising toward 1 (increment ratio {q:.3g})", limit
    return FineVerdict.NOT_FINE_BOUNDARY, f"rising toward {limit:.3g} (increment ratio {q:.3g})", limit


def concentration_diagnostic(scene: BallScene, z, schedule: list[Domain], config: WalkConfig,
                             radii=(0.05, 0.1, 0.2), radius: float = 0.1, k: float = 3.0,
                             full_margin: float = 0.02, limit_margin: float = 0.1,
                             cross_check: bool = True, depth: int = 20) -> ConcentrationReport:
    """Heuristic fine-boundary verdict from harmonic-measure mass near ``z``.

    The trend of ``mass_within(ω_{U_j}(z,·), z, radius)`` across the
    schedule decides: mass reaching (or extrapolating to) 1 supports
    ``FineBoundary``; a plateau below 1 supports ``NotFineBoundary``.  When
    ``cross_check`` is set and the Wiener classifier reaches a different
    definite verdict, the result is ``Indeterminate`` with both evidences.
    """
    z = np.asarray(z, dtype=float)
    if classify_point(scene, z) is not PointClass.BOUNDARY:
        raise PreconditionError(f"{z.tolist()} is not a boundary point of K")
    radii = sorted(set(radii) | {radius})
    eps = [d.epsilon for d in schedule]
    mass = np.zeros((len(schedule), len(radii)))
    se = np.zeros_like(mass)
    for j, dom in enumerate(schedule):
        mu = estimate_measure(dom, z, config)
        for i, r in enumerate(radii):
            mass[j, i] = mass_within(mu, z, r)
            se[j, i] = mass_within_stderr(mu, z, r)
    col = radii.index(radius)
    verdict, trend, limit = _concentration_trend(mass[:, col], se[:, col], k, full_margin, limit_margin)
    wiener = None
    evidence = {"radius": radius, "projected_limit": limit, "trend": trend}
    if cross_check and scene.dimension >= 3:
        wiener = classify_fine(scene, z, depth)
        evidence["wiener_verdict"] = wiener.verdict.value
        if wiener.verdict.definite and verdict.definite and wiener.verdict is not verdict:
            evidence["disagreement"] = {"concentration": verdict.value, "wiener": wiener.verdict.value}
            verdict = FineVerdict.INDETERMINATE
    fc = FineClass(verdict, "Concentration", evidence)
    return ConcentrationReport(fc, eps, radii, mass, se, trend, wiener)
