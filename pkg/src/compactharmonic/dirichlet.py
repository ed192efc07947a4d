"""Harmonic measure on a compact set and the Dirichlet problem on it.

The harmonic measure ``ω_K(z, ·)`` is approached through the harmonic
measures of a shrinking schedule of ``ε``-neighbourhoods ``U_j``; the finest
level is used as its numeric surrogate and the earlier levels feed the
convergence diagnostics.  Every level reuses the configured seed, so the
level-to-level differences are common-random-number estimates.

The Dirichlet solution for boundary data ``φ`` is the integral of a fixed
continuous extension of ``φ`` against the same measures.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import NonFiniteValueError, PreconditionError
from .fineboundary import FineVerdict, classify_fine
from .geometry import (BallScene, Domain, PointClass, classify_point, dist_to_boundary,
                       domain_schedule, project_to_boundary)
from .jensen import SUBHARMONIC, TestFunction, default_family, verify_jensen
from .measure import EXACT_TOL, EmpiricalMeasure
from .wos import WalkConfig, estimate_measure

K_SIGMA = 3.0


def as_schedule(scene: BallScene, schedule) -> list[Domain]:
    """Accept a list of domains or an ``(eps0, ratio, count)`` triple."""
    if isinstance(schedule, tuple) and len(schedule) == 3 and not isinstance(schedule[0], Domain):
        schedule = domain_schedule(scene, *schedule)
    schedule = list(schedule)
    eps = [d.epsilon for d in schedule]
    if not eps or any(b >= a for a, b in zip(eps, eps[1:])):
        raise PreconditionError(f"schedule must be strictly decreasing, got {eps}")
    return schedule


def _require_in_K(scene: BallScene, x) -> PointClass:
    pc = classify_point(scene, x)
    if pc is PointClass.EXTERIOR:
        raise PreconditionError(f"point {np.asarray(x).tolist()} lies outside K")
    return pc


def boundary_pullback(scene: BallScene, mu: EmpiricalMeasure) -> EmpiricalMeasure:
    """Move the support of ``mu`` to the nearest points of ``∂K``."""
    return mu.pushforward(lambda x: project_to_boundary(scene, x), pulled_back=True)


@dataclass
class ConvergenceReport:
    epsilons: list[float]
    probe_ids: list[str]
    probe_kinds: list[str]
    values: np.ndarray
    stderr: np.ndarray
    support_max_distance: float | None = None
    support_bound: float | None = None
    k: float = K_SIGMA

    @property
    def gaps(self) -> np.ndarray:
        return np.abs(np.diff(self.values, axis=0))

    @property
    def gap_tolerance(self) -> np.ndarray:
        t = self.k * np.hypot(self.stderr[1:], self.stderr[:-1])
        return np.maximum(t, EXACT_TOL)

    def gaps_nonincreasing(self) -> np.ndarray:
        """Per probe: each Cauchy gap is at most the previous one plus its noise allowance."""
        g, t = self.gaps, self.gap_tolerance
        if len(g) < 2:
            return np.ones(len(self.probe_ids), dtype=bool)
        return np.all(g[1:] <= g[:-1] + t[1:], axis=0)

    def final_gap_ok(self) -> np.ndarray:
        if len(self.epsilons) < 2:
            return np.ones(len(self.probe_ids), dtype=bool)
        return self.gaps[-1] <= self.gap_tolerance[-1]

    def monotone(self) -> np.ndarray:
        """Per probe: nonincreasing across levels up to the combined noise."""
        v, t = self.values, self.gap_tolerance
        return np.all(v[1:] <= v[:-1] + t, axis=0)

    def total_decrease(self) -> tuple[np.ndarray, np.ndarray]:
        dec = self.values[0] - self.values[-1]
        tol = self.k * np.hypot(self.stderr[0], self.stderr[-1])
        return dec, tol

    @property
    def last(self) -> np.ndarray:
        return self.values[-1]

    @property
    def mean_last_two(self) -> np.ndarray:
        return self.values[-2:].mean(axis=0)

    def to_dict(self) -> dict:
        mono = self.monotone()
        return {
            "epsilons": list(self.epsilons),
            "probes": [
                {
                    "id": pid,
                    "kind": kind,
                    "values": self.values[:, i].tolist(),
                    "stderr": self.stderr[:, i].tolist(),
                    "gaps": self.gaps[:, i].tolist(),
                    "gap_tolerance": self.gap_tolerance[:, i].tolist(),
                    "gaps_nonincreasing": bool(self.gaps_nonincreasing()[i]),
                    "final_gap_ok": bool(self.final_gap_ok()[i]),
                    "monotone": bool(mono[i]) if kind == SUBHARMONIC else None,
                    "last": float(self.last[i]),
                    "mean_last_two": float(self.mean_last_two[i]),
                }
                for i, (pid, kind) in enumerate(zip(self.probe_ids, self.probe_kinds))
            ],
            "support_max_distance": self.support_max_distance,
            "support_bound": self.support_bound,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("epsilon,probe,kind,value,stderr\n")
        for j, eps in enumerate(self.epsilons):
            for i, (pid, kind) in enumerate(zip(self.probe_ids, self.probe_kinds)):
                buf.write(f"{eps!r},{pid},{kind},{float(self.values[j, i])!r},{float(self.stderr[j, i])!r}\n")
        return buf.getvalue()


def _level_integrals(measures, probes):
    vals = np.zeros((len(measures), len(probes)))
    ses = np.zeros_like(vals)
    for j, mu in enumerate(measures):
        for i, f in enumerate(probes):
            vals[j, i] = mu.integrate(f)
            ses[j, i] = mu.stderr(f)
    return vals, ses


def harmonic_measure(scene: BallScene, z, schedule, config: WalkConfig,
                     family: Sequence[TestFunction] | None = None, pull_back: bool = False,
                     ) -> tuple[EmpiricalMeasure, ConvergenceReport]:
    """Finest-level surrogate for ``ω_K(z, ·)`` plus weak* diagnostics.

    With ``pull_back`` the probe integrals of every level are taken after
    moving its support to the nearest point of ``∂K``; both sequences share
    the weak* limit, but the pulled-back one drops the ``O(ε)`` drift that
    comes from evaluating probes on ``∂U_j`` instead of ``∂K``.  The returned
    measure is never pulled back.
    """
    z = np.asarray(z, dtype=float)
    _require_in_K(scene, z)
    doms = as_schedule(scene, schedule)
    probes = list(family) if family is not None else default_family(scene, 2)
    measures = [estimate_measure(d, z, config) for d in doms]
    integrands = [boundary_pullback(scene, m) for m in measures] if pull_back else measures
    vals, ses = _level_integrals(integrands, probes)
    finest = measures[-1]
    dist = np.asarray(dist_to_boundary(scene, finest.support))
    report = ConvergenceReport(
        [d.epsilon for d in doms], [f.id for f in probes], [f.kind for f in probes], vals, ses,
        support_max_distance=float(dist.max()),
        support_bound=doms[-1].epsilon + config.absorb_delta,
    )
    return finest, report


def mass_by_fine_class(scene: BallScene, mu: EmpiricalMeasure, depth: int = 20) -> dict[str, float]:
    """Weight of ``mu`` by the fine class of the nearest point of ``∂K``.

    Points are rounded to 12 decimals before classification so repeated
    support points share one Wiener evaluation.
    """
    pts = project_to_boundary(scene, mu.support)
    keys = np.round(pts, 12)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    verdicts = [classify_fine(scene, p, depth).verdict.value for p in uniq]
    out: dict[str, float] = {}
    for idx, w in zip(np.asarray(inverse).reshape(-1), mu.weights):
        v = verdicts[idx]
        out[v] = out.get(v, 0.0) + float(w)
    return out


def monotone_check(scene: BallScene, z, u: TestFunction, schedule, config: WalkConfig) -> ConvergenceReport:
    """Track ``u_j(z) = ∫ u dω_{U_j}(z, ·)``; subharmonic ``u`` should give a nonincreasing sequence."""
    z = np.asarray(z, dtype=float)
    _require_in_K(scene, z)
    doms = as_schedule(scene, schedule)
    if u.singular:
        p = np.asarray(u.pole)
        inside = [d.epsilon for d in doms if d.distance_to_boundary(p) >= 0]
        if inside:
            raise PreconditionError(
                f"pole of {u.id} lies in the closure of the schedule domains with epsilon {inside}"
            )
    measures = [estimate_measure(d, z, config) for d in doms]
    vals, ses = _level_integrals(measures, [u])
    return ConvergenceReport([d.epsilon for d in doms], [u.id], [u.kind], vals, ses)


# ---------------------------------------------------------------------------
# boundary data
# ---------------------------------------------------------------------------

def coordinate_data(axis: int = 0) -> Callable:
    def phi(x):
        return np.asarray(x, dtype=float)[..., axis]
    phi.__name__ = f"coordinate{axis + 1}"
    return phi


def outer_indicator_data(scene: BallScene) -> Callable:
    """1 on the outer sphere, 0 on every hole sphere, linear in ``|x - c0|`` between."""
    c0, R = scene.outer_center, scene.outer.radius
    if scene.deleted:
        inner = float(np.max(np.linalg.norm(scene.deleted_centers - c0, axis=1) + scene.deleted_radii))
    else:
        inner = 0.0

    def phi(x):
        r = np.linalg.norm(np.asarray(x, dtype=float) - c0, axis=-1)
        return np.clip((r - inner) / (R - inner), 0.0, 1.0)
    phi.__name__ = "outer_indicator"
    return phi


def radial_data(scene: BallScene) -> Callable:
    c0 = scene.outer_center

    def phi(x):
        return np.linalg.norm(np.asarray(x, dtype=float) - c0, axis=-1)
    phi.__name__ = "radial"
    return phi


def away_from_data(point, radius: float) -> Callable:
    """0 within ``radius/2`` of ``point``, 1 beyond ``radius``, linear between."""
    p = np.asarray(point, dtype=float)

    def phi(x):
        r = np.linalg.norm(np.asarray(x, dtype=float) - p, axis=-1)
        return np.clip((r - radius / 2) / (radius / 2), 0.0, 1.0)
    phi.__name__ = "away_from"
    return phi


def named_data(name: str, scene: BallScene) -> Callable:
    if name in ("coordinate", "coordinate1", "x1"):
        return coordinate_data(0)
    if name in ("outer1", "outer_indicator"):
        return outer_indicator_data(scene)
    if name == "radial":
        return radial_data(scene)
    raise ValueError(f"unknown boundary data {name!r}; choose coordinate, outer1 or radial")


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

@dataclass
class SolvedPoint:
    point: np.ndarray
    value: float
    stderr: float
    level_values: list[float]
    level_stderr: list[float]
    gap: float
    gap_tolerance: float
    mean_last_two: float
    fine_verdict: FineVerdict | None
    data_value: float
    boundary_agreement: bool | None

    def to_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "value": self.value,
            "stderr": self.stderr,
            "level_values": self.level_values,
            "level_stderr": self.level_stderr,
            "gap": self.gap,
            "gap_tolerance": self.gap_tolerance,
            "mean_last_two": self.mean_last_two,
            "fine_class": None if self.fine_verdict is None else self.fine_verdict.value,
            "data_value": self.data_value,
            "boundary_agreement": self.boundary_agreement,
        }


@dataclass
class DirichletSolution:
    scene: BallScene
    phi: Callable
    schedule: list[Domain]
    config: WalkConfig
    points: list[SolvedPoint]
    sup_data: float
    k: float = K_SIGMA

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([p.stderr for p in self.points])

    def sup_norm_ok(self) -> bool:
        return all(abs(p.value) <= self.sup_data + self.k * p.stderr for p in self.points)

    def __call__(self, x, samples: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Finest-level values and standard errors at further points of ``K``."""
        cfg = self.config if samples is None else self.config.with_(samples=samples)
        dom = self.schedule[-1]
        x = np.atleast_2d(np.asarray(x, dtype=float))
        vals, ses = np.zeros(len(x)), np.zeros(len(x))
        for i, p in enumerate(x):
            mu = estimate_measure(dom, p, cfg)
            vals[i], ses[i] = mu.integrate(self.phi), mu.stderr(self.phi)
        return vals, ses

    def to_dict(self) -> dict:
        return {
            "epsilons": [d.epsilon for d in self.schedule],
            "sup_data": self.sup_data,
            "sup_norm_ok": self.sup_norm_ok(),
            "points": [p.to_dict() for p in self.points],
        }

    def to_table(self) -> str:
        lines = ["point\tvalue\tstderr\tgap\tboundary_agreement"]
        for p in self.points:
            lines.append(
                f"{','.join(repr(float(v)) for v in p.point)}\t{p.value!r}\t{p.stderr!r}\t{p.gap!r}\t{p.boundary_agreement}"
            )
        return "\n".join(lines) + "\n"


def solve(scene: BallScene, phi: Callable, eval_points, schedule, config: WalkConfig,
          depth: int = 20, classify: bool = True) -> DirichletSolution:
    """Dirichlet solution ``h(x) = ∫ φ dω_K(x, ·)`` at ``eval_points``.

    ``phi`` must be a continuous function defined on a neighbourhood of
    ``∂K``; its values on ``∂U_j`` are what is integrated.
    """
    doms = as_schedule(scene, schedule)
    pts = np.atleast_2d(np.asarray(eval_points, dtype=float))
    for p in pts:
        _require_in_K(scene, p)
    solved = []
    sup_data = 0.0
    for p in pts:
        vals, ses = [], []
        for dom in doms:
            mu = estimate_measure(dom, p, config)
            v = mu.values(phi)
            vals.append(float(v.mean()))
            ses.append(float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0)
        on_K = np.asarray(phi(project_to_boundary(scene, mu.support)), dtype=float)
        sup_data = max(sup_data, float(np.max(np.abs(on_K))))
        data_value = float(np.asarray(phi(p[None, :]), dtype=float).reshape(-1)[0])
        if not math.isfinite(data_value):
            raise NonFiniteValueError(p, data_value, what="boundary data")
        gap = abs(vals[-1] - vals[-2]) if len(vals) > 1 else 0.0
        gap_tol = K_SIGMA * math.hypot(ses[-1], ses[-2]) if len(vals) > 1 else 0.0
        verdict = None
        agreement = None
        pc = classify_point(scene, p)
        if pc is PointClass.INTERIOR:
            verdict = FineVerdict.FINE_INTERIOR
        elif classify and scene.dimension >= 3:
            verdict = classify_fine(scene, p, depth).verdict
        if verdict is FineVerdict.FINE_BOUNDARY:
            agreement = abs(vals[-1] - data_value) <= K_SIGMA * ses[-1] + gap
        solved.append(SolvedPoint(p, vals[-1], ses[-1], vals, ses, gap, gap_tol,
                                  float(np.mean(vals[-2:])), verdict, data_value, agreement))
    return DirichletSolution(scene, phi, doms, config, solved, sup_data)


@dataclass
class AveragingRow:
    label: str
    accepted: bool
    average: float | None
    at_barycenter: float
    difference: float | None
    tolerance: float | None
    ok: bool | None
    note: str = ""


@dataclass
class AveragingReport:
    rows: list[AveragingRow]

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows if r.accepted)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "rows": [r.__dict__ for r in self.rows]}


def _h_eval(h: Callable, x: np.ndarray):
    out = h(x)
    if isinstance(out, tuple):
        vals, ses = out
        return np.asarray(vals, dtype=float).reshape(-1), np.asarray(ses, dtype=float).reshape(-1)
    vals = np.asarray(out, dtype=float).reshape(-1)
    return vals, np.zeros_like(vals)


def averaging_check(scene: BallScene, h: Callable, z, candidates: Sequence[EmpiricalMeasure],
                    tol: float | None = None, labels: Sequence[str] | None = None,
                    family: Sequence[TestFunction] | None = None, k: float = K_SIGMA) -> AveragingReport:
    """Check ``μ(h) = h(z)`` for Jensen candidates ``μ`` with barycenter ``z``.

    ``h`` maps an ``(m, n)`` array to values, or to ``(values, stderrs)``
    when it is itself a Monte Carlo estimate.  Candidates whose claimed
    barycenter is not ``z`` (or that fail :func:`verify_jensen` against
    ``family`` when one is given) are rejected.
    """
    z = np.asarray(z, dtype=float)
    _require_in_K(scene, z)
    labels = list(labels) if labels is not None else [f"candidate{i}" for i in range(len(candidates))]
    hz, hz_se = _h_eval(h, z[None, :])
    hz, hz_se = float(hz[0]), float(hz_se[0])
    rows = []
    for label, mu in zip(labels, candidates):
        if np.max(np.abs(mu.barycenter_claim - z)) > 1e-12:
            rows.append(AveragingRow(label, False, None, hz, None, None, None, "barycenter differs from z"))
            continue
        if family is not None and not verify_jensen(mu, z, family).passed:
            rows.append(AveragingRow(label, False, None, hz, None, None, None, "fails Jensen check"))
            continue
        vals, ses = _h_eval(h, mu.support)
        avg = float(mu.weights @ vals)
        var = float(np.sum(mu.weights**2 * ses**2))
        if mu.monte_carlo and mu.size > 1:
            var += float(np.var(vals, ddof=1) / mu.size)
        t = tol if tol is not None else max(k * math.sqrt(var + hz_se**2), EXACT_TOL)
        diff = avg - hz
        rows.append(AveragingRow(label, True, avg, hz, diff, t, abs(diff) <= t))
    return AveragingReport(rows)
