"""Acceptance suite: each check runs at its stated tolerance and returns a result object.

Every check is deterministic (fixed seeds) and sized to finish within a
minute on one core.  Thresholds are not tuned per run; a check that misses
its tolerance reports FAIL with the numbers that caused it.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dirichlet import (away_from_data, coordinate_data, harmonic_measure, mass_by_fine_class,
                        monotone_check, outer_indicator_data, solve)
from .edwards import bracket, envelope_dual, envelope_primal, make_instance
from .fineboundary import FineVerdict, classify_fine, concentration_diagnostic
from .geometry import (ball_scene, domain_schedule, neighborhood, road_runner_scene, sample_interior,
                       shell_scene, swiss_cheese_scene)
from .jensen import (HARMONIC, default_family, newton_kernel, squared_distance, subharmonic_members,
                     verify_jensen, maximality_probe)
from .measure import ball_measure, sphere_measure
from .wos import WalkConfig, absorb_bias_scan

SEED = 20240601


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class CriterionResult:
    key: str
    title: str
    checks: list[Check] = field(default_factory=list)
    info: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def line(self) -> str:
        failed = [c.name for c in self.checks if not c.passed]
        tail = f"failed: {', '.join(failed)}" if failed else f"{len(self.checks)} checks"
        return f"{'PASS' if self.passed else 'FAIL'} {self.key}: {self.title} ({tail}; {self.elapsed:.1f}s)"

    def to_dict(self) -> dict:
        return {"key": self.key, "title": self.title, "passed": self.passed, "elapsed": self.elapsed,
                "checks": [c.__dict__ for c in self.checks], "info": self.info}


def road_runner_thin() -> "BallScene":  # noqa: F821
    """Radii ``4^-m``; indices below 3 would break the disjointness rule ``r_m < 2^(-m-2)``."""
    return road_runner_scene(1.0, 0.25, 8, start=3)


def road_runner_fat() -> "BallScene":  # noqa: F821
    """Radii ``0.99·2^(-m-2)``."""
    return road_runner_scene(0.2475, 0.5, 10)


def _timed(fn: Callable[[], CriterionResult]) -> CriterionResult:
    t = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = fn()
    res.elapsed = time.perf_counter() - t
    return res


# ---------------------------------------------------------------------------

def poisson_reproduction() -> CriterionResult:
    res = CriterionResult("poisson_reproduction", "mean-value reproduction on the unit ball")
    sc = ball_scene()
    cfg = WalkConfig(samples=100_000, absorb_delta=1e-3, seed=SEED)
    sched = (0.1, 0.5, 3)
    x1 = coordinate_data(0)

    def x1sq(x):
        return np.asarray(x)[..., 0] ** 2

    # harmonic integrands are reproduced exactly by every level measure, so x1 uses the raw
    # finest level; x1^2 is not harmonic and is integrated after the radial pull-back onto the
    # unit sphere, which carries the level measure at 0 to the uniform measure by symmetry
    mu, _ = harmonic_measure(sc, [0.5, 0, 0], sched, cfg, family=default_family(sc, 1))
    v, s = mu.integrate(x1), mu.stderr(x1)
    res.checks.append(Check("x1 at (0.5,0,0)", abs(v - 0.5) <= 3 * s, f"{v:.6f} vs 0.5, 3σ={3 * s:.2e}"))
    mu0, _ = harmonic_measure(sc, [0, 0, 0], sched, cfg, family=default_family(sc, 1))
    mu0 = mu0.pushforward(lambda x: x / np.linalg.norm(x, axis=1, keepdims=True))
    v, s = mu0.integrate(x1sq), mu0.stderr(x1sq)
    res.checks.append(Check("x1^2 at 0", abs(v - 1 / 3) <= 3 * s, f"{v:.6f} vs 1/3, 3σ={3 * s:.2e}"))
    scan = absorb_bias_scan(neighborhood(sc, 0.025), [0.5, 0, 0], x1, cfg.with_(samples=20_000))
    res.info.append(f"absorb_delta scan for x1 at (0.5,0,0): values {np.round(scan.values, 5).tolist()} "
                    f"at {list(scan.deltas)}, extrapolated {scan.extrapolated:.5f}, slope {scan.slope:.3g}")
    return res


def weak_star_convergence() -> CriterionResult:
    res = CriterionResult("weak_star_convergence", "Cauchy gaps across the schedule on the Swiss cheese")
    sc = swiss_cheese_scene()
    z = np.zeros(3)
    cfg = WalkConfig(samples=10_000, absorb_delta=1e-3, seed=SEED)
    _, rep = harmonic_measure(sc, z, (0.2, 0.5, 4), cfg)
    dec = rep.gaps_nonincreasing()
    fin = rep.final_gap_ok()
    res.checks.append(Check("gaps decrease", bool(dec.all()),
                            f"{int(dec.sum())}/{dec.size} probes"))
    worst = int(np.argmax(rep.gaps[-1] / rep.gap_tolerance[-1]))
    res.checks.append(Check("final gap within 3 combined σ", bool(fin.all()),
                            f"{int(fin.sum())}/{fin.size} probes; worst {rep.probe_ids[worst]} "
                            f"gap {rep.gaps[-1, worst]:.4g} vs {rep.gap_tolerance[-1, worst]:.3g}"))
    _, rep2 = harmonic_measure(sc, z, (0.1, 0.5, 3), cfg.with_(seed=SEED + 1))
    diff = np.abs(rep.values[-1] - rep2.values[-1])
    tol = 3 * np.hypot(rep.stderr[-1], rep2.stderr[-1]) + 1e-9
    ok = diff <= tol
    res.checks.append(Check("schedules agree at eps=0.025", bool(ok.all()),
                            f"{int(ok.sum())}/{ok.size} probes, max ratio {float(np.max(diff / tol)):.2f}"))
    _, rep_pb = harmonic_measure(sc, z, (0.2, 0.5, 4), cfg, pull_back=True)
    res.info.append(f"with support pulled back to the boundary: final gaps within tolerance for "
                    f"{int(rep_pb.final_gap_ok().sum())}/{fin.size} probes")
    return res


def monotone_decrease() -> CriterionResult:
    res = CriterionResult("monotone_decrease", "subharmonic probes decrease along the schedule")
    sc = swiss_cheese_scene()
    cfg = WalkConfig(samples=20_000, absorb_delta=1e-3, seed=SEED)
    sched = (0.2, 0.5, 4)
    z = np.zeros(3)
    for u in (squared_distance(z), newton_kernel([0.5, 0, 0])):
        rep = monotone_check(sc, z, u, sched, cfg)
        res.checks.append(Check(f"{u.id} nonincreasing", bool(rep.monotone()[0]),
                                f"values {np.round(rep.values[:, 0], 5).tolist()}"))
        if u.definition == "squared_distance":
            dec, tol = rep.total_decrease()
            res.checks.append(Check(f"{u.id} total decrease beyond noise", bool(dec[0] > tol[0]),
                                    f"{dec[0]:.4g} vs 3σ {tol[0]:.3g}"))
    return res


def support_and_concentration() -> CriterionResult:
    res = CriterionResult("support_and_concentration", "support near the boundary, no mass on thin points")
    cfg = WalkConfig(samples=10_000, absorb_delta=1e-3, seed=SEED)
    sc = swiss_cheese_scene()
    _, rep = harmonic_measure(sc, np.zeros(3), (0.2, 0.5, 4), cfg)
    res.checks.append(Check("support distance", rep.support_max_distance <= rep.support_bound + 1e-12,
                            f"max {rep.support_max_distance:.6g} vs {rep.support_bound:.6g}"))
    shell = shell_scene()
    mu, rep = harmonic_measure(shell, [0.75, 0, 0], (0.1, 0.5, 3), cfg)
    res.checks.append(Check("shell support distance", rep.support_max_distance <= rep.support_bound + 1e-12,
                            f"max {rep.support_max_distance:.6g} vs {rep.support_bound:.6g}"))
    masses = mass_by_fine_class(shell, mu)
    thin = masses.get(FineVerdict.NOT_FINE_BOUNDARY.value, 0.0)
    res.checks.append(Check("shell NotFineBoundary mass <= 1%", thin <= 0.01, f"masses {masses}"))
    return res


def jensen_membership() -> CriterionResult:
    res = CriterionResult("jensen_membership", "harmonic measure passes the Jensen check")
    rng = np.random.default_rng(SEED)
    cfg = WalkConfig(samples=10_000, absorb_delta=1e-3, seed=SEED)
    scenes = [("ball", ball_scene(), 4), ("shell", shell_scene(), 3), ("swiss", swiss_cheese_scene(), 3)]
    for name, sc, count in scenes:
        fam = default_family(sc, 2)
        dom = [neighborhood(sc, 0.025)]
        for z in sample_interior(sc, rng, count, margin=0.02):
            mu, _ = harmonic_measure(sc, z, dom, cfg, family=fam[:2])
            jr = verify_jensen(mu, z, fam)
            res.checks.append(Check(f"{name} z={np.round(z, 3).tolist()}", jr.passed,
                                    "; ".join(f"{r.id} slack {r.slack:.3g} tol {r.tolerance:.3g}"
                                              for r in jr.failures)))
    return res


def maximality() -> CriterionResult:
    res = CriterionResult("maximality", "harmonic measure dominates sphere and ball averages")
    rng = np.random.default_rng(SEED + 5)
    cfg = WalkConfig(samples=10_000, absorb_delta=1e-3, seed=SEED)
    scenes = [("ball", ball_scene()), ("shell", shell_scene()), ("swiss", swiss_cheese_scene())]
    included = total = 0
    for name, sc in scenes:
        full = default_family(sc, 2)
        fam = [f for f in full if f.kind == HARMONIC] + subharmonic_members(full)[:12]
        dom = [neighborhood(sc, 0.025)]
        from .geometry import dist_to_complement
        refs = []
        for z in sample_interior(sc, rng, 5, margin=0.05):
            mu, _ = harmonic_measure(sc, z, dom, cfg, family=fam[:2])
            r = 0.5 * float(dist_to_complement(sc, z))
            cands = [sphere_measure(z, r, 10_000, rng), ball_measure(z, r, 10_000, rng)]
            rep = maximality_probe(mu, z, cands, fam, labels=["sphere", "ball"])
            refs += rep.refutations
            included += sum(c.included for c in rep.candidates)
            total += len(rep.candidates)
        res.checks.append(Check(f"{name}: zero refutations", not refs,
                                "; ".join(f"{r['witness']} {r['omega']:.4g} < {r['candidate']:.4g}" for r in refs)))
    res.info.append(f"{included}/{total} candidates passed the Jensen screen")
    return res


def fine_dichotomy() -> CriterionResult:
    res = CriterionResult("fine_dichotomy", "road-runner scenes: thin versus non-thin at the origin")
    z = np.zeros(3)
    cases = [
        ("4^-m", road_runner_thin(), FineVerdict.NOT_FINE_BOUNDARY, (0.01, 0.5, 4), 1e-4, 20_000),
        ("0.99*2^(-m-2)", road_runner_fat(), FineVerdict.FINE_BOUNDARY, (0.02, 0.25, 4), 1e-5, 10_000),
    ]
    for label, sc, expected, sched, delta, N in cases:
        fc = classify_fine(sc, z, 20)
        res.checks.append(Check(f"{label} Wiener verdict", fc.verdict is expected, fc.verdict.value))
        cfg = WalkConfig(samples=N, absorb_delta=delta, max_steps=5000, seed=SEED)
        rep = concentration_diagnostic(sc, z, domain_schedule(sc, *sched), cfg, cross_check=False)
        res.checks.append(Check(f"{label} concentration trend", rep.fine_class.verdict is expected,
                                f"{rep.trend}; mass within 0.1: {np.round(rep.mass[:, rep.radii.index(0.1)], 4).tolist()}"))
    return res


def dirichlet_solve() -> CriterionResult:
    res = CriterionResult("dirichlet_solve", "shell oracle, harmonic data, sup-norm bound")
    cfg = WalkConfig(samples=10_000, absorb_delta=1e-3, seed=SEED)
    sched = (0.1, 0.5, 5)
    shell = shell_scene()
    radii = np.linspace(0.5, 1.0, 22)[1:-1]
    rng = np.random.default_rng(SEED + 8)
    dirs = rng.standard_normal((radii.size, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    pts = radii[:, None] * dirs
    sol = solve(shell, outer_indicator_data(shell), pts, sched, cfg)
    exact = 2 - 1 / radii
    err = np.abs(sol.values - exact)
    tol = np.array([3 * p.stderr + p.gap for p in sol.points])
    res.checks.append(Check("shell radial oracle", bool(np.all(err <= tol)),
                            f"{int(np.sum(err <= tol))}/{radii.size}, max err/tol {float(np.max(err / tol)):.2f}"))
    sup_ok = sol.sup_norm_ok()
    scenes = [("ball", ball_scene()), ("shell", shell), ("swiss", swiss_cheese_scene()),
              ("rr-thin", road_runner_thin()), ("rr-fat", road_runner_fat())]
    for name, sc in scenes:
        p = np.vstack([sample_interior(sc, rng, 4, margin=0.02), [[1.0, 0, 0]]])
        s = solve(sc, coordinate_data(0), p, (0.1, 0.5, 3), cfg, classify=False)
        e = np.abs(s.values - p[:, 0])
        t = np.array([3 * q.stderr + q.gap for q in s.points]) + 1e-12
        res.checks.append(Check(f"{name} x1 reproduced", bool(np.all(e <= t)), f"max err/tol {float(np.max(e / t)):.2f}"))
        sup_ok = sup_ok and s.sup_norm_ok()
    res.checks.append(Check("sup-norm bound", sup_ok))
    return res


def converse_failure() -> CriterionResult:
    res = CriterionResult("converse_failure", "data vanishing near a thin point is not attained there")
    sc = road_runner_thin()
    z = np.zeros(3)
    cfg = WalkConfig(samples=20_000, absorb_delta=1e-4, max_steps=5000, seed=SEED)
    sched = domain_schedule(sc, 0.01, 0.5, 4)
    phi = away_from_data(z, 0.1)
    sol = solve(sc, phi, z[None, :], sched, cfg)
    pt = sol.points[0]
    res.checks.append(Check("phi(0) = 0", pt.data_value == 0.0, f"{pt.data_value}"))
    res.checks.append(Check("h(0) >= 0.1", pt.value - 3 * pt.stderr >= 0.1,
                            f"h(0) = {pt.value:.4f} ± {pt.stderr:.2g}"))
    rep = concentration_diagnostic(sc, z, sched, cfg, radii=(0.05, 0.1), radius=0.1, cross_check=False)
    limit = float(rep.fine_class.evidence["projected_limit"])
    res.checks.append(Check("concentration bound", 1 - limit >= 0.1,
                            f"projected mass within 0.1 tends to {limit:.3g}, leaving {1 - limit:.3g} away from 0"))
    return res


def _random_target(rng: np.random.Generator):
    k = rng.normal(size=(3, 3))
    phase = rng.uniform(0, 2 * math.pi, 3)
    amp = rng.normal(size=3)

    def p(x):
        x = np.asarray(x, dtype=float)
        return np.sum(amp * np.cos(x @ k.T + phase), axis=-1)
    return p


def edwards_lp() -> CriterionResult:
    res = CriterionResult("edwards_lp", "envelope LP duality, fixed points, ball value, bracket")
    rng = np.random.default_rng(SEED + 10)
    scenes = [ball_scene(), shell_scene(), swiss_cheese_scene()]
    cfg = WalkConfig(samples=10_000, absorb_delta=1e-3, seed=SEED)
    gaps, weak, contained = [], True, True
    for i in range(20):
        sc = scenes[i % 3]
        z = sample_interior(sc, rng, 1, margin=0.05)[0]
        p = _random_target(rng)
        inst = make_instance(sc, z, p, grid_size=512, sphere_probes=96, seed=i)
        P, D = envelope_primal(inst), envelope_dual(inst)
        gaps.append(abs(P.value - D.value))
        weak = weak and min(P.history) >= D.value - 1e-9
        mu, _ = harmonic_measure(sc, z, [neighborhood(sc, 0.025)], cfg, family=default_family(sc, 1)[:2])
        contained = contained and bracket(inst, p, mu, P, D).contains_dual
    res.checks.append(Check("primal-dual gap <= 1e-7", max(gaps) <= 1e-7, f"max gap {max(gaps):.3g}"))
    res.checks.append(Check("weak duality along primal iterates", weak))
    res.checks.append(Check("bracket contains dual value", contained))
    ball = ball_scene()
    fam = default_family(ball, 2)
    targets = [f for f in subharmonic_members(fam)][::2][:5]
    worst = 0.0
    zs = np.vstack([np.zeros(3), sample_interior(ball, rng, 2, margin=0.1)])
    for f in targets:
        for z in zs:
            inst = make_instance(ball, z, f, grid_size=1024, sphere_probes=128, seed=1)
            fz = float(f(inst.z))
            worst = max(worst, abs(envelope_primal(inst).value - fz), abs(envelope_dual(inst).value - fz))
    res.checks.append(Check("Ep = p for subharmonic members", worst <= 1e-6, f"max deviation {worst:.3g}"))

    def bump(x):
        return 1 - np.sum(np.asarray(x) ** 2, axis=-1)
    inst = make_instance(ball, np.zeros(3), bump, grid_size=2048, sphere_probes=256, seed=2)
    P = envelope_primal(inst)
    res.checks.append(Check("1-|x|^2 at 0 within 1e-3", abs(P.value) <= 1e-3 and inst.grid.shape[0] >= 2000,
                            f"value {P.value:.3g} on {inst.grid.shape[0]} grid points"))
    mu, _ = harmonic_measure(ball, np.zeros(3), [neighborhood(ball, 0.025)], cfg, family=fam[:2])
    b = bracket(inst, bump, mu, P)
    res.checks.append(Check("1-|x|^2 bracket contains dual value", b.contains_dual,
                            f"[{b.primal:.3g}, {b.harmonic_upper:.3g}] dual {b.dual:.3g}"))
    return res


CRITERIA: dict[str, Callable[[], CriterionResult]] = {
    "poisson_reproduction": poisson_reproduction,
    "weak_star_convergence": weak_star_convergence,
    "monotone_decrease": monotone_decrease,
    "support_and_concentration": support_and_concentration,
    "jensen_membership": jensen_membership,
    "maximality": maximality,
    "fine_dichotomy": fine_dichotomy,
    "dirichlet_solve": dirichlet_solve,
    "converse_failure": converse_failure,
    "edwards_lp": edwards_lp,
}


def run(keys=None) -> list[CriterionResult]:
    keys = list(CRITERIA) if keys is None else list(keys)
    return [_timed(CRITERIA[k]) for k in keys]
