"""Discrete Edwards envelope ``Ep(z)`` of a target ``p`` on a compact set.

Two linear programs describe the same number on a finite grid:

* the primal minimises ``Σ w_i p(x_i)`` over grid measures with barycenter
  ``z`` that satisfy the Jensen inequalities of a finite witness family;
* the dual maximises ``c0 + Σ λ_k f_k(z)`` over combinations of the family
  that stay below ``p`` on the grid (``λ_k >= 0`` on subharmonic members,
  free on harmonic ones).

The primal is solved with the simplex code in :mod:`.simplex`, the dual
with SciPy's HiGHS interface, so the duality gap compares two independent
solvers.  Since the finite family relaxes the Jensen condition, the primal
value is a lower estimate; the harmonic measure integral of ``p`` gives the
matching upper end of the reported bracket.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.stats import qmc

from ..exceptions import PreconditionError
from ..geometry import BallScene, PointClass, classify_point, project_to_boundary, scene_from_dict, scene_to_dict
from ..jensen import HARMONIC, TestFunction, default_family
from ..measure import EmpiricalMeasure, measure_to_csv
from .simplex import SimplexError, SimplexResult, solve_standard_form

GAP_TOL = 1e-7


def fibonacci_sphere(count: int, dimension: int = 3) -> np.ndarray:
    """Near-uniform unit vectors; in 3D a Fibonacci lattice, otherwise evenly spaced angles."""
    if dimension == 2:
        t = 2 * math.pi * (np.arange(count) + 0.5) / count
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    if dimension != 3:
        raise ValueError("sphere probes are implemented for dimensions 2 and 3")
    i = np.arange(count) + 0.5
    polar = np.arccos(1 - 2 * i / count)
    azim = math.pi * (1 + 5**0.5) * i
    return np.stack([np.cos(azim) * np.sin(polar), np.sin(azim) * np.sin(polar), np.cos(polar)], axis=1)


def _axis_probes(dimension: int) -> np.ndarray:
    eye = np.eye(dimension)
    return np.vstack([eye, -eye])


@dataclass
class DiscreteInstance:
    scene: BallScene
    grid: np.ndarray
    z_index: int
    family: list[TestFunction]
    target: np.ndarray
    target_id: str = "p"
    seed: int = 0

    def __post_init__(self):
        self.grid = np.atleast_2d(np.asarray(self.grid, dtype=float))
        self.target = np.asarray(self.target, dtype=float).reshape(-1)
        if self.target.shape[0] != self.grid.shape[0]:
            raise ValueError("target must have one value per grid point")
        if not np.all(np.isfinite(self.target)):
            i = int(np.argmax(~np.isfinite(self.target)))
            raise PreconditionError(f"target is not finite at grid point {self.grid[i].tolist()}")
        have = {f.coordinate for f in self.family}
        need = {(i, s) for i in range(self.grid.shape[1]) for s in (1, -1)}
        if not need <= have or not any(f.definition == "constant" for f in self.family):
            raise PreconditionError("family must contain constants and both signs of every coordinate")

    @property
    def z(self) -> np.ndarray:
        return self.grid[self.z_index]

    def constraint_rows(self):
        """Witness values on the grid and at ``z``, constants dropped and ``±`` harmonic pairs merged.

        Returns ``(harmonic_G, harmonic_z, sub_G, sub_z, ids)``.  Rows of
        ``G`` are grid values of one witness.
        """
        harm, harm_z, sub, sub_z = [], [], [], []
        seen = []
        ids = {"harmonic": [], "subharmonic": []}
        for f in self.family:
            if f.definition == "constant":
                continue
            vals = np.asarray(f(self.grid), dtype=float)
            fz = float(f(self.z))
            if f.kind == HARMONIC:
                if any(np.allclose(vals, -v) or np.allclose(vals, v) for v in seen):
                    continue
                seen.append(vals)
                harm.append(vals)
                harm_z.append(fz)
                ids["harmonic"].append(f.id)
            else:
                sub.append(vals)
                sub_z.append(fz)
                ids["subharmonic"].append(f.id)
        n = self.grid.shape[0]
        return (np.array(harm).reshape(-1, n), np.array(harm_z), np.array(sub).reshape(-1, n),
                np.array(sub_z), ids)

    def to_dict(self) -> dict:
        return {
            "scene": scene_to_dict(self.scene),
            "z_index": self.z_index,
            "seed": self.seed,
            "target_id": self.target_id,
            "family": [f.to_dict() for f in self.family],
            "grid": self.grid.tolist(),
            "target": self.target.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "DiscreteInstance":
        return cls(scene_from_dict(d["scene"]), np.array(d["grid"]), int(d["z_index"]),
                   [TestFunction.from_dict(f) for f in d["family"]], np.array(d["target"]),
                   d.get("target_id", "p"), int(d.get("seed", 0)))

    @classmethod
    def from_json(cls, text: str) -> "DiscreteInstance":
        return cls.from_dict(json.loads(text))


def make_grid(scene: BallScene, grid_size: int = 2048, sphere_probes: int = 256, seed: int = 0) -> np.ndarray:
    """Scrambled Sobol points of ``K`` plus probes on every boundary sphere."""
    n = scene.dimension
    c0, R = scene.outer_center, scene.outer.radius
    sampler = qmc.Sobol(n, scramble=True, seed=seed)
    pts = []
    have = 0
    while have < grid_size:
        raw = c0 + R * (2 * sampler.random(1 << max(6, math.ceil(math.log2(grid_size)))) - 1)
        inK = np.array([classify_point(scene, x) is not PointClass.EXTERIOR for x in raw])
        pts.append(raw[inK])
        have += int(inK.sum())
    interior = np.vstack(pts)[:grid_size]
    dirs = np.vstack([_axis_probes(n), fibonacci_sphere(sphere_probes, n)])
    probes = [c0 + R * dirs]
    for c, r in zip(scene.deleted_centers, scene.deleted_radii):
        k = max(2 * n, int(sphere_probes * r / R))
        probes.append(c + r * np.vstack([_axis_probes(n), fibonacci_sphere(k, n)]))
    return np.vstack([interior] + probes)


def make_instance(scene: BallScene, z, target: Callable, grid_size: int = 2048, sphere_probes: int = 256,
                  seed: int = 0, family: Sequence[TestFunction] | None = None, degree: int = 2,
                  target_id: str | None = None) -> DiscreteInstance:
    z = np.asarray(z, dtype=float)
    if classify_point(scene, z) is PointClass.EXTERIOR:
        raise PreconditionError(f"barycenter {z.tolist()} lies outside K")
    grid = np.vstack([make_grid(scene, grid_size, sphere_probes, seed), z[None, :]])
    fam = list(family) if family is not None else default_family(scene, degree)
    tid = target_id or getattr(target, "id", getattr(target, "__name__", "p"))
    return DiscreteInstance(scene, grid, len(grid) - 1, fam, np.asarray(target(grid), dtype=float), tid, seed)


@dataclass
class EnvelopeSolution:
    value: float
    weights: np.ndarray | None = None
    coefficients: dict | None = None
    history: list[float] = field(default_factory=list)
    solver: str = ""
    label: str = ""

    def to_dict(self) -> dict:
        out = {"value": self.value, "solver": self.solver, "label": self.label}
        if self.weights is not None:
            nz = np.nonzero(self.weights > 0)[0]
            out["support_indices"] = nz.tolist()
            out["support_weights"] = self.weights[nz].tolist()
        if self.coefficients is not None:
            out["coefficients"] = self.coefficients
        return out


def envelope_primal(instance: DiscreteInstance, tol: float = 1e-10) -> EnvelopeSolution:
    """Minimise ``Σ w_i p(x_i)`` over grid measures satisfying the Jensen rows of the family."""
    H, hz, S, sz, _ = instance.constraint_rows()
    n = instance.grid.shape[0]
    k = S.shape[0]
    # columns: weights (n) then surplus variables for subharmonic rows (k)
    A = np.block([
        [np.ones((1, n)), np.zeros((1, k))],
        [H, np.zeros((H.shape[0], k))],
        [S, -np.eye(k)],
    ])
    b = np.concatenate([[1.0], hz, sz])
    c = np.concatenate([instance.target, np.zeros(k)])
    res: SimplexResult = solve_standard_form(A, b, c, tol=tol)
    if res.status != "optimal":
        # δ_z is always feasible and weights lie in a simplex, so this is a solver fault
        raise SimplexError(f"primal envelope LP ended with status {res.status}")
    w = res.x[:n]
    w = np.where(w > 1e-14, w, 0.0)
    w = w / math.fsum(w)
    return EnvelopeSolution(res.value, w, None, list(res.history), "simplex",
                            "lower estimate: finite witness family relaxes the Jensen condition")


def envelope_dual(instance: DiscreteInstance) -> EnvelopeSolution:
    """Maximise ``c0 + Σ λ_k f_k(z)`` over family combinations below ``p`` on the grid (HiGHS)."""
    H, hz, S, sz, ids = instance.constraint_rows()
    n = instance.grid.shape[0]
    # variables: c0, harmonic coefficients (free), subharmonic coefficients (>= 0)
    A_ub = np.hstack([np.ones((n, 1)), H.T, S.T])
    obj = -np.concatenate([[1.0], hz, sz])
    bounds = [(None, None)] * (1 + H.shape[0]) + [(0, None)] * S.shape[0]
    res = linprog(obj, A_ub=A_ub, b_ub=instance.target, bounds=bounds, method="highs",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise SimplexError(f"dual envelope LP failed: {res.message}")
    x = res.x
    coeffs = {"constant": float(x[0])}
    coeffs.update({fid: float(v) for fid, v in zip(ids["harmonic"], x[1:1 + H.shape[0]])})
    coeffs.update({fid: float(v) for fid, v in zip(ids["subharmonic"], x[1 + H.shape[0]:])})
    return EnvelopeSolution(float(-res.fun), None, coeffs, [], "highs", "dual witness value")


def optimal_measure(instance: DiscreteInstance, primal: EnvelopeSolution) -> EmpiricalMeasure:
    nz = np.nonzero(primal.weights > 0)[0]
    w = primal.weights[nz] / math.fsum(primal.weights[nz])
    return EmpiricalMeasure(instance.grid[nz], w, instance.z,
                            {"kind": "envelope_lp", "seed": instance.seed, "target": instance.target_id})


def export_measure_csv(instance: DiscreteInstance, primal: EnvelopeSolution) -> str:
    return measure_to_csv(optimal_measure(instance, primal), {"kind": "envelope_lp"})


@dataclass
class EnvelopeBracket:
    primal: float
    dual: float
    harmonic_upper: float
    harmonic_stderr: float
    k: float = 3.0

    @property
    def gap(self) -> float:
        return self.primal - self.dual

    @property
    def contains_dual(self) -> bool:
        """``dual`` lies in ``[primal, ω̂(p)]`` up to the LP tolerance and ``k`` standard errors."""
        lo = self.primal - GAP_TOL
        hi = self.harmonic_upper + self.k * self.harmonic_stderr + GAP_TOL
        return lo <= self.dual <= hi

    def to_dict(self) -> dict:
        return {"primal": self.primal, "dual": self.dual, "gap": self.gap,
                "bracket": [self.primal, self.harmonic_upper], "harmonic_stderr": self.harmonic_stderr,
                "contains_dual": self.contains_dual}


def bracket(instance: DiscreteInstance, target: Callable, omega: EmpiricalMeasure,
            primal: EnvelopeSolution | None = None, dual: EnvelopeSolution | None = None) -> EnvelopeBracket:
    """Bracket ``[LP value, ω̂(p)]`` with the harmonic-measure support pulled back onto ``∂K``."""
    primal = primal or envelope_primal(instance)
    dual = dual or envelope_dual(instance)
    pulled = omega.pushforward(lambda x: project_to_boundary(instance.scene, x))
    return EnvelopeBracket(primal.value, dual.value, pulled.integrate(target), pulled.stderr(target))


__all__ = [
    "DiscreteInstance", "EnvelopeBracket", "EnvelopeSolution", "GAP_TOL", "SimplexError",
    "bracket", "envelope_dual", "envelope_primal", "export_measure_csv", "fibonacci_sphere",
    "make_grid", "make_instance", "optimal_measure", "solve_standard_form",
]
