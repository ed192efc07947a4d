"""Ball-CSG compact sets and their shrinking open neighbourhoods.

A compact set ``K`` is stored as a closed outer ball with finitely many
disjoint open balls removed.  Every distance used downstream (metric
classification, distance to the boundary of an approximating domain,
projection onto a boundary sphere) has a closed form for this class, so
nothing here is approximate beyond floating point.

Road-runner sets (a sequence of deleted balls accumulating at the centre of
the outer ball) are represented by a :class:`RoadRunner` generator.  The
generated list is truncated at index ``count``; the accumulation point
itself is still treated as a limit point of the complement, so it
classifies as a boundary point regardless of the truncation.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .exceptions import SceneError

GEO_TOL = 1e-12


class PointClass(enum.Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    EXTERIOR = "Exterior"


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise SceneError(f"ball radius must be positive and finite, got {self.radius}")
        if not all(math.isfinite(c) for c in self.center):
            raise SceneError(f"ball center must be finite, got {self.center}")


@dataclass(frozen=True)
class RoadRunner:
    """Deleted balls ``B(a + 2^-m R e_1, R * scale * ratio^m)`` for ``m = start..count``.

    ``a`` and ``R`` are the centre and radius of the outer ball.  The radius
    rule must keep ``r_m < 2^(-m-2) R`` for every generated index, and
    ``ratio <= 1/2`` so that the bound persists along the untruncated tail.
    """

    scale: float
    ratio: float
    count: int
    start: int = 1
    kind: str = field(default="road_runner", init=False)

    def __post_init__(self):
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "ratio", float(self.ratio))
        if self.count < self.start or self.start < 1:
            raise SceneError(f"road-runner indices must satisfy 1 <= start <= count, got {self.start}..{self.count}")
        if not 0 < self.ratio <= 0.5:
            raise SceneError(f"road-runner radius ratio must lie in (0, 1/2], got {self.ratio}")
        for m in range(self.start, self.count + 1):
            r = self.relative_radius(m)
            if not 0 < r < 2.0 ** (-m - 2):
                raise SceneError(
                    f"road-runner radius r_{m} = {r!r} violates 0 < r_m < 2^-{m + 2}"
                )

    def relative_radius(self, m: int) -> float:
        return self.scale * self.ratio**m

    def indices(self) -> range:
        return range(self.start, self.count + 1)


@dataclass(frozen=True)
class BallScene:
    """Closed ball ``outer`` minus the open balls in ``deleted``.

    With a ``generator`` the deleted list is derived from it; an explicit
    list is accepted only if it matches the generated one.
    """

    dimension: int
    outer: Ball
    deleted: tuple[Ball, ...] = ()
    generator: RoadRunner | None = None

    def __post_init__(self):
        n = self.dimension
        if int(n) != n or n < 2:
            raise SceneError(f"dimension must be an integer >= 2, got {n}")
        deleted = tuple(self.deleted)
        if self.generator is not None:
            generated = tuple(self._generate(self.generator))
            if deleted and not _same_balls(deleted, generated):
                raise SceneError("explicit deleted balls disagree with the road-runner generator")
            deleted = generated
        object.__setattr__(self, "deleted", deleted)
        self._validate()

    def _generate(self, gen: RoadRunner):
        c0 = np.asarray(self.outer.center)
        R = self.outer.radius
        for m in gen.indices():
            c = c0.copy()
            c[0] += R * 2.0**-m
            yield Ball(tuple(c), R * gen.relative_radius(m))

    def _validate(self):
        n = self.dimension
        if len(self.outer.center) != n:
            raise SceneError(f"outer center has {len(self.outer.center)} coordinates, expected {n}")
        c0 = np.asarray(self.outer.center)
        R = self.outer.radius
        for i, b in enumerate(self.deleted):
            if len(b.center) != n:
                raise SceneError(f"deleted ball {i} has {len(b.center)} coordinates, expected {n}")
            if np.linalg.norm(np.asarray(b.center) - c0) + b.radius >= R:
                raise SceneError(f"deleted ball {i} is not contained in the open outer ball")
        if len(self.deleted) > 1:
            C, r = self.deleted_centers, self.deleted_radii
            d = np.linalg.norm(C[:, None, :] - C[None, :, :], axis=-1)
            s = r[:, None] + r[None, :]
            iu = np.triu_indices(len(r), 1)
            bad = np.nonzero(d[iu] <= s[iu])[0]
            if bad.size:
                i, j = iu[0][bad[0]], iu[1][bad[0]]
                raise SceneError(f"deleted closed balls {i} and {j} intersect")

    @cached_property
    def deleted_centers(self) -> np.ndarray:
        return np.array([b.center for b in self.deleted], dtype=float).reshape(-1, self.dimension)

    @cached_property
    def deleted_radii(self) -> np.ndarray:
        return np.array([b.radius for b in self.deleted], dtype=float)

    @property
    def outer_center(self) -> np.ndarray:
        return np.asarray(self.outer.center, dtype=float)

    @property
    def accumulation_point(self) -> np.ndarray | None:
        return self.outer_center if self.generator is not None else None

    @property
    def truncation_radius(self) -> float | None:
        """Radius about the accumulation point inside which truncation matters."""
        if self.generator is None:
            return None
        return self.outer.radius * 2.0 ** -self.generator.count


def _same_balls(a, b, tol=1e-12):
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if abs(x.radius - y.radius) > tol or np.max(np.abs(np.subtract(x.center, y.center))) > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# scene constructors
# ---------------------------------------------------------------------------

def ball_scene(dimension: int = 3, radius: float = 1.0) -> BallScene:
    return BallScene(dimension, Ball((0.0,) * dimension, radius))


def shell_scene(inner: float = 0.5, dimension: int = 3) -> BallScene:
    """Closed unit ball minus the open ball of radius ``inner`` about the origin."""
    return BallScene(dimension, Ball((0.0,) * dimension, 1.0), (Ball((0.0,) * dimension, inner),))


def swiss_cheese_scene(dimension: int = 3) -> BallScene:
    """Unit ball with three disjoint holes of radius 1/4."""
    holes = []
    for axis, sign in ((0, 1.0), (0, -1.0), (1, 1.0)):
        c = [0.0] * dimension
        c[axis] = 0.5 * sign
        holes.append(Ball(tuple(c), 0.25))
    return BallScene(dimension, Ball((0.0,) * dimension, 1.0), tuple(holes))


def road_runner_scene(scale: float, ratio: float, count: int, start: int = 1,
                      dimension: int = 3) -> BallScene:
    """Unit ball minus ``B(2^-m e_1, scale * ratio^m)`` for ``m = start..count``."""
    return BallScene(dimension, Ball((0.0,) * dimension, 1.0),
                     generator=RoadRunner(scale, ratio, count, start))


# ---------------------------------------------------------------------------
# metric functions on K (vectorised over leading axes)
# ---------------------------------------------------------------------------

def _as_points(scene: BallScene, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != scene.dimension:
        raise ValueError(f"points must have trailing dimension {scene.dimension}, got shape {x.shape}")
    return x


def _hole_distances(scene: BallScene, x: np.ndarray) -> np.ndarray:
    """``|x - c_i| - r_i`` for every deleted ball, shape ``x.shape[:-1] + (k,)``."""
    if not scene.deleted:
        return np.full(x.shape[:-1] + (0,), np.inf)
    diff = x[..., None, :] - scene.deleted_centers
    return np.linalg.norm(diff, axis=-1) - scene.deleted_radii


def dist_to_K(scene: BallScene, x) -> np.ndarray | float:
    x = _as_points(scene, x)
    out = np.linalg.norm(x - scene.outer_center, axis=-1) - scene.outer.radius
    d = np.maximum(out, 0.0)
    h = _hole_distances(scene, x)
    if h.shape[-1]:
        d = np.maximum(d, np.maximum(-h.min(axis=-1), 0.0))
    return d if d.ndim else float(d)


def dist_to_complement(scene: BallScene, x) -> np.ndarray | float:
    x = _as_points(scene, x)
    d = scene.outer.radius - np.linalg.norm(x - scene.outer_center, axis=-1)
    h = _hole_distances(scene, x)
    if h.shape[-1]:
        d = np.minimum(d, h.min(axis=-1))
    a = scene.accumulation_point
    if a is not None:
        d = np.minimum(d, np.linalg.norm(x - a, axis=-1))
    d = np.maximum(d, 0.0)
    return d if d.ndim else float(d)


def dist_to_boundary(scene: BallScene, x) -> np.ndarray | float:
    """Distance from ``x`` to the topological boundary of ``K``."""
    return dist_to_K(scene, x) + dist_to_complement(scene, x)


def classify_point(scene: BallScene, x, tol: float = GEO_TOL) -> PointClass:
    x = _as_points(scene, x)
    if x.ndim != 1:
        raise ValueError("classify_point takes a single point")
    if dist_to_K(scene, x) > tol:
        return PointClass.EXTERIOR
    if dist_to_complement(scene, x) > tol:
        return PointClass.INTERIOR
    return PointClass.BOUNDARY


def _radial_projection(x, centers, radii):
    v = x - centers
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    e1 = np.zeros_like(v)
    e1[..., 0] = 1.0
    u = np.where(norm > 0, v / np.where(norm > 0, norm, 1.0), e1)
    return centers + radii[..., None] * u


def project_to_boundary(scene: BallScene, x) -> np.ndarray:
    """Nearest point of the union of the boundary spheres of ``K``.

    For points outside ``K`` this is the nearest point of ``K``; for points
    of ``K`` it is the nearest point of the complement's closure.
    """
    x = _as_points(scene, x)
    n = scene.dimension
    centers = np.vstack([scene.outer_center[None, :], scene.deleted_centers])
    radii = np.concatenate([[scene.outer.radius], scene.deleted_radii])
    gaps = np.abs(np.linalg.norm(x[..., None, :] - centers, axis=-1) - radii)
    idx = np.argmin(gaps, axis=-1)
    return _radial_projection(x, centers[idx].reshape(x.shape[:-1] + (n,)), radii[idx])


def sample_interior(scene: BallScene, rng: np.random.Generator, count: int,
                    margin: float = 0.0) -> np.ndarray:
    """Uniform points of ``K`` at distance more than ``margin`` from its complement."""
    n, R, c0 = scene.dimension, scene.outer.radius, scene.outer_center
    found = []
    total = 0
    while total < count:
        g = rng.standard_normal((4 * count, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        pts = c0 + R * g * rng.random((4 * count, 1)) ** (1.0 / n)
        pts = pts[dist_to_complement(scene, pts) > margin]
        found.append(pts)
        total += len(pts)
    return np.vstack(found)[:count]


# ---------------------------------------------------------------------------
# approximating domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Open ``epsilon``-neighbourhood of a ball-CSG compact set.

    The neighbourhood of ``B(c0, R) minus U B(c_i, r_i)`` is again of ball type:
    ``B(c0, R + eps)`` minus the closed balls ``B(c_i, r_i - eps)``, with the
    holes whose radius drops to zero or below removed.
    """

    scene: BallScene
    epsilon: float
    outer_radius: float
    centers: np.ndarray = field(repr=False, compare=False)
    radii: np.ndarray = field(repr=False, compare=False)
    kept: tuple[int, ...] = ()

    @property
    def dimension(self) -> int:
        return self.scene.dimension

    @property
    def outer_center(self) -> np.ndarray:
        return self.scene.outer_center

    def distance_to_boundary(self, x) -> np.ndarray | float:
        """Signed: positive inside the domain, negative outside."""
        x = np.asarray(x, dtype=float)
        d = self.outer_radius - np.linalg.norm(x - self.outer_center, axis=-1)
        if len(self.radii):
            h = np.linalg.norm(x[..., None, :] - self.centers, axis=-1) - self.radii
            d = np.minimum(d, h.min(axis=-1))
        return d if d.ndim else float(d)

    def contains(self, x) -> np.ndarray | bool:
        d = self.distance_to_boundary(x)
        return d > 0

    def project_to_boundary(self, x) -> np.ndarray:
        """Nearest point of ``∂U`` via the nearest sphere's radial projection."""
        x = np.asarray(x, dtype=float)
        n = self.dimension
        centers = np.vstack([self.outer_center[None, :], self.centers.reshape(-1, n)])
        radii = np.concatenate([[self.outer_radius], self.radii])
        gaps = np.abs(np.linalg.norm(x[..., None, :] - centers, axis=-1) - radii)
        idx = np.argmin(gaps, axis=-1)
        return _radial_projection(x, centers[idx].reshape(x.shape[:-1] + (n,)), radii[idx])

    def feature_size(self) -> float:
        """Smallest hole radius or gap between boundary spheres."""
        sizes = [self.outer_radius]
        if len(self.radii):
            sizes.append(float(self.radii.min()))
            gaps_out = self.outer_radius - np.linalg.norm(self.centers - self.outer_center, axis=1) - self.radii
            sizes.append(float(gaps_out.min()))
            if len(self.radii) > 1:
                d = np.linalg.norm(self.centers[:, None] - self.centers[None], axis=-1)
                d -= self.radii[:, None] + self.radii[None, :]
                iu = np.triu_indices(len(self.radii), 1)
                sizes.append(float(d[iu].min()))
        return min(sizes)

    def closure_contained_in(self, other: "Domain") -> bool:
        """True when ``closure(self)`` is a subset of ``other``."""
        if self.scene != other.scene:
            raise ValueError("domains belong to different scenes")
        if not self.outer_radius < other.outer_radius:
            return False
        mine = dict(zip(self.kept, self.radii))
        for i, rho in zip(other.kept, other.radii):
            if i not in mine or not mine[i] > rho:
                return False
        return True


def neighborhood(scene: BallScene, epsilon: float) -> Domain:
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    eff = scene.deleted_radii - epsilon
    kept = tuple(int(i) for i in np.nonzero(eff > 0)[0])
    return Domain(
        scene=scene,
        epsilon=float(epsilon),
        outer_radius=scene.outer.radius + epsilon,
        centers=scene.deleted_centers[list(kept)].reshape(-1, scene.dimension),
        radii=eff[list(kept)],
        kept=kept,
    )


def domain_schedule(scene: BallScene, eps0: float, ratio: float, count: int) -> list[Domain]:
    if not eps0 > 0:
        raise ValueError("eps0 must be positive")
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie in (0, 1)")
    if count < 1:
        raise ValueError("count must be at least 1")
    return [neighborhood(scene, eps0 * ratio**j) for j in range(count)]


# ---------------------------------------------------------------------------
# scene files
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    if isinstance(x, bool) or isinstance(x, int):
        return str(x)
    # adding 0.0 folds -0.0 into 0.0 so the text form is canonical
    return format(float(x) + 0.0, ".17g")


def _dump(obj) -> str:
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_dump(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    return _fmt(obj)


def scene_to_dict(scene: BallScene) -> dict:
    d = {
        "dimension": scene.dimension,
        "outer": {"center": list(scene.outer.center), "radius": scene.outer.radius},
        "deleted": [{"center": list(b.center), "radius": b.radius} for b in scene.deleted],
    }
    if scene.generator is not None:
        g = scene.generator
        d["generator"] = {
            "kind": g.kind,
            "radius_rule": {"scale": g.scale, "ratio": g.ratio},
            "count": g.count,
            "start": g.start,
        }
    return d


def scene_to_json(scene: BallScene) -> str:
    """Canonical text form; floats carry 17 significant digits."""
    return _dump(scene_to_dict(scene)) + "\n"


def scene_from_dict(d: dict) -> BallScene:
    try:
        dim = d["dimension"]
        outer = Ball(d["outer"]["center"], d["outer"]["radius"])
        deleted = tuple(Ball(b["center"], b["radius"]) for b in d.get("deleted", []))
        gen = None
        if d.get("generator") is not None:
            g = d["generator"]
            if g.get("kind", "road_runner") != "road_runner":
                raise SceneError(f"unknown generator kind {g.get('kind')!r}")
            rule = g["radius_rule"]
            gen = RoadRunner(rule["scale"], rule["ratio"], int(g["count"]), int(g.get("start", 1)))
    except (KeyError, TypeError) as exc:
        raise SceneError(f"malformed scene description: {exc!r}") from exc
    if not isinstance(dim, int):
        raise SceneError(f"dimension must be an integer, got {dim!r}")
    return BallScene(dim, outer, deleted, gen)


def scene_from_json(text: str) -> BallScene:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"scene file is not valid JSON: {exc}") from exc
    if not isinstance(d, dict):
        raise SceneError("scene file must hold a JSON object")
    return scene_from_dict(d)


def load_scene(path) -> BallScene:
    with open(path, encoding="utf-8") as fh:
        return scene_from_json(fh.read())


def save_scene(scene: BallScene, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scene_to_json(scene))


def scene_hash(scene: BallScene) -> str:
    return hashlib.sha256(scene_to_json(scene).encode()).hexdigest()[:16]


def as_point(values: Sequence[float] | np.ndarray, dimension: int) -> np.ndarray:
    p = np.asarray(values, dtype=float).reshape(-1)
    if p.shape != (dimension,):
        raise ValueError(f"expected a point with {dimension} coordinates, got {p.shape[0]}")
    return p
