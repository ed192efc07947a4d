"""Empirical probability measures and the test-integral order between them.

An :class:`EmpiricalMeasure` is a finite weighted point set with a claimed
barycenter.  Monte Carlo measures (uniform weights over independent draws)
carry standard errors for every integral; deterministic ones (Dirac masses,
LP optima) do not.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import ConfigurationError, NonFiniteValueError

WEIGHT_TOL = 1e-12
EXACT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    support: np.ndarray
    weights: np.ndarray
    barycenter_claim: np.ndarray
    provenance: dict = field(default_factory=dict)
    monte_carlo: bool = False
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.support, dtype=float))
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        b = np.asarray(self.barycenter_claim, dtype=float).reshape(-1)
        if s.shape[0] != w.shape[0]:
            raise ValueError(f"{s.shape[0]} support points but {w.shape[0]} weights")
        if s.shape[1] != b.shape[0]:
            raise ValueError("barycenter dimension does not match the support")
        if not np.all(np.isfinite(s)):
            raise ValueError("support points must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        total = math.fsum(w)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "barycenter_claim", b)

    @property
    def dimension(self) -> int:
        return self.support.shape[1]

    @property
    def size(self) -> int:
        return self.support.shape[0]

    @classmethod
    def dirac(cls, z, **provenance) -> "EmpiricalMeasure":
        z = np.asarray(z, dtype=float).reshape(-1)
        return cls(z[None, :], np.ones(1), z, dict(provenance, kind="dirac"))

    @classmethod
    def uniform(cls, points, barycenter, monte_carlo=True, **provenance) -> "EmpiricalMeasure":
        points = np.atleast_2d(np.asarray(points, dtype=float))
        n = points.shape[0]
        return cls(points, np.full(n, 1.0 / n), barycenter, dict(provenance), monte_carlo)

    def values(self, f: Callable) -> np.ndarray:
        """``f`` on the support; raises naming the first offending point."""
        v = np.asarray(f(self.support), dtype=float).reshape(-1)
        if v.shape[0] != self.size:
            v = np.broadcast_to(v, (self.size,)).copy()
        bad = ~np.isfinite(v)
        if bad.any():
            i = int(np.argmax(bad))
            raise NonFiniteValueError(self.support[i], v[i], what=getattr(f, "id", "integrand"))
        return v

    def integrate(self, f: Callable) -> float:
        return float(np.dot(self.weights, self.values(f)))

    def stderr(self, f: Callable) -> float:
        """Monte Carlo standard error of :meth:`integrate`; zero for exact measures."""
        if not self.monte_carlo or self.size < 2:
            return 0.0
        v = self.values(f)
        return float(np.std(v, ddof=1) / math.sqrt(self.size))

    def mean(self) -> np.ndarray:
        return self.weights @ self.support

    def pushforward(self, mapping: Callable, **provenance) -> "EmpiricalMeasure":
        """Image measure under a point map applied to the support."""
        prov = dict(self.provenance)
        prov.update(provenance)
        return EmpiricalMeasure(np.asarray(mapping(self.support), dtype=float), self.weights,
                                self.barycenter_claim, prov, self.monte_carlo, self.warnings)


def integrate(mu: EmpiricalMeasure, f: Callable) -> float:
    return mu.integrate(f)


def mass_within(mu: EmpiricalMeasure, z, r: float) -> float:
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    z = np.asarray(z, dtype=float)
    inside = np.linalg.norm(mu.support - z, axis=1) <= r
    return float(math.fsum(mu.weights[inside]))


def mass_within_stderr(mu: EmpiricalMeasure, z, r: float) -> float:
    if not mu.monte_carlo:
        return 0.0
    p = mass_within(mu, z, r)
    return math.sqrt(p * (1 - p) / mu.size)


def sphere_measure(z, radius: float, samples: int, rng: np.random.Generator) -> EmpiricalMeasure:
    """Monte Carlo sample of normalised surface measure on ``S(z, radius)``."""
    z = np.asarray(z, dtype=float)
    g = rng.standard_normal((samples, z.size))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return EmpiricalMeasure.uniform(z + radius * g, z, kind="sphere", radius=radius)


def ball_measure(z, radius: float, samples: int, rng: np.random.Generator) -> EmpiricalMeasure:
    """Monte Carlo sample of normalised volume measure on ``B(z, radius)``."""
    z = np.asarray(z, dtype=float)
    n = z.size
    g = rng.standard_normal((samples, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = radius * rng.random((samples, 1)) ** (1.0 / n)
    return EmpiricalMeasure.uniform(z + rad * g, z, kind="ball", radius=radius)


def combined_tolerance(mu: EmpiricalMeasure, nu: EmpiricalMeasure, f: Callable, k: float = 3.0) -> float:
    """``k`` combined standard errors, or the exact-arithmetic floor."""
    if mu.monte_carlo or nu.monte_carlo:
        return max(k * math.hypot(mu.stderr(f), nu.stderr(f)), EXACT_TOL)
    return EXACT_TOL


# ---------------------------------------------------------------------------
# order between measures
# ---------------------------------------------------------------------------

class Order(enum.Enum):
    DOMINATES = "DominatesUpTo"
    DOMINATED_BY = "DominatedByUpTo"
    EQUAL = "EqualUpTo"
    INCOMPARABLE = "Incomparable"
    INCONCLUSIVE = "Inconclusive"

    def swapped(self) -> "Order":
        return {Order.DOMINATES: Order.DOMINATED_BY, Order.DOMINATED_BY: Order.DOMINATES}.get(self, self)


@dataclass
class Witness:
    id: str
    mu_value: float
    nu_value: float
    tolerance: float

    @property
    def difference(self) -> float:
        return self.mu_value - self.nu_value

    @property
    def sign(self) -> int:
        d = self.difference
        return 1 if d > self.tolerance else (-1 if d < -self.tolerance else 0)


@dataclass
class OrderVerdict:
    """Result of comparing two measures on a finite witness family.

    ``order`` is relative to the first argument: ``DOMINATES`` means the
    first measure integrates every witness at least as high, up to the
    tolerance and only for the family checked.
    """

    order: Order
    witnesses: list[Witness]
    evaluations: list[Witness]
    skipped: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def row(w):
            return {"id": w.id, "mu": w.mu_value, "nu": w.nu_value, "tolerance": w.tolerance}
        return {
            "verdict": self.order.value,
            "scope": "up to witness family and tolerance",
            "witnesses": [row(w) for w in self.witnesses],
            "evaluations": [row(w) for w in self.evaluations],
            "skipped": list(self.skipped),
        }


def _require_coordinates(family: Sequence, dimension: int) -> None:
    have = {getattr(f, "coordinate", None) for f in family}
    missing = [(i, s) for i in range(dimension) for s in (1, -1) if (i, s) not in have]
    if missing:
        raise ConfigurationError(
            f"witness family lacks coordinate functions {missing}; both signs of every coordinate are required"
        )


def compare_order(mu: EmpiricalMeasure, nu: EmpiricalMeasure, family: Sequence,
                  tol: float | None = None) -> OrderVerdict:
    if mu.dimension != nu.dimension:
        raise ValueError("measures live in different dimensions")
    _require_coordinates(family, mu.dimension)
    evaluations, skipped = [], []
    for f in family:
        try:
            a, b = mu.integrate(f), nu.integrate(f)
        except NonFiniteValueError:
            skipped.append(f.id)
            continue
        t = combined_tolerance(mu, nu, f) if tol is None else tol
        evaluations.append(Witness(f.id, a, b, t))
    if not evaluations:
        return OrderVerdict(Order.INCONCLUSIVE, [], [], skipped)
    up = [w for w in evaluations if w.sign > 0]
    down = [w for w in evaluations if w.sign < 0]
    if up and down:
        order, witnesses = Order.INCOMPARABLE, [up[0], down[0]]
    elif up:
        order, witnesses = Order.DOMINATES, up
    elif down:
        order, witnesses = Order.DOMINATED_BY, down
    else:
        order, witnesses = Order.EQUAL, []
    return OrderVerdict(order, witnesses, evaluations, skipped)


# ---------------------------------------------------------------------------
# CSV exchange format
# ---------------------------------------------------------------------------

def measure_to_csv(mu: EmpiricalMeasure, header: dict | None = None) -> str:
    """Rows ``x_1..x_n, weight``; a leading ``#`` line carries run metadata."""
    meta = {
        "seed": mu.provenance.get("seed"),
        "N": mu.size,
        "absorb_delta": mu.provenance.get("absorb_delta"),
        "truncation_fraction": mu.provenance.get("truncation_fraction"),
    }
    if header:
        meta.update(header)
    buf = io.StringIO()
    buf.write("# " + ",".join(f"{k}={_plain(v)}" for k, v in meta.items()) + "\n")
    buf.write(",".join([f"x_{i + 1}" for i in range(mu.dimension)] + ["weight"]) + "\n")
    for x, w in zip(mu.support, mu.weights):
        buf.write(",".join(repr(float(v)) for v in x) + "," + repr(float(w)) + "\n")
    return buf.getvalue()


def _plain(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ":".join(_plain(x) for x in v)
    return str(v)


def measure_from_csv(text: str, barycenter=None) -> tuple[EmpiricalMeasure, dict]:
    lines = text.splitlines()
    meta = {}
    if lines and lines[0].startswith("#"):
        for item in lines[0][1:].strip().split(","):
            if "=" in item:
                k, v = item.split("=", 1)
                meta[k.strip()] = v.strip()
        lines = lines[1:]
    data = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", ndmin=2)
    pts, w = data[:, :-1], data[:, -1]
    w = w / math.fsum(w)
    bary = w @ pts if barycenter is None else barycenter
    return EmpiricalMeasure(pts, w, bary, dict(meta)), meta
