"""Walk-on-spheres sampling of harmonic measure on ball-CSG domains.

Each walker jumps to a uniform point on the largest sphere about its current
position that stays inside the domain, until it comes within
``absorb_delta`` of the boundary; the absorbed position is then projected
radially onto the nearest boundary sphere.

Reproducibility contract: sample ``i`` belongs to block ``i // block_size``.
Block ``b`` draws from its own stream seeded by ``(seed, b)`` and consumes a
full ``(block_size, n)`` array of normals per step, so walker ``i`` follows
the same path whatever the sample count, block scheduling or worker count.
Blocks are reduced in ascending order.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import PreconditionError
from .geometry import Domain
from .measure import EmpiricalMeasure

TRUNCATION_WARN = 0.01


@dataclass(frozen=True)
class WalkConfig:
    absorb_delta: float = 1e-3
    max_steps: int = 1000
    samples: int = 10_000
    seed: int = 0
    block_size: int = 4096
    workers: int = 1

    def __post_init__(self):
        if not self.absorb_delta > 0:
            raise ValueError("absorb_delta must be positive")
        if self.max_steps < 1 or self.samples < 1 or self.block_size < 1 or self.workers < 1:
            raise ValueError("max_steps, samples, block_size and workers must be positive")

    def with_(self, **changes) -> "WalkConfig":
        return WalkConfig(**{**self.__dict__, **changes})


@dataclass(frozen=True)
class ExitSample:
    point: np.ndarray
    steps: int
    truncated: bool


def _stream(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), int(block)]))


def _check_start(domain: Domain, z: np.ndarray, config: WalkConfig) -> None:
    d = domain.distance_to_boundary(z)
    if not d > config.absorb_delta:
        raise PreconditionError(
            f"start point {z.tolist()} is not interior to the domain (distance to boundary {d!r}, "
            f"absorb_delta {config.absorb_delta!r})"
        )
    if config.absorb_delta >= domain.feature_size():
        warnings.warn(
            f"absorb_delta {config.absorb_delta} is not below the domain feature size {domain.feature_size():.3g}",
            stacklevel=3,
        )


def _walk_block(domain: Domain, z: np.ndarray, config: WalkConfig, block: int, count: int):
    """Walk the first ``count`` walkers of ``block``; returns (points, steps, truncated)."""
    rng = _stream(config.seed, block)
    B, n = config.block_size, domain.dimension
    x = np.tile(z, (count, 1))
    d = np.full(count, domain.distance_to_boundary(z))
    steps = np.zeros(count, dtype=np.int64)
    active = np.nonzero(d > config.absorb_delta)[0]
    for _ in range(config.max_steps):
        if active.size == 0:
            break
        g = rng.standard_normal((B, n))[:count]
        g = g[active]
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        x[active] += d[active, None] * g
        steps[active] += 1
        d[active] = domain.distance_to_boundary(x[active])
        active = active[d[active] > config.absorb_delta]
    truncated = d > config.absorb_delta
    return domain.project_to_boundary(x), steps, truncated


def _run(domain: Domain, z: np.ndarray, config: WalkConfig):
    N, B = config.samples, config.block_size
    blocks = [(b, min(B, N - b * B)) for b in range(math.ceil(N / B))]

    def job(item):
        return _walk_block(domain, z, config, *item)

    if config.workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(job, blocks))
    else:
        results = [job(item) for item in blocks]
    points = np.vstack([r[0] for r in results])
    steps = np.concatenate([r[1] for r in results])
    truncated = np.concatenate([r[2] for r in results])
    return points, steps, truncated


def sample_exit(domain: Domain, z, config: WalkConfig, stream_index: int) -> ExitSample:
    """Exit point of walker ``stream_index``; identical to that sample inside :func:`estimate_measure`."""
    z = np.asarray(z, dtype=float)
    _check_start(domain, z, config)
    block, offset = divmod(int(stream_index), config.block_size)
    pts, steps, trunc = _walk_block(domain, z, config, block, offset + 1)
    return ExitSample(pts[offset], int(steps[offset]), bool(trunc[offset]))


def estimate_measure(domain: Domain, z, config: WalkConfig) -> EmpiricalMeasure:
    """Empirical harmonic measure of ``domain`` with barycenter ``z``."""
    z = np.asarray(z, dtype=float)
    _check_start(domain, z, config)
    points, steps, truncated = _run(domain, z, config)
    frac = float(truncated.mean())
    notes = ()
    if frac > TRUNCATION_WARN:
        notes = (f"truncation fraction {frac:.3%} exceeds {TRUNCATION_WARN:.0%}",)
        warnings.warn(notes[0], stacklevel=2)
    prov = {
        "kind": "walk_on_spheres",
        "epsilon": domain.epsilon,
        "seed": config.seed,
        "N": config.samples,
        "absorb_delta": config.absorb_delta,
        "truncation_fraction": frac,
        "truncated": int(truncated.sum()),
        "mean_steps": float(steps.mean()),
    }
    return EmpiricalMeasure(points, np.full(len(points), 1.0 / len(points)), z, prov, True, notes)


def integrate_boundary(domain: Domain, z, f: Callable, config: WalkConfig) -> tuple[float, float]:
    """Monte Carlo value of ``∫ f dω_U(z, ·)`` and its standard error."""
    v = estimate_measure(domain, z, config).values(f)
    mean = float(v.mean())
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return mean, se


@dataclass(frozen=True)
class BiasScan:
    deltas: tuple[float, ...]
    values: np.ndarray
    stderr: np.ndarray
    extrapolated: float
    slope: float


def absorb_bias_scan(domain: Domain, z, f: Callable, config: WalkConfig,
                     deltas=(1e-2, 1e-3, 1e-4)) -> BiasScan:
    """Integrate ``f`` at several shell widths and fit ``value ≈ a + b·δ`` (weighted by ``1/se²``)."""
    vals, ses = [], []
    for d in deltas:
        m, s = integrate_boundary(domain, z, f, config.with_(absorb_delta=d))
        vals.append(m)
        ses.append(s)
    vals, ses = np.array(vals), np.array(ses)
    w = 1.0 / np.maximum(ses, 1e-15)
    X = np.stack([np.ones(len(deltas)), np.asarray(deltas, dtype=float)], axis=1)
    coef, *_ = np.linalg.lstsq(X * w[:, None], vals * w, rcond=None)
    return BiasScan(tuple(deltas), vals, ses, float(coef[0]), float(coef[1]))
