"""Harmonic measure, Jensen measures and fine-boundary tools on ball-CSG compact sets.

A compact set ``K`` is a closed ball with finitely many disjoint open balls
removed.  Its harmonic measure is approximated by walk-on-spheres samples
on shrinking ``ε``-neighbourhoods, and the rest of the package (Jensen
checks, fine-boundary classification, the Dirichlet problem on ``K`` and a
discrete envelope LP) is built on those samples.
"""

__version__ = "0.1.0"

from .exceptions import ConfigurationError, NonFiniteValueError, PreconditionError, SceneError
from .geometry import (Ball, BallScene, Domain, PointClass, RoadRunner, ball_scene, classify_point,
                       domain_schedule, load_scene, neighborhood, road_runner_scene, save_scene,
                       scene_hash, shell_scene, swiss_cheese_scene)
from .measure import EmpiricalMeasure, Order, compare_order, mass_within
from .wos import WalkConfig, estimate_measure, integrate_boundary, sample_exit
from .jensen import TestFunction, default_family, maximality_probe, verify_jensen
from .fineboundary import FineVerdict, classify_fine, concentration_diagnostic, wiener_series
from .dirichlet import averaging_check, harmonic_measure, monotone_check, solve

__all__ = [
    "Ball", "BallScene", "ConfigurationError", "Domain", "EmpiricalMeasure", "FineVerdict",
    "NonFiniteValueError", "Order", "PointClass", "PreconditionError", "RoadRunner", "SceneError",
    "TestFunction", "WalkConfig", "averaging_check", "ball_scene", "classify_fine", "classify_point",
    "compare_order", "concentration_diagnostic", "default_family", "domain_schedule", "estimate_measure",
    "harmonic_measure", "integrate_boundary", "load_scene", "mass_within", "maximality_probe",
    "monotone_check", "neighborhood", "road_runner_scene", "sample_exit", "save_scene", "scene_hash",
    "shell_scene", "solve", "swiss_cheese_scene", "verify_jensen", "wiener_series",
]
