# ---
# jupyter:
#   jupytext:
#     formats: py:light
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Discrete envelope by two linear programs
#
# The primal searches over grid measures with barycenter `z` satisfying the Jensen
# inequalities of the witness family.  The dual searches over combinations of the
# family lying below the target.  Our simplex solves the first, HiGHS the second.

# +
import numpy as np

from compactharmonic import WalkConfig, ball_scene, harmonic_measure
from compactharmonic.edwards import bracket, envelope_dual, envelope_primal, make_instance, optimal_measure
from compactharmonic.geometry import neighborhood

scene = ball_scene()
bump = lambda x: 1 - np.sum(np.asarray(x) ** 2, axis=-1)
inst = make_instance(scene, np.zeros(3), bump, grid_size=2048)
primal, dual = envelope_primal(inst), envelope_dual(inst)
print(f"{inst.grid.shape[0]} grid points, primal {primal.value:.3e}, dual {dual.value:.3e}")
# -

# The minimiser moves all of its mass to the unit sphere, where the target vanishes.

mu = optimal_measure(inst, primal)
print("support radii:", np.unique(np.round(np.linalg.norm(mu.support, axis=1), 12)))
print("second moments:", [round(mu.integrate(lambda x, i=i: x[:, i] ** 2), 6) for i in range(3)])

# The harmonic measure at the centre is itself a Jensen measure, so its integral of the
# target bounds the true envelope from above.

omega, _ = harmonic_measure(scene, np.zeros(3), [neighborhood(scene, 0.025)], WalkConfig(samples=10_000, seed=0))
b = bracket(inst, bump, omega, primal, dual)
print(b.to_dict())
