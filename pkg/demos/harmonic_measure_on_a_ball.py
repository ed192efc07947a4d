# ---
# jupyter:
#   jupytext:
#     formats: py:light
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Harmonic measure of the closed unit ball
#
# The closed ball is approached by the open balls of radius `1 + ε`.  Walk-on-spheres
# samples give the harmonic measure of each, and the finest one stands in for the
# harmonic measure of the compact set.

# +
import numpy as np

from compactharmonic import WalkConfig, ball_scene, harmonic_measure, mass_within
from compactharmonic.dirichlet import boundary_pullback
from compactharmonic.geometry import neighborhood

scene = ball_scene()
config = WalkConfig(samples=20_000, absorb_delta=1e-3, seed=1)
# -

# ## Mean values
#
# A coordinate function is harmonic, so its integral must reproduce its value at the
# starting point.  The second moment at the centre should be 1/3 once the samples are
# pulled back onto the unit sphere.

# +
z = np.array([0.5, 0.0, 0.0])
mu, report = harmonic_measure(scene, z, (0.1, 0.5, 3), config)
x1 = lambda x: x[:, 0]
print(f"x1 at z: {mu.integrate(x1):.4f} ± {mu.stderr(x1):.4f}  (exact 0.5)")

mu0, _ = harmonic_measure(scene, np.zeros(3), (0.1, 0.5, 3), config)
on_sphere = boundary_pullback(scene, mu0)
sq = lambda x: x[:, 0] ** 2
print(f"x1^2 at 0: {on_sphere.integrate(sq):.4f} ± {on_sphere.stderr(sq):.4f}  (exact 1/3)")
print("support within", report.support_max_distance, "of the sphere")
# -

# ## Concentration at a boundary point
#
# Started on the sphere itself, the walkers leave the thin shell almost at once, so
# the mass near the starting point grows towards one as the shell gets thinner.

# +
p = np.array([1.0, 0.0, 0.0])
for eps in (0.1, 0.05, 0.02, 0.01, 0.005):
    m, _ = harmonic_measure(scene, p, [neighborhood(scene, eps)], config.with_(samples=5000))
    print(f"eps={eps:<6} mass within 0.1 of p: {mass_within(m, p, 0.1):.3f}")
