# ---
# jupyter:
#   jupytext:
#     formats: py:light
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # A thin and a fat string of holes
#
# Both scenes remove balls centred at `2^-m e1` from the unit ball, accumulating at the
# origin.  With radii `4^-m` the holes shrink fast enough that the complement is thin at
# the origin; with radii `0.99·2^(-m-2)` every dyadic shell contains a hole of
# comparable size and it is not.

# +
import numpy as np

from compactharmonic import WalkConfig, classify_fine, concentration_diagnostic, road_runner_scene, solve
from compactharmonic.dirichlet import away_from_data
from compactharmonic.geometry import domain_schedule
from compactharmonic.fineboundary import wiener_series

thin = road_runner_scene(1.0, 0.25, 8, start=3)
fat = road_runner_scene(0.2475, 0.5, 10)
origin = np.zeros(3)
# -

# ## Wiener series with capacity brackets
#
# Each term is bracketed by the capacity of the largest inscribed ball and by a sum of
# covering-ball capacities.

# +
for name, scene in [("thin", thin), ("fat", fat)]:
    s = wiener_series(scene, origin, 20)
    fc = classify_fine(scene, origin, 20)
    print(f"{name}: verdict {fc.verdict.value}")
    print("  lower", np.round(s.lower[::4], 5))
    print("  upper", np.round(s.upper[::4], 5))
# -

# ## Concentration trend
#
# A Monte Carlo cross-check: the mass that the harmonic measure puts near the origin
# keeps rising towards one for the fat scene and stays low for the thin one.

# +
cfg = WalkConfig(samples=10_000, absorb_delta=1e-4, max_steps=5000, seed=3)
for name, scene, sched in [("thin", thin, (0.01, 0.5, 4)), ("fat", fat, (0.02, 0.25, 4))]:
    rep = concentration_diagnostic(scene, origin, domain_schedule(scene, *sched), cfg.with_(absorb_delta=1e-5))
    print(name, rep.fine_class.verdict.value, "|", rep.trend)
# -

# ## Data that the solution cannot attain
#
# Boundary data equal to 0 near the origin and 1 further out.  At a thin point the
# harmonic measure does not collapse to a point mass, so the solution at the origin
# stays well above the data value 0 there.

phi = away_from_data(origin, 0.1)
sol = solve(thin, phi, origin[None, :], domain_schedule(thin, 0.01, 0.5, 4), cfg)
p = sol.points[0]
print(f"h(0) = {p.value:.3f} ± {p.stderr:.3f}, data at 0 = {p.data_value}")
