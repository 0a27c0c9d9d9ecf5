"""
Flying a point-to-point mission with sliding-mode control
=========================================================

Take off, fly to (5, 5, 2) m, hold within 8 cm for five seconds, land.
"""

import numpy as np

from rotorsmc import NOMINAL_XY, NOMINAL_Z, Mission, SmcParams, UavPlant, run_mission, smc_controllers
from rotorsmc.nav import NAVIGATE

smc = SmcParams(lam=1.5, k_reach=2.5, q=0.5, boundary_layer=0.05)
plant = UavPlant(NOMINAL_XY, NOMINAL_XY, NOMINAL_Z)
result = run_mission(plant, smc_controllers(smc, smc, NOMINAL_XY, NOMINAL_Z), Mission())
print(result.summary())

# The sliding variable s = lambda e + de/dt should shrink monotonically until
# it enters the boundary layer, and then stay there.
traj = result.trajectory
nav = traj.phase_mask(NAVIGATE)
s = smc.lam * (traj.position[nav, 0] - traj.target[nav, 0]) + traj.velocity[nav, 0]
entry = np.argmax(np.abs(s) <= smc.boundary_layer)
print(f"x: |s| enters the layer after {entry * traj.dt:.2f} s of navigation, "
      f"peak |s| afterwards {np.max(np.abs(s[entry:])):.4f}")

# Sample the log once a second
for row in np.flatnonzero(np.isclose(np.mod(traj.t, 1.0), 0.0, atol=1e-9))[:12]:
    x, y, z = traj.position[row]
    print(f"t = {traj.t[row]:5.1f}  pos = ({x:5.2f}, {y:5.2f}, {z:5.2f})  {traj.phase[row]}")
