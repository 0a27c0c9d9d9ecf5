"""
Tuning the PD baseline
======================

A plain hand-tuning recipe: raise k_p by 10% at a time until the step
overshoots by 5%, then add damping in 0.02 steps until overshoot is at
most 1%.  The shipped PD preset is the output of this script.
"""

from rotorsmc import NOMINAL_XY, NOMINAL_Z, tune_pd_heuristic
from rotorsmc.nav import closed_loop_step, overshoot
from rotorsmc.control import PdController

xy = tune_pd_heuristic(NOMINAL_XY, limit=5.0, step=5.0)
z = tune_pd_heuristic(NOMINAL_Z, limit=3.0, step=2.0)

for name, model, gains, step, limit in (("xy", NOMINAL_XY, xy, 5.0, 5.0), ("z", NOMINAL_Z, z, 2.0, 3.0)):
    pos, _ = closed_loop_step(PdController(gains), model, step, 20.0, 0.02, limit)
    print(f"pd.{name}.k_p = {gains.k_p:.4f}")
    print(f"pd.{name}.k_d = {gains.k_d:.2f}")
    print(f"  step overshoot {100 * overshoot(pos, step):.2f}%")
