"""
Checking a model against step responses
=======================================

A model is only as good as its prediction of a response it was not fitted
on.  We score step responses with the mean absolute percentage deviation.
"""

import numpy as np

from rotorsmc import NOMINAL_XY, AxisChannel, identify, validate_step
from rotorsmc.plant import AugmentedChannel, actuator_for_overshoot, add_measurement_noise
from rotorsmc.sysid import step_input

amplitudes = (1.0, 2.0, 3.0, 4.0, 5.0)

# Against the very plant it describes, the model is exact up to rounding.
plant = AxisChannel(NOMINAL_XY, limit=5.0)
own = validate_step(NOMINAL_XY, [(a, plant(step_input(a, 10.0))) for a in amplitudes])
print(own.text())

# A real airframe is not exactly first order.  Add a fast mode that makes the
# step overshoot by 10%, fit a first-order model to it, and score that fit.
mode = actuator_for_overshoot(NOMINAL_XY, overshoot=0.10)
real = AugmentedChannel(NOMINAL_XY, mode, limit=5.0)
fitted = identify(real).model
print("fitted to the overshooting plant:", fitted)

# Without noise every amplitude scores the same (the plant is linear), so a
# little sensor noise is what separates the worst record from the average.
rng = np.random.default_rng(0)
records = [(a, add_measurement_noise(real(step_input(a, 10.0)), 0.01, rng)) for a in amplitudes]
print(validate_step(fitted, records).text())
