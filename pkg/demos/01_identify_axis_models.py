"""
Identifying axis models from sine sweeps
========================================

Each axis of the stabilized airframe is treated as a black box that turns a
commanded velocity into an achieved velocity.  We excite it with sines,
read the magnitude off each record and fit K / (1 + tau s).
"""

import numpy as np

from rotorsmc import NOMINAL_XY, NOMINAL_Z, AxisChannel, SweepSpec, build_bode, identify

# 25 log-spaced frequencies between 0.4 and 15 rad/s, five measured cycles each
spec = SweepSpec.log_spaced(0.4, 15.0, 25)
print("sweep points (rad/s):", np.round(spec.omegas, 3))

# The X channel saturates at 5 m/s; a unit-amplitude sweep never touches it.
x_axis = AxisChannel(NOMINAL_XY, limit=5.0)
bode = build_bode(x_axis, spec)
for p in bode[::4]:
    print(f"  w = {p.omega:6.3f}  |G| = {p.mag_db:7.3f} dB")

# The low-frequency plateau gives K, the -3 dB crossing gives a first tau,
# and a least-squares fit on the raw records tightens it.
ident = identify(x_axis, spec)
print("\nX axis")
print(ident.report())

z_axis = AxisChannel(NOMINAL_Z, limit=3.0)
print("Z axis")
print(identify(z_axis, spec).report())
