"""Model-based position control of a black-box stabilized rotorcraft.

Identify a first-order velocity model per axis from sine sweeps, validate it
against step responses, and fly point-to-point missions with a sliding-mode
controller or a heuristic PD baseline.
"""

from .control import (AxisFeedback, PdController, PdParams, SmcController, SmcParams,
                      pd_control, reaching_rate, sliding_surface, smc_control)
from .errors import (ConfigError, CrossingNotFoundError, FormatError, NoDominantFrequencyError,
                     NumericFaultError, NumericInputError, RotorSmcError, UndefinedResultError)
from .nav import (ComparisonReport, Mission, MissionResult, Trajectory, band_hold_monitor,
                  compare_controllers, pd_controllers, rise_time_90, run_mission,
                  smc_controllers, tune_pd_heuristic)
from .plant import (AxisChannel, AxisState, FirstOrderModel, SaturationLimits, UavPlant,
                    WindModel, WindState, apply_saturation, perturb_for_mass, sample_wind,
                    simulate_open_loop, step_axis)
from .sysid import (IdentifiedModel, MagnitudePoint, SweepSpec, build_bode, estimate_gain,
                    estimate_tau_cutoff, generate_sine, high_freq_slope, identify, magnitude_at,
                    mapd, peak_frequency, refine_tau_ls, validate_step)
from .timeseries import TimeSeries

NOMINAL_XY = FirstOrderModel(gain_k=1.16, tau=0.75)
NOMINAL_Z = FirstOrderModel(gain_k=0.98, tau=0.30)

__version__ = "0.1.0"
