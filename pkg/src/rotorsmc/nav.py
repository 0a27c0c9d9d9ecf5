"""Point-to-point missions: take off, fly to a target, hold the band, land.

A mission succeeds when every axis stays within ``band_half_width`` of the
target for ``hold_duration`` seconds without interruption.  ``settle_time`` is
when that uninterrupted run began and ``land_time`` is when it completed; the
descent that follows is simulated for the log but never affects the metrics.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .control import AxisFeedback, PdController, PdParams, SmcController, SmcParams
from .errors import ConfigError, NumericFaultError
from .plant import AXES, DEFAULT_DT, AxisState, FirstOrderModel, UavPlant, step_axis, apply_saturation
from .timeseries import TimeSeries

TAKEOFF, NAVIGATE, LAND = "takeoff", "navigate", "land"
TRAJECTORY_COLUMNS = ["t", "x", "y", "z", "vx", "vy", "vz", "ux", "uy", "uz",
                      "wind_x", "wind_y", "wind_z", "phase"]
BAND_SLACK = 1e-12

Controller = Callable[[AxisFeedback], float]


@dataclass(frozen=True)
class Mission:
    target: tuple = (5.0, 5.0, 2.0)
    band_half_width: float = 0.08
    hold_duration: float = 5.0
    min_op_height: float = 1.0
    timeout: float = 60.0
    dt: float = DEFAULT_DT
    landing_duration: float = 10.0

    def __post_init__(self):
        target = tuple(float(v) for v in self.target)
        if len(target) != 3 or not all(math.isfinite(v) for v in target):
            raise ConfigError("mission target must be a finite 3-vector")
        object.__setattr__(self, "target", target)
        if not self.band_half_width > 0:
            raise ConfigError("band_half_width must be positive")
        if not self.hold_duration > 0:
            raise ConfigError("hold_duration must be positive")
        if not self.timeout > self.hold_duration:
            raise ConfigError("timeout must exceed hold_duration")
        if self.min_op_height < 0:
            raise ConfigError("min_op_height must be non-negative")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")


@dataclass
class Trajectory:
    """Per-sample log; arrays are (N,) or (N, 3) in x, y, z order."""

    t: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    command: np.ndarray
    wind: np.ndarray
    target: np.ndarray
    phase: list

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def phase_mask(self, name: str) -> np.ndarray:
        return np.array([p == name for p in self.phase])

    def axis_series(self, axis: str) -> dict:
        i = AXES.index(axis)
        dt = self.dt
        return {
            "position": TimeSeries(dt, self.position[:, i]),
            "velocity": TimeSeries(dt, self.velocity[:, i]),
            "command": TimeSeries(dt, self.command[:, i]),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRAJECTORY_COLUMNS)
        cols = np.column_stack([self.t, self.position, self.velocity, self.command, self.wind])
        for row, phase in zip(cols, self.phase):
            writer.writerow([f"{v:.6f}" for v in row] + [phase])
        return buf.getvalue()


@dataclass
class MissionResult:
    success: bool
    settle_time: float | None
    land_time: float | None
    max_dev_after_settle: np.ndarray | None
    trajectory: Trajectory = field(repr=False)
    mission: Mission = field(repr=False, default=None)

    @property
    def max_dev(self) -> float:
        """Largest per-axis deviation during the hold window (inf when unsettled)."""
        if self.max_dev_after_settle is None:
            return math.inf
        return float(np.max(self.max_dev_after_settle))

    def summary(self) -> str:
        fmt = lambda v: "none" if v is None else f"{v:.2f}"
        dev = "none" if self.max_dev_after_settle is None else \
            ",".join(f"{d:.4f}" for d in self.max_dev_after_settle)
        return (f"success={self.success} settle_time={fmt(self.settle_time)} "
                f"land_time={fmt(self.land_time)} max_dev_after_settle={dev}\n")


def band_hold_monitor(positions, target, band_half_width: float, hold_duration: float,
                      dt: float, start_time: float = 0.0) -> float | None:
    """Earliest time from which all axes stay in the closed band for ``hold_duration``.

    ``positions`` is (N, n_axes) or a sequence of per-axis arrays of equal
    length; returns ``None`` when no such window exists.
    """
    pos = np.asarray(positions, dtype=float)
    target = np.asarray(target, dtype=float)
    if pos.ndim == 1:
        pos = pos[:, None]
    elif pos.shape[0] == target.size and pos.shape[1] != target.size:
        pos = pos.T
    inside = np.all(np.abs(pos - target) <= band_half_width + BAND_SLACK, axis=1)
    need = int(math.ceil(hold_duration / dt - 1e-9))
    run_start = None
    for i, ok in enumerate(inside):
        if not ok:
            run_start = None
            continue
        if run_start is None:
            run_start = i
        if i - run_start >= need:
            return start_time + run_start * dt
    return None


def _feedback(plant: UavPlant, target) -> list:
    pos, vel = plant.position, plant.ground_velocity
    return [AxisFeedback(pos[i], vel[i], target[i]) for i in range(3)]


def _ground_contact(plant: UavPlant):
    z = plant.state_z
    if z.position < 0.0:
        plant.state_z = AxisState(max(z.velocity, 0.0), 0.0)


def run_mission(plant: UavPlant, controllers: Sequence[Controller], mission: Mission) -> MissionResult:
    """Fly ``mission`` with one controller per axis (x, y, z).

    Takeoff climbs on Z alone to ``min_op_height``; navigation then drives all
    axes to the target while the band monitor runs; after the hold completes
    the Z target drops to the ground.  A timeout yields ``success=False``.
    """
    dt = mission.dt
    tgt = np.asarray(mission.target)
    plant.reset()
    rows = {k: [] for k in ("t", "pos", "vel", "cmd", "wind", "target", "phase")}
    phase = TAKEOFF
    settle_time = land_time = None
    run_start = None
    need = int(math.ceil(mission.hold_duration / dt - 1e-9))
    n = 0
    max_steps = int(math.ceil((mission.timeout + mission.landing_duration) / dt)) + 2
    while n < max_steps:
        t = n * dt
        pos = plant.position
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(plant.velocity))):
            raise NumericFaultError(f"non-finite plant state at t={t:.3f}")

        if phase == TAKEOFF and pos[2] >= mission.min_op_height - mission.band_half_width:
            phase = NAVIGATE
        if phase == NAVIGATE:
            if np.all(np.abs(pos - tgt) <= mission.band_half_width + BAND_SLACK):
                if run_start is None:
                    run_start = n
                if n - run_start >= need:
                    settle_time, land_time = run_start * dt, t
                    phase = LAND
            else:
                run_start = None
        if phase != LAND and t > mission.timeout + 1e-9:
            break
        if phase == LAND and (pos[2] <= 0.02 or t - land_time >= mission.landing_duration):
            break

        if phase == TAKEOFF:
            target = np.array([pos[0], pos[1], mission.min_op_height])
        elif phase == NAVIGATE:
            target = tgt
        else:
            target = np.array([tgt[0], tgt[1], 0.0])
        fb = _feedback(plant, target)
        u = np.array([controllers[i](fb[i]) for i in range(3)])
        if phase == TAKEOFF:
            u[:2] = 0.0
        if not np.all(np.isfinite(u)):
            raise NumericFaultError(f"non-finite command {u} at t={t:.3f}")

        applied, wind = plant.step(u, dt)
        rows["t"].append(t)
        rows["pos"].append(pos)
        rows["vel"].append([f.velocity for f in fb])
        rows["cmd"].append(applied)
        rows["wind"].append(wind)
        rows["target"].append(target)
        rows["phase"].append(phase)
        _ground_contact(plant)
        n += 1

    traj = Trajectory(t=np.array(rows["t"]), position=np.array(rows["pos"]),
                      velocity=np.array(rows["vel"]), command=np.array(rows["cmd"]),
                      wind=np.array(rows["wind"]), target=np.array(rows["target"]),
                      phase=rows["phase"])
    max_dev = None
    if settle_time is not None:
        i0, i1 = int(round(settle_time / dt)), int(round(land_time / dt))
        max_dev = np.max(np.abs(traj.position[i0:i1 + 1] - tgt), axis=0)
    return MissionResult(success=settle_time is not None, settle_time=settle_time,
                         land_time=land_time, max_dev_after_settle=max_dev,
                         trajectory=traj, mission=mission)


def smc_controllers(smc_xy: SmcParams, smc_z: SmcParams, model_xy: FirstOrderModel,
                    model_z: FirstOrderModel) -> tuple:
    """X and Y share one design model, Z has its own."""
    return (SmcController(smc_xy, model_xy), SmcController(smc_xy, model_xy),
            SmcController(smc_z, model_z))


def pd_controllers(pd_xy: PdParams, pd_z: PdParams) -> tuple:
    return PdController(pd_xy), PdController(pd_xy), PdController(pd_z)


def rise_time_90(result: MissionResult, axis: str = "x") -> float:
    """Time from the start of navigation until the axis covers 90% of its move."""
    traj = result.trajectory
    i = AXES.index(axis)
    nav = np.flatnonzero(traj.phase_mask(NAVIGATE) | traj.phase_mask(LAND))
    if nav.size == 0:
        return math.inf
    start = nav[0]
    p0 = traj.position[start, i]
    goal = result.mission.target[i]
    if goal == p0:
        return 0.0
    return rise_time_90_axis(traj.position[start:, i], goal, traj.dt, start=p0)


def rise_time_90_axis(positions: np.ndarray, target: float, dt: float, start: float = 0.0) -> float:
    """Time to first reach 90% of the way from ``start`` to ``target``."""
    hit = np.flatnonzero((np.asarray(positions) - start) / (target - start) >= 0.9)
    return math.inf if hit.size == 0 else float(hit[0] * dt)


def closed_loop_step(controller: Controller, model: FirstOrderModel, target: float,
                     duration: float, dt: float = DEFAULT_DT, limit: float | None = None):
    """Single-axis position response from rest at 0; returns (positions, commands)."""
    state = AxisState()
    pos, cmd = [], []
    for _ in range(int(round(duration / dt)) + 1):
        u = controller(AxisFeedback(state.position, state.velocity, target))
        if limit is not None:
            u = apply_saturation(u, limit)
        pos.append(state.position)
        cmd.append(u)
        state = step_axis(model, state, u, 0.0, dt)
    return np.array(pos), np.array(cmd)


def overshoot(positions: np.ndarray, target: float) -> float:
    """Peak excursion past ``target`` as a fraction of the move from zero."""
    return max(0.0, float(np.max(positions / target)) - 1.0)


def tune_pd_heuristic(model: FirstOrderModel, limit: float, step: float = 5.0,
                      dt: float = DEFAULT_DT, duration: float = 30.0,
                      kp_start: float = 0.1, kp_factor: float = 1.1,
                      overshoot_trigger: float = 0.05, overshoot_accept: float = 0.01,
                      kd_step: float = 0.02) -> PdParams:
    """Scripted stand-in for tuning by trial flights.

    Raise k_p geometrically until the step overshoot first reaches
    ``overshoot_trigger``, then raise k_d in fixed increments until the
    overshoot is at most ``overshoot_accept``.
    """
    def trial(kp, kd):
        pos, _ = closed_loop_step(PdController(PdParams(kp, kd)), model, step, duration, dt, limit)
        return overshoot(pos, step)

    kp = kp_start
    while trial(kp, 0.0) < overshoot_trigger:
        kp *= kp_factor
        if kp > 1e3:
            raise ConfigError("PD heuristic never produced overshoot")
    kd = 0.0
    while trial(kp, kd) > overshoot_accept:
        kd += kd_step
    return PdParams(round(kp, 4), round(kd, 4))


@dataclass
class ComparisonReport:
    smc: MissionResult
    pd: MissionResult

    @staticmethod
    def _final_window_dev(result: MissionResult) -> float:
        """Max deviation over the last hold-length stretch of navigation."""
        traj = result.trajectory
        nav = np.flatnonzero(traj.phase_mask(NAVIGATE))
        if nav.size == 0:
            return math.inf
        if result.success:
            return result.max_dev
        m = result.mission
        span = int(math.ceil(m.hold_duration / m.dt))
        window = nav[-span:]
        return float(np.max(np.abs(traj.position[window] - np.asarray(m.target))))

    @staticmethod
    def _effort_rms(result: MissionResult) -> float:
        traj = result.trajectory
        mask = traj.phase_mask(NAVIGATE)
        if not mask.any():
            return 0.0
        return float(np.sqrt(np.mean(traj.command[mask] ** 2)))

    def metrics(self) -> dict:
        out = {}
        for name, res in (("smc", self.smc), ("pd", self.pd)):
            out[name] = {
                "success": res.success,
                "settle_time": res.settle_time,
                "land_time": res.land_time,
                "max_dev_after_settle": res.max_dev,
                "final_window_max_dev": self._final_window_dev(res),
                "command_rms": self._effort_rms(res),
            }
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = ["controller", "success", "settle_time", "land_time", "max_dev_after_settle",
                "final_window_max_dev", "command_rms"]
        writer.writerow(cols)
        for name, row in self.metrics().items():
            writer.writerow([name] + [_fmt(row[c]) for c in cols[1:]])
        return buf.getvalue()

    def verdict(self) -> str:
        m = self.metrics()
        better = m["pd"]["final_window_max_dev"] > m["smc"]["final_window_max_dev"]
        return (f"SMC {'success' if self.smc.success else 'failure'}, "
                f"PD {'success' if self.pd.success else 'failure'}; "
                f"SMC deviation {'below' if better else 'not below'} PD")

    def summary(self) -> str:
        lines = ["Controller comparison", self.verdict()]
        for name, row in self.metrics().items():
            lines.append(name + ": " + " ".join(f"{k}={_fmt(v)}" for k, v in row.items()))
        return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return f"{value:.6f}"


def compare_controllers(plant: UavPlant, smc: tuple, pd: tuple, mission: Mission,
                        design_models: tuple | None = None) -> ComparisonReport:
    """Fly the same mission under SMC and PD with the same wind realization.

    ``smc`` is ``(SmcParams xy, SmcParams z)``, ``pd`` is ``(PdParams xy,
    PdParams z)``.  The SMC design models default to the plant's unloaded X
    and Z models.  Resetting the plant reseeds its wind, so both flights see
    identical gust sequences.
    """
    model_xy, model_z = design_models or (plant.model_x, plant.model_z)
    smc_res = run_mission(plant, smc_controllers(smc[0], smc[1], model_xy, model_z), mission)
    pd_res = run_mission(plant, pd_controllers(pd[0], pd[1]), mission)
    return ComparisonReport(smc=smc_res, pd=pd_res)
