"""Stabilized rotorcraft seen from the outside: command velocity in, velocity out.

Each translational axis is a first-order lag ``K / (1 + tau s)`` wrapping the
vendor stabilizer and airframe together.  Velocity is propagated with the exact
zero-order-hold discretization, position with the trapezoidal rule.  Wind is an
airmass drift added to the velocity that moves the vehicle over the ground.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import lfilter

from .errors import ConfigError, FormatError, NumericInputError
from .timeseries import TimeSeries

DEFAULT_DT = 0.02
AXES = ("x", "y", "z")


@dataclass(frozen=True)
class FirstOrderModel:
    """Steady-state gain and time constant of one axis."""

    gain_k: float
    tau: float

    def __post_init__(self):
        if not (math.isfinite(self.gain_k) and self.gain_k > 0):
            raise ConfigError(f"gain_k must be positive, got {self.gain_k}")
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ConfigError(f"tau must be positive, got {self.tau}")

    @property
    def a(self) -> float:
        """Continuous state coefficient, -1/tau."""
        return -1.0 / self.tau

    @property
    def b(self) -> float:
        """Continuous input coefficient, K/tau."""
        return self.gain_k / self.tau

    def magnitude(self, omega):
        """|G(j omega)|."""
        omega = np.asarray(omega, dtype=float)
        return self.gain_k / np.sqrt(1.0 + (self.tau * omega) ** 2)

    def step_response(self, t, amplitude: float = 1.0):
        t = np.asarray(t, dtype=float)
        return amplitude * self.gain_k * (1.0 - np.exp(-t / self.tau))

    def scaled(self, gain_factor: float = 1.0, tau_factor: float = 1.0) -> "FirstOrderModel":
        return FirstOrderModel(self.gain_k * gain_factor, self.tau * tau_factor)


@dataclass(frozen=True)
class AxisState:
    """Stabilizer velocity (air-relative, m/s) and ground position (m)."""

    velocity: float = 0.0
    position: float = 0.0


@dataclass(frozen=True)
class SaturationLimits:
    max_xy_cmd: float = 5.0
    max_z_cmd: float = 3.0

    def __post_init__(self):
        if not (self.max_xy_cmd > 0 and self.max_z_cmd > 0):
            raise ConfigError("saturation limits must be strictly positive")

    def for_axis(self, axis: str) -> float:
        return self.max_z_cmd if axis == "z" else self.max_xy_cmd


@dataclass(frozen=True)
class WindModel:
    """Mean wind plus a first-order Gauss-Markov gust on every axis."""

    mean_velocity: tuple = (0.0, 0.0, 0.0)
    gust_std: float = 0.0
    gust_bandwidth: float = 1.0
    seed: int = 0

    def __post_init__(self):
        mean = tuple(float(v) for v in self.mean_velocity)
        if len(mean) != 3 or not all(math.isfinite(v) for v in mean):
            raise ConfigError("wind mean_velocity must be a finite 3-vector")
        object.__setattr__(self, "mean_velocity", mean)
        if self.gust_std < 0:
            raise ConfigError("gust_std must be non-negative")
        if self.gust_bandwidth <= 0:
            raise ConfigError("gust_bandwidth must be positive")


class WindState:
    """Random generator plus current gust vector for one wind realization."""

    def __init__(self, wind: WindModel):
        self.rng = np.random.default_rng(wind.seed)
        # start from the stationary distribution so the process has no warm-up
        self.gust = wind.gust_std * self.rng.standard_normal(3)


def sample_wind(wind: WindModel, dt: float, rng_state: WindState) -> np.ndarray:
    """Return the current wind vector and advance the gust process by ``dt``.

    The gust obeys ``g[n+1] = phi g[n] + sigma sqrt(1 - phi^2) xi`` with
    ``phi = exp(-bandwidth dt)``, whose stationary standard deviation is
    exactly ``gust_std``.
    """
    if not dt > 0:
        raise ConfigError("dt must be positive")
    out = np.asarray(wind.mean_velocity) + rng_state.gust
    phi = math.exp(-wind.gust_bandwidth * dt)
    noise = rng_state.rng.standard_normal(3)
    rng_state.gust = phi * rng_state.gust + wind.gust_std * math.sqrt(1.0 - phi * phi) * noise
    return out


def apply_saturation(u_cmd: float, limit: float) -> float:
    return min(max(u_cmd, -limit), limit)


def step_axis(model: FirstOrderModel, state: AxisState, u_cmd: float,
              wind_vel: float = 0.0, dt: float = DEFAULT_DT,
              limit: float | None = None) -> AxisState:
    """Advance one axis by ``dt`` with ``u_cmd`` held constant.

    ``u_cmd`` is clamped to ``limit`` when one is given.  Requires
    ``dt <= tau/5``.
    """
    for value in (state.velocity, state.position, u_cmd, wind_vel, dt):
        if not math.isfinite(value):
            raise NumericInputError(f"non-finite input to step_axis: {value}")
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    if dt > model.tau / 5 + 1e-12:
        raise ConfigError(f"dt={dt} too coarse for tau={model.tau} (need dt <= tau/5)")
    if limit is not None:
        u_cmd = apply_saturation(u_cmd, limit)
    a = math.exp(-dt / model.tau)
    v_next = a * state.velocity + (1.0 - a) * model.gain_k * u_cmd
    p_next = state.position + 0.5 * dt * ((state.velocity + wind_vel) + (v_next + wind_vel))
    return AxisState(velocity=v_next, position=p_next)


def simulate_open_loop(model: FirstOrderModel, input: TimeSeries, dt: float | None = None,
                       initial_velocity: float = 0.0) -> TimeSeries:
    """Velocity response to a sampled command held between samples.

    Output sample ``n`` is the velocity at the time of input sample ``n``, so
    the first output sample is the initial velocity.
    """
    if dt is not None and not math.isclose(dt, input.dt, rel_tol=1e-9):
        raise FormatError(f"input sampled at {input.dt}, expected {dt}")
    a = math.exp(-input.dt / model.tau)
    u = input.values
    # v[n] = a v[n-1] + (1-a) K u[n-1]
    forced = lfilter([0.0, (1.0 - a) * model.gain_k], [1.0, -a], u)
    free = initial_velocity * a ** np.arange(u.size)
    return TimeSeries(dt=input.dt, values=forced + free, start_time=input.start_time)


def perturb_for_mass(model: FirstOrderModel, mass_nominal: float, payload: float) -> FirstOrderModel:
    """Heavier vehicle: tau grows and gain shrinks by the mass ratio."""
    if not mass_nominal > 0:
        raise ConfigError("mass_nominal must be positive")
    if payload < 0:
        raise ConfigError("payload must be non-negative")
    if payload == 0:
        return model
    ratio = (mass_nominal + payload) / mass_nominal
    return FirstOrderModel(gain_k=model.gain_k / ratio, tau=model.tau * ratio)


@dataclass
class UavPlant:
    """Three decoupled axes, command saturation, optional wind, payload.

    ``model_x/y/z`` are the unloaded axis models; ``effective_model`` applies
    the payload perturbation.  The plant is a plain mutable value: step it from one
    thread only.
    """

    model_x: FirstOrderModel
    model_y: FirstOrderModel
    model_z: FirstOrderModel
    limits: SaturationLimits = field(default_factory=SaturationLimits)
    wind: WindModel | None = None
    mass_nominal: float = 8.0
    payload: float = 0.0
    state_x: AxisState = field(default_factory=AxisState)
    state_y: AxisState = field(default_factory=AxisState)
    state_z: AxisState = field(default_factory=AxisState)

    def __post_init__(self):
        if self.mass_nominal <= 0 or self.payload < 0:
            raise ConfigError("mass_nominal must be positive and payload non-negative")
        self._wind_state = WindState(self.wind) if self.wind is not None else None

    def model(self, axis: str) -> FirstOrderModel:
        return getattr(self, f"model_{axis}")

    def effective_model(self, axis: str) -> FirstOrderModel:
        return perturb_for_mass(self.model(axis), self.mass_nominal, self.payload)

    def state(self, axis: str) -> AxisState:
        return getattr(self, f"state_{axis}")

    @property
    def position(self) -> np.ndarray:
        return np.array([self.state(ax).position for ax in AXES])

    @property
    def velocity(self) -> np.ndarray:
        return np.array([self.state(ax).velocity for ax in AXES])

    @property
    def current_wind(self) -> np.ndarray:
        """Wind that will act over the next step."""
        if self._wind_state is None:
            return np.zeros(3)
        return np.asarray(self.wind.mean_velocity) + self._wind_state.gust

    @property
    def ground_velocity(self) -> np.ndarray:
        """What the onboard IMU reports: stabilizer velocity plus drift."""
        return self.velocity + self.current_wind

    def reset(self, position=(0.0, 0.0, 0.0)):
        for ax, p in zip(AXES, position):
            setattr(self, f"state_{ax}", AxisState(0.0, float(p)))
        self._wind_state = WindState(self.wind) if self.wind is not None else None

    def step(self, u_cmd, dt: float = DEFAULT_DT):
        """Apply saturated commands for ``dt``.

        Returns ``(applied_commands, wind)`` where ``wind`` is the drift that
        acted over this step.
        """
        if self._wind_state is None:
            wind = np.zeros(3)
        else:
            wind = sample_wind(self.wind, dt, self._wind_state)
        applied = np.empty(3)
        for i, ax in enumerate(AXES):
            applied[i] = apply_saturation(float(u_cmd[i]), self.limits.for_axis(ax))
            new = step_axis(self.effective_model(ax), self.state(ax), applied[i],
                            float(wind[i]), dt)
            setattr(self, f"state_{ax}", new)
        return applied, wind

    def with_models(self, **models) -> "UavPlant":
        """Fresh plant (reset state) with some axis models replaced."""
        plant = replace(self, **models)
        plant.reset()
        return plant


@dataclass(frozen=True)
class AxisChannel:
    """One axis as an input->output velocity map, for identification experiments."""

    model: FirstOrderModel
    limit: float | None = None

    def __call__(self, command: TimeSeries) -> TimeSeries:
        if self.limit is not None:
            command = TimeSeries(command.dt, np.clip(command.values, -self.limit, self.limit),
                                 command.start_time)
        return simulate_open_loop(self.model, command)


@dataclass(frozen=True)
class ActuatorMode:
    """Resonant mode ``1 + c 2 zeta wn s / (s^2 + 2 zeta wn s + wn^2)`` in series with the lag.

    The factor is unity at DC and at high frequency, so the augmented axis
    keeps the steady-state gain and the linear start of a first-order step
    response while adding an overshoot.
    """

    coupling: float
    omega_n: float
    zeta: float = 0.5

    def transfer(self, model: FirstOrderModel):
        wn, z = self.omega_n, self.zeta
        base = [1.0, 2 * z * wn, wn * wn]
        num = model.gain_k * np.polyadd(base, [self.coupling * 2 * z * wn, 0.0])
        den = np.polymul([model.tau, 1.0], base)
        return num, den


@dataclass(frozen=True)
class AugmentedChannel:
    """First-order axis followed by an ``ActuatorMode``, ZOH-discretized."""

    model: FirstOrderModel
    mode: ActuatorMode
    limit: float | None = None

    def __call__(self, command: TimeSeries) -> TimeSeries:
        from scipy.signal import cont2discrete

        u = command.values
        if self.limit is not None:
            u = np.clip(u, -self.limit, self.limit)
        b, a, _ = cont2discrete(self.mode.transfer(self.model), command.dt, method="zoh")
        return TimeSeries(command.dt, lfilter(np.ravel(b), a, u), command.start_time)


def actuator_for_overshoot(model: FirstOrderModel, overshoot: float = 0.10,
                           omega_ratio: float = 3.0, zeta: float = 0.5,
                           dt: float = DEFAULT_DT) -> ActuatorMode:
    """Mode at ``omega_ratio/tau`` whose coupling gives the requested step overshoot."""
    from scipy.optimize import brentq

    wn = omega_ratio / model.tau
    step = TimeSeries(dt, np.ones(int(round(20 * model.tau / dt)) + 1))

    def excess(c):
        y = AugmentedChannel(model, ActuatorMode(c, wn, zeta))(step).values
        return y.max() / model.gain_k - 1.0 - overshoot

    return ActuatorMode(brentq(excess, 0.0, 50.0, xtol=1e-10), wn, zeta)


def add_measurement_noise(ts: TimeSeries, std: float, rng: np.random.Generator) -> TimeSeries:
    if std <= 0:
        return ts
    return TimeSeries(ts.dt, ts.values + std * rng.standard_normal(len(ts)), ts.start_time)
