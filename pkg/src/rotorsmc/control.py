"""Per-axis position controllers that emit command velocities.

The sliding-mode law comes from the first-order velocity model
``dv/dt = A v + B u`` (A = -1/tau, B = K/tau), the surface
``s = lambda e + de/dt`` and the reaching law
``ds/dt = -k_reach sgn(s) - q s``.  Solving for ``u`` gives

    u = (-k_reach sgn(s) - q s - A v - lambda v) / B

with the desired position held constant.  The sign is smoothed inside a
boundary layer of half-width ``boundary_layer``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .plant import FirstOrderModel


@dataclass(frozen=True)
class SmcParams:
    lam: float
    k_reach: float
    q: float
    boundary_layer: float = 0.05

    def __post_init__(self):
        if not self.lam > 0:
            raise ConfigError("lambda must be positive")
        if self.k_reach < 0 or self.q < 0 or self.k_reach + self.q <= 0:
            raise ConfigError("need k_reach >= 0, q >= 0 and k_reach + q > 0")
        if not self.boundary_layer > 0:
            raise ConfigError("boundary_layer must be positive")

    def with_q(self, q: float) -> "SmcParams":
        return SmcParams(self.lam, self.k_reach, q, self.boundary_layer)


@dataclass(frozen=True)
class PdParams:
    k_p: float
    k_d: float = 0.0

    def __post_init__(self):
        if not self.k_p > 0:
            raise ConfigError("k_p must be positive")
        if self.k_d < 0:
            raise ConfigError("k_d must be non-negative")


@dataclass(frozen=True)
class AxisFeedback:
    position: float
    velocity: float
    target: float

    @property
    def error(self) -> float:
        return self.position - self.target


def smooth_sign(s: float, boundary_layer: float) -> float:
    """sign(s) outside the boundary layer, linear ramp s/phi inside it."""
    return min(max(s / boundary_layer, -1.0), 1.0)


def sliding_surface(fb: AxisFeedback, lam: float) -> float:
    # target is stationary, so de/dt is the measured velocity
    return lam * (fb.position - fb.target) + fb.velocity


def reaching_rate(s: float, params: SmcParams, hard_sign: bool = False) -> float:
    """Desired ds/dt: constant-rate term plus proportional term, both opposing s."""
    sgn = float(np.sign(s)) if hard_sign else smooth_sign(s, params.boundary_layer)
    return -params.k_reach * sgn - params.q * s


def smc_control(params: SmcParams, fb: AxisFeedback, model: FirstOrderModel,
                hard_sign: bool = False) -> float:
    """Unsaturated sliding-mode command velocity.

    ``hard_sign`` swaps the boundary layer for the discontinuous sign, which
    chatters in discrete time; it exists to demonstrate exactly that.
    """
    s = sliding_surface(fb, params.lam)
    v = fb.velocity
    return (reaching_rate(s, params, hard_sign) - model.a * v - params.lam * v) / model.b


def pd_control(params: PdParams, fb: AxisFeedback) -> float:
    return -params.k_p * (fb.position - fb.target) - params.k_d * fb.velocity


@dataclass(frozen=True)
class SmcController:
    """Sliding-mode law bound to the design model of one axis."""

    params: SmcParams
    model: FirstOrderModel
    hard_sign: bool = False

    def __call__(self, fb: AxisFeedback) -> float:
        return smc_control(self.params, fb, self.model, self.hard_sign)

    def surface(self, fb: AxisFeedback) -> float:
        return sliding_surface(fb, self.params.lam)


@dataclass(frozen=True)
class PdController:
    params: PdParams

    def __call__(self, fb: AxisFeedback) -> float:
        return pd_control(self.params, fb)
