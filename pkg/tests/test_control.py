import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rotorsmc import (AxisFeedback, ConfigError, FirstOrderModel, Mission, PdParams, SmcController,
                      SmcParams, UavPlant, WindModel, pd_control, reaching_rate, run_mission,
                      sliding_surface, smc_control, smc_controllers)
from rotorsmc.nav import NAVIGATE, closed_loop_step, rise_time_90_axis

GX = FirstOrderModel(1.16, 0.75)
EXAMPLE = SmcParams(lam=1.0, k_reach=0.1, q=0.5, boundary_layer=0.05)
NOMINAL = SmcParams(1.5, 2.5, 0.5, 0.05)


def test_surface_examples():
    assert sliding_surface(AxisFeedback(2.0, 0.0, 2.0), 1.0) == 0.0
    assert sliding_surface(AxisFeedback(0.5, -0.2, 0.0), 1.0) == pytest.approx(0.3)
    assert sliding_surface(AxisFeedback(-0.5, 0.2, 0.0), 1.0) == pytest.approx(-0.3)


def test_smc_on_target_is_zero():
    assert smc_control(EXAMPLE, AxisFeedback(1.0, 0.0, 1.0), GX) == 0.0


def test_smc_hand_substitution():
    a, b = -1 / 0.75, 1.16 / 0.75
    s = -0.3 + 0.5
    expected = (-0.1 * 1.0 - 0.5 * s - a * 0.5 - 1.0 * 0.5) / b
    assert expected == pytest.approx(-0.0216, abs=1e-4)
    assert smc_control(EXAMPLE, AxisFeedback(-0.3, 0.5, 0.0), GX) == pytest.approx(expected, rel=1e-12)
    assert smc_control(EXAMPLE, AxisFeedback(0.3, -0.5, 0.0), GX) == pytest.approx(-expected, rel=1e-12)


def test_reaching_rate_examples():
    assert reaching_rate(0.0, EXAMPLE) == 0.0
    assert reaching_rate(0.2, EXAMPLE) == pytest.approx(-0.2)
    for s in (-3.0, -0.01, 0.001, 4.0):
        assert np.sign(reaching_rate(s, EXAMPLE)) == -np.sign(s)


def test_pd_examples():
    p = PdParams(0.8, 0.5)
    assert pd_control(p, AxisFeedback(3.0, 0.0, 3.0)) == 0.0
    assert pd_control(p, AxisFeedback(1.0, 0.2, 0.0)) == pytest.approx(-0.9)
    assert pd_control(p, AxisFeedback(2.0, 0.4, 0.0)) == pytest.approx(-1.8)


@pytest.mark.parametrize("kwargs", [dict(lam=0, k_reach=1, q=1), dict(lam=1, k_reach=-1, q=1),
                                    dict(lam=1, k_reach=0, q=0), dict(lam=1, k_reach=1, q=1, boundary_layer=0)])
def test_smc_params_validation(kwargs):
    with pytest.raises(ConfigError):
        SmcParams(**kwargs)


def test_pd_params_validation():
    with pytest.raises(ConfigError):
        PdParams(0.0, 1.0)
    with pytest.raises(ConfigError):
        PdParams(1.0, -0.1)


state = st.floats(-20, 20, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(e=state, v=state)
def test_controllers_are_odd(e, v):
    for params in (EXAMPLE, NOMINAL):
        assert smc_control(params, AxisFeedback(-e, -v, 0.0), GX) == pytest.approx(
            -smc_control(params, AxisFeedback(e, v, 0.0), GX), abs=1e-12)
    pd = PdParams(0.6, 0.2)
    assert pd_control(pd, AxisFeedback(-e, -v, 0.0)) == pytest.approx(-pd_control(pd, AxisFeedback(e, v, 0.0)))


def _surfaces(result, params_xyz):
    traj = result.trajectory
    idx = np.flatnonzero(traj.phase_mask(NAVIGATE))
    out = []
    for i, p in enumerate(params_xyz):
        s = p.lam * (traj.position[idx, i] - traj.target[idx, i]) + traj.velocity[idx, i]
        out.append((s, p.boundary_layer))
    return out


def test_lyapunov_decrease_under_bounded_constant_wind():
    wind = np.array([0.5, -0.3, 0.1])
    a = -1 / 0.75
    assert np.all(np.abs(NOMINAL.lam * wind + a * wind) < NOMINAL.k_reach)
    gz = FirstOrderModel(0.98, 0.30)
    plant = UavPlant(GX, GX, gz, wind=WindModel(tuple(wind), 0.0))
    res = run_mission(plant, smc_controllers(NOMINAL, NOMINAL, GX, gz), Mission())
    assert res.success
    for s, phi in _surfaces(res, (NOMINAL, NOMINAL, NOMINAL)):
        outside = np.abs(s[:-1]) > phi
        assert outside.any()
        assert np.all(s[:-1][outside] * np.diff(s)[outside] < 0)


def test_boundary_layer_is_invariant_without_disturbance(nominal_plant, gz):
    res = run_mission(nominal_plant, smc_controllers(NOMINAL, NOMINAL, GX, gz), Mission())
    for s, phi in _surfaces(res, (NOMINAL, NOMINAL, NOMINAL)):
        entered = np.flatnonzero(np.abs(s) <= phi)
        assert entered.size
        assert np.max(np.abs(s[entered[0]:])) <= 1.1 * phi


def test_larger_q_never_slows_rise():
    times = []
    for q in (0.1, 0.25, 0.5, 1.0, 2.0, 4.0):
        pos, _ = closed_loop_step(SmcController(NOMINAL.with_q(q), GX), GX, 5.0, 20.0, limit=5.0)
        times.append(rise_time_90_axis(pos, 5.0, 0.02))
    assert np.all(np.diff(times) <= 1e-12)


def test_hard_sign_chatters_and_boundary_layer_does_not():
    def alternations(hard):
        ctrl = SmcController(NOMINAL, GX, hard_sign=hard)
        _, u = closed_loop_step(ctrl, GX, 1.0, 15.0, limit=5.0)
        du = np.diff(u[-300:])
        return int(np.sum(np.sign(du[1:]) * np.sign(du[:-1]) < 0))
    assert alternations(True) > 100
    assert alternations(False) < 5
