"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest -m acceptance -s`` to see the report lines.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from rotorsmc import (NOMINAL_XY, NOMINAL_Z, FirstOrderModel, Mission, PdParams, SmcParams, UavPlant,
                      WindModel, identify, pd_controllers, rise_time_90, run_mission,
                      smc_controllers, validate_step)
from rotorsmc.cli import main
from rotorsmc.config import ExperimentConfig
from rotorsmc.nav import NAVIGATE
from rotorsmc.plant import AugmentedChannel, AxisChannel, actuator_for_overshoot, add_measurement_noise
from rotorsmc.sysid import step_input

pytestmark = pytest.mark.acceptance

CFG = ExperimentConfig.load()
SMC_XY, SMC_Z = CFG.smc("xy"), CFG.smc("z")
PD_XY, PD_Z = CFG.pd("xy"), CFG.pd("z")
AXES = {"x": (NOMINAL_XY, 5.0, (0.5, 0.9)), "y": (NOMINAL_XY, 5.0, (0.5, 0.9)),
        "z": (NOMINAL_Z, 3.0, (0.2, 0.4))}


def report(number: int, title: str, ok: bool, detail: str):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} | {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def identified():
    t0 = time.perf_counter()
    models = {axis: identify(AxisChannel(truth, limit)) for axis, (truth, limit, _) in AXES.items()}
    return models, time.perf_counter() - t0


@pytest.fixture(scope="module")
def nominal_run():
    t0 = time.perf_counter()
    res = run_mission(UavPlant(NOMINAL_XY, NOMINAL_XY, NOMINAL_Z),
                      smc_controllers(SMC_XY, SMC_Z, NOMINAL_XY, NOMINAL_Z), Mission())
    return res, time.perf_counter() - t0


def test_c01_identification_recovery(identified):
    models, elapsed = identified
    ok, parts = elapsed < 30.0, []
    for axis, (truth, _, (lo, hi)) in AXES.items():
        ident = models[axis]
        k_err = abs(ident.model.gain_k / truth.gain_k - 1)
        t_err = abs(ident.model.tau / truth.tau - 1)
        r_lo, r_hi = ident.tau_range
        bracket = r_lo <= truth.tau <= r_hi and lo <= r_lo and r_hi <= hi
        ok &= k_err <= 0.02 and t_err <= 0.05 and bracket
        parts.append(f"{axis}: K {ident.model.gain_k:.4f} ({100 * k_err:.2f}%), "
                     f"tau {ident.model.tau:.4f} ({100 * t_err:.2f}%), "
                     f"range [{r_lo:.3f}, {r_hi:.3f}]")
    report(1, "identification recovery", ok, "; ".join(parts) + f"; {elapsed:.2f} s")


def test_c02_lti_spectral_check(identified):
    models, _ = identified
    devs = {axis: ident.lti_freq_deviation for axis, ident in models.items()}
    report(2, "LTI spectral check", max(devs.values()) <= 0.05,
           ", ".join(f"{a}: mean |dw| {d:.2e} rad/s" for a, d in devs.items()))


def test_c03_relative_order(identified):
    models, _ = identified
    slopes = {axis: ident.slope_high_db_per_decade for axis, ident in models.items()}
    report(3, "high-frequency slope", all(-24 <= s <= -16 for s in slopes.values()),
           ", ".join(f"{a}: {s:.2f} dB/dec" for a, s in slopes.items()))


def test_c04_mapd(identified):
    models, _ = identified
    ok, parts = True, []
    for axis, (truth, limit, _) in AXES.items():
        channel = AxisChannel(truth, limit)
        amps = [a for a in (1.0, 2.0, 3.0, 4.0, 5.0) if a <= limit]
        own = validate_step(truth, [(a, channel(step_input(a, 10.0))) for a in amps])
        ok &= own.mean_mapd < 1.0
        parts.append(f"{axis} own-model mean {own.mean_mapd:.3g}%")

        augmented = AugmentedChannel(truth, actuator_for_overshoot(truth, 0.10), limit)
        fitted = identify(augmented).model
        rng = np.random.default_rng(0)
        records = [(a, add_measurement_noise(augmented(step_input(a, 10.0)), 0.01, rng))
                   for a in amps]
        aug = validate_step(fitted, records)
        ok &= 0 < aug.mean_mapd <= 20 and aug.max_mapd > aug.mean_mapd
        parts.append(f"{axis} augmented mean {aug.mean_mapd:.2f}% max {aug.max_mapd:.2f}%")
    report(4, "MAPD self-consistency and augmented plant", ok, "; ".join(parts))


def test_c05_smc_mission(nominal_run):
    res, elapsed = nominal_run
    ok = res.success and res.land_time <= 30.0 and elapsed < 5.0
    report(5, "SMC mission without wind", ok,
           f"success {res.success}, settle {res.settle_time:.2f} s, land {res.land_time:.2f} s, "
           f"max dev {res.max_dev:.4f} m, wall {elapsed:.2f} s")


def test_c06_wind_comparison():
    wins, lines = 0, []
    for seed in range(10):
        wind = WindModel((1.389, 0.0, 0.0), 0.3, 0.5, seed)
        smc = run_mission(UavPlant(NOMINAL_XY, NOMINAL_XY, NOMINAL_Z, wind=wind),
                          smc_controllers(SMC_XY, SMC_Z, NOMINAL_XY, NOMINAL_Z), Mission())
        pd = run_mission(UavPlant(NOMINAL_XY, NOMINAL_XY, NOMINAL_Z, wind=wind),
                         pd_controllers(PD_XY, PD_Z), Mission(timeout=50.0))
        smc_ok = smc.success and smc.max_dev <= 0.08
        pd_fails = not pd.success
        wins += smc_ok and pd_fails
        lines.append(f"{seed}:{'ok' if smc_ok and pd_fails else 'x'}")
    report(6, "wind comparison over 10 seeds", wins >= 8, f"{wins}/10 ({' '.join(lines)})")


def test_c07_mass_robustness():
    failures = []
    for kf in (0.7, 1.0, 1.3):
        for tf in (0.7, 1.0, 1.3):
            gx = FirstOrderModel(NOMINAL_XY.gain_k * kf, NOMINAL_XY.tau * tf)
            gz = FirstOrderModel(NOMINAL_Z.gain_k * kf, NOMINAL_Z.tau * tf)
            res = run_mission(UavPlant(gx, gx, gz),
                              smc_controllers(SMC_XY, SMC_Z, NOMINAL_XY, NOMINAL_Z), Mission())
            if not res.success:
                failures.append((kf, tf))
    report(7, "robustness over K x tau grid", not failures,
           f"{9 - len(failures)}/9 plants succeed" + (f", failed {failures}" if failures else ""))


def test_c08_lyapunov(nominal_run):
    res, _ = nominal_run
    traj = res.trajectory
    idx = np.flatnonzero(traj.phase_mask(NAVIGATE))
    ok, parts = True, []
    for i, params in enumerate((SMC_XY, SMC_XY, SMC_Z)):
        s = params.lam * (traj.position[idx, i] - traj.target[idx, i]) + traj.velocity[idx, i]
        ds = np.diff(s)
        outside = np.abs(s[:-1]) > params.boundary_layer
        violations = int(np.sum(s[:-1][outside] * ds[outside] >= 0))
        entered = np.flatnonzero(np.abs(s) <= params.boundary_layer)
        ratio = np.max(np.abs(s[entered[0]:])) / params.boundary_layer if entered.size else np.inf
        ok &= violations == 0 and ratio <= 1.1
        parts.append(f"{'xyz'[i]}: {violations} violations, max |s|/phi after entry {ratio:.3f}")
    report(8, "Lyapunov reaching property", ok, "; ".join(parts))


def test_c09_q_monotonicity():
    def rise(q):
        res = run_mission(UavPlant(NOMINAL_XY, NOMINAL_XY, NOMINAL_Z),
                          smc_controllers(SMC_XY.with_q(q), SMC_Z.with_q(q), NOMINAL_XY, NOMINAL_Z),
                          Mission())
        return rise_time_90(res, "x")
    base, doubled = rise(SMC_XY.q), rise(2 * SMC_XY.q)
    report(9, "doubling q does not slow X rise", doubled <= base,
           f"q {SMC_XY.q}: {base:.2f} s, q {2 * SMC_XY.q}: {doubled:.2f} s")


def test_c10_determinism(tmp_path):
    wind_cfg = tmp_path / "wind.ini"
    wind_cfg.write_text("[wind]\npreset = paper-5kmh\n")
    commands = [["sysid"], ["validate"], ["navigate", "--config", str(wind_cfg)],
                ["compare", "--config", str(wind_cfg)]]
    mismatched, checked = [], 0
    for cmd in commands:
        outs = []
        for rep in ("a", "b"):
            out = tmp_path / f"{cmd[0]}_{rep}"
            main(cmd + ["--seed", "3", "--out", str(out)])
            outs.append(out)
        for path in sorted(outs[0].glob("*.csv")):
            checked += 1
            if path.read_bytes() != (outs[1] / path.name).read_bytes():
                mismatched.append(f"{cmd[0]}/{path.name}")
    report(10, "byte-identical CSVs on re-run", checked > 0 and not mismatched,
           f"{checked} CSV files compared, {len(mismatched)} differ")
