"""Command-line harness: ``rotorsmc {sysid,validate,navigate,compare}``.

Exit codes: 0 ok, 2 configuration error, 3 identification failure,
4 undefined metric, 5 mission failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, read_model_file, write_model_file
from .errors import (ConfigError, CrossingNotFoundError, FormatError,
                     NoDominantFrequencyError, UndefinedResultError)
from .nav import compare_controllers, run_mission, pd_controllers, smc_controllers
from .plant import (AugmentedChannel, AxisChannel, actuator_for_overshoot,
                    add_measurement_noise)
from .sysid import SweepRecord, generate_sine, identify, lti_check, build_bode, step_input, validate_step

EXIT_OK, EXIT_CONFIG, EXIT_IDENT, EXIT_METRIC, EXIT_MISSION = 0, 2, 3, 4, 5

log = logging.getLogger("rotorsmc")


def _write(path: Path, text: str):
    path.write_text(text)
    log.info("wrote %s", path)


def _record(args):
    channel, amplitude, omega, duration, dt = args
    u = generate_sine(amplitude, omega, duration, dt)
    return SweepRecord(omega, u, channel(u))


def _sweep(channel, spec, dt, jobs):
    tasks = [(channel, spec.amplitude, w, spec.duration(w), dt) for w in spec.omegas]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_record, tasks))
    return [_record(t) for t in tasks]


def cmd_sysid(cfg: ExperimentConfig, out: Path, jobs: int = 1) -> int:
    axis = cfg.axis("sweep.axis")
    plant = cfg.plant()
    channel = AxisChannel(plant.effective_model(axis), plant.limits.for_axis(axis))
    spec, dt = cfg.sweep(), cfg.get_float("sweep.dt")
    records = _sweep(channel, spec, dt, jobs)

    bode = build_bode(records, spec, dt)
    _write(out / "bode.csv", "omega,mag_db\n" + "".join(
        f"{p.omega:.6f},{p.mag_db:.6f}\n" for p in bode))
    try:
        pairs = lti_check(records)
    except NoDominantFrequencyError as exc:
        log.error("spectral check failed: %s", exc)
        return EXIT_IDENT
    _write(out / "spectral.csv", "omega_in,omega_out\n" + "".join(
        f"{a:.6f},{b:.6f}\n" for a, b in pairs))
    try:
        ident = identify(channel, spec, dt, records=records)
    except CrossingNotFoundError as exc:
        log.error("identification failed: %s", exc)
        return EXIT_IDENT
    _write(out / "identified_model.txt", f"axis              {axis}\n" + ident.report())
    write_model_file(out / "model.ini", ident.model, axis)
    print(ident.report(), end="")
    return EXIT_OK


def cmd_validate(cfg: ExperimentConfig, out: Path, jobs: int = 1) -> int:
    axis = cfg.axis("validate.axis")
    model_file = cfg.get("validate.model_file").strip()
    model = read_model_file(model_file) if model_file else cfg.model(axis)

    plant = cfg.plant()
    truth, limit = plant.effective_model(axis), plant.limits.for_axis(axis)
    overshoot = cfg.get_float("validate.overshoot")
    if overshoot > 0:
        channel = AugmentedChannel(truth, actuator_for_overshoot(truth, overshoot), limit)
    else:
        channel = AxisChannel(truth, limit)
    rng = np.random.default_rng(cfg.seed)
    noise = cfg.get_float("validate.noise_std")
    duration, dt = cfg.get_float("validate.duration"), cfg.get_float("sweep.dt")

    records = []
    for amp in cfg.get_vector("validate.amplitudes"):
        measured = add_measurement_noise(channel(step_input(amp, duration, dt)), noise, rng)
        measured.to_csv(out / f"step_{amp:g}.csv")
        records.append((amp, measured))
    report = validate_step(model, records)
    _write(out / "mapd.csv", report.to_csv())
    _write(out / "mapd_summary.txt", report.text())
    print(report.text(), end="")
    return EXIT_METRIC if report.errors else EXIT_OK


def _controllers(cfg: ExperimentConfig, plant, kind: str):
    if kind == "smc":
        return smc_controllers(cfg.smc("xy"), cfg.smc("z"), plant.model_x, plant.model_z)
    return pd_controllers(cfg.pd("xy"), cfg.pd("z"))


def cmd_navigate(cfg: ExperimentConfig, out: Path, jobs: int = 1, controller: str = "smc") -> int:
    plant, mission = cfg.plant(), cfg.mission()
    result = run_mission(plant, _controllers(cfg, plant, controller), mission)
    _write(out / "trajectory.csv", result.trajectory.to_csv())
    _write(out / "result.txt", result.summary())
    print(result.summary(), end="")
    return EXIT_OK if result.success else EXIT_MISSION


def cmd_compare(cfg: ExperimentConfig, out: Path, jobs: int = 1) -> int:
    plant, mission = cfg.plant(), cfg.mission()
    report = compare_controllers(plant, (cfg.smc("xy"), cfg.smc("z")),
                                 (cfg.pd("xy"), cfg.pd("z")), mission)
    _write(out / "trajectory_smc.csv", report.smc.trajectory.to_csv())
    _write(out / "trajectory_pd.csv", report.pd.trajectory.to_csv())
    _write(out / "comparison.csv", report.to_csv())
    _write(out / "comparison.txt", report.summary())
    print(report.summary(), end="")
    return EXIT_OK


COMMANDS = {"sysid": cmd_sysid, "validate": cmd_validate,
            "navigate": cmd_navigate, "compare": cmd_compare}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS,
                        help="INI run configuration")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", type=Path, default=argparse.SUPPRESS,
                        help="output directory (default from config: out/)")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="worker processes for sweep points")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="rotorsmc", parents=[common],
                                     description="Identify, validate and fly a COTS rotorcraft model.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sysid", parents=[common], help="sine sweep identification")
    sub.add_parser("validate", parents=[common], help="step-response MAPD validation")
    nav = sub.add_parser("navigate", parents=[common], help="fly one point-to-point mission")
    nav.add_argument("--controller", choices=("smc", "pd"), default="smc")
    sub.add_parser("compare", parents=[common], help="SMC vs PD on the same mission")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    opts = vars(args)
    logging.basicConfig(level=logging.INFO if opts.get("verbose") else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = {}
    if "seed" in opts:
        overrides["run.seed"] = opts["seed"]
    if "out" in opts:
        overrides["run.out"] = opts["out"]
    jobs = opts.get("jobs", 1)
    try:
        if jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        cfg = ExperimentConfig.load(opts.get("config"), overrides)
        out = cfg.out_dir
        out.mkdir(parents=True, exist_ok=True)
        kwargs = {"controller": args.controller} if args.command == "navigate" else {}
        return COMMANDS[args.command](cfg, out, jobs, **kwargs)
    except (ConfigError, FormatError, OSError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except UndefinedResultError as exc:
        log.error("undefined metric: %s", exc)
        return EXIT_METRIC


if __name__ == "__main__":
    sys.exit(main())
