"""Run configuration: INI files whose ``[section] key`` pairs flatten to ``section.key``.

A run config looks like::

    [plant]
    preset = paper-nominal
    [model]
    z.tau = 0.35
    [wind]
    preset = paper-5kmh
    [smc]
    preset = laden
    [mission]
    target = 5, 5, 2

Named presets live in ``presets.ini`` next to this module.  Explicit keys
always win over the preset they modify.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .control import PdParams, SmcParams
from .errors import ConfigError
from .nav import Mission
from .plant import FirstOrderModel, SaturationLimits, UavPlant, WindModel
from .sysid import SweepSpec

PRESET_KINDS = ("plant", "wind", "smc", "pd")
WIND_KEYS = ("wind.enabled", "wind.mean", "wind.gust_std", "wind.bandwidth", "wind.seed")


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    return parser


def load_presets() -> dict:
    """``{"defaults": {...}, "plant": {name: {...}}, ...}``."""
    parser = _parser()
    parser.read_string(resources.files(__package__).joinpath("presets.ini").read_text())
    out = {kind: {} for kind in PRESET_KINDS}
    out["defaults"] = dict(parser["defaults"])
    for section in parser.sections():
        if ":" in section:
            kind, name = section.split(":", 1)
            out[kind][name] = dict(parser[section])
    return out


def _known_keys(presets: dict) -> set:
    keys = set(presets["defaults"]) | set(WIND_KEYS)
    for kind in PRESET_KINDS:
        for values in presets[kind].values():
            keys |= set(values)
    return keys


def read_ini(path) -> dict:
    """Flatten an INI file into ``{"section.key": "value"}``."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = _parser()
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return {f"{section}.{key}": value for section in parser.sections()
            for key, value in parser[section].items()}


def _parse_floats(text: str, key: str) -> tuple:
    try:
        return tuple(float(v) for v in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"{key}: expected numbers, got {text!r}") from exc


@dataclass
class ExperimentConfig:
    """Fully resolved flat key/value set that determines one run."""

    values: dict

    @classmethod
    def load(cls, path=None, overrides: dict | None = None) -> "ExperimentConfig":
        presets = load_presets()
        user = read_ini(path) if path is not None else {}
        user.update({k: str(v) for k, v in (overrides or {}).items()})
        unknown = set(user) - _known_keys(presets) - {f"{k}.preset" for k in PRESET_KINDS}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")

        values = dict(presets["defaults"])
        for kind in PRESET_KINDS:
            name = user.get(f"{kind}.preset", values[f"{kind}.preset"])
            if name not in presets[kind]:
                raise ConfigError(f"unknown {kind} preset {name!r}; "
                                  f"choose from {sorted(presets[kind])}")
            values[f"{kind}.preset"] = name
            values.update(presets[kind][name])
        if any(k in user for k in WIND_KEYS if k != "wind.enabled"):
            values["wind.enabled"] = "true"
            values.setdefault("wind.mean", "0, 0, 0")
            values.setdefault("wind.gust_std", "0")
            values.setdefault("wind.bandwidth", "1")
        values.update(user)
        return cls(values)

    # typed accessors

    def get(self, key: str) -> str:
        try:
            return self.values[key]
        except KeyError:
            raise ConfigError(f"missing config key {key!r}") from None

    def get_float(self, key: str) -> float:
        vals = _parse_floats(self.get(key), key)
        if len(vals) != 1:
            raise ConfigError(f"{key}: expected one number")
        return vals[0]

    def get_int(self, key: str) -> int:
        value = self.get_float(key)
        if value != int(value):
            raise ConfigError(f"{key}: expected an integer")
        return int(value)

    def get_vector(self, key: str, size: int | None = None) -> tuple:
        vals = _parse_floats(self.get(key), key)
        if size is not None and len(vals) != size:
            raise ConfigError(f"{key}: expected {size} numbers")
        return vals

    def get_bool(self, key: str) -> bool:
        text = self.get(key).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {text!r}")

    # builders

    @property
    def seed(self) -> int:
        return self.get_int("run.seed")

    @property
    def out_dir(self) -> Path:
        return Path(self.get("run.out"))

    def model(self, axis: str) -> FirstOrderModel:
        return FirstOrderModel(self.get_float(f"model.{axis}.gain"),
                               self.get_float(f"model.{axis}.tau"))

    def limits(self) -> SaturationLimits:
        return SaturationLimits(self.get_float("limits.xy"), self.get_float("limits.z"))

    def wind(self) -> WindModel | None:
        if not self.get_bool("wind.enabled"):
            return None
        seed = self.get_int("wind.seed") if "wind.seed" in self.values else self.seed
        return WindModel(self.get_vector("wind.mean", 3), self.get_float("wind.gust_std"),
                         self.get_float("wind.bandwidth"), seed)

    def plant(self) -> UavPlant:
        return UavPlant(self.model("x"), self.model("y"), self.model("z"), self.limits(),
                        self.wind(), self.get_float("mass.nominal"),
                        self.get_float("mass.payload"))

    def smc(self, group: str) -> SmcParams:
        p = f"smc.{group}."
        return SmcParams(self.get_float(p + "lambda"), self.get_float(p + "k_reach"),
                         self.get_float(p + "q"), self.get_float(p + "boundary_layer"))

    def pd(self, group: str) -> PdParams:
        return PdParams(self.get_float(f"pd.{group}.k_p"), self.get_float(f"pd.{group}.k_d"))

    def mission(self) -> Mission:
        return Mission(target=self.get_vector("mission.target", 3),
                       band_half_width=self.get_float("mission.band_half_width"),
                       hold_duration=self.get_float("mission.hold_duration"),
                       min_op_height=self.get_float("mission.min_op_height"),
                       timeout=self.get_float("mission.timeout"),
                       dt=self.get_float("mission.dt"))

    def sweep(self) -> SweepSpec:
        return SweepSpec.log_spaced(self.get_float("sweep.omega_min"),
                                    self.get_float("sweep.omega_max"),
                                    self.get_int("sweep.points"),
                                    amplitude=self.get_float("sweep.amplitude"),
                                    cycles_per_point=self.get_int("sweep.cycles_per_point"),
                                    settle_cycles=self.get_int("sweep.settle_cycles"))

    def axis(self, key: str) -> str:
        axis = self.get(key).strip().lower()
        if axis not in ("x", "y", "z"):
            raise ConfigError(f"{key} must be x, y or z")
        return axis


def write_model_file(path, model: FirstOrderModel, axis: str):
    parser = _parser()
    parser["model"] = {"axis": axis, "gain": f"{model.gain_k:.9f}", "tau": f"{model.tau:.9f}"}
    with open(path, "w") as fh:
        parser.write(fh)


def read_model_file(path) -> FirstOrderModel:
    flat = read_ini(path)
    try:
        return FirstOrderModel(float(flat["model.gain"]), float(flat["model.tau"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: not a model file ({exc})") from exc
