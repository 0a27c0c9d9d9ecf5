"""Identification of a first-order velocity model from sine and step responses.

Workflow: drive the axis with a sine sweep, check that every output peaks at
its input frequency (the LTI evidence), build a magnitude plot, read the
steady-state gain off the low-frequency end, locate the -3 dB cutoff, then
refine the time constant by least squares on the sine records.  Step
responses are scored against the fitted model with the mean absolute
percentage deviation (MAPD).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (ConfigError, CrossingNotFoundError, FormatError,
                     NoDominantFrequencyError, UndefinedResultError)
from .plant import DEFAULT_DT, FirstOrderModel, simulate_open_loop
from .timeseries import TimeSeries

OMEGA_MIN = 0.4
OMEGA_MAX = 15.0
TAU_MAX_GUESS = 0.9
HALF_POWER_DB = 20.0 * math.log10(math.sqrt(0.5))  # -3.0103
MAPD_EPS = 1e-3


@dataclass(frozen=True)
class SweepSpec:
    omegas: tuple
    amplitude: float = 1.0
    cycles_per_point: int = 5
    settle_cycles: int = 3

    def __post_init__(self):
        omegas = tuple(float(w) for w in self.omegas)
        object.__setattr__(self, "omegas", omegas)
        if not omegas:
            raise ConfigError("sweep needs at least one frequency")
        if any(w <= 0 for w in omegas) or any(b <= a for a, b in zip(omegas, omegas[1:])):
            raise ConfigError("sweep frequencies must be positive and strictly increasing")
        if not self.amplitude > 0:
            raise ConfigError("sweep amplitude must be positive")
        if self.cycles_per_point < self.settle_cycles + 2:
            raise ConfigError("cycles_per_point must be >= settle_cycles + 2")

    @classmethod
    def log_spaced(cls, omega_min=OMEGA_MIN, omega_max=OMEGA_MAX, points=25, **kwargs):
        if not (0 < omega_min < omega_max) or points < 2:
            raise ConfigError("need 0 < omega_min < omega_max and at least 2 points")
        return cls(omegas=tuple(np.geomspace(omega_min, omega_max, points)), **kwargs)

    def duration(self, omega: float) -> float:
        period = 2 * math.pi / omega
        settle = max(5 * TAU_MAX_GUESS, self.settle_cycles * period)
        return max(self.cycles_per_point * period, settle + 2 * period)


@dataclass(frozen=True)
class MagnitudePoint:
    omega: float
    mag_db: float


@dataclass(frozen=True)
class SweepRecord:
    omega: float
    input: TimeSeries
    output: TimeSeries


@dataclass(frozen=True)
class IdentifiedModel:
    model: FirstOrderModel
    tau_range: tuple
    slope_high_db_per_decade: float
    fit_sse: float
    lti_freq_deviation: float
    gain_lowfreq: float = float("nan")
    tau_cutoff: float = float("nan")

    def report(self) -> str:
        lo, hi = self.tau_range
        return "\n".join([
            f"gain_k            {self.model.gain_k:.4f}",
            f"gain_lowfreq      {self.gain_lowfreq:.4f}",
            f"tau_cutoff        {self.tau_cutoff:.4f} s",
            f"tau_range         [{lo:.4f}, {hi:.4f}] s",
            f"tau_refined       {self.model.tau:.4f} s",
            f"hf_slope          {self.slope_high_db_per_decade:.2f} dB/decade",
            f"fit_sse           {self.fit_sse:.6g}",
            f"lti_freq_dev_mean {self.lti_freq_deviation:.4g} rad/s",
        ]) + "\n"


def generate_sine(amplitude: float, omega: float, duration: float, dt: float = DEFAULT_DT) -> TimeSeries:
    if omega <= 0 or dt <= 0:
        raise ConfigError("omega and dt must be positive")
    if duration < 2 * (2 * math.pi / omega) - 1e-9:
        raise ConfigError(f"duration {duration} s shorter than two periods at {omega} rad/s")
    n = int(round(duration / dt)) + 1
    t = dt * np.arange(n)
    return TimeSeries(dt=dt, values=amplitude * np.sin(omega * t))


def peak_frequency(ts: TimeSeries) -> float:
    """Frequency (rad/s) of the strongest non-DC spectral component.

    Hann window, 8x zero padding, then a parabola through the log magnitudes
    of the peak bin and its neighbours.
    """
    x = ts.values - ts.values.mean()
    if len(x) < 64:
        raise FormatError("peak_frequency needs at least 64 samples")
    if np.max(np.abs(x)) <= 1e-12 * max(1.0, np.max(np.abs(ts.values))):
        raise NoDominantFrequencyError("series is constant")
    nfft = 8 * (1 << (len(x) - 1).bit_length())
    spec = np.abs(np.fft.rfft(x * np.hanning(len(x)), nfft))
    k = 1 + int(np.argmax(spec[1:]))
    offset = 0.0
    if 1 < k < len(spec) - 1:
        la, lb, lc = np.log(spec[k - 1:k + 2] + 1e-300)
        denom = la - 2 * lb + lc
        if denom < 0:
            offset = 0.5 * (la - lc) / denom
    return 2 * math.pi * (k + offset) / (nfft * ts.dt)


def _sine_fit(values: np.ndarray, t: np.ndarray, omega: float) -> complex:
    basis = np.column_stack([np.sin(omega * t), np.cos(omega * t), np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(basis, values, rcond=None)
    return complex(coef[0], coef[1])


def magnitude_at(input: TimeSeries, output: TimeSeries, omega: float,
                 settle_cycles: int = 0, settle_time: float = 5 * TAU_MAX_GUESS) -> float:
    """Steady-state gain (dB) from input to output at ``omega``.

    The transient window ``max(settle_time, settle_cycles periods)`` is
    discarded; both signals are then projected onto sin/cos at ``omega``.
    """
    if not input.same_grid(output):
        raise FormatError("input and output must share dt and length")
    if not 0 < omega < math.pi / input.dt:
        raise ConfigError(f"omega {omega} outside (0, Nyquist={math.pi / input.dt:.3f})")
    skip = max(settle_time, settle_cycles * 2 * math.pi / omega)
    start = int(math.ceil(skip / input.dt - 1e-9))
    if len(input) - start < 8:
        raise FormatError("record too short after discarding the settle window")
    t = input.t[start:]
    u = _sine_fit(input.values[start:], t, omega)
    y = _sine_fit(output.values[start:], t, omega)
    if abs(u) == 0:
        raise UndefinedResultError(f"no input content at {omega} rad/s")
    return 20.0 * math.log10(abs(y) / abs(u))


def _respond(source, record_input: TimeSeries) -> TimeSeries:
    if isinstance(source, FirstOrderModel):
        return simulate_open_loop(source, record_input)
    return source(record_input)


def sweep_records(source, spec: SweepSpec, dt: float = DEFAULT_DT) -> list:
    """Excite ``source`` (a model or an input->output callable) at every sweep frequency."""
    records = []
    for omega in spec.omegas:
        u = generate_sine(spec.amplitude, omega, spec.duration(omega), dt)
        records.append(SweepRecord(omega, u, _respond(source, u)))
    return records


def build_bode(source, spec: SweepSpec, dt: float = DEFAULT_DT) -> list:
    """Magnitude points in ascending frequency.

    ``source`` may also be a list of already recorded ``SweepRecord``.
    """
    if isinstance(source, (list, tuple)):
        records = sorted(source, key=lambda r: r.omega)
    else:
        records = sweep_records(source, spec, dt)
    return [MagnitudePoint(r.omega, magnitude_at(r.input, r.output, r.omega, spec.settle_cycles))
            for r in records]


def estimate_gain(bode: Sequence[MagnitudePoint]) -> float:
    """Gain from the lowest-frequency magnitude, 10^(M/20)."""
    if not bode:
        raise ConfigError("empty magnitude plot")
    lowest = min(bode, key=lambda p: p.omega)
    return 10.0 ** (lowest.mag_db / 20.0)


def cutoff_frequency(bode: Sequence[MagnitudePoint], gain_k: float) -> tuple:
    """Return ``(omega_c, omega_below, omega_above)`` for the -3 dB crossing.

    ``omega_c`` is interpolated linearly in (log10 omega, dB); the other two
    are the grid points bracketing it.
    """
    pts = sorted(bode, key=lambda p: p.omega)
    level = 20.0 * math.log10(gain_k) + HALF_POWER_DB
    for prev, cur in zip(pts, pts[1:]):
        if prev.mag_db > level >= cur.mag_db:
            lw0, lw1 = math.log10(prev.omega), math.log10(cur.omega)
            frac = (prev.mag_db - level) / (prev.mag_db - cur.mag_db)
            return 10 ** (lw0 + frac * (lw1 - lw0)), prev.omega, cur.omega
    raise CrossingNotFoundError(
        f"magnitude never crosses {level:.2f} dB between "
        f"{pts[0].omega:.3g} and {pts[-1].omega:.3g} rad/s")


def estimate_tau_cutoff(bode: Sequence[MagnitudePoint], gain_k: float) -> tuple:
    """Time-constant bracket ``(tau_low, tau_high)`` from the cutoff.

    tau = 1/(2 pi f_c) = 1/omega_c; the bracket comes from the two grid
    frequencies around the crossing.
    """
    _, w_below, w_above = cutoff_frequency(bode, gain_k)
    return 1.0 / w_above, 1.0 / w_below


INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-4) -> float:
    """Minimizer of a unimodal ``f`` on ``[lo, hi]`` to within ``tol``."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def sse(model: FirstOrderModel, records) -> float:
    total = 0.0
    for u, y in records:
        sim = simulate_open_loop(model, u)
        total += float(np.sum((y.values - sim.values) ** 2))
    return total


def refine_tau_ls(structure_gain: float, tau_range, records, tol: float = 1e-4) -> float:
    """Least-squares time constant inside ``tau_range`` with the gain held fixed.

    ``records`` is a list of ``(input, output)`` pairs.  A flat objective
    (e.g. all-zero data) returns the midpoint of the range.
    """
    records = [(r.input, r.output) if isinstance(r, SweepRecord) else r for r in records]
    if not records:
        raise ConfigError("least-squares refinement needs at least one record")
    lo, hi = sorted(float(v) for v in tau_range)
    if lo <= 0:
        raise ConfigError("tau range must be positive")
    mid = 0.5 * (lo + hi)

    def cost(tau):
        return sse(FirstOrderModel(structure_gain, tau), records)

    probes = [cost(lo), cost(mid), cost(hi)]
    if max(probes) - min(probes) <= 1e-12 * max(1.0, max(probes)):
        return mid
    return golden_section(cost, lo, hi, tol)


def lti_check(records) -> list:
    """``(omega_in, omega_out)`` per sweep record, using the output spectral peak."""
    return [(r.omega, peak_frequency(r.output)) for r in records]


def high_freq_slope(bode: Sequence[MagnitudePoint], tau_guess: float | None = None) -> float:
    """Least-squares slope (dB/decade) over the high-frequency end of the sweep.

    Uses the top decade; with ``tau_guess`` only points at or above
    ``5/tau_guess`` are kept, falling back to the top octave when fewer
    than two such points exist.
    """
    pts = sorted(bode, key=lambda p: p.omega)
    if len(pts) < 2:
        raise ConfigError("need at least two magnitude points")
    w = np.array([p.omega for p in pts])
    m = np.array([p.mag_db for p in pts])
    keep = w >= w[-1] / 10.0
    if tau_guess is not None:
        hf = keep & (w >= 5.0 / tau_guess)
        keep = hf if hf.sum() >= 2 else w >= w[-1] / 2.0
    if keep.sum() < 2:
        raise ConfigError("not enough high-frequency points for a slope fit")
    slope, _ = np.polyfit(np.log10(w[keep]), m[keep], 1)
    return float(slope)


def identify(source, spec: SweepSpec | None = None, dt: float = DEFAULT_DT,
             records: list | None = None, max_iter: int = 20) -> IdentifiedModel:
    """Full identification pipeline on one axis.

    The raw low-frequency gain underestimates K by ``|1 + j tau omega_l|``; once
    a time constant is known the gain is corrected for that roll-off and the
    cutoff and least-squares stages are repeated until the gain settles.
    """
    spec = spec or SweepSpec.log_spaced()
    if records is None:
        records = sweep_records(source, spec, dt)
    bode = build_bode(records, spec, dt)
    gain_raw = estimate_gain(bode)
    w_low = min(p.omega for p in bode)
    gain = gain_raw
    for _ in range(max_iter):
        w_c, _, _ = cutoff_frequency(bode, gain)
        tau_range = estimate_tau_cutoff(bode, gain)
        tau = refine_tau_ls(gain, tau_range, records)
        new_gain = gain_raw * math.sqrt(1.0 + (tau * w_low) ** 2)
        converged = abs(new_gain - gain) <= 1e-6 * gain
        gain = new_gain
        if converged:
            break
    w_c, _, _ = cutoff_frequency(bode, gain)
    tau_range = estimate_tau_cutoff(bode, gain)
    tau = refine_tau_ls(gain, tau_range, records)
    model = FirstOrderModel(gain, tau)
    pairs = lti_check(records)
    return IdentifiedModel(
        model=model,
        tau_range=tau_range,
        slope_high_db_per_decade=high_freq_slope(bode, tau),
        fit_sse=sse(model, [(r.input, r.output) for r in records]),
        lti_freq_deviation=float(np.mean([abs(a - b) for a, b in pairs])),
        gain_lowfreq=gain_raw,
        tau_cutoff=1.0 / w_c,
    )


def mapd(exp: TimeSeries, sim: TimeSeries, eps: float = MAPD_EPS) -> float:
    """Mean absolute percentage deviation of ``sim`` from ``exp``.

    Samples with ``|exp| < eps`` are left out of the mean.
    """
    if not exp.same_grid(sim):
        raise FormatError("MAPD needs series of equal length and dt")
    g_exp, g_sim = exp.values, sim.values
    keep = np.abs(g_exp) >= eps
    if not keep.any():
        raise UndefinedResultError("every experimental sample is below the MAPD guard")
    return float(np.mean(np.abs((g_exp[keep] - g_sim[keep]) / g_exp[keep])) * 100.0)


def step_input(amplitude: float, duration: float, dt: float = DEFAULT_DT) -> TimeSeries:
    n = int(round(duration / dt)) + 1
    return TimeSeries(dt=dt, values=np.full(n, float(amplitude)))


@dataclass
class ValidationReport:
    """Per-amplitude MAPD; ``errors`` holds amplitudes whose MAPD is undefined."""

    per_amplitude: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)

    @property
    def values(self) -> np.ndarray:
        return np.array([m for _, m in self.per_amplitude])

    @property
    def max_mapd(self) -> float:
        if not self.per_amplitude:
            raise UndefinedResultError("no record produced a defined MAPD")
        return float(self.values.max())

    @property
    def mean_mapd(self) -> float:
        if not self.per_amplitude:
            raise UndefinedResultError("no record produced a defined MAPD")
        return float(self.values.mean())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["amplitude", "mapd_percent"])
        for amp, value in self.per_amplitude:
            writer.writerow([f"{amp:.6f}", f"{value:.6f}"])
        for amp in self.errors:
            writer.writerow([f"{amp:.6f}", "undefined"])
        return buf.getvalue()

    def summary(self) -> str:
        if not self.per_amplitude:
            return "MAPD undefined for every record\n"
        return f"mean_mapd={self.mean_mapd:.4f}% max_mapd={self.max_mapd:.4f}%\n"

    def text(self) -> str:
        lines = ["Step validation", "amplitude  MAPD[%]"]
        lines += [f"{amp:9.3f}  {value:7.3f}" for amp, value in self.per_amplitude]
        lines += [f"{amp:9.3f}  undefined ({msg})" for amp, msg in self.errors.items()]
        return "\n".join(lines) + "\n" + self.summary()


def validate_step(model: FirstOrderModel, step_records) -> ValidationReport:
    """Score ``(amplitude, measured step response)`` records against ``model``."""
    report = ValidationReport()
    for amplitude, measured in step_records:
        if measured.duration < 5 * model.tau:
            raise FormatError(f"step record at {amplitude} m/s shorter than 5 tau")
        u = TimeSeries(dt=measured.dt, values=np.full(len(measured), float(amplitude)),
                       start_time=measured.start_time)
        sim = simulate_open_loop(model, u)
        try:
            report.per_amplitude.append((float(amplitude), mapd(measured, sim)))
        except UndefinedResultError as exc:
            report.errors[float(amplitude)] = str(exc)
    return report
