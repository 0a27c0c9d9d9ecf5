"""Uniformly sampled signals and their CSV form."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, NumericInputError

CSV_HEADER = "t,value"
CSV_FMT = "%.6f"


@dataclass(frozen=True)
class TimeSeries:
    """Signal sampled every ``dt`` seconds starting at ``start_time``."""

    dt: float
    values: np.ndarray = field(repr=False)
    start_time: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise FormatError("TimeSeries values must be one-dimensional")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise FormatError(f"dt must be positive, got {self.dt}")
        if values.size < 2:
            raise FormatError("TimeSeries needs at least 2 samples")
        if not np.all(np.isfinite(values)):
            raise NumericInputError("TimeSeries contains non-finite samples")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    @property
    def t(self) -> np.ndarray:
        return self.start_time + self.dt * np.arange(self.values.size)

    @property
    def duration(self) -> float:
        return self.dt * (self.values.size - 1)

    @classmethod
    def from_samples(cls, t, values, rtol: float = 1e-6) -> "TimeSeries":
        """Build from explicit sample times, rejecting non-uniform grids."""
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float)
        if t.shape != values.shape or t.size < 2:
            raise FormatError("time and value columns must have equal length >= 2")
        steps = np.diff(t)
        dt = float(np.mean(steps))
        if dt <= 0 or np.max(np.abs(steps - dt)) > rtol * max(dt, 1.0) + 1e-9:
            raise FormatError("samples are not uniformly spaced")
        return cls(dt=dt, values=values, start_time=float(t[0]))

    def same_grid(self, other: "TimeSeries") -> bool:
        return len(self) == len(other) and np.isclose(self.dt, other.dt, rtol=1e-9)

    def to_csv(self, path=None) -> str:
        """Write ``t,value`` rows; returns the text and writes it when ``path`` is given."""
        buf = io.StringIO()
        np.savetxt(buf, np.column_stack([self.t, self.values]), fmt=CSV_FMT,
                   delimiter=",", header=CSV_HEADER, comments="")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def read_csv(cls, path) -> "TimeSeries":
        with open(path) as fh:
            header = fh.readline().strip()
            if header != CSV_HEADER:
                raise FormatError(f"expected header {CSV_HEADER!r}, got {header!r}")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        if data.shape[1] != 2:
            raise FormatError("expected two columns")
        return cls.from_samples(data[:, 0], data[:, 1])
